//! The `A`, `A*` and `S` tensors on a Berger sphere and on a warped one.
//!
//! On the Berger sphere with fiber scale `ε`, `|A_X Y| = ε` for orthonormal
//! horizontal `X`, `Y`, and the fibers are totally geodesic. Warping the
//! fibers by `e^φ` makes `S_X ξ = −dφ(X) ξ`.

use folilab::foliation::{a_star, a_tensor, s_tensor};
use folilab::models::{hopf_s3, hopf_warped};
use folilab::sampling::item_rng;
use folilab::TangentVector;

fn main() -> folilab::Result<()> {
    let eps = 0.6;
    let fm = hopf_s3(eps)?;
    let p = fm.sample_point(&mut item_rng(1, 0));
    let h = fm.horizontal_orthonormal_frame(&p)?;
    let x = TangentVector::new(p.clone(), h.column(0).into());
    let y = TangentVector::new(p.clone(), h.column(1).into());
    let proj = fm.projectors(&p)?;

    let a = a_tensor(&fm, &x, &y)?;
    println!("berger eps = {eps}");
    println!("  |A_X Y|     = {:.12}", proj.norm(&a.components));
    println!("  verticality = {:.12}", proj.verticality(&a.components));
    let back = a_star(&fm, &x, &a)?;
    println!("  <A*_X A_X Y, Y> = {:.12}  (= |A_X Y|^2)", proj.inner(&back.components, &y.components));
    let s = s_tensor(&fm, &x, &a)?;
    println!("  |S_X xi|    = {:.3e}", proj.norm(&s.components));

    let lambda = 0.4;
    let fw = hopf_warped(1.0, lambda, 1)?;
    let warp = fw.warp.clone().expect("warped model");
    let p = fw.sample_point(&mut item_rng(1, 1));
    let h = fw.horizontal_orthonormal_frame(&p)?;
    let v = fw.vertical_orthonormal_frame(&p)?;
    let x = TangentVector::new(p.clone(), h.column(0).into());
    let xi = TangentVector::new(p.clone(), v.column(0).into());
    let s = s_tensor(&fw, &x, &xi)?;
    let dphi_x = (warp.dphi)(&p).dot(&x.components);
    let gap = (&s.components + dphi_x * &xi.components).amax();
    println!("warped lambda = {lambda}");
    println!("  dphi(X) = {dphi_x:.12}, |S_X xi + dphi(X) xi| = {gap:.3e}");
    Ok(())
}
