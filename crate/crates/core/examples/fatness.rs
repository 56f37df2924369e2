//! Fatness margins and kernels of `(X, Y) ↦ ⟨A_X Y, ξ⟩`.
//!
//! Hopf fibrations are fat; a product with a circle is not, and the kernel
//! of its form spans planes of zero curvature.

use folilab::foliation::{fat_point_margin, fatness_form, kernel_direction};
use folilab::geometry::unreduced_sectional_at;
use folilab::models::{hopf_s3, s3_x_s1};
use folilab::sampling::item_rng;
use folilab::TangentVector;

fn main() -> folilab::Result<()> {
    for eps in [1.0, 0.5] {
        let fm = hopf_s3(eps)?;
        let p = fm.sample_point(&mut item_rng(6, 0));
        println!("hopf_s3 eps = {eps}: fat margin {:.10}", fat_point_margin(&fm, &p, 16)?);
    }

    let fm = s3_x_s1(1.0, 1.0)?;
    let p = fm.sample_point(&mut item_rng(6, 1));
    println!("s3_x_s1: fat margin {:.3e}", fat_point_margin(&fm, &p, 16)?);
    let v = fm.vertical_orthonormal_frame(&p)?;
    let xi = TangentVector::new(p.clone(), v.column(0).into());
    let form = fatness_form(&fm, &p, &xi)?;
    println!("  singular values {:?}", form.singular_values());
    let x = kernel_direction(&fm, &p, &xi)?;
    let k = unreduced_sectional_at(&fm.metric, &p, &x.components, &xi.components)?;
    println!("  kernel direction {:?}", x.components.as_slice());
    println!("  K(X, xi) = {k:.3e}");
    Ok(())
}
