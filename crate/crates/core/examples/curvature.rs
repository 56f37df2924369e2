//! Sectional curvatures of a Berger sphere against the submersion formulas.
//!
//! The base is the sphere of radius 1/2, of curvature 4, so a horizontal
//! plane has `K = 4 − 3|A_X Y|² = 4 − 3ε²`, and a vertizontal one has
//! `K = |A*_X ξ|² = ε²`.

use folilab::foliation::{a_star, a_tensor};
use folilab::geometry::unreduced_sectional_at;
use folilab::models::hopf_s3;
use folilab::sampling::item_rng;
use folilab::TangentVector;

fn main() -> folilab::Result<()> {
    for eps in [1.0, 0.8, 0.5, 0.3] {
        let fm = hopf_s3(eps)?;
        let p = fm.sample_point(&mut item_rng(7, 0));
        let h = fm.horizontal_orthonormal_frame(&p)?;
        let v = fm.vertical_orthonormal_frame(&p)?;
        let proj = fm.projectors(&p)?;
        let (x, y, xi) = (h.column(0).into_owned(), h.column(1).into_owned(), v.column(0).into_owned());

        let k_hor = unreduced_sectional_at(&fm.metric, &p, &x, &y)?;
        let a = a_tensor(&fm, &TangentVector::new(p.clone(), x.clone()), &TangentVector::new(p.clone(), y))?;
        let formula = 4.0 - 3.0 * proj.norm(&a.components).powi(2);

        let k_vh = unreduced_sectional_at(&fm.metric, &p, &x, &xi)?;
        let b = a_star(&fm, &TangentVector::new(p.clone(), x), &TangentVector::new(p.clone(), xi))?;
        let vh_formula = proj.norm(&b.components).powi(2);

        println!("eps = {eps}");
        println!("  horizontal:   K = {k_hor:.10}, 4 - 3|A|^2 = {formula:.10}, 4 - 3eps^2 = {:.10}", 4.0 - 3.0 * eps * eps);
        println!("  vertizontal:  K = {k_vh:.10}, |A*|^2 = {vh_formula:.10}");
    }
    Ok(())
}
