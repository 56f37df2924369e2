//! Searches the holonomy transformations at a point for large `ρ_ν`, the
//! squared norm of the dual transport of a unit `ν`, and reports the
//! curvature margin at the maximizer.

use folilab::holonomy::{thm_max_search, SearchOptions};
use folilab::models::{flat_torus, hopf_warped};
use folilab::sampling::item_rng;
use folilab::{FoliatedModel, TangentVector};

fn search(name: &str, fm: &FoliatedModel) -> folilab::Result<()> {
    let p = fm.sample_point(&mut item_rng(4, 0));
    let v = fm.vertical_orthonormal_frame(&p)?;
    let nu0 = TangentVector::new(p.clone(), v.column(0).into());
    let r = thm_max_search(fm, &p, &nu0, 64, 17, &SearchOptions::default())?;
    println!("{name}: best rho {:.6} after {} candidates, margin {:.6}", r.best_rho, r.evaluated, r.worst_margin);
    for (n, rho) in &r.history {
        println!("  {n:4} {rho:.6}");
    }
    Ok(())
}

fn main() -> folilab::Result<()> {
    search("flat_torus", &flat_torus(3, 1))?;
    search("hopf_warped", &hopf_warped(1.0, 0.5, 1)?)?;
    Ok(())
}
