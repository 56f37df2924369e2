//! Empirical bounds on holonomy transformations for bounded and unbounded
//! families.

use folilab::holonomy::{holonomy_bound_detailed, PathShape};
use folilab::models::{hopf_s3, hopf_warped};
use folilab::sampling::item_rng;
use folilab::FoliatedModel;

fn report(name: &str, fm: &FoliatedModel) -> folilab::Result<()> {
    let p = fm.sample_point(&mut item_rng(2, 0));
    for len in [0.25, 0.5, 1.0] {
        let b = holonomy_bound_detailed(fm, &p, 32, &PathShape::new(4, len), 9)?;
        println!("{name:<16} segments of {len:4}: max |h| = {:.6}, L = {:.6}", b.estimate, b.l_hat);
    }
    Ok(())
}

fn main() -> folilab::Result<()> {
    report("hopf_s3", &hopf_s3(0.8)?)?;
    report("hopf_warped 0.3", &hopf_warped(1.0, 0.3, 1)?)?;
    report("hopf_warped 1.0", &hopf_warped(1.0, 1.0, 1)?)?;
    Ok(())
}
