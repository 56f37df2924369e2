//! Closed horizontal loops at a point and the holonomy-invariant inner
//! product averaged over them.

use folilab::holonomy::{holonomy_transformation, invariant_metric_average, HopfLatitudeLoops, LoopFamily};
use folilab::models::{hopf_s3, hopf_warped};
use folilab::sampling::item_rng;

fn main() -> folilab::Result<()> {
    let fm = hopf_warped(1.0, 0.5, 1)?;
    let p = fm.sample_point(&mut item_rng(10, 0));
    let family = HopfLatitudeLoops { factor: 0 };
    for i in 0..5 {
        match family.closed_loop(&fm, &p, i, 3)? {
            Some(path) => {
                let h = holonomy_transformation(&fm, &path)?;
                println!("{}: gap {:.1e}, length {:.6}, h = {:.12}", path.label, path.closure_gap, path.length(&fm)?, h.matrix[(0, 0)]);
            }
            None => println!("attempt {i} did not close"),
        }
    }

    for (name, fm) in [("hopf_s3", hopf_s3(0.8)?), ("hopf_warped", fm)] {
        let inv = invariant_metric_average(&fm, &p, 16, 3)?;
        println!("{name}: Q = {:.10} from {} loops ({}), residual {:.2e} on {}", inv.q[(0, 0)], inv.averaged, inv.family, inv.residual, inv.checked);
    }
    Ok(())
}
