//! The span of the holonomy images of `A_X Y` along a path, and the check
//! that dual fields orthogonal to it stay annihilated by `A*`.

use folilab::holonomy::{dual_leaf_span, dual_orthogonality_check, random_horizontal_path, SpanCheck};
use folilab::models::{hopf_s3, torus_x_hopf};
use folilab::sampling::item_rng;
use folilab::FoliatedModel;

fn run(name: &str, fm: &FoliatedModel) -> folilab::Result<()> {
    let p = fm.sample_point(&mut item_rng(8, 0));
    let path = random_horizontal_path(fm, &p, 3, 0.5, 21)?;
    let span = dual_leaf_span(fm, &path, 12)?;
    match dual_orthogonality_check(fm, &path, &span)? {
        SpanCheck::NotApplicable { rank } => println!("{name}: span has full rank {rank}, nothing to check"),
        SpanCheck::Checked { a_star_max, orthogonality_max, rank } => {
            println!("{name}: rank {rank} of {}, max |A* nu| {a_star_max:.3e}, max pairing {orthogonality_max:.3e}", fm.leaf_dim)
        }
    }
    Ok(())
}

fn main() -> folilab::Result<()> {
    run("hopf_s3", &hopf_s3(1.0)?)?;
    run("torus_x_hopf", &torus_x_hopf(1.0)?)?;
    Ok(())
}
