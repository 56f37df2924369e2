//! Holonomy transformations of two paths, their composite and an inverse.

use folilab::holonomy::{compose, holonomy_transformation, invert, random_horizontal_path};
use folilab::models::hopf_warped;
use folilab::sampling::item_rng;

fn main() -> folilab::Result<()> {
    let fm = hopf_warped(1.0, 0.5, 1)?;
    let p = fm.sample_point(&mut item_rng(5, 0));
    let first = random_horizontal_path(&fm, &p, 2, 0.5, 1)?;
    let second = random_horizontal_path(&fm, &first.end().point, 2, 0.5, 2)?;

    let h1 = holonomy_transformation(&fm, &first)?;
    let h2 = holonomy_transformation(&fm, &second)?;
    let h21 = compose(&fm, &h2, &h1)?;
    let direct = holonomy_transformation(&fm, &first.concat(&fm, &second)?)?;
    println!("h1 = {:.10}, h2 = {:.10}", h1.matrix[(0, 0)], h2.matrix[(0, 0)]);
    println!("h2 h1 = {:.10}, along the joined path = {:.10}", h21.matrix[(0, 0)], direct.matrix[(0, 0)]);

    let back = holonomy_transformation(&fm, &first.reversed())?;
    println!("inverse of h1 = {:.10}, along the reversed path = {:.10}", invert(&h1)?.matrix[(0, 0)], back.matrix[(0, 0)]);

    match compose(&fm, &h1, &h1) {
        Ok(_) => println!("h1 h1 composed"),
        Err(e) => println!("h1 h1 rejected: {e}"),
    }
    Ok(())
}
