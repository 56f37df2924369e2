//! Transports a vertical vector along a random horizontal path, together with
//! its dual, and watches their pairing stay constant.

use folilab::holonomy::{random_horizontal_path, transport_dual, transport_holonomy};
use folilab::models::hopf_warped;
use folilab::sampling::item_rng;
use folilab::TangentVector;

fn main() -> folilab::Result<()> {
    let fm = hopf_warped(1.0, 0.5, 1)?;
    let p = fm.sample_point(&mut item_rng(3, 0));
    let path = random_horizontal_path(&fm, &p, 4, 0.5, 11)?;
    println!("path {} of length {:.6}", path.label, path.length(&fm)?);

    let v = fm.vertical_orthonormal_frame(&p)?;
    let xi0 = TangentVector::new(p.clone(), v.column(0).into());
    let xi = transport_holonomy(&fm, &path, &xi0)?;
    let nu = transport_dual(&fm, &path, &xi0)?;
    println!("drift: holonomy {:.2e}, dual {:.2e}", xi.max_drift, nu.max_drift);
    println!("{:>8} {:>14} {:>14} {:>14}", "t", "|xi|", "|nu|", "<xi,nu>");
    let step = (xi.samples.len() / 8).max(1);
    for ((t, a), (_, b)) in xi.samples.iter().zip(&nu.samples).step_by(step) {
        let g = fm.metric.metric(&a.base)?;
        let norm = |c: &nalgebra::DVector<f64>| c.dot(&(&g * c)).sqrt();
        let pair = a.components.dot(&(&g * &b.components));
        println!("{t:8.4} {:14.10} {:14.10} {pair:14.10}", norm(&a.components), norm(&b.components));
    }
    Ok(())
}
