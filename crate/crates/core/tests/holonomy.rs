mod common;

use common::{all_models, point, right_invariant, unproject, UNITS};
use folilab::geometry::TangentVector;
use folilab::holonomy::{
    compose, dual_leaf_span, dual_orthogonality_check, holonomy_bound_detailed, holonomy_bound_estimate,
    holonomy_transformation, horizontal_geodesic, invariant_metric_average, invert, lift_transformations,
    random_horizontal_path, random_path_for_item, reparametrized, rho, rho_coords, thm_max_search, transport_dual,
    transport_holonomy, transport_jobs, zeta, zeta_bar, FieldKind, HolonomyTransformation, HorizontalPath,
    PathShape, SearchOptions, SpanCheck, TransportJob,
};
use folilab::models::{flat_torus, hopf_s3, hopf_warped, s3_x_s1, torus_x_hopf};
use folilab::sampling::item_rng;
use folilab::{ChartPoint, Error, FoliatedModel};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn path(fm: &FoliatedModel, p: &ChartPoint, seed: u64) -> HorizontalPath {
    random_horizontal_path(fm, p, 3, 0.6, seed).unwrap()
}

fn height_at(p: &ChartPoint) -> f64 {
    let x = unproject(p.chart, &p.coords.as_slice()[..3]);
    2.0 * (x[0] * x[2] + x[1] * x[3])
}

/// Largest entry gap of two transformations written in orthonormal frames.
fn gap(a: &HolonomyTransformation, b: &HolonomyTransformation) -> f64 {
    (&a.matrix - &b.matrix).amax()
}

#[test]
fn random_paths_are_deterministic_and_horizontal() {
    for (name, fm) in all_models() {
        let p = point(&fm, 1, 0);
        let a = path(&fm, &p, 42);
        let b = path(&fm, &p, 42);
        let c = path(&fm, &p, 43);
        let ends = |x: &HorizontalPath| x.end().point.coords.clone();
        assert_eq!(ends(&a), ends(&b), "{name}");
        assert_ne!(ends(&a), ends(&c), "{name}");
        assert!(a.horizontality_drift(&fm).unwrap() < 1e-8, "{name}");
        assert!((a.length(&fm).unwrap() - 1.8).abs() < 1e-6, "{name}");
        let again = random_path_for_item(&fm, &p, 2, 0.5, 20, 7, 3).unwrap();
        let same = random_path_for_item(&fm, &p, 2, 0.5, 20, 7, 3).unwrap();
        assert_eq!(ends(&again), ends(&same));
    }
}

#[test]
fn geodesics_need_horizontal_velocity() {
    let fm = hopf_s3(1.0).unwrap();
    let p = point(&fm, 2, 0);
    let xi = fm.random_vertical(&p, &mut item_rng(2, 1)).unwrap();
    assert!(matches!(horizontal_geodesic(&fm, &xi, 1.0, 32), Err(Error::Argument(_))));
    assert!(random_horizontal_path(&fm, &p, 0, 0.5, 1).is_err());
}

#[test]
fn hopf_holonomy_fields_are_the_action_field() {
    for fm in [hopf_s3(1.0).unwrap(), hopf_s3(0.7).unwrap(), hopf_warped(1.0, 0.3, 1).unwrap()] {
        for i in 0..10 {
            let p = point(&fm, 3, i);
            let c = path(&fm, &p, 300 + i);
            let xi0 = TangentVector::new(p.clone(), right_invariant(p.chart, p.coords.as_slice(), &UNITS[0]));
            let field = transport_holonomy(&fm, &c, &xi0).unwrap();
            for (_, v) in &field.samples {
                let expected = right_invariant(v.base.chart, v.base.coords.as_slice(), &UNITS[0]);
                assert!((&v.components - &expected).amax() < 1e-7, "{}", fm.name);
            }
        }
    }
}

#[test]
fn flat_holonomy_is_trivial() {
    let fm = flat_torus(4, 2);
    for i in 0..10 {
        let p = point(&fm, 4, i);
        let h = holonomy_transformation(&fm, &path(&fm, &p, 400 + i)).unwrap();
        assert!((&h.matrix - DMatrix::identity(2, 2)).amax() < 1e-12);
    }
    let p = point(&fm, 4, 99);
    let est = holonomy_bound_estimate(&fm, &p, 50, 3, 0.7, 1).unwrap();
    assert!((est - 1.0).abs() <= 1e-9);
}

#[test]
fn isometric_holonomy_is_the_identity() {
    let models = [hopf_s3(1.0).unwrap(), hopf_s3(0.8).unwrap(), s3_x_s1(1.0, 1.0).unwrap(), torus_x_hopf(1.0).unwrap()];
    for fm in &models {
        for i in 0..10 {
            let p = point(fm, 5, i);
            let h = holonomy_transformation(fm, &path(fm, &p, 500 + i)).unwrap();
            let k = fm.leaf_dim;
            assert!((&h.matrix - DMatrix::identity(k, k)).amax() < 1e-7, "{}: {}", fm.name, h.matrix);
        }
    }
}

#[test]
fn warped_holonomy_scales_by_the_warping() {
    let lambda = 0.4;
    let fm = hopf_warped(1.0, lambda, 1).unwrap();
    for i in 0..10 {
        let p = point(&fm, 6, i);
        let c = path(&fm, &p, 600 + i);
        let h = holonomy_transformation(&fm, &c).unwrap();
        let expected = (lambda * (height_at(&c.end().point) - height_at(&p))).exp();
        assert!((h.matrix[(0, 0)] - expected).abs() < 1e-7, "{} vs {expected}", h.matrix[(0, 0)]);
        // The dual action inverts the scaling and ρ is its square.
        let nu0 = fm.random_vertical(&p, &mut item_rng(6, i)).unwrap();
        let r = rho(&fm, &h, &nu0).unwrap();
        assert!((r - expected.powi(-2)).abs() < 1e-6);
    }
}

#[test]
fn holonomy_and_dual_pairing_is_constant() {
    for (name, fm) in all_models() {
        for i in 0..5 {
            let p = point(&fm, 7, i);
            let c = path(&fm, &p, 700 + i);
            let mut rng = item_rng(7, 100 + i);
            let xi0 = fm.random_vertical(&p, &mut rng).unwrap();
            let nu0 = fm.random_vertical(&p, &mut rng).unwrap();
            let xi = transport_holonomy(&fm, &c, &xi0).unwrap();
            let nu = transport_dual(&fm, &c, &nu0).unwrap();
            let start = fm.metric.inner(&p, &xi0.components, &nu0.components).unwrap();
            for ((_, a), (_, b)) in xi.samples.iter().zip(&nu.samples) {
                let now = fm.metric.inner(&a.base, &a.components, &b.components).unwrap();
                assert!((now - start).abs() < 1e-8, "{name}");
            }
            assert!(xi.max_drift < 1e-8 && nu.max_drift < 1e-8, "{name}");
        }
    }
}

#[test]
fn dual_transport_is_the_inverse_transpose() {
    for (name, fm) in all_models() {
        for i in 0..5 {
            let p = point(&fm, 8, i);
            let c = path(&fm, &p, 800 + i);
            let h = holonomy_transformation(&fm, &c).unwrap();
            let nu0 = fm.random_vertical(&p, &mut item_rng(8, i)).unwrap();
            let by_ode = transport_dual(&fm, &c, &nu0).unwrap();
            let by_algebra = zeta_bar(&fm, &h, &nu0).unwrap();
            assert!((&by_ode.last().components - &by_algebra.components).amax() < 1e-7, "{name}");
            let xi = transport_holonomy(&fm, &c, &nu0).unwrap();
            assert!((&xi.last().components - &zeta(&fm, &h, &nu0).unwrap().components).amax() < 1e-9, "{name}");
        }
    }
}

#[test]
fn transport_jobs_match_single_transports() {
    let fm = hopf_warped(0.9, 0.3, 1).unwrap();
    let p = point(&fm, 9, 0);
    let c = path(&fm, &p, 900);
    let e = fm.vertical_orthonormal_frame(&p).unwrap();
    let jobs = [
        TransportJob { kind: FieldKind::Holonomy, initial: e.clone() },
        TransportJob { kind: FieldKind::Dual, initial: e.clone() },
    ];
    let out = transport_jobs(&fm, &c, &jobs).unwrap();
    let xi0 = TangentVector::new(p.clone(), e.column(0).into_owned());
    let single = transport_holonomy(&fm, &c, &xi0).unwrap();
    assert!((out[0].last().values.column(0) - &single.last().components).amax() < 1e-14);
    assert_eq!(out[0].nodes.len(), single.samples.len());
    assert_eq!(out[1].kind, FieldKind::Dual);
}

#[test]
fn lifts_end_at_the_full_transformation() {
    let fm = hopf_warped(1.0, 0.5, 1).unwrap();
    let p = point(&fm, 10, 0);
    let c = path(&fm, &p, 1000);
    let lifts = lift_transformations(&fm, &c).unwrap();
    let h = holonomy_transformation(&fm, &c).unwrap();
    assert!(gap(lifts.last().unwrap(), &h) < 1e-12);
    assert!((&lifts[0].matrix - DMatrix::identity(1, 1)).amax() < 1e-14);
}

#[test]
fn constant_path_realizes_the_identity() {
    for (name, fm) in all_models() {
        let p = point(&fm, 11, 0);
        let h = holonomy_transformation(&fm, &HorizontalPath::constant(&fm, &p)).unwrap();
        let id = HolonomyTransformation::identity(&fm, &p).unwrap();
        assert!(gap(&h, &id) < 1e-14, "{name}");
    }
}

#[test]
fn composition_matches_concatenation() {
    for (name, fm) in all_models() {
        for i in 0..5 {
            let p = point(&fm, 12, i);
            let c1 = path(&fm, &p, 1200 + i);
            let c2 = path(&fm, &c1.end().point, 1300 + i);
            let h1 = holonomy_transformation(&fm, &c1).unwrap();
            let h2 = holonomy_transformation(&fm, &c2).unwrap();
            let h12 = holonomy_transformation(&fm, &c1.concat(&fm, &c2).unwrap()).unwrap();
            let composed = compose(&fm, &h2, &h1).unwrap();
            assert!(gap(&composed, &h12) < 1e-7, "{name}: {}", gap(&composed, &h12));
        }
    }
}

#[test]
fn composition_checks_endpoints() {
    let fm = hopf_s3(1.0).unwrap();
    let p = point(&fm, 13, 0);
    let q = point(&fm, 13, 1);
    let h1 = holonomy_transformation(&fm, &path(&fm, &p, 1)).unwrap();
    let h2 = holonomy_transformation(&fm, &path(&fm, &q, 2)).unwrap();
    assert!(matches!(compose(&fm, &h2, &h1), Err(Error::Groupoid { .. })));
}

#[test]
fn inverse_matches_the_reversed_path() {
    for (name, fm) in all_models() {
        for i in 0..5 {
            let p = point(&fm, 14, i);
            let c = path(&fm, &p, 1400 + i);
            let h = holonomy_transformation(&fm, &c).unwrap();
            let back = holonomy_transformation(&fm, &c.reversed()).unwrap();
            let inv = invert(&h).unwrap();
            assert!(gap(&inv, &back) < 1e-7, "{name}");
            let id = compose(&fm, &inv, &h).unwrap();
            let k = fm.leaf_dim;
            assert!((&id.matrix - DMatrix::identity(k, k)).amax() < 1e-7, "{name}");
        }
    }
}

#[test]
fn holonomy_does_not_depend_on_the_parametrization() {
    for (name, fm) in all_models() {
        for i in 0..3 {
            let p = point(&fm, 15, i);
            let c = path(&fm, &p, 1500 + i);
            let r = reparametrized(&fm, &c, 0.4).unwrap();
            assert!(fm.metric.atlas.coordinate_gap(&c.end().point, &r.end().point) < 1e-7, "{name}");
            let a = holonomy_transformation(&fm, &c).unwrap();
            let b = holonomy_transformation(&fm, &r).unwrap();
            assert!(gap(&a, &b) < 1e-7, "{name}");
        }
    }
    let fm = hopf_s3(1.0).unwrap();
    let c = path(&fm, &point(&fm, 15, 9), 1);
    assert!(reparametrized(&fm, &c, 1.0).is_err());
}

#[test]
fn bound_includes_inverses_and_brackets_rho() {
    let fm = hopf_warped(1.0, 0.3, 1).unwrap();
    let p = point(&fm, 16, 0);
    let shape = PathShape::new(3, 0.7);
    let b = holonomy_bound_detailed(&fm, &p, 200, &shape, 5).unwrap();
    assert_eq!(b.samples.len(), 200);
    assert!(b.l_hat >= b.estimate && b.estimate >= 1.0);
    // |Δz| ≤ 2 bounds every scaling factor.
    assert!(b.l_hat <= (2.0f64 * 0.3).exp() * (1.0 + 1e-9));
    let l2 = b.l_hat * b.l_hat;
    for s in &b.samples {
        let h = DMatrix::from_row_slice(1, 1, &s.matrix);
        let r = folilab::holonomy::rho_of_matrix(&h, &DVector::from_element(1, 1.0)).unwrap();
        assert!(r <= l2 * (1.0 + 1e-12) && r >= 1.0 / l2 * (1.0 - 1e-12));
    }
    assert!(holonomy_bound_detailed(&fm, &p, 0, &shape, 5).is_err());
}

#[test]
fn hopf_bound_is_one() {
    let fm = hopf_s3(0.8).unwrap();
    let p = point(&fm, 17, 0);
    let est = holonomy_bound_estimate(&fm, &p, 100, 3, 0.7, 2).unwrap();
    assert!((est - 1.0).abs() < 1e-6);
}

#[test]
fn rho_rejects_zero_and_is_scale_free() {
    let fm = hopf_warped(1.0, 0.3, 1).unwrap();
    let p = point(&fm, 18, 0);
    let h = holonomy_transformation(&fm, &path(&fm, &p, 1)).unwrap();
    assert!(rho_coords(&h, &DVector::zeros(1)).is_err());
    let a = rho_coords(&h, &DVector::from_element(1, 1.0)).unwrap();
    let b = rho_coords(&h, &DVector::from_element(1, -7.5)).unwrap();
    assert!((a - b).abs() < 1e-15);
}

#[test]
fn supremum_search_on_flat_and_round_models() {
    let opts = SearchOptions::default();
    let fm = flat_torus(3, 1);
    let p = point(&fm, 19, 0);
    let nu0 = fm.random_vertical(&p, &mut item_rng(19, 1)).unwrap();
    let r = thm_max_search(&fm, &p, &nu0, 100, 1, &opts).unwrap();
    assert!(r.worst_margin <= 1e-8);
    assert!((r.best_rho - 1.0).abs() < 1e-9);
    let fm = hopf_s3(1.0).unwrap();
    let p = point(&fm, 19, 2);
    let nu0 = fm.random_vertical(&p, &mut item_rng(19, 3)).unwrap();
    let r = thm_max_search(&fm, &p, &nu0, 200, 1, &opts).unwrap();
    assert!(r.worst_margin <= 1e-4);
    assert_eq!(r.evaluated, 200);
    assert!(r.history.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 <= w[1].0));
    let again = thm_max_search(&fm, &p, &nu0, 200, 1, &opts).unwrap();
    assert_eq!(r.best_rho.to_bits(), again.best_rho.to_bits());
}

#[test]
fn dual_leaf_spans() {
    let fm = hopf_s3(1.0).unwrap();
    let p = point(&fm, 20, 0);
    let x = fm.random_horizontal(&p, &mut item_rng(20, 1)).unwrap();
    let c = horizontal_geodesic(&fm, &x, 1.0, 64).unwrap();
    let span = dual_leaf_span(&fm, &c, 8).unwrap();
    assert_eq!(span.rank, 1);
    assert!(matches!(dual_orthogonality_check(&fm, &c, &span).unwrap(), SpanCheck::NotApplicable { rank: 1 }));

    let fm = flat_torus(3, 1);
    let p = point(&fm, 20, 2);
    let x = fm.random_horizontal(&p, &mut item_rng(20, 3)).unwrap();
    let c = horizontal_geodesic(&fm, &x, 1.0, 64).unwrap();
    let span = dual_leaf_span(&fm, &c, 8).unwrap();
    assert_eq!(span.rank, 0);
    let check = dual_orthogonality_check(&fm, &c, &span).unwrap();
    assert!(check.residual().unwrap() < 1e-10);

    let fm = torus_x_hopf(1.0).unwrap();
    let p = point(&fm, 20, 4);
    let x = fm.random_horizontal(&p, &mut item_rng(20, 5)).unwrap();
    let c = horizontal_geodesic(&fm, &x, 1.0, 64).unwrap();
    let span = dual_leaf_span(&fm, &c, 8).unwrap();
    assert_eq!(span.rank, 1);
    let check = dual_orthogonality_check(&fm, &c, &span).unwrap();
    assert!(check.residual().unwrap() <= 1e-6);
}

#[test]
fn invariant_metric_on_hopf_loops() {
    let fm = hopf_s3(1.0).unwrap();
    let p = point(&fm, 21, 0);
    let m = invariant_metric_average(&fm, &p, 12, 3).unwrap();
    assert!(m.averaged > 0 && m.checked > 0);
    assert!((m.q[(0, 0)] - 1.0).abs() < 1e-5);
    assert!(m.residual < 1e-5);
    assert!(m.max_closure_gap <= 1e-6);
}

#[test]
fn hopf_loops_close_with_trivial_holonomy() {
    let fm = hopf_s3(1.0).unwrap();
    let family = fm.loop_family.clone().unwrap();
    let p = point(&fm, 22, 0);
    let mut found = 0;
    for i in 0..8 {
        if let Some(c) = family.closed_loop(&fm, &p, i, 1).unwrap() {
            found += 1;
            assert!(c.closed && c.closure_gap <= 1e-6);
            let h = holonomy_transformation(&fm, &c).unwrap();
            assert!((h.matrix[(0, 0)] - 1.0).abs() <= 1e-5);
        }
    }
    assert!(found >= 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transformations_of_warped_model_are_positive_scalars(seed in 0u64..100_000) {
        let fm = hopf_warped(1.0, 0.3, 1).unwrap();
        let p = point(&fm, seed, 0);
        let h = holonomy_transformation(&fm, &path(&fm, &p, seed)).unwrap();
        prop_assert!(h.matrix[(0, 0)] > 0.0);
        prop_assert!(h.condition_number() >= 1.0);
    }

    #[test]
    fn inverse_of_inverse_is_the_original(seed in 0u64..100_000, which in 0usize..6) {
        let (_, fm) = all_models().swap_remove(which);
        let p = point(&fm, seed, 0);
        let h = holonomy_transformation(&fm, &path(&fm, &p, seed)).unwrap();
        let back = invert(&invert(&h).unwrap()).unwrap();
        prop_assert!(gap(&h, &back) < 1e-12);
    }
}
