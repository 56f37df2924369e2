mod common;

use common::{all_models, point, unproject};
use folilab::models::{flat_torus, hopf_s3, hopf_warped, list_models, s3_x_s1, torus_x_hopf};
use folilab::{make_model, Error, ModelName, ModelSpec};
use nalgebra::DVector;

fn rejects(spec: ModelSpec, needle: &str) {
    match make_model(&spec) {
        Err(Error::Validation(msg)) => assert!(msg.contains(needle), "{msg:?} lacks {needle:?}"),
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("{spec:?} accepted"),
    }
}

#[test]
fn parameters_are_validated() {
    use ModelName::*;
    rejects(ModelSpec::new(FlatTorus).with("n", 7.0), "n = 7");
    rejects(ModelSpec::new(FlatTorus).with("n", 2.5), "n = 2.5");
    rejects(ModelSpec::new(FlatTorus).with("n", 3.0).with("k", 3.0), "k = 3");
    rejects(ModelSpec::new(FlatTorus).with("k", 0.0), "k = 0");
    rejects(ModelSpec::new(HopfS3).with("epsilon", 2.0), "epsilon");
    rejects(ModelSpec::new(HopfS3).with("epsilon", 0.0), "epsilon");
    rejects(ModelSpec::new(HopfS3).with("epsilon", f64::NAN), "epsilon");
    rejects(ModelSpec::new(HopfWarped).with("family", 2.0), "family");
    rejects(ModelSpec::new(HopfWarped).with("lambda", f64::INFINITY), "lambda");
    rejects(ModelSpec::new(S3XS1).with("circle_radius", 0.0), "circle_radius");
    rejects(ModelSpec::new(HopfS3).with("lambda", 0.1), "unknown parameter");
}

#[test]
fn names_round_trip() {
    for m in ModelName::ALL {
        assert_eq!(m.as_str().parse::<ModelName>().unwrap(), m);
        assert_eq!(m.to_string(), m.as_str());
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, format!("\"{}\"", m.as_str()));
    }
    assert!(matches!("klein_bottle".parse::<ModelName>(), Err(Error::Validation(_))));
}

#[test]
fn catalog_lists_every_model_with_defaults() {
    let list = list_models();
    assert_eq!(list.len(), ModelName::ALL.len());
    for (name, description, defaults) in list {
        assert!(!description.is_empty());
        let fm = make_model(&ModelSpec::new(name)).unwrap();
        assert!(fm.leaf_dim >= 1, "{name}");
        assert!(ModelSpec { name, params: defaults }.validate().is_ok());
    }
}

#[test]
fn spec_json_round_trip() {
    let spec = ModelSpec::new(ModelName::HopfWarped).with("lambda", 0.25);
    let text = serde_json::to_string(&spec).unwrap();
    assert_eq!(text, r#"{"name":"hopf_warped","params":{"lambda":0.25}}"#);
    let back: ModelSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back.resolved(), spec.resolved());
    let bare: ModelSpec = serde_json::from_str(r#"{"name":"flat_torus"}"#).unwrap();
    assert!(bare.params.is_empty());
    assert_eq!(bare.resolved()["n"], 3.0);
}

#[test]
fn factory_matches_direct_constructors() {
    let cases = [
        (ModelSpec::new(ModelName::FlatTorus).with("n", 4.0).with("k", 2.0), flat_torus(4, 2)),
        (ModelSpec::new(ModelName::HopfS3).with("epsilon", 0.7), hopf_s3(0.7).unwrap()),
        (
            ModelSpec::new(ModelName::HopfWarped).with("epsilon", 1.1).with("lambda", -0.2).with("family", 1.0),
            hopf_warped(1.1, -0.2, 1).unwrap(),
        ),
        (ModelSpec::new(ModelName::S3XS1).with("circle_radius", 2.0), s3_x_s1(1.0, 2.0).unwrap()),
        (ModelSpec::new(ModelName::TorusXHopf), torus_x_hopf(1.0).unwrap()),
    ];
    for (spec, direct) in cases {
        let built = make_model(&spec).unwrap();
        assert_eq!(built.name, direct.name);
        assert_eq!(built.leaf_dim, direct.leaf_dim);
        for i in 0..5 {
            let p = point(&built, 1, i);
            assert_eq!(built.metric.metric(&p).unwrap(), direct.metric.metric(&p).unwrap());
        }
    }
}

#[test]
fn dimensions_and_leaves() {
    let expect = [("flat_torus", 3, 1), ("hopf_s3", 3, 1), ("hopf_s3_0.8", 3, 1), ("hopf_warped", 3, 1), ("s3_x_s1", 4, 1), ("torus_x_hopf", 5, 2)];
    for ((name, fm), (n2, dim, k)) in all_models().into_iter().zip(expect) {
        assert_eq!(name, n2);
        assert_eq!(fm.dimension(), dim, "{name}");
        assert_eq!(fm.leaf_dim, k, "{name}");
        assert_eq!(fm.horizontal_dim(), dim - k, "{name}");
    }
}

#[test]
fn warping_function_is_basic_and_its_differential_is_right() {
    let lambda = 0.3;
    let fm = hopf_warped(1.0, lambda, 1).unwrap();
    let warp = fm.warp.clone().unwrap();
    for i in 0..100 {
        let p = point(&fm, 2, i);
        let x = unproject(p.chart, p.coords.as_slice());
        let z = 2.0 * (x[0] * x[2] + x[1] * x[3]);
        assert!(((warp.phi)(&p) - lambda * z).abs() < 1e-14);
        let d = (warp.dphi)(&p);
        let h = 1e-5;
        for k in 0..3 {
            let e = DVector::from_fn(3, |j, _| if j == k { 1.0 } else { 0.0 });
            let fd = ((warp.phi)(&p.displaced(&e, h)) - (warp.phi)(&p.displaced(&e, -h))) / (2.0 * h);
            assert!((fd - d[k]).abs() < 1e-8, "point {i}, axis {k}");
        }
        let v = fm.vertical_frame(&p).unwrap();
        assert!(d.dot(&v.column(0)).abs() < 1e-12);
    }
}

#[test]
fn constant_family_is_a_berger_sphere() {
    let lambda: f64 = 0.25;
    let a = hopf_warped(0.8, lambda, 0).unwrap();
    let b = hopf_s3(0.8 * lambda.exp()).unwrap();
    for i in 0..10 {
        let p = point(&a, 3, i);
        let gap = (a.metric.metric(&p).unwrap() - b.metric.metric(&p).unwrap()).amax();
        assert!(gap < 1e-12);
    }
}

#[test]
fn chart_overlaps_are_compatible() {
    for (name, fm) in all_models() {
        let atlas = &fm.metric.atlas;
        let mut checked = 0;
        for i in 0..50 {
            let p = point(&fm, 4, i);
            for chart in 0..atlas.num_charts() {
                if chart == p.chart {
                    continue;
                }
                let Some((q, j)) = atlas.express_in(&p, chart, None) else { continue };
                if !atlas.contains(&q) {
                    continue;
                }
                let gp = fm.metric.metric(&p).unwrap();
                let gq = fm.metric.metric(&q).unwrap();
                let pulled = j.transpose() * gq * &j;
                assert!((pulled - &gp).amax() <= 1e-8 * gp.amax(), "{name}");
                let vp = fm.vertical_projector(&p).unwrap();
                let vq = fm.vertical_projector(&q).unwrap();
                assert!((vq * &j - &j * vp).amax() < 1e-8, "{name}");
                checked += 1;
            }
        }
        if atlas.num_charts() > 1 {
            assert!(checked > 10, "{name}: only {checked} overlaps");
        }
    }
}

#[test]
fn sphere_points_are_unit_quaternions() {
    let fm = hopf_s3(1.0).unwrap();
    for i in 0..50 {
        let p = point(&fm, 5, i);
        assert!(fm.metric.atlas.in_core(&p));
        let x = unproject(p.chart, p.coords.as_slice());
        assert!((x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
