//! Acceptance run: one line per criterion, `PASS` or `FAIL` with the numbers
//! behind it. Built without the libtest harness so that the lines always
//! show in the output of `cargo test`.
//!
//! Criterion 4 has a documented failing half (the stated coefficient of the
//! Hessian term in the warped curvature formula). It is reported as `FAIL`
//! but does not fail the binary; any other failure does.

use std::process::ExitCode;
use std::time::Instant;

use folilab::experiment::{run_experiment, write_json, ExperimentConfig, ExperimentKind, ExperimentReport};
use folilab::foliation::{a_star, a_tensor, s_tensor};
use folilab::geometry::riemann_at;
use folilab::holonomy::{
    compose, default_steps, holonomy_bound_estimate, holonomy_transformation, invert, random_path_for_item, reparametrized,
    transport_holonomy,
};
use folilab::sampling::item_rng;
use folilab::{make_model, FoliatedModel, ModelName, ModelSpec, TangentVector};
use nalgebra::DMatrix;
use rayon::prelude::*;

const DOCUMENTED_FAILURES: &[u32] = &[4];

fn spec(name: ModelName) -> ModelSpec {
    ModelSpec::new(name)
}

fn models() -> Vec<ModelSpec> {
    ModelName::ALL.into_iter().map(spec).collect()
}

fn run(model: &ModelSpec, kind: ExperimentKind, samples: usize, seed: u64, tol: f64) -> ExperimentReport {
    let cfg = ExperimentConfig::new(model.clone(), kind, samples, seed, tol);
    run_experiment(&cfg).unwrap_or_else(|e| panic!("{kind} on {}: {e}", model.name))
}

fn column(r: &ExperimentReport, key: &str) -> Vec<f64> {
    r.details.iter().filter_map(|d| d.get(key)).filter(|v| !v.is_nan()).collect()
}

fn col_max(r: &ExperimentReport, key: &str) -> f64 {
    column(r, key).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn col_min(r: &ExperimentReport, key: &str) -> f64 {
    column(r, key).into_iter().fold(f64::INFINITY, f64::min)
}

fn label(m: &ModelSpec) -> String {
    let p: Vec<String> = m.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    if p.is_empty() {
        m.name.to_string()
    } else {
        format!("{}[{}]", m.name, p.join(","))
    }
}

struct Verdict {
    pass: bool,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { pass: true, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, note: String) {
        self.pass &= ok;
        self.notes.push(if ok { note } else { format!("{note} <-- fails") });
    }
}

fn model_validity() -> Verdict {
    let mut v = Verdict::new();
    for m in models() {
        let r = run(&m, ExperimentKind::ValidateModel, 200, 1, 1e-8);
        let overlap = col_max(&r, "overlap_residual");
        let proj = col_max(&r, "projector_residual");
        let eig = col_min(&r, "min_eigenvalue");
        let asym = col_max(&r, "metric_asymmetry");
        v.check(
            overlap <= 1e-8 && proj <= 1e-10 && eig > 0.0 && asym <= 1e-12,
            format!("{}: overlap {overlap:.1e} projector {proj:.1e} min_eig {eig:.2e}", m.name),
        );
    }
    v
}

fn flat_ground_truth() -> Verdict {
    let mut v = Verdict::new();
    let fm = make_model(&spec(ModelName::FlatTorus)).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let mut rng = item_rng(2, i);
        let p = fm.sample_point(&mut rng);
        let x = fm.random_horizontal(&p, &mut rng).unwrap();
        let y = fm.random_horizontal(&p, &mut rng).unwrap();
        let xi = fm.random_vertical(&p, &mut rng).unwrap();
        worst = worst
            .max(a_tensor(&fm, &x, &y).unwrap().components.amax())
            .max(a_star(&fm, &x, &xi).unwrap().components.amax())
            .max(s_tensor(&fm, &x, &xi).unwrap().components.amax())
            .max(riemann_at(&fm.metric, &p, &x.components, &xi.components, &y.components).unwrap().amax());
    }
    v.check(worst <= 1e-10, format!("max |A|,|A*|,|S|,|R| {worst:.1e}"));
    let r = run(&spec(ModelName::FlatTorus), ExperimentKind::GrayOneill, 50, 2, 1e-10);
    let k = col_max(&r, "K_riemann").abs().max(col_min(&r, "K_riemann").abs());
    let f = col_max(&r, "K_formula").abs().max(col_min(&r, "K_formula").abs());
    v.check(k <= 1e-10 && f <= 1e-10, format!("curvature identity terms {k:.1e}, {f:.1e}"));
    let p = fm.sample_point(&mut item_rng(2, 1000));
    let est = holonomy_bound_estimate(&fm, &p, 200, 3, 0.7, 2).unwrap();
    v.check((est - 1.0).abs() <= 1e-9, format!("bound estimate 1{:+.1e}", est - 1.0));
    v
}

fn gray_oneill() -> Verdict {
    let mut v = Verdict::new();
    for m in [
        spec(ModelName::HopfS3),
        spec(ModelName::HopfS3).with("epsilon", 0.8),
        spec(ModelName::S3XS1),
    ] {
        let r = run(&m, ExperimentKind::GrayOneill, 100, 3, 1e-5);
        v.check(r.pass, format!("{}: max relative residual {:.1e} over {} rows", label(&m), r.max_residual, r.details.len()));
    }
    v
}

fn warped_curvature() -> Verdict {
    let mut v = Verdict::new();
    let constant = spec(ModelName::HopfWarped).with("family", 0.0);
    let r = run(&constant, ExperimentKind::WarpedCurvature, 100, 4, 1e-5);
    v.check(r.pass, format!("constant warping: max residual {:.1e}", r.max_residual));
    let height = spec(ModelName::HopfWarped).with("lambda", 0.3).with("family", 1.0);
    let r = run(&height, ExperimentKind::WarpedCurvature, 100, 4, 1e-4);
    v.check(r.pass, format!("height warping at the minimum, stated form: max residual {:.1e}", r.max_residual));
    v.notes.push(format!(
        "with coefficient |xi|^2_phi instead: max residual {:.1e}",
        col_max(&r, "residual_corrected")
    ));
    v
}

fn s_phi_law() -> Verdict {
    let mut v = Verdict::new();
    let fm = make_model(&spec(ModelName::HopfWarped)).unwrap();
    let warp = fm.warp.clone().unwrap();
    let base: &FoliatedModel = &warp.base;
    let results: Vec<(f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = item_rng(5, i);
            let p = fm.sample_point(&mut rng);
            let path = random_path_for_item(&fm, &p, 3, 0.6, default_steps(0.6), 5, i).unwrap();
            let mut law: f64 = 0.0;
            for s in path.samples() {
                let xi = fm.random_vertical(&s.point, &mut rng).unwrap();
                let eta = fm.random_vertical(&s.point, &mut rng).unwrap();
                let sx = s_tensor(&fm, &s.tangent(), &xi).unwrap();
                let lhs = fm.metric.inner(&s.point, &sx.components, &eta.components).unwrap();
                let dphi = (warp.dphi)(&s.point).dot(&s.velocity);
                let rhs = -dphi * fm.metric.inner(&s.point, &xi.components, &eta.components).unwrap();
                law = law.max((lhs - rhs).abs());
            }
            let xi0 = TangentVector::new(p.clone(), fm.vertical_frame(&p).unwrap().column(0).into_owned());
            let a = transport_holonomy(&fm, &path, &xi0).unwrap();
            let b = transport_holonomy(base, &path, &xi0).unwrap();
            let same = a
                .samples
                .iter()
                .zip(&b.samples)
                .map(|((_, x), (_, y))| (&x.components - &y.components).amax())
                .fold(0.0, f64::max);
            (law, same)
        })
        .collect();
    let law = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let same = results.iter().map(|r| r.1).fold(0.0, f64::max);
    v.check(law <= 1e-6, format!("max |<S_c xi, eta> + dphi(c)<xi, eta>| {law:.1e}"));
    v.check(same <= 1e-7, format!("holonomy fields of g0 and g_phi differ by {same:.1e}"));
    v
}

fn duality() -> Verdict {
    let mut v = Verdict::new();
    for m in models() {
        let r = run(&m, ExperimentKind::DualitySuite, 100, 6, 1e-7);
        let pairing = col_max(&r, "pairing_drift");
        let gap = col_max(&r, "inverse_transpose_gap");
        let drift = col_max(&r, "verticality_drift");
        v.check(
            pairing <= 1e-8 && gap <= 1e-7 && drift <= 1e-8,
            format!("{}: pairing {pairing:.1e} ode-vs-algebra {gap:.1e} verticality {drift:.1e}", m.name),
        );
    }
    v
}

fn groupoid() -> Verdict {
    let mut v = Verdict::new();
    for m in models() {
        let fm = make_model(&m).unwrap();
        let k = fm.leaf_dim;
        let worst = (0..50u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = item_rng(7, i);
                let p = fm.sample_point(&mut rng);
                let c1 = random_path_for_item(&fm, &p, 3, 0.6, default_steps(0.6), 7, 2 * i).unwrap();
                let c2 = random_path_for_item(&fm, &c1.end().point, 2, 0.6, default_steps(0.6), 7, 2 * i + 1).unwrap();
                let h1 = holonomy_transformation(&fm, &c1).unwrap();
                let h2 = holonomy_transformation(&fm, &c2).unwrap();
                let h12 = holonomy_transformation(&fm, &c1.concat(&fm, &c2).unwrap()).unwrap();
                let composition = (&compose(&fm, &h2, &h1).unwrap().matrix - &h12.matrix).amax();
                let inv = invert(&h1).unwrap();
                let reversed = holonomy_transformation(&fm, &c1.reversed()).unwrap();
                let inversion = (&inv.matrix - &reversed.matrix)
                    .amax()
                    .max((&compose(&fm, &inv, &h1).unwrap().matrix - DMatrix::identity(k, k)).amax());
                let rep = holonomy_transformation(&fm, &reparametrized(&fm, &c1, 0.4).unwrap()).unwrap();
                let param = (&rep.matrix - &h1.matrix).amax();
                [composition, inversion, param]
            })
            .reduce(|| [0.0; 3], |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])]);
        v.check(
            worst.iter().all(|w| *w <= 1e-7),
            format!(
                "{}: composition {:.1e} inversion {:.1e} parametrization {:.1e}",
                m.name, worst[0], worst[1], worst[2]
            ),
        );
    }
    v
}

fn principal_holonomy() -> Verdict {
    let mut v = Verdict::new();
    let r = run(&spec(ModelName::HopfS3), ExperimentKind::ClosedLoop, 24, 8, 1e-5);
    let found = r.margin as usize;
    let gap = col_max(&r, "closure_gap");
    // Loops are told apart by the point a third of the way along.
    let fm = make_model(&spec(ModelName::HopfS3)).unwrap();
    let family = fm.loop_family.clone().unwrap();
    let p = fm.sample_point(&mut item_rng(8, u64::MAX));
    let mut marks: Vec<folilab::ChartPoint> = Vec::new();
    for i in 0..24 {
        if let Some(c) = family.closed_loop(&fm, &p, i, 8).unwrap() {
            let samples: Vec<_> = c.samples().collect();
            let q = samples[samples.len() / 3].point.clone();
            if marks.iter().all(|m| fm.metric.atlas.coordinate_gap(m, &q) > 1e-6) {
                marks.push(q);
            }
        }
    }
    v.check(
        r.pass && found >= 10 && gap <= 1e-6 && marks.len() >= 10,
        format!(
            "{found} loops ({} distinct), closure gap {gap:.1e}, max |h - 1| {:.1e}",
            marks.len(),
            r.max_residual
        ),
    );
    v
}

fn theorem_a() -> Verdict {
    let mut v = Verdict::new();
    let r = run(&spec(ModelName::S3XS1), ExperimentKind::TheoremA, 20, 9, 1e-8);
    let found = column(&r, "found").iter().filter(|f| **f == 1.0).count();
    v.check(
        r.pass && found == 20 && r.max_residual <= 1e-6,
        format!("{found}/20 kernels, max |A*_X nu| {:.1e}, max K(X, nu) {:.1e}", r.max_residual, r.margin),
    );
    v
}

fn fatness() -> Verdict {
    let mut v = Verdict::new();
    let r = run(&spec(ModelName::HopfS3), ExperimentKind::FatnessScan, 50, 10, 1e-9);
    v.check(r.margin > 0.05, format!("hopf_s3: min margin {:.3}", r.margin));
    for name in [ModelName::S3XS1, ModelName::FlatTorus] {
        let r = run(&spec(name), ExperimentKind::FatnessScan, 50, 10, 1e-9);
        let m = col_max(&r, "margin");
        v.check(m <= 1e-8, format!("{name}: max margin {m:.1e}"));
    }
    v
}

fn median(mut x: Vec<f64>) -> f64 {
    x.sort_by(f64::total_cmp);
    x[x.len() / 2]
}

fn thm_max() -> Verdict {
    let mut v = Verdict::new();
    let r = run(&spec(ModelName::FlatTorus), ExperimentKind::ThmMax, 1000, 11, 1e-8);
    v.check(r.margin <= 1e-8, format!("flat_torus: worst margin {:.1e}", r.margin));
    let r = run(&spec(ModelName::HopfS3), ExperimentKind::ThmMax, 10_000, 11, 1e-4);
    v.check(r.margin <= 1e-4, format!("hopf_s3 at 1e4: worst margin {:.1e}", r.margin));
    let budgets = [100, 1000, 10_000];
    let medians: Vec<f64> = budgets
        .iter()
        .map(|b| {
            let m: Vec<f64> = (1..=5)
                .map(|seed| run(&spec(ModelName::HopfWarped), ExperimentKind::ThmMax, *b, seed, 1e-4).margin)
                .collect();
            median(m)
        })
        .collect();
    let monotone = medians.windows(2).all(|w| w[1] <= w[0]);
    v.check(
        monotone,
        format!("hopf_warped medians at budgets {budgets:?}: {}", medians.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>().join(", ")),
    );
    v
}

fn spans() -> Verdict {
    let mut v = Verdict::new();
    for name in [ModelName::HopfS3, ModelName::S3XS1] {
        let r = run(&spec(name), ExperimentKind::DualLeaf, 20, 12, 1e-6);
        let lo = col_min(&r, "rank");
        let k = col_max(&r, "leaf_dim");
        v.check(lo == k, format!("{name}: min rank {lo} of leaf dimension {k}"));
    }
    let r = run(&spec(ModelName::FlatTorus), ExperimentKind::DualLeaf, 20, 12, 1e-6);
    let hi = col_max(&r, "rank");
    v.check(hi == 0.0, format!("flat_torus: max rank {hi}"));
    let r = run(&spec(ModelName::TorusXHopf), ExperimentKind::DualLeaf, 20, 12, 1e-6);
    v.check(
        r.pass && !r.max_residual.is_nan(),
        format!("torus_x_hopf: rank {} of 2, max residual {:.1e}", col_max(&r, "rank"), r.max_residual),
    );
    v
}

fn bounded_holonomy() -> Verdict {
    let mut v = Verdict::new();
    let r = run(&spec(ModelName::HopfS3), ExperimentKind::HolonomyBound, 1000, 13, 1e-3);
    v.check(
        (r.margin - 1.0).abs() <= 1e-6 && r.pass,
        format!("hopf_s3: estimate 1{:+.1e}, rho excess {:.1e}", r.margin - 1.0, r.max_residual),
    );
    // Not part of the criterion: L-hat from one sampled set against rho of
    // an independent set, on a model whose transformations are not isometric.
    let r = run(&spec(ModelName::HopfWarped), ExperimentKind::HolonomyBound, 1000, 13, 1e-3);
    v.notes.push(format!(
        "(informational) hopf_warped: estimate {:.4}, rho excess over an independent set {:.1e}",
        r.margin, r.max_residual
    ));
    v
}

fn determinism() -> Verdict {
    let mut v = Verdict::new();
    let cases = [
        (ModelName::TorusXHopf, ExperimentKind::ValidateModel),
        (ModelName::HopfWarped, ExperimentKind::GrayOneill),
        (ModelName::HopfWarped, ExperimentKind::WarpedCurvature),
        (ModelName::HopfS3, ExperimentKind::FatnessScan),
        (ModelName::S3XS1, ExperimentKind::TheoremA),
        (ModelName::HopfWarped, ExperimentKind::ThmMax),
        (ModelName::HopfWarped, ExperimentKind::HolonomyBound),
        (ModelName::TorusXHopf, ExperimentKind::DualLeaf),
        (ModelName::HopfS3, ExperimentKind::ClosedLoop),
        (ModelName::HopfWarped, ExperimentKind::DualitySuite),
    ];
    let pools: Vec<rayon::ThreadPool> = [1, 3]
        .into_iter()
        .map(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap())
        .collect();
    let bytes = |cfg: &ExperimentConfig| {
        let mut r = run_experiment(cfg).unwrap();
        r.timing_s = None;
        let mut out = Vec::new();
        write_json(&r, &mut out).unwrap();
        out
    };
    let mut identical = 0;
    for (name, kind) in cases {
        let cfg = ExperimentConfig::new(spec(name), kind, 12, 14, 1e-5);
        let reference = bytes(&cfg);
        let same = bytes(&cfg) == reference && pools.iter().all(|pool| pool.install(|| bytes(&cfg)) == reference);
        if same {
            identical += 1;
        } else {
            v.check(false, format!("{kind} on {name} differs between runs"));
        }
    }
    v.check(
        identical == cases.len(),
        format!("{identical}/{} experiments byte-identical across repeats and 1/3-thread pools", cases.len()),
    );
    v
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Verdict); 14] = [
        (1, "model validity", model_validity),
        (2, "flat torus ground truth", flat_ground_truth),
        (3, "curvature of holonomy and dual fields", gray_oneill),
        (4, "warped curvature", warped_curvature),
        (5, "S tensor of a warped metric", s_phi_law),
        (6, "duality", duality),
        (7, "groupoid", groupoid),
        (8, "principal bundle holonomy", principal_holonomy),
        (9, "kernel planes on the product", theorem_a),
        (10, "fatness", fatness),
        (11, "supremum search", thm_max),
        (12, "dual leaf spans", spans),
        (13, "bounded holonomy", bounded_holonomy),
        (14, "determinism", determinism),
    ];
    let mut unexpected = Vec::new();
    for (n, name, f) in criteria {
        let start = Instant::now();
        let verdict = f();
        let secs = start.elapsed().as_secs_f64();
        let documented = DOCUMENTED_FAILURES.contains(&n);
        let tag = if verdict.pass { "PASS" } else { "FAIL" };
        let suffix = match (verdict.pass, documented) {
            (false, true) => " [documented deviation]",
            (true, true) => " [documented deviation no longer reproduces]",
            _ => "",
        };
        println!("criterion {n:>2} {name}: {tag}{suffix} ({secs:.1} s)");
        for note in &verdict.notes {
            println!("    {note}");
        }
        if !verdict.pass && !documented {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
