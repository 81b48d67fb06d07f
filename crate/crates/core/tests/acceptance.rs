//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Tolerances and runtime budgets are fixed below.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use polyreg::analyzer::{self, JordanClass, LinearAngleTransform};
use polyreg::circulant::{self, CirculantSpec};
use polyreg::euclid::{self, PlaneTriangle};
use polyreg::experiment::{self, ExperimentConfig};
use polyreg::hyperbolic::{self, GapVector};
use polyreg::spherical::{self, CyclicFrame, SpherePoint, SphericalPolygon};

struct Outcome {
    pass: bool,
    detail: String,
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn ms(x: u64) -> Option<Duration> {
    Some(Duration::from_millis(x))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_unit(rng: &mut ChaCha8Rng) -> SpherePoint {
    let v = Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
    SpherePoint::from_vector(v).unwrap()
}

fn random_gaps(rng: &mut ChaCha8Rng, n: usize, total: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    let mut g: Vec<f64> = w.iter().map(|x| total * x / s).collect();
    let rest: f64 = g[..n - 1].iter().sum();
    g[n - 1] = total - rest;
    g
}

fn random_cyclic(rng: &mut ChaCha8Rng, n: usize) -> SphericalPolygon {
    let axis = random_unit(rng);
    let polar: f64 = rng.random_range(0.2..1.4);
    let frame = CyclicFrame::new(axis, polar.cos(), random_gaps(rng, n, TAU)).unwrap();
    spherical::from_cyclic_frame(&frame, rng.random_range(0.0..TAU)).unwrap()
}

/// Greedy nearest matching; returns the worst matched distance.
fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn dense_eigenvalues(rows: &[Vec<f64>]) -> Vec<Complex64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j]).complex_eigenvalues().iter().copied().collect()
}

fn spectra() -> Outcome {
    let method1 = CirculantSpec::new(vec![0.5, 0.5, 0.0]).unwrap();
    let got: Vec<Complex64> = circulant::eigenvalues(&method1).iter().map(|e| e.eigenvalue).collect();
    let s3 = 3f64.sqrt();
    let paper = [Complex64::new(1.0, 0.0), Complex64::new(0.25, s3 / 4.0), Complex64::new(0.25, -s3 / 4.0)];
    let paper_err = got.iter().zip(&paper).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    let mut r = rng(101);
    let mut oracle_err: f64 = 0.0;
    for _ in 0..50 {
        let n = r.random_range(2..=32);
        let spec = CirculantSpec::new(random_gaps(&mut r, n, 1.0)).unwrap();
        let closed: Vec<Complex64> = circulant::eigenvalues(&spec).iter().map(|e| e.eigenvalue).collect();
        oracle_err = oracle_err.max(multiset_distance(&closed, &dense_eigenvalues(&spec.to_dense())));
    }
    Outcome {
        pass: paper_err <= 1e-14 && oracle_err <= 1e-10,
        detail: format!("method-1 error {paper_err:.1e} (≤ 1e-14); worst oracle mismatch {oracle_err:.1e} (≤ 1e-10)"),
    }
}

fn exact_contraction() -> Outcome {
    let mut r = rng(102);
    let mut worst: f64 = 0.0;
    let mut worst_k2: f64 = 0.0;
    for k in 2..=6u32 {
        let kf = f64::from(k);
        let expected = (kf * kf - 3.0 * kf + 3.0).sqrt() / kf;
        for _ in 0..100 {
            let p = random_cyclic(&mut r, 3);
            let trace = spherical::regularize(&p, k, 1e-7, 60).unwrap();
            for w in trace.gaps.windows(2) {
                let before = spherical::l2_gap_deviation(&w[0]);
                if before < 1e-5 {
                    break;
                }
                let ratio = spherical::l2_gap_deviation(&w[1]) / before;
                worst = worst.max((ratio - expected).abs());
                if k == 2 {
                    worst_k2 = worst_k2.max((ratio - 0.5).abs());
                }
            }
        }
    }
    Outcome {
        pass: worst <= 1e-9 && worst_k2 <= 1e-9,
        detail: format!("max |ratio − √(k²−3k+3)/k| = {worst:.1e}; k = 2 vs 1/2: {worst_k2:.1e} (≤ 1e-9)"),
    }
}

fn ngon_convergence() -> Outcome {
    let mut r = rng(103);
    let mut failures = Vec::new();
    let mut worst_slack = i64::MIN;
    for n in 3..=12usize {
        for k in 2..=5u32 {
            let spec = CirculantSpec::rotation_k(n, k).unwrap();
            for trial in 0..20 {
                let p = random_cyclic(&mut r, n);
                let g0 = spherical::to_cyclic_frame(&p).unwrap().gaps;
                let bound = circulant::predict_iterations(&spec, spherical::l2_gap_deviation(&g0), 1e-9).unwrap() + 2;
                let trace = spherical::regularize(&p, k, 1e-9, bound).unwrap();
                let regular = spherical::is_regular(trace.last(), 1e-7).unwrap();
                worst_slack = worst_slack.max(trace.iterations as i64 - bound as i64);
                if !trace.converged || !regular {
                    failures.push(format!("n={n} k={k} trial={trial}"));
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{} of 800 instances failed; closest approach to the predicted bound: {} steps",
            failures.len(),
            worst_slack
        ),
    }
}

fn table1() -> Outcome {
    let config = ExperimentConfig { trials: 200, tol: 0.005, cap: 20, seed: 20240601, ..ExperimentConfig::default() };
    let rows = experiment::run_table1(&config).unwrap();
    let mean = |k: u32| rows.iter().find(|r| r.k == k).unwrap().mean_iterations;
    let k2 = (6.0..=9.0).contains(&mean(2));
    let inversions: Vec<f64> = rows
        .windows(2)
        .filter(|w| w[1].mean_iterations < w[0].mean_iterations)
        .map(|w| w[0].mean_iterations - w[1].mean_iterations)
        .collect();
    let monotone = inversions.len() <= 1 && inversions.iter().all(|d| *d <= 0.3);
    let k5 = rows.iter().find(|r| r.k == 5).unwrap();
    let k5_mean = k5.mean_iterations > 12.0;
    let k5_capped = k5.capped_fraction > 0.2;
    let summary: Vec<String> =
        rows.iter().map(|r| format!("k={} mean {:.2} capped {:.3}", r.k, r.mean_iterations, r.capped_fraction)).collect();
    Outcome {
        pass: k2 && monotone && k5_mean && k5_capped,
        detail: format!(
            "{}; k=2 in [6,9]: {k2}; monotone: {monotone}; k=5 mean > 12: {k5_mean}; k=5 capped > 0.2: {k5_capped}",
            summary.join(", ")
        ),
    }
}

fn hyperbolic_limit() -> Outcome {
    let mut r = rng(105);
    let mut worst_limit: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for len in [6usize, 8] {
        let rho = hyperbolic::gap_contraction(len);
        for _ in 0..100 {
            let b = GapVector::new(random_gaps(&mut r, len, 1.0)).unwrap();
            let limit = hyperbolic::limit_gaps(&b);
            let mut x = b.clone();
            let mut devs = vec![circulant::l2_diff(x.as_slice(), limit.as_slice())];
            for _ in 0..100 {
                x = hyperbolic::gap_step(&x);
                devs.push(circulant::l2_diff(x.as_slice(), limit.as_slice()));
            }
            worst_limit = worst_limit.max(circulant::max_abs_diff(x.as_slice(), limit.as_slice()));
            // the 2n = 8 matrix has zero eigenvalues, so the ratio settles after one step
            for w in devs.windows(2).skip(1) {
                if w[0] < 1e-6 {
                    break;
                }
                worst_ratio = worst_ratio.max((w[1] / w[0] - rho).abs());
            }
        }
    }
    let spec = CirculantSpec::even_offset(6).unwrap();
    let derived: Vec<Complex64> = circulant::eigenvalues(&spec).iter().map(|e| e.eigenvalue).collect();
    let s3 = 3f64.sqrt();
    let expected: Vec<Complex64> = [(1.0, 0.0), (0.25, s3 / 4.0), (0.25, -s3 / 4.0)]
        .iter()
        .cycle()
        .take(6)
        .map(|&(a, b)| Complex64::new(a, b))
        .collect();
    let oracle = dense_eigenvalues(&spec.to_dense());
    let spectrum_err = multiset_distance(&expected, &oracle).max(multiset_distance(&derived, &oracle));
    let stated = Complex64::new(0.75, s3 / 4.0);
    let stated_absent = oracle.iter().all(|e| (e - stated).norm() > 1e-6);
    Outcome {
        pass: worst_limit <= 1e-12 && worst_ratio <= 1e-9 && spectrum_err <= 1e-10 && stated_absent,
        detail: format!(
            "limit error {worst_limit:.1e} (≤ 1e-12); ratio error {worst_ratio:.1e} (≤ 1e-9); \
             derived spectrum vs oracle {spectrum_err:.1e}; (3+√3i)/4 absent from spectrum: {stated_absent}"
        ),
    }
}

fn regularity_lemma() -> Outcome {
    let mut r = rng(106);
    let mut worst_spread: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for _ in 0..100 {
        let a = r.random_range(0.02..0.31);
        let b = 1.0 / 3.0 - a;
        let mut gaps: Vec<f64> = (0..6).map(|j| if j % 2 == 0 { a } else { b }).collect();
        let rest: f64 = gaps[..5].iter().sum();
        gaps[5] = 1.0 - rest;
        let bp = hyperbolic::points_from_gaps(&GapVector::new(gaps).unwrap(), r.random_range(0.0..1.0)).unwrap();
        let angles = hyperbolic::polygon_angles(&bp).unwrap();
        worst_spread = worst_spread.max(hyperbolic::angle_spread(&angles));
        worst_sum = worst_sum.max(angles.iter().sum());
    }
    Outcome {
        pass: worst_spread <= 1e-8 && worst_sum < PI,
        detail: format!("max angle spread {worst_spread:.1e} (≤ 1e-8); max angle sum {worst_sum:.6} (< π)"),
    }
}

fn euclid_napoleon() -> Outcome {
    let mut r = rng(107);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let z = [0, 1, 2].map(|_| Complex64::new(r.random(), r.random()));
        let t = PlaneTriangle::new(z[0], z[1], z[2]).unwrap();
        worst = worst.max(euclid::equilateral_defect(&euclid::napoleon(&t).unwrap().centers).norm());
    }
    Outcome { pass: worst <= 1e-10, detail: format!("max |defect| {worst:.1e} (≤ 1e-10)") }
}

fn sphere_napoleon() -> Outcome {
    let mut r = rng(108);
    let (mut regular, mut same_axis, mut worst_residual, mut worst_axis) = (0, 0, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let pts: Vec<SpherePoint> = (0..3)
            .map(|_| {
                let v = *random_unit(&mut r).vector();
                SpherePoint::from_vector(Vector3::new(v.x, v.y, v.z.abs())).unwrap()
            })
            .collect();
        let input_axis = spherical::circumcenter_triangle(&pts[0], &pts[1], &pts[2]).unwrap();
        let out = spherical::napoleon_sphere(&pts[0], &pts[1], &pts[2]).unwrap();
        let residual = spherical::rotation_residual(&out).unwrap();
        let out_axis = spherical::to_cyclic_frame(&out).unwrap().axis;
        // a circle has two antipodal axes
        let drift = (out_axis.vector() - input_axis.vector()).norm().min((out_axis.vector() + input_axis.vector()).norm());
        worst_residual = worst_residual.max(residual);
        worst_axis = worst_axis.max(drift);
        if spherical::is_regular(&out, 1e-9).unwrap() && residual <= 1e-9 {
            regular += 1;
        }
        if drift <= 1e-9 {
            same_axis += 1;
        }
    }
    Outcome {
        pass: regular == 100 && same_axis == 100,
        detail: format!(
            "{regular}/100 regular (worst residual {worst_residual:.1e}), \
             {same_axis}/100 on the input axis (worst drift {worst_axis:.1e})"
        ),
    }
}

fn tangent_noise(rng: &mut ChaCha8Rng, z: &SpherePoint, sigma: f64) -> SpherePoint {
    let v = *z.vector();
    let g = Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample::<f64, _>(StandardNormal));
    let t = (g - v * g.dot(&v)) * sigma;
    SpherePoint::from_vector(v + t).unwrap()
}

fn fit_and_project() -> Outcome {
    let mut r = rng(109);
    let (mut worst_noisy, mut rejected, mut worst_clean_axis, mut worst_identity) = (0.0f64, 0, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let n = r.random_range(4..=10);
        let truth = random_cyclic(&mut r, n);
        let axis = spherical::to_cyclic_frame(&truth).unwrap().axis;

        let (fit_axis, cos_radius) = spherical::fit_small_circle(truth.vertices()).unwrap();
        worst_clean_axis = worst_clean_axis.max((fit_axis.vector() - axis.vector()).norm());
        let projected = spherical::project_to_circle(truth.vertices(), &fit_axis, cos_radius).unwrap();
        for (a, b) in projected.vertices().iter().zip(truth.vertices()) {
            worst_identity = worst_identity.max((a.vector() - b.vector()).amax());
        }

        let noisy: Vec<SpherePoint> = truth.vertices().iter().map(|z| tangent_noise(&mut r, z, 1e-3)).collect();
        let (noisy_axis, _) = spherical::fit_small_circle(&noisy).unwrap();
        worst_noisy = worst_noisy.max((noisy_axis.vector() - axis.vector()).norm());
        match spherical::fit_and_project(&noisy).and_then(|p| spherical::to_cyclic_frame(&p)) {
            Ok(_) => {}
            Err(_) => rejected += 1,
        }
    }
    Outcome {
        pass: worst_noisy <= 1e-2 && rejected == 0 && worst_clean_axis <= 1e-9 && worst_identity <= 1e-9,
        detail: format!(
            "noisy axis error {worst_noisy:.1e} (≤ 1e-2); {rejected} rejected projections; \
             noiseless axis {worst_clean_axis:.1e}, identity {worst_identity:.1e} (≤ 1e-9)"
        ),
    }
}

fn analyzer_cases() -> Outcome {
    let m1 = LinearAngleTransform::from_circulant(&CirculantSpec::new(vec![0.5, 0.5, 0.0]).unwrap());
    let report = analyzer::classify(&m1);
    let rot = report.rotation_params.map(|p| (p.a, p.phi));
    let rotation_ok = report.jordan_class == JordanClass::ComplexRotation
        && rot.is_some_and(|(a, phi)| (a - 0.5).abs() <= 1e-12 && (phi - PI / 3.0).abs() <= 1e-12);

    let identity = LinearAngleTransform::new(DMatrix::identity(3, 3)).unwrap();
    let identity_ok = analyzer::classify(&identity).jordan_class == JordanClass::NonContracting;

    let s = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, -1.0, 1.0, 0.5, 1.5, 1.0, -1.0, 0.25]);
    let d = DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 0.5, 0.3]));
    let similar = LinearAngleTransform::new(&s * d * s.clone().try_inverse().unwrap()).unwrap();
    let diag_class = analyzer::classify(&similar).jordan_class;
    Outcome {
        pass: rotation_ok && identity_ok && diag_class == JordanClass::RealDiagonal,
        detail: format!(
            "method-1 {:?} (a, φ) = {rot:?}; identity non-contracting: {identity_ok}; similarity case {diag_class:?}",
            report.jordan_class
        ),
    }
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_polyreg")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let write = |name: &str, s: &str| fs::write(dir.path().join(name), s).unwrap();
    write("plane.json", "[[0,0],[1,0],[0.2,0.7]]");
    write("sphere.json", "[[0.6,0,0.8],[-0.3,0.5196152422706632,0.8],[-0.3,-0.5196152422706632,0.8]]");
    write("sphere_uneven.json", &{
        let pts: Vec<[f64; 3]> = [0.0f64, 1.0, 2.5, 4.0]
            .iter()
            .map(|a| [0.8f64.sin() * a.cos(), 0.8f64.sin() * a.sin(), 0.8f64.cos()])
            .collect();
        serde_json::to_string(&pts).unwrap()
    });
    write("boundary.json", "[0,0.3,0.4,0.6,0.7,0.9]");
    write("spec.json", "[0.5,0.5,0]");
    write("matrix.json", "[[0.5,0.5,0],[0,0.5,0.5],[0.5,0,0.5]]");
    write("disk.json", &{
        let pts: Vec<[f64; 2]> = [0.0f64, 2.0, 4.0].iter().map(|a| [0.5 * a.cos(), 0.5 * a.sin()]).collect();
        serde_json::to_string(&pts).unwrap()
    });

    let sets: Vec<Vec<String>> = vec![
        vec!["regularize", "--geometry", "plane", "--input", &p("plane.json"), "--tol", "1e-10"].into_iter().map(String::from).collect(),
        vec!["regularize", "--geometry", "sphere", "--input", &p("sphere_uneven.json"), "--k", "3", "--format", "json"]
            .into_iter()
            .map(String::from)
            .collect(),
        vec!["regularize", "--geometry", "hyperbolic", "--input", &p("boundary.json")].into_iter().map(String::from).collect(),
        vec!["eigen", "--spec", &p("spec.json")].into_iter().map(String::from).collect(),
        vec!["napoleon", "--geometry", "plane", "--input", &p("plane.json")].into_iter().map(String::from).collect(),
        vec!["napoleon", "--geometry", "sphere", "--input", &p("sphere.json")].into_iter().map(String::from).collect(),
        vec!["fit", "--input", &p("sphere_uneven.json")].into_iter().map(String::from).collect(),
        vec!["analyze", "--matrix", &p("matrix.json")].into_iter().map(String::from).collect(),
        vec!["polar", "--input", &p("disk.json")].into_iter().map(String::from).collect(),
        vec!["experiment", "table1", "--trials", "50", "--seed", "7"].into_iter().map(String::from).collect(),
        vec!["experiment", "table1", "--trials", "50", "--seed", "7", "--format", "json", "--sampler", "cube"]
            .into_iter()
            .map(String::from)
            .collect(),
    ];
    let mut mismatched = Vec::new();
    let mut errors = Vec::new();
    for (i, args) in sets.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = p(&format!("out_{i}_{run}"));
            let trace = p(&format!("trace_{i}_{run}"));
            let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
            full.extend(["--out", &out]);
            if args[0] == "regularize" {
                full.extend(["--trace", &trace]);
            }
            if let Err(e) = run_cli(&full) {
                errors.push(e);
                continue;
            }
            let mut bytes = fs::read(&out).unwrap();
            if Path::new(&trace).exists() {
                bytes.extend(fs::read(&trace).unwrap());
            }
            outputs.push(bytes);
        }
        if outputs.len() == 2 && outputs[0] != outputs[1] {
            mismatched.push(args.join(" "));
        }
    }
    Outcome {
        pass: mismatched.is_empty() && errors.is_empty(),
        detail: format!(
            "{} subcommand runs compared; {} mismatched; errors: {}",
            sets.len(),
            mismatched.len(),
            if errors.is_empty() { "none".to_string() } else { errors.join("; ") }
        ),
    }
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "spectra", budget: ms(1000), run: spectra },
        Criterion { id: 2, name: "exact triangle contraction", budget: ms(1000), run: exact_contraction },
        Criterion { id: 3, name: "cyclic n-gon convergence", budget: ms(5000), run: ngon_convergence },
        Criterion { id: 4, name: "Table 1 trend", budget: ms(5000), run: table1 },
        Criterion { id: 5, name: "hyperbolic limit", budget: ms(1000), run: hyperbolic_limit },
        Criterion { id: 6, name: "regularity lemma", budget: ms(2000), run: regularity_lemma },
        Criterion { id: 7, name: "euclidean Napoleon", budget: ms(1000), run: euclid_napoleon },
        Criterion { id: 8, name: "spherical Napoleon", budget: ms(1000), run: sphere_napoleon },
        Criterion { id: 9, name: "fit and project", budget: ms(1000), run: fit_and_project },
        Criterion { id: 10, name: "analyzer", budget: ms(1000), run: analyzer_cases },
        Criterion { id: 11, name: "CLI determinism", budget: None, run: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_budget = c.budget.is_none_or(|b| elapsed <= b);
        let pass = outcome.pass && in_budget;
        if !pass {
            failed += 1;
        }
        let budget = c.budget.map_or(String::new(), |b| format!(" / {} ms", b.as_millis()));
        println!(
            "{} criterion {:>2} {}: {} [{} ms{}]",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            outcome.detail,
            elapsed.as_millis(),
            budget
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
