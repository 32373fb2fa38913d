//! Acceptance suite. Every test prints one `criterion N: PASS|FAIL ...` line
//! and then asserts. Timed sections hold a shared lock so that parallel tests
//! do not distort each other's wall-clock measurements.

mod common;

use std::sync::Mutex;
use std::time::Instant;

use dpsqueeze::autmb::{normalize_point, normalize_point_in, pullback_coeffs};
use dpsqueeze::domain::GeneralEllipsoid;
use dpsqueeze::sampling::{stream_rng, unit_sphere};
use dpsqueeze::scalar::Dd;
use dpsqueeze::scalemethod::{
    build_frame, check_tau_normal, limit_diagnostics, scaled_function, tau, DefiningFunctionPoly,
};
use dpsqueeze::seqclass::{classify, generate, generate_at, tangency_ratio_in, SequenceKind, Thresholds, Verdict};
use dpsqueeze::squeeze::{gamma_floor, Squeezer, SqueezeOptions};
use dpsqueeze::wpoly::WeightedPolynomial;
use dpsqueeze::C64;
use num_complex::Complex;
use rand::Rng;

static TIMED: Mutex<()> = Mutex::new(());

fn report(id: u32, pass: bool, detail: String) {
    println!("criterion {id}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn e12() -> GeneralEllipsoid {
    GeneralEllipsoid::power_sum(vec![2]).unwrap()
}

fn ulps(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    if a.signum() != b.signum() {
        return u64::MAX;
    }
    a.abs().to_bits().abs_diff(b.abs().to_bits())
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<u64> {
    let mut v: Vec<u64> = (0..count)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp().round() as u64)
        .collect();
    v.dedup();
    v
}

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

#[test]
fn criterion_1_example_sequence_exactness() {
    let _guard = TIMED.lock().unwrap_or_else(|e| e.into_inner());
    let d = e12();
    let indices = log_spaced(2.0, 1e6, 400);
    let start = Instant::now();
    let seq = generate_at(&d, SequenceKind::Example11, &indices).unwrap();
    let mut worst_rho: f64 = 0.0;
    let mut worst_gap = 0;
    let mut worst_p = 0;
    for (&j, z) in seq.indices.iter().zip(&seq.terms) {
        let jn = dd(j as f64);
        let exact_rho = -(dd(1.0) / (jn * jn));
        let rho = d.rho_in(z);
        worst_rho = worst_rho.max(((rho - exact_rho) / exact_rho).abs().hi());
        let gap = (z[1].re - dd(1.0)).abs().hi();
        worst_gap = worst_gap.max(ulps(gap, 1.0 / j as f64));
        let p = d.polynomial().eval_in(&z[..1]).hi();
        let exact_p = (dd(2.0) / jn - dd(2.0) / (jn * jn)).hi();
        worst_p = worst_p.max(ulps(p, exact_p));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_rho <= 1e-12 && worst_gap <= 4 && worst_p <= 4 && elapsed < 1.0;
    report(
        1,
        pass,
        format!(
            "{} indices in [2, 1e6]: max rel err rho {worst_rho:.3e}, gap ulps {worst_gap}, P ulps {worst_p}, {elapsed:.3}s",
            indices.len()
        ),
    );
}

#[test]
fn criterion_2_tangency_ratio() {
    let d = e12();
    let indices = log_spaced(3.0, 1e6, 200);
    let seq = generate_at(&d, SequenceKind::Example11, &indices).unwrap();
    let mut worst: f64 = 0.0;
    for z in &seq.terms {
        let r: Dd = tangency_ratio_in(&d, 0.5, z);
        worst = worst.max((r.hi() - 1.0).abs());
    }
    let tangential = classify(&d, 0.5, &seq, Thresholds::default()).unwrap();
    let normal = generate(&d, SequenceKind::Normal, 200).unwrap();
    let nrec = classify(&d, 0.5, &normal, Thresholds::default()).unwrap();
    let normal_zero = nrec.rows.iter().filter(|r| r.j >= 2).all(|r| r.r_star == 0.0);
    let pass = worst <= 1e-10
        && tangential.verdict == Verdict::Tangential
        && nrec.verdict == Verdict::Nontangential
        && normal_zero;
    report(
        2,
        pass,
        format!(
            "max |r*-1| = {worst:.3e}; example verdict {}, normal verdict {} (r* = 0 for j >= 2: {normal_zero})",
            tangential.verdict.as_str(),
            nrec.verdict.as_str()
        ),
    );
}

#[test]
fn criterion_3_normalization() {
    let d = e12();
    let indices = log_spaced(2.0, 1e6, 200);
    let seq = generate_at(&d, SequenceKind::Example11, &indices).unwrap();
    let mut worst: f64 = 0.0;
    let mut at10 = f64::NAN;
    for (&j, z) in seq.indices.iter().zip(&seq.terms) {
        let np = normalize_point_in(&d, z).unwrap();
        let pb = d.polynomial().eval_in(&np.b[..1]);
        let jn = dd(j as f64);
        let exact = (dd(2.0) / jn - dd(2.0) / (jn * jn)) / (dd(2.0) / jn - dd(1.0) / (jn * jn));
        worst = worst.max(((pb - exact) / exact).abs().hi());
        if j == 10 {
            at10 = pb.hi();
        }
    }
    let tail = generate_at(&d, SequenceKind::Example11, &[1_000_000]).unwrap();
    let np = normalize_point_in(&d, &tail.terms[0]).unwrap();
    let last = d.polynomial().eval_in(&np.b[..1]).hi();
    let pass = worst <= 1e-12 && (at10 - 0.9474).abs() <= 1e-4 && (1.0 - last) < 1e-5;
    report(3, pass, format!("max rel err {worst:.3e}; P(b') at n=10: {at10:.6}; at n=1e6: {last:.9}"));
}

#[test]
fn criterion_4_pullback_limits() {
    let far = pullback_coeffs(0.5, 1.0 - 0.5f64.powi(30)).unwrap();
    let dev_far = far.c1.abs().max((far.c2 - 1.0).abs()).max((far.c3 - 1.0).abs());
    let mid = pullback_coeffs(0.5, 0.9).unwrap();
    let dev_mid = (mid.c1 - 0.05).abs().max((mid.c2 - 0.95).abs()).max((mid.c3 - 0.9025).abs());
    let mut monotone = true;
    let mut prev = pullback_coeffs(0.5, 0.5).unwrap();
    for k in 2..=30 {
        let cur = pullback_coeffs(0.5, 1.0 - 0.5f64.powi(k)).unwrap();
        monotone &= cur.c1 <= prev.c1 && (cur.c2 - 1.0).abs() <= (prev.c2 - 1.0).abs();
        monotone &= (cur.c3 - 1.0).abs() <= (prev.c3 - 1.0).abs();
        prev = cur;
    }
    let pass = dev_far <= 1e-6 && dev_mid <= 1e-12 && monotone;
    report(
        4,
        pass,
        format!("deviation at a=1-2^-30: {dev_far:.3e}; at a=0.9: {dev_mid:.3e}; monotone on grid: {monotone}"),
    );
}

#[test]
fn criterion_5_ball_calibration() {
    let _guard = TIMED.lock().unwrap_or_else(|e| e.into_inner());
    let n = 3;
    let ball = GeneralEllipsoid::ball(n).unwrap();
    let start = Instant::now();
    let squeezer = Squeezer::new(&ball, SqueezeOptions::default());
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let mut rng = stream_rng(2024, i);
        let u = unit_sphere(&mut rng, n);
        let radius = rng.gen_range(0.0f64..1.0).powf(1.0 / (2 * n) as f64);
        let p: Vec<C64> = u.iter().map(|x| x * radius).collect();
        let e = squeezer.estimate(&p, 100_000, 17).unwrap();
        worst = worst.max((e.value - 1.0).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        5,
        worst <= 1e-3 && elapsed < 10.0,
        format!("20 points in B^{n}, 1e5 rays each: max |sigma-1| = {worst:.3e}, {elapsed:.2}s"),
    );
}

#[test]
fn criterion_6_squeezing_trend() {
    let d = e12();
    let squeezer = Squeezer::new(&d, SqueezeOptions::default());
    let ns = [10u64, 100, 1000, 10_000];
    let seq = generate_at(&d, SequenceKind::Example11, &ns).unwrap();
    let values: Vec<f64> = seq.terms_f64().iter().map(|p| squeezer.estimate(p, 20_000, 31).unwrap().value).collect();
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    let last = seq.terms_f64()[3].clone();
    let slice = normalize_point(&d, &last).unwrap().b;
    let calibration = squeezer.estimate(&slice, 100_000, 17).unwrap().value;
    let pass = monotone && values[3] > values[0] && values[3] >= 0.9 * calibration;
    report(
        6,
        pass,
        format!(
            "sigma at n=10,1e2,1e3,1e4: {:.6} {:.6} {:.6} {:.6}; margin over n=10: {:.3e}; slice calibration {calibration:.6}",
            values[0],
            values[1],
            values[2],
            values[3],
            values[3] - values[0]
        ),
    );
}

#[test]
fn criterion_7_floor() {
    let d = e12();
    let squeezer = Squeezer::new(&d, SqueezeOptions::default());
    let f = |r: f64| gamma_floor(&squeezer, 0.5, r, 200, 500, 41).unwrap();
    let (q, h, t) = (f(0.25), f(0.5), f(0.75));
    let pass = h.floor > 0.0 && q.floor >= t.floor - 1e-3;
    report(
        7,
        pass,
        format!(
            "floors r=0.25: {:.6}, r=0.5: {:.6}, r=0.75: {:.6} (grid minima {:.6} {:.6} {:.6})",
            q.floor, h.floor, t.floor, q.grid_floor, h.grid_floor, t.grid_floor
        ),
    );
}

#[test]
fn criterion_8_tau_oracles() {
    let ball = DefiningFunctionPoly::ball(2);
    let eta = [C64::new(0.0, 0.0), C64::new(0.9, 0.0)];
    let normal = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    let sweep: [f64; 3] = [1e-2, 1e-4, 1e-6];
    let mut worst_ball: f64 = 0.0;
    for &eps in &sweep {
        let oracle = -0.9 + (0.81 + eps).sqrt();
        worst_ball = worst_ball.max((tau(&ball, &eta, &normal, eps).unwrap() - oracle).abs() / oracle);
    }
    let model = DefiningFunctionPoly::graph_model(&WeightedPolynomial::power_sum(vec![2]).unwrap());
    let mut worst_model: f64 = 0.0;
    for &eps in &sweep {
        let frame = build_frame(&model, &[C64::new(0.0, 0.0), C64::new(-eps, 0.0)], eps).unwrap();
        worst_model = worst_model.max((frame.tau[0] - eps.powf(0.25)).abs() / eps.powf(0.25));
    }
    let etas = vec![eta.to_vec(); sweep.len()];
    let band_ball = check_tau_normal(&ball, &etas, &sweep).unwrap();
    let model_etas: Vec<Vec<C64>> = sweep.iter().map(|e| vec![C64::new(0.0, 0.0), C64::new(-e, 0.0)]).collect();
    let band_model = check_tau_normal(&model, &model_etas, &sweep).unwrap();
    let pass = worst_ball <= 1e-6 && worst_model <= 1e-6 && band_ball.passed && band_model.passed;
    report(
        8,
        pass,
        format!(
            "ball rel err {worst_ball:.3e}; model tau_1 rel err {worst_model:.3e}; tau_n/eps bands [{:.5}, {:.5}] and [{:.5}, {:.5}]",
            band_ball.min, band_ball.max, band_model.min, band_model.max
        ),
    );
}

#[test]
fn criterion_9_scaling_limit() {
    let model = DefiningFunctionPoly::graph_model(&WeightedPolynomial::power_sum(vec![2]).unwrap());
    let target = DefiningFunctionPoly::new(
        2,
        vec![
            (vec![0, 0], vec![0, 0], C64::new(-1.0, 0.0)),
            (vec![0, 1], vec![0, 0], C64::new(0.5, 0.0)),
            (vec![2, 0], vec![2, 0], C64::new(1.0, 0.0)),
        ],
    )
    .unwrap();
    let mut scaled = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 1..=8 {
        let delta = 10f64.powi(-k);
        let eta = [C64::new(0.0, 0.0), C64::new(-delta, 0.0)];
        let frame = build_frame(&model, &eta, -model.eval(&eta)).unwrap();
        let s = scaled_function(&model, &frame).unwrap();
        worst = worst.max(s.table.max_deviation(&target));
        scaled.push(s);
    }
    let rep = limit_diagnostics(&scaled, Some(4), 9).unwrap();
    // zero drift up to the round-off of the numerically solved radii
    let pass = worst <= 1e-10 && rep.max_drift <= 1e-12 && rep.plurisubharmonic && rep.degree_ok;
    report(
        9,
        pass,
        format!(
            "max coefficient deviation {worst:.3e}; Cauchy drift {:.3e} (tol 1e-12); min Levi eigenvalue {:.3e}; degree {}",
            rep.max_drift, rep.min_levi, rep.degree
        ),
    );
}

#[test]
fn criterion_10_property_suites() {
    let _guard = TIMED.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let suites: Vec<(&str, common::Outcome)> = vec![
        ("weighted homogeneity", common::weighted_homogeneity(256)),
        ("hermitian realness", common::hermitian_realness(256)),
        ("boundary preservation (20 x 1000)", common::boundary_preservation(20, 1000)),
        ("inverse round trips", common::inverse_round_trips(256)),
        ("estimator consistency (values compared)", common::estimator_consistency(12, 256)),
        ("finite differences", common::finite_differences(128)),
    ];
    let elapsed = start.elapsed().as_secs_f64();
    let mut pass = elapsed < 120.0;
    let mut parts = Vec::new();
    for (name, outcome) in &suites {
        match outcome {
            Ok(v) => parts.push(format!("{name}: ok ({v:.3e})")),
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    report(10, pass, format!("{}; {elapsed:.2}s", parts.join("; ")));
}

#[test]
fn double_double_terms_keep_digits() {
    // the f64 rounding of a near-boundary term loses rho entirely
    let d = e12();
    let seq = generate_at(&d, SequenceKind::Example11, &[1_000_000]).unwrap();
    let z: Vec<Complex<Dd>> = seq.terms[0].clone();
    assert!(d.rho_in(&z).hi() < 0.0);
}
