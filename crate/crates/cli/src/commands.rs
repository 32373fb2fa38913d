//! One function per subcommand. Each writes its tables through
//! [`Artifacts`] and returns a short human-readable summary.

use anyhow::{bail, Context, Result};
use dpsqueeze::autmb::{normalize_point_in, pullback_coeffs};
use dpsqueeze::domain::GeneralEllipsoid;
use dpsqueeze::domconv::{
    check_convergence, lemma22_exhaustion_check, pullback_sequence, DomainOracle, PointCloud,
};
use dpsqueeze::sampling::derive_seed;
use dpsqueeze::scalar::Dd;
use dpsqueeze::scalemethod::{
    build_frame, check_tau_normal, limit_diagnostics, scaled_function, DefiningFunctionPoly, ScaledFunction,
};
use dpsqueeze::seqclass::{classify_per_s, generate_at, tangency_ratio_in, Thresholds};
use dpsqueeze::squeeze::{analytic_floor, gamma_floor, profile_table, SqueezeEstimate, Squeezer, SqueezeOptions};
use dpsqueeze::table::{coordinate_cells, coordinate_header, fmt_f64, Table};
use dpsqueeze::C64;

use crate::config::Settings;
use crate::output::Artifacts;

pub const EXPERIMENTS: [&str; 10] = [
    "example11",
    "lemma22-limits",
    "scaling-demo",
    "profile",
    "classify",
    "floor",
    "scale",
    "limits",
    "wbscan",
    "convergence",
];

pub fn dispatch(name: &str, st: &Settings, art: &mut Artifacts) -> Result<String> {
    match name {
        "example11" => example11(st, art),
        "lemma22-limits" => lemma22_limits(st, art),
        "scaling-demo" => scaling_demo(st, art),
        "profile" => profile(st, art),
        "classify" => classify(st, art),
        "floor" => floor(st, art),
        "scale" => scale(st, art),
        "limits" => limits(st, art),
        "wbscan" => wbscan(st, art),
        "convergence" => convergence(st, art),
        other => bail!("unknown experiment `{other}`; expected one of {}", EXPERIMENTS.join(", ")),
    }
}

/// Estimates in parallel; the result order follows `points`.
fn estimate_all(squeezer: &Squeezer<'_>, points: &[Vec<C64>], rays: usize, seed: u64) -> Result<Vec<SqueezeEstimate>> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(points.len()).max(1);
    let chunk = points.len().div_ceil(threads);
    let parts: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|c| scope.spawn(move || c.iter().map(|p| squeezer.estimate(p, rays, seed)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("estimator thread panicked")).collect()
    });
    parts.into_iter().flatten().collect::<dpsqueeze::Result<Vec<_>>>().context("squeezing estimate failed")
}

fn example11(st: &Settings, art: &mut Artifacts) -> Result<String> {
    let d = st.domain()?;
    let seq = generate_at(&d, dpsqueeze::seqclass::SequenceKind::Example11, &st.indices)?;
    let squeezer = Squeezer::new(&d, SqueezeOptions::default());
    let rays = st.samples_or(20_000);
    let seed = art.seed("sigma_hat", st.seed);
    let estimates = estimate_all(&squeezer, &seq.terms_f64(), rays, seed)?;
    let n = d.n();
    let mut t = Table::new(["n", "rho", "r_star", "P_b_prime", "sigma_hat"]);
    for ((j, z), e) in seq.indices.iter().zip(&seq.terms).zip(&estimates) {
        let slice = normalize_point_in::<Dd>(&d, z).context("normalization failed")?;
        let p_b = d.polynomial().eval_in(&slice.b[..n - 1]).hi();
        t.push(vec![
            j.to_string(),
            fmt_f64(d.rho_in(z).hi()),
            fmt_f64(tangency_ratio_in(&d, st.s, z).hi()),
            fmt_f64(p_b),
            fmt_f64(e.value),
        ]);
    }
    art.table("example11.csv", &t)?;
    let last = estimates.last().map_or(f64::NAN, |e| e.value);
    Ok(format!("example11: {} terms, sigma_hat at n={} is {last:.6}", t.rows.len(), st.indices[st.indices.len() - 1]))
}

fn lemma22_limits(st: &Settings, art: &mut Artifacts) -> Result<String> {
    let b = 1.0 - st.s;
    let grid = st.a_grid.clone().unwrap_or_else(|| {
        let mut g = vec![0.5, 0.9, 0.99, 0.999];
        g.extend([20, 30].map(|k| 1.0 - 0.5f64.powi(k)));
        g
    });
    let mut t = Table::new(["a", "b", "c1", "c2", "c3"]);
    let mut last = None;
    for &a in &grid {
        let c = pullback_coeffs(b, a)?;
        t.push(vec![fmt_f64(a), fmt_f64(b), fmt_f64(c.c1), fmt_f64(c.c2), fmt_f64(c.c3)]);
        last = Some((a, c));
    }
    art.table("lemma22_limits.csv", &t)?;
    let (a, c) = last.expect("grid is non-empty");
    Ok(format!("lemma22-limits: at a={a} (c1, c2, c3) = ({:.3e}, {:.12}, {:.12})", c.c1, c.c2, c.c3))
}

fn scaling_demo(st: &Settings, art: &mut Artifacts) -> Result<String> {
    let d = st.domain()?;
    let rho = DefiningFunctionPoly::graph_model(d.polynomial());
    let list = scaled_list(&rho, "graph", st)?;
    let summary = write_limit(&d, &list, st, art)?;
    Ok(format!("scaling-demo: {summary}"))
}

fn profile(st: &Settings, art: &mut Artifacts) -> Result<String> {
    let d = st.domain()?;
    let seq = generate_at(&d, st.sequence_kind()?, &st.indices)?;
    let squeezer = Squeezer::new(&d, SqueezeOptions::default());
    let seed = art.seed("profile", st.seed);
    let estimates = estimate_all(&squeezer, &seq.terms_f64(), st.samples_or(4000), seed)?;
    let floor = match st.r {
        Some(r) => Some(analytic_floor(&squeezer, r, 4096, art.seed("analytic_floor", derive_seed(st.seed, 0xf1)))?),
        None => None,
    };
    art.table("profile.csv", &profile_table(&seq.indices, &estimates, floor))?;
    let values: Vec<String> = estimates.iter().map(|e| format!("{:.6}", e.value)).collect();
    Ok(format!("profile ({}): sigma_hat = [{}]", st.sequence, values.join(", ")))
}

fn classify(st: &Settings, art: &mut Artifacts) -> Result<String> {
    let d = st.domain()?;
    let seq = generate_at(&d, st.sequence_kind()?, &st.indices)?;
    let records = classify_per_s(&d, &st.s_values, &seq, Thresholds::default())?;
    let mut verdicts = Table::new(["s", "tail_min", "tail_max", "verdict"]);
    let mut lines = Vec::new();
    for (k, rec) in records.iter().enumerate() {
        art.table(&format!("classify_{k}.csv"), &rec.to_table())?;
        verdicts.push(vec![fmt_f64(rec.s), fmt_f64(rec.tail_min), fmt_f64(rec.tail_max), rec.verdict.as_str().into()]);
        lines.push(format!("s={}: {}", rec.s, rec.verdict.as_str()));
    }
    art.table("verdicts.csv", &verdicts)?;
    Ok(format!("classify ({}): {}", st.sequence, lines.join("; ")))
}

fn floor(st: &Settings, art: &mut Artifacts) -> Result<String> {
    let d = st.domain()?;
    let squeezer = Squeezer::new(&d, SqueezeOptions::default());
    let rays = st.samples_or(500);
    let seed = art.seed("grid", st.seed);
    let analytic_seed = art.seed("analytic_floor", derive_seed(st.seed, 0xf1));
    let mut header: Vec<String> =
        ["s", "r", "floor", "grid_floor", "analytic_floor"].iter().map(|s| s.to_string()).collect();
    header.extend(coordinate_header("argmin", d.n()));
    let mut t = Table::new(header);
    let mut lines = Vec::new();
    for &r in &st.r_values {
        let rep = gamma_floor(&squeezer, st.s, r, st.grid, rays, seed).with_context(|| format!("floor at r={r}"))?;
        let analytic = analytic_floor(&squeezer, r, 4096, analytic_seed)?;
        let mut row = vec![fmt_f64(st.s), fmt_f64(r), fmt_f64(rep.floor), fmt_f64(rep.grid_floor), fmt_f64(analytic)];
        row.extend(coordinate_cells(&rep.argmin));
        t.push(row);
        lines.push(format!("r={r}: {:.6}", rep.floor));
    }
    art.table("floor.csv", &t)?;
    Ok(format!("floor (s={}): {}", st.s, lines.join(", ")))
}

/// Base points along the inner normal at distance `delta`, and the level
/// `eps = -rho(eta)`.
fn scaled_list(rho: &DefiningFunctionPoly, model: &str, st: &Settings) -> Result<Vec<ScaledFunction>> {
    let n = rho.n();
    st.deltas
        .iter()
        .map(|&delta| {
            let mut eta = vec![C64::new(0.0, 0.0); n];
            eta[n - 1] = C64::new(if model == "graph" { -delta } else { 1.0 - delta }, 0.0);
            let eps = -rho.eval(&eta);
            let frame = build_frame(rho, &eta, eps).with_context(|| format!("frame at delta={delta}"))?;
            Ok(scaled_function(rho, &frame)?)
        })
        .collect()
}

fn model_rho(d: &GeneralEllipsoid, st: &Settings) -> DefiningFunctionPoly {
    if st.model == "graph" {
        DefiningFunctionPoly::graph_model(d.polynomial())
    } else {
        DefiningFunctionPoly::from_ellipsoid(d)
    }
}

fn scale(st: &Settings, art: &mut Artifacts) -> Result<String> {
    let d = st.domain()?;
    let rho = model_rho(&d, st);
    let list = scaled_list(&rho, &st.model, st)?;
    let n = d.n();
    let mut header = vec!["j".to_string(), "delta".into(), "eps".into()];
    header.extend((1..=n).map(|k| format!("tau_{k}")));
    header.extend(["value_at_origin".to_string()]);
    let mut t = Table::new(header);
    for (j, (s, delta)) in list.iter().zip(&st.deltas).enumerate() {
        let mut row = vec![(j + 1).to_string(), fmt_f64(*delta), fmt_f64(s.eps)];
        row.extend(s.tau.iter().map(|x| fmt_f64(*x)));
        row.push(fmt_f64(s.value_at_origin()));
        t.push(row);
        art.text(&format!("scaled_{}.json", j + 1), &(s.table.to_json()? + "\n"))?;
    }
    art.table("frames.csv", &t)?;
    let etas: Vec<Vec<C64>> = list.iter().map(|s| s.eta.clone()).collect();
    let eps: Vec<f64> = list.iter().map(|s| s.eps).collect();
    let band = check_tau_normal(&rho, &etas, &eps)?;
    art.table("tau_normal.csv", &band.to_table())?;
    Ok(format!(
        "scale ({}): {} frames, tau_n/eps in [{:.6}, {:.6}], band check {}",
        st.model,
        list.len(),
        band.min,
        band.max,
        if band.passed { "passed" } else { "failed" }
    ))
}

fn limits(st: &Settings, art: &mut Artifacts) -> Result<String> {
    let d = st.domain()?;
    let rho = model_rho(&d, st);
    let list = scaled_list(&rho, &st.model, st)?;
    let summary = write_limit(&d, &list, st, art)?;
    Ok(format!("limits ({}): {summary}", st.model))
}

fn write_limit(d: &GeneralEllipsoid, list: &[ScaledFunction], st: &Settings, art: &mut Artifacts) -> Result<String> {
    let bound = d.polynomial().degree().max(2);
    let rep = limit_diagnostics(list, Some(bound), art.seed("psh", st.seed))?;
    art.table("limits.csv", &rep.to_table())?;
    let mut t = Table::new(["key", "re", "im"]);
    for ((k, l), c) in rep.limit.coefficients() {
        t.push(vec![format!("K={k:?};L={l:?}"), fmt_f64(c.re), fmt_f64(c.im)]);
    }
    art.table("limit_table.csv", &t)?;
    art.text("limit.json", &(rep.limit.to_json()? + "\n"))?;
    Ok(format!(
        "{} terms in the limit, Cauchy drift {:.3e}, min Levi eigenvalue {:.3e}, degree {} (bound {bound})",
        rep.limit.coefficients().len(),
        rep.max_drift,
        rep.min_levi,
        rep.degree
    ))
}

fn wbscan(st: &Settings, art: &mut Artifacts) -> Result<String> {
    let d = st.domain()?;
    let seed = art.seed("boundary", st.seed);
    let rep = d.wb_scan(st.samples_or(4096), seed, st.tube);
    let mut header: Vec<String> =
        ["tube", "used", "excluded", "min_levi", "passed"].iter().map(|s| s.to_string()).collect();
    header.extend(coordinate_header("argmin", d.n()));
    let mut t = Table::new(header);
    let mut row =
        vec![fmt_f64(rep.tube), rep.used.to_string(), rep.excluded.to_string(), fmt_f64(rep.min_levi), rep.passed.to_string()];
    row.extend(if rep.argmin.is_empty() { vec![String::new(); 2 * d.n()] } else { coordinate_cells(&rep.argmin) });
    t.push(row);
    art.table("wbscan.csv", &t)?;
    art.table("boundary.csv", &d.boundary_table(&d.boundary_sample(64, seed)))?;
    Ok(format!(
        "wbscan: min Levi eigenvalue {:.6e} over {} samples ({} in the tube), {}",
        rep.min_levi,
        rep.used,
        rep.excluded,
        if rep.passed { "strongly pseudoconvex off the tube" } else { "not strongly pseudoconvex" }
    ))
}

fn convergence(st: &Settings, art: &mut Artifacts) -> Result<String> {
    let d = st.domain()?;
    let n = d.n();
    let seq = pullback_sequence(&d, st.s, st.count)?;
    let refs: Vec<&dyn DomainOracle> = seq.iter().map(|o| o as &dyn DomainOracle).collect();
    let origin = vec![C64::new(0.0, 0.0); n];
    let cloud_seed = art.seed("clouds", st.seed);
    let points = st.samples_or(500);
    let inner = PointCloud::ball(&origin, 0.5, points, 0.05, cloud_seed)?;
    let probe = PointCloud::ball(&origin, 1.1 * d.bounding_radius(), points, 0.0, derive_seed(cloud_seed, 1))?;
    let rep = check_convergence(&refs, &d, &[inner], &[probe]);
    art.table("convergence.csv", &rep.to_table(n))?;
    let grid = st.a_grid.clone().unwrap_or_else(|| (1..=20).map(|k| 1.0 - 0.5f64.powi(k)).collect());
    let l22 = lemma22_exhaustion_check(&d, st.s, 0.4, 0.5, &grid, 2000, art.seed("lemma22", derive_seed(st.seed, 0x22)))?;
    art.table("lemma22.csv", &l22.to_table())?;
    Ok(format!(
        "convergence (s={}, {} domains): {}; inclusion from a-grid index {}",
        st.s,
        st.count,
        if rep.converges { "converges on the clouds" } else { "does not converge on the clouds" },
        l22.first_index.map_or("none".to_string(), |i| i.to_string())
    ))
}
