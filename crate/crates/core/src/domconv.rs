//! Convergence of domain sequences tested through membership oracles on
//! finite point clouds, and the exhaustion of `D_P` by pulled-back
//! subdomains.
//!
//! Every verdict is qualified by the cloud resolution: a compact set is
//! represented by finitely many points with an interior-margin certificate.

use rand::Rng;

use crate::autmb::{pullback_coeffs, EllipsoidAutomorphism, MobiusSign, PullbackCoeffs};
use crate::domain::{GeneralEllipsoid, SubdomainParams};
use crate::error::{Error, Result};
use crate::linalg::{norm, sub};
use crate::sampling::{stream_rng, unit_sphere};
use crate::scalar::C64;
use crate::table::{coordinate_cells, coordinate_header, fmt_f64, Table};

pub trait DomainOracle: Sync {
    fn contains(&self, z: &[C64]) -> bool;

    /// The domain lies in the ball of this radius about the origin.
    fn radius(&self) -> f64;

    fn label(&self) -> String;
}

impl DomainOracle for GeneralEllipsoid {
    fn contains(&self, z: &[C64]) -> bool {
        GeneralEllipsoid::contains(self, z)
    }

    fn radius(&self) -> f64 {
        self.bounding_radius()
    }

    fn label(&self) -> String {
        format!("D_P(m={:?})", self.polynomial().weights().exponents())
    }
}

/// A predicate with a declared bounding radius.
pub struct FnOracle<F> {
    pub predicate: F,
    pub radius: f64,
    pub label: String,
}

impl<F: Fn(&[C64]) -> bool + Sync> DomainOracle for FnOracle<F> {
    fn contains(&self, z: &[C64]) -> bool {
        (self.predicate)(z)
    }

    fn radius(&self) -> f64 {
        self.radius
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `D_P^{s,r}`.
pub struct SubdomainOracle {
    pub host: GeneralEllipsoid,
    pub params: SubdomainParams,
}

impl DomainOracle for SubdomainOracle {
    fn contains(&self, z: &[C64]) -> bool {
        self.host.contains_sub(&self.params, z)
    }

    fn radius(&self) -> f64 {
        self.host.bounding_radius()
    }

    fn label(&self) -> String {
        format!("D^(s={},r={})", self.params.s, self.params.r)
    }
}

/// `psi^{-1}(target) = { z : psi(z) ∈ target }` for an automorphism of `host`.
pub struct PullbackOracle<O> {
    pub host: GeneralEllipsoid,
    pub psi: EllipsoidAutomorphism,
    pub target: O,
}

impl<O: DomainOracle> DomainOracle for PullbackOracle<O> {
    fn contains(&self, z: &[C64]) -> bool {
        self.host.contains(z) && self.psi.apply_to(&self.host, z).map_or(false, |w| self.target.contains(&w))
    }

    fn radius(&self) -> f64 {
        self.host.bounding_radius()
    }

    fn label(&self) -> String {
        format!("psi(a={:.6})^-1({})", self.psi.a().re, self.target.label())
    }
}

/// `factor · inner`.
pub struct ScaledOracle<O> {
    pub inner: O,
    pub factor: f64,
}

impl<O: DomainOracle> DomainOracle for ScaledOracle<O> {
    fn contains(&self, z: &[C64]) -> bool {
        let w: Vec<C64> = z.iter().map(|x| x / self.factor).collect();
        self.inner.contains(&w)
    }

    fn radius(&self) -> f64 {
        self.inner.radius() * self.factor
    }

    fn label(&self) -> String {
        format!("{}*{}", self.factor, self.inner.label())
    }
}

/// A finite stand-in for a compact set; `margin` is the claimed distance to
/// the complement of the domain it is certified against.
#[derive(Clone, Debug)]
pub struct PointCloud {
    pub points: Vec<Vec<C64>>,
    pub margin: f64,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<C64>>, margin: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Argument("empty point cloud".into()));
        }
        if !(margin >= 0.0) {
            return Err(Error::Argument(format!("margin must be non-negative, got {margin}")));
        }
        Ok(Self { points, margin })
    }

    /// Closed ball: half the points on the sphere, half in the interior.
    pub fn ball(center: &[C64], radius: f64, count: usize, margin: f64, seed: u64) -> Result<Self> {
        let n = center.len();
        let points = (0..count)
            .map(|i| {
                let mut rng = stream_rng(seed, i as u64);
                let u = unit_sphere(&mut rng, n);
                let t = if i % 2 == 0 { 1.0 } else { rng.gen_range(0.0f64..1.0).powf(1.0 / (2 * n) as f64) };
                center.iter().zip(&u).map(|(c, x)| c + x * (radius * t)).collect()
            })
            .collect();
        Self::new(points, margin)
    }

    /// Points whose `±margin` offsets along the real axes leave `domain`.
    pub fn certify(&self, domain: &dyn DomainOracle) -> Vec<Vec<C64>> {
        self.points.iter().filter(|p| !self.certified_point(domain, p)).cloned().collect()
    }

    fn certified_point(&self, domain: &dyn DomainOracle, p: &[C64]) -> bool {
        if !domain.contains(p) {
            return false;
        }
        if self.margin == 0.0 {
            return true;
        }
        for j in 0..p.len() {
            for d in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
                let mut q = p.to_vec();
                q[j] += d * self.margin;
                if !domain.contains(&q) {
                    return false;
                }
            }
        }
        true
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ConditionIReport {
    /// `contained[i - 1]`: whether the cloud lies in `Omega_i`.
    pub contained: Vec<bool>,
    /// Smallest tested index from which every tested domain contains the cloud.
    pub i0: Option<usize>,
    /// `(i, point)` for cloud points outside `Omega_i`, at the last tested
    /// index (failure) or the last index before `i0` (success).
    pub witnesses: Vec<(usize, Vec<C64>)>,
    pub resolution: usize,
}

/// Compacts of the limit are eventually inside the sequence. Indices are
/// 1-based.
pub fn check_condition_i(
    seq: &[&dyn DomainOracle],
    limit: &dyn DomainOracle,
    cloud: &PointCloud,
) -> Result<ConditionIReport> {
    let bad = cloud.certify(limit);
    if !bad.is_empty() {
        return Err(Error::Precondition(format!(
            "{} of {} cloud points are not inside {} with margin {}",
            bad.len(),
            cloud.len(),
            limit.label(),
            cloud.margin
        )));
    }
    let contained: Vec<bool> = seq.iter().map(|o| cloud.points.iter().all(|p| o.contains(p))).collect();
    let tail_start = contained.iter().rposition(|c| !c).map_or(0, |i| i + 1);
    let i0 = (tail_start < seq.len()).then_some(tail_start + 1);
    let witness_index = match i0 {
        Some(1) => None,
        Some(i) => Some(i - 2),
        None => seq.len().checked_sub(1),
    };
    let witnesses = witness_index
        .map(|k| cloud.points.iter().filter(|p| !seq[k].contains(p)).map(|p| (k + 1, p.clone())).collect())
        .unwrap_or_default();
    Ok(ConditionIReport { contained, i0, witnesses, resolution: cloud.len() })
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConditionIIVerdict {
    Pass,
    /// The cloud is not inside the tail of the sequence, so nothing is claimed.
    VacuousPass,
    Fail { witnesses: Vec<Vec<C64>> },
}

impl ConditionIIVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::VacuousPass => "vacuous-pass",
            Self::Fail { .. } => "fail",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConditionIIReport {
    pub verdict: ConditionIIVerdict,
    /// First tested index from which every domain contains the cloud.
    pub eventually_from: Option<usize>,
    pub resolution: usize,
}

/// Compacts persistently covered by the sequence lie in the limit.
pub fn check_condition_ii(seq: &[&dyn DomainOracle], limit: &dyn DomainOracle, cloud: &PointCloud) -> ConditionIIReport {
    let contained: Vec<bool> = seq.iter().map(|o| cloud.points.iter().all(|p| o.contains(p))).collect();
    let tail_start = contained.iter().rposition(|c| !c).map_or(0, |i| i + 1);
    if tail_start >= seq.len() {
        return ConditionIIReport { verdict: ConditionIIVerdict::VacuousPass, eventually_from: None, resolution: cloud.len() };
    }
    let outside: Vec<Vec<C64>> = cloud.points.iter().filter(|p| !limit.contains(p)).cloned().collect();
    let verdict = if outside.is_empty() { ConditionIIVerdict::Pass } else { ConditionIIVerdict::Fail { witnesses: outside } };
    ConditionIIReport { verdict, eventually_from: Some(tail_start + 1), resolution: cloud.len() }
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub condition_i: Vec<std::result::Result<ConditionIReport, String>>,
    pub condition_ii: Vec<ConditionIIReport>,
    pub converges: bool,
}

impl ConvergenceReport {
    /// Rows `(i, condition, verdict, witness coordinates)`.
    pub fn to_table(&self, n: usize) -> Table {
        let mut header = vec!["i".to_string(), "condition".into(), "verdict".into()];
        header.extend(coordinate_header("w", n));
        let mut t = Table::new(header);
        let blank = || vec![String::new(); 2 * n];
        for (k, r) in self.condition_i.iter().enumerate() {
            match r {
                Ok(rep) => {
                    let i = rep.i0.map_or("none".to_string(), |i| i.to_string());
                    let verdict = if rep.i0.is_some() { "pass" } else { "fail" };
                    let mut row = vec![i.clone(), format!("i[cloud {k}]"), verdict.into()];
                    row.extend(blank());
                    t.push(row);
                    for (wi, p) in &rep.witnesses {
                        let mut row = vec![wi.to_string(), format!("i[cloud {k}]"), "witness".into()];
                        row.extend(coordinate_cells(p));
                        t.push(row);
                    }
                }
                Err(msg) => {
                    let mut row = vec!["none".into(), format!("i[cloud {k}]"), format!("precondition: {msg}")];
                    row.extend(blank());
                    t.push(row);
                }
            }
        }
        for (k, r) in self.condition_ii.iter().enumerate() {
            let i = r.eventually_from.map_or("none".to_string(), |i| i.to_string());
            let mut row = vec![i.clone(), format!("ii[cloud {k}]"), r.verdict.as_str().into()];
            row.extend(blank());
            t.push(row);
            if let ConditionIIVerdict::Fail { witnesses } = &r.verdict {
                for p in witnesses {
                    let mut row = vec![i.clone(), format!("ii[cloud {k}]"), "witness".into()];
                    row.extend(coordinate_cells(p));
                    t.push(row);
                }
            }
        }
        t
    }
}

/// Condition (i) on `inner_clouds` (certified inside the limit) and
/// condition (ii) on `probe_clouds`.
pub fn check_convergence(
    seq: &[&dyn DomainOracle],
    limit: &dyn DomainOracle,
    inner_clouds: &[PointCloud],
    probe_clouds: &[PointCloud],
) -> ConvergenceReport {
    let condition_i: Vec<_> =
        inner_clouds.iter().map(|c| check_condition_i(seq, limit, c).map_err(|e| e.to_string())).collect();
    let condition_ii: Vec<_> = probe_clouds.iter().map(|c| check_condition_ii(seq, limit, c)).collect();
    let converges = condition_i.iter().all(|r| matches!(r, Ok(rep) if rep.i0.is_some()))
        && condition_ii.iter().all(|r| !matches!(r.verdict, ConditionIIVerdict::Fail { .. }));
    ConvergenceReport { condition_i, condition_ii, converges }
}

/// `Omega_i = psi_{a_i}^{-1}(D_P^s)` with the `Plus` map and `a_i = 1 - 1/i`.
pub fn pullback_sequence(d: &GeneralEllipsoid, s: f64, count: usize) -> Result<Vec<PullbackOracle<SubdomainOracle>>> {
    let params = SubdomainParams::horosphere(s)?;
    (1..=count)
        .map(|i| {
            let a = 1.0 - 1.0 / i as f64;
            Ok(PullbackOracle {
                host: d.clone(),
                psi: EllipsoidAutomorphism::new(C64::new(a, 0.0), 0.0, MobiusSign::Plus)?,
                target: SubdomainOracle { host: d.clone(), params },
            })
        })
        .collect()
}

/// Tolerance on `rho` for membership in the closure `D̄_P`.
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Lemma22Row {
    pub a: f64,
    pub included: bool,
    pub violations: usize,
    pub coeffs: PullbackCoeffs,
    /// Pulled-back inequality agrees with direct membership on the cloud.
    pub coeffs_consistent: bool,
}

#[derive(Clone, Debug)]
pub struct Lemma22Report {
    pub rows: Vec<Lemma22Row>,
    /// First grid index (0-based) from which inclusion holds on the cloud.
    pub first_index: Option<usize>,
    pub cloud_size: usize,
    pub excluded: usize,
    pub eps: f64,
    pub u_radius: f64,
    pub s: f64,
}

impl Lemma22Report {
    /// Rows `(a, condition, verdict, violations, c1, c2, c3, consistent)`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["a", "condition", "verdict", "violations", "c1", "c2", "c3", "coeffs_consistent"]);
        for r in &self.rows {
            t.push(vec![
                fmt_f64(r.a),
                "inclusion".into(),
                if r.included { "pass" } else { "fail" }.into(),
                r.violations.to_string(),
                fmt_f64(r.coeffs.c1),
                fmt_f64(r.coeffs.c2),
                fmt_f64(r.coeffs.c3),
                r.coeffs_consistent.to_string(),
            ]);
        }
        t
    }
}

/// For each `a` on the grid, tests whether a cloud on
/// `D̄_P \ B((0', -1), eps)` lies in `psi_a^{-1}(D̄_P ∩ Ū)` with
/// `U = B((0', 1), u_radius)` and `psi_a` the `Plus` map. Also compares the
/// pulled-back inequality for `D_P^s` against direct membership.
pub fn lemma22_exhaustion_check(
    d: &GeneralEllipsoid,
    s: f64,
    eps: f64,
    u_radius: f64,
    a_grid: &[f64],
    cloud_count: usize,
    seed: u64,
) -> Result<Lemma22Report> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Argument(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    if !(u_radius > 0.0) {
        return Err(Error::Argument(format!("U radius must be positive, got {u_radius}")));
    }
    if a_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument("a-grid must be strictly increasing".into()));
    }
    let params = SubdomainParams::horosphere(s)?;
    let n = d.n();
    let mut south = vec![C64::new(0.0, 0.0); n];
    south[n - 1] = C64::new(-1.0, 0.0);
    let mut north = south.clone();
    north[n - 1] = C64::new(1.0, 0.0);

    let mut cloud = Vec::with_capacity(cloud_count);
    let mut excluded = 0;
    for (i, b) in d.boundary_sample(cloud_count, seed).into_iter().enumerate() {
        let t = if i % 2 == 0 {
            1.0
        } else {
            stream_rng(seed ^ 0x9e37, i as u64).gen_range(0.0f64..1.0).powf(1.0 / (2 * n) as f64)
        };
        let z: Vec<C64> = b.z.iter().map(|x| x * t).collect();
        if norm(&sub(&z, &south)) < eps {
            excluded += 1;
        } else {
            cloud.push(z);
        }
    }

    let mut rows = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        let psi = EllipsoidAutomorphism::new(C64::new(a, 0.0), 0.0, MobiusSign::Plus)?;
        let coeffs = pullback_coeffs(params.b(), a)?;
        let mut violations = 0;
        let mut consistent = true;
        for z in &cloud {
            let w = psi.apply_to(d, z)?;
            if !(d.rho(&w) <= CLOSURE_TOL && norm(&sub(&w, &north)) <= u_radius) {
                violations += 1;
            }
            let direct = d.sub_defining(&params, &w);
            let pulled =
                (z[n - 1] - coeffs.c1).norm_sqr() + coeffs.c2 * d.polynomial().eval(&z[..n - 1]) - coeffs.c3;
            if direct.abs() > 1e-9 && pulled.abs() > 1e-9 && (direct < 0.0) != (pulled < 0.0) {
                consistent = false;
            }
        }
        rows.push(Lemma22Row { a, included: violations == 0, violations, coeffs, coeffs_consistent: consistent });
    }
    let tail_start = rows.iter().rposition(|r| !r.included).map_or(0, |i| i + 1);
    let first_index = (tail_start < rows.len()).then_some(tail_start);
    Ok(Lemma22Report { rows, first_index, cloud_size: cloud.len(), excluded, eps, u_radius, s })
}
