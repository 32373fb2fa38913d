//! The radius `tau(eta, v, eps)` of the largest disc along a complex line on
//! which the defining function rises by less than `eps`.

use std::f64::consts::PI;

use crate::error::{check_dim, Error, Result};
use crate::linalg::norm;
use crate::scalar::C64;

use super::poly::DefiningFunctionPoly;

pub const PHASE_GRID: usize = 256;
/// Searches giving up beyond this radius report [`Error::Unbounded`].
pub const TAU_CAP: f64 = 1e6;
const SCAN_RATIO: f64 = 1.25;

/// `rho(eta + lambda v) - rho(eta) = Σ Re(c lambda^p conj(lambda)^q)`, kept as
/// `(p - q, p + q, c)`.
#[derive(Clone, Debug)]
pub struct LineTable {
    terms: Vec<(i32, u32, C64)>,
}

impl LineTable {
    pub fn new(rho: &DefiningFunctionPoly, eta: &[C64], v: &[C64]) -> Result<Self> {
        let t = rho.compose_affine(eta, &[v.to_vec()], 1.0)?;
        let terms = t
            .coefficients()
            .iter()
            .filter(|((k, l), _)| k[0] + l[0] > 0)
            .map(|((k, l), c)| (k[0] as i32 - l[0] as i32, k[0] + l[0], *c))
            .collect();
        Ok(Self { terms })
    }

    pub fn value(&self, r: f64, phase: f64) -> f64 {
        self.terms.iter().map(|&(k, d, c)| (c * C64::from_polar(r.powi(d as i32), k as f64 * phase)).re).sum()
    }

    /// `(max over phase, maximizing phase)` at radius `r`.
    pub fn max_over_phase(&self, r: f64) -> (f64, f64) {
        if self.terms.iter().all(|&(k, ..)| k == 0) {
            return (self.value(r, 0.0), 0.0);
        }
        let h = 2.0 * PI / PHASE_GRID as f64;
        let (mut best_phase, mut best) = (0.0, f64::NEG_INFINITY);
        for i in 0..PHASE_GRID {
            let phi = i as f64 * h;
            let v = self.value(r, phi);
            if v > best {
                best = v;
                best_phase = phi;
            }
        }
        let (phi, v) = golden_max(|phi| self.value(r, phi), best_phase - h, best_phase + h);
        if v > best {
            (v, phi.rem_euclid(2.0 * PI))
        } else {
            (best, best_phase)
        }
    }

    fn linear_size(&self) -> f64 {
        self.terms.iter().filter(|&&(_, d, _)| d == 1).map(|t| t.2.norm()).sum()
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauResult {
    pub tau: f64,
    /// Phase at which the rise `eps` is first reached on `|lambda| = tau`.
    pub phase: f64,
}

/// `sup { r : max_{|lambda| <= r} rho(eta + lambda v) - rho(eta) < eps }`.
pub fn tau(rho: &DefiningFunctionPoly, eta: &[C64], v: &[C64], eps: f64) -> Result<f64> {
    Ok(tau_detail(rho, eta, v, eps)?.tau)
}

pub fn tau_detail(rho: &DefiningFunctionPoly, eta: &[C64], v: &[C64], eps: f64) -> Result<TauResult> {
    check_dim(rho.n(), eta.len())?;
    check_dim(rho.n(), v.len())?;
    if !((norm(v) - 1.0).abs() < 1e-10) {
        return Err(Error::Argument(format!("direction must be a unit vector, |v| = {}", norm(v))));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Argument(format!("eps must be positive, got {eps}")));
    }
    let line = LineTable::new(rho, eta, v)?;
    tau_on_line(&line, eps)
}

/// First crossing of `g(r) = max_phase rise` through `eps`: geometric scan,
/// then bisection to relative width `1e-14`.
pub fn tau_on_line(line: &LineTable, eps: f64) -> Result<TauResult> {
    let g = |r: f64| line.max_over_phase(r).0;
    let mut lo = 1e-4 * eps / (1.0 + line.linear_size());
    let mut shrink = 0;
    while g(lo) >= eps {
        lo *= 0.5;
        shrink += 1;
        if shrink > 200 {
            return Err(Error::NonConvergence("rise exceeds eps at every tested radius".into()));
        }
    }
    let mut hi = lo * SCAN_RATIO;
    while g(hi) < eps {
        lo = hi;
        hi *= SCAN_RATIO;
        if hi > TAU_CAP {
            return Err(Error::Unbounded { cap: TAU_CAP });
        }
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    Ok(TauResult { tau, phase: line.max_over_phase(tau).1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wpoly::WeightedPolynomial;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn ball_normal_closed_form() {
        let rho = DefiningFunctionPoly::ball(2);
        let eta = vec![c(0.0, 0.0), c(0.9, 0.0)];
        let v = vec![c(0.0, 0.0), c(1.0, 0.0)];
        for eps in [1e-2, 1e-4, 1e-6] {
            let t = tau_detail(&rho, &eta, &v, eps).unwrap();
            let oracle = -0.9 + (0.81 + eps).sqrt();
            assert!((t.tau - oracle).abs() <= 1e-9 * oracle, "{eps}");
            assert!(t.phase.abs() < 1e-6 || (t.phase - 2.0 * PI).abs() < 1e-6);
        }
        assert!(tau(&rho, &eta, &v, 1e-3).unwrap() < tau(&rho, &eta, &v, 1e-2).unwrap());
    }

    #[test]
    fn graph_model_tangential() {
        let rho = DefiningFunctionPoly::graph_model(&WeightedPolynomial::power_sum(vec![2]).unwrap());
        let eta = vec![c(0.0, 0.0), c(-1e-3, 0.0)];
        let v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        for eps in [1e-2, 1e-3, 1e-5] {
            let t = tau(&rho, &eta, &v, eps).unwrap();
            assert!((t - eps.powf(0.25)).abs() <= 1e-9 * t);
        }
        let n = vec![c(0.0, 0.0), c(1.0, 0.0)];
        assert!((tau(&rho, &eta, &n, 1e-3).unwrap() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn unbounded_and_bad_arguments() {
        // rho = |z_1|^2 - 1 is flat along z_2
        let rho = DefiningFunctionPoly::new(
            2,
            vec![(vec![1, 0], vec![1, 0], c(1.0, 0.0)), (vec![0, 0], vec![0, 0], c(-1.0, 0.0))],
        )
        .unwrap();
        let eta = vec![c(0.0, 0.0); 2];
        let v = vec![c(0.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(tau(&rho, &eta, &v, 0.1), Err(Error::Unbounded { .. })));
        assert!(tau(&rho, &eta, &[c(2.0, 0.0), c(0.0, 0.0)], 0.1).is_err());
        assert!(tau(&rho, &eta, &[c(1.0, 0.0), c(0.0, 0.0)], 0.0).is_err());
    }
}
