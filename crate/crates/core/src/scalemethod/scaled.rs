//! Scaled defining functions and diagnostics of their limit.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, inner};
use crate::sampling::stream_rng;
use crate::scalar::C64;
use crate::table::{fmt_f64, Table};

use super::frame::ScalingFrame;
use super::poly::{DefiningFunctionPoly, Key};

#[derive(Clone, Debug)]
pub struct ScaledFunction {
    /// Table of `w -> rho(eta + Σ tau_k w_k e_k) / eps`.
    pub table: DefiningFunctionPoly,
    pub eta: Vec<C64>,
    pub eps: f64,
    pub e: Vec<Vec<C64>>,
    pub tau: Vec<f64>,
}

impl ScaledFunction {
    /// `w = diag(tau)^{-1} U^* (z - eta)`.
    pub fn forward(&self, z: &[C64]) -> Vec<C64> {
        let d: Vec<C64> = z.iter().zip(&self.eta).map(|(a, b)| a - b).collect();
        self.e.iter().zip(&self.tau).map(|(ek, t)| inner(&d, ek) / *t).collect()
    }

    /// `z = eta + Σ tau_k w_k e_k`.
    pub fn inverse(&self, w: &[C64]) -> Vec<C64> {
        let mut z = self.eta.clone();
        for ((ek, t), wk) in self.e.iter().zip(&self.tau).zip(w) {
            for (zi, e) in z.iter_mut().zip(ek) {
                *zi += e * wk * *t;
            }
        }
        z
    }

    pub fn value_at_origin(&self) -> f64 {
        self.table.coeff(&vec![0; self.table.n()], &vec![0; self.table.n()]).re
    }
}

/// Exact composition of `rho` with translation, frame rotation and the
/// dilation `diag(tau)`, divided by `eps`.
pub fn scaled_function(rho: &DefiningFunctionPoly, frame: &ScalingFrame) -> Result<ScaledFunction> {
    let cols: Vec<Vec<C64>> = frame.e.iter().zip(&frame.tau).map(|(e, t)| e.iter().map(|x| x * *t).collect()).collect();
    let table = rho.compose_affine(&frame.eta, &cols, frame.eps)?;
    Ok(ScaledFunction { table, eta: frame.eta.clone(), eps: frame.eps, e: frame.e.clone(), tau: frame.tau.clone() })
}

pub const PSH_TOL: f64 = 1e-8;
pub const PSH_SAMPLES: usize = 500;
/// Box `|Re w_j|, |Im w_j| <= PSH_BOX` sampled for the plurisubharmonicity check.
pub const PSH_BOX: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub keys: Vec<Key>,
    /// `values[i][j]`: coefficient `keys[i]` of scaled function `j`.
    pub values: Vec<Vec<C64>>,
    /// Last successive difference per key.
    pub cauchy: Vec<f64>,
    pub max_drift: f64,
    /// Keys whose last difference exceeds their first (no contraction seen).
    pub diverging: Vec<Key>,
    pub limit: DefiningFunctionPoly,
    pub min_levi: f64,
    pub plurisubharmonic: bool,
    pub degree: u32,
    pub degree_bound: Option<u32>,
    pub degree_ok: bool,
}

impl LimitReport {
    /// Columns `(key, re_1, im_1, ..., cauchy_delta)`.
    pub fn to_table(&self) -> Table {
        let count = self.values.first().map_or(0, Vec::len);
        let mut header = vec!["key".to_string()];
        for j in 1..=count {
            header.push(format!("re_{j}"));
            header.push(format!("im_{j}"));
        }
        header.push("cauchy_delta".into());
        let mut t = Table::new(header);
        for ((k, l), (vals, delta)) in self.keys.iter().zip(self.values.iter().zip(&self.cauchy)) {
            let mut row = vec![format!("K={k:?};L={l:?}")];
            for v in vals {
                row.push(fmt_f64(v.re));
                row.push(fmt_f64(v.im));
            }
            row.push(fmt_f64(*delta));
            t.push(row);
        }
        t
    }
}

pub fn limit_diagnostics(list: &[ScaledFunction], degree_bound: Option<u32>, seed: u64) -> Result<LimitReport> {
    if list.len() < 3 {
        return Err(Error::Argument(format!("need at least 3 scaled functions, got {}", list.len())));
    }
    let n = list[0].table.n();
    if list.iter().any(|s| s.table.n() != n) {
        return Err(Error::Argument("scaled functions have different dimensions".into()));
    }
    let keys: Vec<Key> =
        list.iter().flat_map(|s| s.table.coefficients().keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let values: Vec<Vec<C64>> =
        keys.iter().map(|(k, l)| list.iter().map(|s| s.table.coeff(k, l)).collect()).collect();
    let mut cauchy = Vec::with_capacity(keys.len());
    let mut diverging = Vec::new();
    let mut limit_terms = Vec::new();
    for (key, vals) in keys.iter().zip(&values) {
        let deltas: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let last = *deltas.last().unwrap();
        if last > deltas[0] + 1e-12 {
            diverging.push(key.clone());
        }
        cauchy.push(last);
        limit_terms.push((key.0.clone(), key.1.clone(), aitken(vals)));
    }
    let max_drift = cauchy.iter().copied().fold(0.0, f64::max);
    let limit = hermitian_limit(n, limit_terms)?;
    let mut min_levi = f64::INFINITY;
    for i in 0..PSH_SAMPLES {
        let mut rng = stream_rng(seed, i as u64);
        let w: Vec<C64> =
            (0..n).map(|_| C64::new(rng.gen_range(-PSH_BOX..PSH_BOX), rng.gen_range(-PSH_BOX..PSH_BOX))).collect();
        min_levi = min_levi.min(hermitian_eigenvalues(&limit.levi(&w))[0]);
    }
    let degree = limit.degree();
    Ok(LimitReport {
        keys,
        values,
        cauchy,
        max_drift,
        diverging,
        min_levi,
        plurisubharmonic: min_levi >= -PSH_TOL,
        degree,
        degree_bound,
        degree_ok: degree_bound.map_or(true, |b| degree <= b),
        limit,
    })
}

/// Aitken extrapolation from the last three values; falls back to the last
/// value when the second difference vanishes or the step looks unreliable.
fn aitken(vals: &[C64]) -> C64 {
    let k = vals.len();
    let (x0, x1, x2) = (vals[k - 3], vals[k - 2], vals[k - 1]);
    let denom = x2 - x1 * 2.0 + x0;
    let step = x2 - x1;
    if denom.norm() <= 1e-14 * (x2.norm() + 1.0) {
        return x2;
    }
    let jump = step * step / denom;
    if jump.norm() > 10.0 * step.norm() {
        return x2;
    }
    x2 - jump
}

fn hermitian_limit(n: usize, terms: Vec<(Vec<u32>, Vec<u32>, C64)>) -> Result<DefiningFunctionPoly> {
    // enforce conjugate symmetry exactly before validation
    let map: std::collections::BTreeMap<Key, C64> =
        terms.iter().map(|(k, l, c)| ((k.clone(), l.clone()), *c)).collect();
    let sym = terms
        .into_iter()
        .filter(|(k, l, _)| k <= l)
        .map(|(k, l, c)| {
            let partner = map.get(&(l.clone(), k.clone())).copied().unwrap_or(c.conj());
            let v = (c + partner.conj()) * 0.5;
            let v = if k == l { C64::new(v.re, 0.0) } else { v };
            (k, l, v)
        })
        .filter(|(_, _, v)| *v != C64::new(0.0, 0.0));
    DefiningFunctionPoly::new(n, sym)
}
