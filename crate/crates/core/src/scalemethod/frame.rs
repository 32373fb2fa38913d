//! Orthonormal frames with extremal `tau` radii.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{norm, orthonormal_complement, unitarity_defect};
use crate::optimize::{maximize_on_sphere, SphereSearch};
use crate::sampling::{stream_rng, unit_sphere};
use crate::scalar::C64;

use super::poly::DefiningFunctionPoly;
use super::tau::tau_detail;

#[derive(Clone, Copy, Debug)]
pub struct FrameOptions {
    pub starts: usize,
    pub seed: u64,
    pub search: SphereSearch,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self { starts: 32, seed: 0x3a3e, search: SphereSearch { initial_step: 0.3, min_step: 1e-8, max_evals: 4000 } }
    }
}

#[derive(Clone, Debug)]
pub struct ScalingFrame {
    pub eta: Vec<C64>,
    pub eps: f64,
    /// Columns `e_1, ..., e_n`; `e_n` is the normal direction.
    pub e: Vec<Vec<C64>>,
    pub tau: Vec<f64>,
    /// `p_k = eta + tau_k e_k`, on `{ rho = rho(eta) + eps }`.
    pub points: Vec<Vec<C64>>,
    /// Per tangential step: spread (max - min) of the multi-start optima.
    pub start_spread: Vec<f64>,
}

impl ScalingFrame {
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.e)
    }

    /// `tau_1 >= ... >= tau_{n-1}`, up to relative `1e-8`.
    pub fn is_ordered(&self) -> bool {
        let n = self.tau.len();
        self.tau[..n - 1].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-8))
    }

    /// `max_k |rho(p_k) - rho(eta) - eps|`.
    pub fn level_residual(&self, rho: &DefiningFunctionPoly) -> f64 {
        let base = rho.eval(&self.eta) + self.eps;
        self.points.iter().map(|p| (rho.eval(p) - base).abs()).fold(0.0, f64::max)
    }
}

pub fn build_frame(rho: &DefiningFunctionPoly, eta: &[C64], eps: f64) -> Result<ScalingFrame> {
    build_frame_with(rho, eta, eps, FrameOptions::default())
}

/// `e_n` is the normalized `(∂rho/∂z̄_j)`; then, greedily, `e_k` maximizes
/// `tau` over the unit sphere of the complement of the directions found so
/// far. Each `e_k` is rotated so that `p_k` sits at positive real parameter.
pub fn build_frame_with(
    rho: &DefiningFunctionPoly,
    eta: &[C64],
    eps: f64,
    opts: FrameOptions,
) -> Result<ScalingFrame> {
    let n = rho.n();
    check_dim(n, eta.len())?;
    let g = rho.gradient_bar(eta);
    let gn = norm(&g);
    if !(gn > 1e-14) {
        return Err(Error::VanishingGradient { norm: gn });
    }
    let normal: Vec<C64> = g.iter().map(|x| x / gn).collect();
    let tn = tau_detail(rho, eta, &normal, eps)?;
    let normal = rotate(&normal, tn.phase);

    let mut extra: Vec<Option<Vec<C64>>> = vec![None; n.saturating_sub(1)];
    let mut restarts = 0;
    'greedy: loop {
        let mut found = vec![normal.clone()];
        let mut tangential: Vec<(Vec<C64>, f64)> = Vec::new();
        let mut spread = Vec::new();
        for k in 0..n - 1 {
            let basis = orthonormal_complement(&found, n);
            let (v, value, sp) = best_direction(rho, eta, eps, &basis, extra[k].as_deref(), k, &opts)?;
            if let Some((_, prev)) = tangential.last() {
                if value > prev * (1.0 + 1e-8) {
                    restarts += 1;
                    if restarts > n {
                        return Err(Error::NonConvergence(format!(
                            "tau ordering violated at step {} after {} reseeds (best iterate {value})",
                            k + 1,
                            restarts - 1
                        )));
                    }
                    extra[k - 1] = Some(v);
                    continue 'greedy;
                }
            }
            let t = tau_detail(rho, eta, &v, eps)?;
            let v = rotate(&v, t.phase);
            found.push(v.clone());
            tangential.push((v, value));
            spread.push(sp);
        }
        let mut e: Vec<Vec<C64>> = tangential.iter().map(|(v, _)| v.clone()).collect();
        let mut tau: Vec<f64> = tangential.iter().map(|(_, t)| *t).collect();
        e.push(normal.clone());
        tau.push(tn.tau);
        let points = e.iter().zip(&tau).map(|(v, t)| eta.iter().zip(v).map(|(a, b)| a + b * *t).collect()).collect();
        return Ok(ScalingFrame { eta: eta.to_vec(), eps, e, tau, points, start_spread: spread });
    }
}

fn rotate(v: &[C64], phase: f64) -> Vec<C64> {
    let u = C64::from_polar(1.0, phase);
    v.iter().map(|x| x * u).collect()
}

fn combine(basis: &[Vec<C64>], gamma: &[C64]) -> Vec<C64> {
    let n = basis[0].len();
    (0..n).map(|i| basis.iter().zip(gamma).map(|(b, g)| b[i] * g).sum()).collect()
}

/// Maximizer of `tau` over unit vectors in span(`basis`): value and the
/// spread of the multi-start optima.
fn best_direction(
    rho: &DefiningFunctionPoly,
    eta: &[C64],
    eps: f64,
    basis: &[Vec<C64>],
    extra: Option<&[C64]>,
    step: usize,
    opts: &FrameOptions,
) -> Result<(Vec<C64>, f64, f64)> {
    let d = basis.len();
    let objective = |gamma: &[C64]| {
        let v = combine(basis, gamma);
        tau_detail(rho, eta, &v, eps).map(|t| t.tau).unwrap_or(f64::NAN)
    };
    if d == 1 {
        // tau is invariant under v -> e^{i a} v
        let v = basis[0].clone();
        let t = tau_detail(rho, eta, &v, eps)?;
        return Ok((v, t.tau, 0.0));
    }
    let mut starts: Vec<Vec<C64>> = (0..opts.starts)
        .map(|s| unit_sphere(&mut stream_rng(opts.seed, (step * 1024 + s) as u64), d))
        .collect();
    if let Some(v) = extra {
        starts.push(basis.iter().map(|b| crate::linalg::inner(v, b)).collect());
    }
    let mut best: Option<(Vec<C64>, f64)> = None;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &starts {
        let opt = maximize_on_sphere(objective, s, opts.search);
        if !opt.value.is_finite() {
            continue;
        }
        lo = lo.min(opt.value);
        hi = hi.max(opt.value);
        if best.as_ref().map_or(true, |(_, v)| opt.value > *v) {
            best = Some((opt.point, opt.value));
        }
    }
    let (gamma, _) = best.ok_or_else(|| {
        Error::NonConvergence(format!("no finite tau from any start at tangential step {}", step + 1))
    })?;
    let v = combine(basis, &gamma);
    let v: Vec<C64> = {
        let nv = norm(&v);
        v.iter().map(|x| x / nv).collect()
    };
    let t = tau_detail(rho, eta, &v, eps)?;
    Ok((v, t.tau, hi - lo))
}
