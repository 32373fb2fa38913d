//! Boundary scaling: `tau` radii along complex lines, extremal frames,
//! dilated defining functions and diagnostics of their limit.

mod frame;
mod poly;
mod scaled;
mod tau;

pub use frame::{build_frame, build_frame_with, FrameOptions, ScalingFrame};
pub use poly::{DefiningFunctionFile, DefiningFunctionPoly, Key};
pub use scaled::{limit_diagnostics, scaled_function, LimitReport, ScaledFunction, PSH_BOX, PSH_SAMPLES, PSH_TOL};
pub use tau::{tau, tau_detail, tau_on_line, LineTable, TauResult, PHASE_GRID, TAU_CAP};

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::scalar::C64;
use crate::table::{coordinate_cells, coordinate_header, fmt_f64, Table};

/// Largest accepted `max / min` of `tau_n / eps` over a sweep.
pub const TAU_NORMAL_BAND: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct TauNormalReport {
    pub eta: Vec<Vec<C64>>,
    pub eps: Vec<f64>,
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub passed: bool,
}

impl TauNormalReport {
    pub fn to_table(&self) -> Table {
        let n = self.eta.first().map_or(0, Vec::len);
        let mut header = coordinate_header("eta", n);
        header.extend(["eps", "tau_n", "ratio"].map(String::from));
        let mut t = Table::new(header);
        for ((eta, eps), r) in self.eta.iter().zip(&self.eps).zip(&self.ratios) {
            let mut row = coordinate_cells(eta);
            row.push(fmt_f64(*eps));
            row.push(fmt_f64(r * eps));
            row.push(fmt_f64(*r));
            t.push(row);
        }
        t
    }
}

/// `tau_n(eta, eps) / eps` along paired sequences; passes when every ratio
/// is finite and positive and `max / min <= TAU_NORMAL_BAND`.
pub fn check_tau_normal(rho: &DefiningFunctionPoly, etas: &[Vec<C64>], eps: &[f64]) -> Result<TauNormalReport> {
    if etas.len() != eps.len() || etas.is_empty() {
        return Err(Error::Argument(format!("{} base points for {} levels", etas.len(), eps.len())));
    }
    let mut ratios = Vec::with_capacity(eps.len());
    for (eta, &e) in etas.iter().zip(eps) {
        let g = rho.gradient_bar(eta);
        let gn = norm(&g);
        if !(gn > 1e-14) {
            return Err(Error::VanishingGradient { norm: gn });
        }
        let v: Vec<C64> = g.iter().map(|x| x / gn).collect();
        ratios.push(tau(rho, eta, &v, e)? / e);
    }
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let passed = min > 0.0 && max.is_finite() && max / min <= TAU_NORMAL_BAND;
    Ok(TauNormalReport { eta: etas.to_vec(), eps: eps.to_vec(), ratios, min, max, passed })
}
