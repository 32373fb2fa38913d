//! Generalized ellipsoids `D_P = { |z_n|^2 + P(z') < 1 }`, the subdomains
//! `D_P^{s,r} = { |z_n - b|^2 + (s/r) P(z') < s^2 }` with `b = 1 - s`, radial
//! boundary sampling and Levi-form scans.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{hermitian_eigenvalues, norm, orthonormal_complement, restrict_form, symmetric_eigenvalues};
use crate::optimize::{maximize_on_sphere, SphereSearch};
use crate::roots::{bisect, bracket_first_crossing};
use crate::sampling::{stream_rng, unit_sphere};
use crate::scalar::{Scalar, C64};
use crate::table::{coordinate_cells, coordinate_header, fmt_f64, Table};
use crate::wpoly::WeightedPolynomial;

/// Samples used by the construction-time positivity check.
pub const POSITIVITY_SAMPLES: usize = 4096;
const POSITIVITY_SEED: u64 = 0x5eed_0001;
const RADIUS_SAMPLES: usize = 4096;
const RADIUS_SEED: u64 = 0x5eed_0002;
/// Relative safety margin of [`GeneralEllipsoid::bounding_radius`].
pub const RADIUS_MARGIN: f64 = 0.01;
pub const BOUNDARY_RESIDUAL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct GeneralEllipsoid {
    p: WeightedPolynomial,
}

impl GeneralEllipsoid {
    /// Rejects `P` that fails the seeded positivity scan.
    pub fn new(p: WeightedPolynomial) -> Result<Self> {
        let report = p.positivity_scan(POSITIVITY_SAMPLES, POSITIVITY_SEED);
        if !report.passed {
            return Err(Error::Degenerate { min: report.min, samples: report.samples });
        }
        Ok(Self { p })
    }

    /// The unit ball of `C^n`.
    pub fn ball(n: usize) -> Result<Self> {
        Self::new(WeightedPolynomial::ball(n)?)
    }

    /// `E_{1,m} = { |z_2|^2 + |z_1|^{2m} < 1 }` and its higher-dimensional
    /// power-sum analogues.
    pub fn power_sum(m: Vec<u32>) -> Result<Self> {
        Self::new(WeightedPolynomial::power_sum(m)?)
    }

    pub fn polynomial(&self) -> &WeightedPolynomial {
        &self.p
    }

    pub fn n(&self) -> usize {
        self.p.weights().n()
    }

    /// `rho(z) = |z_n|^2 - 1 + P(z')`.
    pub fn rho(&self, z: &[C64]) -> f64 {
        self.rho_in(z)
    }

    pub fn rho_in<T: Scalar>(&self, z: &[Complex<T>]) -> T {
        assert_eq!(z.len(), self.n(), "point has the wrong dimension");
        let (zp, zn) = z.split_at(self.n() - 1);
        zn[0].norm_sqr() - T::one() + self.p.eval_in(zp)
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        self.rho(z) < 0.0
    }

    /// `|z_n - b|^2 + (s/r) P(z') - s^2`, negative exactly on `D_P^{s,r}`.
    pub fn sub_defining(&self, sp: &SubdomainParams, z: &[C64]) -> f64 {
        self.sub_defining_in(sp, z)
    }

    pub fn sub_defining_in<T: Scalar>(&self, sp: &SubdomainParams, z: &[Complex<T>]) -> T {
        let (zp, zn) = z.split_at(self.n() - 1);
        let s = T::lit(sp.s);
        (zn[0] - T::lit(sp.b())).norm_sqr() + s.quot(T::lit(sp.r)) * self.p.eval_in(zp) - s * s
    }

    pub fn contains_sub(&self, sp: &SubdomainParams, z: &[C64]) -> bool {
        self.sub_defining(sp, z) < 0.0
    }

    /// `(d rho / d z_1, ..., d rho / d z_n)`.
    pub fn gradient(&self, z: &[C64]) -> Vec<C64> {
        let (zp, zn) = z.split_at(self.n() - 1);
        let mut g = self.p.gradient(zp);
        g.push(zn[0].conj());
        g
    }

    /// `d^2 rho / dz_j d conj(z_k)`.
    pub fn levi_matrix(&self, z: &[C64]) -> DMatrix<C64> {
        let n = self.n();
        let mut h = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        h.view_mut((0, 0), (n - 1, n - 1)).copy_from(&self.p.complex_hessian(&z[..n - 1]));
        h[(n - 1, n - 1)] = C64::new(1.0, 0.0);
        h
    }

    /// `d^2 rho / dz_j dz_k`.
    pub fn holomorphic_hessian(&self, z: &[C64]) -> DMatrix<C64> {
        let n = self.n();
        let mut h = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        h.view_mut((0, 0), (n - 1, n - 1)).copy_from(&self.p.holomorphic_hessian(&z[..n - 1]));
        h
    }

    /// Outward unit normal `conj(d rho / dz) / |d rho / dz|`.
    pub fn unit_normal(&self, z: &[C64]) -> Result<Vec<C64>> {
        let g = self.gradient(z);
        let gn = norm(&g);
        if !(gn > 1e-14) {
            return Err(Error::VanishingGradient { norm: gn });
        }
        Ok(g.iter().map(|c| c.conj() / gn).collect())
    }

    /// First-order distance to the boundary, `|rho| / |grad_R rho|`.
    pub fn boundary_distance_estimate(&self, z: &[C64]) -> f64 {
        self.rho(z).abs() / (2.0 * norm(&self.gradient(z)))
    }

    /// Coefficients of `t -> rho(t u)` for a direction `u`, indexed by degree.
    fn ray_profile(&self, u: &[C64]) -> Vec<f64> {
        let (up, un) = u.split_at(self.n() - 1);
        let mut c = self.p.radial_profile(up);
        if c.len() < 3 {
            c.resize(3, 0.0);
        }
        c[0] -= 1.0;
        c[2] += un[0].norm_sqr();
        c
    }

    /// Smallest `t > 0` with `rho(t u) = 0`, or `None` within the search cap.
    pub fn ray_root(&self, u: &[C64]) -> Option<f64> {
        let c = self.ray_profile(u);
        let h = |t: f64| c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck);
        let grid = (0..).map(|k| 1e-3 * 1.05f64.powi(k)).take_while(|&t| t <= 1e4);
        let (lo, hi) = bracket_first_crossing(h, grid)?;
        Some(bisect(h, lo, hi, 1e-12 * hi.max(1.0)))
    }

    fn boundary_point_along(&self, u: &[C64]) -> Option<BoundaryPoint> {
        let t = self.ray_root(u)?;
        let z: Vec<C64> = u.iter().map(|c| c * t).collect();
        let residual = self.rho(&z).abs();
        (residual <= BOUNDARY_RESIDUAL).then_some(BoundaryPoint { z, residual })
    }

    /// `count` boundary points along seeded uniform directions; sample `i`
    /// draws from stream `i`, redrawing on that stream if a ray fails.
    pub fn boundary_sample(&self, count: usize, seed: u64) -> Vec<BoundaryPoint> {
        (0..count).map(|i| self.boundary_sample_at(seed, i as u64)).collect()
    }

    pub fn boundary_sample_at(&self, seed: u64, index: u64) -> BoundaryPoint {
        let mut rng = stream_rng(seed, index);
        loop {
            let u = unit_sphere(&mut rng, self.n());
            if let Some(bp) = self.boundary_point_along(&u) {
                return bp;
            }
        }
    }

    /// Largest `|z|` over `count` boundary samples, refined by local ascent
    /// over ray directions. Returns the value and the maximizing point.
    pub fn max_boundary_norm(&self, count: usize, seed: u64) -> (f64, Vec<C64>) {
        let samples = self.boundary_sample(count, seed);
        let best = samples
            .iter()
            .max_by(|a, b| norm(&a.z).total_cmp(&norm(&b.z)))
            .expect("count >= 1");
        let opts = SphereSearch { initial_step: 0.05, min_step: 1e-10, max_evals: 20_000 };
        let opt = maximize_on_sphere(|u| self.ray_root(u).unwrap_or(f64::NAN), &best.z, opts);
        let start = norm(&best.z);
        if opt.value > start {
            let z = opt.point.iter().map(|c| c * opt.value).collect();
            (opt.value, z)
        } else {
            (start, best.z.clone())
        }
    }

    /// `R` with `D_P` inside the ball of radius `R`: refined sampled
    /// maximum of `|z|` on the boundary plus a 1% margin.
    pub fn bounding_radius(&self) -> f64 {
        (1.0 + RADIUS_MARGIN) * self.max_boundary_norm(RADIUS_SAMPLES, RADIUS_SEED).0
    }

    /// Smallest eigenvalue of the Levi form on the complex tangent space.
    pub fn levi_min_eig(&self, xi: &[C64]) -> Result<f64> {
        check_dim(self.n(), xi.len())?;
        let g = self.gradient(xi);
        let gn = norm(&g);
        if !(gn > 1e-14) {
            return Err(Error::VanishingGradient { norm: gn });
        }
        let normal: Vec<C64> = g.iter().map(|c| c.conj()).collect();
        let basis = orthonormal_complement(&[normal], self.n());
        let restricted = restrict_form(&self.levi_matrix(xi), &basis);
        Ok(hermitian_eigenvalues(&restricted)[0])
    }

    /// Smallest normal curvature of the boundary at `xi` over real tangent
    /// directions (second fundamental form divided by `|grad_R rho|`).
    pub fn min_normal_curvature(&self, xi: &[C64]) -> Result<f64> {
        check_dim(self.n(), xi.len())?;
        let g = self.gradient(xi);
        let gn = norm(&g);
        if !(gn > 1e-14) {
            return Err(Error::VanishingGradient { norm: gn });
        }
        let n = self.n();
        let normal: Vec<f64> = g.iter().flat_map(|c| [c.re / gn, -c.im / gn]).collect();
        let basis = real_orthonormal_complement(&normal, 2 * n);
        let as_complex =
            |x: &[f64]| -> Vec<C64> { (0..n).map(|j| C64::new(x[2 * j], x[2 * j + 1])).collect() };
        let vs: Vec<Vec<C64>> = basis.iter().map(|b| as_complex(b)).collect();
        let hol = self.holomorphic_hessian(xi);
        let levi = self.levi_matrix(xi);
        let bilinear = |v: &[C64], w: &[C64]| -> f64 {
            let mut acc = C64::new(0.0, 0.0);
            let mut herm = C64::new(0.0, 0.0);
            for j in 0..n {
                for k in 0..n {
                    acc += v[j] * hol[(j, k)] * w[k];
                    herm += v[j].conj() * levi[(j, k)] * w[k];
                }
            }
            2.0 * acc.re + 2.0 * herm.re
        };
        let q = DMatrix::from_fn(vs.len(), vs.len(), |a, b| bilinear(&vs[a], &vs[b]));
        Ok(symmetric_eigenvalues(&q)[0] / (2.0 * gn))
    }

    /// Minimum Levi eigenvalue over seeded boundary samples with `|z'| >= tube`.
    pub fn wb_scan(&self, count: usize, seed: u64, tube: f64) -> WbReport {
        let mut report = WbReport {
            min_levi: f64::INFINITY,
            argmin: Vec::new(),
            used: 0,
            excluded: 0,
            tube,
            passed: false,
        };
        for bp in self.boundary_sample(count, seed) {
            if norm(&bp.z[..self.n() - 1]) < tube {
                report.excluded += 1;
                continue;
            }
            let Ok(l) = self.levi_min_eig(&bp.z) else {
                report.excluded += 1;
                continue;
            };
            report.used += 1;
            if l < report.min_levi {
                report.min_levi = l;
                report.argmin = bp.z;
            }
        }
        report.passed = report.used > 0 && report.min_levi > 0.0;
        report
    }

    /// Boundary samples with their Levi minima, columns
    /// `re_z1, im_z1, ..., residual, levi_min`.
    pub fn boundary_table(&self, points: &[BoundaryPoint]) -> Table {
        let mut header = coordinate_header("z", self.n());
        header.push("residual".into());
        header.push("levi_min".into());
        let mut t = Table::new(header);
        for bp in points {
            let mut row = coordinate_cells(&bp.z);
            row.push(fmt_f64(bp.residual));
            row.push(fmt_f64(self.levi_min_eig(&bp.z).unwrap_or(f64::NAN)));
            t.push(row);
        }
        t
    }
}

fn real_orthonormal_complement(normal: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut basis = vec![normal.to_vec()];
    let mut out = Vec::new();
    for j in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nv = dot(&v, &v).sqrt();
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v.clone());
            out.push(v);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubdomainParams {
    pub s: f64,
    pub r: f64,
}

impl SubdomainParams {
    pub fn new(s: f64, r: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Argument(format!("s must lie in (0, 1], got {s}")));
        }
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Argument(format!("r must lie in (0, 1], got {r}")));
        }
        Ok(Self { s, r })
    }

    /// `D_P^s = D_P^{s,1}`.
    pub fn horosphere(s: f64) -> Result<Self> {
        Self::new(s, 1.0)
    }

    pub fn b(&self) -> f64 {
        1.0 - self.s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub z: Vec<C64>,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct WbReport {
    pub min_levi: f64,
    pub argmin: Vec<C64>,
    pub used: usize,
    pub excluded: usize,
    pub tube: f64,
    pub passed: bool,
}

/// A domain given by a defining function, negative inside, contained in
/// a host ellipsoid. Squeezing estimates only need this interface.
pub trait Region: Sync {
    fn host(&self) -> &GeneralEllipsoid;

    fn defining(&self, z: &[C64]) -> f64;

    /// True when every automorphism of the host maps the region onto itself.
    fn host_invariant(&self) -> bool;

    fn label(&self) -> String;

    fn contains(&self, z: &[C64]) -> bool {
        self.defining(z) < 0.0
    }
}

impl Region for GeneralEllipsoid {
    fn host(&self) -> &GeneralEllipsoid {
        self
    }

    fn defining(&self, z: &[C64]) -> f64 {
        self.rho(z)
    }

    fn host_invariant(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        format!("D_P(m={:?})", self.p.weights().exponents())
    }
}

/// `D_P ∩ { Re z_n > -cut }`: agrees with `D_P` near `(0', 1)` but is not
/// invariant under the automorphisms of `D_P`.
#[derive(Clone, Debug)]
pub struct CappedEllipsoid {
    pub host: GeneralEllipsoid,
    pub cut: f64,
}

impl CappedEllipsoid {
    pub fn new(host: GeneralEllipsoid, cut: f64) -> Result<Self> {
        if !(cut > -1.0 && cut < 1.0) {
            return Err(Error::Argument(format!("cut must lie in (-1, 1), got {cut}")));
        }
        Ok(Self { host, cut })
    }
}

impl Region for CappedEllipsoid {
    fn host(&self) -> &GeneralEllipsoid {
        &self.host
    }

    fn defining(&self, z: &[C64]) -> f64 {
        let n = self.host.n();
        self.host.rho(z).max(-self.cut - z[n - 1].re)
    }

    fn host_invariant(&self) -> bool {
        false
    }

    fn label(&self) -> String {
        format!("{} cut at Re z_n > {}", self.host.label(), -self.cut)
    }
}
