//! Automorphisms of `D_P` moving `z_n` by a disk Möbius map:
//!
//! `z_k -> (1 - |a|^2)^{1/(2 m_k)} z_k / (1 + conj(c) z_n)^{1/m_k}`,
//! `z_n -> e^{i theta} (z_n + c) / (1 + conj(c) z_n)`, with `c = +a` or `c = -a`.
//!
//! All fractional powers use the principal branch, which is continuous on
//! the closure because `Re(1 + conj(c) z_n) >= 1 - |a| > 0` there.

use num_complex::Complex;

use crate::domain::GeneralEllipsoid;
use crate::error::{check_dim, Error, Result};
use crate::scalar::{Scalar, C64};
use crate::wpoly::MultiWeight;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MobiusSign {
    /// `(z_n + a) / (1 + conj(a) z_n)`, pushing the origin to `a`.
    Plus,
    /// `(z_n - a) / (1 - conj(a) z_n)`, sending `a` to the origin.
    Minus,
}

impl MobiusSign {
    fn flipped(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }

    fn factor(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidAutomorphism {
    a: C64,
    theta: f64,
    sign: MobiusSign,
}

impl EllipsoidAutomorphism {
    pub fn new(a: C64, theta: f64, sign: MobiusSign) -> Result<Self> {
        if !(a.norm() < 1.0) {
            return Err(Error::Parameter(a.norm()));
        }
        Ok(Self { a, theta, sign })
    }

    /// Default convention: the `Minus` map, which sends `z_n = a` to 0.
    pub fn with_default_sign(a: C64, theta: f64) -> Result<Self> {
        Self::new(a, theta, MobiusSign::Minus)
    }

    pub fn identity() -> Self {
        Self { a: C64::new(0.0, 0.0), theta: 0.0, sign: MobiusSign::Minus }
    }

    /// Pure rotation `z_n -> e^{i theta} z_n`.
    pub fn rotation(theta: f64) -> Self {
        Self { a: C64::new(0.0, 0.0), theta, sign: MobiusSign::Minus }
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sign(&self) -> MobiusSign {
        self.sign
    }

    fn c(&self) -> C64 {
        self.a * self.sign.factor()
    }

    /// `R_theta ∘ M_c` is inverted by `R_0 ∘ M_{-c e^{i theta}}` followed by
    /// `R_{-theta}`, which has the same form with parameter `a e^{i theta}`.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.a * C64::from_polar(1.0, self.theta),
            theta: -self.theta,
            sign: self.sign.flipped(),
        }
    }

    pub fn apply(&self, weights: &MultiWeight, z: &[C64]) -> Result<Vec<C64>> {
        check_dim(weights.n(), z.len())?;
        Ok(self.apply_unchecked(weights.exponents(), z))
    }

    pub fn apply_to(&self, d: &GeneralEllipsoid, z: &[C64]) -> Result<Vec<C64>> {
        self.apply(d.polynomial().weights(), z)
    }

    pub(crate) fn apply_unchecked(&self, m: &[u32], z: &[C64]) -> Vec<C64> {
        let n = m.len() + 1;
        let c = self.c();
        let zn = z[n - 1];
        let denom = 1.0 + c.conj() * zn;
        let lambda = 1.0 - self.a.norm_sqr();
        let mut out = Vec::with_capacity(n);
        for (zk, &mk) in z.iter().zip(m) {
            let num = lambda.real_root(2 * mk);
            out.push(zk * num / principal_root(denom, mk));
        }
        out.push(C64::from_polar(1.0, self.theta) * (zn + c) / denom);
        out
    }

    /// Exact value of `factor_k^{m_k}`, `(1 - |a|^2)^{1/2} / (1 + conj(c) z_n)`,
    /// for branch checks.
    pub fn factor_power(&self, zn: C64) -> C64 {
        (1.0 - self.a.norm_sqr()).sqrt() / (1.0 + self.c().conj() * zn)
    }

    /// The multiplier of `z_k` at `z_n`.
    pub fn factor(&self, mk: u32, zn: C64) -> C64 {
        (1.0 - self.a.norm_sqr()).real_root(2 * mk) / principal_root(1.0 + self.c().conj() * zn, mk)
    }
}

/// Principal `m`-th root.
pub fn principal_root(w: C64, m: u32) -> C64 {
    match m {
        1 => w,
        2 => w.sqrt(),
        _ => C64::from_polar(w.norm().real_root(m), w.arg() / f64::from(m)),
    }
}

/// Result of moving a point to the slice `{z_n = 0}`.
#[derive(Clone, Debug)]
pub struct NormalizedPoint<T: Scalar = f64> {
    /// Rotation making `e^{i theta} q_n` real and non-negative.
    pub theta: f64,
    /// `|q_n|`, the real Möbius parameter after rotation.
    pub a: T,
    /// `1 - a^2`.
    pub lambda: T,
    /// Slice point `(b', 0)` with `b_k = q_k / lambda^{1/(2 m_k)}`.
    pub b: Vec<Complex<T>>,
    /// Automorphism sending `q` to `(b', 0)`.
    pub automorphism: EllipsoidAutomorphism,
}

/// Sends `q ∈ D_P` to the slice: `psi(q) = (q' / lambda^{1/(2m)}, 0)`.
pub fn normalize_point(d: &GeneralEllipsoid, q: &[C64]) -> Result<NormalizedPoint> {
    normalize_point_in(d, q)
}

/// [`normalize_point`] carried out in the scalar type `T`, for points so
/// close to the boundary that `1 - |q_n|^2` cancels in double precision.
pub fn normalize_point_in<T: Scalar>(d: &GeneralEllipsoid, q: &[Complex<T>]) -> Result<NormalizedPoint<T>> {
    check_dim(d.n(), q.len())?;
    let value = d.rho_in(q);
    if !(value < T::zero()) {
        return Err(Error::OutsideDomain { value: value.as_f64() });
    }
    let n = d.n();
    let qn = q[n - 1];
    let a = qn.norm();
    let lambda = T::one() - qn.norm_sqr();
    let theta = if a == T::zero() { 0.0 } else { -qn.arg().as_f64() };
    let m = d.polynomial().weights().exponents();
    let mut b: Vec<Complex<T>> = q[..n - 1]
        .iter()
        .zip(m)
        .map(|(qk, &mk)| {
            let l = lambda.real_root(2 * mk);
            Complex::new(qk.re.quot(l), qk.im.quot(l))
        })
        .collect();
    b.push(Complex::new(T::zero(), T::zero()));
    let automorphism = EllipsoidAutomorphism::new(
        C64::new(qn.re.as_f64(), qn.im.as_f64()),
        theta,
        MobiusSign::Minus,
    )?;
    Ok(NormalizedPoint { theta, a, lambda, b, automorphism })
}

/// Coefficients of the pulled-back subdomain
/// `psi_a^{-1}(D_P^s) = { |z_n - c1|^2 + c2 P(z') < c3 }` for the `Plus`
/// map with real `a`, where `b = 1 - s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PullbackCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

pub fn pullback_coeffs(b: f64, a: f64) -> Result<PullbackCoeffs> {
    if !(0.0..1.0).contains(&b) {
        return Err(Error::Argument(format!("b must lie in [0, 1), got {b}")));
    }
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Argument(format!("a must lie in [0, 1), got {a}")));
    }
    let d = 1.0 + a - 2.0 * a * b;
    let c1 = b * (1.0 - a) / d;
    let c2 = (1.0 - b) * (1.0 + a) / d;
    let c3 = (1.0 + a - 2.0 * b) / d + c1 * c1;
    Ok(PullbackCoeffs { c1, c2, c3 })
}
