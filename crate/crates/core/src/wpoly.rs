//! Weighted homogeneous Hermitian polynomials
//! `P(z') = sum a_{KL} z'^K conj(z')^L` with `wt(K) = wt(L) = 1/2`, where
//! `wt(K) = sum k_j / (2 m_j)` for the multi-weight `(1/m_1, ..., 1/m_{n-1})`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::sampling::{stream_rng, unit_sphere};
use crate::scalar::{lift_c, Scalar, C64};

pub type MultiIndex = Vec<u32>;

/// Exponents `(m_1, ..., m_{n-1})`; the ambient dimension is `n = len + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiWeight {
    m: Vec<u32>,
}

impl MultiWeight {
    pub fn new(m: Vec<u32>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::Argument("multi-weight needs n - 1 >= 1 exponents".into()));
        }
        if m.iter().any(|&mj| mj == 0) {
            return Err(Error::Argument(format!("exponents must be positive integers, got {m:?}")));
        }
        Ok(Self { m })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.m
    }

    /// Number of tangential variables, `n - 1`.
    pub fn tangential_dim(&self) -> usize {
        self.m.len()
    }

    /// Ambient complex dimension `n`.
    pub fn n(&self) -> usize {
        self.m.len() + 1
    }

    /// Exact weight `sum k_j / (2 m_j)` of a multi-index.
    pub fn weight(&self, k: &[u32]) -> Result<Ratio<u64>> {
        check_dim(self.m.len(), k.len())?;
        Ok(k.iter()
            .zip(&self.m)
            .map(|(&kj, &mj)| Ratio::new(u64::from(kj), 2 * u64::from(mj)))
            .sum())
    }

    /// Anisotropic dilation `(t^{1/(2 m_1)} z_1, ..., t^{1/(2 m_{n-1})} z_{n-1})`.
    pub fn dilate<T: Scalar>(&self, t: T, zp: &[Complex<T>]) -> Vec<Complex<T>> {
        zp.iter()
            .zip(&self.m)
            .map(|(z, &mj)| *z * t.real_root(2 * mj))
            .collect()
    }
}

/// Free-function form of [`MultiWeight::weight`].
pub fn weight(k: &[u32], w: &MultiWeight) -> Result<Ratio<u64>> {
    w.weight(k)
}

/// One coefficient of the table, listed once per unordered pair `{K, L}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub k: MultiIndex,
    pub l: MultiIndex,
    pub coeff: C64,
}

impl Term {
    pub fn new(k: MultiIndex, l: MultiIndex, coeff: C64) -> Self {
        Self { k, l, coeff }
    }

    pub fn real(k: MultiIndex, l: MultiIndex, coeff: f64) -> Self {
        Self::new(k, l, C64::new(coeff, 0.0))
    }
}

#[derive(Clone, Debug)]
struct Monomial {
    k: MultiIndex,
    l: MultiIndex,
    a: C64,
}

#[derive(Clone, Debug)]
pub struct WeightedPolynomial {
    weights: MultiWeight,
    table: BTreeMap<(MultiIndex, MultiIndex), C64>,
    monomials: Vec<Monomial>,
}

impl WeightedPolynomial {
    /// Validates admissibility (exact `wt = 1/2`) and materializes the
    /// Hermitian closure `a_{LK} = conj(a_{KL})`.
    pub fn new(weights: MultiWeight, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        let half = Ratio::new(1u64, 2);
        let mut table = BTreeMap::new();
        for term in terms {
            let wk = weights.weight(&term.k)?;
            let wl = weights.weight(&term.l)?;
            if wk != half || wl != half {
                return Err(Error::Validation(format!(
                    "term K={:?} L={:?} has weights ({wk}, {wl}), expected (1/2, 1/2)",
                    term.k, term.l
                )));
            }
            if !term.coeff.re.is_finite() || !term.coeff.im.is_finite() {
                return Err(Error::Validation(format!("non-finite coefficient for K={:?} L={:?}", term.k, term.l)));
            }
            if term.k == term.l && term.coeff.im != 0.0 {
                return Err(Error::Validation(format!(
                    "diagonal coefficient a_KK for K={:?} must be real, got {}",
                    term.k, term.coeff
                )));
            }
            let key = (term.k.clone(), term.l.clone());
            if table.contains_key(&key) {
                return Err(Error::Validation(format!(
                    "pair K={:?} L={:?} listed more than once",
                    term.k, term.l
                )));
            }
            table.insert(key, term.coeff);
            if term.k != term.l {
                table.insert((term.l, term.k), term.coeff.conj());
            }
        }
        let monomials = table
            .iter()
            .filter(|(_, a)| **a != C64::new(0.0, 0.0))
            .map(|((k, l), a)| Monomial { k: k.clone(), l: l.clone(), a: *a })
            .collect();
        Ok(Self { weights, table, monomials })
    }

    /// `P(z') = sum_j |z_j|^{2 m_j}`.
    pub fn power_sum(m: Vec<u32>) -> Result<Self> {
        let weights = MultiWeight::new(m)?;
        let d = weights.tangential_dim();
        let terms = (0..d).map(|j| {
            let mut k = vec![0; d];
            k[j] = weights.exponents()[j];
            Term::real(k.clone(), k, 1.0)
        });
        Self::new(weights.clone(), terms.collect::<Vec<_>>())
    }

    /// `P(z') = |z'|^2`, for which `D_P` is the unit ball of `C^n`.
    pub fn ball(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument("ball needs n >= 2".into()));
        }
        Self::power_sum(vec![1; n - 1])
    }

    pub fn weights(&self) -> &MultiWeight {
        &self.weights
    }

    pub fn tangential_dim(&self) -> usize {
        self.weights.tangential_dim()
    }

    /// Full Hermitian table, both `(K, L)` and `(L, K)` present.
    pub fn coefficients(&self) -> &BTreeMap<(MultiIndex, MultiIndex), C64> {
        &self.table
    }

    pub fn coeff(&self, k: &[u32], l: &[u32]) -> C64 {
        self.table
            .get(&(k.to_vec(), l.to_vec()))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Terms once per unordered pair, suitable for re-ingestion.
    pub fn terms(&self) -> Vec<Term> {
        self.table
            .iter()
            .filter(|((k, l), _)| k <= l)
            .map(|((k, l), a)| Term::new(k.clone(), l.clone(), *a))
            .collect()
    }

    /// The raw Hermitian sum including its (round-off) imaginary part.
    pub fn hermitian_sum<T: Scalar>(&self, zp: &[Complex<T>]) -> Complex<T> {
        assert_eq!(zp.len(), self.tangential_dim(), "z' has the wrong length");
        let mut acc = Complex::new(T::zero(), T::zero());
        for mono in &self.monomials {
            acc = acc + lift_c::<T>(mono.a) * monomial(zp, &mono.k) * monomial(zp, &mono.l).conj();
        }
        acc
    }

    /// `Im` bound scale `1 + sum |a_{KL}| |z'|^{|K|+|L|}` for the realness check.
    pub fn realness_scale(&self, zp: &[C64]) -> f64 {
        let r = crate::linalg::norm(zp);
        1.0 + self
            .monomials
            .iter()
            .map(|m| m.a.norm() * r.powi((degree(&m.k) + degree(&m.l)) as i32))
            .sum::<f64>()
    }

    pub fn eval(&self, zp: &[C64]) -> f64 {
        self.hermitian_sum(zp).re
    }

    pub fn eval_in<T: Scalar>(&self, zp: &[Complex<T>]) -> T {
        self.hermitian_sum(zp).re
    }

    /// `P(delta_t z')`, which equals `t P(z')` by weighted homogeneity.
    pub fn weighted_dilate(&self, t: f64, zp: &[C64]) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Argument(format!("dilation factor must be positive, got {t}")));
        }
        check_dim(self.tangential_dim(), zp.len())?;
        Ok(self.eval(&self.weights.dilate(t, zp)))
    }

    /// Coefficients `c_d` with `P(t u) = sum_d c_d t^d` for real `t`, indexed by degree.
    pub fn radial_profile(&self, u: &[C64]) -> Vec<f64> {
        let top = self
            .monomials
            .iter()
            .map(|m| (degree(&m.k) + degree(&m.l)) as usize)
            .max()
            .unwrap_or(0);
        let mut c = vec![0.0; top + 1];
        for m in &self.monomials {
            let d = (degree(&m.k) + degree(&m.l)) as usize;
            c[d] += (m.a * monomial(u, &m.k) * monomial(u, &m.l).conj()).re;
        }
        c
    }

    /// Largest total degree `|K| + |L|` present.
    pub fn degree(&self) -> u32 {
        self.monomials.iter().map(|m| degree(&m.k) + degree(&m.l)).max().unwrap_or(0)
    }

    /// `(dP/dz_1, ..., dP/dz_{n-1})`.
    pub fn gradient(&self, zp: &[C64]) -> Vec<C64> {
        let d = self.tangential_dim();
        let mut g = vec![C64::new(0.0, 0.0); d];
        for mono in &self.monomials {
            let zl = monomial(zp, &mono.l).conj();
            for j in 0..d {
                if mono.k[j] == 0 {
                    continue;
                }
                let mut kj = mono.k.clone();
                kj[j] -= 1;
                g[j] += mono.a * f64::from(mono.k[j]) * monomial(zp, &kj) * zl;
            }
        }
        g
    }

    /// Levi matrix `H_{jk} = d^2 P / dz_j d conj(z_k)`, Hermitian by construction.
    pub fn complex_hessian(&self, zp: &[C64]) -> DMatrix<C64> {
        let d = self.tangential_dim();
        let mut h = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for mono in &self.monomials {
            for j in 0..d {
                if mono.k[j] == 0 {
                    continue;
                }
                let mut kj = mono.k.clone();
                kj[j] -= 1;
                let zk = monomial(zp, &kj);
                for k in j..d {
                    if mono.l[k] == 0 {
                        continue;
                    }
                    let mut lk = mono.l.clone();
                    lk[k] -= 1;
                    h[(j, k)] += mono.a * f64::from(mono.k[j] * mono.l[k]) * zk * monomial(zp, &lk).conj();
                }
            }
        }
        for j in 0..d {
            h[(j, j)] = C64::new(h[(j, j)].re, 0.0);
            for k in j + 1..d {
                h[(k, j)] = h[(j, k)].conj();
            }
        }
        h
    }

    /// Holomorphic second derivatives `d^2 P / dz_j dz_k` (symmetric).
    pub fn holomorphic_hessian(&self, zp: &[C64]) -> DMatrix<C64> {
        let d = self.tangential_dim();
        let mut h = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for mono in &self.monomials {
            let zl = monomial(zp, &mono.l).conj();
            for j in 0..d {
                for k in j..d {
                    let mut kk = mono.k.clone();
                    let c = if j == k {
                        if kk[j] < 2 {
                            continue;
                        }
                        let c = kk[j] * (kk[j] - 1);
                        kk[j] -= 2;
                        c
                    } else {
                        if kk[j] == 0 || kk[k] == 0 {
                            continue;
                        }
                        let c = kk[j] * kk[k];
                        kk[j] -= 1;
                        kk[k] -= 1;
                        c
                    };
                    h[(j, k)] += mono.a * f64::from(c) * monomial(zp, &kk) * zl;
                }
            }
        }
        for j in 0..d {
            for k in j + 1..d {
                h[(k, j)] = h[(j, k)];
            }
        }
        h
    }

    /// Minimum of `P` over coordinate axes plus `count` seeded points of the
    /// unit sphere `|z'| = 1`. Every dilation orbit of `z' != 0` crosses that
    /// sphere exactly once, so positivity there is positivity everywhere.
    /// This is a sampled heuristic, not a certificate.
    pub fn positivity_scan(&self, count: usize, seed: u64) -> PositivityReport {
        let d = self.tangential_dim();
        let mut min = f64::INFINITY;
        let mut argmin = vec![C64::new(0.0, 0.0); d];
        let consider = |z: Vec<C64>, min: &mut f64, argmin: &mut Vec<C64>| {
            let v = self.eval(&z);
            if v < *min {
                *min = v;
                *argmin = z;
            }
        };
        for j in 0..d {
            let mut z = vec![C64::new(0.0, 0.0); d];
            z[j] = C64::new(1.0, 0.0);
            consider(z, &mut min, &mut argmin);
        }
        for i in 0..count {
            let mut rng = stream_rng(seed, i as u64);
            consider(unit_sphere(&mut rng, d), &mut min, &mut argmin);
        }
        PositivityReport {
            min,
            argmin,
            samples: count + d,
            passed: min > POSITIVITY_FLOOR,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolynomialFile = serde_json::from_str(text)?;
        file.into_polynomial()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&PolynomialFile::from_polynomial(self))?)
    }
}

/// Values at or below this count as a positivity failure.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub min: f64,
    pub argmin: Vec<C64>,
    pub samples: usize,
    pub passed: bool,
}

pub(crate) fn monomial<T: Scalar>(z: &[Complex<T>], k: &[u32]) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    for (zj, &kj) in z.iter().zip(k) {
        if kj > 0 {
            acc = acc * zj.powu(kj);
        }
    }
    acc
}

pub(crate) fn degree(k: &[u32]) -> u32 {
    k.iter().sum()
}

/// On-disk polynomial format: `{"n", "m", "terms": [{"K", "L", "re", "im"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialFile {
    pub n: usize,
    pub m: Vec<u32>,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    #[serde(rename = "K")]
    pub k: Vec<u32>,
    #[serde(rename = "L")]
    pub l: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl PolynomialFile {
    pub fn into_polynomial(self) -> Result<WeightedPolynomial> {
        let weights = MultiWeight::new(self.m)?;
        if self.n != weights.n() {
            return Err(Error::Validation(format!(
                "n = {} but m has {} entries (expected n - 1)",
                self.n,
                weights.tangential_dim()
            )));
        }
        let terms: Vec<Term> = self
            .terms
            .into_iter()
            .map(|t| Term::new(t.k, t.l, C64::new(t.re, t.im)))
            .collect();
        WeightedPolynomial::new(weights, terms)
    }

    pub fn from_polynomial(p: &WeightedPolynomial) -> Self {
        Self {
            n: p.weights.n(),
            m: p.weights.exponents().to_vec(),
            terms: p
                .terms()
                .into_iter()
                .map(|t| TermRecord { k: t.k, l: t.l, re: t.coeff.re, im: t.coeff.im })
                .collect(),
        }
    }
}
