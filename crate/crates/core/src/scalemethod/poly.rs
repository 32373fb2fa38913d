//! Real polynomials in `(z, z̄)` stored as Hermitian coefficient tables.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::domain::GeneralEllipsoid;
use crate::error::{check_dim, Error, Result};
use crate::scalar::C64;
use crate::wpoly::{monomial, TermRecord, WeightedPolynomial};

/// `(K, L)` for the monomial `z^K z̄^L`.
pub type Key = (Vec<u32>, Vec<u32>);

type Sparse = BTreeMap<Key, C64>;

/// `rho(z) = Σ c_{KL} z^K z̄^L` with `c_{LK} = conj(c_{KL})`, in `n` variables.
/// Unlike [`WeightedPolynomial`] there is no weight restriction, so constants,
/// linear terms and mixed degrees are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct DefiningFunctionPoly {
    n: usize,
    coeffs: Sparse,
}

const HERMITIAN_TOL: f64 = 1e-12;

impl DefiningFunctionPoly {
    /// Builds the table from terms; a term `(K, L, c)` with `K != L` also
    /// supplies `(L, K, conj c)` unless that entry is given explicitly.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, Vec<u32>, C64)>) -> Result<Self> {
        let mut given: Sparse = BTreeMap::new();
        for (k, l, c) in terms {
            check_dim(n, k.len())?;
            check_dim(n, l.len())?;
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Validation(format!("non-finite coefficient for K={k:?}, L={l:?}")));
            }
            if given.insert((k.clone(), l.clone()), c).is_some() {
                return Err(Error::Validation(format!("duplicate term K={k:?}, L={l:?}")));
            }
        }
        let mut coeffs = Sparse::new();
        for ((k, l), c) in &given {
            let scale = c.norm().max(1.0);
            if k == l {
                if c.im.abs() > HERMITIAN_TOL * scale {
                    return Err(Error::Validation(format!("diagonal term K=L={k:?} has imaginary part {}", c.im)));
                }
                coeffs.insert((k.clone(), l.clone()), C64::new(c.re, 0.0));
                continue;
            }
            if let Some(partner) = given.get(&(l.clone(), k.clone())) {
                if (partner - c.conj()).norm() > HERMITIAN_TOL * scale {
                    return Err(Error::Validation(format!("entries for K={k:?}, L={l:?} are not conjugate")));
                }
            }
            coeffs.insert((k.clone(), l.clone()), *c);
            coeffs.entry((l.clone(), k.clone())).or_insert(c.conj());
        }
        coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
        Ok(Self { n, coeffs })
    }

    /// `|z_n|^2 + P(z') - 1`.
    pub fn from_ellipsoid(d: &GeneralEllipsoid) -> Self {
        let n = d.n();
        let mut coeffs = Sparse::new();
        for ((k, l), c) in d.polynomial().coefficients() {
            coeffs.insert((pad(k, n), pad(l, n)), *c);
        }
        coeffs.insert((unit(n, n - 1), unit(n, n - 1)), C64::new(1.0, 0.0));
        coeffs.insert((vec![0; n], vec![0; n]), C64::new(-1.0, 0.0));
        Self { n, coeffs }
    }

    /// The model `Re z_n + P(z')`.
    pub fn graph_model(p: &WeightedPolynomial) -> Self {
        let n = p.weights().n();
        let mut coeffs = Sparse::new();
        for ((k, l), c) in p.coefficients() {
            coeffs.insert((pad(k, n), pad(l, n)), *c);
        }
        let zero = vec![0; n];
        coeffs.insert((unit(n, n - 1), zero.clone()), C64::new(0.5, 0.0));
        coeffs.insert((zero, unit(n, n - 1)), C64::new(0.5, 0.0));
        Self { n, coeffs }
    }

    /// `|z|^2 - 1`.
    pub fn ball(n: usize) -> Self {
        let mut coeffs = Sparse::new();
        for j in 0..n {
            coeffs.insert((unit(n, j), unit(n, j)), C64::new(1.0, 0.0));
        }
        coeffs.insert((vec![0; n], vec![0; n]), C64::new(-1.0, 0.0));
        Self { n, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &BTreeMap<Key, C64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: &[u32], l: &[u32]) -> C64 {
        self.coeffs.get(&(k.to_vec(), l.to_vec())).copied().unwrap_or_default()
    }

    /// Largest total degree `|K| + |L|`.
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|(k, l)| k.iter().sum::<u32>() + l.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[C64]) -> f64 {
        let zb: Vec<C64> = z.iter().map(|x| x.conj()).collect();
        self.coeffs.iter().map(|((k, l), c)| (c * monomial(z, k) * monomial(&zb, l)).re).sum()
    }

    /// `(∂rho/∂z̄_1, ..., ∂rho/∂z̄_n)`.
    pub fn gradient_bar(&self, z: &[C64]) -> Vec<C64> {
        let zb: Vec<C64> = z.iter().map(|x| x.conj()).collect();
        (0..self.n)
            .map(|j| {
                self.coeffs
                    .iter()
                    .filter(|((_, l), _)| l[j] > 0)
                    .map(|((k, l), c)| {
                        let mut lj = l.clone();
                        lj[j] -= 1;
                        c * monomial(z, k) * monomial(&zb, &lj) * l[j] as f64
                    })
                    .sum()
            })
            .collect()
    }

    /// `H_{ij} = ∂^2 rho / ∂z_i ∂z̄_j`.
    pub fn levi(&self, z: &[C64]) -> DMatrix<C64> {
        let zb: Vec<C64> = z.iter().map(|x| x.conj()).collect();
        let mut h = DMatrix::from_element(self.n, self.n, C64::new(0.0, 0.0));
        for ((k, l), c) in &self.coeffs {
            for i in 0..self.n {
                if k[i] == 0 {
                    continue;
                }
                let mut ki = k.clone();
                ki[i] -= 1;
                let zk = monomial(z, &ki) * k[i] as f64;
                for j in 0..self.n {
                    if l[j] == 0 {
                        continue;
                    }
                    let mut lj = l.clone();
                    lj[j] -= 1;
                    h[(i, j)] += c * zk * monomial(&zb, &lj) * l[j] as f64;
                }
            }
        }
        // exact Hermitian symmetrization
        let ht = h.adjoint();
        (h + ht).map(|x| x * 0.5)
    }

    /// Table of `w -> rho(shift + Σ_j w_j cols[j]) / scale` in `cols.len()`
    /// variables, by exact polynomial expansion.
    pub fn compose_affine(&self, shift: &[C64], cols: &[Vec<C64>], scale: f64) -> Result<Self> {
        check_dim(self.n, shift.len())?;
        for c in cols {
            check_dim(self.n, c.len())?;
        }
        if !(scale.is_finite() && scale != 0.0) {
            return Err(Error::Argument(format!("scale must be finite and nonzero, got {scale}")));
        }
        let k = cols.len();
        let zero = vec![0u32; k];
        let max_k: Vec<u32> = (0..self.n).map(|i| self.coeffs.keys().map(|(a, _)| a[i]).max().unwrap_or(0)).collect();
        let max_l: Vec<u32> = (0..self.n).map(|i| self.coeffs.keys().map(|(_, b)| b[i]).max().unwrap_or(0)).collect();
        let mut pow_z = Vec::with_capacity(self.n);
        let mut pow_zb = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut lin = Sparse::new();
            let mut lin_b = Sparse::new();
            push(&mut lin, (zero.clone(), zero.clone()), shift[i]);
            push(&mut lin_b, (zero.clone(), zero.clone()), shift[i].conj());
            for (j, col) in cols.iter().enumerate() {
                push(&mut lin, (unit(k, j), zero.clone()), col[i]);
                push(&mut lin_b, (zero.clone(), unit(k, j)), col[i].conj());
            }
            pow_z.push(powers(&lin, max_k[i], k));
            pow_zb.push(powers(&lin_b, max_l[i], k));
        }
        let mut out = Sparse::new();
        for ((a, b), c) in &self.coeffs {
            let mut acc = one(k);
            for i in 0..self.n {
                if a[i] > 0 {
                    acc = multiply(&acc, &pow_z[i][a[i] as usize]);
                }
                if b[i] > 0 {
                    acc = multiply(&acc, &pow_zb[i][b[i] as usize]);
                }
            }
            for (key, v) in acc {
                *out.entry(key).or_default() += c * v / scale;
            }
        }
        Ok(Self::hermitized(k, out))
    }

    /// Averages `c_{KL}` with `conj(c_{LK})` and drops roundoff-level entries.
    fn hermitized(n: usize, map: Sparse) -> Self {
        let biggest = map.values().map(|c| c.norm()).fold(0.0, f64::max);
        let mut coeffs = Sparse::new();
        for ((k, l), c) in &map {
            let partner = map.get(&(l.clone(), k.clone())).copied().unwrap_or_default();
            let v = (c + partner.conj()) * 0.5;
            let v = if k == l { C64::new(v.re, 0.0) } else { v };
            if v.norm() > 1e-15 * biggest {
                coeffs.insert((k.clone(), l.clone()), v);
            }
        }
        Self { n, coeffs }
    }

    /// Largest coefficient difference over the union of the supports.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (key, c) in &self.coeffs {
            worst = worst.max((c - other.coeffs.get(key).copied().unwrap_or_default()).norm());
        }
        for (key, c) in &other.coeffs {
            if !self.coeffs.contains_key(key) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    pub fn to_json(&self) -> Result<String> {
        let file = DefiningFunctionFile {
            n: self.n,
            terms: self
                .coeffs
                .iter()
                .filter(|((k, l), _)| k <= l)
                .map(|((k, l), c)| TermRecord { k: k.clone(), l: l.clone(), re: c.re, im: c.im })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DefiningFunctionFile = serde_json::from_str(text)?;
        Self::new(file.n, file.terms.into_iter().map(|t| (t.k, t.l, C64::new(t.re, t.im))))
    }
}

/// On-disk table: `{"n", "terms": [{"K", "L", "re", "im"}]}` with full
/// multi-indices over all `n` variables.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefiningFunctionFile {
    pub n: usize,
    pub terms: Vec<TermRecord>,
}

fn pad(k: &[u32], n: usize) -> Vec<u32> {
    let mut v = k.to_vec();
    v.resize(n, 0);
    v
}

pub(crate) fn unit(n: usize, j: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[j] = 1;
    v
}

fn push(map: &mut Sparse, key: Key, c: C64) {
    if c != C64::new(0.0, 0.0) {
        *map.entry(key).or_default() += c;
    }
}

fn one(k: usize) -> Sparse {
    let mut m = Sparse::new();
    m.insert((vec![0; k], vec![0; k]), C64::new(1.0, 0.0));
    m
}

fn multiply(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for ((ka, la), ca) in a {
        for ((kb, lb), cb) in b {
            let k = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            let l = la.iter().zip(lb).map(|(x, y)| x + y).collect();
            *out.entry((k, l)).or_default() += ca * cb;
        }
    }
    out
}

fn powers(lin: &Sparse, max: u32, k: usize) -> Vec<Sparse> {
    let mut out = vec![one(k)];
    for p in 1..=max as usize {
        let next = multiply(&out[p - 1], lin);
        out.push(next);
    }
    out
}
