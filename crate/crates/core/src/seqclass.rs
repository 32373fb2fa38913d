//! Approach sequences to `(0', 1)` and their tangential / nontangential
//! classification through the subdomains `D_P^{s,r}`.

use num_complex::Complex;

use crate::domain::{GeneralEllipsoid, SubdomainParams};
use crate::error::{Error, Result};
use crate::scalar::{lower, Dd, Scalar, C64};
use crate::table::{fmt_f64, Table};

/// Radii reported in membership columns.
pub const R_GRID: [f64; 5] = [0.25, 0.5, 0.75, 0.9, 0.99];

#[derive(Clone, Debug, PartialEq)]
pub enum SequenceKind {
    /// `a_j = (x_j e_1, 1 - 1/j)` with `P(x_j e_1) = 2/j - 2/j^2`.
    Example11,
    /// `a_j = (0', 1 - 1/j)`.
    Normal,
    /// Real `z_n = 1 - 1/j` with `P(z')` chosen so the tangency ratio at `s` is `r0`.
    Cone { r0: f64, s: f64 },
    /// Explicit terms.
    Custom(Vec<Vec<C64>>),
}

impl SequenceKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Example11 => "example11",
            Self::Normal => "normal",
            Self::Cone { .. } => "cone",
            Self::Custom(_) => "custom",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ApproachSequence {
    pub kind: SequenceKind,
    pub indices: Vec<u64>,
    /// Terms held in double-double so near-boundary quantities keep their digits.
    pub terms: Vec<Vec<Complex<Dd>>>,
}

impl ApproachSequence {
    pub fn terms_f64(&self) -> Vec<Vec<C64>> {
        self.terms.iter().map(|t| lower(t)).collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Terms `j = 1, ..., count`.
pub fn generate(d: &GeneralEllipsoid, kind: SequenceKind, count: usize) -> Result<ApproachSequence> {
    if count == 0 {
        return Err(Error::Argument("count must be at least 1".into()));
    }
    generate_at(d, kind, &(1..=count as u64).collect::<Vec<_>>())
}

/// Terms at the given indices `j >= 1`.
pub fn generate_at(d: &GeneralEllipsoid, kind: SequenceKind, indices: &[u64]) -> Result<ApproachSequence> {
    let terms = match &kind {
        SequenceKind::Custom(list) => {
            list.iter().map(|z| z.iter().map(|c| Complex::new(Dd::from(c.re), Dd::from(c.im))).collect()).collect()
        }
        _ => indices.iter().map(|&j| term_in::<Dd>(d, &kind, j)).collect::<Result<Vec<_>>>()?,
    };
    let indices = match &kind {
        SequenceKind::Custom(list) => (1..=list.len() as u64).collect(),
        _ => indices.to_vec(),
    };
    for (j, t) in indices.iter().zip(&terms) {
        if t.len() != d.n() {
            return Err(Error::Dimension { expected: d.n(), got: t.len() });
        }
        let value = d.rho_in(t);
        if !(value < Dd::from(0.0)) {
            return Err(Error::Precondition(format!(
                "term {j} of the {} sequence is not inside the domain (rho = {:e})",
                kind.name(),
                value.hi()
            )));
        }
    }
    Ok(ApproachSequence { kind, indices, terms })
}

/// Term `j` of a generated kind in the scalar type `T`.
pub fn term_in<T: Scalar>(d: &GeneralEllipsoid, kind: &SequenceKind, j: u64) -> Result<Vec<Complex<T>>> {
    if j == 0 {
        return Err(Error::Argument("sequence indices start at 1".into()));
    }
    let n = d.n();
    let jj = T::lit(j as f64);
    let g = T::one().quot(jj);
    let zn = Complex::new(T::one() - g, T::zero());
    let target_p = match kind {
        SequenceKind::Example11 => T::lit(2.0) * g - T::lit(2.0) * g * g,
        SequenceKind::Normal => T::zero(),
        SequenceKind::Cone { r0, s } => {
            if !(*r0 >= 0.0 && *r0 < 1.0) || !(*s > 0.0 && *s <= 1.0) {
                return Err(Error::Argument(format!("cone needs 0 <= r0 < 1 and 0 < s <= 1, got r0={r0}, s={s}")));
            }
            let s = T::lit(*s);
            let v = (T::lit(*r0) * (T::lit(2.0) * s * g - g * g)).quot(s);
            v.max(T::zero())
        }
        SequenceKind::Custom(_) => return Err(Error::Argument("custom sequences have no generator".into())),
    };
    let mut z = vec![Complex::new(T::zero(), T::zero()); n];
    if target_p > T::zero() {
        let m1 = d.polynomial().weights().exponents()[0];
        let mut e1 = vec![C64::new(0.0, 0.0); n - 1];
        e1[0] = C64::new(1.0, 0.0);
        let p_e1 = T::lit(d.polynomial().eval(&e1));
        z[0] = Complex::new(target_p.quot(p_e1).real_root(2 * m1), T::zero());
    }
    z[n - 1] = zn;
    Ok(z)
}

/// `r* = s P(z') / (s^2 - |z_n - (1 - s)|^2)`, or `+inf` when the
/// denominator is not positive. A point lies in `D_P^{s,r}` iff `r > r*`.
pub fn tangency_ratio(d: &GeneralEllipsoid, s: f64, z: &[C64]) -> f64 {
    tangency_ratio_in(d, s, z)
}

pub fn tangency_ratio_in<T: Scalar>(d: &GeneralEllipsoid, s: f64, z: &[Complex<T>]) -> T {
    let n = d.n();
    let st = T::lit(s);
    let b = T::one() - st;
    let den = st * st - (z[n - 1] - b).norm_sqr();
    if !(den > T::zero()) {
        return T::infinity();
    }
    (st * d.polynomial().eval_in(&z[..n - 1])).quot(den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Tangential,
    Nontangential,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Tangential => "tangential",
            Self::Nontangential => "nontangential",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// Tangential when the tail minimum of `r*` is at least `1 - tangential`.
    pub tangential: f64,
    /// Nontangential when the tail maximum of `r*` is at most `1 - margin`.
    pub margin: f64,
    /// Fraction of trailing terms that forms the tail.
    pub tail_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { tangential: 1e-6, margin: 1e-3, tail_fraction: 0.5 }
    }
}

#[derive(Clone, Debug)]
pub struct TermRecord {
    pub j: u64,
    pub abs_rho: f64,
    pub normal_gap: f64,
    pub p_prime: f64,
    pub r_star: f64,
    /// Membership in `D_P^{s,r}` for each `r` in [`R_GRID`].
    pub in_sub: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct ClassificationRecord {
    pub s: f64,
    pub rows: Vec<TermRecord>,
    pub tail_min: f64,
    pub tail_max: f64,
    pub thresholds: Thresholds,
    pub verdict: Verdict,
}

impl ClassificationRecord {
    pub fn to_table(&self) -> Table {
        let mut header: Vec<String> =
            ["j", "abs_rho", "normal_gap", "P_prime", "r_star"].iter().map(|s| s.to_string()).collect();
        header.extend(R_GRID.iter().map(|r| format!("in_D_s_r_{r}")));
        let mut t = Table::new(header);
        for row in &self.rows {
            let mut cells = vec![
                row.j.to_string(),
                fmt_f64(row.abs_rho),
                fmt_f64(row.normal_gap),
                fmt_f64(row.p_prime),
                fmt_f64(row.r_star),
            ];
            cells.extend(row.in_sub.iter().map(|b| b.to_string()));
            t.push(cells);
        }
        t
    }
}

/// Classifies by the tail behaviour of `r*`. Each term is first rotated so
/// that `z_n` is real and non-negative, which is an automorphism of `D_P`.
pub fn classify(
    d: &GeneralEllipsoid,
    s: f64,
    seq: &ApproachSequence,
    thresholds: Thresholds,
) -> Result<ClassificationRecord> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Argument(format!("s must lie in (0, 1], got {s}")));
    }
    if seq.is_empty() {
        return Err(Error::Argument("empty sequence".into()));
    }
    let n = d.n();
    let rows: Vec<TermRecord> = seq
        .indices
        .iter()
        .zip(&seq.terms)
        .map(|(&j, z)| {
            let mut z = z.clone();
            z[n - 1] = Complex::new(z[n - 1].norm(), Dd::from(0.0));
            let r_star = tangency_ratio_in(d, s, &z).hi();
            let in_sub = R_GRID
                .iter()
                .map(|&r| {
                    let sp = SubdomainParams::new(s, r).expect("grid radii are valid");
                    d.sub_defining_in(&sp, &z) < Dd::from(0.0)
                })
                .collect();
            TermRecord {
                j,
                abs_rho: d.rho_in(&z).abs().hi(),
                normal_gap: (z[n - 1].re - Dd::from(1.0)).abs().hi(),
                p_prime: d.polynomial().eval_in(&z[..n - 1]).hi(),
                r_star,
                in_sub,
            }
        })
        .collect();
    let tail_len = ((rows.len() as f64 * thresholds.tail_fraction).ceil() as usize).clamp(1, rows.len());
    let tail = &rows[rows.len() - tail_len..];
    let tail_min = tail.iter().map(|r| r.r_star).fold(f64::INFINITY, f64::min);
    let tail_max = tail.iter().map(|r| r.r_star).fold(f64::NEG_INFINITY, f64::max);
    let verdict = if tail_min >= 1.0 - thresholds.tangential {
        Verdict::Tangential
    } else if tail_max <= 1.0 - thresholds.margin {
        Verdict::Nontangential
    } else {
        Verdict::Inconclusive
    };
    Ok(ClassificationRecord { s, rows, tail_min, tail_max, thresholds, verdict })
}

/// Verdicts for several `s`, reported side by side.
pub fn classify_per_s(
    d: &GeneralEllipsoid,
    s_values: &[f64],
    seq: &ApproachSequence,
    thresholds: Thresholds,
) -> Result<Vec<ClassificationRecord>> {
    s_values.iter().map(|&s| classify(d, s, seq, thresholds)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e12() -> GeneralEllipsoid {
        GeneralEllipsoid::power_sum(vec![2]).unwrap()
    }

    #[test]
    fn generated_terms() {
        let d = e12();
        let seq = generate(&d, SequenceKind::Normal, 5).unwrap();
        for (j, t) in seq.indices.iter().zip(seq.terms_f64()) {
            assert_eq!(t[0], C64::new(0.0, 0.0));
            assert!((t[1].re - (1.0 - 1.0 / *j as f64)).abs() <= f64::EPSILON);
        }
        let a2 = &generate_at(&d, SequenceKind::Example11, &[2]).unwrap().terms_f64()[0];
        assert!((a2[0].re - 0.5f64.powf(0.25)).abs() < 1e-16);
        assert!((d.rho(a2) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn example_identity_on_general_domain() {
        let d = GeneralEllipsoid::power_sum(vec![3, 2]).unwrap();
        for j in [2u64, 7, 100, 12345] {
            let z = term_in::<Dd>(&d, &SequenceKind::Example11, j).unwrap();
            let jj = Dd::from(j as f64);
            let expect = -Dd::from(1.0).quot(jj * jj);
            let got = d.rho_in(&z);
            assert!((got - expect).quot(expect).abs().hi() < 1e-20);
        }
    }

    #[test]
    fn tangency_examples() {
        let d = e12();
        assert_eq!(tangency_ratio(&d, 0.5, &[C64::new(0.0, 0.0), C64::new(0.9, 0.0)]), 0.0);
        assert_eq!(tangency_ratio(&d, 0.5, &[C64::new(0.0, 0.0), C64::new(-0.1, 0.0)]), f64::INFINITY);
        for j in [3u64, 10, 1000] {
            let z = term_in::<Dd>(&d, &SequenceKind::Example11, j).unwrap();
            let r = tangency_ratio_in(&d, 0.5, &z).hi();
            assert!((r - 1.0).abs() < 1e-12, "{r}");
            let zf = lower(&z);
            let out = SubdomainParams::new(0.5, 1.0 - 1e-3).unwrap();
            assert!(!d.contains_sub(&out, &zf));
            // r = 1 + 1e-3 is outside the admissible range, check the inequality directly
            let lhs = (zf[1].re - 0.5).powi(2) + 0.5 / (1.0 + 1e-3) * d.polynomial().eval(&zf[..1]);
            assert!(lhs < 0.25);
        }
    }

    #[test]
    fn membership_agrees_with_ratio() {
        let d = e12();
        let seq = generate(&d, SequenceKind::Cone { r0: 0.6, s: 0.5 }, 40).unwrap();
        for z in seq.terms_f64().iter().skip(1) {
            let rs = tangency_ratio(&d, 0.5, z);
            for k in 1..100 {
                let r = k as f64 / 100.0;
                if (r - rs).abs() < 1e-9 {
                    continue;
                }
                let sp = SubdomainParams::new(0.5, r).unwrap();
                assert_eq!(d.contains_sub(&sp, z), r > rs, "r={r} r*={rs}");
            }
        }
    }

    #[test]
    fn verdicts() {
        let d = e12();
        let th = Thresholds::default();
        let normal = classify(&d, 0.5, &generate(&d, SequenceKind::Normal, 50).unwrap(), th).unwrap();
        assert_eq!(normal.verdict, Verdict::Nontangential);
        // j = 1 is the origin, outside D_P^s, so its ratio is infinite
        assert!(normal.rows.iter().skip(1).all(|r| r.r_star == 0.0));
        let ex = classify(&d, 0.5, &generate(&d, SequenceKind::Example11, 50).unwrap(), th).unwrap();
        assert_eq!(ex.verdict, Verdict::Tangential);
        let cone = classify(&d, 0.5, &generate(&d, SequenceKind::Cone { r0: 0.5, s: 0.5 }, 50).unwrap(), th).unwrap();
        assert_eq!(cone.verdict, Verdict::Nontangential);
        assert!((cone.tail_max - 0.5).abs() < 1e-12);
        assert_eq!(ex.to_table().header.len(), 5 + R_GRID.len());
    }

    #[test]
    fn classification_ignores_joint_rotation() {
        let d = e12();
        let seq = generate(&d, SequenceKind::Example11, 30).unwrap();
        let rotated: Vec<Vec<C64>> = seq
            .terms_f64()
            .into_iter()
            .map(|mut z| {
                z[1] *= C64::from_polar(1.0, 1.1);
                z
            })
            .collect();
        let custom = generate(&d, SequenceKind::Custom(rotated), 1).unwrap();
        let a = classify(&d, 0.5, &custom, Thresholds::default()).unwrap();
        let plain = ApproachSequence { kind: SequenceKind::Custom(seq.terms_f64()), indices: seq.indices.clone(), terms: seq.terms_f64().iter().map(|t| crate::scalar::lift(t)).collect() };
        let b = classify(&d, 0.5, &plain, Thresholds::default()).unwrap();
        assert_eq!(a.verdict, b.verdict);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!(x.r_star == y.r_star || (x.r_star - y.r_star).abs() < 1e-9);
        }
    }
}
