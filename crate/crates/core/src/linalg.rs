//! Small dense helpers on complex vectors.

use nalgebra::{DMatrix, DVector};

use crate::scalar::C64;

/// Hermitian inner product `<a, b> = sum a_j conj(b_j)`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add_scaled(a: &[C64], s: C64, b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn scale(v: &[C64], s: C64) -> Vec<C64> {
    v.iter().map(|x| x * s).collect()
}

pub fn normalized(v: &[C64]) -> Option<Vec<C64>> {
    let n = norm(v);
    (n > 0.0 && n.is_finite()).then(|| v.iter().map(|x| x / n).collect())
}

/// Orthonormal basis of the complement of span(`against`) in `C^dim`
/// (modified Gram-Schmidt over the standard basis, twice for stability).
pub fn orthonormal_complement(against: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = against.to_vec();
    let mut out = Vec::new();
    for j in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[j] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let c = inner(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            let v: Vec<C64> = v.iter().map(|x| x / n).collect();
            basis.push(v.clone());
            out.push(v);
        }
    }
    out
}

/// `B^* H B` for a basis given as columns.
pub fn restrict_form(h: &DMatrix<C64>, basis: &[Vec<C64>]) -> DMatrix<C64> {
    let k = basis.len();
    let cols: Vec<DVector<C64>> = basis.iter().map(|b| DVector::from_column_slice(b)).collect();
    DMatrix::from_fn(k, k, |i, j| (cols[i].adjoint() * h * &cols[j])[(0, 0)])
}

pub fn hermitian_eigenvalues(h: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn symmetric_eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest deviation of the columns from an orthonormal system.
pub fn unitarity_defect(cols: &[Vec<C64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in cols.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(a, b) - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let v = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)];
        let comp = orthonormal_complement(&[v.clone()], 3);
        assert_eq!(comp.len(), 2);
        let mut all = vec![v];
        all.extend(comp);
        assert!(unitarity_defect(&all) < 1e-14);
    }

    #[test]
    fn hermitian_eigs_of_diagonal() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(3.0, 0.0), C64::new(-1.0, 0.0)]));
        assert_eq!(hermitian_eigenvalues(&h), vec![-1.0, 3.0]);
    }
}
