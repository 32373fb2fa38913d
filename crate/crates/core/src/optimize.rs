//! Derivative-free ascent on the unit sphere of `C^d`.

use crate::linalg::{norm, normalized};
use crate::scalar::C64;

#[derive(Clone, Copy, Debug)]
pub struct SphereSearch {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evals: usize,
}

impl Default for SphereSearch {
    fn default() -> Self {
        Self { initial_step: 0.25, min_step: 1e-7, max_evals: 20_000 }
    }
}

#[derive(Clone, Debug)]
pub struct SphereOptimum {
    pub point: Vec<C64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Compass search with projection back to the sphere: try `x ± h e` for every
/// real coordinate direction `e`, keep improvements, halve `h` otherwise.
/// Non-finite objective values count as rejections.
pub fn maximize_on_sphere<F>(mut f: F, start: &[C64], opts: SphereSearch) -> SphereOptimum
where
    F: FnMut(&[C64]) -> f64,
{
    let d = start.len();
    let mut x = normalized(start).unwrap_or_else(|| {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[0] = C64::new(1.0, 0.0);
        v
    });
    let mut fx = f(&x);
    let mut evals = 1;
    let mut h = opts.initial_step;
    while h >= opts.min_step && evals < opts.max_evals {
        let mut improved = false;
        for j in 0..d {
            for dir in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
                let mut y = x.clone();
                y[j] += dir * h;
                let ny = norm(&y);
                if ny == 0.0 {
                    continue;
                }
                y.iter_mut().for_each(|c| *c /= ny);
                let fy = f(&y);
                evals += 1;
                if fy.is_finite() && fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    SphereOptimum { point: x, value: fx, evals, converged: h < opts.min_step }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_dominant_axis() {
        // maximize |x_1|^2 + 0.5|x_2|^2 on S^3
        let f = |x: &[C64]| x[0].norm_sqr() + 0.5 * x[1].norm_sqr();
        let start = [C64::new(0.3, 0.1), C64::new(0.8, -0.2)];
        let opt = maximize_on_sphere(f, &start, SphereSearch::default());
        assert!((opt.value - 1.0).abs() < 1e-10);
        assert!(opt.converged);
    }
}
