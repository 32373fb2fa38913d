//! Seeded property suites shared by the property and acceptance targets.
//! Each suite returns the worst observed deviation.

#![allow(dead_code)]

use std::cell::Cell;

use dpsqueeze::autmb::{normalize_point, EllipsoidAutomorphism, MobiusSign};
use dpsqueeze::domain::GeneralEllipsoid;
use dpsqueeze::linalg::{norm, sub};
use dpsqueeze::squeeze::{ray_radii, ball_automorphism, ChainStep, EmbeddingChain};
use dpsqueeze::wpoly::{MultiWeight, Term, WeightedPolynomial};
use dpsqueeze::C64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub fn runner(cases: u32, seed: u8) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

pub type Outcome = Result<f64, String>;

fn finish<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>, worst: f64) -> Outcome {
    r.map(|_| worst).map_err(|e| e.to_string())
}

/// Multi-indices `K` with `Σ k_j / m_j = 1`.
pub fn half_weight_indices(m: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut k = vec![0u32; m.len()];
    loop {
        let lcm: u64 = m.iter().map(|&x| x as u64).product();
        let total: u64 = k.iter().zip(m).map(|(&kj, &mj)| kj as u64 * (lcm / mj as u64)).sum();
        if total == lcm {
            out.push(k.clone());
        }
        let mut j = 0;
        loop {
            if j == m.len() {
                return out;
            }
            k[j] += 1;
            if k[j] <= m[j] {
                break;
            }
            k[j] = 0;
            j += 1;
        }
    }
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
}

/// Random Hermitian weighted-homogeneous polynomial (not necessarily positive).
pub fn hermitian_polynomial() -> impl Strategy<Value = WeightedPolynomial> {
    prop::collection::vec(1u32..=3, 1..=2).prop_flat_map(|m| {
        let idx = half_weight_indices(&m);
        let pairs: Vec<(usize, usize)> =
            (0..idx.len()).flat_map(|i| (i..idx.len()).map(move |j| (i, j))).collect();
        let count = pairs.len();
        (Just(m), Just(idx), Just(pairs), prop::collection::vec(complex(), count))
    })
    .prop_map(|(m, idx, pairs, coeffs)| {
        let terms = pairs.iter().zip(coeffs).map(|(&(i, j), c)| {
            let c = if i == j { C64::new(c.re.abs() + 0.1, 0.0) } else { c };
            Term::new(idx[i].clone(), idx[j].clone(), c)
        });
        WeightedPolynomial::new(MultiWeight::new(m).unwrap(), terms.collect::<Vec<_>>()).unwrap()
    })
}

pub fn power_sum_domain() -> impl Strategy<Value = GeneralEllipsoid> {
    prop::collection::vec(1u32..=4, 1..=2).prop_map(|m| GeneralEllipsoid::power_sum(m).unwrap())
}

pub fn automorphism(max_a: f64) -> impl Strategy<Value = EllipsoidAutomorphism> {
    (0.0..max_a, 0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU, any::<bool>()).prop_map(
        |(r, arg, theta, plus)| {
            let sign = if plus { MobiusSign::Plus } else { MobiusSign::Minus };
            EllipsoidAutomorphism::new(C64::from_polar(r, arg), theta, sign).unwrap()
        },
    )
}

/// Interior point: boundary sample `index` scaled by `t`.
pub fn interior_point(d: &GeneralEllipsoid, index: u64, t: f64) -> Vec<C64> {
    d.boundary_sample_at(0x1a7e, index).z.iter().map(|x| x * t).collect()
}

/// `P(delta_t z') = t P(z')`, relative error.
pub fn weighted_homogeneity(cases: u32) -> Outcome {
    let worst = Cell::new(0.0f64);
    let strategy = hermitian_polynomial()
        .prop_flat_map(|p| {
            let d = p.tangential_dim();
            (Just(p), prop::collection::vec(complex(), d), 0.05f64..20.0)
        });
    let r = runner(cases, 1).run(&strategy, |(p, z, t)| {
        let lhs = p.weighted_dilate(t, &z).unwrap();
        let rhs = t * p.eval(&z);
        let err = (lhs - rhs).abs() / (1.0 + t * p.realness_scale(&z));
        worst.set(worst.get().max(err));
        prop_assert!(err <= 1e-12, "relative error {err}");
        Ok(())
    });
    finish(r, worst.get())
}

/// Imaginary part of the Hermitian sum is round-off only.
pub fn hermitian_realness(cases: u32) -> Outcome {
    let worst = Cell::new(0.0f64);
    let strategy = hermitian_polynomial().prop_flat_map(|p| {
        let d = p.tangential_dim();
        (Just(p), prop::collection::vec(complex(), d))
    });
    let r = runner(cases, 2).run(&strategy, |(p, z)| {
        let im = p.hermitian_sum(&z).im.abs() / p.realness_scale(&z);
        worst.set(worst.get().max(im));
        prop_assert!(im <= 1e-14, "imaginary part {im}");
        Ok(())
    });
    finish(r, worst.get())
}

/// `|rho(psi(xi))| <= 1e-9` on 1000 boundary samples per automorphism.
pub fn boundary_preservation(cases: u32, samples: usize) -> Outcome {
    let worst = Cell::new(0.0f64);
    let strategy = (power_sum_domain(), automorphism(0.95), any::<u64>());
    let r = runner(cases, 3).run(&strategy, |(d, psi, seed)| {
        for b in d.boundary_sample(samples, seed) {
            let w = psi.apply_to(&d, &b.z).unwrap();
            let v = d.rho(&w).abs();
            worst.set(worst.get().max(v));
            prop_assert!(v <= 1e-9, "|rho(psi(xi))| = {v}");
        }
        Ok(())
    });
    finish(r, worst.get())
}

/// `psi^{-1}(psi(z)) = z` and `phi_c(phi_c(w)) = w`.
pub fn inverse_round_trips(cases: u32) -> Outcome {
    let worst = Cell::new(0.0f64);
    let strategy = (power_sum_domain(), automorphism(0.9), 0u64..10_000, 0.0f64..0.99);
    let r = runner(cases, 4).run(&strategy, |(d, psi, idx, t)| {
        let z = interior_point(&d, idx, t);
        let back = psi.inverse().apply_to(&d, &psi.apply_to(&d, &z).unwrap()).unwrap();
        let e1 = norm(&sub(&back, &z));
        let c: Vec<C64> = z.iter().map(|x| x * 0.9).collect();
        let w: Vec<C64> = z.iter().rev().map(|x| x * 0.5).collect();
        let e2 = if norm(&c) < 1.0 && norm(&w) < 1.0 {
            let once = ball_automorphism(&c, &w).unwrap();
            norm(&sub(&ball_automorphism(&c, &once).unwrap(), &w))
        } else {
            0.0
        };
        worst.set(worst.get().max(e1).max(e2));
        prop_assert!(e1 <= 1e-12 && e2 <= 1e-12, "round trip errors {e1} {e2}");
        Ok(())
    });
    finish(r, worst.get())
}

fn candidate_chains(d: &GeneralEllipsoid, q: &[C64]) -> Vec<EmbeddingChain> {
    let n = d.n();
    let r = d.bounding_radius();
    let zero = vec![C64::new(0.0, 0.0); n];
    let direct = EmbeddingChain::new(
        vec![ChainStep::Rescale { center: zero.clone(), radius: r }, ChainStep::Ball(q.iter().map(|x| x / r).collect())],
        q.to_vec(),
    );
    let np = normalize_point(d, q).unwrap();
    let slice = EmbeddingChain::new(
        vec![
            ChainStep::Automorphism(np.automorphism.clone()),
            ChainStep::Rescale { center: zero, radius: r },
            ChainStep::Ball(np.b.iter().map(|x| x / r).collect()),
        ],
        q.to_vec(),
    );
    vec![direct, slice]
}

/// Ray radii at `psi(p)` under chain `g` and at `p` under `g ∘ psi` are the
/// same multiset, bit for bit. Returns the number of compared values.
pub fn estimator_consistency(cases: u32, rays: usize) -> Outcome {
    let compared = Cell::new(0.0f64);
    let strategy = (power_sum_domain(), automorphism(0.8), 0u64..10_000, 0.0f64..0.9, any::<u64>());
    let r = runner(cases, 5).run(&strategy, |(d, psi, idx, t, seed)| {
        let p = interior_point(&d, idx, t);
        let q = psi.apply_to(&d, &p).unwrap();
        prop_assume!(d.contains(&q));
        for g in candidate_chains(&d, &q) {
            let mut steps = vec![ChainStep::Automorphism(psi.clone())];
            steps.extend(g.steps.iter().cloned());
            let composite = EmbeddingChain::new(steps, p.clone());
            let mut a = ray_radii(&g, &d, rays, seed).unwrap();
            let mut b = ray_radii(&composite, &d, rays, seed).unwrap();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            let same = a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
            prop_assert!(same && a.len() == b.len(), "multisets differ");
            compared.set(compared.get() + a.len() as f64);
        }
        Ok(())
    });
    finish(r, compared.get())
}

/// Analytic gradient, Levi form and holomorphic Hessian against central
/// differences (steps 1e-5 and 1e-4).
pub fn finite_differences(cases: u32) -> Outcome {
    let worst = Cell::new(0.0f64);
    let strategy = (
        power_sum_domain(),
        0u64..10_000,
        0.1f64..0.95,
        prop::collection::vec(complex(), 3),
    );
    let r = runner(cases, 6).run(&strategy, |(d, idx, t, v)| {
        let n = d.n();
        let z = interior_point(&d, idx, t);
        let g = d.gradient(&z);
        let h = 1e-5;
        let shifted = |j: usize, dz: C64| {
            let mut y = z.clone();
            y[j] += dz;
            d.rho(&y)
        };
        let mut err: f64 = 0.0;
        for j in 0..n {
            let dx = (shifted(j, C64::new(h, 0.0)) - shifted(j, C64::new(-h, 0.0))) / (2.0 * h);
            let dy = (shifted(j, C64::new(0.0, h)) - shifted(j, C64::new(0.0, -h))) / (2.0 * h);
            err = err.max((g[j] - C64::new(dx, -dy) * 0.5).norm());
        }
        // second derivatives along the complex line z + lambda v
        let v: Vec<C64> = v[..n].to_vec();
        let vn = norm(&v);
        prop_assume!(vn > 0.1);
        let v: Vec<C64> = v.iter().map(|x| x / vn).collect();
        let h2 = 1e-4;
        let f = |lam: C64| {
            let y: Vec<C64> = z.iter().zip(&v).map(|(a, b)| a + b * lam).collect();
            d.rho(&y)
        };
        let f0 = f(C64::new(0.0, 0.0));
        let fxx = (f(C64::new(h2, 0.0)) - 2.0 * f0 + f(C64::new(-h2, 0.0))) / (h2 * h2);
        let fyy = (f(C64::new(0.0, h2)) - 2.0 * f0 + f(C64::new(0.0, -h2))) / (h2 * h2);
        let fxy = (f(C64::new(h2, h2)) - f(C64::new(h2, -h2)) - f(C64::new(-h2, h2)) + f(C64::new(-h2, -h2)))
            / (4.0 * h2 * h2);
        let levi = d.levi_matrix(&z);
        let hol = d.holomorphic_hessian(&z);
        let mut lv = C64::new(0.0, 0.0);
        let mut hv = C64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                lv += levi[(j, k)] * v[j] * v[k].conj();
                hv += hol[(j, k)] * v[j] * v[k];
            }
        }
        err = err.max((lv.re - (fxx + fyy) / 4.0).abs()).max(lv.im.abs());
        err = err.max((hv - C64::new(fxx - fyy, -2.0 * fxy) * 0.25).norm());
        worst.set(worst.get().max(err));
        prop_assert!(err <= 1e-6, "finite-difference mismatch {err}");
        Ok(())
    });
    finish(r, worst.get())
}
