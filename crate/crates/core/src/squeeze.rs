//! Lower bounds for the squeezing function through explicit embedding
//! chains `f: Omega -> B^n` with `f(p) = 0`.
//!
//! For a chain `f` the inscribed radius of `f(Omega)` is estimated by casting
//! seeded rays from the origin of the image ball and locating the first exit
//! from `f(Omega)`, pulled back through `f^{-1}`. A chain is made valid
//! (`f(Omega)` inside the unit ball) by measuring `max |f|` on a fixed
//! calibration sample of the host boundary and shrinking when it exceeds 1.
//! Every reported value is a lower-bound estimate attained by a concrete chain.

use crate::autmb::{normalize_point, EllipsoidAutomorphism};
use crate::domain::{GeneralEllipsoid, Region, SubdomainParams};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{inner, norm, sub};
use crate::optimize::{maximize_on_sphere, SphereSearch};
use crate::roots::illinois;
use crate::sampling::{derive_seed, stream_rng, unit_sphere};
use crate::scalar::C64;
use crate::table::{coordinate_cells, coordinate_header, fmt_f64, Table};

/// Largest tolerated `|f(p)|` for a chain based at `p`.
pub const BASEPOINT_TOL: f64 = 1e-10;

/// Classical involutive automorphism of the unit ball exchanging `c` and 0:
/// `phi_c(z) = (c - P_c z - sqrt(1 - |c|^2) Q_c z) / (1 - <z, c>)`; `phi_0 = -id`.
pub fn ball_automorphism(c: &[C64], z: &[C64]) -> Result<Vec<C64>> {
    check_dim(c.len(), z.len())?;
    let cn = norm(c);
    if !(cn < 1.0) {
        return Err(Error::Parameter(cn));
    }
    Ok(phi(c, z))
}

fn phi(c: &[C64], z: &[C64]) -> Vec<C64> {
    let mut w = z.to_vec();
    phi_in_place(c, &mut w);
    w
}

fn phi_in_place(c: &[C64], z: &mut [C64]) {
    let c2 = c.iter().map(|x| x.norm_sqr()).sum::<f64>();
    if c2 == 0.0 {
        z.iter_mut().for_each(|x| *x = -*x);
        return;
    }
    let zc = inner(z, c);
    let s = (1.0 - c2).sqrt();
    let inv = 1.0 / (C64::new(1.0, 0.0) - zc);
    let proj = zc / c2;
    for (zi, ci) in z.iter_mut().zip(c) {
        let p = ci * proj;
        *zi = (ci - p - s * (*zi - p)) * inv;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChainStep {
    Automorphism(EllipsoidAutomorphism),
    /// `z -> (z - center) / radius`.
    Rescale { center: Vec<C64>, radius: f64 },
    /// `phi_c`.
    Ball(Vec<C64>),
}

impl ChainStep {
    fn forward(&self, m: &[u32], z: &[C64]) -> Vec<C64> {
        match self {
            Self::Automorphism(psi) => psi.apply_unchecked(m, z),
            Self::Rescale { center, radius } => z.iter().zip(center).map(|(x, c)| (x - c) / radius).collect(),
            Self::Ball(c) => phi(c, z),
        }
    }

    fn backward(&self, m: &[u32], w: &mut Vec<C64>) {
        match self {
            Self::Automorphism(psi) => *w = psi.inverse().apply_unchecked(m, w),
            Self::Rescale { center, radius } => w.iter_mut().zip(center).for_each(|(x, c)| *x = *x * radius + c),
            Self::Ball(c) => phi_in_place(c, w),
        }
    }

    fn describe(&self) -> String {
        match self {
            Self::Automorphism(psi) => {
                format!("aut(a={:.6}{:+.6}i,theta={:.6},{:?})", psi.a().re, psi.a().im, psi.theta(), psi.sign())
            }
            Self::Rescale { center, radius } => {
                if norm(center) == 0.0 {
                    format!("rescale(R={radius:.6})")
                } else {
                    format!("rescale(R={radius:.6},|center|={:.6})", norm(center))
                }
            }
            Self::Ball(c) => format!("ball(|c|={:.9})", norm(c)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingChain {
    pub steps: Vec<ChainStep>,
    pub basepoint: Vec<C64>,
}

impl EmbeddingChain {
    pub fn new(steps: Vec<ChainStep>, basepoint: Vec<C64>) -> Self {
        Self { steps, basepoint }
    }

    /// The identity chain, valid for the unit ball at the origin.
    pub fn identity(n: usize) -> Self {
        Self { steps: Vec::new(), basepoint: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn apply(&self, m: &[u32], z: &[C64]) -> Vec<C64> {
        self.apply_from(m, z, 0)
    }

    fn apply_from(&self, m: &[u32], z: &[C64], skip: usize) -> Vec<C64> {
        self.steps[skip..].iter().fold(z.to_vec(), |acc, s| s.forward(m, &acc))
    }

    fn pullback_from(&self, m: &[u32], w: &[C64], skip: usize) -> Vec<C64> {
        let mut z = w.to_vec();
        self.pullback_into(m, &mut z, skip);
        z
    }

    fn pullback_into(&self, m: &[u32], z: &mut Vec<C64>, skip: usize) {
        for s in self.steps[skip..].iter().rev() {
            s.backward(m, z);
        }
    }

    pub fn pullback(&self, m: &[u32], w: &[C64]) -> Vec<C64> {
        self.pullback_from(m, w, 0)
    }

    pub fn descriptor(&self) -> String {
        if self.steps.is_empty() {
            return "identity".into();
        }
        self.steps.iter().map(ChainStep::describe).collect::<Vec<_>>().join(" -> ")
    }

    pub fn check_basepoint(&self, m: &[u32]) -> Result<()> {
        let image = norm(&self.apply(m, &self.basepoint));
        if image <= BASEPOINT_TOL {
            Ok(())
        } else {
            Err(Error::Basepoint { norm: image })
        }
    }

    /// Leading automorphism steps that may be skipped for an invariant region.
    fn leading_automorphisms(&self) -> usize {
        self.steps.iter().take_while(|s| matches!(s, ChainStep::Automorphism(_))).count()
    }
}

/// Steps that can be skipped when the region is invariant under the host's
/// automorphisms: `f(Omega) = g(psi(Omega)) = g(Omega)`.
fn skippable(chain: &EmbeddingChain, region: &dyn Region) -> usize {
    if region.host_invariant() {
        chain.leading_automorphisms()
    } else {
        0
    }
}

const SCAN_STEPS: usize = 24;

fn ray_radius(chain: &EmbeddingChain, region: &dyn Region, m: &[u32], skip: usize, u: &[C64]) -> f64 {
    let mut buf = Vec::with_capacity(u.len());
    let mut h = |t: f64| {
        buf.clear();
        buf.extend(u.iter().map(|x| x * t));
        chain.pullback_into(m, &mut buf, skip);
        let v = region.defining(&buf);
        if v.is_nan() {
            1.0
        } else {
            v
        }
    };
    let mut lo = 0.0;
    for k in 1..=SCAN_STEPS {
        let t = k as f64 / SCAN_STEPS as f64;
        if h(t) >= 0.0 {
            return illinois(h, lo, t, 1e-13);
        }
        lo = t;
    }
    1.0
}

fn ray_direction(seed: u64, i: usize, n: usize) -> Vec<C64> {
    unit_sphere(&mut stream_rng(seed, i as u64), n)
}

/// Exit radius of `count` seeded rays from the origin of the image, each
/// capped at 1. Ray `i` uses stream `i`, so a larger count extends the list.
pub fn ray_radii(chain: &EmbeddingChain, region: &dyn Region, count: usize, seed: u64) -> Result<Vec<f64>> {
    let host = region.host();
    let m = host.polynomial().weights().exponents();
    check_dim(host.n(), chain.basepoint.len())?;
    chain.check_basepoint(m)?;
    if !region.contains(&chain.basepoint) {
        return Err(Error::OutsideDomain { value: region.defining(&chain.basepoint) });
    }
    let skip = skippable(chain, region);
    Ok((0..count).map(|i| ray_radius(chain, region, m, skip, &ray_direction(seed, i, host.n()))).collect())
}

/// Estimate of `sup { r : B(0, r) ⊂ f(Omega) }` (from above, converging as
/// `count` grows).
pub fn inscribed_radius(chain: &EmbeddingChain, region: &dyn Region, count: usize, seed: u64) -> Result<f64> {
    Ok(ray_radii(chain, region, count, seed)?.into_iter().fold(1.0, f64::min))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezeOptions {
    /// Host boundary samples used to certify `|f| <= 1` and fit touching balls.
    pub calibration: usize,
    /// Rays used to rank candidate chains before the full evaluation.
    pub screening: usize,
}

impl Default for SqueezeOptions {
    fn default() -> Self {
        Self { calibration: 8192, screening: 512 }
    }
}

const REFINED_RAYS: usize = 4;
const CALIBRATION_SEED: u64 = 0xca11_b7a7e;
const RADIUS_SEED: u64 = 0x5eed_0002;

#[derive(Clone, Debug)]
pub struct SqueezeEstimate {
    pub point: Vec<C64>,
    /// Lower-bound estimate of the squeezing function at `point`.
    pub value: f64,
    pub chain: EmbeddingChain,
    pub strategy: &'static str,
    pub samples: usize,
    /// Estimate on the first half of the rays minus `value` (non-negative).
    pub band: f64,
    /// `max |f|` on the calibration sample before any shrinking step.
    pub excess: f64,
}

/// Holds per-domain precomputation shared by many estimates.
pub struct Squeezer<'a> {
    region: &'a dyn Region,
    calibration: Vec<Vec<C64>>,
    r_max: f64,
    opts: SqueezeOptions,
}

impl<'a> Squeezer<'a> {
    pub fn new(region: &'a dyn Region, opts: SqueezeOptions) -> Self {
        let host = region.host();
        let calibration = host.boundary_sample(opts.calibration, CALIBRATION_SEED).into_iter().map(|b| b.z).collect();
        let r_max = host.max_boundary_norm(4096, RADIUS_SEED).0;
        Self { region, calibration, r_max, opts }
    }

    pub fn region(&self) -> &dyn Region {
        self.region
    }

    /// Refined sampled maximum of `|z|` on the host boundary.
    pub fn max_boundary_norm(&self) -> f64 {
        self.r_max
    }

    fn weights(&self) -> &[u32] {
        self.region.host().polynomial().weights().exponents()
    }

    /// `max |f(xi)|` over the calibration sample.
    pub fn image_excess(&self, chain: &EmbeddingChain) -> f64 {
        let skip = skippable(chain, self.region);
        let m = self.weights();
        self.calibration.iter().map(|xi| norm(&chain.apply_from(m, xi, skip))).fold(0.0, f64::max)
    }

    /// Appends a shrinking step when the calibration sample leaves the ball.
    pub fn make_valid(&self, chain: EmbeddingChain) -> (EmbeddingChain, f64) {
        let excess = self.image_excess(&chain);
        if excess > 1.0 {
            let mut chain = chain;
            let n = chain.basepoint.len();
            chain.steps.push(ChainStep::Rescale { center: vec![C64::new(0.0, 0.0); n], radius: excess });
            (chain, excess)
        } else {
            (chain, excess)
        }
    }

    /// Candidate chains at `p`, labelled by strategy.
    pub fn candidates(&self, p: &[C64]) -> Result<Vec<(&'static str, EmbeddingChain)>> {
        let host = self.region.host();
        let n = host.n();
        let zero = vec![C64::new(0.0, 0.0); n];
        let r = self.r_max;
        let mut out = Vec::new();

        let c: Vec<C64> = p.iter().map(|x| x / r).collect();
        out.push((
            "direct",
            EmbeddingChain::new(
                vec![ChainStep::Rescale { center: zero.clone(), radius: r }, ChainStep::Ball(c)],
                p.to_vec(),
            ),
        ));

        let np = normalize_point(host, p)?;
        let b: Vec<C64> = np.b.clone();
        let psi = ChainStep::Automorphism(np.automorphism.clone());
        out.push((
            "slice",
            EmbeddingChain::new(
                vec![
                    psi.clone(),
                    ChainStep::Rescale { center: zero.clone(), radius: r },
                    ChainStep::Ball(b.iter().map(|x| x / r).collect()),
                ],
                p.to_vec(),
            ),
        ));

        if let Some((center, radius)) = self.touching_ball(&b) {
            let c: Vec<C64> = b.iter().zip(&center).map(|(x, o)| (x - o) / radius).collect();
            if norm(&c) < 1.0 {
                out.push((
                    "touching",
                    EmbeddingChain::new(vec![psi, ChainStep::Rescale { center, radius }, ChainStep::Ball(c)], p.to_vec()),
                ));
            }
        }
        Ok(out)
    }

    /// Ball containing the host and tangent to it at the boundary point
    /// above the slice point `(b', 0)`, as `(center, radius)`. `None` when
    /// `b' = 0` or the host is not strictly convex at that point.
    pub fn touching_ball(&self, b: &[C64]) -> Option<(Vec<C64>, f64)> {
        let host = self.region.host();
        let n = host.n();
        let pb = host.polynomial().eval(&b[..n - 1]);
        if !(pb > 1e-300) {
            return None;
        }
        let mut xi0 = host.polynomial().weights().dilate(1.0 / pb, &b[..n - 1]);
        xi0.push(C64::new(0.0, 0.0));
        let nu = host.unit_normal(&xi0).ok()?;
        let kappa = host.min_normal_curvature(&xi0).ok()?;
        if !(kappa > 0.0) {
            return None;
        }
        let ratio = |xi: &[C64]| -> Option<f64> {
            let d = sub(&xi0, xi);
            let dist2 = d.iter().map(|x| x.norm_sqr()).sum::<f64>();
            if dist2 < 1e-16 {
                return Some(0.0);
            }
            let depth = inner(&d, &nu).re;
            (depth > 0.0).then(|| dist2 / (2.0 * depth))
        };
        let mut best = 1.0 / kappa;
        let mut best_xi: Option<&Vec<C64>> = None;
        for xi in &self.calibration {
            let v = ratio(xi)?;
            if v > best {
                best = v;
                best_xi = Some(xi);
            }
        }
        if let Some(start) = best_xi {
            let opts = SphereSearch { initial_step: 0.02, min_step: 1e-9, max_evals: 4000 };
            let f = |u: &[C64]| {
                host.ray_root(u)
                    .and_then(|t| ratio(&u.iter().map(|x| x * t).collect::<Vec<_>>()))
                    .unwrap_or(f64::NAN)
            };
            let opt = maximize_on_sphere(f, start, opts);
            if opt.value.is_finite() {
                best = best.max(opt.value);
            }
        }
        let center = xi0.iter().zip(&nu).map(|(x, v)| x - v * best).collect();
        Some((center, best))
    }

    /// Best estimate over the candidate family at `p`.
    pub fn estimate(&self, p: &[C64], count: usize, seed: u64) -> Result<SqueezeEstimate> {
        let host = self.region.host();
        check_dim(host.n(), p.len())?;
        if !self.region.contains(p) {
            return Err(Error::OutsideDomain { value: self.region.defining(p) });
        }
        if count == 0 {
            return Err(Error::Argument("count must be at least 1".into()));
        }
        let screen_seed = derive_seed(seed, 0x5c);
        let mut best: Option<(f64, &'static str, EmbeddingChain, f64)> = None;
        for (label, chain) in self.candidates(p)? {
            let (chain, excess) = self.make_valid(chain);
            if chain.check_basepoint(self.weights()).is_err() {
                continue;
            }
            let radii = ray_radii(&chain, self.region, self.opts.screening, screen_seed)?;
            let v = self.refine_directions(&chain, &radii, screen_seed);
            if best.as_ref().map_or(true, |(bv, ..)| v > *bv) {
                best = Some((v, label, chain, excess));
            }
        }
        let (refined, strategy, chain, excess) =
            best.ok_or_else(|| Error::NonConvergence("no candidate chain passed the basepoint check".into()))?;
        let radii = ray_radii(&chain, self.region, count, seed)?;
        let value = radii.iter().copied().fold(refined, f64::min);
        let half = radii[..(count / 2).max(1)].iter().copied().fold(refined, f64::min);
        Ok(SqueezeEstimate { point: p.to_vec(), value, chain, strategy, samples: count, band: half - value, excess })
    }

    /// Local minimization of the exit radius over ray directions, started
    /// from the lowest screening rays. Independent of the full ray count.
    fn refine_directions(&self, chain: &EmbeddingChain, screened: &[f64], screen_seed: u64) -> f64 {
        let n = chain.basepoint.len();
        let m = self.weights();
        let skip = skippable(chain, self.region);
        let mut order: Vec<usize> = (0..screened.len()).collect();
        order.sort_by(|&a, &b| screened[a].total_cmp(&screened[b]));
        let opts = SphereSearch { initial_step: 0.05, min_step: 1e-6, max_evals: 600 };
        let raw = screened.iter().copied().fold(1.0, f64::min);
        order
            .iter()
            .take(REFINED_RAYS)
            .filter(|&&i| screened[i] < 1.0)
            .map(|&i| {
                let start = ray_direction(screen_seed, i, n);
                let opt = maximize_on_sphere(|u| -ray_radius(chain, self.region, m, skip, u), &start, opts);
                (-opt.value).min(screened[i])
            })
            .fold(raw, f64::min)
    }

    /// Estimates along a sequence.
    pub fn profile(&self, points: &[Vec<C64>], count: usize, seed: u64) -> Result<Vec<SqueezeEstimate>> {
        points.iter().map(|p| self.estimate(p, count, seed)).collect()
    }
}

/// One-shot estimate; see [`Squeezer`] to reuse the calibration.
pub fn squeeze_lower_bound(region: &dyn Region, p: &[C64], count: usize, seed: u64) -> Result<SqueezeEstimate> {
    Squeezer::new(region, SqueezeOptions::default()).estimate(p, count, seed)
}

/// Estimates along a sequence with one domain per term (e.g. a family
/// `Omega_j` agreeing with `D_P` near the boundary point).
pub fn squeeze_profile(
    regions: &[&dyn Region],
    points: &[Vec<C64>],
    count: usize,
    seed: u64,
) -> Result<Vec<SqueezeEstimate>> {
    if regions.len() != points.len() && regions.len() != 1 {
        return Err(Error::Argument(format!("{} domains for {} points", regions.len(), points.len())));
    }
    if regions.len() == 1 {
        return Squeezer::new(regions[0], SqueezeOptions::default()).profile(points, count, seed);
    }
    regions
        .iter()
        .zip(points)
        .map(|(r, p)| Squeezer::new(*r, SqueezeOptions::default()).estimate(p, count, seed))
        .collect()
}

/// Rows `(j, re_p..., sigma_hat, chain_descriptor, samples, floor_r)`.
pub fn profile_table(indices: &[u64], estimates: &[SqueezeEstimate], floor: Option<f64>) -> Table {
    let n = estimates.first().map_or(0, |e| e.point.len());
    let mut header = vec!["j".to_string()];
    header.extend(coordinate_header("p", n));
    header.extend(["sigma_hat", "chain_descriptor", "samples", "floor_r"].map(String::from));
    let mut t = Table::new(header);
    for (j, e) in indices.iter().zip(estimates) {
        let mut row = vec![j.to_string()];
        row.extend(coordinate_cells(&e.point));
        row.push(fmt_f64(e.value));
        row.push(format!("{}: {}", e.strategy, e.chain.descriptor()));
        row.push(e.samples.to_string());
        row.push(fmt_f64(floor.unwrap_or(f64::NAN)));
        t.push(row);
    }
    t
}

#[derive(Clone, Debug)]
pub struct FloorReport {
    /// Minimum after local refinement from the best grid points.
    pub floor: f64,
    /// Minimum over the grid alone.
    pub grid_floor: f64,
    pub argmin: Vec<C64>,
    pub values: Vec<(Vec<C64>, f64)>,
    pub s: f64,
    pub r: f64,
}

/// Seeded grid of `D_P^{s,r}`: `z_n = b + s w` with `w` uniform in the unit
/// disk and `P(z') = f r s (1 - |w|^2)` with `f` uniform in `[0, 1)` along a
/// uniform direction. Point `i` uses stream `i`; changing `r` moves every
/// point along its own weighted dilation orbit.
pub fn subdomain_grid(d: &GeneralEllipsoid, sp: &SubdomainParams, count: usize, seed: u64) -> Vec<Vec<C64>> {
    use rand::Rng;
    let n = d.n();
    (0..count)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let w = loop {
                let w = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if w.norm_sqr() < 1.0 {
                    break w;
                }
            };
            let f: f64 = rng.gen_range(0.0..1.0);
            let u = unit_sphere(&mut rng, n - 1);
            let target = f * sp.r * sp.s * (1.0 - w.norm_sqr());
            let mut z = if target > 0.0 {
                d.polynomial().weights().dilate(target / d.polynomial().eval(&u), &u)
            } else {
                vec![C64::new(0.0, 0.0); n - 1]
            };
            z.push(C64::new(sp.b(), 0.0) + w * sp.s);
            z
        })
        .collect()
}

/// Empirical floor: minimum estimate over a seeded grid of `D_P^{s,r}`,
/// refined by a constrained local descent from the lowest grid points.
pub fn gamma_floor(
    squeezer: &Squeezer<'_>,
    s: f64,
    r: f64,
    grid_count: usize,
    rays: usize,
    seed: u64,
) -> Result<FloorReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Argument(format!("r must lie in (0, 1), got {r}")));
    }
    let sp = SubdomainParams::new(s, r)?;
    let host = squeezer.region().host();
    let grid = subdomain_grid(host, &sp, grid_count, seed);
    let mut values = Vec::with_capacity(grid.len());
    for z in grid {
        if !squeezer.region().contains(&z) {
            continue;
        }
        let e = squeezer.estimate(&z, rays, derive_seed(seed, 0xf1))?;
        values.push((z, e.value));
    }
    if values.is_empty() {
        return Err(Error::Argument("empty grid".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].1.total_cmp(&values[b].1));
    let grid_floor = values[order[0]].1;
    let eval_seed = derive_seed(seed, 0xf1);
    let mut best = (values[order[0]].0.clone(), grid_floor);
    for &i in order.iter().take(REFINE_STARTS) {
        let (z, v) = descend(squeezer, host, &sp, &values[i].0, values[i].1, rays, eval_seed)?;
        if v < best.1 {
            best = (z, v);
        }
    }
    Ok(FloorReport { floor: best.1, grid_floor, argmin: best.0, values, s, r })
}

const REFINE_STARTS: usize = 6;

/// Compass descent of the estimate over real coordinates, constrained to
/// `D_P^{s,r}`.
fn descend(
    squeezer: &Squeezer<'_>,
    host: &GeneralEllipsoid,
    sp: &SubdomainParams,
    start: &[C64],
    value: f64,
    rays: usize,
    seed: u64,
) -> Result<(Vec<C64>, f64)> {
    let mut z = start.to_vec();
    let mut fz = value;
    let mut h = 0.05;
    let mut evals = 0;
    while h > 5e-4 && evals < 600 {
        let mut improved = false;
        for k in 0..2 * z.len() {
            for sign in [1.0, -1.0] {
                let mut y = z.clone();
                let step = sign * h;
                if k % 2 == 0 {
                    y[k / 2].re += step;
                } else {
                    y[k / 2].im += step;
                }
                if !host.contains_sub(sp, &y) || !squeezer.region().contains(&y) {
                    continue;
                }
                evals += 1;
                let fy = squeezer.estimate(&y, rays, seed)?.value;
                if fy < fz {
                    z = y;
                    fz = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok((z, fz))
}

/// Analytic floor `delta / d` with `delta = dist({P = r}, {P = 1}) / 2` and
/// `d = 2 max |z|` on the boundary, both from seeded samples. This is an
/// interpretation of a constant whose ingredients are not fully specified.
pub fn analytic_floor(squeezer: &Squeezer<'_>, r: f64, samples: usize, seed: u64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Argument(format!("r must lie in (0, 1), got {r}")));
    }
    let p = squeezer.region().host().polynomial();
    let d1 = p.tangential_dim();
    let level = |t: f64, i: usize| -> Vec<C64> {
        let u = unit_sphere(&mut stream_rng(seed, i as u64), d1);
        p.weights().dilate(t / p.eval(&u), &u)
    };
    let inner_level: Vec<Vec<C64>> = (0..samples).map(|i| level(r, i)).collect();
    let outer_level: Vec<Vec<C64>> = (0..samples).map(|i| level(1.0, i + samples)).collect();
    let mut dist = f64::INFINITY;
    for a in &inner_level {
        for b in &outer_level {
            dist = dist.min(norm(&sub(a, b)));
        }
    }
    // each inner point also pairs with its own radial image on the outer level
    for a in &inner_level {
        let radial = p.weights().dilate(1.0 / r, a);
        dist = dist.min(norm(&sub(a, &radial)));
    }
    Ok(dist / 2.0 / (2.0 * squeezer.max_boundary_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn ball_automorphism_identities() {
        let z = vec![c(0.3, 0.1), c(-0.2, 0.4)];
        let zero = vec![c(0.0, 0.0); 2];
        assert_eq!(ball_automorphism(&zero, &z).unwrap(), vec![c(-0.3, -0.1), c(0.2, -0.4)]);
        let cc = vec![c(0.5, -0.1), c(0.2, 0.6)];
        assert!(norm(&ball_automorphism(&cc, &cc).unwrap()) < 1e-15);
        assert!((norm(&ball_automorphism(&cc, &zero).unwrap()) - norm(&cc)).abs() < 1e-15);
        let mut rng = stream_rng(1, 0);
        for _ in 0..1000 {
            let a = unit_sphere(&mut rng, 2).iter().map(|x| x * rng.gen_range(0.0..0.99)).collect::<Vec<_>>();
            let w = unit_sphere(&mut rng, 2).iter().map(|x| x * rng.gen_range(0.0..0.99)).collect::<Vec<_>>();
            let back = ball_automorphism(&a, &ball_automorphism(&a, &w).unwrap()).unwrap();
            assert!(norm(&sub(&back, &w)) < 1e-12);
            assert!(norm(&ball_automorphism(&a, &w).unwrap()) < 1.0);
        }
        assert!(matches!(ball_automorphism(&[c(1.0, 0.0)], &[c(0.0, 0.0)]), Err(Error::Parameter(_))));
    }

    #[test]
    fn inscribed_radius_examples() {
        let ball = GeneralEllipsoid::ball(2).unwrap();
        let r = inscribed_radius(&EmbeddingChain::identity(2), &ball, 2000, 3).unwrap();
        assert!((r - 1.0).abs() < 1e-3);

        let cc = vec![c(0.9, 0.0), c(0.0, 0.0)];
        let chain = EmbeddingChain::new(vec![ChainStep::Ball(cc.clone())], cc);
        assert!((inscribed_radius(&chain, &ball, 2000, 3).unwrap() - 1.0).abs() < 1e-3);

        let e12 = GeneralEllipsoid::power_sum(vec![2]).unwrap();
        let big_r = 1.25f64.sqrt();
        let chain = EmbeddingChain::new(
            vec![ChainStep::Rescale { center: vec![c(0.0, 0.0); 2], radius: big_r }],
            vec![c(0.0, 0.0); 2],
        );
        let r = inscribed_radius(&chain, &e12, 20_000, 3).unwrap();
        // min boundary |z| is 1, attained on the circle z' = 0
        assert!((r - 1.0 / big_r).abs() < 2e-3, "{r}");
        assert!(r >= 1.0 / big_r - 1e-9);

        let off = EmbeddingChain::new(vec![], vec![c(0.1, 0.0), c(0.0, 0.0)]);
        assert!(matches!(inscribed_radius(&off, &ball, 10, 1), Err(Error::Basepoint { .. })));
    }

    #[test]
    fn ball_calibration_small() {
        let ball = GeneralEllipsoid::ball(3).unwrap();
        let sq = Squeezer::new(&ball, SqueezeOptions::default());
        let mut rng = stream_rng(8, 0);
        for _ in 0..5 {
            let u = unit_sphere(&mut rng, 3);
            let p: Vec<C64> = u.iter().map(|x| x * rng.gen_range(0.0f64..1.0).cbrt() * 0.999).collect();
            let e = sq.estimate(&p, 2000, 4).unwrap();
            assert!((e.value - 1.0).abs() < 1e-3, "{} {}", e.value, e.chain.descriptor());
        }
    }

    #[test]
    fn touching_ball_for_power_sum() {
        let e12 = GeneralEllipsoid::power_sum(vec![2]).unwrap();
        let sq = Squeezer::new(&e12, SqueezeOptions::default());
        let (center, radius) = sq.touching_ball(&[c(0.9, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((radius - 2.0).abs() < 1e-6, "{radius}");
        assert!((center[0] - c(-1.0, 0.0)).norm() < 1e-6);
        assert!(sq.touching_ball(&[c(0.0, 0.0), c(0.0, 0.0)]).is_none());
    }

    #[test]
    fn monotone_in_samples() {
        let e12 = GeneralEllipsoid::power_sum(vec![2]).unwrap();
        let sq = Squeezer::new(&e12, SqueezeOptions::default());
        let p = vec![c(0.5, 0.1), c(0.3, -0.2)];
        let small = sq.estimate(&p, 500, 6).unwrap();
        let large = sq.estimate(&p, 1000, 6).unwrap();
        assert!(large.value <= small.value);
        assert_eq!(small.chain, large.chain);
        assert!(large.band >= 0.0);
        assert!(small.value > 0.0 && small.value <= 1.0);
    }

    #[test]
    fn capped_region_uses_full_pullback() {
        let e12 = GeneralEllipsoid::power_sum(vec![2]).unwrap();
        let capped = crate::domain::CappedEllipsoid::new(e12.clone(), 0.5).unwrap();
        let p = vec![c(0.3, 0.0), c(0.8, 0.0)];
        let full = squeeze_lower_bound(&e12, &p, 500, 2).unwrap();
        let cut = squeeze_lower_bound(&capped, &p, 500, 2).unwrap();
        assert!(cut.value <= full.value + 1e-12 || cut.strategy != full.strategy);
        assert!(cut.value > 0.0);
    }

    #[test]
    fn grid_points_lie_in_the_subdomain() {
        let e12 = GeneralEllipsoid::power_sum(vec![2]).unwrap();
        for r in [0.25, 0.5, 0.75] {
            let sp = SubdomainParams::new(0.5, r).unwrap();
            for z in subdomain_grid(&e12, &sp, 200, 3) {
                assert!(e12.contains_sub(&sp, &z));
            }
        }
    }
}
