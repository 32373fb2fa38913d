//! Bracketing root finders for level crossings along rays.

/// First sign change of `f` from negative to non-negative over the
/// increasing grid `ts`, assuming `f` is negative just before `ts[0]`.
pub fn bracket_first_crossing<F, I>(mut f: F, ts: I) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
    I: IntoIterator<Item = f64>,
{
    let mut lo = 0.0;
    for t in ts {
        if f(t) >= 0.0 {
            return Some((lo, t));
        }
        lo = t;
    }
    None
}

/// Bisection on `[lo, hi]` with `f(lo) < 0 <= f(hi)` until `hi - lo <= tol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Illinois false position on `[lo, hi]` with `f(lo) < 0 <= f(hi)`.
pub fn illinois<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if fhi == 0.0 {
        return hi;
    }
    let mut side = 0i8;
    for _ in 0..100 {
        if hi - lo <= tol {
            break;
        }
        let mut t = (lo * fhi - hi * flo) / (fhi - flo);
        if !(t > lo && t < hi) {
            t = 0.5 * (lo + hi);
        }
        let ft = f(t);
        if ft >= 0.0 {
            hi = t;
            fhi = ft;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        } else {
            lo = t;
            flo = ft;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        }
        if ft == 0.0 {
            return t;
        }
    }
    0.5 * (lo + hi)
}
