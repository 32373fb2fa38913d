//! Real scalar abstraction shared by the `f64` fast path and the
//! double-double path used where boundary-adjacent quantities cancel.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive};
use twofloat::TwoFloat;

pub type C64 = Complex<f64>;

/// Double-double real (about 32 significant digits).
pub type Dd = TwoFloat;
pub type CDd = Complex<Dd>;

pub trait Scalar: Float + FromPrimitive + Debug + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Principal real `k`-th root of a non-negative value.
    fn real_root(self, k: u32) -> Self;

    /// Correctly rounded-in-type quotient; use instead of `/` on
    /// precision-critical paths.
    fn quot(self, d: Self) -> Self {
        self / d
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn real_root(self, k: u32) -> Self {
        match k {
            1 => self,
            2 => self.sqrt(),
            4 => self.sqrt().sqrt(),
            _ => self.powf(1.0 / f64::from(k)),
        }
    }
}

// twofloat 0.8 leaves `from_f64` to the num-traits default, which truncates
// through i64, and its TwoFloat / TwoFloat drops the low-order correction.
impl Scalar for TwoFloat {
    fn lit(x: f64) -> Self {
        TwoFloat::from(x)
    }

    fn quot(self, d: Self) -> Self {
        let q0 = self.hi() / d.hi();
        let r = self - d * q0;
        let q1 = r.hi() / d.hi();
        let r = r - d * q1;
        let q2 = r.hi() / d.hi();
        TwoFloat::from(q0) + q1 + q2
    }

    fn real_root(self, k: u32) -> Self {
        // twofloat's powf loses ~5 digits; Newton-polish an f64 seed instead.
        if self == TwoFloat::from(0.0) || k == 1 {
            return self;
        }
        if k == 2 {
            return self.sqrt();
        }
        if k.is_power_of_two() {
            let mut y = self;
            let mut j = k;
            while j > 1 {
                y = y.sqrt();
                j /= 2;
            }
            return y;
        }
        let kk = TwoFloat::from(f64::from(k));
        let mut y = TwoFloat::from(self.hi().real_root(k));
        for _ in 0..3 {
            let ykm1 = ipow(y, k - 1);
            y = y - (ykm1 * y - self).quot(kk * ykm1);
        }
        y
    }
}

/// Integer power by repeated squaring.
pub fn ipow<T: Copy + std::ops::Mul<Output = T> + num_traits::One>(x: T, mut k: u32) -> T {
    let mut base = x;
    let mut acc = T::one();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        k >>= 1;
    }
    acc
}

pub fn lift<T: Scalar>(z: &[C64]) -> Vec<Complex<T>> {
    z.iter().map(|c| Complex::new(T::lit(c.re), T::lit(c.im))).collect()
}

pub fn lower<T: Scalar>(z: &[Complex<T>]) -> Vec<C64> {
    z.iter().map(|c| C64::new(c.re.as_f64(), c.im.as_f64())).collect()
}

pub fn lift_c<T: Scalar>(c: C64) -> Complex<T> {
    Complex::new(T::lit(c.re), T::lit(c.im))
}
