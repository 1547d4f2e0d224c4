//! Complex dual numbers carrying a first derivative with respect to the phase.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `val + dphi·ε` with `ε² = 0`; `dphi` is ∂val/∂φ.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DualComplex {
    pub val: Complex64,
    pub dphi: Complex64,
}

impl DualComplex {
    pub const ZERO: DualComplex = DualComplex {
        val: ZERO,
        dphi: ZERO,
    };
    pub const ONE: DualComplex = DualComplex {
        val: Complex64::new(1.0, 0.0),
        dphi: ZERO,
    };

    pub const fn new(val: Complex64, dphi: Complex64) -> Self {
        Self { val, dphi }
    }

    /// A φ-independent value.
    pub const fn constant(val: Complex64) -> Self {
        Self { val, dphi: ZERO }
    }

    pub const fn real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    /// The independent variable φ itself.
    pub const fn phase(phi: f64) -> Self {
        Self {
            val: Complex64::new(phi, 0.0),
            dphi: Complex64::new(1.0, 0.0),
        }
    }

    /// Complex conjugate. φ is real, so the derivative conjugates as well.
    pub fn conj(self) -> Self {
        Self::new(self.val.conj(), self.dphi.conj())
    }

    pub fn exp(self) -> Self {
        let e = self.val.exp();
        Self::new(e, e * self.dphi)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.val * k, self.dphi * k)
    }

    pub fn scale_c(self, k: Complex64) -> Self {
        Self::new(self.val * k, self.dphi * k)
    }

    /// `|z|²` as a dual quantity (imaginary parts are exactly zero).
    pub fn norm_sqr(self) -> Self {
        self * self.conj()
    }

    pub fn recip(self) -> Self {
        let inv = self.val.inv();
        Self::new(inv, -self.dphi * inv * inv)
    }

    pub fn powi(self, n: u32) -> Self {
        (0..n).fold(Self::ONE, |acc, _| acc * self)
    }

    pub fn is_zero(&self) -> bool {
        self.val == ZERO && self.dphi == ZERO
    }
}

impl fmt::Display for DualComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})ε", self.val, self.dphi)
    }
}

impl From<Complex64> for DualComplex {
    fn from(val: Complex64) -> Self {
        Self::constant(val)
    }
}

impl From<f64> for DualComplex {
    fn from(x: f64) -> Self {
        Self::real(x)
    }
}

impl Add for DualComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.val + rhs.val, self.dphi + rhs.dphi)
    }
}

impl Sub for DualComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.val - rhs.val, self.dphi - rhs.dphi)
    }
}

impl Mul for DualComplex {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.val * rhs.val,
            self.val * rhs.dphi + self.dphi * rhs.val,
        )
    }
}

impl Div for DualComplex {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl Neg for DualComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.val, -self.dphi)
    }
}

impl Mul<f64> for DualComplex {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

impl Mul<Complex64> for DualComplex {
    type Output = Self;
    fn mul(self, k: Complex64) -> Self {
        self.scale_c(k)
    }
}

impl AddAssign for DualComplex {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.val += rhs.val;
        self.dphi += rhs.dphi;
    }
}

impl SubAssign for DualComplex {
    fn sub_assign(&mut self, rhs: Self) {
        self.val -= rhs.val;
        self.dphi -= rhs.dphi;
    }
}

impl MulAssign for DualComplex {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Sum for DualComplex {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl Product for DualComplex {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Composite expression used to check every rule at once; generic over the
    /// scalar so the same formula runs on plain complex numbers.
    fn composite(phi: DualComplex, a: DualComplex, b: DualComplex) -> DualComplex {
        let i = DualComplex::constant(c(0.0, 1.0));
        let e = (i * phi).exp();
        let u = a * e + b.conj() * phi;
        let v = (b * b.conj() * phi * phi + DualComplex::real(2.0) + i * b).recip();
        u * v.conj() - (a / (e + DualComplex::real(2.5))) + u.norm_sqr()
    }

    fn composite_plain(phi: f64, a: Complex64, b: Complex64) -> Complex64 {
        let i = c(0.0, 1.0);
        let e = (i * phi).exp();
        let u = a * e + b.conj() * phi;
        let v = (b * b.conj() * phi * phi + 2.0 + i * b).inv();
        u * v.conj() - (a / (e + 2.5)) + u * u.conj()
    }

    #[test]
    fn product_rule() {
        let a = DualComplex::new(c(1.0, 2.0), c(0.5, -1.0));
        let b = DualComplex::new(c(-0.3, 0.7), c(2.0, 0.1));
        let p = a * b;
        assert_eq!(p.val, a.val * b.val);
        assert_eq!(p.dphi, a.val * b.dphi + a.dphi * b.val);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = DualComplex::new(c(1.0, 2.0), c(0.5, -1.0));
        let b = DualComplex::new(c(-0.3, 0.7), c(2.0, 0.1));
        let q = (a * b) / b;
        assert!((q.val - a.val).norm() < 1e-14);
        assert!((q.dphi - a.dphi).norm() < 1e-13);
    }

    proptest! {
        #[test]
        fn matches_central_difference(
            phi in -3.0f64..3.0,
            ar in -2.0f64..2.0, ai in -2.0f64..2.0,
            br in -1.0f64..1.0, bi in -1.0f64..1.0,
        ) {
            let a = DualComplex::constant(c(ar, ai));
            let b = DualComplex::constant(c(br, bi));
            let d = composite(DualComplex::phase(phi), a, b);
            // five-point central stencil
            let f = |x: f64| composite_plain(x, a.val, b.val);
            let h = 1e-3;
            let fd = (f(phi - 2.0 * h) - 8.0 * f(phi - h) + 8.0 * f(phi + h) - f(phi + 2.0 * h))
                / (12.0 * h);
            let rel = (d.dphi - fd).norm() / d.dphi.norm().max(1.0);
            prop_assert!(rel <= 1e-7, "rel {rel}");
            prop_assert!((d.val - composite_plain(phi, a.val, b.val)).norm() < 1e-12);
        }
    }
}
