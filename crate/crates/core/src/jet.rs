//! Third-order derivative jets.
//!
//! A [`Jet`] carries the value of a scalar function together with its first
//! three derivatives at a point. The arithmetic below propagates those
//! derivatives exactly (Leibniz rule for products, Faà di Bruno for
//! composition), which is all the curvature and h⁴ computations need.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    /// `d[k]` is the k-th derivative.
    pub d: [f64; 4],
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Jet { d: [v, d1, d2, d3] }
    }

    pub const fn constant(v: f64) -> Self {
        Jet::new(v, 0.0, 0.0, 0.0)
    }

    /// The identity function evaluated at `x`.
    pub const fn variable(x: f64) -> Self {
        Jet::new(x, 1.0, 0.0, 0.0)
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.d[0]
    }

    #[inline]
    pub fn d1(&self) -> f64 {
        self.d[1]
    }

    #[inline]
    pub fn d2(&self) -> f64 {
        self.d[2]
    }

    #[inline]
    pub fn d3(&self) -> f64 {
        self.d[3]
    }

    pub fn scale(self, s: f64) -> Self {
        Jet { d: self.d.map(|x| x * s) }
    }

    /// `outer ∘ inner`, where `outer` holds the derivatives of the outer
    /// function evaluated at `inner.value()`.
    pub fn compose(outer: Jet, inner: Jet) -> Jet {
        let [_, i1, i2, i3] = inner.d;
        let [o0, o1, o2, o3] = outer.d;
        Jet::new(
            o0,
            o1 * i1,
            o2 * i1 * i1 + o1 * i2,
            o3 * i1 * i1 * i1 + 3.0 * o2 * i1 * i2 + o1 * i3,
        )
    }

    pub fn recip(self) -> Jet {
        let v = self.value();
        let outer = Jet::new(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v), -6.0 / (v * v * v * v));
        Jet::compose(outer, self)
    }

    pub fn sqrt(self) -> Jet {
        let s = self.value().sqrt();
        let v = self.value();
        let outer = Jet::new(s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v));
        Jet::compose(outer, self)
    }

    pub fn square(self) -> Jet {
        self * self
    }

    /// Jet of the inverse function `x(y)` at `y = self.value()`, given the
    /// jet of the monotone function `y(x)`.
    pub fn inverse(self) -> Jet {
        let [_, a1, a2, a3] = self.d;
        let inv1 = 1.0 / a1;
        Jet::new(
            f64::NAN,
            inv1,
            -a2 * inv1 * inv1 * inv1,
            (3.0 * a2 * a2 - a1 * a3) * inv1.powi(5),
        )
    }

    /// Taylor coefficients `d[k] / k!`.
    pub fn taylor(&self) -> [f64; 4] {
        [self.d[0], self.d[1], self.d[2] / 2.0, self.d[3] / 6.0]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet { d: std::array::from_fn(|k| self.d[k] + rhs.d[k]) }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet { d: std::array::from_fn(|k| self.d[k] - rhs.d[k]) }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let [f0, f1, f2, f3] = self.d;
        let [g0, g1, g2, g3] = rhs.d;
        Jet::new(
            f0 * g0,
            f1 * g0 + f0 * g1,
            f2 * g0 + 2.0 * f1 * g1 + f0 * g2,
            f3 * g0 + 3.0 * f2 * g1 + 3.0 * f1 * g2 + f0 * g3,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp_jet(x: f64) -> Jet {
        let e = x.exp();
        Jet::new(e, e, e, e)
    }

    #[test]
    fn product_matches_closed_form() {
        // x * e^x: derivatives (x + k) e^x
        let x = 0.7;
        let j = Jet::variable(x) * exp_jet(x);
        for k in 0..4 {
            assert_relative_eq!(j.d[k], (x + k as f64) * x.exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn composition_of_exp_and_square() {
        // e^{x^2}: 2x e, (2 + 4x^2) e, (12x + 8x^3) e
        let x = 0.4;
        let inner = Jet::variable(x).square();
        let j = Jet::compose(exp_jet(inner.value()), inner);
        let e = (x * x).exp();
        assert_relative_eq!(j.d1(), 2.0 * x * e, max_relative = 1e-14);
        assert_relative_eq!(j.d2(), (2.0 + 4.0 * x * x) * e, max_relative = 1e-14);
        assert_relative_eq!(j.d3(), (12.0 * x + 8.0 * x.powi(3)) * e, max_relative = 1e-14);
    }

    #[test]
    fn recip_and_sqrt() {
        let x = 1.3;
        let r = Jet::variable(x).recip();
        assert_relative_eq!(r.d3(), -6.0 / x.powi(4), max_relative = 1e-14);
        let s = Jet::variable(x).sqrt();
        assert_relative_eq!(s.d3(), 0.375 * x.powf(-2.5), max_relative = 1e-14);
    }

    #[test]
    fn inverse_of_exp_is_log() {
        let y = 2.0_f64;
        let inv = exp_jet(y.ln()).inverse();
        assert_relative_eq!(inv.d1(), 1.0 / y, max_relative = 1e-14);
        assert_relative_eq!(inv.d2(), -1.0 / (y * y), max_relative = 1e-14);
        assert_relative_eq!(inv.d3(), 2.0 / y.powi(3), max_relative = 1e-14);
    }
}
