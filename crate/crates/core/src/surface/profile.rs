use std::sync::Arc;

use super::{Interval, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::func::Func;
use crate::jet::Jet;
use crate::quadrature::integrate_doubling;
use crate::spline::CubicSpline;

/// A profile function of the latitude `r`: closed form or spline through a table.
#[derive(Debug, Clone)]
pub enum ProfileFunc {
    Analytic(Func),
    Tabulated(Arc<CubicSpline>),
}

impl ProfileFunc {
    pub fn jet(&self, r: f64) -> Jet {
        match self {
            ProfileFunc::Analytic(f) => f.jet(r),
            ProfileFunc::Tabulated(s) => s.jet(r),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            ProfileFunc::Analytic(f) => f.eval(r),
            ProfileFunc::Tabulated(s) => s.eval(r),
        }
    }

    fn is_tabulated(&self) -> bool {
        matches!(self, ProfileFunc::Tabulated(_))
    }
}

/// Surface of revolution `dr² + f(r)² dφ²` with field `b(r) dr∧dφ` on `(r₁, r₂)`.
///
/// The action coordinate `a(r)` is the antiderivative of `b` normalised by
/// `a(r_ref) = 0`; `r_ref` defaults to the interval midpoint.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    interval: Interval,
    r_ref: f64,
    f: ProfileFunc,
    b: ProfileFunc,
}

impl RadialProfile {
    pub fn new(interval: Interval, f: Func, b: Func) -> Result<Self> {
        Self::build(interval, ProfileFunc::Analytic(f), ProfileFunc::Analytic(b))
    }

    /// Profile interpolated from a table of `(r, f, b)` rows.
    pub fn tabulated(r: Vec<f64>, f: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let fs = CubicSpline::new(r.clone(), f)?;
        let bs = CubicSpline::new(r, b)?;
        let interval = Interval::new(fs.lo(), fs.hi())?;
        Self::build(
            interval,
            ProfileFunc::Tabulated(Arc::new(fs)),
            ProfileFunc::Tabulated(Arc::new(bs)),
        )
    }

    fn build(interval: Interval, f: ProfileFunc, b: ProfileFunc) -> Result<Self> {
        let profile = RadialProfile { interval, r_ref: interval.midpoint(), f, b };
        for r in interval.grid(DEFAULT_GRID) {
            let value = profile.f.eval(r);
            if !(value > 0.0) {
                return Err(Error::NonPositiveRadius { r, value });
            }
        }
        Ok(profile)
    }

    /// The same profile on a sub-interval; the reference latitude moves to its midpoint.
    pub fn restricted(mut self, interval: Interval) -> Result<Self> {
        if interval.lo < self.interval.lo || interval.hi > self.interval.hi {
            return Err(Error::InvalidInput(format!(
                "({}, {}) is not inside the profile range ({}, {})",
                interval.lo, interval.hi, self.interval.lo, self.interval.hi
            )));
        }
        self.interval = interval;
        self.r_ref = interval.midpoint();
        Ok(self)
    }

    pub fn with_reference(mut self, r_ref: f64) -> Result<Self> {
        self.interval.check(r_ref)?;
        self.r_ref = r_ref;
        Ok(self)
    }

    /// Unit sphere `f = sin r` with homogeneous field `b = λ sin r`.
    pub fn sphere(interval: Interval, lambda: f64) -> Result<Self> {
        Self::new(
            interval,
            Func::Sin { amp: 1.0, freq: 1.0, phase: 0.0 },
            Func::Sin { amp: lambda, freq: 1.0, phase: 0.0 },
        )
    }

    /// Hyperbolic plane in the form `f = cosh r` with homogeneous field `b = λ cosh r`.
    pub fn hyperbolic(interval: Interval, lambda: f64) -> Result<Self> {
        Self::new(
            interval,
            Func::Cosh { amp: 1.0, freq: 1.0, shift: 0.0 },
            Func::Cosh { amp: lambda, freq: 1.0, shift: 0.0 },
        )
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn r_ref(&self) -> f64 {
        self.r_ref
    }

    pub fn is_tabulated(&self) -> bool {
        self.f.is_tabulated() || self.b.is_tabulated()
    }

    pub fn f_jet(&self, r: f64) -> Jet {
        self.f.jet(r)
    }

    pub fn b_jet(&self, r: f64) -> Jet {
        self.b.jet(r)
    }

    /// Jet of the action coordinate `a(r)` (value, `b`, `b'`, `b''`).
    pub fn a_jet(&self, r: f64) -> Result<Jet> {
        let b = self.b.jet(r);
        Ok(Jet::new(self.action(r)?, b.value(), b.d1(), b.d2()))
    }

    /// `a(r) = ∫_{r_ref}^{r} b`.
    pub fn action(&self, r: f64) -> Result<f64> {
        match &self.b {
            ProfileFunc::Tabulated(s) => Ok(s.integral(r) - s.integral(self.r_ref)),
            ProfileFunc::Analytic(func) => match (func.antiderivative(r), func.antiderivative(self.r_ref)) {
                (Some(hi), Some(lo)) => Ok(hi - lo),
                _ => integrate_doubling(self.r_ref, r, 1e-14, |x| Ok(func.eval(x))),
            },
        }
    }
}

/// Scalar curvature `-2 f''(r) / f(r)` (twice the Gauss curvature).
pub fn scalar_curvature_r(profile: &RadialProfile, r: f64) -> Result<f64> {
    profile.interval.check(r)?;
    let f = profile.f.jet(r);
    Ok(-2.0 * f.d2() / f.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn curvature_of_model_surfaces() {
        let flat = RadialProfile::new(
            Interval::new(0.0, 1.0).unwrap(),
            Func::constant(1.0),
            Func::constant(1.0),
        )
        .unwrap();
        assert_eq!(scalar_curvature_r(&flat, 0.3).unwrap(), 0.0);

        let sphere = RadialProfile::sphere(Interval::new(0.1, PI - 0.1).unwrap(), 1.0).unwrap();
        assert_relative_eq!(scalar_curvature_r(&sphere, PI / 2.0).unwrap(), 2.0, epsilon = 1e-15);

        let hyp = RadialProfile::hyperbolic(Interval::new(-1.0, 1.0).unwrap(), 1.0).unwrap();
        assert_relative_eq!(scalar_curvature_r(&hyp, 0.0).unwrap(), -2.0, epsilon = 1e-15);

        assert!(matches!(
            scalar_curvature_r(&hyp, 1.5),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn action_is_normalised_at_reference() {
        let sphere = RadialProfile::sphere(Interval::new(0.1, PI - 0.1).unwrap(), 1.0).unwrap();
        assert_eq!(sphere.r_ref(), PI / 2.0);
        assert_relative_eq!(sphere.action(PI / 2.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(sphere.action(1.0).unwrap(), -1f64.cos(), epsilon = 1e-15);
    }

    #[test]
    fn numeric_antiderivative_fallback() {
        let p = RadialProfile::new(
            Interval::new(0.0, 1.0).unwrap(),
            Func::constant(1.0),
            Func::Recip { num: 1.0, den: Box::new(Func::Poly(vec![1.0, 1.0])) },
        )
        .unwrap();
        // ∫_{1/2}^{r} dx/(1+x) = ln((1+r)/1.5)
        assert_relative_eq!(p.action(0.9).unwrap(), (1.9f64 / 1.5).ln(), epsilon = 1e-14);
    }

    #[test]
    fn non_positive_radius_is_rejected() {
        let err = RadialProfile::new(
            Interval::new(-1.0, 1.0).unwrap(),
            Func::Poly(vec![0.0, 1.0]),
            Func::constant(1.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonPositiveRadius { .. }));
    }
}
