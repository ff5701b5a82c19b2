//! Surfaces of revolution carrying a rotationally invariant magnetic field.
//!
//! A surface is given either in latitude coordinates, as a [`RadialProfile`]
//! (metric `dr² + f(r)² dφ²`, field `b(r) dr∧dφ`), or directly in action
//! coordinates as an [`ActionChart`] (metric `da²/R(a) + dφ²/F(a)`, field
//! `da∧dφ`). [`to_action_chart`] converts the former into the latter.

mod chart;
mod definition;
mod profile;

pub use chart::{
    bertrand_chart, builtin, curvature_report, homogeneity_defect, scalar_curvature_a,
    to_action_chart, ActionChart, BertrandParams, CurvatureReport, CurvatureValue,
    HomogeneityDefect, Representation, BUILTIN_NAMES,
};
pub use definition::{ChartDefinition, CoordinateKind, Table};
pub use profile::{scalar_curvature_r, ProfileFunc, RadialProfile};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of grid points used by grid-based checks unless configured otherwise.
pub const DEFAULT_GRID: usize = 257;

/// Magnetic densities below this magnitude count as zeros.
pub const ZERO_FIELD_THRESHOLD: f64 = 1e-12;

/// An open real interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!("({lo}, {hi}) is not a valid interval")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { x, lo: self.lo, hi: self.hi })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// `n` uniformly spaced interior points `lo + (i + 1) (hi - lo) / (n + 1)`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let step = self.width() / (n as f64 + 1.0);
        (0..n).map(|i| self.lo + (i as f64 + 1.0) * step).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_interior_and_uniform() {
        let iv = Interval::new(-1.0, 1.0).unwrap();
        assert_eq!(iv.grid(3), vec![-0.5, 0.0, 0.5]);
        assert!(iv.grid(257).iter().all(|&x| iv.contains(x)));
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::NAN).is_err());
    }
}
