use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::ActionChart;

const NEWTON_MAX_ITERATIONS: usize = 50;
const ROOT_RESIDUAL: f64 = 1e-13;

/// Parameters `(ε, Ê, κ)` of the reduced one-degree-of-freedom system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedParams {
    pub eps: f64,
    pub ehat: f64,
    pub kappa: f64,
}

impl ReducedParams {
    pub fn new(eps: f64, ehat: f64, kappa: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("eps must be finite and non-negative, got {eps}")));
        }
        if !(ehat > 0.0 && ehat < 1.0) {
            return Err(Error::InvalidInput(format!("reduced energy must lie in (0, 1), got {ehat}")));
        }
        if !kappa.is_finite() {
            return Err(Error::InvalidInput(format!("kappa must be finite, got {kappa}")));
        }
        Ok(ReducedParams { eps, ehat, kappa })
    }

    pub(crate) fn no_turning_points(&self, reason: impl Into<String>) -> Error {
        Error::NoTurningPoints { eps: self.eps, ehat: self.ehat, kappa: self.kappa, reason: reason.into() }
    }
}

/// Roots `A₋ < 0 < A₊` of `2Ê - F(κ - εu) u²` and the matching latitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningPoints {
    #[serde(rename = "A_minus")]
    pub root_minus: f64,
    #[serde(rename = "A_plus")]
    pub root_plus: f64,
    /// `κ - ε A₊`, the lowest latitude (pericentre)
    pub a_minus: f64,
    /// `κ - ε A₋`, the highest latitude (apocentre)
    pub a_plus: f64,
}

/// Radicand `g(u) = 2Ê - F(κ - εu) u²` and its derivative in `u`.
pub(crate) fn radicand(chart: &ActionChart, p: &ReducedParams, u: f64) -> Result<(f64, f64)> {
    let f = chart.f_jet(p.kappa - p.eps * u)?;
    Ok((
        2.0 * p.ehat - f.value() * u * u,
        p.eps * f.d1() * u * u - 2.0 * f.value() * u,
    ))
}

/// `Û(u) = F(κ - εu) u²/2`.
pub fn effective_potential(chart: &ActionChart, eps: f64, kappa: f64, u: f64) -> Result<f64> {
    Ok(0.5 * chart.f(kappa - eps * u)? * u * u)
}

fn newton_root(chart: &ActionChart, p: &ReducedParams, seed: f64) -> Result<f64> {
    let mut u = seed;
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let (g, dg) = radicand(chart, p, u)
            .map_err(|_| p.no_turning_points(format!("Newton left the chart near u = {u}")))?;
        if dg == 0.0 {
            return Err(p.no_turning_points("radicand has a critical point"));
        }
        let delta = g / dg;
        u -= delta;
        if delta.abs() <= 4.0 * f64::EPSILON * u.abs().max(1e-300) {
            break;
        }
    }
    let (g, _) = radicand(chart, p, u).map_err(|_| p.no_turning_points("root lies outside the chart"))?;
    if !(g.abs() < ROOT_RESIDUAL) {
        return Err(p.no_turning_points(format!("Newton stalled with residual {g:e}")));
    }
    Ok(u)
}

/// Turning points of the reduced system, by Newton from the `ε = 0` roots
/// `±√(2Ê/F(κ))`.
pub fn turning_points(chart: &ActionChart, p: &ReducedParams) -> Result<TurningPoints> {
    let f_kappa = chart.f(p.kappa)?;
    let limit = (2.0 * p.ehat / f_kappa).sqrt();
    let (root_minus, root_plus) = if p.eps == 0.0 {
        (-limit, limit)
    } else {
        (newton_root(chart, p, -limit)?, newton_root(chart, p, limit)?)
    };
    if !(root_minus < 0.0 && root_plus > 0.0) {
        return Err(p.no_turning_points("roots do not bracket zero"));
    }
    let (_, slope_minus) = radicand(chart, p, root_minus)?;
    let (_, slope_plus) = radicand(chart, p, root_plus)?;
    if !(slope_minus > 0.0 && slope_plus < 0.0) {
        return Err(p.no_turning_points("roots are not simple"));
    }
    Ok(TurningPoints {
        root_minus,
        root_plus,
        a_minus: p.kappa - p.eps * root_plus,
        a_plus: p.kappa - p.eps * root_minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builtin;
    use approx::assert_relative_eq;

    #[test]
    fn params_are_validated() {
        assert!(ReducedParams::new(0.1, 0.5, 0.0).is_ok());
        assert!(ReducedParams::new(-0.1, 0.5, 0.0).is_err());
        assert!(ReducedParams::new(0.1, 1.0, 0.0).is_err());
        assert!(ReducedParams::new(0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn effective_potential_examples() {
        let flat = builtin("flat").unwrap();
        let sphere = builtin("sphere").unwrap();
        assert_eq!(effective_potential(&flat, 0.3, 0.1, 0.0).unwrap(), 0.0);
        assert_eq!(effective_potential(&flat, 0.3, 0.1, 1.0).unwrap(), 0.5);
        assert_eq!(effective_potential(&sphere, 0.0, 0.0, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn flat_roots_are_unit() {
        let flat = builtin("flat").unwrap();
        for eps in [0.0, 0.05, 0.2] {
            let tp = turning_points(&flat, &ReducedParams::new(eps, 0.5, 0.0).unwrap()).unwrap();
            assert_eq!((tp.root_minus, tp.root_plus), (-1.0, 1.0));
        }
    }

    #[test]
    fn limit_roots() {
        let chart = builtin("exp").unwrap();
        let tp = turning_points(&chart, &ReducedParams::new(0.0, 0.5, 0.0).unwrap()).unwrap();
        assert_eq!((tp.root_minus, tp.root_plus), (-1.0, 1.0));
    }

    #[test]
    fn sphere_roots_match_bisection() {
        let chart = builtin("sphere").unwrap();
        let p = ReducedParams::new(0.1, 0.5, 0.0).unwrap();
        let tp = turning_points(&chart, &p).unwrap();
        // independent oracle: bisection on 1 - u²/(1 - 0.01u²)
        let g = |u: f64| 1.0 - u * u / (1.0 - 0.01 * u * u);
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (g(mid) > 0.0) == (g(lo) > 0.0) {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            0.5 * (lo + hi)
        };
        assert_relative_eq!(tp.root_plus, bisect(0.0, 2.0), epsilon = 1e-14);
        assert_relative_eq!(tp.root_minus, bisect(0.0, -2.0), epsilon = 1e-14);
        assert!(radicand(&chart, &p, tp.root_plus).unwrap().0.abs() < 1e-13);
        assert_relative_eq!(tp.a_minus, -0.1 * tp.root_plus);
    }

    #[test]
    fn too_large_eps_fails() {
        let chart = builtin("sphere").unwrap();
        let err = turning_points(&chart, &ReducedParams::new(5.0, 0.9, 0.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NoTurningPoints { .. }), "{err:?}");
    }
}
