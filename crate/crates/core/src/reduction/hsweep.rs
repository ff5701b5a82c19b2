use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use super::apsidal::SineMap;
use super::taylor::h4_coefficient;
use crate::error::{Error, Result};
use crate::fit::fit_powers;
use crate::quadrature::integrate_doubling;
use crate::surface::{homogeneity_defect, ActionChart, DEFAULT_GRID};

/// Powers of `h` in the sweep fit. The `h⁶` column absorbs the next order
/// of the expansion so that it does not leak into the lower coefficients.
pub const SWEEP_POWERS: [i32; 4] = [0, 2, 4, 6];

const SWEEP_QUADRATURE_TOLERANCE: f64 = 1e-14;

/// Energy and kinetic momentum of the unit-scale orbit whose latitude
/// oscillates between `c - h` and `c + h`.
///
/// Solves `F(c ∓ h)(K - c ± h)² = 2E` by Newton with the analytic Jacobian,
/// starting from `K = c`, `E = F(c) h²/2`.
pub fn orbit_for_latitudes(chart: &ActionChart, c: f64, h: f64) -> Result<(f64, f64)> {
    let (lo, hi) = (c - h, c + h);
    let (f_lo, f_hi) = (chart.f(lo)?, chart.f(hi)?);
    let failed = || Error::NewtonFailed { c, h };
    let mut k = c;
    let mut e = 0.5 * chart.f(c)? * h * h;
    for _ in 0..50 {
        let residual = Vector2::new(
            f_lo * (k - lo).powi(2) - 2.0 * e,
            f_hi * (k - hi).powi(2) - 2.0 * e,
        );
        let jac = Matrix2::new(2.0 * f_lo * (k - lo), -2.0, 2.0 * f_hi * (k - hi), -2.0);
        let delta = jac.lu().solve(&(-residual)).ok_or_else(failed)?;
        k += delta[0];
        e += delta[1];
        if delta[0].abs() <= 4.0 * f64::EPSILON * k.abs().max(h) && delta[1].abs() <= 4.0 * f64::EPSILON * e {
            break;
        }
    }
    let scale = 2.0 * e;
    let converged = (f_lo * (k - lo).powi(2) - scale).abs() <= 1e-12 * scale
        && (f_hi * (k - hi).powi(2) - scale).abs() <= 1e-12 * scale;
    if !(converged && e > 0.0 && k > lo && k < hi) {
        return Err(failed());
    }
    Ok((k, e))
}

/// Longitude advance over one radial period of the unit-scale orbit with
/// energy `e` and kinetic momentum `k` between latitudes `c ∓ h`, for a
/// homogeneous field with `RF = λ²`.
pub fn longitude_advance(chart: &ActionChart, c: f64, h: f64, k: f64, e: f64, lambda: f64) -> Result<f64> {
    let radicand = |a: f64| -> Result<(f64, f64)> {
        let f = chart.f_jet(a)?;
        let p = k - a;
        Ok((2.0 * e - f.value() * p * p, -f.d1() * p * p + 2.0 * f.value() * p))
    };
    let map = SineMap::new(c - h, c + h, radicand(c - h)?.1, radicand(c + h)?.1);
    let integral = integrate_doubling(-FRAC_PI_2, FRAC_PI_2, SWEEP_QUADRATURE_TOLERANCE, |theta| {
        let (a, _, q) = map.at(theta, |a| Ok(radicand(a)?.0))?;
        if !(q > 0.0) {
            return Err(Error::NewtonFailed { c, h });
        }
        let f = chart.f(a)?;
        Ok(f * f.sqrt() * (k - a) / q.sqrt())
    })?;
    Ok(2.0 * integral / lambda.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub h: f64,
    pub energy: f64,
    pub momentum: f64,
    /// longitude advance per radial period
    pub phi: f64,
    /// `|λ| Φ / (2 F(c))`, the fitted quantity
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HSweep {
    pub c: f64,
    pub lambda_sq: f64,
    pub points: Vec<SweepPoint>,
    /// `h` values dropped because the quadrature did not converge
    pub discarded: Vec<f64>,
    /// fitted coefficients of `h⁰, h², h⁴, h⁶`
    pub coefficients: [f64; 4],
    /// `(π/8)(3F̂₁³ - 6F̂₁F̂₂ + 3F̂₃)` at `c`
    pub predicted_h4: f64,
}

impl HSweep {
    pub fn h0(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn h2(&self) -> f64 {
        self.coefficients[1]
    }

    pub fn h4(&self) -> f64 {
        self.coefficients[2]
    }

    /// CSV with header `h,E,K,Phi,normalized`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "h,E,K,Phi,normalized")?;
        for p in &self.points {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", p.h, p.energy, p.momentum, p.phi, p.normalized)?;
        }
        Ok(())
    }
}

/// Expand the unit-scale longitude advance in the half-width `h` of the
/// latitude band around `c` and compare the `h⁴` coefficient with the
/// Taylor prediction.
///
/// The chart must be homogeneous (`RF` constant within `1e-8 λ²`).
pub fn apsidal_h_sweep(chart: &ActionChart, c: f64, h_list: &[f64]) -> Result<HSweep> {
    let homogeneity = homogeneity_defect(chart, DEFAULT_GRID)?;
    let lambda_sq = homogeneity.lambda_sq_mean;
    let tolerance = 1e-8 * lambda_sq.abs();
    if homogeneity.defect > tolerance {
        return Err(Error::NotHomogeneous { defect: homogeneity.defect, tolerance });
    }
    let lambda = lambda_sq.sqrt();
    let f_c = chart.f(c)?;
    let mut points = Vec::with_capacity(h_list.len());
    let mut discarded = Vec::new();
    for &h in h_list {
        if !(h > 0.0) {
            return Err(Error::InvalidInput(format!("sweep half-widths must be positive, got {h}")));
        }
        let (k, e) = orbit_for_latitudes(chart, c, h)?;
        match longitude_advance(chart, c, h, k, e, lambda) {
            Ok(phi) => points.push(SweepPoint {
                h,
                energy: e,
                momentum: k,
                phi,
                normalized: lambda * phi / (2.0 * f_c),
            }),
            Err(Error::QuadratureNotConverged { .. }) => discarded.push(h),
            Err(other) => return Err(other),
        }
    }
    if points.len() < SWEEP_POWERS.len() {
        return Err(Error::InvalidInput(format!(
            "h sweep needs at least {} usable half-widths, got {}",
            SWEEP_POWERS.len(),
            points.len()
        )));
    }
    let hs: Vec<f64> = points.iter().map(|p| p.h).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.normalized).collect();
    let fitted = fit_powers(&hs, &ys, &SWEEP_POWERS)?;
    Ok(HSweep {
        c,
        lambda_sq,
        points,
        discarded,
        coefficients: [fitted[0], fitted[1], fitted[2], fitted[3]],
        predicted_h4: h4_coefficient(chart, c)?.taylor_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builtin;
    use approx::assert_relative_eq;

    #[test]
    fn latitude_inversion_matches_closed_form() {
        let chart = builtin("exp").unwrap();
        let (c, h) = (0.1, 0.15);
        let (k, e) = orbit_for_latitudes(&chart, c, h).unwrap();
        // equal and opposite momenta at the two ends give K in closed form
        let (s_lo, s_hi) = ((c - h).exp().sqrt(), (c + h).exp().sqrt());
        let k_exact = c + h * (s_hi - s_lo) / (s_hi + s_lo);
        assert_relative_eq!(k, k_exact, epsilon = 1e-15);
        assert_relative_eq!(2.0 * e, (c - h).exp() * (k_exact - c + h).powi(2), max_relative = 1e-14);
    }

    #[test]
    fn flat_sweep_vanishes() {
        let chart = builtin("flat").unwrap();
        let sweep = apsidal_h_sweep(&chart, 0.0, &[0.05, 0.1, 0.15, 0.2]).unwrap();
        for c in sweep.coefficients {
            assert!(c.abs() < 1e-8, "{:?}", sweep.coefficients);
        }
    }

    #[test]
    fn non_homogeneous_chart_is_rejected() {
        let chart = builtin("quadratic").unwrap();
        assert!(matches!(
            apsidal_h_sweep(&chart, 0.0, &[0.05, 0.1, 0.15, 0.2]),
            Err(Error::NotHomogeneous { .. })
        ));
    }

    #[test]
    fn exponential_h4_matches_taylor_prediction() {
        let chart = builtin("exp").unwrap();
        let sweep = apsidal_h_sweep(&chart, 0.0, &[0.05, 0.1, 0.15, 0.2]).unwrap();
        assert_relative_eq!(sweep.predicted_h4, std::f64::consts::PI / 16.0, epsilon = 1e-14);
        assert_relative_eq!(sweep.h4(), sweep.predicted_h4, max_relative = 0.05);
        assert!(sweep.h0().abs() < 1e-6 && sweep.h2().abs() < 1e-6, "{:?}", sweep.coefficients);
    }
}
