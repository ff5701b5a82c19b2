use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::turning::{radicand, turning_points, ReducedParams, TurningPoints};
use crate::error::Result;
use crate::quadrature::integrate_doubling;
use crate::surface::ActionChart;

/// Relative tolerance of the radial-period quadrature.
pub const PERIOD_TOLERANCE: f64 = 1e-9;
/// Tolerance of the apsidal quadrature.
pub const APSIDAL_TOLERANCE: f64 = 1e-8;

/// `u = mid + half·sin θ` over a pair of simple roots of a radicand `g`.
///
/// With `q(θ) = g(u) / (half² cos² θ)`, `du / √g = dθ / √q` and `q` is
/// smooth and positive up to the endpoints, where it tends to the root
/// slopes `∓ g'(root) / (2 half)`.
pub(crate) struct SineMap {
    mid: f64,
    half: f64,
    q_lo: f64,
    q_hi: f64,
}

impl SineMap {
    pub(crate) fn new(lo: f64, hi: f64, slope_lo: f64, slope_hi: f64) -> Self {
        let half = 0.5 * (hi - lo);
        SineMap { mid: 0.5 * (hi + lo), half, q_lo: slope_lo / (2.0 * half), q_hi: -slope_hi / (2.0 * half) }
    }

    pub(crate) fn half(&self) -> f64 {
        self.half
    }

    /// `(u, cos θ, q)` at `θ`, given the radicand value function.
    pub(crate) fn at(&self, theta: f64, g: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64, f64)> {
        let (s, c) = theta.sin_cos();
        let u = self.mid + self.half * s;
        if c < 1e-6 {
            return Ok((u, c, if s > 0.0 { self.q_hi } else { self.q_lo }));
        }
        Ok((u, c, g(u)? / (self.half * self.half * c * c)))
    }
}

fn sine_map(chart: &ActionChart, p: &ReducedParams, tp: &TurningPoints) -> Result<SineMap> {
    let (_, slope_lo) = radicand(chart, p, tp.root_minus)?;
    let (_, slope_hi) = radicand(chart, p, tp.root_plus)?;
    Ok(SineMap::new(tp.root_minus, tp.root_plus, slope_lo, slope_hi))
}

fn positive(p: &ReducedParams, q: f64, u: f64) -> Result<f64> {
    if q > 0.0 {
        Ok(q)
    } else {
        Err(p.no_turning_points(format!("radicand is not positive at u = {u} between the roots")))
    }
}

fn radial_period_with(chart: &ActionChart, p: &ReducedParams, tp: &TurningPoints) -> Result<f64> {
    let map = sine_map(chart, p, tp)?;
    let integral = integrate_doubling(-FRAC_PI_2, FRAC_PI_2, PERIOD_TOLERANCE, |theta| {
        let (u, _, q) = map.at(theta, |u| Ok(radicand(chart, p, u)?.0))?;
        let q = positive(p, q, u)?;
        Ok(1.0 / (chart.r(p.kappa - p.eps * u)?.sqrt() * q.sqrt()))
    })?;
    Ok(2.0 * integral)
}

fn apsidal_with(chart: &ActionChart, p: &ReducedParams, tp: &TurningPoints) -> Result<f64> {
    let map = sine_map(chart, p, tp)?;
    let w2 = map.half() * map.half();
    integrate_doubling(-FRAC_PI_2, FRAC_PI_2, APSIDAL_TOLERANCE, |theta| {
        let (u, c, q) = map.at(theta, |u| Ok(radicand(chart, p, u)?.0))?;
        let q = positive(p, q, u)?;
        let (r, f) = chart.jets(p.kappa - p.eps * u)?;
        let r0 = r.value();
        let sq = q.sqrt();
        Ok(r.d1() * w2 * c * c * sq / (r0 * r0.sqrt()) + f.d1() * u * u / (r0.sqrt() * sq))
    })
}

/// Time between adjacent pericentres of the reduced system,
/// `2 ∫ du / (√R(κ - εu) √(2Ê - F(κ - εu) u²))` over the turning points.
pub fn radial_period(chart: &ActionChart, p: &ReducedParams) -> Result<f64> {
    radial_period_with(chart, p, &turning_points(chart, p)?)
}

/// Longitude advance of the guiding centre over one radial period, divided
/// by `ε²`.
///
/// At `ε = 0` the same integral gives the limiting value, which equals
/// [`apsidal_limit`].
pub fn apsidal_angle(chart: &ActionChart, p: &ReducedParams) -> Result<f64> {
    apsidal_with(chart, p, &turning_points(chart, p)?)
}

/// `π Ê (R'F + RF') / (RF)^{3/2}` at `κ`, i.e. `-2πÊ d/dκ (RF)^{-1/2}`.
pub fn apsidal_limit(chart: &ActionChart, ehat: f64, kappa: f64) -> Result<f64> {
    let (r, f) = chart.jets(kappa)?;
    let rf = r.value() * f.value();
    Ok(PI * ehat * (r.d1() * f.value() + r.value() * f.d1()) / (rf * rf.sqrt()))
}

/// Limit period `2π / √(R(κ) F(κ))` of the harmonic oscillator at `κ`.
pub fn limit_period(chart: &ActionChart, kappa: f64) -> Result<f64> {
    let (r, f) = chart.jets(kappa)?;
    Ok(2.0 * PI / (r.value() * f.value()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApsidalReport {
    pub params: ReducedParams,
    pub turning: TurningPoints,
    /// radial period
    pub period: f64,
    /// longitude advance per radial period divided by `ε²`
    pub phi_over_eps2: f64,
}

pub fn apsidal_report(chart: &ActionChart, p: &ReducedParams) -> Result<ApsidalReport> {
    let turning = turning_points(chart, p)?;
    Ok(ApsidalReport {
        params: *p,
        turning,
        period: radial_period_with(chart, p, &turning)?,
        phi_over_eps2: apsidal_with(chart, p, &turning)?,
    })
}

/// Reports over the product grid, ordered by `eps`, then `ehat`, then `kappa`.
pub fn reduce_sweep(chart: &ActionChart, eps: &[f64], ehat: &[f64], kappa: &[f64]) -> Result<Vec<ApsidalReport>> {
    let grid: Vec<ReducedParams> = eps
        .iter()
        .flat_map(|&e| ehat.iter().flat_map(move |&h| kappa.iter().map(move |&k| (e, h, k))))
        .map(|(e, h, k)| ReducedParams::new(e, h, k))
        .collect::<Result<_>>()?;
    grid.par_iter()
        .map(|p| {
            apsidal_report(chart, p).map_err(|e| {
                e.context(format!("eps = {}, Ehat = {}, kappa = {}", p.eps, p.ehat, p.kappa))
            })
        })
        .collect()
}

/// CSV with header `eps,Ehat,kappa,A_minus,A_plus,T,Phi_over_eps2`.
pub fn write_sweep_csv<W: Write>(reports: &[ApsidalReport], mut out: W) -> io::Result<()> {
    writeln!(out, "eps,Ehat,kappa,A_minus,A_plus,T,Phi_over_eps2")?;
    for r in reports {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.params.eps,
            r.params.ehat,
            r.params.kappa,
            r.turning.root_minus,
            r.turning.root_plus,
            r.period,
            r.phi_over_eps2
        )?;
    }
    Ok(())
}
