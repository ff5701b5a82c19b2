use nalgebra::Matrix4;
use serde::Serialize;

use super::state::{GuidingState, PhaseState};
use crate::error::{Error, Result};
use crate::surface::ActionChart;

/// `H = R(a) p_a²/2 + F(a) p_φ²/2`.
pub fn hamiltonian(chart: &ActionChart, state: &PhaseState) -> Result<f64> {
    let (r, f) = chart.jets(state.a)?;
    Ok(0.5 * (r.value() * state.p_a * state.p_a + f.value() * state.p_phi * state.p_phi))
}

/// `K = p_φ + a`, conserved by the flow.
pub fn kinetic_momentum(state: &PhaseState) -> f64 {
    state.p_phi + state.a
}

/// Reduced energy `H / eps²` of a slow-fast state.
pub fn reduced_energy(chart: &ActionChart, g: &GuidingState) -> Result<f64> {
    let (r, f) = chart.jets(g.latitude())?;
    Ok(0.5 * (r.value() * g.pa_hat * g.pa_hat + f.value() * g.pphi_hat * g.pphi_hat))
}

pub(crate) fn rhs_array(chart: &ActionChart, y: &[f64; 4]) -> Result<[f64; 4]> {
    let [a, _, p_a, p_phi] = *y;
    let (r, f) = chart.jets(a)?;
    let a_dot = r.value() * p_a;
    Ok([
        a_dot,
        f.value() * p_phi,
        -0.5 * r.d1() * p_a * p_a - 0.5 * f.d1() * p_phi * p_phi + f.value() * p_phi,
        // written as -ȧ so that a + p_φ is conserved to round-off
        -a_dot,
    ])
}

pub(crate) fn rhs_jacobian(chart: &ActionChart, y: &[f64; 4]) -> Result<Matrix4<f64>> {
    let [a, _, p_a, p_phi] = *y;
    let (r, f) = chart.jets(a)?;
    let (r0, r1, r2) = (r.value(), r.d1(), r.d2());
    let (f0, f1, f2) = (f.value(), f.d1(), f.d2());
    Ok(Matrix4::new(
        r1 * p_a, 0.0, r0, 0.0,
        f1 * p_phi, 0.0, 0.0, f0,
        -0.5 * r2 * p_a * p_a - 0.5 * f2 * p_phi * p_phi + f1 * p_phi, 0.0, -r1 * p_a, -f1 * p_phi + f0,
        -r1 * p_a, 0.0, -r0, 0.0,
    ))
}

/// `(ȧ, φ̇, ṗ_a, ṗ_φ)` of the magnetic flow.
pub fn ode_rhs(chart: &ActionChart, state: &PhaseState) -> Result<[f64; 4]> {
    rhs_array(chart, &state.to_array())
}

pub(crate) fn slowfast_array(chart: &ActionChart, eps: f64, y: &[f64; 4]) -> Result<[f64; 4]> {
    let [a_hat, _, pa, pphi] = *y;
    let (r, f) = chart.jets(a_hat - eps * pphi)?;
    let drift = 0.5 * (r.d1() * pa * pa + f.d1() * pphi * pphi);
    Ok([0.0, eps * eps * drift, -eps * drift + f.value() * pphi, -r.value() * pa])
}

pub(crate) fn slowfast_jacobian(chart: &ActionChart, eps: f64, y: &[f64; 4]) -> Result<Matrix4<f64>> {
    let [a_hat, _, pa, pphi] = *y;
    let (r, f) = chart.jets(a_hat - eps * pphi)?;
    let (r0, r1, r2) = (r.value(), r.d1(), r.d2());
    let (f0, f1, f2) = (f.value(), f.d1(), f.d2());
    // derivative of the drift term with respect to the latitude
    let drift_x = 0.5 * (r2 * pa * pa + f2 * pphi * pphi);
    let drift_pphi = -eps * drift_x + f1 * pphi;
    let e2 = eps * eps;
    Ok(Matrix4::new(
        0.0, 0.0, 0.0, 0.0,
        e2 * drift_x, 0.0, e2 * r1 * pa, e2 * drift_pphi,
        -eps * drift_x + f1 * pphi, 0.0, -eps * r1 * pa, -eps * drift_pphi - eps * f1 * pphi + f0,
        -r1 * pa, 0.0, -r0, eps * r1 * pa,
    ))
}

/// Right-hand side of the slow-fast system in `(â, φ̂, p̂_a, p̂_φ)`.
///
/// The first component is identically zero. At `eps = 0` this is the
/// harmonic limit `(0, 0, F(â) p̂_φ, -R(â) p̂_a)`.
pub fn ode_rhs_slowfast(chart: &ActionChart, g: &GuidingState) -> Result<[f64; 4]> {
    slowfast_array(chart, g.eps, &[g.a_hat, g.phi_hat, g.pa_hat, g.pphi_hat])
}

/// Momentum values of the relative equilibria through latitude `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeEquilibria {
    pub a: f64,
    /// `K = a`: the particle at rest
    pub equilibrium_k: f64,
    /// `K = a + 2F/F'`, present when `F'(a) ≠ 0`
    pub circular_k: Option<f64>,
    pub f_prime: f64,
}

impl RelativeEquilibria {
    pub fn circular(&self) -> Result<f64> {
        self.circular_k.ok_or(Error::NoCircularOrbit { a: self.a, f_prime: self.f_prime })
    }

    /// Phase point of the circular orbit at longitude 0.
    pub fn circular_state(&self) -> Result<PhaseState> {
        let k = self.circular()?;
        Ok(PhaseState::new(self.a, 0.0, 0.0, k - self.a))
    }
}

pub fn relative_equilibria(chart: &ActionChart, a: f64) -> Result<RelativeEquilibria> {
    let f = chart.f_jet(a)?;
    let circular_k = (f.d1().abs() >= 1e-12).then(|| a + 2.0 * f.value() / f.d1());
    Ok(RelativeEquilibria { a, equilibrium_k: a, circular_k, f_prime: f.d1() })
}
