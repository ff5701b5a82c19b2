use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::ActionChart;

/// Reduce an angle to `[0, 2π)`.
pub fn normalize_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Difference `x - y` of two angles, reduced to `(-π, π]`.
pub fn angle_difference(x: f64, y: f64) -> f64 {
    let d = normalize_angle(x - y);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

/// Canonical phase point `(a, φ, p_a, p_φ)`; `φ` is kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseState {
    pub a: f64,
    pub phi: f64,
    pub p_a: f64,
    pub p_phi: f64,
}

impl PhaseState {
    pub fn new(a: f64, phi: f64, p_a: f64, p_phi: f64) -> Self {
        PhaseState { a, phi: normalize_angle(phi), p_a, p_phi }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.phi.is_finite() && self.p_a.is_finite() && self.p_phi.is_finite()
    }

    pub fn is_at_rest(&self) -> bool {
        self.p_a == 0.0 && self.p_phi == 0.0
    }

    /// Euclidean distance with the longitude compared on the circle.
    pub fn distance(&self, other: &PhaseState) -> f64 {
        let dphi = angle_difference(self.phi, other.phi);
        ((self.a - other.a).powi(2)
            + dphi * dphi
            + (self.p_a - other.p_a).powi(2)
            + (self.p_phi - other.p_phi).powi(2))
        .sqrt()
    }

    pub(crate) fn to_array(self) -> [f64; 4] {
        [self.a, self.phi, self.p_a, self.p_phi]
    }
}

/// Guiding-centre variables with momenta measured in units of `eps`.
///
/// `a_hat = a + p_φ`, `phi_hat = φ - p_a`, and the physical momenta are
/// `eps * pa_hat`, `eps * pphi_hat`. `eps = 1` is the unscaled transform;
/// `eps = 0` stands for the limit system, whose physical momenta vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuidingState {
    pub a_hat: f64,
    pub phi_hat: f64,
    pub pa_hat: f64,
    pub pphi_hat: f64,
    pub eps: f64,
}

impl GuidingState {
    pub fn new(a_hat: f64, phi_hat: f64, pa_hat: f64, pphi_hat: f64, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("scale parameter must be finite and non-negative, got {eps}")));
        }
        Ok(GuidingState { a_hat, phi_hat: normalize_angle(phi_hat), pa_hat, pphi_hat, eps })
    }

    /// Slow-fast initial data at latitude `a` moving in direction `theta` with
    /// reduced energy `1/2`, so that the speed is `eps`.
    ///
    /// `theta = 0` points along `+a`, `theta = π/2` along `+φ`.
    pub fn from_direction(chart: &ActionChart, a: f64, phi: f64, theta: f64, eps: f64) -> Result<Self> {
        let (r, f) = chart.jets(a)?;
        let pa_hat = theta.cos() / r.value().sqrt();
        let pphi_hat = theta.sin() / f.value().sqrt();
        GuidingState::new(a + eps * pphi_hat, phi - eps * pa_hat, pa_hat, pphi_hat, eps)
    }

    /// Latitude `a = a_hat - eps * pphi_hat` of the underlying particle.
    pub fn latitude(&self) -> f64 {
        self.a_hat - self.eps * self.pphi_hat
    }

    pub fn to_phase(&self) -> PhaseState {
        let p_a = self.eps * self.pa_hat;
        let p_phi = self.eps * self.pphi_hat;
        PhaseState::new(self.a_hat - p_phi, self.phi_hat + p_a, p_a, p_phi)
    }

    /// Guiding transform followed by a scale change to `eps`.
    pub fn from_phase(state: &PhaseState, eps: f64) -> Result<Self> {
        scale_change(&guiding_transform(state), eps)
    }
}

/// `(a, φ, p_a, p_φ) ↦ (a + p_φ, φ - p_a, p_a, p_φ)` at unit scale.
pub fn guiding_transform(state: &PhaseState) -> GuidingState {
    GuidingState {
        a_hat: state.a + state.p_phi,
        phi_hat: normalize_angle(state.phi - state.p_a),
        pa_hat: state.p_a,
        pphi_hat: state.p_phi,
        eps: 1.0,
    }
}

/// Inverse of [`guiding_transform`]; any scale is undone first.
pub fn inverse_guiding_transform(g: &GuidingState) -> PhaseState {
    g.to_phase()
}

/// Re-express the momenta of `g` in units of `eps`.
pub fn scale_change(g: &GuidingState, eps: f64) -> Result<GuidingState> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let ratio = g.eps / eps;
    Ok(GuidingState { pa_hat: g.pa_hat * ratio, pphi_hat: g.pphi_hat * ratio, eps, ..*g })
}

/// Back to unit scale: momenta multiplied by `eps`.
pub fn unscale(g: &GuidingState) -> GuidingState {
    GuidingState { pa_hat: g.pa_hat * g.eps, pphi_hat: g.pphi_hat * g.eps, eps: 1.0, ..*g }
}
