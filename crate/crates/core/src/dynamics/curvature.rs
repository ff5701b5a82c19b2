use super::integrate::Trajectory;
use crate::error::{Error, Result};
use crate::surface::ActionChart;

/// Three-point first and second derivative weights on a non-uniform stencil.
fn stencil(h1: f64, h2: f64) -> ([f64; 3], [f64; 3]) {
    let s = h1 + h2;
    (
        [-h2 / (h1 * s), (h2 - h1) / (h1 * h2), h1 / (h2 * s)],
        [2.0 / (h1 * s), -2.0 / (h1 * h2), 2.0 / (h2 * s)],
    )
}

/// Signed geodesic curvature of the projected curve `(a(t), φ(t))` under
/// `da²/R + dφ²/F`, at every interior sample.
///
/// Velocity and acceleration come from three-point differences of the
/// sampled positions; the covariant acceleration adds the Christoffel terms.
/// The sign is positive for counter-clockwise turning in the `(a, φ)` plane.
pub fn geodesic_curvature(chart: &ActionChart, traj: &Trajectory) -> Result<Vec<(f64, f64)>> {
    let times = traj.times();
    if times.len() < 3 {
        return Err(Error::InvalidInput("geodesic curvature needs at least 3 samples".into()));
    }
    let a: Vec<f64> = traj.states().iter().map(|s| s.a).collect();
    let phi = traj.phi_unwrapped();
    let mut out = Vec::with_capacity(times.len() - 2);
    for i in 1..times.len() - 1 {
        let (d1, d2) = stencil(times[i] - times[i - 1], times[i + 1] - times[i]);
        let diff = |x: &[f64], w: &[f64; 3]| w[0] * x[i - 1] + w[1] * x[i] + w[2] * x[i + 1];
        let (va, vphi) = (diff(&a, &d1), diff(phi, &d1));
        let (acc_a, acc_phi) = (diff(&a, &d2), diff(phi, &d2));

        let (r, f) = chart.jets(a[i])?;
        let (r0, r1, f0, f1) = (r.value(), r.d1(), f.value(), f.d1());
        let speed = (va * va / r0 + vphi * vphi / f0).sqrt();
        if !(speed >= 1e-10) {
            return Err(Error::DegenerateSpeed { index: i, speed });
        }
        let cov_a = acc_a - r1 / (2.0 * r0) * va * va + r0 * f1 / (2.0 * f0 * f0) * vphi * vphi;
        let cov_phi = acc_phi - f1 / f0 * va * vphi;
        let kappa = (va * cov_phi - vphi * cov_a) / ((r0 * f0).sqrt() * speed.powi(3));
        out.push((times[i], kappa));
    }
    Ok(out)
}
