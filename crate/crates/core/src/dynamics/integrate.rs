use std::io::{self, Write};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::flow::{rhs_array, rhs_jacobian, slowfast_array, slowfast_jacobian};
use super::state::{GuidingState, PhaseState};
use crate::error::{Error, Result};
use crate::surface::ActionChart;

const STAGE_TOLERANCE: f64 = 1e-13;
const STAGE_MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    ImplicitMidpoint,
    Rk4,
}

/// An autonomous system in four variables, with its Jacobian.
pub(crate) trait VectorField {
    fn eval(&self, y: &[f64; 4]) -> Result<[f64; 4]>;
    fn jacobian(&self, y: &[f64; 4]) -> Result<Matrix4<f64>>;
    /// The latitude reported when a state leaves the chart.
    fn latitude(&self, y: &[f64; 4]) -> f64;
}

pub(crate) struct Original<'a>(pub &'a ActionChart);

impl VectorField for Original<'_> {
    fn eval(&self, y: &[f64; 4]) -> Result<[f64; 4]> {
        rhs_array(self.0, y)
    }
    fn jacobian(&self, y: &[f64; 4]) -> Result<Matrix4<f64>> {
        rhs_jacobian(self.0, y)
    }
    fn latitude(&self, y: &[f64; 4]) -> f64 {
        y[0]
    }
}

pub(crate) struct SlowFast<'a> {
    pub chart: &'a ActionChart,
    pub eps: f64,
}

impl VectorField for SlowFast<'_> {
    fn eval(&self, y: &[f64; 4]) -> Result<[f64; 4]> {
        slowfast_array(self.chart, self.eps, y)
    }
    fn jacobian(&self, y: &[f64; 4]) -> Result<Matrix4<f64>> {
        slowfast_jacobian(self.chart, self.eps, y)
    }
    fn latitude(&self, y: &[f64; 4]) -> f64 {
        y[0] - self.eps * y[3]
    }
}

fn axpy(y: &[f64; 4], h: f64, k: &[f64; 4]) -> [f64; 4] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]]
}

fn max_abs(v: &[f64; 4]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// One step of size `dt` from `y` at time `t`.
pub(crate) fn step<V: VectorField>(field: &V, method: Method, t: f64, y: &[f64; 4], dt: f64) -> Result<[f64; 4]> {
    let left = |e: Error| match e.root() {
        Error::OutOfDomain { x, .. } => Error::LeftDomain { t, a: *x },
        _ => e,
    };
    match method {
        Method::Rk4 => {
            let k1 = field.eval(y).map_err(left)?;
            let k2 = field.eval(&axpy(y, 0.5 * dt, &k1)).map_err(left)?;
            let k3 = field.eval(&axpy(y, 0.5 * dt, &k2)).map_err(left)?;
            let k4 = field.eval(&axpy(y, dt, &k3)).map_err(left)?;
            let mut out = *y;
            for i in 0..4 {
                out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            Ok(out)
        }
        Method::ImplicitMidpoint => {
            // Newton on the midpoint z = y + dt/2 f(z)
            let half = 0.5 * dt;
            let mut z = axpy(y, half, &field.eval(y).map_err(left)?);
            let scale = max_abs(y).max(1.0);
            let mut residual = f64::INFINITY;
            for _ in 0..STAGE_MAX_ITERATIONS {
                let fz = field.eval(&z).map_err(left)?;
                let g = Vector4::from_fn(|i, _| z[i] - y[i] - half * fz[i]);
                residual = g.amax();
                if residual <= STAGE_TOLERANCE * scale {
                    // the explicit form keeps linear invariants to round-off
                    return Ok(axpy(y, dt, &fz));
                }
                let jac = Matrix4::identity() - field.jacobian(&z).map_err(left)? * half;
                let delta = jac
                    .lu()
                    .solve(&(-g))
                    .ok_or(Error::NoConvergence { t, residual })?;
                for i in 0..4 {
                    z[i] += delta[i];
                }
            }
            Err(Error::NoConvergence { t, residual })
        }
    }
}

/// Step times `0, dt, 2dt, …` ending exactly at `t_end`.
pub(crate) fn time_grid(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("end time must be positive, got {t_end}")));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..steps).map(|k| k as f64 * dt).collect();
    times.push(t_end);
    Ok(times)
}

fn run<V: VectorField>(field: &V, method: Method, y0: [f64; 4], times: &[f64]) -> Result<Vec<[f64; 4]>> {
    field.eval(&y0).map_err(|e| match e.root() {
        Error::OutOfDomain { .. } => Error::LeftDomain { t: 0.0, a: field.latitude(&y0) },
        _ => e,
    })?;
    let mut ys = Vec::with_capacity(times.len());
    ys.push(y0);
    for w in times.windows(2) {
        let y = step(field, method, w[0], ys.last().unwrap(), w[1] - w[0])?;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NoConvergence { t: w[1], residual: f64::NAN });
        }
        ys.push(y);
    }
    Ok(ys)
}

fn max_drift(values: &[f64]) -> f64 {
    values.iter().map(|v| (v - values[0]).abs()).fold(0.0, f64::max)
}

/// Time samples of the magnetic flow with conservation monitors.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<PhaseState>,
    phi_unwrapped: Vec<f64>,
    energy: Vec<f64>,
    momentum: Vec<f64>,
    h_drift: f64,
    k_drift: f64,
}

impl Trajectory {
    fn from_arrays(chart: &ActionChart, times: Vec<f64>, ys: &[[f64; 4]]) -> Result<Self> {
        let states: Vec<PhaseState> = ys.iter().map(|y| PhaseState::new(y[0], y[1], y[2], y[3])).collect();
        let energy = ys
            .iter()
            .map(|y| {
                let (r, f) = chart.jets(y[0])?;
                Ok(0.5 * (r.value() * y[2] * y[2] + f.value() * y[3] * y[3]))
            })
            .collect::<Result<Vec<f64>>>()?;
        let momentum: Vec<f64> = ys.iter().map(|y| y[3] + y[0]).collect();
        Ok(Trajectory {
            h_drift: max_drift(&energy),
            k_drift: max_drift(&momentum),
            phi_unwrapped: ys.iter().map(|y| y[1]).collect(),
            times,
            states,
            energy,
            momentum,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[PhaseState] {
        &self.states
    }

    /// Longitude without reduction modulo 2π.
    pub fn phi_unwrapped(&self) -> &[f64] {
        &self.phi_unwrapped
    }

    pub fn energy(&self) -> &[f64] {
        &self.energy
    }

    pub fn kinetic_momentum(&self) -> &[f64] {
        &self.momentum
    }

    /// `max |H(t) - H(0)|`
    pub fn h_drift(&self) -> f64 {
        self.h_drift
    }

    /// `max |K(t) - K(0)|`
    pub fn k_drift(&self) -> f64 {
        self.k_drift
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &PhaseState {
        self.states.last().expect("a trajectory holds at least the initial state")
    }

    /// CSV with header `t,a,phi,p_a,p_phi,H,K`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,a,phi,p_a,p_phi,H,K")?;
        for i in 0..self.len() {
            let s = &self.states[i];
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[i], s.a, s.phi, s.p_a, s.p_phi, self.energy[i], self.momentum[i]
            )?;
        }
        Ok(())
    }
}

/// Integrate the magnetic flow from `state0` up to `t_end` with fixed step `dt`.
pub fn integrate(chart: &ActionChart, state0: &PhaseState, t_end: f64, dt: f64, method: Method) -> Result<Trajectory> {
    if !state0.is_finite() {
        return Err(Error::InvalidInput("initial state is not finite".into()));
    }
    let times = time_grid(t_end, dt)?;
    let ys = run(&Original(chart), method, state0.to_array(), &times)?;
    Trajectory::from_arrays(chart, times, &ys)
}

/// Time samples of the slow-fast system.
#[derive(Debug, Clone)]
pub struct GuidingTrajectory {
    times: Vec<f64>,
    states: Vec<GuidingState>,
    phi_hat_unwrapped: Vec<f64>,
    reduced_energy: Vec<f64>,
    a_hat_drift: f64,
    energy_drift: f64,
}

impl GuidingTrajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[GuidingState] {
        &self.states
    }

    pub fn phi_hat_unwrapped(&self) -> &[f64] {
        &self.phi_hat_unwrapped
    }

    /// `H / eps²` along the trajectory.
    pub fn reduced_energy(&self) -> &[f64] {
        &self.reduced_energy
    }

    /// `max |â(t) - â(0)|`
    pub fn a_hat_drift(&self) -> f64 {
        self.a_hat_drift
    }

    pub fn energy_drift(&self) -> f64 {
        self.energy_drift
    }
}

/// Integrate the slow-fast system from `g0`; `g0.eps = 0` gives the limit system.
pub fn integrate_slowfast(
    chart: &ActionChart,
    g0: &GuidingState,
    t_end: f64,
    dt: f64,
    method: Method,
) -> Result<GuidingTrajectory> {
    let times = time_grid(t_end, dt)?;
    let field = SlowFast { chart, eps: g0.eps };
    let ys = run(&field, method, [g0.a_hat, g0.phi_hat, g0.pa_hat, g0.pphi_hat], &times)?;
    let reduced_energy = ys
        .iter()
        .map(|y| {
            let (r, f) = chart.jets(field.latitude(y))?;
            Ok(0.5 * (r.value() * y[2] * y[2] + f.value() * y[3] * y[3]))
        })
        .collect::<Result<Vec<f64>>>()?;
    let a_hats: Vec<f64> = ys.iter().map(|y| y[0]).collect();
    Ok(GuidingTrajectory {
        a_hat_drift: max_drift(&a_hats),
        energy_drift: max_drift(&reduced_energy),
        phi_hat_unwrapped: ys.iter().map(|y| y[1]).collect(),
        states: ys
            .iter()
            .map(|y| GuidingState { a_hat: y[0], phi_hat: super::normalize_angle(y[1]), pa_hat: y[2], pphi_hat: y[3], eps: g0.eps })
            .collect(),
        times,
        reduced_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builtin;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn time_grid_hits_end_exactly() {
        let t = time_grid(1.0, 0.3).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(*t.last().unwrap(), 1.0);
        assert_eq!(time_grid(1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(time_grid(1.0, 0.0).is_err());
        assert!(time_grid(-1.0, 0.1).is_err());
    }

    #[test]
    fn equilibrium_stays_fixed() {
        let chart = builtin("sphere").unwrap();
        let s = PhaseState::new(0.2, 1.0, 0.0, 0.0);
        for method in [Method::ImplicitMidpoint, Method::Rk4] {
            let traj = integrate(&chart, &s, 1.0, 1e-2, method).unwrap();
            assert!(traj.states().iter().all(|x| *x == s));
            assert_eq!(traj.h_drift(), 0.0);
            assert_eq!(traj.k_drift(), 0.0);
        }
    }

    #[test]
    fn flat_orbit_is_a_circle_of_period_two_pi() {
        let chart = builtin("flat").unwrap();
        let s = PhaseState::new(0.0, 0.0, 0.05, 0.0);
        let traj = integrate(&chart, &s, 2.0 * PI, 1e-3, Method::ImplicitMidpoint).unwrap();
        let end = traj.last();
        assert!(end.distance(&s) < 1e-7, "{:?}", end);
    }

    #[test]
    fn leaving_the_chart_is_an_error() {
        let chart = builtin("sphere").unwrap();
        let s = PhaseState::new(0.85, 0.0, 1.0, 0.0);
        let err = integrate(&chart, &s, 10.0, 1e-2, Method::Rk4).unwrap_err();
        assert!(matches!(err, Error::LeftDomain { .. }), "{err:?}");
    }

    #[test]
    fn rk4_and_midpoint_agree() {
        let chart = builtin("exp").unwrap();
        let s = PhaseState::new(0.1, 0.0, 0.1, 0.05);
        let a = integrate(&chart, &s, 5.0, 1e-3, Method::ImplicitMidpoint).unwrap();
        let b = integrate(&chart, &s, 5.0, 1e-3, Method::Rk4).unwrap();
        assert!(a.last().distance(b.last()) < 1e-6);
    }

    #[test]
    fn limit_system_period() {
        let chart = builtin("exp").unwrap();
        let a_hat = 0.3;
        let (r, f) = (chart.r(a_hat).unwrap(), chart.f(a_hat).unwrap());
        let period = 2.0 * PI / (r * f).sqrt();
        let g0 = GuidingState::new(a_hat, 0.5, 0.4, 0.9, 0.0).unwrap();
        let traj = integrate_slowfast(&chart, &g0, period, 1e-3, Method::ImplicitMidpoint).unwrap();
        let end = traj.states().last().unwrap();
        assert_eq!(traj.a_hat_drift(), 0.0);
        assert_relative_eq!(end.pa_hat, 0.4, epsilon = 1e-6);
        assert_relative_eq!(end.pphi_hat, 0.9, epsilon = 1e-6);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let chart = builtin("flat").unwrap();
        let traj = integrate(&chart, &PhaseState::new(0.0, 0.0, 0.1, 0.0), 0.002, 1e-3, Method::Rk4).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,a,phi,p_a,p_phi,H,K");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0.0000000000000000e0,"));
    }
}
