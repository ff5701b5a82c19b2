//! Classification of surfaces whose slow magnetic motions all close.
//!
//! The verdict rests on two checks: the field is homogeneous (`RF`
//! constant) and the scalar curvature is constant. The `h⁴` coefficient,
//! the apsidal advance and direct closure simulations are gathered as
//! independent evidence.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{closure_test, ClosureOptions, GuidingState};
use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::reduction::{apsidal_angle, h4_coefficient, limit_period, radial_period, ReducedParams, APSIDAL_TOLERANCE};
use crate::surface::{curvature_report, homogeneity_defect, ActionChart, Representation, DEFAULT_GRID};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// homogeneity tolerance relative to `λ²`
    pub homogeneity: f64,
    /// curvature tolerance relative to `max(1, |Scal|)`
    pub curvature: f64,
    /// evidence thresholds are this many times looser
    pub evidence_factor: f64,
    /// return distance below which an orbit counts as closed
    pub closure: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { homogeneity: 1e-8, curvature: 1e-6, evidence_factor: 10.0, closure: 1e-6 }
    }
}

impl Tolerances {
    /// Defaults, loosened to `1e-3` for spline-based charts.
    pub fn for_chart(chart: &ActionChart) -> Self {
        match chart.representation() {
            Representation::TabulatedSpline => {
                Tolerances { homogeneity: 1e-3, curvature: 1e-3, closure: 1e-3, ..Default::default() }
            }
            _ => Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    /// points for the homogeneity, curvature and `h⁴` scans
    pub grid_size: usize,
    pub apsidal_eps: Vec<f64>,
    pub apsidal_ehat: Vec<f64>,
    /// `None` means the midpoint and the midpoint ± a quarter width
    pub apsidal_kappa: Option<Vec<f64>>,
    pub closure_eps: Vec<f64>,
    /// initial directions of the closure sample
    pub closure_directions: Vec<f64>,
    pub closure_max_periods: usize,
    pub closure_dt: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            grid_size: DEFAULT_GRID,
            apsidal_eps: vec![0.0, 0.05, 0.1, 0.2],
            apsidal_ehat: vec![0.25, 0.5, 0.75],
            apsidal_kappa: None,
            closure_eps: vec![0.1, 0.05],
            closure_directions: (0..5).map(|k| k as f64 * PI / 4.0).collect(),
            closure_max_periods: 1,
            closure_dt: 1e-3,
        }
    }
}

impl GridSpec {
    pub fn kappas(&self, chart: &ActionChart) -> Vec<f64> {
        self.apsidal_kappa.clone().unwrap_or_else(|| {
            let iv = chart.interval();
            let mid = iv.midpoint();
            vec![mid - iv.width() / 4.0, mid, mid + iv.width() / 4.0]
        })
    }

    /// The same grids with every scan twice as dense.
    pub fn doubled(&self) -> Self {
        GridSpec { grid_size: 2 * self.grid_size + 1, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Bertrand,
    NotBertrand,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosureSample {
    pub eps: f64,
    pub direction: f64,
    pub closed: bool,
    pub return_distance: f64,
    pub period: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub homogeneity: f64,
    pub curvature: f64,
    pub h4: f64,
    pub apsidal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BertrandVerdict {
    pub chart: String,
    pub homogeneity_defect: f64,
    pub lambda_sq: f64,
    pub curvature_mean: f64,
    pub curvature_deviation: f64,
    pub h4_max: f64,
    pub apsidal_max: f64,
    pub closure_fraction: f64,
    pub closure_samples: Vec<ClosureSample>,
    pub verdict: Classification,
    pub reasons: Vec<String>,
    pub thresholds: Thresholds,
    /// whether the evidence fields agree with the verdict
    pub evidence_consistent: bool,
    pub tolerances: Tolerances,
    pub grids: GridSpec,
    pub kappa_grid: Vec<f64>,
}

impl BertrandVerdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts contain only finite-or-null numbers")
    }
}

fn sup_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Classify `chart` and attach the supporting evidence.
pub fn classify(chart: &ActionChart, tol: &Tolerances, grid: &GridSpec) -> Result<BertrandVerdict> {
    let homogeneity = homogeneity_defect(chart, grid.grid_size).map_err(|e| e.context("homogeneity"))?;
    let lambda_sq = homogeneity.lambda_sq_mean;
    let tol_h = tol.homogeneity * lambda_sq.abs();

    let curvature = curvature_report(chart, grid.grid_size, f64::INFINITY).map_err(|e| e.context("curvature"))?;
    let tol_c = tol.curvature * curvature.mean.abs().max(1.0);

    let points = chart.interval().grid(grid.grid_size);
    let h4_max = sup_abs(
        points
            .iter()
            .map(|&c| h4_coefficient(chart, c).map(|h| h.value))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.context("h4 coefficient"))?,
    );
    let f_cubed_max = points
        .iter()
        .map(|&a| chart.f(a).map(|f| f.powi(3)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(1.0, f64::max);

    let kappa_grid = grid.kappas(chart);
    let mut apsidal_params = Vec::new();
    for &eps in &grid.apsidal_eps {
        for &ehat in &grid.apsidal_ehat {
            for &kappa in &kappa_grid {
                apsidal_params.push(ReducedParams::new(eps, ehat, kappa)?);
            }
        }
    }
    let apsidal_max = sup_abs(
        apsidal_params
            .par_iter()
            .map(|p| {
                apsidal_angle(chart, p)
                    .map_err(|e| e.context(format!("apsidal angle at eps = {}, Ehat = {}, kappa = {}", p.eps, p.ehat, p.kappa)))
            })
            .collect::<Result<Vec<_>>>()?,
    );

    let start = chart.interval().midpoint();
    let options = ClosureOptions { dt: grid.closure_dt, ..Default::default() };
    let cases: Vec<(f64, f64)> = grid
        .closure_eps
        .iter()
        .flat_map(|&e| grid.closure_directions.iter().map(move |&d| (e, d)))
        .collect();
    let closure_samples = cases
        .par_iter()
        .map(|&(eps, direction)| {
            let g0 = GuidingState::from_direction(chart, start, 0.0, direction, eps)?;
            let report = closure_test(chart, &g0, grid.closure_max_periods, tol.closure, &options)
                .map_err(|e| e.context(format!("closure test at eps = {eps}, direction = {direction}")))?;
            Ok(ClosureSample {
                eps,
                direction,
                closed: report.closed,
                return_distance: report.return_distance,
                period: report.period,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let closure_fraction = if closure_samples.is_empty() {
        1.0
    } else {
        closure_samples.iter().filter(|s| s.closed).count() as f64 / closure_samples.len() as f64
    };

    let mut reasons = Vec::new();
    if homogeneity.defect > tol_h {
        reasons.push(format!(
            "magnetic field not homogeneous: RF varies by {:e} (tolerance {:e})",
            homogeneity.defect, tol_h
        ));
    }
    if curvature.max_deviation > tol_c {
        reasons.push(format!(
            "curvature not constant: deviation {:e} (tolerance {:e})",
            curvature.max_deviation, tol_c
        ));
    }
    let verdict = if reasons.is_empty() { Classification::Bertrand } else { Classification::NotBertrand };

    let thresholds = Thresholds {
        homogeneity: tol.evidence_factor * tol_h,
        curvature: tol.evidence_factor * tol_c,
        h4: tol.evidence_factor * tol.curvature * f_cubed_max,
        apsidal: tol.evidence_factor * APSIDAL_TOLERANCE,
    };
    let evidence_consistent = match verdict {
        Classification::Bertrand => {
            h4_max <= thresholds.h4 && apsidal_max <= thresholds.apsidal && closure_fraction == 1.0
        }
        Classification::NotBertrand => {
            homogeneity.defect > thresholds.homogeneity
                || curvature.max_deviation > thresholds.curvature
                || h4_max > thresholds.h4
                || apsidal_max > thresholds.apsidal
        }
    };

    Ok(BertrandVerdict {
        chart: chart.label().to_owned(),
        homogeneity_defect: homogeneity.defect,
        lambda_sq,
        curvature_mean: curvature.mean,
        curvature_deviation: curvature.max_deviation,
        h4_max,
        apsidal_max,
        closure_fraction,
        closure_samples,
        verdict,
        reasons,
        thresholds,
        evidence_consistent,
        tolerances: *tol,
        grids: grid.clone(),
        kappa_grid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodConvergence {
    /// `2π / √(R(κ)F(κ))`
    pub limit_period: f64,
    pub eps: Vec<f64>,
    pub periods: Vec<f64>,
    /// `T(ε) - T(κ)`
    pub deviations: Vec<f64>,
    pub intercept: f64,
    pub slope: f64,
    /// deviations minus the fitted line
    pub residuals: Vec<f64>,
}

/// Least-squares line through `(ε, T(ε, Ê, κ) - T(κ))`.
pub fn period_convergence(chart: &ActionChart, ehat: f64, kappa: f64, eps_list: &[f64]) -> Result<PeriodConvergence> {
    if eps_list.len() < 2 {
        return Err(Error::InvalidInput("period convergence needs at least two eps values".into()));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) || eps_list.iter().any(|&e| !(e >= 0.0)) {
        return Err(Error::InvalidInput("eps values must be non-negative and strictly decreasing".into()));
    }
    let limit = limit_period(chart, kappa)?;
    let periods = eps_list
        .iter()
        .map(|&eps| {
            let params = ReducedParams::new(eps, ehat, kappa)?;
            // the limit entry is the oscillator period itself
            if eps == 0.0 {
                Ok(limit)
            } else {
                radial_period(chart, &params)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let deviations: Vec<f64> = periods.iter().map(|t| t - limit).collect();
    let LineFit { intercept, slope } = fit_line(eps_list, &deviations)?;
    let residuals = eps_list.iter().zip(&deviations).map(|(e, d)| d - intercept - slope * e).collect();
    Ok(PeriodConvergence {
        limit_period: limit,
        eps: eps_list.to_vec(),
        periods,
        deviations,
        intercept,
        slope,
        residuals,
    })
}
