use std::fmt::Write as _;

use bertrand_flow::bertrand::{classify, GridSpec, Tolerances};
use bertrand_flow::dynamics::{integrate, GuidingState, PhaseState};
use bertrand_flow::reduction::{apsidal_h_sweep, h4_coefficient, reduce_sweep, write_sweep_csv};
use bertrand_flow::surface::{curvature_report, homogeneity_defect, ActionChart, DEFAULT_GRID};
use bertrand_flow::{Error, Result};
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};

/// What a command produces: an optional table, the full JSON result and a
/// short summary for the metadata file that accompanies a CSV.
pub struct Output {
    pub table: Option<String>,
    pub result: Value,
    pub summary: Value,
    pub parameters: Value,
    pub default_format: Format,
}

fn csv_row(values: &[f64]) -> String {
    let mut line = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        write!(line, "{v:.16e}").unwrap();
    }
    line.push('\n');
    line
}

fn to_value<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("results serialize to JSON")
}

fn grid_size(config: &RunConfig) -> Result<usize> {
    match config.grid_size.unwrap_or(DEFAULT_GRID) {
        n if n >= 2 => Ok(n),
        n => Err(Error::InvalidInput(format!("--grid-size must be at least 2, got {n}"))),
    }
}

pub fn curvature(chart: &ActionChart, config: &RunConfig) -> Result<Output> {
    let n = grid_size(config)?;
    let tol = config.tol.unwrap_or(1e-6);
    let report = curvature_report(chart, n, tol)?;
    let homogeneity = homogeneity_defect(chart, n)?;
    let mut table = String::from("a,scal\n");
    for (a, scal) in &report.samples {
        table.push_str(&csv_row(&[*a, *scal]));
    }
    let summary = json!({
        "mean": report.mean,
        "max_deviation": report.max_deviation,
        "tolerance": report.tolerance,
        "is_constant": report.is_constant,
        "homogeneous": report.homogeneous,
        "homogeneity_defect": homogeneity.defect,
        "lambda_sq": homogeneity.lambda_sq_mean,
    });
    let mut result = summary.clone();
    result["samples"] = to_value(&report.samples);
    Ok(Output {
        table: Some(table),
        result,
        summary,
        parameters: json!({ "grid_size": n, "tol": tol }),
        default_format: Format::Csv,
    })
}

pub fn simulate(chart: &ActionChart, config: &RunConfig) -> Result<Output> {
    let a0 = config.a0.unwrap_or_else(|| chart.interval().midpoint());
    let phi0 = config.phi0.unwrap_or(0.0);
    let dt = config.dt.unwrap_or(1e-3);
    let t_end = config.t_end.unwrap_or(10.0);
    let method = config.method.unwrap_or_default();
    let (state0, start) = match config.theta {
        Some(theta) => {
            if config.pa0.is_some() || config.pphi0.is_some() {
                return Err(Error::InvalidInput("--theta cannot be combined with --pa0/--pphi0".into()));
            }
            let eps = RunConfig::single(&config.eps, "eps", 0.1)?;
            let g = GuidingState::from_direction(chart, a0, phi0, theta, eps)?;
            (g.to_phase(), json!({ "a0": a0, "phi0": phi0, "theta": theta, "eps": eps }))
        }
        None => {
            let (pa0, pphi0) = (config.pa0.unwrap_or(0.0), config.pphi0.unwrap_or(0.0));
            (PhaseState::new(a0, phi0, pa0, pphi0), json!({ "a0": a0, "phi0": phi0, "pa0": pa0, "pphi0": pphi0 }))
        }
    };
    let traj = integrate(chart, &state0, t_end, dt, method)?;
    let mut table = Vec::new();
    traj.write_csv(&mut table)?;
    let summary = json!({
        "steps": traj.len() - 1,
        "h_drift": traj.h_drift(),
        "k_drift": traj.k_drift(),
        "final_state": to_value(traj.last()),
    });
    let mut result = summary.clone();
    result["t"] = to_value(&traj.times());
    result["states"] = to_value(&traj.states());
    result["H"] = to_value(&traj.energy());
    result["K"] = to_value(&traj.kinetic_momentum());
    let mut parameters = start;
    parameters["dt"] = json!(dt);
    parameters["t_end"] = json!(t_end);
    parameters["method"] = to_value(&method);
    Ok(Output {
        table: Some(String::from_utf8(table).expect("CSV is ASCII")),
        result,
        summary,
        parameters,
        default_format: Format::Csv,
    })
}

pub fn reduce(chart: &ActionChart, config: &RunConfig) -> Result<Output> {
    let eps = config.eps.clone().unwrap_or_else(|| vec![0.0, 0.05, 0.1, 0.2]);
    let ehat = config.ehat.clone().unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
    let kappa = config.kappa.clone().unwrap_or_else(|| GridSpec::default().kappas(chart));
    let reports = reduce_sweep(chart, &eps, &ehat, &kappa)?;
    let mut table = Vec::new();
    write_sweep_csv(&reports, &mut table)?;
    let phi_max = reports.iter().map(|r| r.phi_over_eps2.abs()).fold(0.0, f64::max);
    Ok(Output {
        table: Some(String::from_utf8(table).expect("CSV is ASCII")),
        result: json!({ "reports": to_value(&reports), "phi_over_eps2_max": phi_max }),
        summary: json!({ "rows": reports.len(), "phi_over_eps2_max": phi_max }),
        parameters: json!({ "eps": eps, "ehat": ehat, "kappa": kappa }),
        default_format: Format::Csv,
    })
}

pub fn classify_chart(chart: &ActionChart, config: &RunConfig) -> Result<Output> {
    let mut tol = Tolerances::for_chart(chart);
    if let Some(curvature) = config.tol {
        tol.curvature = curvature;
    }
    let mut grid = GridSpec::default();
    if let Some(n) = config.grid_size {
        grid.grid_size = n;
    }
    if let Some(eps) = &config.eps {
        grid.closure_eps = eps.clone();
    }
    if let Some(kappa) = &config.kappa {
        grid.apsidal_kappa = Some(kappa.clone());
    }
    if let Some(ehat) = &config.ehat {
        grid.apsidal_ehat = ehat.clone();
    }
    let verdict = classify(chart, &tol, &grid)?;
    let mut table = String::from("eps,direction,closed,return_distance,period\n");
    for s in &verdict.closure_samples {
        let period = s.period.map_or("nan".to_string(), |p| format!("{p:.16e}"));
        writeln!(table, "{:.16e},{:.16e},{},{:.16e},{period}", s.eps, s.direction, s.closed, s.return_distance).unwrap();
    }
    Ok(Output {
        table: Some(table),
        result: to_value(&verdict),
        summary: json!({ "verdict": to_value(&verdict.verdict), "reasons": verdict.reasons }),
        parameters: json!({ "tolerances": to_value(&tol), "grid": to_value(&grid) }),
        default_format: Format::Json,
    })
}

pub fn h4(chart: &ActionChart, config: &RunConfig) -> Result<Output> {
    let points = match &config.c {
        Some(c) => c.clone(),
        None => chart.interval().grid(grid_size(config)?),
    };
    let values = points.iter().map(|&c| h4_coefficient(chart, c)).collect::<Result<Vec<_>>>()?;
    let mut table = String::from("c,h4,taylor_form\n");
    for v in &values {
        table.push_str(&csv_row(&[v.c, v.value, v.taylor_form]));
    }
    let sup = values.iter().map(|v| v.value.abs()).fold(0.0, f64::max);
    Ok(Output {
        table: Some(table),
        result: json!({ "values": to_value(&values), "sup_abs": sup }),
        summary: json!({ "points": values.len(), "sup_abs": sup }),
        parameters: json!({ "c": points }),
        default_format: Format::Csv,
    })
}

pub fn sweep_h(chart: &ActionChart, config: &RunConfig) -> Result<Output> {
    let c = RunConfig::single(&config.c, "c", chart.interval().midpoint())?;
    let h = config.h.clone().unwrap_or_else(|| vec![0.05, 0.1, 0.15, 0.2]);
    let sweep = apsidal_h_sweep(chart, c, &h)?;
    let mut table = Vec::new();
    sweep.write_csv(&mut table)?;
    let summary = json!({
        "coefficients": sweep.coefficients,
        "predicted_h4": sweep.predicted_h4,
        "discarded": sweep.discarded,
    });
    Ok(Output {
        table: Some(String::from_utf8(table).expect("CSV is ASCII")),
        result: to_value(&sweep),
        summary,
        parameters: json!({ "c": c, "h": h }),
        default_format: Format::Csv,
    })
}
