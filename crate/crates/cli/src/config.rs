//! Run configuration: an optional JSON file, overridden field by field by
//! command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use bertrand_flow::dynamics::Method;
use bertrand_flow::surface::{builtin, ActionChart, ChartDefinition};
use bertrand_flow::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Where a chart comes from: `builtin:NAME`, a path to a chart definition
/// file, or (in a config file only) an inline definition.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ChartSource {
    Spec(String),
    Inline(ChartDefinition),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub chart: Option<ChartSource>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub tol: Option<f64>,
    pub grid_size: Option<usize>,
    pub eps: Option<Vec<f64>>,
    pub ehat: Option<Vec<f64>>,
    pub kappa: Option<Vec<f64>>,
    pub c: Option<Vec<f64>>,
    pub h: Option<Vec<f64>>,
    pub a0: Option<f64>,
    pub phi0: Option<f64>,
    pub pa0: Option<f64>,
    pub pphi0: Option<f64>,
    pub theta: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub method: Option<Method>,
    /// directory that relative chart paths in the file are resolved against
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {what} {}: {e}", path.display())))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path, "config file")?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("config file {}: {e}", path.display())))?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    /// Fill every field that `flags` sets; the flags win.
    pub fn overridden_by(mut self, flags: RunConfig) -> Self {
        macro_rules! take {
            ($($field:ident),*) => { $( if flags.$field.is_some() { self.$field = flags.$field; } )* };
        }
        take!(out, format, jobs, tol, grid_size, eps, ehat, kappa, c, h, a0, phi0, pa0, pphi0, theta, dt, t_end, method);
        if flags.chart.is_some() {
            self.chart = flags.chart;
            self.base_dir = None;
        }
        self
    }

    pub fn chart(&self) -> Result<(String, ActionChart)> {
        let source = self
            .chart
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("no chart given; use --chart builtin:NAME or --chart FILE".into()))?;
        match source {
            ChartSource::Inline(def) => Ok(("inline".into(), def.build()?)),
            ChartSource::Spec(spec) => match spec.strip_prefix("builtin:") {
                Some(name) => Ok((spec.clone(), builtin(name)?)),
                None => {
                    let path = match &self.base_dir {
                        Some(dir) => dir.join(spec),
                        None => PathBuf::from(spec),
                    };
                    let def = ChartDefinition::from_json(&read(&path, "chart file")?)
                        .map_err(|e| e.context(format!("chart file {}", path.display())))?;
                    Ok((spec.clone(), def.build()?))
                }
            },
        }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// The single value of a list-valued parameter.
    pub fn single(values: &Option<Vec<f64>>, name: &str, default: f64) -> Result<f64> {
        match values.as_deref() {
            None => Ok(default),
            Some([value]) => Ok(*value),
            Some(other) => Err(Error::InvalidInput(format!("--{name} takes one value here, got {}", other.len()))),
        }
    }
}
