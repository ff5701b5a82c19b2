//! JSON chart definitions.
//!
//! ```json
//! { "family": "bertrand",
//!   "params": { "scal": 2.0, "lambda1": 1.0, "lambda2": 0.0, "lambda_sq": 1.0 },
//!   "interval": [-0.9, 0.9] }
//! ```
//!
//! Tabulated profiles carry a `table` with the columns `r`, `f` and `b`;
//! their `interval` (optional) is a latitude range inside the table.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{bertrand_chart, to_action_chart, ActionChart, Interval, RadialProfile, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::func::Func;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Flat,
    Sphere,
    Hyperbolic,
    Bertrand,
    Exp,
    Quadratic,
    SphereProfile,
    HyperbolicProfile,
    Tabulated,
}

/// Which coordinate the `interval` field of a definition is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateKind {
    Action,
    Latitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDefinition {
    pub family: Family,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub interval: Option<[f64; 2]>,
    #[serde(default)]
    pub table: Option<Table>,
}

impl ChartDefinition {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("chart definition: {e}")))
    }

    pub fn coordinates(&self) -> CoordinateKind {
        match self.family {
            Family::SphereProfile | Family::HyperbolicProfile | Family::Tabulated => {
                CoordinateKind::Latitude
            }
            _ => CoordinateKind::Action,
        }
    }

    fn params(&self, allowed: &[(&str, f64)]) -> Result<Vec<f64>> {
        if let Some(unknown) = self.params.keys().find(|k| !allowed.iter().any(|(n, _)| n == k)) {
            return Err(Error::InvalidInput(format!(
                "unknown parameter '{unknown}' for family {:?}",
                self.family
            )));
        }
        Ok(allowed
            .iter()
            .map(|(name, default)| self.params.get(*name).copied().unwrap_or(*default))
            .collect())
    }

    fn interval_or(&self, lo: f64, hi: f64) -> Result<Interval> {
        match self.interval {
            Some([a, b]) => Interval::new(a, b),
            None => Interval::new(lo, hi),
        }
    }

    pub fn build(&self) -> Result<ActionChart> {
        if self.table.is_some() && self.family != Family::Tabulated {
            return Err(Error::InvalidInput("'table' is only allowed for the tabulated family".into()));
        }
        let chart = match self.family {
            Family::Flat => {
                let p = self.params(&[("lambda_sq", 1.0)])?;
                bertrand_chart(0.0, 1.0, 0.0, p[0], self.interval_or(-1.0, 1.0)?)?
            }
            Family::Sphere => {
                let p = self.params(&[("lambda_sq", 1.0)])?;
                bertrand_chart(2.0, 1.0, 0.0, p[0], self.interval_or(-0.9, 0.9)?)?
            }
            Family::Hyperbolic => {
                let p = self.params(&[("lambda_sq", 1.0)])?;
                bertrand_chart(-2.0, 1.0, 0.0, p[0], self.interval_or(-2.0, 2.0)?)?
            }
            Family::Bertrand => {
                let p = self.params(&[
                    ("scal", 0.0),
                    ("lambda1", 1.0),
                    ("lambda2", 0.0),
                    ("lambda_sq", 1.0),
                ])?;
                let iv = self.interval.ok_or_else(|| {
                    Error::InvalidInput("the bertrand family needs an explicit interval".into())
                })?;
                bertrand_chart(p[0], p[1], p[2], p[3], Interval::new(iv[0], iv[1])?)?
            }
            Family::Exp => {
                let p = self.params(&[("lambda_sq", 1.0), ("rate", 1.0)])?;
                ActionChart::analytic(
                    self.interval_or(-1.0, 1.0)?,
                    Func::Exp { amp: p[0], rate: -p[1] },
                    Func::Exp { amp: 1.0, rate: p[1] },
                )?
            }
            Family::Quadratic => {
                let p = self.params(&[("c2", 1.0)])?;
                ActionChart::analytic(
                    self.interval_or(-2.0, 2.0)?,
                    Func::constant(1.0),
                    Func::Poly(vec![1.0, 0.0, p[0]]),
                )?
            }
            Family::SphereProfile => {
                let p = self.params(&[("lambda", 1.0)])?;
                let iv = self.interval_or(0.3, PI - 0.3)?;
                to_action_chart(&RadialProfile::sphere(iv, p[0])?, DEFAULT_GRID)?
            }
            Family::HyperbolicProfile => {
                let p = self.params(&[("lambda", 1.0)])?;
                let iv = self.interval_or(-1.2, 1.2)?;
                to_action_chart(&RadialProfile::hyperbolic(iv, p[0])?, DEFAULT_GRID)?
            }
            Family::Tabulated => {
                self.params(&[])?;
                let t = self.table.as_ref().ok_or_else(|| {
                    Error::InvalidInput("the tabulated family needs a 'table' with r, f, b".into())
                })?;
                let mut profile = RadialProfile::tabulated(t.r.clone(), t.f.clone(), t.b.clone())?;
                if let Some([lo, hi]) = self.interval {
                    profile = profile.restricted(Interval::new(lo, hi)?)?;
                }
                to_action_chart(&profile, DEFAULT_GRID)?
            }
        };
        let label = serde_json::to_value(self.family)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        Ok(chart.with_label(label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_builds_bertrand_family() {
        let def = ChartDefinition::from_json(
            r#"{"family":"bertrand","params":{"scal":2,"lambda1":1},"interval":[-0.9,0.9]}"#,
        )
        .unwrap();
        let chart = def.build().unwrap();
        assert_eq!(chart.label(), "bertrand");
        assert_eq!(chart.bertrand_params().unwrap().scal, 2.0);
    }

    #[test]
    fn rejects_unknown_params_and_missing_columns() {
        let def = ChartDefinition::from_json(r#"{"family":"sphere","params":{"scl":2}}"#).unwrap();
        assert!(matches!(def.build(), Err(Error::InvalidInput(_))));

        let err = ChartDefinition::from_json(
            r#"{"family":"tabulated","table":{"r":[0,1,2,3],"f":[1,1,1,1]}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));

        let def = ChartDefinition::from_json(r#"{"family":"tabulated"}"#).unwrap();
        assert!(matches!(def.build(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn tabulated_sphere_is_close_to_exact() {
        let r: Vec<f64> = (0..=400).map(|i| 0.2 + i as f64 * (PI - 0.4) / 400.0).collect();
        let f: Vec<f64> = r.iter().map(|x| x.sin()).collect();
        let def = ChartDefinition {
            family: Family::Tabulated,
            params: BTreeMap::new(),
            interval: Some([0.3, PI - 0.3]),
            table: Some(Table { r, f: f.clone(), b: f }),
        };
        let chart = def.build().unwrap();
        assert_eq!(def.coordinates(), CoordinateKind::Latitude);
        for a in [-0.5, 0.0, 0.7] {
            assert!((chart.r(a).unwrap() - (1.0 - a * a)).abs() < 1e-8);
        }
    }
}
