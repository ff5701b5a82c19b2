use std::sync::Arc;

use serde::Serialize;

use super::{Interval, RadialProfile, DEFAULT_GRID, ZERO_FIELD_THRESHOLD};
use crate::error::{Error, Result};
use crate::func::Func;
use crate::jet::Jet;

/// How the coefficient functions of a chart are represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    AnalyticBuiltin,
    PolynomialR,
    TabulatedSpline,
}

/// Constant-curvature homogeneous chart: `R(a) = λ₁ + λ₂ a - Scal a²/2`, `F = λ²/R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BertrandParams {
    pub scal: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_sq: f64,
}

impl BertrandParams {
    fn r_jet(&self, a: f64) -> Jet {
        Jet::new(
            self.lambda1 + self.lambda2 * a - 0.5 * self.scal * a * a,
            self.lambda2 - self.scal * a,
            -self.scal,
            0.0,
        )
    }
}

/// A surface of revolution with magnetic field in action coordinates:
/// metric `da²/R(a) + dφ²/F(a)`, field `da∧dφ`, on an open interval of `a`.
#[derive(Debug, Clone)]
pub struct ActionChart {
    interval: Interval,
    repr: ChartRepr,
    label: String,
}

#[derive(Debug, Clone)]
enum ChartRepr {
    Analytic { r: Func, f: Func },
    Bertrand(BertrandParams),
    Profile(Arc<ProfileChart>),
}

#[derive(Debug)]
struct ProfileChart {
    profile: RadialProfile,
    /// knots sorted by increasing action
    a_knots: Vec<f64>,
    r_knots: Vec<f64>,
}

impl ProfileChart {
    /// Latitude with `a(r) = a`, by safeguarded Newton iteration inside the
    /// bracketing knot interval.
    fn latitude(&self, a: f64) -> Result<f64> {
        let n = self.a_knots.len();
        let i = self.a_knots.partition_point(|&x| x <= a).clamp(1, n - 1) - 1;
        let (mut r_lo, mut r_hi) = (self.r_knots[i], self.r_knots[i + 1]);
        let (a_lo, a_hi) = (self.a_knots[i], self.a_knots[i + 1]);
        let mut g_lo = a_lo - a;
        let t = (a - a_lo) / (a_hi - a_lo);
        let mut r = r_lo + t * (r_hi - r_lo);
        for _ in 0..100 {
            let g = self.profile.action(r)? - a;
            if g == 0.0 {
                return Ok(r);
            }
            if (g < 0.0) == (g_lo < 0.0) {
                r_lo = r;
                g_lo = g;
            } else {
                r_hi = r;
            }
            let mut next = r - g / self.profile.b_jet(r).value();
            let (lo, hi) = if r_lo < r_hi { (r_lo, r_hi) } else { (r_hi, r_lo) };
            if !(next > lo && next < hi) {
                next = 0.5 * (r_lo + r_hi);
            }
            let step = (next - r).abs();
            r = next;
            if step <= 4.0 * f64::EPSILON * r.abs().max(1.0) {
                return Ok(r);
            }
        }
        Ok(r)
    }

    fn latitude_jet(&self, a: f64) -> Result<(f64, Jet)> {
        let r = self.latitude(a)?;
        let mut r_of_a = self.profile.a_jet(r)?.inverse();
        r_of_a.d[0] = r;
        Ok((r, r_of_a))
    }

    fn inverse_f_jet(&self, a: f64) -> Result<Jet> {
        let (r, r_of_a) = self.latitude_jet(a)?;
        Ok(Jet::compose(self.profile.f_jet(r).square(), r_of_a))
    }

    fn jets(&self, a: f64) -> Result<(Jet, Jet)> {
        let (r, r_of_a) = self.latitude_jet(a)?;
        let b = self.profile.b_jet(r);
        let f = self.profile.f_jet(r);
        let big_r = Jet::compose(b.square(), r_of_a);
        let big_f = Jet::compose(f.square().recip(), r_of_a);
        Ok((big_r, big_f))
    }
}

impl ActionChart {
    /// Chart with closed-form `R` and `F`; both must be positive on the grid.
    pub fn analytic(interval: Interval, r: Func, f: Func) -> Result<Self> {
        let chart = ActionChart {
            interval,
            repr: ChartRepr::Analytic { r, f },
            label: "analytic".into(),
        };
        chart.validate_positive()?;
        Ok(chart)
    }

    fn validate_positive(&self) -> Result<()> {
        for a in self.interval.grid(DEFAULT_GRID) {
            let (r, f) = self.jets(a)?;
            if !(r.value() > 0.0) {
                return Err(Error::NonPositiveR { a, value: r.value() });
            }
            if !(f.value() > 0.0) {
                return Err(Error::NonPositiveF { a, value: f.value() });
            }
        }
        Ok(())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn representation(&self) -> Representation {
        match &self.repr {
            ChartRepr::Analytic { .. } => Representation::AnalyticBuiltin,
            ChartRepr::Bertrand(_) => Representation::PolynomialR,
            ChartRepr::Profile(p) if p.profile.is_tabulated() => Representation::TabulatedSpline,
            ChartRepr::Profile(_) => Representation::AnalyticBuiltin,
        }
    }

    pub fn bertrand_params(&self) -> Option<BertrandParams> {
        match &self.repr {
            ChartRepr::Bertrand(p) => Some(*p),
            _ => None,
        }
    }

    /// Jets of `(R, F)` at `a`.
    pub fn jets(&self, a: f64) -> Result<(Jet, Jet)> {
        self.interval.check(a)?;
        match &self.repr {
            ChartRepr::Analytic { r, f } => Ok((r.jet(a), f.jet(a))),
            ChartRepr::Bertrand(p) => {
                let r = p.r_jet(a);
                Ok((r, r.recip().scale(p.lambda_sq)))
            }
            ChartRepr::Profile(p) => p.jets(a),
        }
    }

    /// Jet of `1/F` at `a`, evaluated in the form native to the
    /// representation (`R/λ²` for constant-curvature charts, `f²` for
    /// profile charts) so that no reciprocal is taken twice.
    pub fn inverse_f_jet(&self, a: f64) -> Result<Jet> {
        self.interval.check(a)?;
        match &self.repr {
            ChartRepr::Analytic { f, .. } => Ok(f.jet(a).recip()),
            ChartRepr::Bertrand(p) => Ok(p.r_jet(a).scale(1.0 / p.lambda_sq)),
            ChartRepr::Profile(p) => p.inverse_f_jet(a),
        }
    }

    pub fn r_jet(&self, a: f64) -> Result<Jet> {
        Ok(self.jets(a)?.0)
    }

    pub fn f_jet(&self, a: f64) -> Result<Jet> {
        Ok(self.jets(a)?.1)
    }

    pub fn r(&self, a: f64) -> Result<f64> {
        Ok(self.r_jet(a)?.value())
    }

    pub fn f(&self, a: f64) -> Result<f64> {
        Ok(self.f_jet(a)?.value())
    }

    /// The latitude profile this chart was built from, if any.
    pub fn profile(&self) -> Option<&RadialProfile> {
        match &self.repr {
            ChartRepr::Profile(p) => Some(&p.profile),
            _ => None,
        }
    }

    /// Inverse of the latitude-to-action change, for profile-based charts.
    pub fn latitude(&self, a: f64) -> Result<f64> {
        self.interval.check(a)?;
        match &self.repr {
            ChartRepr::Profile(p) => p.latitude(a),
            _ => Err(Error::InvalidInput("chart was not built from a latitude profile".into())),
        }
    }
}

/// Convert a latitude profile into action coordinates `a = a(r)`.
///
/// `R(a(r)) = b(r)²` and `F(a(r)) = 1/f(r)²`; the chart interval is the image
/// of the latitude interval.
pub fn to_action_chart(profile: &RadialProfile, grid_size: usize) -> Result<ActionChart> {
    if grid_size < 2 {
        return Err(Error::InvalidInput("grid_size must be at least 2".into()));
    }
    let iv = profile.interval();
    let grid = iv.grid(grid_size);

    let mut prev: Option<(f64, f64)> = None;
    for &r in &grid {
        let b = profile.b_jet(r).value();
        if !(b.abs() >= ZERO_FIELD_THRESHOLD) {
            return Err(Error::ZeroMagneticField { r, value: b });
        }
        if let Some((r0, b0)) = prev {
            if (b0 < 0.0) != (b < 0.0) {
                let root = r0 - b0 * (r - r0) / (b - b0);
                return Err(Error::ZeroMagneticField { r: root, value: 0.0 });
            }
        }
        prev = Some((r, b));
    }

    let mut r_knots = Vec::with_capacity(grid.len() + 2);
    r_knots.push(iv.lo);
    r_knots.extend_from_slice(&grid);
    r_knots.push(iv.hi);
    let mut a_knots = r_knots.iter().map(|&r| profile.action(r)).collect::<Result<Vec<_>>>()?;

    let increasing = a_knots[1] > a_knots[0];
    for (w, r) in a_knots.windows(2).zip(&r_knots[1..]) {
        if !((w[1] > w[0]) == increasing && w[1] != w[0]) || !w[1].is_finite() {
            return Err(Error::NonMonotoneAction { r: *r });
        }
    }
    if !increasing {
        a_knots.reverse();
        r_knots.reverse();
    }
    let interval = Interval::new(a_knots[0], a_knots[a_knots.len() - 1])?;
    let label = if profile.is_tabulated() { "tabulated-profile" } else { "profile" };
    let chart = ActionChart {
        interval,
        repr: ChartRepr::Profile(Arc::new(ProfileChart { profile: profile.clone(), a_knots, r_knots })),
        label: label.into(),
    };
    Ok(chart)
}

/// Homogeneous constant-curvature chart `R(a) = λ₁ + λ₂ a - Scal a²/2`, `F = λ²/R`.
pub fn bertrand_chart(
    scal: f64,
    lambda1: f64,
    lambda2: f64,
    lambda_sq: f64,
    interval: Interval,
) -> Result<ActionChart> {
    if !(lambda_sq > 0.0) {
        return Err(Error::InvalidInput(format!("λ² must be positive, got {lambda_sq}")));
    }
    let params = BertrandParams { scal, lambda1, lambda2, lambda_sq };
    // R is quadratic: its minimum over the closure is at an endpoint or at the vertex
    let mut candidates = vec![];
    if scal != 0.0 {
        let vertex = lambda2 / scal;
        if interval.contains(vertex) {
            candidates.push((vertex, true));
        }
    }
    candidates.push((interval.lo, false));
    candidates.push((interval.hi, false));
    for (a, interior) in candidates {
        let value = params.r_jet(a).value();
        if value < 0.0 || (interior && value <= 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveR { a, value });
        }
    }
    // an endpoint zero of R is allowed on the open interval, but not one of the interior
    for a in interval.grid(DEFAULT_GRID) {
        let value = params.r_jet(a).value();
        if value <= 0.0 {
            return Err(Error::NonPositiveR { a, value });
        }
    }
    Ok(ActionChart { interval, repr: ChartRepr::Bertrand(params), label: "bertrand".into() })
}

pub const BUILTIN_NAMES: &[&str] = &[
    "flat",
    "sphere",
    "hyperbolic",
    "exp",
    "quadratic",
    "sphere-profile",
    "hyperbolic-profile",
];

/// Named built-in charts.
///
/// * `flat`: `R ≡ F ≡ 1` on (−1, 1)
/// * `sphere`: unit sphere, `R = 1 − a²` on (−0.9, 0.9)
/// * `hyperbolic`: `R = 1 + a²` on (−2, 2)
/// * `exp`: homogeneous, `F = eᵃ`, `R = e⁻ᵃ` on (−1, 1); curvature not constant
/// * `quadratic`: non-homogeneous, `R ≡ 1`, `F = 1 + a²` on (−2, 2)
/// * `sphere-profile`, `hyperbolic-profile`: the sphere and hyperbolic
///   surfaces given in latitude coordinates and converted to action coordinates
pub fn builtin(name: &str) -> Result<ActionChart> {
    let iv = Interval::new;
    let chart = match name {
        "flat" => bertrand_chart(0.0, 1.0, 0.0, 1.0, iv(-1.0, 1.0)?)?,
        "sphere" => bertrand_chart(2.0, 1.0, 0.0, 1.0, iv(-0.9, 0.9)?)?,
        "hyperbolic" => bertrand_chart(-2.0, 1.0, 0.0, 1.0, iv(-2.0, 2.0)?)?,
        "exp" => ActionChart::analytic(
            iv(-1.0, 1.0)?,
            Func::Exp { amp: 1.0, rate: -1.0 },
            Func::Exp { amp: 1.0, rate: 1.0 },
        )?,
        "quadratic" => ActionChart::analytic(
            iv(-2.0, 2.0)?,
            Func::constant(1.0),
            Func::Poly(vec![1.0, 0.0, 1.0]),
        )?,
        "sphere-profile" => to_action_chart(
            &RadialProfile::sphere(iv(0.3, std::f64::consts::PI - 0.3)?, 1.0)?,
            DEFAULT_GRID,
        )?,
        "hyperbolic-profile" => {
            to_action_chart(&RadialProfile::hyperbolic(iv(-1.2, 1.2)?, 1.0)?, DEFAULT_GRID)?
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown builtin chart '{other}' (known: {})",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    Ok(chart.with_label(name))
}

/// Scalar curvature at a point, with a flag recording whether `R F` is
/// locally constant there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureValue {
    pub scal: f64,
    pub homogeneous: bool,
}

/// Scalar curvature of `da²/R + dφ²/F` at `a`.
///
/// Where `(RF)' = 0` this is `-R''(a)`; elsewhere the general expression
/// `R'F'/(2F) + R F''/F - 3 R F'²/(2F²)` is used and the value is flagged as
/// non-homogeneous.
pub fn scalar_curvature_a(chart: &ActionChart, a: f64) -> Result<CurvatureValue> {
    let (r, f) = chart.jets(a)?;
    let (r0, r1, r2) = (r.value(), r.d1(), r.d2());
    let (f0, f1, f2) = (f.value(), f.d1(), f.d2());
    let rf = r0 * f0;
    let d_rf = r1 * f0 + r0 * f1;
    let homogeneous = d_rf.abs() <= 1e-8 * rf.abs();
    let scal = if homogeneous {
        -r2
    } else {
        r1 * f1 / (2.0 * f0) + r0 * f2 / f0 - 1.5 * r0 * f1 * f1 / (f0 * f0)
    };
    Ok(CurvatureValue { scal, homogeneous })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomogeneityDefect {
    /// mean of `R F` over the grid
    pub lambda_sq_mean: f64,
    /// `sup |R F - mean|` over the grid
    pub defect: f64,
}

/// How far `R F` is from constant over the interior grid.
pub fn homogeneity_defect(chart: &ActionChart, grid_size: usize) -> Result<HomogeneityDefect> {
    if grid_size < 2 {
        return Err(Error::InvalidInput("grid_size must be at least 2".into()));
    }
    let products = chart
        .interval()
        .grid(grid_size)
        .into_iter()
        .map(|a| Ok(chart.r(a)? * chart.f(a)?))
        .collect::<Result<Vec<f64>>>()?;
    let mean = products.iter().sum::<f64>() / products.len() as f64;
    let defect = products.iter().map(|p| (p - mean).abs()).fold(0.0, f64::max);
    Ok(HomogeneityDefect { lambda_sq_mean: mean, defect })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    /// `(a, Scal(a))` samples
    pub samples: Vec<(f64, f64)>,
    pub mean: f64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub is_constant: bool,
    /// whether every sample point was locally homogeneous
    pub homogeneous: bool,
}

pub fn curvature_report(chart: &ActionChart, grid_size: usize, tolerance: f64) -> Result<CurvatureReport> {
    if grid_size < 1 {
        return Err(Error::InvalidInput("grid_size must be positive".into()));
    }
    let mut samples = Vec::with_capacity(grid_size);
    let mut homogeneous = true;
    for a in chart.interval().grid(grid_size) {
        let c = scalar_curvature_a(chart, a)?;
        homogeneous &= c.homogeneous;
        samples.push((a, c.scal));
    }
    let mean = samples.iter().map(|s| s.1).sum::<f64>() / samples.len() as f64;
    let max_deviation = samples.iter().map(|s| (s.1 - mean).abs()).fold(0.0, f64::max);
    Ok(CurvatureReport {
        samples,
        mean,
        max_deviation,
        tolerance,
        is_constant: max_deviation <= tolerance,
        homogeneous,
    })
}
