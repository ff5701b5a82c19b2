//! Small linear least-squares fits.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Least-squares coefficients `c` minimising `Σ (Σ_k c_k x_i^{p_k} - y_i)^2`.
pub fn fit_powers(x: &[f64], y: &[f64], powers: &[i32]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput("fit abscissae and ordinates differ in length".into()));
    }
    if x.len() < powers.len() {
        return Err(Error::InvalidInput(format!(
            "{} samples cannot determine {} coefficients",
            x.len(),
            powers.len()
        )));
    }
    // column scaling keeps the normal matrix well conditioned for small x
    let scale: Vec<f64> = powers
        .iter()
        .map(|&p| x.iter().map(|xi| xi.powi(p).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE))
        .collect();
    let a = DMatrix::from_fn(x.len(), powers.len(), |i, k| x[i].powi(powers[k]) / scale[k]);
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    let sol = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidInput(format!("least squares failed: {e}")))?;
    Ok(sol.iter().zip(&scale).map(|(c, s)| c / s).collect())
}

/// Straight line `y ≈ intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let c = fit_powers(x, y, &[0, 1])?;
    Ok(LineFit { intercept: c[0], slope: c[1] })
}
