//! Natural cubic splines for tabulated profiles.
//!
//! Third derivatives of a cubic spline are piecewise constant, so [`CubicSpline::jet`]
//! replaces the exact third derivative by a central difference of the second
//! derivative. Tabulated charts are therefore only as accurate as the table;
//! nothing downstream assumes more than that.

use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
    /// cumulative integral from x[0] to each knot
    cumulative: Vec<f64>,
    fd_step: f64,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::InvalidInput(format!(
                "table columns differ in length ({n} vs {})",
                y.len()
            )));
        }
        if n < 4 {
            return Err(Error::InvalidInput("a tabulated profile needs at least 4 rows".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("table contains non-finite values".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("table abscissae must be strictly increasing".into()));
        }

        // tridiagonal system for the interior second derivatives (Thomas algorithm)
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut m = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        for i in 2..n - 1 {
            let w = h[i - 1] / diag[i - 1];
            diag[i] -= w * h[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (1..n - 1).rev() {
            let upper = if i + 1 < n - 1 { h[i] * m[i + 1] } else { 0.0 };
            m[i] = (rhs[i] - upper) / diag[i];
        }

        let mut cumulative = vec![0.0; n];
        for i in 0..n - 1 {
            let seg = h[i] * (y[i] + y[i + 1]) / 2.0 - h[i].powi(3) * (m[i] + m[i + 1]) / 24.0;
            cumulative[i + 1] = cumulative[i] + seg;
        }
        let fd_step = 1e-4 * (x[n - 1] - x[0]);
        Ok(CubicSpline { x, y, m, cumulative, fd_step })
    }

    pub fn lo(&self) -> f64 {
        self.x[0]
    }

    pub fn hi(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    /// Value, first and second derivative.
    fn eval3(&self, t: f64) -> [f64; 3] {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        [v, d1, d2]
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval3(t)[0]
    }

    pub fn jet(&self, t: f64) -> Jet {
        let [v, d1, d2] = self.eval3(t);
        let s = self.fd_step;
        let d3 = (self.eval3(t + s)[2] - self.eval3(t - s)[2]) / (2.0 * s);
        Jet::new(v, d1, d2, d3)
    }

    /// `∫_{x[0]}^{t}` of the spline.
    pub fn integral(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let x0 = self.x[i];
        let h = self.x[i + 1] - x0;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let s = t - x0;
        // antiderivative of the segment polynomial in the local variable s
        let b = s / h;
        let a = 1.0 - b;
        let prim = |a: f64, b: f64| {
            -h * y0 * a * a / 2.0 + h * y1 * b * b / 2.0
                + h * h * h / 6.0
                    * (-m0 * (a.powi(4) / 4.0 - a * a / 2.0) + m1 * (b.powi(4) / 4.0 - b * b / 2.0))
        };
        self.cumulative[i] + prim(a, b) - prim(1.0, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table(f: impl Fn(f64) -> f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64 * 2.0).collect();
        let y = x.iter().map(|&t| f(t)).collect();
        (x, y)
    }

    #[test]
    fn interpolates_knots_and_is_accurate() {
        let (x, y) = table(f64::sin, 201);
        let s = CubicSpline::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert_relative_eq!(s.eval(*xi), *yi, epsilon = 1e-14);
        }
        let j = s.jet(1.0);
        assert_relative_eq!(j.value(), 1f64.sin(), epsilon = 1e-9);
        assert_relative_eq!(j.d1(), 1f64.cos(), epsilon = 1e-6);
        assert_relative_eq!(j.d2(), -1f64.sin(), epsilon = 1e-4);
        assert_relative_eq!(j.d3(), -1f64.cos(), epsilon = 1e-2);
    }

    #[test]
    fn integral_matches_antiderivative() {
        let (x, y) = table(f64::cos, 101);
        let s = CubicSpline::new(x, y).unwrap();
        for &t in &[0.0, 0.013, 0.7, 1.5, 2.0] {
            // natural end conditions cost O(h²) accuracy near the ends
            assert_relative_eq!(s.integral(t), t.sin(), epsilon = 1e-6);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(CubicSpline::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(CubicSpline::new(vec![0.0, 1.0, 1.0, 2.0], vec![1.0; 4]).is_err());
        assert!(CubicSpline::new(vec![0.0, 1.0, 2.0, 3.0], vec![1.0; 3]).is_err());
    }
}
