//! Gauss–Legendre quadrature with node doubling.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Smallest rule used by [`integrate_doubling`] (2^4 nodes).
pub const MIN_LEVEL: usize = 4;
/// Largest rule used by [`integrate_doubling`] (2^14 nodes).
pub const MAX_LEVEL: usize = 14;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `n` nodes on [-1, 1], computed by Newton iteration on the
    /// Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for k in 0..half {
            let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared rule with `2^level` nodes.
    pub fn cached(level: usize) -> &'static GaussLegendre {
        static RULES: [OnceLock<GaussLegendre>; MAX_LEVEL + 1] = [const { OnceLock::new() }; MAX_LEVEL + 1];
        assert!(level <= MAX_LEVEL, "quadrature level {level} exceeds {MAX_LEVEL}");
        RULES[level].get_or_init(|| GaussLegendre::new(1 << level))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F>(&self, lo: f64, hi: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x)?;
        }
        Ok(acc * half)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate over [lo, hi], doubling the node count until two successive
/// estimates differ by at most `tol · max(|I|, 1)`.
pub fn integrate_doubling<F>(lo: f64, hi: f64, tol: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut prev = GaussLegendre::cached(MIN_LEVEL).integrate(lo, hi, &mut f)?;
    let mut change = f64::INFINITY;
    for level in MIN_LEVEL + 1..=MAX_LEVEL {
        let next = GaussLegendre::cached(level).integrate(lo, hi, &mut f)?;
        change = (next - prev).abs();
        if !next.is_finite() {
            break;
        }
        if change <= tol * next.abs().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged { nodes: 1 << MAX_LEVEL, change })
}
