use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::ActionChart;

/// Taylor coefficients of `F` at `c`: `coeffs[i] = F⁽ⁱ⁾(c) / i!`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FJet {
    pub c: f64,
    pub coeffs: [f64; 4],
    /// `coeffs[i] / coeffs[0]`
    pub normalized: [f64; 4],
}

/// Taylor coefficients of `F` at `c` up to `order` (at most 3); higher
/// entries are zero.
pub fn taylor_jet(chart: &ActionChart, c: f64, order: usize) -> Result<FJet> {
    if order > 3 {
        return Err(Error::InvalidInput(format!("Taylor order {order} exceeds 3")));
    }
    let taylor = chart.f_jet(c)?.taylor();
    let coeffs: [f64; 4] = std::array::from_fn(|i| if i <= order { taylor[i] } else { 0.0 });
    Ok(FJet { c, coeffs, normalized: coeffs.map(|x| x / coeffs[0]) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H4Coefficient {
    pub c: f64,
    /// `6F'³ - 6FF'F'' + F²F'''` at `c`
    pub value: f64,
    /// `(π/8)(3F̂₁³ - 6F̂₁F̂₂ + 3F̂₃)`, equal to `π value / (16 F³)`
    pub taylor_form: f64,
}

/// Evaluated as `-F⁴ (1/F)'''`, which is the same polynomial in the jet of
/// `F` without its cancellation: near the edge of a sphere chart the three
/// terms are each of order `10⁵` while their sum is zero.
pub fn h4_coefficient(chart: &ActionChart, c: f64) -> Result<H4Coefficient> {
    let f = chart.f(c)?;
    let value = -f.powi(4) * chart.inverse_f_jet(c)?.d3();
    Ok(H4Coefficient { c, value, taylor_form: PI * value / (16.0 * f.powi(3)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::builtin;
    use approx::assert_relative_eq;

    #[test]
    fn taylor_examples() {
        let flat = builtin("flat").unwrap();
        assert_eq!(taylor_jet(&flat, 0.1, 3).unwrap().coeffs, [1.0, 0.0, 0.0, 0.0]);

        let exp = builtin("exp").unwrap();
        let jet = taylor_jet(&exp, 0.0, 3).unwrap();
        for (got, want) in jet.coeffs.iter().zip([1.0, 1.0, 0.5, 1.0 / 6.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
        assert_eq!(taylor_jet(&exp, 0.0, 1).unwrap().coeffs[2], 0.0);
        assert!(taylor_jet(&exp, 0.0, 4).is_err());

        let sphere = builtin("sphere").unwrap();
        let jet = taylor_jet(&sphere, 0.0, 3).unwrap();
        for (got, want) in jet.coeffs.iter().zip([1.0, 0.0, 1.0, 0.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn h4_examples() {
        let flat = builtin("flat").unwrap();
        assert_eq!(h4_coefficient(&flat, 0.3).unwrap().value, 0.0);

        let exp = builtin("exp").unwrap();
        for c in [-0.5, 0.0, 0.4] {
            let h4 = h4_coefficient(&exp, c).unwrap();
            assert_relative_eq!(h4.value, (3.0 * c).exp(), max_relative = 1e-14);
            let [_, n1, n2, n3] = taylor_jet(&exp, c, 3).unwrap().normalized;
            let direct = PI / 8.0 * (3.0 * n1.powi(3) - 6.0 * n1 * n2 + 3.0 * n3);
            assert_relative_eq!(h4.taylor_form, direct, max_relative = 1e-13);
        }

        let quadratic = builtin("quadratic").unwrap();
        for c in [-1.0, 0.2, 1.5] {
            let f = quadratic.f_jet(c).unwrap();
            let direct = 6.0 * f.d1().powi(3) - 6.0 * f.value() * f.d1() * f.d2() + f.value().powi(2) * f.d3();
            assert_relative_eq!(h4_coefficient(&quadratic, c).unwrap().value, direct, max_relative = 1e-12);
        }

        let sphere = builtin("sphere").unwrap();
        for c in [0.0, 0.3] {
            assert!(h4_coefficient(&sphere, c).unwrap().value.abs() < 1e-10);
        }
    }
}
