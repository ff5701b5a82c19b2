//! Closed-form scalar functions with exact jets.

use crate::jet::Jet;

/// A scalar function of one variable with analytic derivatives up to third
/// order and, where one exists in closed form, an antiderivative.
#[derive(Debug, Clone, PartialEq)]
pub enum Func {
    /// `Σ c[k] x^k`
    Poly(Vec<f64>),
    /// `amp · exp(rate · x)`
    Exp { amp: f64, rate: f64 },
    /// `amp · sin(freq · x + phase)`
    Sin { amp: f64, freq: f64, phase: f64 },
    /// `amp · cosh(freq · (x - shift))`
    Cosh { amp: f64, freq: f64, shift: f64 },
    /// `amp · sinh(freq · (x - shift))`
    Sinh { amp: f64, freq: f64, shift: f64 },
    /// `num / den(x)`
    Recip { num: f64, den: Box<Func> },
}

impl Func {
    pub fn constant(c: f64) -> Self {
        Func::Poly(vec![c])
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Func::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
            _ => self.jet(x).value(),
        }
    }

    pub fn jet(&self, x: f64) -> Jet {
        match self {
            Func::Poly(c) => poly_jet(c, x),
            Func::Exp { amp, rate } => {
                let e = amp * (rate * x).exp();
                Jet::new(e, rate * e, rate * rate * e, rate * rate * rate * e)
            }
            Func::Sin { amp, freq, phase } => {
                let (s, c) = (freq * x + phase).sin_cos();
                let w = *freq;
                Jet::new(amp * s, amp * w * c, -amp * w * w * s, -amp * w * w * w * c)
            }
            Func::Cosh { amp, freq, shift } => {
                let y = freq * (x - shift);
                let (ch, sh) = (y.cosh(), y.sinh());
                let w = *freq;
                Jet::new(amp * ch, amp * w * sh, amp * w * w * ch, amp * w * w * w * sh)
            }
            Func::Sinh { amp, freq, shift } => {
                let y = freq * (x - shift);
                let (ch, sh) = (y.cosh(), y.sinh());
                let w = *freq;
                Jet::new(amp * sh, amp * w * ch, amp * w * w * sh, amp * w * w * w * ch)
            }
            Func::Recip { num, den } => den.jet(x).recip().scale(*num),
        }
    }

    /// A closed-form antiderivative, when one is available.
    pub fn antiderivative(&self, x: f64) -> Option<f64> {
        match self {
            Func::Poly(c) => Some(
                c.iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (k, &ck)| acc * x + ck / (k as f64 + 1.0))
                    * x,
            ),
            Func::Exp { amp, rate } if *rate != 0.0 => Some(amp * (rate * x).exp() / rate),
            Func::Exp { amp, .. } => Some(amp * x),
            Func::Sin { amp, freq, phase } if *freq != 0.0 => {
                Some(-amp * (freq * x + phase).cos() / freq)
            }
            Func::Cosh { amp, freq, shift } if *freq != 0.0 => {
                Some(amp * (freq * (x - shift)).sinh() / freq)
            }
            Func::Sinh { amp, freq, shift } if *freq != 0.0 => {
                Some(amp * (freq * (x - shift)).cosh() / freq)
            }
            _ => None,
        }
    }
}

fn poly_jet(c: &[f64], x: f64) -> Jet {
    let mut d = [0.0; 4];
    for (order, slot) in d.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in (order..c.len()).rev() {
            // falling factorial k (k-1) ... (k-order+1)
            let ff: f64 = (0..order).map(|j| (k - j) as f64).product();
            acc = acc * x + ff * c[k];
        }
        *slot = acc;
    }
    Jet { d }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn check_jet_fd(f: &Func, x: f64) {
        let h = 1e-5;
        let jp = f.jet(x + h);
        let jm = f.jet(x - h);
        let j = f.jet(x);
        for k in 0..3 {
            let fd = (jp.d[k] - jm.d[k]) / (2.0 * h);
            let scale = j.d[k + 1].abs().max(1.0);
            assert!((fd - j.d[k + 1]).abs() / scale < 1e-6, "{f:?} order {k} at {x}");
        }
    }

    #[test]
    fn jets_agree_with_central_differences() {
        let funcs = [
            Func::Poly(vec![1.0, -2.0, 0.5, 3.0, -0.25]),
            Func::Exp { amp: 2.0, rate: -0.7 },
            Func::Sin { amp: 1.5, freq: 2.0, phase: 0.3 },
            Func::Cosh { amp: 0.5, freq: 1.2, shift: 0.1 },
            Func::Sinh { amp: 0.5, freq: 1.2, shift: -0.4 },
            Func::Recip { num: 2.0, den: Box::new(Func::Poly(vec![1.0, 0.0, 1.0])) },
        ];
        for f in &funcs {
            for &x in &[-0.8, -0.1, 0.35, 0.9] {
                check_jet_fd(f, x);
            }
        }
    }

    #[test]
    fn antiderivatives_differentiate_back() {
        let funcs = [
            Func::Poly(vec![1.0, -2.0, 0.5, 3.0]),
            Func::Exp { amp: 2.0, rate: -0.7 },
            Func::Sin { amp: 1.5, freq: 2.0, phase: 0.3 },
            Func::Cosh { amp: 0.5, freq: 1.2, shift: 0.1 },
            Func::Sinh { amp: 0.5, freq: 1.2, shift: -0.4 },
        ];
        let h = 1e-5;
        for f in &funcs {
            for &x in &[-0.5, 0.2, 0.8] {
                let fd = (f.antiderivative(x + h).unwrap() - f.antiderivative(x - h).unwrap())
                    / (2.0 * h);
                assert_relative_eq!(fd, f.eval(x), max_relative = 1e-8, epsilon = 1e-9);
            }
        }
        assert!(Func::Recip { num: 1.0, den: Box::new(Func::constant(2.0)) }
            .antiderivative(0.0)
            .is_none());
    }

    #[test]
    fn poly_eval_matches_jet_value() {
        let p = Func::Poly(vec![0.5, 1.0, -1.0]);
        assert_eq!(p.eval(2.0), 0.5 + 2.0 - 4.0);
        assert_eq!(p.jet(2.0).d, [-1.5, -3.0, -2.0, 0.0]);
    }
}
