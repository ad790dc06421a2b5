//! The smooth function `f` in `theta = f(mu)`.
//!
//! Derivatives are closed-form evaluators. First partials are mandatory; mixed
//! partials of order 2 to 4 are optional and only the analytic expansions in
//! [`crate::oracle`] need them.

use std::fmt;

/// A known smooth map from `R^p` to `R`.
pub trait SmoothFunctional: Send + Sync {
    fn arity(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `(f_1(x), ..., f_p(x))` into `out`.
    fn gradient(&self, x: &[f64], out: &mut [f64]);

    /// Mixed partial `f_{j1...jr}(x)` for `r = idx.len()` in `1..=4`, or `None`
    /// if derivatives of that order are not provided.
    fn partial(&self, x: &[f64], idx: &[usize]) -> Option<f64> {
        if idx.len() == 1 {
            let mut g = vec![0.0; self.arity()];
            self.gradient(x, &mut g);
            Some(g[idx[0]])
        } else {
            None
        }
    }

    /// Highest total derivative order available through [`partial`](Self::partial).
    fn max_order(&self) -> usize {
        1
    }

    fn name(&self) -> String;
}

impl fmt::Debug for dyn SmoothFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothFunctional({})", self.name())
    }
}

/// Univariate functionals only need `d^r f / dx^r`.
trait Univariate {
    fn eval(&self, x: f64) -> f64;
    fn derivative(&self, x: f64, order: usize) -> f64;
    fn label(&self) -> String;
}

macro_rules! univariate_functional {
    ($ty:ty) => {
        impl SmoothFunctional for $ty {
            fn arity(&self) -> usize {
                1
            }
            fn value(&self, x: &[f64]) -> f64 {
                self.eval(x[0])
            }
            fn gradient(&self, x: &[f64], out: &mut [f64]) {
                out[0] = self.derivative(x[0], 1);
            }
            fn partial(&self, x: &[f64], idx: &[usize]) -> Option<f64> {
                if idx.is_empty() || idx.len() > 4 || idx.iter().any(|&j| j != 0) {
                    return None;
                }
                Some(self.derivative(x[0], idx.len()))
            }
            fn max_order(&self) -> usize {
                4
            }
            fn name(&self) -> String {
                self.label()
            }
        }
    };
}

/// `f(x) = x`
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Univariate for Identity {
    fn eval(&self, x: f64) -> f64 {
        x
    }
    fn derivative(&self, _x: f64, order: usize) -> f64 {
        if order == 1 {
            1.0
        } else {
            0.0
        }
    }
    fn label(&self) -> String {
        "identity".into()
    }
}
univariate_functional!(Identity);

/// `f(x) = x^3`
#[derive(Debug, Clone, Copy, Default)]
pub struct Cube;

impl Univariate for Cube {
    fn eval(&self, x: f64) -> f64 {
        x * x * x
    }
    fn derivative(&self, x: f64, order: usize) -> f64 {
        match order {
            1 => 3.0 * x * x,
            2 => 6.0 * x,
            3 => 6.0,
            _ => 0.0,
        }
    }
    fn label(&self) -> String {
        "cube".into()
    }
}
univariate_functional!(Cube);

/// `f(x) = sin(x)`
#[derive(Debug, Clone, Copy, Default)]
pub struct Sine;

impl Univariate for Sine {
    fn eval(&self, x: f64) -> f64 {
        x.sin()
    }
    fn derivative(&self, x: f64, order: usize) -> f64 {
        match order % 4 {
            0 => x.sin(),
            1 => x.cos(),
            2 => -x.sin(),
            _ => -x.cos(),
        }
    }
    fn label(&self) -> String {
        "sine".into()
    }
}
univariate_functional!(Sine);

/// `f(x) = sum_k coeffs[k] x^k`
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

impl Univariate for Polynomial {
    fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
    fn derivative(&self, x: f64, order: usize) -> f64 {
        // Horner on the differentiated coefficients k!/(k-r)! a_k
        let mut acc = 0.0;
        for k in (order..self.coeffs.len()).rev() {
            let falling: f64 = ((k - order + 1)..=k).map(|m| m as f64).product();
            acc = acc * x + falling * self.coeffs[k];
        }
        acc
    }
    fn label(&self) -> String {
        let terms: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("polynomial[{}]", terms.join(","))
    }
}
univariate_functional!(Polynomial);

/// `f(x, y) = x / y`, the ratio of two means.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ratio;

impl SmoothFunctional for Ratio {
    fn arity(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        x[0] / x[1]
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out[0] = 1.0 / x[1];
        out[1] = -x[0] / (x[1] * x[1]);
    }

    fn partial(&self, x: &[f64], idx: &[usize]) -> Option<f64> {
        if idx.is_empty() || idx.len() > 4 || idx.iter().any(|&j| j > 1) {
            return None;
        }
        // d^a/dx^a d^k/dy^k (x y^-1): zero for a >= 2, otherwise
        // x^(1-a) (-1)^k k! y^-(k+1)
        let a = idx.iter().filter(|&&j| j == 0).count();
        let k = idx.len() - a;
        if a >= 2 {
            return Some(0.0);
        }
        let fact: f64 = (1..=k).map(|m| m as f64).product();
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let base = sign * fact / x[1].powi(k as i32 + 1);
        Some(if a == 1 { base } else { x[0] * base })
    }

    fn max_order(&self) -> usize {
        4
    }

    fn name(&self) -> String {
        "ratio".into()
    }
}
