use std::fmt;
use std::sync::Arc;

use crate::interval::Interval;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of one variable, optionally paired with its derivative and
/// an antiderivative. Cheap to clone.
#[derive(Clone)]
pub struct Fn1D {
    eval: Eval,
    deriv: Option<Eval>,
    antideriv: Option<Eval>,
    support: Option<Interval<f64>>,
}

impl Fn1D {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Fn1D { eval: Arc::new(f), deriv: None, antideriv: None, support: None }
    }

    pub fn with_deriv(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(d));
        self
    }

    pub fn with_antideriv(mut self, a: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.antideriv = Some(Arc::new(a));
        self
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some(Interval::new(lo, hi));
        self
    }

    /// The zero function, with zero derivative and antiderivative.
    pub fn zero() -> Self {
        Fn1D::new(|_| 0.0).with_deriv(|_| 0.0).with_antideriv(|_| 0.0)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn deriv(&self, x: f64) -> Option<f64> {
        self.deriv.as_ref().map(|d| d(x))
    }

    pub fn antideriv(&self, x: f64) -> Option<f64> {
        self.antideriv.as_ref().map(|a| a(x))
    }

    pub fn has_deriv(&self) -> bool {
        self.deriv.is_some()
    }

    pub fn support(&self) -> Option<Interval<f64>> {
        self.support.clone()
    }

    /// The derivative as a standalone function, if present.
    pub fn derivative_fn(&self) -> Option<Fn1D> {
        self.deriv.clone().map(|d| Fn1D { eval: d, deriv: None, antideriv: Some(self.eval.clone()), support: None })
    }

    /// Largest discrepancy between `deriv` and a central difference with step `h`.
    pub fn max_derivative_mismatch(&self, points: &[f64], h: f64) -> Option<f64> {
        let d = self.deriv.as_ref()?;
        Some(
            points
                .iter()
                .map(|&x| ((self.eval(x + h) - self.eval(x - h)) / (2.0 * h) - d(x)).abs())
                .fold(0.0, f64::max),
        )
    }
}

impl fmt::Debug for Fn1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fn1D")
            .field("deriv", &self.deriv.is_some())
            .field("antideriv", &self.antideriv.is_some())
            .field("support", &self.support)
            .finish()
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n).map(|i| if i + 1 == n { b } else { a + h * i as f64 }).collect()
        }
    }
}
