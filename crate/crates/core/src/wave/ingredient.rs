use crate::error::{invalid, Result};
use crate::stats::{fit_line, LineFit};

/// The oscillating speed `γ(ε,t) = 1 − 16ε²sin⁴t − 8ε sin 2t` together with the
/// explicit solution `w(ε,t) = sin t · e^{b(ε,t)}`, `b(ε,t) = ε(2t − sin 2t)`,
/// of `w'' + γw = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasicIngredient {
    pub epsilon: f64,
}

/// Checks `ε ∈ (0,1)` and returns the closed-form evaluators.
pub fn basic_ingredient(epsilon: f64) -> Result<BasicIngredient> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    Ok(BasicIngredient { epsilon })
}

impl BasicIngredient {
    pub fn gamma(&self, t: f64) -> f64 {
        let e = self.epsilon;
        let s = t.sin();
        1.0 - 16.0 * e * e * s.powi(4) - 8.0 * e * (2.0 * t).sin()
    }

    pub fn b(&self, t: f64) -> f64 {
        self.epsilon * (2.0 * t - (2.0 * t).sin())
    }

    pub fn w(&self, t: f64) -> f64 {
        t.sin() * self.b(t).exp()
    }

    /// `w_t = e^b (cos t + 4ε sin³t)`.
    pub fn w_t(&self, t: f64) -> f64 {
        let s = t.sin();
        self.b(t).exp() * (t.cos() + 4.0 * self.epsilon * s.powi(3))
    }

    /// `w_tt = e^b (−sin t + 16ε sin²t cos t + 16ε² sin⁵t)`, differentiated directly
    /// rather than through the equation.
    pub fn w_tt(&self, t: f64) -> f64 {
        let e = self.epsilon;
        let (s, c) = t.sin_cos();
        self.b(t).exp() * (-s + 16.0 * e * s * s * c + 16.0 * e * e * s.powi(5))
    }
}

/// `max |w_tt + γw|` over `npts` evenly spaced times in `[0, tmax]`.
pub fn verify_ode_identity(bi: &BasicIngredient, tmax: f64, npts: usize) -> Result<f64> {
    if npts < 2 {
        return Err(invalid("need at least two points"));
    }
    Ok(crate::fn1d::linspace(0.0, tmax, npts)
        .into_iter()
        .map(|t| (bi.w_tt(t) + bi.gamma(t) * bi.w(t)).abs())
        .fold(0.0, f64::max))
}

/// Fits `log max |w|` over the half periods `[jπ, (j+1)π]`, `j < periods`,
/// against the midpoint time. The slope approximates the growth rate `2ε`.
pub fn envelope_growth_fit(bi: &BasicIngredient, periods: usize) -> Option<LineFit> {
    use std::f64::consts::PI;
    let (mut ts, mut ls) = (Vec::new(), Vec::new());
    for j in 0..periods {
        let a = j as f64 * PI;
        let m = (0..=400).map(|i| bi.w(a + PI * i as f64 / 400.0).abs()).fold(0.0, f64::max);
        ts.push(a + PI / 2.0);
        ls.push(m.ln());
    }
    fit_line(&ts, &ls)
}
