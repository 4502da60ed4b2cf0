use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::fn1d::{linspace, Fn1D};
use crate::holder::{holder_constant, HolderEstimate, MAX_PAIRWISE_POINTS};

use super::ingredient::BasicIngredient;
use super::ode::Speed;

/// Grid size used by [`derive_hgamma`].
pub const HGAMMA_GRID: usize = 2049;

/// The speed `c_n`: `m²γ(ε_n, mλ_n t)` on `[0, δ_n]`, then the tail `c0`.
#[derive(Clone, Debug)]
pub struct SpeedProfile {
    pub m: f64,
    pub lambda_n: f64,
    pub alpha: f64,
    pub eps_n: f64,
    pub delta_n: f64,
    /// Tail speed; equal to `m²` on `[0, δ]`.
    pub c0: Fn1D,
    /// `|m²γ(ε_n, mλ_nδ_n) − c0(δ_n)|`, zero up to rounding.
    pub continuity_gap: f64,
    ingredient: BasicIngredient,
}

/// Builds `c_n` with `ε_n = ε₁H/(m^{α+2}H_γ)·λ_n^{−α}` and
/// `δ_n = (2π/(mλ_n))⌊mλ_nδ/2π⌋` over the constant tail `c0 ≡ m²`.
pub fn speed_schedule(
    m: f64,
    lambda_n: f64,
    alpha: f64,
    eps1: f64,
    h: f64,
    h_gamma: f64,
    delta: f64,
) -> Result<SpeedProfile> {
    let m2 = m * m;
    speed_schedule_with_tail(m, lambda_n, alpha, eps1, h, h_gamma, delta, Fn1D::new(move |_| m2))
}

/// As [`speed_schedule`] with a caller-supplied tail, which must equal `m²` on `[0, δ]`.
#[allow(clippy::too_many_arguments)]
pub fn speed_schedule_with_tail(
    m: f64,
    lambda_n: f64,
    alpha: f64,
    eps1: f64,
    h: f64,
    h_gamma: f64,
    delta: f64,
    c0: Fn1D,
) -> Result<SpeedProfile> {
    for (name, v) in [("m", m), ("lambda_n", lambda_n), ("eps1", eps1), ("H", h), ("H_gamma", h_gamma), ("delta", delta)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(format!("{name} must be positive, got {v}")));
        }
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let eps_n = eps1 * h / (m.powf(alpha + 2.0) * h_gamma) * lambda_n.powf(-alpha);
    if eps_n >= 1.0 {
        return Err(invalid(format!("eps_n = {eps_n} is not below 1; raise lambda_n")));
    }
    let periods = (m * lambda_n * delta / (2.0 * PI)).floor();
    if periods < 1.0 {
        return Err(invalid(format!(
            "delta_n = 0 because m*lambda_n*delta = {} < 2*pi; raise lambda_n above {}",
            m * lambda_n * delta,
            2.0 * PI / (m * delta)
        )));
    }
    let delta_n = 2.0 * PI * periods / (m * lambda_n);
    for t in linspace(0.0, delta, 17) {
        if (c0.eval(t) - m * m).abs() > 1e-12 * m * m {
            return Err(invalid(format!("tail speed must equal m^2 = {} on [0, delta]; c0({t}) = {}", m * m, c0.eval(t))));
        }
    }
    let ingredient = BasicIngredient { epsilon: eps_n };
    let continuity_gap = (m * m * ingredient.gamma(m * lambda_n * delta_n) - c0.eval(delta_n)).abs();
    Ok(SpeedProfile { m, lambda_n, alpha, eps_n, delta_n, c0, continuity_gap, ingredient })
}

impl SpeedProfile {
    pub fn ingredient(&self) -> BasicIngredient {
        self.ingredient
    }

    /// Number of full periods `mλ_nδ_n / 2π`.
    pub fn periods(&self) -> f64 {
        (self.m * self.lambda_n * self.delta_n / (2.0 * PI)).round()
    }

    /// `c_n(t) − c0(t)`.
    pub fn perturbation(&self, t: f64) -> f64 {
        if t <= self.delta_n {
            self.m * self.m * (self.ingredient.gamma(self.m * self.lambda_n * t) - 1.0)
        } else {
            0.0
        }
    }

    /// The explicit solution `(v, v')` on `[0, δ_n]` for `v(0) = 0`, `v'(0) = v1`.
    pub fn exact(&self, t: f64, v1: f64) -> (f64, f64) {
        let ml = self.m * self.lambda_n;
        (v1 / ml * self.ingredient.w(ml * t), v1 * self.ingredient.w_t(ml * t))
    }

    /// `log(v'(δ_n)/v1) = 2ε_n mλ_nδ_n`.
    pub fn log_growth_at_delta(&self) -> f64 {
        2.0 * self.eps_n * self.m * self.lambda_n * self.delta_n
    }

    /// Extremes of `c_n` on `npts` points of `[0, tmax]`.
    pub fn range_on_grid(&self, tmax: f64, npts: usize) -> (f64, f64) {
        linspace(0.0, tmax, npts)
            .into_iter()
            .map(|t| self.c(t))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c), hi.max(c)))
    }

    /// Order-α constant of `c_n − c0` on `[0, 1.05δ_n]`, sampled on at most
    /// [`MAX_PAIRWISE_POINTS`] points at a resolution of 16 points per period of γ.
    pub fn perturbation_holder(&self) -> Result<HolderEstimate> {
        let per_period = 16.0;
        let npts = ((1.05 * self.periods() * 2.0 * per_period) as usize + 2).min(MAX_PAIRWISE_POINTS);
        let p = self.clone();
        holder_constant(&Fn1D::new(move |t| p.perturbation(t)), self.alpha, &linspace(0.0, 1.05 * self.delta_n, npts))
    }
}

impl Speed for SpeedProfile {
    fn c(&self, t: f64) -> f64 {
        if t <= self.delta_n {
            self.m * self.m * self.ingredient.gamma(self.m * self.lambda_n * t)
        } else {
            self.c0.eval(t)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.delta_n]
    }
}

// The ε-leading part of (γ(ε,t) − 1)/ε, evaluated without cancellation.
fn gamma_quotient(eps: f64, t: f64) -> f64 {
    -16.0 * eps * t.sin().powi(4) - 8.0 * (2.0 * t).sin()
}

/// `H_γ`: the largest grid quotient `|γ(ε,t) − γ(ε,s)| / (ε|t−s|^α)` for `ε = 10⁻⁶`
/// over [`HGAMMA_GRID`] points of `[0, 2π]`, plus a 10% margin.
///
/// Two periods of γ suffice: shifting a pair by a period keeps the numerator
/// and reduces `|t−s|` modulo π.
pub fn derive_hgamma(alpha: f64) -> Result<f64> {
    derive_hgamma_with(alpha, HGAMMA_GRID)
}

pub fn derive_hgamma_with(alpha: f64, npts: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("alpha must lie in (0,1], got {alpha}")));
    }
    let f = Fn1D::new(|t| gamma_quotient(1e-6, t));
    Ok(1.1 * holder_constant(&f, alpha, &linspace(0.0, 2.0 * PI, npts))?.constant)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hgamma_lipschitz_limit() {
        // The ε-linear term −8 sin 2t has slope 16 at t = 0.
        let h = derive_hgamma_with(1.0, 4001).unwrap() / 1.1;
        assert!(h >= 16.0 * (1.0 - 1e-3), "{h}");
        assert!(h <= 16.0 * (1.0 + 1e-5));
    }

    #[test]
    fn hgamma_refinement() {
        for alpha in [0.1, 0.5, 0.9] {
            let a = derive_hgamma_with(alpha, 1025).unwrap();
            let b = derive_hgamma_with(alpha, 2049).unwrap();
            assert!((a - b).abs() < 0.01 * b, "alpha {alpha}: {a} vs {b}");
        }
    }

    #[test]
    fn schedule_continuity_and_scaling() {
        let hg = derive_hgamma(0.5).unwrap();
        let mut prod = Vec::new();
        for n in 4..10 {
            let lam = (n as f64).exp2();
            let s = speed_schedule(2.0, lam, 0.5, 0.5, 1.0, hg, 0.9).unwrap();
            assert!(s.continuity_gap < 1e-10);
            assert!((s.c(s.delta_n) - 4.0).abs() < 1e-10);
            prod.push(s.eps_n * lam.sqrt());
        }
        assert!(prod.iter().all(|p| (p - prod[0]).abs() < 1e-14 * prod[0]));
    }

    #[test]
    fn delta_n_zero_is_reported() {
        let e = speed_schedule(1.0, 1.0, 0.5, 0.5, 0.01, 15.0, 0.9).unwrap_err();
        assert!(e.to_string().contains("delta_n = 0"));
    }

    #[test]
    fn holder_budget() {
        let hg = derive_hgamma(0.5).unwrap();
        let s = speed_schedule(2.0, 256.0, 0.5, 0.5, 1.0, hg, 0.9).unwrap();
        let est = s.perturbation_holder().unwrap();
        assert!(est.constant <= 0.5 * (1.0 + 1e-6), "{est:?}");
    }
}
