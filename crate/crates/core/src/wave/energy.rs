use crate::error::{invalid, Result};

use super::ode::ModeSolution;

/// Constants of the energy sandwich for a speed with `μ₁ ≤ c ≤ μ₂` that is
/// Lipschitz with constant `L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBounds {
    pub mu1: f64,
    pub mu2: f64,
    pub l: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub mu5: f64,
}

impl EnergyBounds {
    pub fn new(mu1: f64, mu2: f64, l: f64) -> Result<Self> {
        if !(mu1 > 0.0 && mu2 >= mu1 && l >= 0.0) {
            return Err(invalid(format!("need 0 < mu1 <= mu2 and L >= 0, got {mu1}, {mu2}, {l}")));
        }
        Ok(EnergyBounds {
            mu1,
            mu2,
            l,
            mu3: mu1.min(1.0) * (1.0 / mu2).min(1.0),
            mu4: l / mu1,
            mu5: (1.0 / mu1).max(1.0) * mu2.max(1.0),
        })
    }

    /// Same bounds with `μ₄` replaced, for adversarial checks.
    pub fn with_mu4(mut self, mu4: f64) -> Self {
        self.mu4 = mu4;
        self
    }
}

/// Outcome of [`energy_bounds_check`]. Slacks are in log space and nonnegative
/// when the inequality holds.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    pub t0: f64,
    /// `min_t [log E(t) − log(μ₃E(t₀)) + μ₄(t−t₀)]`.
    pub lower_slack: f64,
    pub lower_worst_time: f64,
    /// `min_t [log(μ₅E(t₀)) + μ₄(t−t₀) − log E(t)]`.
    pub upper_slack: f64,
    pub upper_worst_time: f64,
    pub checked: usize,
}

impl EnergyReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower_slack >= -tol && self.upper_slack >= -tol
    }
}

/// Checks `μ₃E(t₀)e^{−μ₄(t−t₀)} ≤ E(t) ≤ μ₅E(t₀)e^{μ₄(t−t₀)}` for
/// `E = |v'|² + λ²|v|²` at every output time `t ≥ t₀`.
pub fn energy_bounds_check(sol: &ModeSolution, eb: &EnergyBounds, t0: f64) -> Result<EnergyReport> {
    let i0 = sol.index_of(t0).ok_or_else(|| invalid(format!("t0 = {t0} is not an output time")))?;
    let e0 = sol.log_energy(i0);
    let mut r = EnergyReport {
        t0,
        lower_slack: f64::INFINITY,
        lower_worst_time: t0,
        upper_slack: f64::INFINITY,
        upper_worst_time: t0,
        checked: 0,
    };
    for i in i0..sol.len() {
        let dt = sol.times[i] - sol.times[i0];
        let e = sol.log_energy(i);
        let lower = e - (eb.mu3.ln() + e0 - eb.mu4 * dt);
        let upper = eb.mu5.ln() + e0 + eb.mu4 * dt - e;
        if lower < r.lower_slack {
            r.lower_slack = lower;
            r.lower_worst_time = sol.times[i];
        }
        if upper < r.upper_slack {
            r.upper_slack = upper;
            r.upper_worst_time = sol.times[i];
        }
        r.checked += 1;
    }
    Ok(r)
}
