use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::fn1d::linspace;
use crate::stats::{fit_line, LineFit};

use super::gevrey::{gevrey_norm, GevreyKind, GevreyVector};
use super::ode::{integrate_mode_with, ModeOptions};
use super::schedule::{derive_hgamma, speed_schedule, SpeedProfile};

/// Parameters of the derivative-loss demonstration.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupConfig {
    pub alpha: f64,
    /// Regularity index of the initial data.
    pub beta: f64,
    /// Index `B` of the ultradistribution space in which loss is measured.
    pub big_b: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub h: f64,
    pub eps1: f64,
    pub delta: f64,
    pub k0: u32,
    /// Constant tail speed `c0 = m²`.
    pub c0: f64,
    pub lambdas: Vec<f64>,
    pub tol: f64,
    pub integrator: String,
    /// Output times per mode on `[1/k₀, k₀]`.
    pub samples: usize,
    /// Overrides the derived `H_γ`.
    pub h_gamma: Option<f64>,
}

impl Default for BlowupConfig {
    /// `α = 1/2`, `β = B = 4`, `c0 = 100`, `H = 2000`, `ε₁ = 1/2`, `δ = 0.9`,
    /// `k₀ = 1` and `λ_n = 2^n` for `n = 4..=9`.
    fn default() -> Self {
        BlowupConfig {
            alpha: 0.5,
            beta: 4.0,
            big_b: 4.0,
            mu1: 1.0,
            mu2: 200.0,
            h: 2000.0,
            eps1: 0.5,
            delta: 0.9,
            k0: 1,
            c0: 100.0,
            lambdas: (4..=9).map(|n| f64::from(n).exp2()).collect(),
            tol: 1e-12,
            integrator: "dopri5".into(),
            samples: 101,
            h_gamma: None,
        }
    }
}

/// One output time of one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupSample {
    pub t: f64,
    pub v: f64,
    pub vprime: f64,
    /// `log(|v'|² + λ²|v|²)`.
    pub log_e: f64,
    /// `log(|v'|² + |v|²) − 2k₀λ^{1/B}`, the log of the squared ultradistribution norms.
    pub log_ultra: f64,
}

/// Per-mode results.
#[derive(Clone, Debug)]
pub struct BlowupRow {
    pub lambda: f64,
    pub profile: SpeedProfile,
    /// `log v'(0) = −λ^{1/β}log(1+λ) − log(1+λ)`.
    pub log_v1: f64,
    /// Whether `μ₁ ≤ c_n ≤ μ₂` on the sampling grid.
    pub speed_in_range: bool,
    /// `|v(δ_n)|` divided by `max |v|` on `[0, δ_n]` from the explicit solution.
    pub v_at_delta_rel: f64,
    /// Relative error of `v'(δ_n)` against `v'(0)·exp(2ε_n mλ_nδ_n)`.
    pub vprime_at_delta_rel_err: f64,
    /// `r₀λ^{1−α} − 2λ^{1/β}log(1+λ)`.
    pub predicted_exponent: f64,
    /// Minimum of `log_ultra` over sampled `t ∈ [1/k₀, k₀]`.
    pub log_ultra_lb: f64,
    /// Log of the initial velocity's norm in `G_{β,1}`.
    pub data_log_norm: f64,
    pub samples: Vec<BlowupSample>,
}

/// Whole-sequence diagnostics.
#[derive(Clone, Debug)]
pub struct BlowupTable {
    pub config: BlowupConfig,
    pub h_gamma: f64,
    /// `ε₁Hδ/(2m^{α+1}H_γ)`.
    pub r0: f64,
    pub rows: Vec<BlowupRow>,
}

impl BlowupTable {
    pub fn strictly_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].log_ultra_lb > w[0].log_ultra_lb)
    }

    fn top_half(&self) -> &[BlowupRow] {
        &self.rows[self.rows.len() / 2..]
    }

    fn fit(&self, y: impl Fn(&BlowupRow) -> f64) -> Option<LineFit> {
        let e = 1.0 - self.config.alpha;
        let rows = self.top_half();
        let xs: Vec<f64> = rows.iter().map(|r| r.lambda.powf(e)).collect();
        let ys: Vec<f64> = rows.iter().map(y).collect();
        fit_line(&xs, &ys)
    }

    /// Fit of the measured lower bound against `λ^{1−α}` over the top half of the modes.
    pub fn slope_fit(&self) -> Option<LineFit> {
        self.fit(|r| r.log_ultra_lb)
    }

    /// Same fit after adding back the known data and weight terms
    /// `2λ^{1/β}log(1+λ) + 2k₀λ^{1/B}`, isolating the growth produced by `c_n`.
    pub fn growth_fit(&self) -> Option<LineFit> {
        let c = &self.config;
        self.fit(|r| {
            r.log_ultra_lb
                + 2.0 * r.lambda.powf(1.0 / c.beta) * r.lambda.ln_1p()
                + 2.0 * c.k0 as f64 * r.lambda.powf(1.0 / c.big_b)
        })
    }

    /// Same fit applied to the predicted exponent.
    pub fn predicted_fit(&self) -> Option<LineFit> {
        self.fit(|r| r.predicted_exponent)
    }
}

fn validate(cfg: &BlowupConfig) -> Result<()> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0,1), got {}", cfg.alpha)));
    }
    let thr = 1.0 / (1.0 - cfg.alpha);
    if !(cfg.beta > thr && cfg.big_b > thr) {
        return Err(invalid(format!(
            "derivative loss needs beta > 1/(1-alpha) and B > 1/(1-alpha) = {thr}; got beta = {}, B = {}",
            cfg.beta, cfg.big_b
        )));
    }
    if !(cfg.mu1 > 0.0 && cfg.mu1 < cfg.c0 && cfg.c0 < cfg.mu2) {
        return Err(invalid(format!("need 0 < mu1 < c0 < mu2, got {}, {}, {}", cfg.mu1, cfg.c0, cfg.mu2)));
    }
    if cfg.k0 == 0 || !(cfg.delta > 0.0 && cfg.delta < 1.0 / cfg.k0 as f64) {
        return Err(invalid(format!("need k0 >= 1 and delta in (0, 1/k0), got delta = {}", cfg.delta)));
    }
    if cfg.lambdas.is_empty() || cfg.lambdas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("eigenvalues must be a nonempty increasing list"));
    }
    if cfg.samples < 1 {
        return Err(invalid("need at least one sample per mode"));
    }
    Ok(())
}

/// Builds `c_n` and the modified initial velocity for every `λ_n`, integrates the
/// mode up to `k₀` and tabulates the ultradistribution lower bound. Modes run in
/// parallel; rows keep the order of `cfg.lambdas`.
pub fn blowup_demo(cfg: &BlowupConfig) -> Result<BlowupTable> {
    validate(cfg)?;
    let h_gamma = match cfg.h_gamma {
        Some(h) => h,
        None => derive_hgamma(cfg.alpha)?,
    };
    let m = cfg.c0.sqrt();
    let r0 = cfg.eps1 * cfg.h * cfg.delta / (2.0 * m.powf(cfg.alpha + 1.0) * h_gamma);
    let rows = cfg.lambdas.par_iter().map(|&lam| mode_row(cfg, m, h_gamma, r0, lam)).collect::<Result<Vec<_>>>()?;
    Ok(BlowupTable { config: cfg.clone(), h_gamma, r0, rows })
}

fn mode_row(cfg: &BlowupConfig, m: f64, h_gamma: f64, r0: f64, lam: f64) -> Result<BlowupRow> {
    let profile = speed_schedule(m, lam, cfg.alpha, cfg.eps1, cfg.h, h_gamma, cfg.delta)?;
    let k0 = cfg.k0 as f64;
    let log_v1 = -lam.powf(1.0 / cfg.beta) * lam.ln_1p() - lam.ln_1p();
    let window = linspace(1.0 / k0, k0, cfg.samples);
    let mut outputs = vec![0.0, profile.delta_n];
    outputs.extend(&window);
    outputs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    outputs.dedup();
    let opts = ModeOptions { outputs: Some(outputs), integrator: cfg.integrator.clone(), log_data_scale: log_v1 };
    // Integrate with v'(0) = 1; the data scale is carried in log space.
    let sol = integrate_mode_with(&profile, lam, 0.0, 1.0, k0, cfg.tol, &opts)?;

    let (lo, hi) = profile.range_on_grid(k0, 20_001);
    let id = sol.index_of(profile.delta_n).expect("delta_n is an output time");
    let (v_hat, vp_hat, s) = sol.scaled(id);
    // Explicit solution in the same units: v' grows by exp(2ε_n mλδ_n).
    let growth = profile.log_growth_at_delta();
    let rel = (s - log_v1 - growth).exp();
    let vprime_at_delta_rel_err = (vp_hat * rel - 1.0).abs();
    // max |w| on [0, mλδ_n] is within a factor e^{O(ε)} of e^{growth}.
    let v_at_delta_rel = (v_hat * rel).abs() * m * lam;

    let weight = 2.0 * k0 * lam.powf(1.0 / cfg.big_b);
    let samples: Vec<BlowupSample> = (0..sol.len())
        .map(|i| BlowupSample {
            t: sol.times[i],
            v: sol.v(i),
            vprime: sol.vprime(i),
            log_e: sol.log_energy(i),
            log_ultra: sol.log_plain_energy(i) - weight,
        })
        .collect();
    let log_ultra_lb = samples
        .iter()
        .filter(|p| p.t >= 1.0 / k0 - 1e-12)
        .map(|p| p.log_ultra)
        .fold(f64::INFINITY, f64::min);
    let data = GevreyVector::single(lam, 1.0)?;
    let data_log_norm = gevrey_norm(&data, GevreyKind::Function { s: cfg.beta, r: 1.0 })?.log_norm + log_v1;
    Ok(BlowupRow {
        lambda: lam,
        log_v1,
        speed_in_range: cfg.mu1 <= lo && hi <= cfg.mu2,
        v_at_delta_rel,
        vprime_at_delta_rel_err,
        predicted_exponent: r0 * lam.powf(1.0 - cfg.alpha) - 2.0 * lam.powf(1.0 / cfg.beta) * lam.ln_1p(),
        log_ultra_lb,
        data_log_norm,
        samples,
        profile,
    })
}

/// Checks `profile`'s explicit solution on `[0, δ_n]` at `npts` times against
/// the integrator; returns the largest error in `v'` relative to `max |v'|`.
pub fn explicit_solution_error(profile: &SpeedProfile, tol: f64, npts: usize, integrator: &str) -> Result<f64> {
    let outputs = linspace(0.0, profile.delta_n, npts);
    let opts = ModeOptions { outputs: Some(outputs.clone()), integrator: integrator.into(), log_data_scale: 0.0 };
    let sol = integrate_mode_with(profile, profile.lambda_n, 0.0, 1.0, profile.delta_n, tol, &opts)?;
    let scale = profile.log_growth_at_delta().exp();
    Ok(outputs
        .iter()
        .enumerate()
        .map(|(i, &t)| (sol.vprime(i) - profile.exact(t, 1.0).1).abs() / scale)
        .fold(0.0, f64::max))
}

