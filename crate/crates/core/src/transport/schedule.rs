use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

type Seq = Arc<dyn Fn(u32) -> f64 + Send + Sync>;

/// Upper end of the `n` range used for schedule checks and the `ℓ_d` search.
pub const SCHEDULE_NMAX: u32 = 400;

/// Scales `λ_n` and amplitudes `γ_n` of the rescaled copies, in dimension `d`.
#[derive(Clone)]
pub struct RescaleSchedule {
    pub name: String,
    lambda: Seq,
    gamma: Seq,
    pub d: u32,
    /// Smallest constant with `n²λ_n^{d/p} ≤ ℓ_d p⁴` on the search grid.
    pub ell_d: f64,
}

impl fmt::Debug for RescaleSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RescaleSchedule").field("name", &self.name).field("d", &self.d).field("ell_d", &self.ell_d).finish()
    }
}

impl RescaleSchedule {
    /// Builds a schedule and fills `ell_d` by [`search_ell`] with 400 `p` values.
    pub fn new(
        name: impl Into<String>,
        d: u32,
        lambda: impl Fn(u32) -> f64 + Send + Sync + 'static,
        gamma: impl Fn(u32) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut s = RescaleSchedule { name: name.into(), lambda: Arc::new(lambda), gamma: Arc::new(gamma), d, ell_d: 0.0 };
        s.ell_d = search_ell(&s, SCHEDULE_NMAX, 400);
        s
    }

    pub fn lambda(&self, n: u32) -> f64 {
        (self.lambda)(n)
    }

    pub fn gamma(&self, n: u32) -> f64 {
        (self.gamma)(n)
    }
}

/// `λ_n = e^{−√n}`, `γ_n = e^{−n^{2/3}}` in dimension two.
pub fn default_schedule() -> RescaleSchedule {
    RescaleSchedule::new("default", 2, |n| (-f64::from(n).sqrt()).exp(), |n| (-f64::from(n).powf(2.0 / 3.0)).exp())
}

/// `max n²λ_n^{d/p}/p⁴` over `n ≤ nmax` and `pcount` log-spaced `p ∈ [1, 10⁴]`.
pub fn search_ell(s: &RescaleSchedule, nmax: u32, pcount: usize) -> f64 {
    let ps = super::norms::default_p_grid(pcount);
    let mut best = 0.0f64;
    for n in 1..=nmax {
        let ln_l = s.lambda(n).ln();
        let a = 2.0 * f64::from(n).ln();
        for &p in &ps {
            best = best.max((a + f64::from(s.d) / p * ln_l - 4.0 * p.ln()).exp());
        }
    }
    best
}

/// One tail test: the sequence on the upper half of `1..=nmax`, in log space.
#[derive(Clone, Debug, PartialEq)]
pub struct TailCheck {
    pub label: String,
    /// Whether the log sequence moves strictly in the required direction on the tail.
    pub monotone: bool,
    /// Value of the log sequence at `nmax`.
    pub last_log: f64,
    pub ok: bool,
}

/// Results of [`check_schedule`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleReport {
    pub tails: Vec<TailCheck>,
    /// First `n` from which `nλ_n` decreases for good on the checked range.
    pub n_lambda_decreasing_from: Option<u32>,
    /// Worst `log(ℓ_d p⁴) − log(n²λ_n^{d/p})`; nonnegative when the bound holds.
    pub ell_margin: f64,
    pub ell_d: f64,
}

impl ScheduleReport {
    pub fn all(&self) -> bool {
        self.tails.iter().all(|t| t.ok) && self.ell_margin >= -1e-12
    }
}

/// Exponents `a` and rates `b` sampled by [`check_schedule`]. Larger `a` or
/// smaller `b` move the onset of the tail behaviour past `n = 400` for the
/// default schedule.
pub const SAMPLED_A: [f64; 3] = [0.5, 1.0, 2.0];
pub const SAMPLED_B: [f64; 3] = [0.5, 1.0, 2.0];

fn tail(label: String, nmax: u32, f: impl Fn(u32) -> f64, increasing: bool, limit_ok: impl Fn(f64) -> bool) -> TailCheck {
    let vals: Vec<f64> = (nmax / 2..=nmax).map(f).collect();
    let monotone = vals.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
    let last_log = *vals.last().unwrap();
    TailCheck { label, monotone, last_log, ok: monotone && limit_ok(last_log) }
}

/// Checks `nλ_n → 0`, `γ_n/λ_n^a → 0` and `γ_nλ_n^a e^{bn} → ∞` for the sampled
/// `a`, `b` by monotone-tail tests in log space on `n ≤ nmax`, and
/// `n²λ_n^{d/p} ≤ ℓ_d p⁴` on `n ≤ nmax` and `pcount` log-spaced `p ∈ [1, 10⁴]`.
pub fn check_schedule(s: &RescaleSchedule, nmax: u32, pcount: usize) -> Result<ScheduleReport> {
    if nmax < 8 || pcount < 2 {
        return Err(invalid("need nmax >= 8 and at least two p values"));
    }
    let ll = |n: u32| s.lambda(n).ln();
    let lg = |n: u32| s.gamma(n).ln();
    let mut tails = vec![tail("n*lambda_n -> 0".into(), nmax, |n| f64::from(n).ln() + ll(n), false, |v| v < 0.0)];
    for a in SAMPLED_A {
        tails.push(tail(format!("gamma_n/lambda_n^{a} -> 0"), nmax, |n| lg(n) - a * ll(n), false, |v| v < 0.0));
        for b in SAMPLED_B {
            tails.push(tail(
                format!("gamma_n*lambda_n^{a}*exp({b}n) -> inf"),
                nmax,
                |n| lg(n) + a * ll(n) + b * f64::from(n),
                true,
                |v| v > 0.0,
            ));
        }
    }
    let nl: Vec<f64> = (1..=nmax).map(|n| f64::from(n).ln() + ll(n)).collect();
    let mut from = None;
    for i in (0..nl.len() - 1).rev() {
        if nl[i + 1] < nl[i] {
            from = Some(i as u32 + 1);
        } else {
            break;
        }
    }
    let ps = super::norms::default_p_grid(pcount);
    let mut margin = f64::INFINITY;
    for n in 1..=nmax {
        for &p in &ps {
            let lhs = 2.0 * f64::from(n).ln() + f64::from(s.d) / p * ll(n);
            margin = margin.min(s.ell_d.ln() + 4.0 * p.ln() - lhs);
        }
    }
    Ok(ScheduleReport { tails, n_lambda_decreasing_from: from, ell_margin: margin, ell_d: s.ell_d })
}

/// One row of [`blowup_budget`].
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetRow {
    pub n: u32,
    pub lambda: f64,
    pub gamma: f64,
    /// `log(Cγ_nλ_n^{d/2}e^{(c/k₀²)n})`.
    pub log_growth: f64,
    /// `Cγ_nλ_n^{d/2}e^{(c/k₀²)n} − Γ₀`.
    pub bound: f64,
}

/// The lower bound table and its first crossing above `k₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetTable {
    pub rows: Vec<BudgetRow>,
    /// First tabulated `n` with bound `> k₀`.
    pub crossing: Option<u32>,
    /// Smallest integer above the real root of `log C + log γ_n + (d/2)log λ_n + (c/k₀²)n = log(k₀ + Γ₀)`,
    /// with `n` treated as continuous; `None` if no root in the range.
    pub closed_form_crossing: Option<u32>,
}

/// Tabulates `Cγ_nλ_n^{d/2}exp((c/k₀²)n) − Γ₀` over `n_range`.
pub fn blowup_budget(
    s: &RescaleSchedule,
    k0: u32,
    gamma0: f64,
    c_const: f64,
    c_rate: f64,
    n_range: std::ops::RangeInclusive<u32>,
) -> Result<BudgetTable> {
    if k0 == 0 || !(gamma0 >= 0.0 && c_const > 0.0 && c_rate > 0.0) {
        return Err(invalid("need k0 >= 1, Gamma0 >= 0, C > 0, c > 0"));
    }
    let k = f64::from(k0);
    let half_d = f64::from(s.d) / 2.0;
    let log_growth = |n: f64, lam: f64, gam: f64| c_const.ln() + gam.ln() + half_d * lam.ln() + c_rate / (k * k) * n;
    let rows: Vec<BudgetRow> = n_range
        .clone()
        .map(|n| {
            let (lambda, gamma) = (s.lambda(n), s.gamma(n));
            let lg = log_growth(f64::from(n), lambda, gamma);
            BudgetRow { n, lambda, gamma, log_growth: lg, bound: lg.exp() - gamma0 }
        })
        .collect();
    let crossing = rows.iter().find(|r| r.bound > k).map(|r| r.n);
    // Continuous root by bisection on the last sign change; λ and γ are
    // evaluated at integers, so interpolate their logs linearly in between.
    let target = (k + gamma0).ln();
    let g = |x: f64| {
        let n0 = x.floor().max(1.0) as u32;
        let w = x - f64::from(n0);
        let ll = (1.0 - w) * s.lambda(n0).ln() + w * s.lambda(n0 + 1).ln();
        let lg = (1.0 - w) * s.gamma(n0).ln() + w * s.gamma(n0 + 1).ln();
        c_const.ln() + lg + half_d * ll + c_rate / (k * k) * x - target
    };
    let (lo, hi) = (f64::from(*n_range.start()), f64::from(*n_range.end()));
    let steps = ((hi - lo) * 4.0).max(1.0) as usize;
    let mut closed_form_crossing = None;
    let mut prev = lo;
    for i in 1..=steps {
        let x = lo + (hi - lo) * i as f64 / steps as f64;
        if g(prev) <= 0.0 && g(x) > 0.0 {
            let (mut a, mut b) = (prev, x);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if g(m) > 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            closed_form_crossing = Some(b.ceil() as u32);
            break;
        }
        prev = x;
    }
    if closed_form_crossing.is_none() && g(lo) > 0.0 {
        closed_form_crossing = Some(*n_range.start());
    }
    Ok(BudgetTable { rows, crossing, closed_form_crossing })
}

/// `1 − ε₁ + Mℓ_d(ω_dR^d)^{1/p}/n`, the factor in front of `p⁴` bounding
/// `‖D_x(u₀ + u_n)‖_{L^p}` for disjoint supports.
pub fn combined_sobolev_factor(eps1: f64, m: f64, ell_d: f64, r: f64, d: u32, n: u32, p: f64) -> f64 {
    let omega_d = unit_ball_volume(d);
    1.0 - eps1 + m * ell_d * (omega_d * r.powi(d as i32)).powf(1.0 / p) / f64::from(n)
}

/// Lebesgue measure of the unit ball in `ℝ^d`.
pub fn unit_ball_volume(d: u32) -> f64 {
    let h = f64::from(d) / 2.0;
    std::f64::consts::PI.powf(h) / gamma_fn(h + 1.0)
}

// Gamma function at integers and half integers.
fn gamma_fn(x: f64) -> f64 {
    if (x - x.round()).abs() < 1e-12 {
        (1..x.round() as u64).map(|k| k as f64).product()
    } else {
        let mut v = std::f64::consts::PI.sqrt();
        let mut y = 0.5;
        while y < x - 0.25 {
            v *= y;
            y += 1.0;
        }
        v
    }
}

/// First `n ≤ nmax` with `|x₀| − Rλ_n ≥ 1 − ε₁`, from which the rescaled copy's
/// support misses the ball `B(0, 1−ε₁)` that holds `u₀` and `θ₀`.
pub fn first_disjoint_n(s: &RescaleSchedule, r: f64, x0_norm: f64, eps1: f64, nmax: u32) -> Option<u32> {
    (1..=nmax).find(|&n| x0_norm - r * s.lambda(n) >= 1.0 - eps1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_values() {
        let s = default_schedule();
        assert!((s.lambda(1) - (-1f64).exp()).abs() < 1e-16);
        assert!((s.gamma(1) - (-1f64).exp()).abs() < 1e-16);
        assert!((100.0 * s.lambda(100) - 4.54e-3).abs() < 1e-5);
        // Maximum at p = 1, n = 4: 16 e^{-4}.
        assert!((s.ell_d - 16.0 * (-4f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn default_passes_checks() {
        let s = default_schedule();
        let r = check_schedule(&s, SCHEDULE_NMAX, 200).unwrap();
        assert!(r.all(), "{r:?}");
        assert_eq!(r.n_lambda_decreasing_from, Some(4));
        let doubled = search_ell(&s, SCHEDULE_NMAX, 800);
        assert!((doubled / s.ell_d - 1.0).abs() < 0.02);
    }

    #[test]
    fn budget_crossing() {
        let s = default_schedule();
        let t = blowup_budget(&s, 1, 0.0, 1.0, 1.0, 1..=40).unwrap();
        // 5 − 5^{2/3} − √5 < 0 < 6 − 6^{2/3} − √6.
        assert_eq!(t.crossing, Some(6));
        assert_eq!(t.closed_form_crossing, Some(6));
        let t2 = blowup_budget(&s, 1, 10.0, 1.0, 1.0, 1..=40).unwrap();
        assert!(t2.crossing.unwrap() > 6 && t2.crossing.unwrap() < 20);
    }

    #[test]
    fn ball_volume_and_factor() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
        let f = combined_sobolev_factor(0.1, 1.0, 0.3, 1.0, 2, 10, 1.0);
        assert!((f - (0.9 + 0.3 * std::f64::consts::PI / 10.0)).abs() < 1e-15);
    }
}
