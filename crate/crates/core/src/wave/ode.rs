//! Integrators for the mode equation `v'' + λ²c(t)v = 0`.
//!
//! The state is carried as `(λv, v')` divided by a running scale whose
//! logarithm is tracked separately, so solutions growing like `exp(λ^{1−α}t)`
//! stay representable.

use crate::error::{invalid, Error, Result};
use crate::fn1d::{linspace, Fn1D};
use crate::registry::Registry;

/// A propagation speed `c(t)`.
pub trait Speed: Send + Sync {
    fn c(&self, t: f64) -> f64;
    /// Times where `c` may fail to be smooth; integrators restart there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Any [`Fn1D`] used as a speed, with optional breakpoints.
#[derive(Clone, Debug)]
pub struct FnSpeed {
    pub f: Fn1D,
    pub breaks: Vec<f64>,
}

impl FnSpeed {
    pub fn new(f: Fn1D) -> Self {
        FnSpeed { f, breaks: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        FnSpeed::new(Fn1D::new(move |_| c))
    }
}

impl Speed for FnSpeed {
    fn c(&self, t: f64) -> f64 {
        self.f.eval(t)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

/// Counters reported by an integrator.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntegratorStats {
    pub method: String,
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub tol: f64,
}

/// Solution samples. `v` and `vprime` are stored relative to `exp(log_scale[i])`.
#[derive(Clone, Debug)]
pub struct ModeSolution {
    pub lambda: f64,
    pub times: Vec<f64>,
    v_hat: Vec<f64>,
    vp_hat: Vec<f64>,
    log_scale: Vec<f64>,
    pub stats: IntegratorStats,
}

impl ModeSolution {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn v(&self, i: usize) -> f64 {
        self.v_hat[i] * self.log_scale[i].exp()
    }

    pub fn vprime(&self, i: usize) -> f64 {
        self.vp_hat[i] * self.log_scale[i].exp()
    }

    /// `(v, v')` scaled by `exp(-log_scale)`, with the log scale.
    pub fn scaled(&self, i: usize) -> (f64, f64, f64) {
        (self.v_hat[i], self.vp_hat[i], self.log_scale[i])
    }

    /// `log(|v'|² + λ²|v|²)`.
    pub fn log_energy(&self, i: usize) -> f64 {
        let (v, vp, s) = self.scaled(i);
        2.0 * s + (vp * vp + self.lambda * self.lambda * v * v).ln()
    }

    /// `log(|v'|² + |v|²)`.
    pub fn log_plain_energy(&self, i: usize) -> f64 {
        let (v, vp, s) = self.scaled(i);
        2.0 * s + (vp * vp + v * v).ln()
    }

    /// Index of the output time equal to `t` up to relative rounding.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * t.abs().max(1.0);
        self.times.iter().position(|&s| (s - t).abs() <= tol)
    }
}

/// Right-hand side `y' = f(t, y)` of the scaled first-order system.
pub type Rhs<'a> = dyn Fn(f64, [f64; 2]) -> [f64; 2] + 'a;

/// Dense output of one integration: states at the requested times.
pub struct Trajectory {
    pub states: Vec<[f64; 2]>,
    /// Logarithm of the rescaling applied to each stored state.
    pub log_scales: Vec<f64>,
    pub stats: IntegratorStats,
}

/// An integrator for two-dimensional first-order systems.
pub trait ModeIntegrator: Send + Sync {
    fn name(&self) -> &'static str;
    /// Nominal order of the propagated solution.
    fn order(&self) -> u32;
    /// Integrates from `t0` to the last output time. `breaks` are interior times
    /// where the right-hand side may be nonsmooth; `freq(t)` bounds the local
    /// angular frequency. Outputs must be sorted and start at or after `t0`.
    fn integrate(
        &self,
        f: &Rhs<'_>,
        freq: &dyn Fn(f64) -> f64,
        t0: f64,
        y0: [f64; 2],
        breaks: &[f64],
        outputs: &[f64],
        tol: f64,
    ) -> Result<Trajectory>;
}

/// Registered integrators: `dopri5` (default) and `rk4`.
pub fn integrator_registry() -> Registry<dyn ModeIntegrator> {
    Registry::<dyn ModeIntegrator>::new("integrator")
        .with("dopri5", "adaptive Dormand-Prince 5(4) with dense output", || Box::new(Dopri5))
        .with("rk4", "classical fixed-step RK4 with Hermite dense output", || Box::new(Rk4))
}

// Rescale when the state norm leaves [2^-200, 2^200].
fn renormalize(y: &mut [f64; 2], log_scale: &mut f64) {
    let n = y[0].abs().max(y[1].abs());
    if n > 0.0 && !(1e-60..=1e60).contains(&n) {
        y[0] /= n;
        y[1] /= n;
        *log_scale += n.ln();
    }
}

fn segments(t0: f64, t_end: f64, breaks: &[f64]) -> Vec<(f64, f64)> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b > t0 && b < t_end).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let mut out = Vec::with_capacity(pts.len() + 1);
    let mut a = t0;
    for b in pts {
        out.push((a, b));
        a = b;
    }
    out.push((a, t_end));
    out
}

fn check_outputs(t0: f64, outputs: &[f64], tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if outputs.is_empty() {
        return Err(invalid("no output times"));
    }
    if outputs[0] < t0 || outputs.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(invalid("output times must be sorted and not precede t0"));
    }
    Ok(())
}

const MAX_STEPS: usize = 20_000_000;

/// Dormand-Prince 5(4) with FSAL and the fourth-order dense output.
pub struct Dopri5;

mod dp {
    pub const C2: f64 = 1.0 / 5.0;
    pub const C3: f64 = 3.0 / 10.0;
    pub const C4: f64 = 4.0 / 5.0;
    pub const C5: f64 = 8.0 / 9.0;
    pub const A21: f64 = 1.0 / 5.0;
    pub const A31: f64 = 3.0 / 40.0;
    pub const A32: f64 = 9.0 / 40.0;
    pub const A41: f64 = 44.0 / 45.0;
    pub const A42: f64 = -56.0 / 15.0;
    pub const A43: f64 = 32.0 / 9.0;
    pub const A51: f64 = 19372.0 / 6561.0;
    pub const A52: f64 = -25360.0 / 2187.0;
    pub const A53: f64 = 64448.0 / 6561.0;
    pub const A54: f64 = -212.0 / 729.0;
    pub const A61: f64 = 9017.0 / 3168.0;
    pub const A62: f64 = -355.0 / 33.0;
    pub const A63: f64 = 46732.0 / 5247.0;
    pub const A64: f64 = 49.0 / 176.0;
    pub const A65: f64 = -5103.0 / 18656.0;
    pub const A71: f64 = 35.0 / 384.0;
    pub const A73: f64 = 500.0 / 1113.0;
    pub const A74: f64 = 125.0 / 192.0;
    pub const A75: f64 = -2187.0 / 6784.0;
    pub const A76: f64 = 11.0 / 84.0;
    pub const E1: f64 = 71.0 / 57600.0;
    pub const E3: f64 = -71.0 / 16695.0;
    pub const E4: f64 = 71.0 / 1920.0;
    pub const E5: f64 = -17253.0 / 339200.0;
    pub const E6: f64 = 22.0 / 525.0;
    pub const E7: f64 = -1.0 / 40.0;
    pub const D1: f64 = -12715105075.0 / 11282082432.0;
    pub const D3: f64 = 87487479700.0 / 32700410799.0;
    pub const D4: f64 = -10690763975.0 / 1880347072.0;
    pub const D5: f64 = 701980252875.0 / 199316789632.0;
    pub const D6: f64 = -1453857185.0 / 822651844.0;
    pub const D7: f64 = 69997945.0 / 29380423.0;
}

fn axpy(y: [f64; 2], terms: &[(f64, [f64; 2])], h: f64) -> [f64; 2] {
    let mut out = y;
    for &(a, k) in terms {
        out[0] += h * a * k[0];
        out[1] += h * a * k[1];
    }
    out
}

impl ModeIntegrator for Dopri5 {
    fn name(&self) -> &'static str {
        "dopri5"
    }

    fn order(&self) -> u32 {
        5
    }

    fn integrate(
        &self,
        f: &Rhs<'_>,
        freq: &dyn Fn(f64) -> f64,
        t0: f64,
        y0: [f64; 2],
        breaks: &[f64],
        outputs: &[f64],
        tol: f64,
    ) -> Result<Trajectory> {
        use dp::*;
        check_outputs(t0, outputs, tol)?;
        let t_end = *outputs.last().unwrap();
        let mut stats = IntegratorStats { method: self.name().into(), tol, ..Default::default() };
        let mut states = Vec::with_capacity(outputs.len());
        let mut log_scales = Vec::with_capacity(outputs.len());
        let mut next_out = 0;
        let mut y = y0;
        let mut log_scale = 0.0;
        renormalize(&mut y, &mut log_scale);
        while next_out < outputs.len() && outputs[next_out] <= t0 {
            states.push(y);
            log_scales.push(log_scale);
            next_out += 1;
        }
        let mut h = 0.0f64;
        for (a, b) in segments(t0, t_end, breaks) {
            let mut t = a;
            let mut k1 = f(t, y);
            stats.evaluations += 1;
            if h == 0.0 {
                h = (0.2 * tol.powf(0.2) / freq(t).max(1e-300)).min(b - a);
            }
            while t < b {
                if stats.steps + stats.rejected > MAX_STEPS {
                    return Err(Error::Integration { t, detail: format!("more than {MAX_STEPS} steps") });
                }
                let last = t + h >= b || (b - t - h) < 1e-12 * b.abs().max(1.0);
                let hs = if last { b - t } else { h };
                let k2 = f(t + C2 * hs, axpy(y, &[(A21, k1)], hs));
                let k3 = f(t + C3 * hs, axpy(y, &[(A31, k1), (A32, k2)], hs));
                let k4 = f(t + C4 * hs, axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], hs));
                let k5 = f(t + C5 * hs, axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], hs));
                let k6 = f(t + hs, axpy(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], hs));
                let y1 = axpy(y, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)], hs);
                let t1 = if last { b } else { t + hs };
                let k7 = f(t1, y1);
                stats.evaluations += 6;
                let mut err = 0.0;
                for i in 0..2 {
                    let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let sk = tol * (1.0 + y[i].abs().max(y1[i].abs()).max(y[0].abs().max(y[1].abs())));
                    err += (e / sk).powi(2);
                }
                let err = (err / 2.0).sqrt();
                if !err.is_finite() {
                    return Err(Error::Integration { t, detail: "non-finite error estimate".into() });
                }
                let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                if err <= 1.0 {
                    while next_out < outputs.len() && outputs[next_out] <= t1 {
                        let to = outputs[next_out];
                        let th = ((to - t) / hs).clamp(0.0, 1.0);
                        let th1 = 1.0 - th;
                        let mut yo = [0.0; 2];
                        for i in 0..2 {
                            let r2 = y1[i] - y[i];
                            let r3 = hs * k1[i] - r2;
                            let r4 = r2 - hs * k7[i] - r3;
                            let r5 = hs
                                * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                            yo[i] = y[i] + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
                        }
                        if to == t1 {
                            yo = y1;
                        }
                        states.push(yo);
                        log_scales.push(log_scale);
                        next_out += 1;
                    }
                    stats.steps += 1;
                    t = t1;
                    y = y1;
                    k1 = k7;
                    let before = log_scale;
                    renormalize(&mut y, &mut log_scale);
                    if log_scale != before {
                        let s = (before - log_scale).exp();
                        k1 = [k1[0] * s, k1[1] * s];
                    }
                    if !last {
                        h = hs * fac;
                    }
                } else {
                    stats.rejected += 1;
                    h = hs * fac.min(1.0);
                    if h < 1e-14 * t.abs().max(1.0) {
                        return Err(Error::Integration {
                            t,
                            detail: format!("step size underflow (h = {h:e}, error ratio {err:e})"),
                        });
                    }
                }
            }
        }
        Ok(Trajectory { states, log_scales, stats })
    }
}

/// Classical RK4 on a fixed step `h = tol^{1/4} / ω` per segment, with cubic
/// Hermite interpolation between steps.
pub struct Rk4;

impl ModeIntegrator for Rk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn order(&self) -> u32 {
        4
    }

    fn integrate(
        &self,
        f: &Rhs<'_>,
        freq: &dyn Fn(f64) -> f64,
        t0: f64,
        y0: [f64; 2],
        breaks: &[f64],
        outputs: &[f64],
        tol: f64,
    ) -> Result<Trajectory> {
        check_outputs(t0, outputs, tol)?;
        let t_end = *outputs.last().unwrap();
        let mut stats = IntegratorStats { method: self.name().into(), tol, ..Default::default() };
        let mut states = Vec::with_capacity(outputs.len());
        let mut log_scales = Vec::with_capacity(outputs.len());
        let mut next_out = 0;
        let mut y = y0;
        let mut log_scale = 0.0;
        renormalize(&mut y, &mut log_scale);
        while next_out < outputs.len() && outputs[next_out] <= t0 {
            states.push(y);
            log_scales.push(log_scale);
            next_out += 1;
        }
        for (a, b) in segments(t0, t_end, breaks) {
            let omega = linspace(a, b, 33).into_iter().map(freq).fold(0.0, f64::max).max(1e-300);
            let steps = ((b - a) * omega / tol.powf(0.25)).ceil().max(1.0);
            if steps > MAX_STEPS as f64 {
                return Err(Error::Integration { t: a, detail: format!("would need {steps} fixed steps") });
            }
            let steps = steps as usize;
            let h = (b - a) / steps as f64;
            let mut fy = f(a, y);
            stats.evaluations += 1;
            for s in 0..steps {
                let t = a + h * s as f64;
                let t1 = if s + 1 == steps { b } else { a + h * (s + 1) as f64 };
                let k1 = fy;
                let k2 = f(t + h / 2.0, axpy(y, &[(0.5, k1)], h));
                let k3 = f(t + h / 2.0, axpy(y, &[(0.5, k2)], h));
                let k4 = f(t1, axpy(y, &[(1.0, k3)], h));
                let y1 = axpy(y, &[(1.0 / 6.0, k1), (1.0 / 3.0, k2), (1.0 / 3.0, k3), (1.0 / 6.0, k4)], h);
                let f1 = f(t1, y1);
                stats.evaluations += 4;
                while next_out < outputs.len() && outputs[next_out] <= t1 {
                    let th = ((outputs[next_out] - t) / h).clamp(0.0, 1.0);
                    let (h00, h10, h01, h11) = (
                        (1.0 + 2.0 * th) * (1.0 - th).powi(2),
                        th * (1.0 - th).powi(2),
                        th * th * (3.0 - 2.0 * th),
                        th * th * (th - 1.0),
                    );
                    let yo = [
                        h00 * y[0] + h10 * h * k1[0] + h01 * y1[0] + h11 * h * f1[0],
                        h00 * y[1] + h10 * h * k1[1] + h01 * y1[1] + h11 * h * f1[1],
                    ];
                    states.push(if outputs[next_out] == t1 { y1 } else { yo });
                    log_scales.push(log_scale);
                    next_out += 1;
                }
                stats.steps += 1;
                y = y1;
                fy = f1;
                let before = log_scale;
                renormalize(&mut y, &mut log_scale);
                if log_scale != before {
                    let sc = (before - log_scale).exp();
                    fy = [fy[0] * sc, fy[1] * sc];
                }
            }
        }
        Ok(Trajectory { states, log_scales, stats })
    }
}

/// Integration options beyond the tolerance.
#[derive(Clone, Debug)]
pub struct ModeOptions {
    /// Output times; defaults to 1001 uniform times on `[0, tmax]` plus the speed's breakpoints.
    pub outputs: Option<Vec<f64>>,
    pub integrator: String,
    /// Natural log of an extra factor multiplying `(v0, v1)`, for initial data below the
    /// double-precision range.
    pub log_data_scale: f64,
}

impl Default for ModeOptions {
    fn default() -> Self {
        ModeOptions { outputs: None, integrator: "dopri5".into(), log_data_scale: 0.0 }
    }
}

/// Integrates `v'' + λ²c(t)v = 0`, `v(0) = v0`, `v'(0) = v1`, on `[0, tmax]` with
/// the default options.
pub fn integrate_mode(c: &dyn Speed, lambda: f64, v0: f64, v1: f64, tmax: f64, tol: f64) -> Result<ModeSolution> {
    integrate_mode_with(c, lambda, v0, v1, tmax, tol, &ModeOptions::default())
}

pub fn integrate_mode_with(
    c: &dyn Speed,
    lambda: f64,
    v0: f64,
    v1: f64,
    tmax: f64,
    tol: f64,
    opts: &ModeOptions,
) -> Result<ModeSolution> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    if !(tmax > 0.0 && tmax.is_finite()) {
        return Err(invalid(format!("tmax must be positive, got {tmax}")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let integrator = integrator_registry().create(&opts.integrator)?;
    let breaks = c.breakpoints();
    let outputs = match &opts.outputs {
        Some(o) => o.clone(),
        None => {
            let mut o = linspace(0.0, tmax, 1001);
            o.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < tmax));
            o.sort_by(|a, b| a.partial_cmp(b).unwrap());
            o.dedup();
            o
        }
    };
    if outputs.first().is_some_and(|&t| t < 0.0) || outputs.last().is_some_and(|&t| t > tmax) {
        return Err(invalid("output times must lie in [0, tmax]"));
    }
    let rhs = |t: f64, y: [f64; 2]| [lambda * y[1], -lambda * c.c(t) * y[0]];
    let freq = |t: f64| lambda * c.c(t).abs().sqrt();
    let traj = integrator.integrate(&rhs, &freq, 0.0, [lambda * v0, v1], &breaks, &outputs, tol)?;
    let n = traj.states.len();
    let mut v_hat = Vec::with_capacity(n);
    let mut vp_hat = Vec::with_capacity(n);
    for s in &traj.states {
        v_hat.push(s[0] / lambda);
        vp_hat.push(s[1]);
    }
    let log_scale = traj.log_scales.iter().map(|s| s + opts.log_data_scale).collect();
    Ok(ModeSolution { lambda, times: outputs, v_hat, vp_hat, log_scale, stats: traj.stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        for name in ["dopri5", "rk4"] {
            let opts = ModeOptions { integrator: name.into(), ..Default::default() };
            let sol = integrate_mode_with(&FnSpeed::constant(1.0), 1.0, 0.0, 1.0, 10.0, 1e-10, &opts).unwrap();
            assert_eq!(sol.v(0), 0.0);
            assert_eq!(sol.vprime(0), 1.0);
            let err = (0..sol.len()).map(|i| (sol.v(i) - sol.times[i].sin()).abs()).fold(0.0, f64::max);
            assert!(err < 1e-7, "{name}: {err}");
        }
    }

    #[test]
    fn dense_output_between_steps() {
        // Outputs far denser than the step size exercise the interpolant.
        let outputs = linspace(0.0, 3.0, 3001);
        let opts = ModeOptions { outputs: Some(outputs), ..Default::default() };
        let sol = integrate_mode_with(&FnSpeed::constant(4.0), 1.0, 1.0, 0.0, 3.0, 1e-9, &opts).unwrap();
        assert!(sol.stats.steps < 300);
        let err = (0..sol.len()).map(|i| (sol.v(i) - (2.0 * sol.times[i]).cos()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn huge_growth_stays_finite() {
        // c ≡ −1 gives v = sinh(λt)/λ; at λ = 1000, t = 1 this overflows f64.
        let sol = integrate_mode(&FnSpeed::constant(-1.0), 1000.0, 0.0, 1.0, 1.0, 1e-12).unwrap();
        let last = sol.len() - 1;
        let expect = 2.0 * (1000.0f64 - 2f64.ln()) + (1.0 + 1e-6f64).ln();
        assert!((sol.log_plain_energy(last) - expect).abs() < 1e-6, "{} vs {expect}", sol.log_plain_energy(last));
    }

    #[test]
    fn rejects_bad_input() {
        let c = FnSpeed::constant(1.0);
        assert!(integrate_mode(&c, 0.0, 0.0, 1.0, 1.0, 1e-8).is_err());
        assert!(integrate_mode(&c, 1.0, 0.0, 1.0, 1.0, 0.0).is_err());
        let opts = ModeOptions { integrator: "euler".into(), ..Default::default() };
        assert!(integrate_mode_with(&c, 1.0, 0.0, 1.0, 1.0, 1e-8, &opts).is_err());
    }
}
