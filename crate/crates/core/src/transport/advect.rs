//! Semi-Lagrangian transport on the periodic grid.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::registry::Registry;
use crate::stats::{fit_line, LineFit};

use super::fields::VelocityField;
use super::grid::ScalarField2D;
use super::norms::hs_norm;

/// Periodic interpolation of grid samples.
pub trait Interpolator: Send + Sync {
    fn name(&self) -> &'static str;
    /// Value at fractional grid indices `(fx, fy)`; integer indices return the sample exactly.
    fn sample_index(&self, f: &ScalarField2D, fx: f64, fy: f64) -> f64;

    /// Value at a physical point.
    fn sample(&self, f: &ScalarField2D, x: f64, y: f64) -> f64 {
        let g = f.grid;
        let h = g.h();
        self.sample_index(f, (x + 0.5 * g.l) / h, (y + 0.5 * g.l) / h)
    }
}

#[inline]
fn wrap(i: i64, n: usize) -> usize {
    i.rem_euclid(n as i64) as usize
}

/// Tensor-product four-point Lagrange interpolation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CubicLagrange;

#[inline]
fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

impl Interpolator for CubicLagrange {
    fn name(&self) -> &'static str {
        "cubic-lagrange"
    }

    fn sample_index(&self, f: &ScalarField2D, fx: f64, fy: f64) -> f64 {
        let n = f.grid.n;
        let (ix, iy) = (fx.floor(), fy.floor());
        let (wx, wy) = (cubic_weights(fx - ix), cubic_weights(fy - iy));
        let (ix, iy) = (ix as i64, iy as i64);
        let mut acc = 0.0;
        for (b, wyb) in wy.iter().enumerate() {
            if *wyb == 0.0 {
                continue;
            }
            let row = wrap(iy + b as i64 - 1, n) * n;
            let mut r = 0.0;
            for (a, wxa) in wx.iter().enumerate() {
                if *wxa != 0.0 {
                    r += wxa * f.values[row + wrap(ix + a as i64 - 1, n)];
                }
            }
            acc += wyb * r;
        }
        acc
    }
}

/// Bilinear interpolation; monotone but diffusive.
#[derive(Clone, Copy, Debug, Default)]
pub struct Linear;

impl Interpolator for Linear {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn sample_index(&self, f: &ScalarField2D, fx: f64, fy: f64) -> f64 {
        let n = f.grid.n;
        let (ix, iy) = (fx.floor(), fy.floor());
        let (tx, ty) = (fx - ix, fy - iy);
        let (ix, iy) = (ix as i64, iy as i64);
        let v = |a: i64, b: i64| f.values[wrap(iy + b, n) * n + wrap(ix + a, n)];
        let lo = if tx == 0.0 { v(0, 0) } else { (1.0 - tx) * v(0, 0) + tx * v(1, 0) };
        if ty == 0.0 {
            return lo;
        }
        let hi = if tx == 0.0 { v(0, 1) } else { (1.0 - tx) * v(0, 1) + tx * v(1, 1) };
        (1.0 - ty) * lo + ty * hi
    }
}

pub fn interpolator_registry() -> Registry<dyn Interpolator> {
    Registry::<dyn Interpolator>::new("interpolator")
        .with("cubic-lagrange", "four-point Lagrange, fourth order", || Box::new(CubicLagrange))
        .with("linear", "bilinear", || Box::new(Linear))
}

#[derive(Clone, Debug)]
pub struct AdvectOptions {
    pub interpolator: String,
    /// Largest allowed `dt·sup|u| / h`. Semi-Lagrangian steps are stable
    /// beyond 1; the bound keeps departure points within a few cells.
    pub cfl_safety: f64,
    /// Restore `∫ρ` after every step by a correction proportional to `|ρ|`.
    pub mass_fix: bool,
    /// Record a frame every this many steps (0: only the initial and final frames).
    pub record_every: usize,
}

impl Default for AdvectOptions {
    fn default() -> Self {
        AdvectOptions { interpolator: "cubic-lagrange".into(), cfl_safety: 4.0, mass_fix: true, record_every: 0 }
    }
}

/// Recorded frames of `ρ`.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub frames: Vec<ScalarField2D>,
    pub steps: usize,
    pub cfl: f64,
}

impl Evolution {
    pub fn last(&self) -> &ScalarField2D {
        self.frames.last().expect("at least the initial frame is recorded")
    }
}

fn rk4_back(u: &dyn VelocityField, t1: f64, dt: f64, x: f64, y: f64) -> (f64, f64) {
    // Integrate dx/ds = u(s, x) backwards from s = t1 to s = t1 − dt.
    let h = -dt;
    let k1 = u.velocity(t1, x, y);
    let k2 = u.velocity(t1 + 0.5 * h, x + 0.5 * h * k1[0], y + 0.5 * h * k1[1]);
    let k3 = u.velocity(t1 + 0.5 * h, x + 0.5 * h * k2[0], y + 0.5 * h * k2[1]);
    let k4 = u.velocity(t1 + h, x + h * k3[0], y + h * k3[1]);
    (
        h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    )
}

fn fix_mass(values: &mut [f64], target: f64) {
    let current: f64 = values.iter().sum();
    let weight: f64 = values.iter().map(|v| v.abs()).sum();
    let defect = target - current;
    if defect == 0.0 || weight == 0.0 {
        return;
    }
    let scale = defect / weight;
    for v in values.iter_mut() {
        *v += scale * v.abs();
    }
}

/// Solves `∂_tρ + u·∇ρ = 0`, `ρ(0) = θ` on `[0, tmax]` with step `dt` (the last
/// step is shortened to land on `tmax`).
///
/// Errors when `dt·sup|u| > cfl_safety·h`, using the field's speed bound.
pub fn advect(u: &dyn VelocityField, theta: &ScalarField2D, tmax: f64, dt: f64, opts: &AdvectOptions) -> Result<Evolution> {
    advect_from(u, theta, 0.0, tmax, dt, opts)
}

/// As [`advect`], with `ρ(t_start) = θ` and evolution up to `t_end`.
pub fn advect_from(
    u: &dyn VelocityField,
    theta: &ScalarField2D,
    t_start: f64,
    t_end: f64,
    dt: f64,
    opts: &AdvectOptions,
) -> Result<Evolution> {
    let tmax = t_end - t_start;
    if !(tmax >= 0.0 && dt > 0.0 && tmax.is_finite() && t_start.is_finite()) {
        return Err(invalid("need t_end >= t_start and dt > 0"));
    }
    let interp = interpolator_registry().create(&opts.interpolator)?;
    let grid = theta.grid;
    let h = grid.h();
    let cfl = dt * u.speed_bound() / h;
    if cfl > opts.cfl_safety {
        return Err(invalid(format!(
            "step violates the CFL bound: dt·sup|u|/h = {cfl:.3} > {}",
            opts.cfl_safety
        )));
    }
    let steps = (tmax / dt - 1e-9).ceil().max(0.0) as usize;
    let mass0: f64 = theta.values.iter().sum();
    let mut rho = theta.clone();
    let mut ev = Evolution { times: vec![t_start], frames: vec![theta.clone()], steps, cfl };
    let mut next = vec![0.0; grid.len()];
    for step in 0..steps {
        let t0 = t_start + step as f64 * dt;
        let t1 = (t0 + dt).min(t_end);
        let tau = t1 - t0;
        next.par_iter_mut().enumerate().for_each(|(k, out)| {
            let (ix, iy) = (k % grid.n, k / grid.n);
            let (x, y) = (grid.coord(ix), grid.coord(iy));
            let (dx, dy) = rk4_back(u, t1, tau, x, y);
            *out = interp.sample_index(&rho, ix as f64 + dx / h, iy as f64 + dy / h);
        });
        if opts.mass_fix {
            fix_mass(&mut next, mass0);
        }
        std::mem::swap(&mut rho.values, &mut next);
        let last = step + 1 == steps;
        if last || (opts.record_every > 0 && (step + 1) % opts.record_every == 0) {
            ev.times.push(t1);
            ev.frames.push(rho.clone());
        }
    }
    Ok(ev)
}

/// Least-squares fit of `log ‖ρ(t)‖_{Ḣ^s}` against `t` over the recorded frames.
#[derive(Clone, Debug)]
pub struct MixingFit {
    pub s: f64,
    pub times: Vec<f64>,
    pub log_norms: Vec<f64>,
    pub fit: Option<LineFit>,
}

pub fn mixing_fit(ev: &Evolution, s: f64) -> Result<MixingFit> {
    let log_norms = ev
        .frames
        .iter()
        .map(|f| hs_norm(f, s, true).map(|h| h.norm.ln()))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_line(&ev.times, &log_norms);
    Ok(MixingFit { s, times: ev.times.clone(), log_norms, fit })
}
