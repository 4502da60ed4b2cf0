use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

use super::ode::Speed;

/// Continuous piecewise-linear speed through `(t_i, c_i)`, constant outside the knots.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinearSpeed {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinearSpeed {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 || knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(invalid("need at least two knots with increasing times"));
        }
        Ok(PiecewiseLinearSpeed { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Exact Lipschitz constant: the largest segment slope.
    pub fn lipschitz(&self) -> f64 {
        self.knots.windows(2).map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs()).fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.knots.iter().map(|k| k.1).fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.knots.iter().map(|k| k.1).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Speed for PiecewiseLinearSpeed {
    fn c(&self, t: f64) -> f64 {
        let k = &self.knots;
        let i = k.partition_point(|p| p.0 <= t);
        if i == 0 {
            return k[0].1;
        }
        if i == k.len() {
            return k[k.len() - 1].1;
        }
        let (a, b) = (k[i - 1], k[i]);
        a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.knots.iter().map(|k| k.0).collect()
    }
}

/// A random speed with `nknots` equally spaced knots on `[0, tmax]` and values
/// drawn uniformly from `[mu1, mu2]`. Deterministic in `seed`.
pub fn random_lipschitz_speed(seed: u64, mu1: f64, mu2: f64, tmax: f64, nknots: usize) -> Result<PiecewiseLinearSpeed> {
    if !(mu1 > 0.0 && mu2 > mu1 && tmax > 0.0 && nknots >= 2) {
        return Err(invalid("need 0 < mu1 < mu2, tmax > 0 and at least two knots"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = tmax / (nknots - 1) as f64;
    PiecewiseLinearSpeed::new((0..nknots).map(|i| (i as f64 * h, rng.gen_range(mu1..=mu2))).collect())
}

/// A triangle wave between `lo` and `hi` at twice the frequency of a mode with
/// angular frequency `omega`, phased so that `c` falls while `|v|` is near a
/// maximum and rises while `v` is near zero. This is the pumping pattern that
/// drains energy fastest for `v(0) = 0`.
pub fn resonant_speed(lo: f64, hi: f64, omega: f64, tmax: f64) -> Result<PiecewiseLinearSpeed> {
    if !(lo > 0.0 && hi > lo && omega > 0.0 && tmax > 0.0) {
        return Err(invalid("need 0 < lo < hi, omega > 0 and tmax > 0"));
    }
    // v ≈ sin(ωt): extrema at ωt = π/2 + jπ, zeros at jπ. c peaks at the quarter
    // point before each extremum and bottoms out a quarter after.
    let half = PI / omega;
    let mut knots = vec![(0.0, 0.5 * (lo + hi))];
    let mut j = 0usize;
    loop {
        let peak = half * (j as f64 + 0.25);
        let trough = half * (j as f64 + 0.75);
        if peak > tmax {
            break;
        }
        knots.push((peak, hi));
        knots.push((trough, lo));
        j += 1;
    }
    let last = knots.last().unwrap().0;
    if last < tmax {
        knots.push((tmax, knots.last().unwrap().1));
    }
    PiecewiseLinearSpeed::new(knots)
}
