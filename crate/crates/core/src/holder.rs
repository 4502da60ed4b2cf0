//! Grid estimators for Hölder and Lipschitz constants, and the sawtooth
//! perturbation that keeps a Hölder constant while the Lipschitz constant blows up.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::fn1d::{linspace, Fn1D};
use crate::interval::IntervalSet;

/// Largest grid accepted by the pairwise estimator for orders below one.
pub const MAX_PAIRWISE_POINTS: usize = 4096;

/// Empirical constant `sup |f(y)−f(x)| / |y−x|^order` over grid pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderEstimate {
    pub order: f64,
    pub constant: f64,
    /// Grid pair attaining the supremum; `None` when no pair was available.
    pub witness: Option<(f64, f64)>,
}

impl HolderEstimate {
    pub fn zero(order: f64) -> Self {
        HolderEstimate { order, constant: 0.0, witness: None }
    }
}

fn check_grid(grid: &[f64], order: f64) -> Result<()> {
    if !(order > 0.0 && order <= 1.0) {
        return Err(invalid(format!("order must lie in (0,1], got {order}")));
    }
    if grid.len() < 2 {
        return Err(invalid("grid needs at least two points"));
    }
    for w in grid.windows(2) {
        if w[1] == w[0] {
            return Err(invalid(format!("duplicate grid point {}", w[0])));
        }
        if !(w[1] > w[0]) {
            return Err(invalid(format!("grid not increasing at {}", w[0])));
        }
    }
    Ok(())
}

/// Estimates the order-`order` Hölder constant of `f` over all pairs of `grid`.
///
/// The result is a lower bound for the true constant. For `order == 1` only
/// adjacent pairs are scanned: a chord slope over `[x, y]` is a weighted mean of
/// the adjacent slopes in between, so the maximum is the same. Orders below one
/// scan all pairs and accept at most [`MAX_PAIRWISE_POINTS`] points.
pub fn holder_constant(f: &Fn1D, order: f64, grid: &[f64]) -> Result<HolderEstimate> {
    check_grid(grid, order)?;
    let ys: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
    holder_constant_samples(grid, &ys, order)
}

/// Same as [`holder_constant`] for precomputed samples `ys[i] = f(xs[i])`.
pub fn holder_constant_samples(xs: &[f64], ys: &[f64], order: f64) -> Result<HolderEstimate> {
    check_grid(xs, order)?;
    if xs.len() != ys.len() {
        return Err(invalid("sample arrays differ in length"));
    }
    if order == 1.0 {
        return Ok(adjacent_lipschitz(xs, ys));
    }
    if xs.len() > MAX_PAIRWISE_POINTS {
        return Err(invalid(format!(
            "pairwise estimator is capped at {MAX_PAIRWISE_POINTS} points, got {}",
            xs.len()
        )));
    }
    let best = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (0.0f64, i, i);
            for j in i + 1..xs.len() {
                let r = (ys[j] - ys[i]).abs() / (xs[j] - xs[i]).powf(order);
                if r > best.0 {
                    best = (r, i, j);
                }
            }
            best
        })
        .reduce(|| (0.0, usize::MAX, usize::MAX), pick_best);
    Ok(to_estimate(order, best, xs))
}

// Deterministic tie-break: larger ratio, then smaller index pair.
fn pick_best(a: (f64, usize, usize), b: (f64, usize, usize)) -> (f64, usize, usize) {
    if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
        b
    } else {
        a
    }
}

fn to_estimate(order: f64, best: (f64, usize, usize), xs: &[f64]) -> HolderEstimate {
    let (c, i, j) = best;
    if c > 0.0 {
        HolderEstimate { order, constant: c, witness: Some((xs[i], xs[j])) }
    } else {
        HolderEstimate { order, constant: 0.0, witness: Some((xs[0], xs[1])) }
    }
}

fn adjacent_lipschitz(xs: &[f64], ys: &[f64]) -> HolderEstimate {
    let mut best = (0.0f64, 0usize, 1usize);
    for i in 0..xs.len() - 1 {
        let r = (ys[i + 1] - ys[i]).abs() / (xs[i + 1] - xs[i]);
        if r > best.0 {
            best = (r, i, i + 1);
        }
    }
    to_estimate(1.0, best, xs)
}

/// Lipschitz estimate with both points restricted to a grid of `k` with the given step.
pub fn restricted_lipschitz(f: &Fn1D, k: &IntervalSet<f64>, grid_step: f64) -> Result<HolderEstimate> {
    if !(grid_step > 0.0) {
        return Err(invalid(format!("grid_step must be positive, got {grid_step}")));
    }
    let mut grid = k.grid(grid_step);
    grid.dedup();
    if grid.len() < 2 {
        return Ok(HolderEstimate::zero(1.0));
    }
    holder_constant(f, 1.0, &grid)
}

/// `max |f'|` over the grid, a Lipschitz bound for piecewise-C¹ functions when the
/// grid resolves the derivative. `None` if `f` carries no derivative.
pub fn derivative_bound(f: &Fn1D, grid: &[f64]) -> Option<f64> {
    f.has_deriv().then(|| grid.iter().map(|&x| f.deriv(x).unwrap().abs()).fold(0.0, f64::max))
}

/// Period-one sawtooth: `saw(x) = |x|` on `[-1/2, 1/2]`.
pub fn saw(x: f64) -> f64 {
    (x - x.round()).abs()
}

fn saw_slope(x: f64) -> f64 {
    let r = x - x.round();
    if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// The sawtooth with its one-sided derivative.
pub fn sawtooth() -> Fn1D {
    Fn1D::new(saw).with_deriv(saw_slope)
}

/// Order-1/2 Hölder constant of the sawtooth, computed once by the estimator
/// over one period.
pub fn sawtooth_holder_half() -> f64 {
    static H: OnceLock<f64> = OnceLock::new();
    *H.get_or_init(|| {
        holder_constant(&sawtooth(), 0.5, &linspace(0.0, 2.0, 2001)).expect("valid grid").constant
    })
}

/// `f_n(x) = f0(x) + (H·eps1/H_saw)·n^{-1}·saw(n²x)`.
///
/// The added term has order-1/2 constant exactly `H·eps1`, uniformly in `n`,
/// while its Lipschitz constant grows like `n`.
pub fn sawtooth_perturb(f0: &Fn1D, n: u32, h: f64, eps1: f64) -> Result<Fn1D> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if !(h > 0.0) {
        return Err(invalid(format!("H must be positive, got {h}")));
    }
    if !(eps1 > 0.0 && eps1 < 1.0) {
        return Err(invalid(format!("eps1 must lie in (0,1), got {eps1}")));
    }
    let amp = h * eps1 / sawtooth_holder_half() / n as f64;
    let freq = (n as f64).powi(2);
    let base = f0.clone();
    let mut out = Fn1D::new(move |x| base.eval(x) + amp * saw(freq * x));
    if f0.has_deriv() {
        let base = f0.clone();
        out = out.with_deriv(move |x| base.deriv(x).unwrap() + amp * freq * saw_slope(freq * x));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    #[test]
    fn sqrt_half_holder() {
        let g = linspace(0.0, 1.0, 1001);
        let e = holder_constant(&Fn1D::new(f64::sqrt), 0.5, &g).unwrap();
        assert!((e.constant - 1.0).abs() < 1e-9);
        let (x, y) = e.witness.unwrap();
        assert_eq!(x, 0.0);
        assert_eq!(y, g[1]);
    }

    #[test]
    fn affine_is_exact() {
        let e = holder_constant(&Fn1D::new(|x| x), 1.0, &linspace(-1.0, 3.0, 57)).unwrap();
        assert_eq!(e.constant, 1.0);
    }

    #[test]
    fn witness_attains_constant() {
        let f = Fn1D::new(|x: f64| (3.0 * x).sin() + x.abs().sqrt());
        let g = linspace(-1.0, 1.0, 301);
        let e = holder_constant(&f, 0.3, &g).unwrap();
        let (x, y) = e.witness.unwrap();
        let r = (f.eval(y) - f.eval(x)).abs() / (y - x).abs().powf(0.3);
        assert!((r - e.constant).abs() <= 1e-12 * e.constant);
    }

    #[test]
    fn bad_grids() {
        let f = Fn1D::new(|x| x);
        assert!(holder_constant(&f, 0.5, &[0.0, 0.0, 1.0]).is_err());
        assert!(holder_constant(&f, 0.5, &[0.0]).is_err());
        assert!(holder_constant(&f, 1.5, &[0.0, 1.0]).is_err());
        assert!(holder_constant(&f, 0.5, &linspace(0.0, 1.0, MAX_PAIRWISE_POINTS + 1)).is_err());
    }

    #[test]
    fn restricted_abs_away_from_kink() {
        let k = IntervalSet::single(1.0, 2.0);
        let e = restricted_lipschitz(&Fn1D::new(f64::abs), &k, 0.01).unwrap();
        assert!((e.constant - 1.0).abs() < 1e-12);
        let e = restricted_lipschitz(&Fn1D::new(f64::abs), &IntervalSet::empty(), 0.01).unwrap();
        assert_eq!(e.constant, 0.0);
        assert!(e.witness.is_none());
        let two = IntervalSet::from_intervals([Interval::new(-2.0, -1.0), Interval::new(1.0, 2.0)]);
        assert!(restricted_lipschitz(&Fn1D::new(f64::abs), &two, 0.1).unwrap().constant <= 1.0 + 1e-12);
    }

    #[test]
    fn sawtooth_constant_is_inverse_sqrt_two() {
        // Oracle: for h ≤ 1/2 the largest increment is h, giving √h ≤ 1/√2; beyond,
        // the increment is at most 1/2, giving 1/(2√h) ≤ 1/√2.
        assert!((sawtooth_holder_half() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn sawtooth_sup_distance() {
        let f0 = Fn1D::zero();
        for n in [1, 3, 10] {
            let f = sawtooth_perturb(&f0, n, 1.0, 0.5).unwrap();
            let sup = linspace(-1.0, 1.0, 4001).iter().map(|&x| f.eval(x).abs()).fold(0.0, f64::max);
            assert!(sup <= 0.5 / sawtooth_holder_half() / (2.0 * n as f64) + 1e-15);
        }
        assert!(sawtooth_perturb(&f0, 0, 1.0, 0.5).is_err());
        assert!(sawtooth_perturb(&f0, 2, 1.0, 1.0).is_err());
    }
}
