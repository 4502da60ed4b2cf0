//! Numerical verification of the five estimates satisfied by `φ_{n,k}`.

use crate::error::{Error, Result};
use crate::fn1d::linspace;
use crate::holder::{holder_constant_samples, MAX_PAIRWISE_POINTS};
use crate::interval::{build_kn, build_un, DyadicFamilyParams};

use super::{bump_holder_constant, BumpSpec, MultiBump, MultiBumpParams};

/// Relative slack allowed when comparing grid estimates with analytic bounds.
const REL_TOL: f64 = 1e-9;

/// Measured quantities and verdicts for the five estimates.
#[derive(Clone, Debug)]
pub struct MultiBumpReport {
    pub params: MultiBumpParams,
    /// `βn ≥ n + 2`.
    pub separated: bool,
    /// Largest `|φ_{n,k}|` seen off `U_n`, on `K_n` samples, or beyond `|x| ≥ k+1`.
    pub support_violation: f64,
    pub support_ok: bool,
    pub sup_phi: f64,
    pub sup_phi_bound: f64,
    pub sup_psi: f64,
    pub sup_psi_bound: f64,
    pub pointwise_ok: bool,
    pub lipschitz: f64,
    pub lipschitz_bound: f64,
    pub lipschitz_ok: bool,
    pub holder: f64,
    /// `H_φ` of the single bump.
    pub holder_bound: f64,
    pub holder_ok: bool,
    pub min_gap: f64,
    pub gap_bound: f64,
    pub gap_pairs: usize,
    pub gap_ok: bool,
}

impl MultiBumpReport {
    pub fn all_ok(&self) -> bool {
        self.first_failure().is_none()
    }

    /// Name of the first failed estimate, if any.
    pub fn first_failure(&self) -> Option<&'static str> {
        [
            (self.support_ok, "support"),
            (self.pointwise_ok, "pointwise bounds"),
            (self.lipschitz_ok, "Lipschitz bound"),
            (self.holder_ok, "Hölder bound"),
            (self.gap_ok, "gap estimate"),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, name)| name)
    }
}

/// A 2000-point grid of `[-k-1.5, k+1.5]`.
pub fn default_lemma_grid(k: u32) -> Vec<f64> {
    let w = k as f64 + 1.5;
    linspace(-w, w, 2000)
}

/// Runs all five checks, enforcing the separation hypothesis `βn ≥ n + 2`.
pub fn verify_multibump_lemma(bump: &BumpSpec, params: &MultiBumpParams, grid: &[f64]) -> Result<MultiBumpReport> {
    params.validate()?;
    if !params.bumps_separated() {
        return Err(Error::Precondition {
            name: "bump separation (beta*n >= n+2)",
            detail: format!(
                "beta*n = {} is below n + 2 = {}",
                params.beta * params.n as f64,
                params.n + 2
            ),
        });
    }
    check_multibump_estimates(bump, params, grid)
}

// Nodes c_j + r·u for j in `js` and u in a fixed relative grid.
fn local_grid(m: &MultiBump, js: &[i64], rel: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> =
        js.iter().flat_map(|&j| rel.iter().map(move |&u| m.center(j) + m.radius() * u)).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

/// Runs the five checks without the separation gate; `separated` records it.
///
/// Besides `grid`, the checks use grids placed on individual bumps at the
/// bump's own scale, so that the Lipschitz and Hölder estimates resolve the
/// bump shape at every level `n`.
pub fn check_multibump_estimates(
    bump: &BumpSpec,
    params: &MultiBumpParams,
    grid: &[f64],
) -> Result<MultiBumpReport> {
    let m = MultiBump::new(bump.clone(), *params)?;
    let p = *params;
    let k = p.k as f64;
    let amp = m.amplitude();
    let jk = (p.k as i64) << p.n;

    // Bumps at the origin, its neighbours and the last one in [-k, k].
    let js = [-1, 0, 1, jk];
    let lip_grid = local_grid(&m, &js, &linspace(-1.25, 1.25, 2001));
    // The Hölder grid's relative nodes are a subset of the reference grid of H_φ.
    let hol_grid = local_grid(&m, &[-1, 0, 1], &linspace(-1.25, 1.25, 601));
    debug_assert!(hol_grid.len() <= MAX_PAIRWISE_POINTS);

    let mut all: Vec<f64> = grid.iter().chain(&lip_grid).copied().collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.dedup();

    // Support: zero off U_n, on sampled K_n, and beyond k + 1.
    let fam = DyadicFamilyParams::new(p.alpha, p.beta, k + 2.0)?;
    let un = build_un(&fam, p.n)?;
    let kn = build_kn(&DyadicFamilyParams::new(p.alpha, p.beta, k + 1.0)?, p.n, p.n + 2)?.set;
    let mut support_violation = 0.0f64;
    for &x in &all {
        if x.abs() >= k + 1.0 || !un.contains(&x) {
            support_violation = support_violation.max(m.value(x).abs());
        }
    }
    for x in kn.grid(1e-3) {
        support_violation = support_violation.max(m.value(x).abs());
    }

    // Pointwise bounds.
    let sup_phi = all.iter().map(|&x| m.value(x).abs()).fold(0.0, f64::max);
    let sup_phi_bound = bump.sup() * amp;
    let psi_pts = linspace(-(k + 1.5), k + 1.5, 10_000);
    let sup_psi = psi_pts.iter().chain(&all).map(|&x| m.primitive(x).abs()).fold(0.0, f64::max);
    let sup_psi_bound = (k + 1.0) * bump.sup() * amp;

    // Lipschitz and Hölder constants.
    let lip_vals: Vec<f64> = lip_grid.iter().map(|&x| m.value(x)).collect();
    let lipschitz = holder_constant_samples(&lip_grid, &lip_vals, 1.0)?.constant;
    let lipschitz_bound = ((1.0 - p.alpha) * p.beta * p.n as f64).exp2() * bump.lipschitz();
    let hol_vals: Vec<f64> = hol_grid.iter().map(|&x| m.value(x)).collect();
    let holder = holder_constant_samples(&hol_grid, &hol_vals, p.alpha)?.constant;
    let holder_bound = bump_holder_constant(bump, p.alpha);

    // Gap: ψ is nondecreasing, so for each x the smallest increment over
    // qualifying y is at the first grid point with y − x ≥ 3/2^n.
    let inside: Vec<f64> = all.iter().copied().filter(|x| x.abs() <= k).collect();
    let sep = 3.0 / (p.n as f64).exp2();
    let gap_bound = m.bump_mass();
    let mut min_gap = f64::INFINITY;
    let mut gap_pairs = 0;
    let mut j = 0;
    for i in 0..inside.len() {
        while j < inside.len() && inside[j] - inside[i] < sep {
            j += 1;
        }
        if j == inside.len() {
            break;
        }
        gap_pairs += inside.len() - j;
        min_gap = min_gap.min(m.increment(inside[i], inside[j]));
    }

    Ok(MultiBumpReport {
        params: p,
        separated: p.bumps_separated(),
        support_violation,
        // Endpoints of K_n are rounded, so a sample may sit a few ulps inside a bump.
        support_ok: support_violation <= 1e-12 * sup_phi_bound,
        sup_phi,
        sup_phi_bound,
        sup_psi,
        sup_psi_bound,
        pointwise_ok: sup_phi <= sup_phi_bound * (1.0 + REL_TOL) && sup_psi <= sup_psi_bound * (1.0 + REL_TOL),
        lipschitz,
        lipschitz_bound,
        lipschitz_ok: lipschitz <= lipschitz_bound * (1.0 + REL_TOL),
        holder,
        holder_bound,
        holder_ok: holder <= holder_bound * (1.0 + REL_TOL),
        min_gap,
        gap_bound,
        gap_pairs,
        gap_ok: gap_pairs > 0 && min_gap >= gap_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multibump::default_bump;

    #[test]
    fn level_four_report() {
        let p = MultiBumpParams::new(0.2, 1.5, 4, 1);
        let r = verify_multibump_lemma(&default_bump(), &p, &default_lemma_grid(1)).unwrap();
        assert!(r.all_ok(), "{r:?}");
        assert!((r.gap_bound - 2f64.powf(-7.2)).abs() < 1e-15);
        assert!((r.gap_bound - 6.80e-3).abs() < 1e-5);
        // Lipschitz estimate resolves the bound.
        assert!(r.lipschitz > 0.999 * r.lipschitz_bound);
        assert_eq!(r.sup_phi, r.sup_phi_bound);
    }

    #[test]
    fn separation_gate() {
        let p = MultiBumpParams::new(0.3, 1.4, 4, 1);
        let e = verify_multibump_lemma(&default_bump(), &p, &default_lemma_grid(1)).unwrap_err();
        assert!(matches!(e, Error::Precondition { .. }));
        let r = check_multibump_estimates(&default_bump(), &p, &default_lemma_grid(1)).unwrap();
        assert!(!r.separated);
    }
}
