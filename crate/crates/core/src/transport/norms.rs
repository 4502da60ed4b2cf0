//! Spectral Sobolev norms and the admissibility conditions for velocity fields.
//!
//! With `c_k = f̂_k / n²` the Fourier coefficients of the periodic samples,
//! `‖f‖²_{Ḣ^s} = L² Σ_{k≠0} |k|^{2s} |c_k|²`. For a function supported well
//! inside the box this equals the norm on `ℝ²` (Plancherel with the
//! `(2π)^{-2}` convention), so the scaling laws of `ℝ²` hold without
//! box-dependent factors. A single mode `e^{ik·x}` has norm `L|k|^s`.

use crate::error::{invalid, Result};

use super::grid::{spectral_gradient, Fft2, ScalarField2D, VectorField2D};

/// A spectral norm and the share of its square carried by the top third of the
/// resolved wavenumbers (per axis), an aliasing warning sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsNorm {
    pub norm: f64,
    pub top_third_fraction: f64,
}

/// `Ḣ^s` (homogeneous) or `H^s` norm of `f`.
pub fn hs_norm(f: &ScalarField2D, s: f64, homogeneous: bool) -> Result<HsNorm> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid(format!("s must be nonnegative, got {s}")));
    }
    let g = f.grid;
    let spec = Fft2::new(g.n).forward(&f.values);
    let knyq = std::f64::consts::PI * g.n as f64 / g.l;
    let norm_c = 1.0 / (g.n * g.n) as f64;
    let (mut total, mut top) = (0.0, 0.0);
    for iy in 0..g.n {
        let ky = g.wavenumber(iy);
        for ix in 0..g.n {
            let kx = g.wavenumber(ix);
            let k2 = kx * kx + ky * ky;
            let w = if homogeneous {
                if k2 == 0.0 {
                    continue;
                }
                k2.powf(s)
            } else {
                (1.0 + k2).powf(s)
            };
            let term = w * (spec[iy * g.n + ix] * norm_c).norm_sqr();
            total += term;
            if kx.abs().max(ky.abs()) > 2.0 / 3.0 * knyq {
                top += term;
            }
        }
    }
    let norm = g.l * total.sqrt();
    Ok(HsNorm { norm, top_third_fraction: if total > 0.0 { top / total } else { 0.0 } })
}

/// Pointwise Frobenius norm of the spectral gradient tensor.
pub fn gradient_magnitude(u: &VectorField2D) -> Vec<f64> {
    let gx = ScalarField2D { grid: u.grid, values: u.ux.clone(), support_radius: None };
    let gy = ScalarField2D { grid: u.grid, values: u.uy.clone(), support_radius: None };
    let (a, b) = spectral_gradient(&gx);
    let (c, d) = spectral_gradient(&gy);
    (0..u.grid.len()).map(|k| (a[k] * a[k] + b[k] * b[k] + c[k] * c[k] + d[k] * d[k]).sqrt()).collect()
}

/// `‖D_x u‖_{L^p}` of the full gradient tensor (Frobenius norm pointwise).
pub fn w1p_norm(u: &VectorField2D, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("p must lie in [1, inf), got {p}")));
    }
    let g = gradient_magnitude(u);
    let m = g.iter().copied().fold(0.0, f64::max);
    if m == 0.0 {
        return Ok(0.0);
    }
    // Factor out the maximum so large p does not overflow.
    let s: f64 = g.iter().map(|v| (v / m).powf(p)).sum::<f64>() * u.grid.cell();
    Ok(m * s.powf(1.0 / p))
}

/// Spectral divergence samples.
pub fn spectral_divergence(u: &VectorField2D) -> Vec<f64> {
    let gx = ScalarField2D { grid: u.grid, values: u.ux.clone(), support_radius: None };
    let gy = ScalarField2D { grid: u.grid, values: u.uy.clone(), support_radius: None };
    let (dx, _) = spectral_gradient(&gx);
    let (_, dy) = spectral_gradient(&gy);
    dx.iter().zip(&dy).map(|(a, b)| a + b).collect()
}

/// `max |div u| / max |D_x u|`, zero for a constant field.
pub fn relative_divergence(u: &VectorField2D) -> f64 {
    let d = spectral_divergence(u).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let g = gradient_magnitude(u).into_iter().fold(0.0, f64::max);
    if g == 0.0 {
        0.0
    } else {
        d / g
    }
}

/// `p` values `10^{4i/(m−1)}`, `i < m`.
pub fn default_p_grid(m: usize) -> Vec<f64> {
    (0..m).map(|i| 10f64.powf(4.0 * i as f64 / (m.max(2) - 1) as f64)).collect()
}

/// Outcome of [`check_admissible`] over all supplied time samples.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    /// Largest `|u|` at nodes with `|x| ≥ 1`.
    pub outside_max: f64,
    pub support_ok: bool,
    pub sup: f64,
    pub bounded_ok: bool,
    /// `(p, max over samples of ‖D_x u‖_{L^p}, budget(p))`.
    pub sobolev: Vec<(f64, f64, f64)>,
    pub sobolev_ok: bool,
    pub relative_divergence: f64,
    pub div_free_ok: bool,
}

impl AdmissibilityReport {
    pub fn all(&self) -> bool {
        self.support_ok && self.bounded_ok && self.sobolev_ok && self.div_free_ok
    }

    /// Smallest `budget(p) − ‖D_x u‖_{L^p}` over the `p` grid.
    pub fn sobolev_slack(&self) -> f64 {
        self.sobolev.iter().map(|(_, v, b)| b - v).fold(f64::INFINITY, f64::min)
    }
}

/// Checks support in the unit disk, `|u| ≤ 1`, `‖D_x u‖_{L^p} ≤ budget(p)` on
/// `p_grid`, and spectral divergence at most `div_tol` times the largest
/// gradient, for every time sample.
pub fn check_admissible(
    samples: &[VectorField2D],
    budget: &dyn Fn(f64) -> f64,
    p_grid: &[f64],
    div_tol: f64,
) -> Result<AdmissibilityReport> {
    if samples.is_empty() {
        return Err(invalid("no velocity samples"));
    }
    let mut outside_max = 0.0f64;
    let mut sup = 0.0f64;
    let mut rel_div = 0.0f64;
    let mut sobolev: Vec<(f64, f64, f64)> = p_grid.iter().map(|&p| (p, 0.0, budget(p))).collect();
    for u in samples {
        for k in 0..u.grid.len() {
            let (x, y) = u.grid.point(k);
            let m = u.ux[k].hypot(u.uy[k]);
            sup = sup.max(m);
            if x.hypot(y) >= 1.0 {
                outside_max = outside_max.max(m);
            }
        }
        rel_div = rel_div.max(relative_divergence(u));
        for entry in sobolev.iter_mut() {
            entry.1 = entry.1.max(w1p_norm(u, entry.0)?);
        }
    }
    Ok(AdmissibilityReport {
        outside_max,
        support_ok: outside_max == 0.0,
        sup,
        bounded_ok: sup <= 1.0,
        sobolev_ok: sobolev.iter().all(|(_, v, b)| v <= b),
        sobolev,
        relative_divergence: rel_div,
        div_free_ok: rel_div <= div_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_norm() {
        let g = Grid::new(32, 4.0).unwrap();
        let k = 2.0 * PI / 4.0;
        // cos = (e^{ikx} + e^{-ikx})/2 has norm L|k|^s/√2.
        let f = ScalarField2D::from_fn(g, |x, _| (k * x).cos());
        for s in [0.0, 0.5, 1.0, 1.7] {
            let n = hs_norm(&f, s, true).unwrap();
            assert!((n.norm - 4.0 * k.powf(s) / 2f64.sqrt()).abs() < 1e-12, "s {s}: {n:?}");
            assert!(n.top_third_fraction < 1e-20);
        }
        assert!(hs_norm(&f, -1.0, true).is_err());
    }

    #[test]
    fn parseval_for_gradient() {
        let g = Grid::new(64, 3.0).unwrap();
        let u = VectorField2D::from_fn(g, |x, y| {
            let e = (-(x * x + y * y) / 0.1).exp();
            [e * y, -e * x + 0.3 * e]
        });
        let h1 = |v: &[f64]| {
            hs_norm(&ScalarField2D::from_values(g, v.to_vec()).unwrap(), 1.0, true).unwrap().norm.powi(2)
        };
        let w = w1p_norm(&u, 2.0).unwrap();
        assert!((w * w - h1(&u.ux) - h1(&u.uy)).abs() < 1e-8 * w * w);
    }

    #[test]
    fn zero_field_is_admissible() {
        let g = Grid::new(16, 2.5).unwrap();
        let r = check_admissible(&[VectorField2D::zeros(g)], &|p| p.powi(4), &default_p_grid(9), 1e-8).unwrap();
        assert!(r.all(), "{r:?}");
        assert_eq!(w1p_norm(&VectorField2D::zeros(g), 3.0).unwrap(), 0.0);
    }
}
