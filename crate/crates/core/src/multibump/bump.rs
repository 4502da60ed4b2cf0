//! Single-bump shapes on `(-1, 1)`.

use std::fmt;
use std::sync::Arc;

use crate::fn1d::{linspace, Fn1D};
use crate::holder::holder_constant;
use crate::registry::Registry;

/// A nonnegative C¹ bump supported in `[-1, 1]` with unit integral.
pub trait Bump: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn value(&self, x: f64) -> f64;
    fn slope(&self, x: f64) -> f64;
    /// `∫_{-1}^{x} φ`, equal to 0 left of the support and 1 right of it.
    fn cdf(&self, x: f64) -> f64;
    /// `M_φ = max φ`.
    fn sup(&self) -> f64;
    /// `L_φ = max |φ'|`.
    fn lipschitz(&self) -> f64;
}

/// Shared handle to a bump shape.
pub type BumpSpec = Arc<dyn Bump>;

/// `φ(x) = (15/16)(1 − x²)²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Quartic;

impl Bump for Quartic {
    fn name(&self) -> &'static str {
        "quartic"
    }
    fn value(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            let s = 1.0 - x * x;
            0.9375 * s * s
        }
    }
    fn slope(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            -3.75 * x * (1.0 - x * x)
        }
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= -1.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            let x2 = x * x;
            0.9375 * x * (1.0 - x2 * (2.0 / 3.0 - x2 / 5.0)) + 0.5
        }
    }
    fn sup(&self) -> f64 {
        15.0 / 16.0
    }
    fn lipschitz(&self) -> f64 {
        // |φ'| = (15/4)|x(1−x²)| peaks at x = 1/√3 with value (15/4)·2/(3√3).
        15.0 / 4.0 * 2.0 / (3.0 * 3f64.sqrt())
    }
}

/// `φ(x) = cos²(πx/2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CosineSquared;

impl Bump for CosineSquared {
    fn name(&self) -> &'static str {
        "cos2"
    }
    fn value(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            (std::f64::consts::FRAC_PI_2 * x).cos().powi(2)
        }
    }
    fn slope(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            0.0
        } else {
            -std::f64::consts::FRAC_PI_2 * (std::f64::consts::PI * x).sin()
        }
    }
    fn cdf(&self, x: f64) -> f64 {
        use std::f64::consts::PI;
        if x <= -1.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            0.5 * (x + 1.0) + (PI * x).sin() / (2.0 * PI)
        }
    }
    fn sup(&self) -> f64 {
        1.0
    }
    fn lipschitz(&self) -> f64 {
        std::f64::consts::FRAC_PI_2
    }
}

/// The default bump, the normalized quartic.
pub fn default_bump() -> BumpSpec {
    Arc::new(Quartic)
}

/// All registered bump shapes.
pub fn bump_registry() -> Registry<dyn Bump> {
    Registry::<dyn Bump>::new("bump")
        .with("quartic", "(15/16)(1-x^2)^2, the default", || Box::new(Quartic))
        .with("cos2", "cos^2(pi x/2)", || Box::new(CosineSquared))
}

/// Looks up a bump by name.
pub fn bump_by_name(name: &str) -> crate::Result<BumpSpec> {
    bump_registry().create(name).map(Arc::from)
}

/// The bump as an [`Fn1D`] with derivative and antiderivative.
pub fn bump_fn(b: &BumpSpec) -> Fn1D {
    let (v, d, a) = (b.clone(), b.clone(), b.clone());
    Fn1D::new(move |x| v.value(x))
        .with_deriv(move |x| d.slope(x))
        .with_antideriv(move |x| a.cdf(x))
        .with_support(-1.0, 1.0)
}

/// Points used to estimate `H_φ`: `[-1.25, 1.25]` with 3601 nodes.
pub fn reference_grid() -> Vec<f64> {
    linspace(-1.25, 1.25, 3601)
}

/// `H_φ`: the order-`alpha` Hölder constant of the bump, estimated on [`reference_grid`].
pub fn bump_holder_constant(b: &BumpSpec, alpha: f64) -> f64 {
    holder_constant(&bump_fn(b), alpha, &reference_grid()).expect("reference grid is valid").constant
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shapes() -> Vec<BumpSpec> {
        bump_registry().names().into_iter().map(|n| bump_by_name(n).unwrap()).collect()
    }

    #[test]
    fn unit_mass_and_edges() {
        for b in shapes() {
            assert!((b.cdf(1.0) - b.cdf(-1.0) - 1.0).abs() < 1e-12, "{}", b.name());
            // The closed-form polynomial itself, evaluated at the edge, also closes to 1.
            assert!((b.cdf(1.0 - 1e-12) - 1.0).abs() < 1e-10);
            assert_eq!(b.value(1.0), 0.0);
            assert_eq!(b.value(-1.0), 0.0);
            assert!(b.slope(1.0 - 1e-9).abs() < 1e-6);
        }
    }

    #[test]
    fn quartic_mass_by_quadrature() {
        // Oracle: ∫(1−x²)² over (−1,1) = 16/15, so the normalized integral is 1.
        let n = 20000;
        let h = 2.0 / n as f64;
        let s: f64 = (0..n).map(|i| Quartic.value(-1.0 + (i as f64 + 0.5) * h) * h).sum();
        assert!((s - 1.0).abs() < 1e-8);
    }

    #[test]
    fn closed_form_constants_match_scan() {
        let g = linspace(-1.0, 1.0, 200_001);
        for b in shapes() {
            let m = g.iter().map(|&x| b.value(x)).fold(0.0, f64::max);
            let l = g.iter().map(|&x| b.slope(x).abs()).fold(0.0, f64::max);
            assert!((m - b.sup()).abs() < 1e-9, "{}", b.name());
            assert!((l - b.lipschitz()).abs() < 1e-8 && l <= b.lipschitz() + 1e-15, "{}", b.name());
        }
        assert_eq!(Quartic.sup(), Quartic.value(0.0));
    }

    #[test]
    fn derivatives_agree_with_differences() {
        let pts = linspace(-0.99, 0.99, 199);
        for b in shapes() {
            let f = bump_fn(&b);
            assert!(f.max_derivative_mismatch(&pts, 1e-5).unwrap() < 1e-6);
            let a = Fn1D::new({
                let b = b.clone();
                move |x| b.cdf(x)
            })
            .with_deriv({
                let b = b.clone();
                move |x| b.value(x)
            });
            assert!(a.max_derivative_mismatch(&pts, 1e-5).unwrap() < 1e-6);
        }
    }
}
