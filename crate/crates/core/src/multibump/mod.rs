//! Multi-bump functions and the bookkeeping around them.
//!
//! `φ_{n,k}(x) = 2^{-αβn} Σ_{|j| ≤ 2^n k} φ(2^{βn}(x − j/2^n))` places a rescaled
//! copy of a single bump on every dyadic point of level `n` in `[-k, k]`, and
//! `ψ_{n,k}` is its primitive vanishing at the origin.

mod bump;
mod extension;
mod kohn;
mod lemma;

pub use bump::{
    bump_by_name, bump_fn, bump_holder_constant, bump_registry, default_bump, reference_grid, Bump, BumpSpec,
    CosineSquared, Quartic,
};
pub use extension::{extend_piecewise_affine, Extension};
pub use kohn::{kohn_build_candidate, kohn_measure_budget, KohnCandidate, KohnInputs, MeasureBudget, NConditions};
pub use lemma::{check_multibump_estimates, default_lemma_grid, verify_multibump_lemma, MultiBumpReport};

use crate::error::{invalid, Result};
use crate::fn1d::Fn1D;

/// Parameters of `φ_{n,k}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiBumpParams {
    pub alpha: f64,
    pub beta: f64,
    pub n: u32,
    pub k: u32,
    /// Hölder budget `H` of the surrounding construction.
    pub h: f64,
    /// `Λ_n = lambda_scale · 2^{(1−α)βn}`; must be at least 1.
    pub lambda_scale: f64,
}

impl MultiBumpParams {
    pub fn new(alpha: f64, beta: f64, n: u32, k: u32) -> Self {
        MultiBumpParams { alpha, beta, n, k, h: 1.0, lambda_scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if !(self.beta > 1.0) {
            return Err(invalid(format!("beta must exceed 1, got {}", self.beta)));
        }
        if self.n == 0 || self.k == 0 {
            return Err(invalid("n and k must be positive"));
        }
        if !(self.h > 0.0) {
            return Err(invalid(format!("H must be positive, got {}", self.h)));
        }
        if !(self.lambda_scale >= 1.0) {
            return Err(invalid(format!("Lambda scale must be at least 1, got {}", self.lambda_scale)));
        }
        if self.n > 60 {
            return Err(invalid(format!("n = {} exceeds the supported level 60", self.n)));
        }
        Ok(())
    }

    /// Whether `βn ≥ n + 2`, the separation hypothesis of the multi-bump lemma.
    pub fn bumps_separated(&self) -> bool {
        self.beta * self.n as f64 >= self.n as f64 + 2.0 - 1e-12
    }

    /// `Λ_n` under this rule.
    pub fn lambda_n(&self, n: u32) -> f64 {
        self.lambda_scale * ((1.0 - self.alpha) * self.beta * n as f64).exp2()
    }
}

/// A multi-bump function with closed-form derivative and primitive.
#[derive(Clone, Debug)]
pub struct MultiBump {
    bump: BumpSpec,
    params: MultiBumpParams,
    radius: f64,
    scale: f64,
    amp: f64,
    dyadic: f64,
    jmax: i64,
}

impl MultiBump {
    pub fn new(bump: BumpSpec, params: MultiBumpParams) -> Result<Self> {
        params.validate()?;
        let bn = params.beta * params.n as f64;
        let dyadic = (params.n as f64).exp2();
        let jmax = (params.k as i64)
            .checked_mul(1i64 << params.n)
            .ok_or_else(|| invalid("2^n k overflows"))?;
        Ok(MultiBump {
            bump,
            params,
            radius: (-bn).exp2(),
            scale: bn.exp2(),
            amp: (-params.alpha * bn).exp2(),
            dyadic,
            jmax,
        })
    }

    pub fn params(&self) -> &MultiBumpParams {
        &self.params
    }

    pub fn bump(&self) -> &BumpSpec {
        &self.bump
    }

    /// Bump radius `2^{-βn}`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Peak height factor `2^{-αβn}`.
    pub fn amplitude(&self) -> f64 {
        self.amp
    }

    /// Mass of one bump, `2^{-(α+1)βn}`.
    pub fn bump_mass(&self) -> f64 {
        self.amp * self.radius
    }

    /// Center of bump `j`.
    pub fn center(&self, j: i64) -> f64 {
        j as f64 / self.dyadic
    }

    // Bump indices whose support may contain x, clamped to [-jmax, jmax].
    fn active(&self, x: f64) -> (i64, i64) {
        let lo = ((x - self.radius) * self.dyadic).floor() as i64;
        let hi = ((x + self.radius) * self.dyadic).ceil() as i64;
        (lo.max(-self.jmax), hi.min(self.jmax))
    }

    pub fn value(&self, x: f64) -> f64 {
        let (a, b) = self.active(x);
        (a..=b).map(|j| self.bump.value(self.scale * (x - self.center(j)))).sum::<f64>() * self.amp
    }

    pub fn slope(&self, x: f64) -> f64 {
        let (a, b) = self.active(x);
        (a..=b).map(|j| self.bump.slope(self.scale * (x - self.center(j)))).sum::<f64>() * self.amp * self.scale
    }

    // Σ_j Φ(s(x − c_j)) split into a count of bumps entirely left of x and the
    // fractional contributions of the bumps that may straddle x.
    fn cdf_sum(&self, x: f64) -> (i64, f64) {
        let lo = ((x - self.radius) * self.dyadic).floor() as i64;
        let hi = ((x + self.radius) * self.dyadic).ceil() as i64;
        let full = (lo + self.jmax).clamp(0, 2 * self.jmax + 1);
        let partial =
            (lo.max(-self.jmax)..=hi.min(self.jmax)).map(|j| self.bump.cdf(self.scale * (x - self.center(j)))).sum();
        (full, partial)
    }

    /// `ψ(y) − ψ(x)`, computed without cancellation against `ψ(0)`.
    pub fn increment(&self, x: f64, y: f64) -> f64 {
        let (cx, px) = self.cdf_sum(x);
        let (cy, py) = self.cdf_sum(y);
        ((cy - cx) as f64 + (py - px)) * self.bump_mass()
    }

    /// `ψ_{n,k}(x) = ∫_0^x φ_{n,k}`.
    pub fn primitive(&self, x: f64) -> f64 {
        self.increment(0.0, x)
    }

    /// `φ_{n,k}` as an [`Fn1D`] carrying derivative and primitive.
    pub fn to_fn(&self) -> Fn1D {
        let (v, d, a) = (self.clone(), self.clone(), self.clone());
        let reach = self.params.k as f64 + self.radius;
        Fn1D::new(move |x| v.value(x))
            .with_deriv(move |x| d.slope(x))
            .with_antideriv(move |x| a.primitive(x))
            .with_support(-reach, reach)
    }

    /// `ψ_{n,k}` as an [`Fn1D`] whose derivative is `φ_{n,k}`.
    pub fn primitive_fn(&self) -> Fn1D {
        let (v, d) = (self.clone(), self.clone());
        Fn1D::new(move |x| v.primitive(x)).with_deriv(move |x| d.value(x))
    }
}

/// `φ_{n,k}` for the given bump and parameters.
pub fn multibump_fn(bump: &BumpSpec, params: &MultiBumpParams) -> Result<Fn1D> {
    Ok(MultiBump::new(bump.clone(), *params)?.to_fn())
}
