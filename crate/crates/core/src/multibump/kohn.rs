//! Parameter bookkeeping for the perturbation `ψ = f0 + ε₂ ψ_{n₀,k₀}` used in
//! the empty-interior argument, and the final measure budget.

use num_bigint::BigInt;
use num_traits::{One, Pow};

use crate::error::{invalid, Error, Result};
use crate::fn1d::Fn1D;
use crate::interval::{is_positive, ratio, small_rational, Rational};

use super::{bump_holder_constant, BumpSpec, MultiBump, MultiBumpParams};

/// Largest `n₀` scanned by [`kohn_build_candidate`].
pub const MAX_N0: u32 = 60;

/// Inputs of the candidate builder.
#[derive(Clone, Debug)]
pub struct KohnInputs {
    /// Center function; its derivative must be Lipschitz with constant `l0` on `[-k0, k0]`.
    pub f0: Fn1D,
    pub l0: f64,
    pub h: f64,
    pub eps1: f64,
    /// Allowed `C¹` distance `ε₀` between `ψ` and `f0`.
    pub eps0: f64,
    pub k0: u32,
    pub alpha: f64,
    pub beta: f64,
}

impl KohnInputs {
    /// Defaults: `f0 ≡ 0`, `L₀ = 0`, `H = 1`, `ε₁ = 1/2`, `ε₀ = 1`, `k₀ = 1`.
    pub fn new(alpha: f64, beta: f64) -> Self {
        KohnInputs { f0: Fn1D::zero(), l0: 0.0, h: 1.0, eps1: 0.5, eps0: 1.0, k0: 1, alpha, beta }
    }
}

/// The three conditions on `n₀` with their margins.
#[derive(Clone, Debug)]
pub struct NConditions {
    /// `10/2^{n₀} < 1/k₀`, decided exactly.
    pub dyadic_fits: bool,
    /// `1/2^{n₀} > 6/2^{βn₀}`, decided exactly when β is a small rational.
    pub bumps_thin: bool,
    /// `ε₂/2^{(α+1)βn₀} > (k₀+L₀)·400/2^{2n₀}`.
    pub gap_beats_drift: bool,
    /// `log₂` of the ratio of the two sides of the third condition.
    pub gap_margin_log2: f64,
}

impl NConditions {
    pub fn all(&self) -> bool {
        self.dyadic_fits && self.bumps_thin && self.gap_beats_drift
    }
}

/// A perturbed function together with every constant that selected it.
#[derive(Clone, Debug)]
pub struct KohnCandidate {
    pub f0: Fn1D,
    pub eps1: f64,
    pub eps2: f64,
    pub n0: u32,
    pub k0: u32,
    pub psi: Fn1D,
    pub multibump: MultiBump,
    pub h_phi: f64,
    pub l_phi: f64,
    pub m_phi: f64,
    /// `ε₂H_φ ≤ ε₁H`, `ε₂L_φ ≤ ε₁`, `ε₂(k₀+2)M_φ < ε₀`.
    pub eps_conditions: [bool; 3],
    pub n_conditions: NConditions,
    /// `ε₂(k₀+2)M_φ`, the bound on the `C¹` distance from `f0`.
    pub c1_bound: f64,
}

// Exact test of 2^{(β−1)n} > 6 for β = p/q: 2^{(p−q)n} > 6^q.
fn thin_exact(beta: f64, n: u32) -> Option<bool> {
    let (p, q) = small_rational(beta)?;
    let e = (p - q) * n as i64;
    if e < 0 {
        return Some(false);
    }
    Some((BigInt::one() << e as u64) > Pow::pow(BigInt::from(6), q as u64))
}

fn n_conditions(inp: &KohnInputs, eps2: f64, n0: u32) -> NConditions {
    let n = n0 as f64;
    let dyadic_fits = n0 < 127 && 10 * (inp.k0 as u128) < (1u128 << n0);
    let bumps_thin = thin_exact(inp.beta, n0).unwrap_or((inp.beta - 1.0) * n > 6f64.log2());
    let lhs = eps2.log2() - (inp.alpha + 1.0) * inp.beta * n;
    let rhs = ((inp.k0 as f64 + inp.l0) * 400.0).log2() - 2.0 * n;
    NConditions { dyadic_fits, bumps_thin, gap_beats_drift: lhs > rhs, gap_margin_log2: lhs - rhs }
}

/// Selects `ε₂` and the least admissible `n₀`, and returns `ψ = f0 + ε₂ψ_{n₀,k₀}`.
///
/// `ε₂ = min(ε₁H/H_φ, ε₁/L_φ, ε₀/(2(k₀+2)M_φ))`, the largest value meeting the
/// first two conditions with the third held at half its budget, capped at 1/2.
pub fn kohn_build_candidate(bump: &BumpSpec, inp: &KohnInputs) -> Result<KohnCandidate> {
    if !(inp.alpha > 0.0 && inp.alpha < 1.0 && inp.beta > 1.0) {
        return Err(invalid("need alpha in (0,1) and beta > 1"));
    }
    if !(inp.eps1 > 0.0 && inp.eps1 < 1.0 && inp.h > 0.0 && inp.eps0 > 0.0 && inp.l0 >= 0.0 && inp.k0 >= 1) {
        return Err(invalid("need eps1 in (0,1), H > 0, eps0 > 0, L0 >= 0, k0 >= 1"));
    }
    if (inp.alpha + 1.0) * inp.beta >= 2.0 {
        return Err(Error::ConstructionImpossible(format!(
            "(alpha+1)*beta = {} is not below 2, so eps2*2^(-(alpha+1)*beta*n) cannot dominate 400*(k0+L0)*2^(-2n)",
            (inp.alpha + 1.0) * inp.beta
        )));
    }
    let h_phi = bump_holder_constant(bump, inp.alpha);
    let l_phi = bump.lipschitz();
    let m_phi = bump.sup();
    let k0 = inp.k0 as f64;
    let eps2 = (inp.eps1 * inp.h / h_phi).min(inp.eps1 / l_phi).min(0.5 * inp.eps0 / ((k0 + 2.0) * m_phi)).min(0.5);
    let eps_conditions =
        [eps2 * h_phi <= inp.eps1 * inp.h, eps2 * l_phi <= inp.eps1, eps2 * (k0 + 2.0) * m_phi < inp.eps0];

    let n0 = (1..=MAX_N0)
        .find(|&n| n_conditions(inp, eps2, n).all())
        .ok_or_else(|| Error::ConstructionImpossible(format!("no n0 <= {MAX_N0} satisfies the three conditions")))?;
    let n_conditions = n_conditions(inp, eps2, n0);

    let mut params = MultiBumpParams::new(inp.alpha, inp.beta, n0, inp.k0);
    params.h = inp.h;
    let multibump = MultiBump::new(bump.clone(), params)?;
    let (f0v, mbv) = (inp.f0.clone(), multibump.clone());
    let mut psi = Fn1D::new(move |x| f0v.eval(x) + eps2 * mbv.primitive(x));
    if inp.f0.has_deriv() {
        let (f0d, mbd) = (inp.f0.clone(), multibump.clone());
        psi = psi.with_deriv(move |x| f0d.deriv(x).unwrap() + eps2 * mbd.value(x));
    }
    Ok(KohnCandidate {
        f0: inp.f0.clone(),
        eps1: inp.eps1,
        eps2,
        n0,
        k0: inp.k0,
        psi,
        multibump,
        h_phi,
        l_phi,
        m_phi,
        eps_conditions,
        n_conditions,
        c1_bound: eps2 * (k0 + 2.0) * m_phi,
    })
}

/// The measure chain `meas(J₋) ≥ 19/2^{n₀} − 18/2^{n₀} − 6/2^{βn₀}`.
#[derive(Clone, Debug)]
pub struct MeasureBudget {
    pub n0: u32,
    pub beta: f64,
    pub k0: u32,
    /// Density constant `19/10` of the coincidence set on a window of radius `10/2^{n₀}`.
    pub density: Rational,
    /// `(19/10)·(10/2^{n₀})`.
    pub j3_lower: f64,
    /// `6/2^{βn₀}`: at most three bump intervals meet a window of length `2/2^{n₀}`.
    pub j1_upper: f64,
    /// `18/2^{n₀}`.
    pub j2_upper: f64,
    pub slack: f64,
    /// Exact slack when `βn₀` is an integer.
    pub slack_exact: Option<Rational>,
    /// Whether the slack is positive; decided exactly whenever β is a small rational.
    pub positive: bool,
    pub sign_is_exact: bool,
}

/// Evaluates the measure budget for `J₋` (and, symmetrically, `J₊`).
pub fn kohn_measure_budget(n0: u32, beta: f64, k0: u32) -> MeasureBudget {
    let n = n0 as f64;
    let density = ratio(19, 10);
    let pow_n = ratio(1, 1) / Rational::from_integer(BigInt::one() << n0);
    let window = Rational::from_integer(10.into()) * &pow_n;
    let j3 = &density * &window;
    let j2 = Rational::from_integer(18.into()) * &pow_n;
    let j1_upper = 6.0 * (-(beta * n)).exp2();
    let slack_exact = small_rational(beta).and_then(|(p, q)| {
        let num = p as i64 * n0 as i64;
        (num % q == 0).then(|| {
            let j1 = Rational::from_integer(6.into()) / Rational::from_integer(BigInt::one() << (num / q) as u64);
            &j3 - &j2 - j1
        })
    });
    let exact_sign = thin_exact(beta, n0);
    let slack = (-n).exp2() - j1_upper;
    let positive = match (&slack_exact, exact_sign) {
        (Some(s), _) => is_positive(s),
        (None, Some(b)) => b,
        (None, None) => slack > 0.0,
    };
    MeasureBudget {
        n0,
        beta,
        k0,
        density,
        j3_lower: 19.0 * (-n).exp2(),
        j1_upper,
        j2_upper: 18.0 * (-n).exp2(),
        slack,
        sign_is_exact: slack_exact.is_some() || exact_sign.is_some(),
        slack_exact,
        positive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multibump::default_bump;

    #[test]
    fn budget_examples() {
        let b = kohn_measure_budget(10, 1.5, 1);
        assert_eq!(b.slack_exact.clone().unwrap(), ratio(1, 1024) - ratio(6, 1 << 15));
        assert!(b.positive && b.sign_is_exact);
        let b = kohn_measure_budget(1, 1.5, 1);
        assert!(!b.positive && b.sign_is_exact && b.slack_exact.is_none());
        assert!(!thin_exact(1.5, 1).unwrap());
        assert_eq!(b.density, ratio(19, 10));
    }

    #[test]
    fn thin_condition_threshold() {
        // 2^{n/2} > 6 first holds at n = 6 (8 > 6); n = 5 gives 2^{2.5} ≈ 5.66.
        assert!(!thin_exact(1.5, 5).unwrap());
        assert!(thin_exact(1.5, 6).unwrap());
    }

    #[test]
    fn impossible_regime() {
        let e = kohn_build_candidate(&default_bump(), &KohnInputs::new(0.5, 1.5)).unwrap_err();
        assert!(matches!(e, Error::ConstructionImpossible(_)));
    }
}
