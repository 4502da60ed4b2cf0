use crate::error::{invalid, Result};

/// Finite list of `(λ_i, u_i)` with `λ_i ≥ 0` nondecreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct GevreyVector {
    entries: Vec<(f64, f64)>,
}

impl GevreyVector {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.iter().any(|&(l, u)| !(l >= 0.0 && l.is_finite() && u.is_finite())) {
            return Err(invalid("eigenvalues must be finite and nonnegative, coefficients finite"));
        }
        if entries.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(invalid("eigenvalues must be nondecreasing"));
        }
        Ok(GevreyVector { entries })
    }

    /// A single mode.
    pub fn single(lambda: f64, u: f64) -> Result<Self> {
        Self::new(vec![(lambda, u)])
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }
}

/// Which weighted norm to take.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GevreyKind {
    /// `Σ u² exp(2rλ^{1/s})`.
    Function { s: f64, r: f64 },
    /// `Σ u² exp(λ^{1/s} log(1+λ))`.
    Infty { s: f64 },
    /// `Σ u² exp(−2Rλ^{1/S})`.
    Ultra { s: f64, r: f64 },
}

impl GevreyKind {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            GevreyKind::Function { s, r } | GevreyKind::Ultra { s, r } => s > 0.0 && r > 0.0,
            GevreyKind::Infty { s } => s > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("Gevrey parameters must be positive: {self:?}")))
        }
    }

    /// Logarithm of the weight multiplying `u²`.
    pub fn log_weight(&self, lambda: f64) -> f64 {
        match *self {
            GevreyKind::Function { s, r } => 2.0 * r * lambda.powf(1.0 / s),
            GevreyKind::Infty { s } => lambda.powf(1.0 / s) * lambda.ln_1p(),
            GevreyKind::Ultra { s, r } => -2.0 * r * lambda.powf(1.0 / s),
        }
    }
}

/// A norm together with its logarithm; `norm` may be infinite or zero when the
/// logarithm leaves the double range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GevreyNorm {
    pub log_norm: f64,
    pub norm: f64,
}

/// Square root of the weighted square sum, accumulated in log space.
pub fn gevrey_norm(u: &GevreyVector, kind: GevreyKind) -> Result<GevreyNorm> {
    kind.validate()?;
    let terms: Vec<f64> = u
        .entries
        .iter()
        .filter(|e| e.1 != 0.0)
        .map(|&(l, x)| 2.0 * x.abs().ln() + kind.log_weight(l))
        .collect();
    let log_sq = match terms.iter().copied().fold(f64::NEG_INFINITY, f64::max) {
        m if m == f64::NEG_INFINITY => m,
        m => m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln(),
    };
    let log_norm = 0.5 * log_sq;
    Ok(GevreyNorm { log_norm, norm: log_norm.exp() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_entry_examples() {
        let u = GevreyVector::single(5.0, 1.0).unwrap();
        let f = gevrey_norm(&u, GevreyKind::Function { s: 1.0, r: 1.0 }).unwrap();
        assert!((2.0 * f.log_norm - 10.0).abs() < 1e-14);
        let g = gevrey_norm(&u, GevreyKind::Ultra { s: 1.0, r: 1.0 }).unwrap();
        assert!((2.0 * g.log_norm + 10.0).abs() < 1e-14);
        let h = gevrey_norm(&u, GevreyKind::Infty { s: 2.0 }).unwrap();
        assert!((2.0 * h.log_norm - 5f64.sqrt() * 6f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn log_space_survives_overflow() {
        let u = GevreyVector::new(vec![(1.0, 1.0), (1e6, 1.0)]).unwrap();
        let n = gevrey_norm(&u, GevreyKind::Function { s: 1.0, r: 1.0 }).unwrap();
        assert_eq!(n.norm, f64::INFINITY);
        assert!((n.log_norm - 1e6).abs() < 1e-6);
        let z = gevrey_norm(&GevreyVector::single(3.0, 0.0).unwrap(), GevreyKind::Infty { s: 1.0 }).unwrap();
        assert_eq!(z.norm, 0.0);
    }

    #[test]
    fn validation() {
        assert!(GevreyVector::new(vec![(2.0, 1.0), (1.0, 1.0)]).is_err());
        assert!(GevreyVector::new(vec![(-1.0, 1.0)]).is_err());
        let u = GevreyVector::single(1.0, 1.0).unwrap();
        assert!(gevrey_norm(&u, GevreyKind::Ultra { s: 0.0, r: 1.0 }).is_err());
    }
}
