use crate::error::{invalid, Result};
use crate::fn1d::Fn1D;
use crate::interval::IntervalSet;

/// Result of [`extend_piecewise_affine`].
#[derive(Clone, Debug)]
pub struct Extension {
    /// The extended function `φ̂`.
    pub f: Fn1D,
    /// Gap components `(a_i, b_i)` of `[C, D] ∖ K`.
    pub gaps: Vec<(f64, f64)>,
    /// `meas([C, D] ∖ K)`.
    pub gap_measure: f64,
    /// `2H·meas([C,D]∖K)^α`, the guaranteed bound on `sup |φ − φ̂|`.
    pub sup_bound: f64,
}

/// Replaces `phi` on every gap of `[c, d] ∖ k` by the affine interpolant of its
/// values at the gap endpoints, leaving it untouched on `k` and outside `(c, d)`.
///
/// `holder = (α, H)` and `lip` are the caller's constants for `phi`; they only
/// enter the reported bound. The guarantees (Hölder constant kept, Lipschitz
/// constant on `[c, d]` kept, uniform distance bound) are for tests to certify.
pub fn extend_piecewise_affine(
    phi: &Fn1D,
    k: &IntervalSet<f64>,
    holder: (f64, f64),
    lip: f64,
    c: f64,
    d: f64,
) -> Result<Extension> {
    let (alpha, h) = holder;
    if !(c < d) {
        return Err(invalid(format!("need C < D, got C = {c}, D = {d}")));
    }
    if !k.contains(&c) || !k.contains(&d) {
        return Err(invalid(format!("C = {c} and D = {d} must both lie in K")));
    }
    if !(alpha > 0.0 && alpha <= 1.0 && h > 0.0 && lip >= 0.0) {
        return Err(invalid("Hölder order must lie in (0,1] with H > 0 and L ≥ 0"));
    }
    let gaps: Vec<(f64, f64)> = k.gaps().into_iter().filter(|&(a, b)| a >= c && b <= d && a < b).collect();
    let gap_measure: f64 = gaps.iter().map(|(a, b)| b - a).sum();
    // Each gap carries its endpoints and the affine coefficients.
    let table: Vec<(f64, f64, f64, f64)> = gaps
        .iter()
        .map(|&(a, b)| {
            let (fa, fb) = (phi.eval(a), phi.eval(b));
            (a, b, fa, (fb - fa) / (b - a))
        })
        .collect();
    let locate = {
        let table = table.clone();
        move |x: f64| -> Option<(f64, f64, f64, f64)> {
            let i = table.partition_point(|g| g.0 < x);
            (i > 0 && x < table[i - 1].1).then(|| table[i - 1])
        }
    };
    let base = phi.clone();
    let loc = locate.clone();
    let mut f = Fn1D::new(move |x| match loc(x) {
        Some((a, _, fa, slope)) => fa + slope * (x - a),
        None => base.eval(x),
    });
    if phi.has_deriv() {
        let base = phi.clone();
        f = f.with_deriv(move |x| match locate(x) {
            Some((_, _, _, slope)) => slope,
            None => base.deriv(x).unwrap(),
        });
    }
    Ok(Extension { f, gaps, gap_measure, sup_bound: 2.0 * h * gap_measure.powf(alpha) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fn1d::linspace;
    use crate::holder::holder_constant;
    use crate::interval::Interval;

    fn sqrt_abs() -> Fn1D {
        Fn1D::new(|x: f64| x.abs().sqrt())
    }

    #[test]
    fn no_gaps_is_identity() {
        let k = IntervalSet::single(-2.0, 2.0);
        let e = extend_piecewise_affine(&sqrt_abs(), &k, (0.5, 1.0), 10.0, -1.0, 1.0).unwrap();
        assert!(e.gaps.is_empty());
        for x in linspace(-3.0, 3.0, 101) {
            assert_eq!(e.f.eval(x), x.abs().sqrt());
        }
    }

    #[test]
    fn sqrt_with_central_gap() {
        let k = IntervalSet::from_intervals([Interval::new(-1.0, -0.1), Interval::new(0.1, 1.0)]);
        let e = extend_piecewise_affine(&sqrt_abs(), &k, (0.5, 1.0), 5.0, -1.0, 1.0).unwrap();
        assert_eq!(e.gaps, vec![(-0.1, 0.1)]);
        // Constant across the gap since √|x| is even.
        assert!((e.f.eval(0.0) - 0.1f64.sqrt()).abs() < 1e-15);
        let est = holder_constant(&e.f, 0.5, &linspace(-1.0, 1.0, 2001)).unwrap();
        assert!(est.constant <= 1.0 + 1e-12, "{est:?}");
        assert!((e.sup_bound - 2.0 * 0.2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn endpoints_must_lie_in_k() {
        let k = IntervalSet::from_intervals([Interval::new(-1.0, -0.1), Interval::new(0.1, 1.0)]);
        assert!(extend_piecewise_affine(&sqrt_abs(), &k, (0.5, 1.0), 5.0, 0.0, 1.0).is_err());
        assert!(extend_piecewise_affine(&sqrt_abs(), &k, (0.5, 1.0), 5.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn idempotent() {
        let k = IntervalSet::from_intervals([Interval::new(-1.0, -0.3), Interval::new(-0.2, 0.4), Interval::new(0.6, 1.0)]);
        let f = Fn1D::new(|x: f64| (3.0 * x).sin().abs().sqrt());
        let e1 = extend_piecewise_affine(&f, &k, (0.5, 2.0), 10.0, -1.0, 1.0).unwrap();
        let e2 = extend_piecewise_affine(&e1.f, &k, (0.5, 2.0), 10.0, -1.0, 1.0).unwrap();
        for x in linspace(-1.5, 1.5, 999) {
            assert_eq!(e1.f.eval(x), e2.f.eval(x));
        }
    }
}
