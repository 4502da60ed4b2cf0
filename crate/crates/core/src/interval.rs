//! Finite unions of closed intervals, the dyadic families `U_n` and `K_n`,
//! and ω-limits of eventually periodic sequences of such sets.
//!
//! Sets are generic over the endpoint type. `f64` endpoints merge parts that
//! are closer than [`F64_MERGE_TOL`]; [`Rational`] endpoints are exact.
//! Open intervals of the construction are stored as their closures, which
//! changes no measure.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// Exact rational endpoint.
pub type Rational = BigRational;

/// Parts of an `f64` set closer than this are merged.
pub const F64_MERGE_TOL: f64 = 1e-12;

/// Scalar usable as an interval endpoint.
pub trait Endpoint: Clone + PartialOrd + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether a part starting at `next_lo` must be merged into one ending at `hi`.
    fn joins(hi: &Self, next_lo: &Self) -> bool;
}

impl Endpoint for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn joins(hi: &Self, next_lo: &Self) -> bool {
        *next_lo <= *hi + F64_MERGE_TOL
    }
}

impl Endpoint for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn joins(hi: &Self, next_lo: &Self) -> bool {
        next_lo <= hi
    }
}

/// A closed interval `[lo, hi]` with `lo ≤ hi`.
#[derive(Clone, PartialEq, Debug)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Endpoint> Interval<T> {
    /// Panics if `lo > hi` or the endpoints are unordered (NaN).
    pub fn new(lo: T, hi: T) -> Self {
        assert!(lo <= hi, "interval with lo > hi: [{lo:?}, {hi:?}]");
        Interval { lo, hi }
    }

    pub fn try_new(lo: T, hi: T) -> Result<Self> {
        if lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(invalid(format!("interval with lo > hi: [{lo:?}, {hi:?}]")))
        }
    }

    pub fn length(&self) -> T {
        self.hi.sub(&self.lo)
    }

    pub fn contains(&self, x: &T) -> bool {
        self.lo <= *x && *x <= self.hi
    }
}

/// Sorted, pairwise disjoint, non-touching closed parts.
#[derive(Clone, PartialEq, Debug)]
pub struct IntervalSet<T> {
    parts: Vec<Interval<T>>,
}

impl<T: Endpoint> Default for IntervalSet<T> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<T: Endpoint> IntervalSet<T> {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn single(lo: T, hi: T) -> Self {
        IntervalSet { parts: vec![Interval::new(lo, hi)] }
    }

    /// Normalizes an arbitrary collection of intervals: sorts and merges.
    pub fn from_intervals(items: impl IntoIterator<Item = Interval<T>>) -> Self {
        let mut v: Vec<Interval<T>> = items.into_iter().collect();
        v.sort_by(|a, b| a.lo.partial_cmp(&b.lo).expect("unordered endpoint"));
        let mut parts: Vec<Interval<T>> = Vec::with_capacity(v.len());
        for iv in v {
            match parts.last_mut() {
                Some(last) if T::joins(&last.hi, &iv.lo) => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => parts.push(iv),
            }
        }
        IntervalSet { parts }
    }

    pub fn parts(&self) -> &[Interval<T>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn measure(&self) -> T {
        self.parts.iter().fold(T::zero(), |acc, p| acc.add(&p.length()))
    }

    /// Re-checks the structural invariants (sorted, disjoint, non-touching).
    pub fn is_normalized(&self) -> bool {
        self.parts.iter().all(|p| p.lo <= p.hi)
            && self.parts.windows(2).all(|w| w[0].hi < w[1].lo && !T::joins(&w[0].hi, &w[1].lo))
    }

    pub fn first(&self) -> Option<&T> {
        self.parts.first().map(|p| &p.lo)
    }

    pub fn last(&self) -> Option<&T> {
        self.parts.last().map(|p| &p.hi)
    }

    pub fn contains(&self, x: &T) -> bool {
        // Index of the first part with lo > x; the candidate is the one before it.
        let i = self.parts.partition_point(|p| p.lo <= *x);
        i > 0 && self.parts[i - 1].hi >= *x
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_intervals(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let (a, b) = (&self.parts, &other.parts);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = if a[i].lo > b[j].lo { &a[i].lo } else { &b[j].lo };
            let hi = if a[i].hi < b[j].hi { &a[i].hi } else { &b[j].hi };
            if lo <= hi {
                out.push(Interval { lo: lo.clone(), hi: hi.clone() });
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_intervals(out)
    }

    /// Closure of `window ∖ self`. Gaps of zero length are dropped.
    pub fn complement_within(&self, window: &Interval<T>) -> Self {
        let mut out = Vec::new();
        let mut cursor = window.lo.clone();
        for p in &self.parts {
            if p.hi < window.lo {
                continue;
            }
            if p.lo > window.hi {
                break;
            }
            if p.lo > cursor {
                out.push(Interval { lo: cursor.clone(), hi: p.lo.clone() });
            }
            if p.hi > cursor {
                cursor = p.hi.clone();
            }
        }
        if window.hi > cursor {
            out.push(Interval { lo: cursor, hi: window.hi.clone() });
        }
        Self::from_intervals(out)
    }

    pub fn clip(&self, window: &Interval<T>) -> Self {
        self.intersection(&IntervalSet { parts: vec![window.clone()] })
    }

    /// Gaps between consecutive parts, as `(hi_k, lo_{k+1})` pairs.
    pub fn gaps(&self) -> Vec<(T, T)> {
        self.parts.windows(2).map(|w| (w[0].hi.clone(), w[1].lo.clone())).collect()
    }

    pub fn to_f64(&self) -> IntervalSet<f64> {
        IntervalSet::from_intervals(self.parts.iter().map(|p| Interval::new(p.lo.to_f64(), p.hi.to_f64())))
    }
}

impl IntervalSet<f64> {
    /// Grid over the set: each part sampled from `lo` to `hi` with spacing at most `step`,
    /// endpoints included.
    pub fn grid(&self, step: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for p in &self.parts {
            let len = p.hi - p.lo;
            let m = ((len / step).ceil() as usize).max(1);
            if len == 0.0 {
                out.push(p.lo);
                continue;
            }
            for i in 0..=m {
                out.push(if i == m { p.hi } else { p.lo + len * i as f64 / m as f64 });
            }
        }
        out
    }
}

/// Parameters of the dyadic interval family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicFamilyParams {
    pub alpha: f64,
    pub beta: f64,
    pub window: f64,
}

impl DyadicFamilyParams {
    pub fn new(alpha: f64, beta: f64, window: f64) -> Result<Self> {
        let p = DyadicFamilyParams { alpha, beta, window };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if !(self.beta > 1.0) {
            return Err(invalid(format!("beta must exceed 1, got {}", self.beta)));
        }
        if !(self.window >= 0.0) {
            return Err(invalid(format!("window must be nonnegative, got {}", self.window)));
        }
        Ok(())
    }

    /// Radius `2^{-βn}` of the intervals at level `n`.
    pub fn radius(&self, n: u32) -> f64 {
        (-(self.beta * n as f64)).exp2()
    }

    /// `βn` as an exact integer when β is a small-denominator rational and the
    /// product is integral.
    pub fn exact_exponent(&self, n: u32) -> Option<u64> {
        let (p, q) = small_rational(self.beta)?;
        let num = p as i128 * n as i128;
        (num % q as i128 == 0).then(|| (num / q as i128) as u64)
    }
}

/// `x = p/q` with `q ≤ 1000`, if `x` is exactly such a rational in `f64`.
pub fn small_rational(x: f64) -> Option<(i64, i64)> {
    let r: Ratio<i64> = Ratio::approximate_float(x)?;
    let (p, q) = (*r.numer(), *r.denom());
    (q <= 1000 && p as f64 / q as f64 == x).then_some((p, q))
}

fn j_range(window: f64, n: u32, radius: f64) -> (i64, i64) {
    let scale = (n as f64).exp2();
    // Centers whose interval meets [-window, window].
    let jmax = ((window + radius) * scale).ceil() as i64;
    (-jmax, jmax)
}

/// `U_n ∩ [-window, window]`: union of the intervals of radius `2^{-βn}` around
/// the points `j/2^n`, clipped to the window.
pub fn build_un(p: &DyadicFamilyParams, n: u32) -> Result<IntervalSet<f64>> {
    if n == 0 {
        return Err(invalid("level n must be at least 1"));
    }
    p.validate()?;
    let r = p.radius(n);
    let scale = (n as f64).exp2();
    let (j0, j1) = j_range(p.window, n, r);
    let w = p.window;
    let items = (j0..=j1).filter_map(|j| {
        let c = j as f64 / scale;
        let (lo, hi) = ((c - r).max(-w), (c + r).min(w));
        (lo < hi).then(|| Interval::new(lo, hi))
    });
    Ok(IntervalSet::from_intervals(items))
}

fn pow2_inv(e: u64) -> Rational {
    Ratio::new(BigInt::one(), BigInt::one() << e)
}

fn rat(x: f64) -> Option<Rational> {
    Ratio::from_float(x)
}

/// Exact version of [`build_un`], available when `βn` is an integer and the
/// window is a dyadic rational.
pub fn build_un_exact(p: &DyadicFamilyParams, n: u32) -> Result<Option<IntervalSet<Rational>>> {
    if n == 0 {
        return Err(invalid("level n must be at least 1"));
    }
    p.validate()?;
    let (Some(e), Some(w)) = (p.exact_exponent(n), rat(p.window)) else {
        return Ok(None);
    };
    let r = pow2_inv(e);
    let neg_w = -w.clone();
    let (j0, j1) = j_range(p.window, n, p.radius(n));
    let mut items = Vec::new();
    for j in j0..=j1 {
        let c = Ratio::new(BigInt::from(j), BigInt::one() << n);
        let mut lo = &c - &r;
        let mut hi = &c + &r;
        if lo < neg_w {
            lo = neg_w.clone();
        }
        if hi > w {
            hi = w.clone();
        }
        if lo < hi {
            items.push(Interval::new(lo, hi));
        }
    }
    Ok(Some(IntervalSet::from_intervals(items)))
}

/// A truncated `K_n` together with the measure bound of what the truncation drops.
#[derive(Clone, Debug)]
pub struct KnSet<T> {
    pub set: IntervalSet<T>,
    /// Upper bound on `meas(window ∩ ∪_{i>nmax} U_i)`.
    pub tail_bound: f64,
}

fn check_levels(n: u32, nmax: u32) -> Result<()> {
    if n == 0 {
        return Err(invalid("level n must be at least 1"));
    }
    if nmax < n {
        return Err(invalid(format!("nmax = {nmax} is below n = {n}")));
    }
    Ok(())
}

/// `K_n ∩ window`, with `∪_{i≥n} U_i` truncated to `n ≤ i ≤ nmax`.
pub fn build_kn(p: &DyadicFamilyParams, n: u32, nmax: u32) -> Result<KnSet<f64>> {
    check_levels(n, nmax)?;
    let mut union = IntervalSet::empty();
    for i in n..=nmax {
        union = union.union(&build_un(p, i)?);
    }
    let window = Interval::new(-p.window, p.window);
    Ok(KnSet { set: union.complement_within(&window), tail_bound: tail_bound(p, nmax) })
}

/// Exact version of [`build_kn`], when every level in `n..=nmax` is exact.
pub fn build_kn_exact(p: &DyadicFamilyParams, n: u32, nmax: u32) -> Result<Option<KnSet<Rational>>> {
    check_levels(n, nmax)?;
    let mut union = IntervalSet::empty();
    for i in n..=nmax {
        match build_un_exact(p, i)? {
            Some(u) => union = union.union(&u),
            None => return Ok(None),
        }
    }
    let Some(w) = rat(p.window) else { return Ok(None) };
    let window = Interval::new(-w.clone(), w);
    Ok(Some(KnSet { set: union.complement_within(&window), tail_bound: tail_bound(p, nmax) }))
}

/// `Σ_{i>nmax} (2·window·2^i + 3)·2·2^{-βi}`, summed until the terms are negligible.
pub fn tail_bound(p: &DyadicFamilyParams, nmax: u32) -> f64 {
    level_bound_sum(2.0 * p.window, p.beta, nmax + 1, None)
}

/// Upper bound on `meas([a,b] ∩ U_n)`: `((b−a)2^n + 3)·2·2^{-βn}`.
pub fn un_measure_bound(len: f64, beta: f64, n: u32) -> f64 {
    (len * (n as f64).exp2() + 3.0) * 2.0 * (-(beta * n as f64)).exp2()
}

/// `Σ_{i=from}^{to} ((b−a)2^i + 3)·2·2^{-βi}`; `to = None` sums the convergent tail.
pub fn level_bound_sum(len: f64, beta: f64, from: u32, to: Option<u32>) -> f64 {
    let mut sum = 0.0;
    let mut i = from;
    loop {
        if let Some(t) = to {
            if i > t {
                break;
            }
        }
        let term = un_measure_bound(len, beta, i);
        sum += term;
        if to.is_none() && (term <= 1e-17 * sum || i > from + 4000) {
            break;
        }
        i += 1;
    }
    sum
}

/// Exact `Σ_{i=from}^{to} ((b−a)2^i + 3)·2·2^{-βi}` when every `βi` is an integer.
pub fn level_bound_sum_exact(len: &Rational, p: &DyadicFamilyParams, from: u32, to: u32) -> Option<Rational> {
    let mut sum = <Rational as num_traits::Zero>::zero();
    for i in from..=to {
        let e = p.exact_exponent(i)?;
        let count = len * Rational::from_integer(BigInt::one() << i) + Rational::from_integer(3.into());
        sum += count * Rational::from_integer(2.into()) * pow2_inv(e);
    }
    Some(sum)
}

/// ω-limit `∩_n closure(∪_{i≥n} M_i)` of the eventually periodic sequence whose
/// last `period` entries repeat forever. It equals the union of one period.
pub fn omega_limit<T: Endpoint>(sets: &[IntervalSet<T>], period: usize) -> Result<IntervalSet<T>> {
    let tail = periodic_tail(sets, period)?;
    Ok(tail.iter().fold(IntervalSet::empty(), |acc, s| acc.union(s)))
}

/// `limsup meas(M_n)` of the same eventually periodic sequence.
pub fn limsup_measure<T: Endpoint>(sets: &[IntervalSet<T>], period: usize) -> Result<T> {
    let tail = periodic_tail(sets, period)?;
    let mut best = tail[0].measure();
    for s in &tail[1..] {
        let m = s.measure();
        if m > best {
            best = m;
        }
    }
    Ok(best)
}

fn periodic_tail<T: Endpoint>(sets: &[IntervalSet<T>], period: usize) -> Result<&[IntervalSet<T>]> {
    if sets.is_empty() {
        return Err(invalid("omega_limit needs at least one set"));
    }
    if period == 0 || period > sets.len() {
        return Err(invalid(format!("period {period} must lie in 1..={}", sets.len())));
    }
    Ok(&sets[sets.len() - period..])
}

/// `p/q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> Rational {
    Ratio::new(BigInt::from(p), BigInt::from(q))
}

/// Whether a rational is strictly positive.
pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(parts: &[(f64, f64)]) -> IntervalSet<f64> {
        IntervalSet::from_intervals(parts.iter().map(|&(a, b)| Interval::new(a, b)))
    }

    #[test]
    fn normalization_merges_overlaps_and_touching() {
        let x = s(&[(2.0, 3.0), (0.0, 1.0), (0.5, 1.5), (1.5, 1.8)]);
        assert_eq!(x.parts(), &[Interval::new(0.0, 1.8), Interval::new(2.0, 3.0)]);
        assert!(x.is_normalized());
        assert!((x.measure() - 2.8).abs() < 1e-15);
    }

    #[test]
    fn set_operations() {
        let a = s(&[(0.0, 2.0), (3.0, 5.0)]);
        let b = s(&[(1.0, 4.0)]);
        assert_eq!(a.intersection(&b), s(&[(1.0, 2.0), (3.0, 4.0)]));
        assert_eq!(a.union(&b), s(&[(0.0, 5.0)]));
        let w = Interval::new(-1.0, 6.0);
        assert_eq!(a.complement_within(&w), s(&[(-1.0, 0.0), (2.0, 3.0), (5.0, 6.0)]));
        assert!(a.contains(&4.0) && !a.contains(&2.5) && a.contains(&2.0));
    }

    #[test]
    fn un_level_four() {
        let p = DyadicFamilyParams::new(0.2, 1.5, 1.0).unwrap();
        let u = build_un(&p, 4).unwrap();
        // 33 centers j/16, j = -16..=16, radius 2^-6; the two end intervals are clipped.
        assert_eq!(u.len(), 33);
        let r = 2f64.powi(-6);
        assert!((u.measure() - (31.0 * 2.0 * r + 2.0 * r)).abs() < 1e-14);
        assert_eq!(u.parts()[16], Interval::new(-r, r));
    }

    #[test]
    fn un_overlap_merges_to_window() {
        let p = DyadicFamilyParams::new(0.2, 1.5, 1.0).unwrap();
        let u = build_un(&p, 1).unwrap();
        assert_eq!(u.parts(), &[Interval::new(-1.0, 1.0)]);
    }

    #[test]
    fn degenerate_window() {
        let p = DyadicFamilyParams::new(0.2, 1.5, 0.0).unwrap();
        assert_eq!(build_un(&p, 3).unwrap().measure(), 0.0);
        assert!(build_un(&p, 0).is_err());
    }

    #[test]
    fn exact_matches_float() {
        let p = DyadicFamilyParams::new(0.2, 1.5, 1.0).unwrap();
        let e = build_un_exact(&p, 8).unwrap().unwrap();
        let f = build_un(&p, 8).unwrap();
        assert_eq!(e.to_f64(), f);
        assert!(build_un_exact(&p, 7).unwrap().is_none());
    }

    #[test]
    fn kn_complement_identity() {
        let p = DyadicFamilyParams::new(0.2, 1.5, 1.0).unwrap();
        let k = build_kn_exact(&p, 8, 8).unwrap().unwrap();
        let u = build_un_exact(&p, 8).unwrap().unwrap();
        assert_eq!(k.set.measure() + u.measure(), ratio(2, 1));
        assert!(build_kn(&p, 5, 4).is_err());
    }

    #[test]
    fn omega_limit_alternating() {
        let sets = vec![s(&[(0.0, 1.0)]), s(&[(2.0, 3.0)])];
        let w = omega_limit(&sets, 2).unwrap();
        assert_eq!(w, s(&[(0.0, 1.0), (2.0, 3.0)]));
        assert_eq!(limsup_measure(&sets, 2).unwrap(), 1.0);
        assert!(omega_limit::<f64>(&[], 1).is_err());
        assert!(omega_limit(&sets, 3).is_err());
    }

    #[test]
    fn small_rationals() {
        assert_eq!(small_rational(1.5), Some((3, 2)));
        assert_eq!(small_rational(1.4), Some((7, 5)));
        assert_eq!(small_rational(std::f64::consts::SQRT_2), None);
    }
}
