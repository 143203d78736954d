//! Finite unions of arcs on the circle `[0,1)` (or segments of `[0,1]`).
//!
//! An [`ArcSet`] is stored as sorted, disjoint, non-touching segments of
//! `[0,1]`. A wrap-around arc is the pair `[b,1] ∪ [0,a]`; [`ArcSet::arcs`]
//! glues such pairs back into a single [`CircleArc`].

use serde_json::Value;

use crate::dynamics::map::{Domain, PiecewiseMap};
use crate::error::{EvtError, Result};
use crate::real::Real;

/// Default cap on the number of stored arcs.
pub const DEFAULT_ARC_CAP: usize = 1_000_000;

/// Arc from `lo` to `hi` counter-clockwise. `hi < lo` wraps through 0;
/// `[0, 1]` is the full circle.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleArc {
    lo: Real,
    hi: Real,
}

impl CircleArc {
    pub fn new(lo: Real, hi: Real) -> Result<Self> {
        let zero = Real::zero(lo.precision());
        let one = Real::one(lo.precision());
        if lo < zero || lo >= one || hi < zero || hi > one {
            return Err(EvtError::invalid(format!(
                "arc endpoints must lie in [0,1): [{lo}, {hi})"
            )));
        }
        if lo == hi {
            return Err(EvtError::invalid("degenerate arc of length 0"));
        }
        Ok(CircleArc { lo, hi })
    }

    pub fn from_f64(lo: f64, hi: f64, precision: usize) -> Result<Self> {
        CircleArc::new(Real::from_f64(lo, precision), Real::from_f64(hi, precision))
    }

    pub fn full(precision: usize) -> Self {
        CircleArc { lo: Real::zero(precision), hi: Real::one(precision) }
    }

    pub fn lo(&self) -> &Real {
        &self.lo
    }

    pub fn hi(&self) -> &Real {
        &self.hi
    }

    pub fn wraps(&self) -> bool {
        self.hi < self.lo
    }

    pub fn length(&self) -> Real {
        if self.wraps() {
            &(&Real::one(self.lo.precision()) - &self.lo) + &self.hi
        } else {
            &self.hi - &self.lo
        }
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let (lo, hi) = (self.lo.to_f64(), self.hi.to_f64());
        if self.wraps() {
            x >= lo || x < hi
        } else {
            x >= lo && x < hi
        }
    }

    fn segments(&self) -> Vec<(Real, Real)> {
        if self.wraps() {
            let p = self.lo.precision();
            vec![
                (Real::zero(p), self.hi.clone()),
                (self.lo.clone(), Real::one(p)),
            ]
        } else {
            vec![(self.lo.clone(), self.hi.clone())]
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcSet {
    segs: Vec<(Real, Real)>,
    precision: usize,
}

impl ArcSet {
    pub fn empty(precision: usize) -> Self {
        ArcSet { segs: Vec::new(), precision }
    }

    pub fn full(precision: usize) -> Self {
        ArcSet {
            segs: vec![(Real::zero(precision), Real::one(precision))],
            precision,
        }
    }

    /// Merges, sorts and cleans raw arcs.
    pub fn normalize(raw: &[CircleArc], precision: usize) -> Self {
        let segs = raw.iter().flat_map(|a| a.segments()).collect();
        ArcSet::from_segments(segs, precision)
    }

    /// Builds a set from arbitrary segments of `[0,1]` (overlaps allowed).
    pub fn from_segments(segs: Vec<(Real, Real)>, precision: usize) -> Self {
        let p = precision;
        let tol = tolerance(p);
        let zero = Real::zero(p);
        let one = Real::one(p);
        let mut segs: Vec<(Real, Real)> = segs
            .into_iter()
            .map(|(a, b)| {
                let a = a.with_precision(p);
                let b = b.with_precision(p);
                let a = if a <= &zero + &tol { zero.clone() } else { a };
                let b = if b >= &one - &tol { one.clone() } else { b };
                (a, b)
            })
            .filter(|(a, b)| a < b)
            .collect();
        segs.sort_by(|x, y| x.0.cmp(&y.0));
        let mut out: Vec<(Real, Real)> = Vec::with_capacity(segs.len());
        for (a, b) in segs {
            if let Some(last) = out.last_mut() {
                if a <= &last.1 + &tol {
                    if b > last.1 {
                        last.1 = b;
                    }
                    continue;
                }
            }
            out.push((a, b));
        }
        out.retain(|(a, b)| &(b - a) > &tol);
        ArcSet { segs: out, precision: p }
    }

    /// Ball of the given radius; clipped at the ends of an interval domain.
    pub fn ball(center: &Real, radius: &Real, domain: Domain, precision: usize) -> Self {
        let p = precision;
        let c = center.with_precision(p);
        let r = radius.with_precision(p);
        if r.is_negative() || r.is_zero() {
            return ArcSet::empty(p);
        }
        let lo = &c - &r;
        let hi = &c + &r;
        let one = Real::one(p);
        let zero = Real::zero(p);
        match domain {
            Domain::Interval => {
                ArcSet::from_segments(vec![(Real::max(&lo, &zero), Real::min(&hi, &one))], p)
            }
            Domain::Circle => {
                if &hi - &lo >= one {
                    return ArcSet::full(p);
                }
                ArcSet::from_segments(wrap_segment(lo, hi), p)
            }
        }
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.segs.len()
    }

    pub fn segments(&self) -> &[(Real, Real)] {
        &self.segs
    }

    /// Arcs with the `[0,a] ∪ [b,1]` pair glued into one wrap arc.
    pub fn arcs(&self) -> Vec<CircleArc> {
        let p = self.precision;
        let zero = Real::zero(p);
        let one = Real::one(p);
        let n = self.segs.len();
        if n == 1 && self.segs[0].0 == zero && self.segs[0].1 == one {
            return vec![CircleArc::full(p)];
        }
        let glue = n >= 2 && self.segs[0].0 == zero && self.segs[n - 1].1 == one;
        let mut out = Vec::with_capacity(n);
        let range = if glue { 1..n - 1 } else { 0..n };
        for (a, b) in &self.segs[range] {
            let hi = if *b == one { zero.clone() } else { b.clone() };
            out.push(CircleArc { lo: a.clone(), hi });
        }
        if glue {
            out.push(CircleArc { lo: self.segs[n - 1].0.clone(), hi: self.segs[0].1.clone() });
        } else if let Some(last) = out.last_mut() {
            // A lone segment ending at 1 is stored with hi = 0, which would
            // read as a wrap; keep 1 in that case.
            if last.hi == zero {
                last.hi = one.clone();
            }
        }
        out
    }

    pub fn measure(&self) -> Real {
        self.segs
            .iter()
            .fold(Real::zero(self.precision), |acc, (a, b)| &acc + &(b - a))
    }

    pub fn measure_f64(&self) -> f64 {
        self.measure().to_f64()
    }

    pub fn contains(&self, x: &Real) -> bool {
        let i = self.segs.partition_point(|(a, _)| a <= x);
        i > 0 && *x <= self.segs[i - 1].1
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.contains(&Real::from_f64(x, self.precision))
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let p = self.precision.max(other.precision);
        let segs = self.segs.iter().chain(other.segs.iter()).cloned().collect();
        ArcSet::from_segments(segs, p)
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let p = self.precision.max(other.precision);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.segs.len() && j < other.segs.len() {
            let (a0, a1) = &self.segs[i];
            let (b0, b1) = &other.segs[j];
            let lo = if a0 > b0 { a0 } else { b0 };
            let hi = if a1 < b1 { a1 } else { b1 };
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        ArcSet::from_segments(out, p)
    }

    pub fn complement(&self) -> ArcSet {
        let p = self.precision;
        let mut out = Vec::with_capacity(self.segs.len() + 1);
        let mut cursor = Real::zero(p);
        for (a, b) in &self.segs {
            if cursor < *a {
                out.push((cursor.clone(), a.clone()));
            }
            cursor = b.clone();
        }
        let one = Real::one(p);
        if cursor < one {
            out.push((cursor, one));
        }
        ArcSet::from_segments(out, p)
    }

    pub fn difference(&self, other: &ArcSet) -> ArcSet {
        self.intersect(&other.complement())
    }

    /// `{x : f(x) ∈ self}`.
    pub fn preimage(&self, map: &PiecewiseMap) -> Result<ArcSet> {
        self.preimage_capped(map, DEFAULT_ARC_CAP)
    }

    pub fn preimage_capped(&self, map: &PiecewiseMap, cap: usize) -> Result<ArcSet> {
        let needed = self.segs.len().saturating_mul(map.degree() + 1);
        if needed > cap {
            return Err(EvtError::ArcBudget { needed, cap });
        }
        let mut raw = Vec::with_capacity(needed);
        for (s, t) in &self.segs {
            raw.extend(map.inverse_segments(s, t));
        }
        if raw.len() > cap {
            return Err(EvtError::ArcBudget { needed: raw.len(), cap });
        }
        Ok(ArcSet::from_segments(raw, self.precision))
    }

    /// `f(self)`.
    pub fn image(&self, map: &PiecewiseMap) -> Result<ArcSet> {
        let p = self.precision;
        let one = Real::one(p);
        let zero = Real::zero(p);
        let mut raw = Vec::new();
        for (s, t) in &self.segs {
            for (a, b) in map.lifted_image_segments(s, t) {
                match map.domain() {
                    Domain::Interval => raw.push((Real::max(&a, &zero), Real::min(&b, &one))),
                    Domain::Circle => {
                        if &b - &a >= one {
                            return Ok(ArcSet::full(p));
                        }
                        raw.extend(wrap_segment(a, b));
                    }
                }
            }
            if raw.len() > DEFAULT_ARC_CAP {
                return Err(EvtError::ArcBudget { needed: raw.len(), cap: DEFAULT_ARC_CAP });
            }
        }
        Ok(ArcSet::from_segments(raw, p))
    }

    /// `[[lo, hi], ...]` with decimal-string endpoints.
    pub fn to_json(&self) -> Value {
        let digits = (self.precision as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        Value::Array(
            self.arcs()
                .iter()
                .map(|a| {
                    Value::Array(vec![
                        Value::String(a.lo.to_decimal_string(digits)),
                        Value::String(a.hi.to_decimal_string(digits)),
                    ])
                })
                .collect(),
        )
    }
}

/// Segments of `[0,1]` covered by the real interval `[a, b]` with `b - a < 1`.
fn wrap_segment(a: Real, b: Real) -> Vec<(Real, Real)> {
    let p = a.precision();
    let shift = a.floor();
    let a = &a - &shift;
    let b = &b - &shift;
    let one = Real::one(p);
    if b <= one {
        vec![(a, b)]
    } else {
        vec![(Real::zero(p), &b - &one), (a, one)]
    }
}

/// Merge and sliver tolerance `2^-(precision - 10)`.
pub fn tolerance(precision: usize) -> Real {
    Real::pow2(-(precision as isize - 10), precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: usize = 80;

    fn arc(lo: f64, hi: f64) -> CircleArc {
        CircleArc::from_f64(lo, hi, P).unwrap()
    }

    fn set(arcs: &[(f64, f64)]) -> ArcSet {
        let raw: Vec<_> = arcs.iter().map(|&(a, b)| arc(a, b)).collect();
        ArcSet::normalize(&raw, P)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-15
    }

    #[test]
    fn normalize_merges_overlaps() {
        let s = set(&[(0.1, 0.2), (0.15, 0.3)]);
        assert_eq!(s.segment_count(), 1);
        assert!(close(s.measure_f64(), 0.2));
        let e = ArcSet::normalize(&[], P);
        assert!(e.is_empty());
        assert_eq!(e.measure_f64(), 0.0);
    }

    #[test]
    fn wrap_arc_round_trips() {
        let s = set(&[(0.9, 0.1)]);
        assert!(close(s.measure_f64(), 0.2));
        let arcs = s.arcs();
        assert_eq!(arcs.len(), 1);
        assert!(arcs[0].wraps());
        assert!(s.contains_f64(0.95) && s.contains_f64(0.05) && !s.contains_f64(0.5));
    }

    #[test]
    fn basic_boolean_algebra() {
        let a = set(&[(0.0, 0.5)]);
        let b = set(&[(0.25, 0.75)]);
        let i = a.intersect(&b);
        assert_eq!(i, set(&[(0.25, 0.5)]));
        assert!(close(i.measure_f64(), 0.25));
        assert!(ArcSet::full(P).complement().is_empty());
        let u = a.union(&a.complement());
        assert_eq!(u, ArcSet::full(P));
        assert_eq!(u.arcs(), vec![CircleArc::full(P)]);
    }

    #[test]
    fn doubling_preimage_of_half() {
        let f = PiecewiseMap::affine_mod1(2).unwrap();
        let s = set(&[(0.0, 0.5)]);
        assert_eq!(s.preimage(&f).unwrap(), set(&[(0.0, 0.25), (0.5, 0.75)]));
        assert_eq!(ArcSet::full(P).preimage(&f).unwrap(), ArcSet::full(P));
    }

    #[test]
    fn tripling_preimage_of_ball() {
        let f = PiecewiseMap::affine_mod1(3).unwrap();
        let r = 0.01;
        let ball = ArcSet::ball(&Real::from_f64(0.75, P), &Real::from_f64(r, P), Domain::Circle, P);
        let pre = ball.preimage(&f).unwrap();
        assert_eq!(pre.segment_count(), 3);
        assert!(close(pre.measure_f64(), 2.0 * r));
        for (k, (a, b)) in pre.segments().iter().enumerate() {
            let centre = (0.75 + k as f64) / 3.0;
            assert!(close((a.to_f64() + b.to_f64()) / 2.0, centre));
            assert!(close(b.to_f64() - a.to_f64(), 2.0 * r / 3.0));
        }
    }

    #[test]
    fn image_wraps_and_saturates() {
        let f = PiecewiseMap::affine_mod1(2).unwrap();
        let s = set(&[(0.375, 0.625)]);
        assert_eq!(s.image(&f).unwrap(), set(&[(0.75, 0.25)]));
        assert_eq!(set(&[(0.1, 0.7)]).image(&f).unwrap(), ArcSet::full(P));
    }

    #[test]
    fn json_uses_decimal_strings() {
        let j = set(&[(0.25, 0.5)]).to_json();
        assert_eq!(j, serde_json::json!([["0.25", "0.5"]]));
    }

    fn arb_set() -> impl Strategy<Value = ArcSet> {
        prop::collection::vec((0.0f64..1.0, 1e-6f64..0.3), 0..6).prop_map(|v| {
            let raw: Vec<_> = v
                .into_iter()
                .map(|(lo, len)| {
                    let hi = (lo + len) % 1.0;
                    arc(lo, if hi == lo { (hi + 1e-3) % 1.0 } else { hi })
                })
                .collect();
            ArcSet::normalize(&raw, P)
        })
    }

    fn sym_diff_measure(a: &ArcSet, b: &ArcSet) -> f64 {
        a.difference(b).union(&b.difference(a)).measure_f64()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2500))]

        #[test]
        fn inclusion_exclusion(s in arb_set(), t in arb_set()) {
            let lhs = &s.union(&t).measure() + &s.intersect(&t).measure();
            let rhs = &s.measure() + &t.measure();
            prop_assert!((&lhs - &rhs).abs() <= Real::pow2(-60, P));
        }

        #[test]
        fn de_morgan_is_exact(s in arb_set(), t in arb_set()) {
            prop_assert_eq!(s.union(&t).complement(), s.complement().intersect(&t.complement()));
            prop_assert_eq!(s.intersect(&t).complement(), s.complement().union(&t.complement()));
            let m = &s.measure() + &s.complement().measure();
            prop_assert!((&m - &Real::one(P)).abs() <= Real::pow2(-60, P));
        }

        #[test]
        fn preimage_commutes_with_complement(s in arb_set(), k in 2i64..4) {
            let f = PiecewiseMap::affine_mod1(k).unwrap();
            let a = s.complement().preimage(&f).unwrap();
            let b = s.preimage(&f).unwrap().complement();
            prop_assert!(sym_diff_measure(&a, &b) <= 2f64.powi(-60));
            let m = (&s.preimage(&f).unwrap().measure() - &s.measure()).abs();
            prop_assert!(m <= Real::pow2(-60, P));
        }

        #[test]
        fn iterated_preimage_composes(s in arb_set(), k in 2i64..4) {
            let f = PiecewiseMap::affine_mod1(k).unwrap();
            let f2 = PiecewiseMap::affine_mod1(k * k).unwrap();
            let twice = s.preimage(&f).unwrap().preimage(&f).unwrap();
            let once = s.preimage(&f2).unwrap();
            prop_assert!(sym_diff_measure(&twice, &once) <= 2f64.powi(-60));
        }
    }
}
