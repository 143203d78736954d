//! Observables with several maximal points, exceedance regions and the
//! threshold solver.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::dynamics::map::{Domain, PiecewiseMap};
use crate::error::{EvtError, Result};
use crate::interval_algebra::ArcSet;
use crate::real::{rational_string, rational_to_f64, Position, Real, DEFAULT_PRECISION};

/// User-supplied shape: `h` and its inverse `h^-1` on distances/levels.
#[derive(Clone)]
pub struct CustomShape {
    pub name: String,
    pub h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub inverse: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Custom({})", self.name)
    }
}

impl PartialEq for CustomShape {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.h, &other.h)
    }
}

/// Profile `h` of the observable near a maximal point, `phi = h(dist)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ShapeFn {
    /// `h(d) = -ln d`, `eps(u) = e^-u`.
    NegLog,
    /// `h(d) = d^-p`, `eps(u) = u^(-1/p)`.
    PowerLaw { p: BigRational },
    /// `h(d) = D - d^g`, `eps(u) = (D - u)^(1/g)`.
    BoundedPower { d: BigRational, g: BigRational },
    Custom(CustomShape),
}

impl ShapeFn {
    pub fn power_law(p: BigRational) -> Result<Self> {
        if !p.is_positive() {
            return Err(EvtError::invalid("power-law exponent must be positive"));
        }
        Ok(ShapeFn::PowerLaw { p })
    }

    pub fn bounded_power(d: BigRational, g: BigRational) -> Result<Self> {
        if !g.is_positive() {
            return Err(EvtError::invalid("bounded-power exponent g must be positive"));
        }
        Ok(ShapeFn::BoundedPower { d, g })
    }

    pub fn name(&self) -> String {
        match self {
            ShapeFn::NegLog => "neglog".into(),
            ShapeFn::PowerLaw { p } => format!("powerlaw(p={})", rational_string(p)),
            ShapeFn::BoundedPower { d, g } => {
                format!("bounded(D={}, g={})", rational_string(d), rational_string(g))
            }
            ShapeFn::Custom(c) => format!("custom({})", c.name),
        }
    }

    /// `h(0)`: `+inf` except for bounded shapes.
    pub fn sup_value(&self) -> f64 {
        match self {
            ShapeFn::NegLog | ShapeFn::PowerLaw { .. } => f64::INFINITY,
            ShapeFn::BoundedPower { d, .. } => rational_to_f64(d),
            ShapeFn::Custom(c) => (c.h)(0.0),
        }
    }

    pub fn h(&self, d: f64) -> f64 {
        match self {
            ShapeFn::NegLog => -d.ln(),
            ShapeFn::PowerLaw { p } => d.powf(-rational_to_f64(p)),
            ShapeFn::BoundedPower { d: top, g } => rational_to_f64(top) - d.powf(rational_to_f64(g)),
            ShapeFn::Custom(c) => (c.h)(d),
        }
    }

    /// `eps(u)`, or `None` if `u` is at or above the supremum.
    pub fn radius(&self, u: f64) -> Option<f64> {
        let r = match self {
            ShapeFn::NegLog => (-u).exp(),
            ShapeFn::PowerLaw { p } => {
                if u <= 0.0 {
                    return None;
                }
                u.powf(-1.0 / rational_to_f64(p))
            }
            ShapeFn::BoundedPower { d, g } => {
                let s = rational_to_f64(d) - u;
                if s <= 0.0 {
                    return None;
                }
                s.powf(1.0 / rational_to_f64(g))
            }
            ShapeFn::Custom(c) => (c.inverse)(u),
        };
        (r > 0.0 && r.is_finite()).then_some(r)
    }

    /// `eps(u)` at the precision of `u`.
    pub fn radius_real(&self, u: &Real) -> Option<Real> {
        let p = u.precision();
        let r = match self {
            ShapeFn::NegLog => (-u).exp(),
            ShapeFn::PowerLaw { p: e } => {
                if !(u > &Real::zero(p)) {
                    return None;
                }
                let inv = Real::from_rational(&e.recip(), p);
                u.powr(&-inv).ok()?
            }
            ShapeFn::BoundedPower { d, g } => {
                let s = &Real::from_rational(d, p) - u;
                if !(s > Real::zero(p)) {
                    return None;
                }
                s.powr(&Real::from_rational(&g.recip(), p)).ok()?
            }
            ShapeFn::Custom(c) => Real::from_f64((c.inverse)(u.to_f64()), p),
        };
        (r > Real::zero(p)).then_some(r)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximalPoint {
    pub location: Position,
    pub offset: u64,
    pub shape: ShapeFn,
    /// Invariant density at the point; 1 for Lebesgue.
    pub density: BigRational,
    /// Index of the orbit group the point belongs to.
    pub group: usize,
}

/// A base point `zeta` and, optionally, its prime period.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitGroup {
    pub base_point: Position,
    pub period: Option<u64>,
    /// `|(f^p)'(zeta)|` when periodic.
    pub multiplier: Option<BigRational>,
}

/// Input description of a maximal point before validation.
#[derive(Clone, Debug)]
pub struct PointSpec {
    /// `None` computes `xi = f^m(zeta)`.
    pub location: Option<Position>,
    pub offset: u64,
    pub shape: ShapeFn,
    pub density: BigRational,
    /// Own base point and period (uncorrelated specs only).
    pub base_point: Option<Position>,
    pub period: Option<u64>,
}

impl PointSpec {
    pub fn new(offset: u64, shape: ShapeFn) -> Self {
        PointSpec {
            location: None,
            offset,
            shape,
            density: BigRational::one(),
            base_point: None,
            period: None,
        }
    }

    pub fn at(mut self, location: Position) -> Self {
        self.location = Some(location);
        self
    }

    pub fn with_density(mut self, density: BigRational) -> Self {
        self.density = density;
        self
    }

    pub fn based_at(mut self, base_point: Position, period: Option<u64>) -> Self {
        self.base_point = Some(base_point);
        self.period = period;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSpec {
    groups: Vec<OrbitGroup>,
    points: Vec<MaximalPoint>,
    separation: f64,
    base_value: f64,
    domain: Domain,
    correlated: bool,
    precision: usize,
}

pub(crate) fn circle_distance(domain: Domain, a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    match domain {
        Domain::Circle => d.min(1.0 - d),
        Domain::Interval => d,
    }
}

fn check_group(map: &PiecewiseMap, zeta: &Position, period: Option<u64>) -> Result<Option<BigRational>> {
    let Some(p) = period else { return Ok(None) };
    let check = map.verify_periodic(zeta, p)?;
    if !check.is_periodic || !check.is_prime_period {
        return Err(EvtError::invalid(format!(
            "base point {} is not periodic with prime period {p}",
            zeta.to_decimal_string(20)
        )));
    }
    let mult = match check.multiplier.exact() {
        Some(m) => m.clone(),
        None => BigRational::from_float(check.multiplier.to_f64())
            .ok_or_else(|| EvtError::invalid("non-finite multiplier"))?,
    };
    if mult <= BigRational::one() {
        return Err(EvtError::invalid("periodic base point is not repelling"));
    }
    Ok(Some(mult))
}

impl ObservableSpec {
    /// Maximal points `xi_i = f^{m_i}(zeta)` on one orbit.
    pub fn correlated(
        map: &PiecewiseMap,
        base_point: Position,
        period: Option<u64>,
        points: Vec<PointSpec>,
        separation: Option<f64>,
        base_value: f64,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(EvtError::invalid("observable needs at least one maximal point"));
        }
        if points[0].offset != 0 {
            return Err(EvtError::invalid("the first orbit offset must be 0"));
        }
        if points.windows(2).any(|w| w[1].offset <= w[0].offset) {
            return Err(EvtError::invalid("orbit offsets must be strictly increasing"));
        }
        let multiplier = check_group(map, &base_point, period)?;
        if let Some(p) = period {
            if let Some(bad) = points.iter().find(|pt| pt.offset >= p) {
                return Err(EvtError::invalid(format!(
                    "offset {} is not below the period {p}",
                    bad.offset
                )));
            }
        }
        let precision = base_point.precision().max(DEFAULT_PRECISION);
        let tol = Real::pow2(-60, precision);
        let mut out = Vec::with_capacity(points.len());
        for pt in points {
            let image = map.iterate(&base_point, pt.offset);
            let location = match pt.location {
                None => image,
                Some(given) => {
                    let same = match (given.exact_value(), image.exact_value()) {
                        (Some(a), Some(b)) => a == b,
                        _ => {
                            let d = circle_distance(map.domain(), given.to_f64(), image.to_f64());
                            Real::from_f64(d, precision) <= tol
                        }
                    };
                    if !same {
                        return Err(EvtError::invalid(format!(
                            "point {} is not f^{}(zeta) = {}",
                            given.to_decimal_string(20),
                            pt.offset,
                            image.to_decimal_string(20)
                        )));
                    }
                    given
                }
            };
            out.push(MaximalPoint {
                location,
                offset: pt.offset,
                shape: pt.shape,
                density: pt.density,
                group: 0,
            });
        }
        let groups = vec![OrbitGroup { base_point, period, multiplier }];
        ObservableSpec::finish(map, groups, out, separation, base_value, true, precision)
    }

    /// Maximal points on unrelated orbits; each point is its own base point.
    pub fn uncorrelated(
        map: &PiecewiseMap,
        points: Vec<PointSpec>,
        separation: Option<f64>,
        base_value: f64,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(EvtError::invalid("observable needs at least one maximal point"));
        }
        let mut groups = Vec::new();
        let mut out = Vec::new();
        let mut precision = DEFAULT_PRECISION;
        for (g, pt) in points.into_iter().enumerate() {
            let zeta = pt
                .base_point
                .or(pt.location)
                .ok_or_else(|| EvtError::invalid("uncorrelated points need a base point"))?;
            precision = precision.max(zeta.precision());
            let multiplier = check_group(map, &zeta, pt.period)?;
            groups.push(OrbitGroup { base_point: zeta.clone(), period: pt.period, multiplier });
            out.push(MaximalPoint {
                location: zeta,
                offset: 0,
                shape: pt.shape,
                density: pt.density,
                group: g,
            });
        }
        ObservableSpec::finish(map, groups, out, separation, base_value, false, precision)
    }

    fn finish(
        map: &PiecewiseMap,
        groups: Vec<OrbitGroup>,
        points: Vec<MaximalPoint>,
        separation: Option<f64>,
        base_value: f64,
        correlated: bool,
        precision: usize,
    ) -> Result<Self> {
        let domain = map.domain();
        let xs: Vec<f64> = points.iter().map(|p| p.location.to_f64()).collect();
        let mut min_dist = f64::INFINITY;
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                min_dist = min_dist.min(circle_distance(domain, xs[i], xs[j]));
            }
        }
        if min_dist == 0.0 {
            return Err(EvtError::invalid("two maximal points coincide"));
        }
        let separation = match separation {
            Some(s) => {
                if !(s > 0.0) || 2.0 * s > min_dist {
                    return Err(EvtError::invalid(format!(
                        "separation {s} makes the balls overlap (minimal distance {min_dist})"
                    )));
                }
                s
            }
            None if min_dist.is_finite() => min_dist / 3.0,
            None => 0.25,
        };
        for p in &points {
            if !p.density.is_positive() {
                return Err(EvtError::invalid("densities must be positive"));
            }
            if let ShapeFn::BoundedPower { d, .. } = &p.shape {
                if rational_to_f64(d) <= base_value {
                    return Err(EvtError::invalid("bounded shape maximum must exceed the base value"));
                }
            }
        }
        Ok(ObservableSpec { groups, points, separation, base_value, domain, correlated, precision })
    }

    pub fn points(&self) -> &[MaximalPoint] {
        &self.points
    }

    pub fn groups(&self) -> &[OrbitGroup] {
        &self.groups
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn base_value(&self) -> f64 {
        self.base_value
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_correlated(&self) -> bool {
        self.correlated
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn with_precision(mut self, precision: usize) -> Self {
        self.precision = precision;
        self
    }

    /// `phi(x)`; `+inf` exactly at a maximal point with unbounded shape.
    pub fn evaluate(&self, x: f64) -> f64 {
        for p in &self.points {
            let d = circle_distance(self.domain, x, p.location.to_f64());
            if d < self.separation {
                return if d == 0.0 { p.shape.sup_value() } else { p.shape.h(d) };
            }
        }
        self.base_value
    }

    /// Ball index containing `x`, if any.
    pub fn nearest_ball(&self, x: f64) -> Option<usize> {
        self.points
            .iter()
            .position(|p| circle_distance(self.domain, x, p.location.to_f64()) < self.separation)
    }

    /// Lowest level at which the shape laws describe `{phi > u}`.
    pub fn regime_floor(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.shape.h(self.separation))
            .fold(self.base_value, f64::max)
    }

    /// Radii `eps_i(u)` in double precision.
    pub fn radii(&self, u: f64) -> Result<Vec<f64>> {
        let floor = self.regime_floor();
        if !(u >= floor) || u <= self.base_value {
            return Err(EvtError::LevelBelowRegime { level: u, minimum: floor });
        }
        self.points
            .iter()
            .map(|p| match p.shape.radius(u) {
                Some(r) if r <= self.separation * (1.0 + 1e-12) => Ok(r),
                Some(_) => Err(EvtError::LevelBelowRegime { level: u, minimum: floor }),
                None => Ok(0.0),
            })
            .collect()
    }

    /// Working precision adequate for balls at level `u`.
    pub fn precision_for(&self, u: f64) -> usize {
        let smallest = self
            .points
            .iter()
            .filter_map(|p| radius_log2(&p.shape, u))
            .fold(0.0f64, f64::min);
        self.precision.max((-smallest).ceil() as usize + 80)
    }

    /// High-precision radii at level `u`.
    pub fn radii_real(&self, u: f64, precision: usize) -> Result<Vec<Real>> {
        self.radii(u)?;
        let ur = Real::from_f64(u, precision);
        Ok(self
            .points
            .iter()
            .map(|p| p.shape.radius_real(&ur).unwrap_or_else(|| Real::zero(precision)))
            .collect())
    }

    /// Whether `phi(x) > u`, decided at the precision of `x`.
    pub fn exceeds(&self, x: &Real, u: f64) -> Result<bool> {
        let precision = x.precision();
        let radii = self.radii_real(u, precision)?;
        let one = Real::one(precision);
        for (pt, r) in self.points.iter().zip(&radii) {
            let c = pt.location.with_precision(precision);
            let mut d = (x - c.value()).abs();
            if self.domain == Domain::Circle {
                d = Real::min(&d, &(&one - &d));
            }
            if d < *r {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `U(u) = {phi > u}` as a union of balls.
    pub fn exceedance_region(&self, u: f64) -> Result<ArcSet> {
        let p = self.precision_for(u);
        self.exceedance_region_at(u, p)
    }

    pub fn exceedance_region_at(&self, u: f64, precision: usize) -> Result<ArcSet> {
        let radii = self.radii_real(u, precision)?;
        let mut set = ArcSet::empty(precision);
        for (pt, r) in self.points.iter().zip(&radii) {
            let c = pt.location.with_precision(precision);
            set = set.union(&ArcSet::ball(c.value(), r, self.domain, precision));
        }
        Ok(set)
    }

    /// Density-weighted measure `sum_i 2 rho_i eps_i(u)`.
    pub fn tail_measure(&self, u: f64) -> Result<f64> {
        let radii = self.radii(u)?;
        Ok(self
            .points
            .iter()
            .zip(radii)
            .map(|(p, r)| 2.0 * rational_to_f64(&p.density) * r)
            .sum())
    }

    /// Density-weighted measure of `set`, each piece weighted by the density
    /// of the ball it lies in.
    pub fn weighted_measure(&self, set: &ArcSet) -> Real {
        let p = set.precision();
        if self.points.iter().all(|pt| pt.density.is_one()) {
            return set.measure();
        }
        let mut acc = Real::zero(p);
        for (a, b) in set.segments() {
            let mid = 0.5 * (a.to_f64() + b.to_f64());
            let rho = self
                .nearest_ball(mid)
                .map(|i| self.points[i].density.clone())
                .unwrap_or_else(BigRational::one);
            acc = &acc + &(&(b - a) * &Real::from_rational(&rho, p));
        }
        acc
    }

    /// Level `u` with `n * mu(U(u)) = tau`.
    pub fn solve_threshold(&self, n: f64, tau: f64) -> Result<f64> {
        if !(n > 0.0) || !(tau > 0.0) {
            return Err(EvtError::invalid("n and tau must be positive"));
        }
        let target = tau / n;
        let lo = self.regime_floor();
        let m_lo = self.tail_measure(lo).map_err(|_| {
            EvtError::NoRoot(format!("regime boundary {lo} is not a valid level"))
        })?;
        if target > m_lo * (1.0 + 1e-15) {
            return Err(EvtError::NoRoot(format!(
                "tau/n = {target} exceeds the largest in-regime measure {m_lo}"
            )));
        }
        if (target - m_lo).abs() <= 1e-15 * target {
            return Ok(lo);
        }
        let cap = self
            .points
            .iter()
            .map(|p| p.shape.sup_value())
            .fold(f64::INFINITY, f64::min);
        let mut hi = if cap.is_finite() { cap } else { lo.abs().max(1.0) * 2.0 };
        if !cap.is_finite() {
            while self.tail_measure(hi)? > target {
                hi *= 2.0;
                if hi > 1e300 {
                    return Err(EvtError::NoRoot("no upper bracket".into()));
                }
            }
        }
        let mut lo = lo;
        let f = |u: f64| -> f64 { self.tail_measure(u).map(|m| m - target).unwrap_or(-target) };
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(if f(hi).abs() < f(lo).abs() { hi } else { lo })
    }
}

/// `log2 eps(u)` without underflow.
fn radius_log2(shape: &ShapeFn, u: f64) -> Option<f64> {
    let l = match shape {
        ShapeFn::NegLog => -u / std::f64::consts::LN_2,
        ShapeFn::PowerLaw { p } => -(u.log2()) / rational_to_f64(p),
        ShapeFn::BoundedPower { d, g } => (rational_to_f64(d) - u).log2() / rational_to_f64(g),
        ShapeFn::Custom(c) => (c.inverse)(u).log2(),
    };
    l.is_finite().then_some(l)
}

/// Exact f64 conversion helper for densities.
pub fn density_f64(p: &MaximalPoint) -> f64 {
    p.density.to_f64().unwrap_or(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::parse_rational;
    use proptest::prelude::*;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn pattern_spec() -> (PiecewiseMap, ObservableSpec) {
        let f = PiecewiseMap::affine_mod1(3).unwrap();
        let spec = ObservableSpec::correlated(
            &f,
            Position::parse("1/4", 80).unwrap(),
            Some(2),
            vec![
                PointSpec::new(0, ShapeFn::NegLog),
                PointSpec::new(1, ShapeFn::power_law(r("1/3")).unwrap()),
            ],
            None,
            0.0,
        )
        .unwrap();
        (f, spec)
    }

    #[test]
    fn auto_locations_and_separation() {
        let (_, spec) = pattern_spec();
        assert_eq!(spec.points()[1].location.exact_value(), Some(&r("3/4")));
        assert!((spec.separation() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn evaluate_cases() {
        let (_, spec) = pattern_spec();
        assert_eq!(spec.evaluate(0.75), f64::INFINITY);
        assert_eq!(spec.evaluate(0.5), 0.0);
        let u = 4.619613119957849;
        let x = 0.25 + (-u as f64).exp() / 3.0;
        assert!((spec.evaluate(x) - (u + 3f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn single_neglog_region_and_threshold() {
        let f = PiecewiseMap::affine_mod1(2).unwrap();
        let spec = ObservableSpec::correlated(
            &f,
            Position::parse("0.3", 80).unwrap(),
            None,
            vec![PointSpec::new(0, ShapeFn::NegLog)],
            None,
            0.0,
        )
        .unwrap();
        let u = 7.0;
        let m = spec.exceedance_region(u).unwrap().measure_f64();
        assert!((m - 2.0 * (-u as f64).exp()).abs() < 1e-18);
        let n = 1.0e5;
        let tau = 3.0;
        let got = spec.solve_threshold(n, tau).unwrap();
        assert!((got - (2.0 * n / tau).ln()).abs() < 1e-12);
        assert!(matches!(spec.exceedance_region(0.5), Err(EvtError::LevelBelowRegime { .. })));
    }

    #[test]
    fn threshold_at_regime_boundary() {
        let (_, spec) = pattern_spec();
        let lo = spec.regime_floor();
        let n = 100.0;
        let tau = n * spec.tail_measure(lo).unwrap();
        assert_eq!(spec.solve_threshold(n, tau).unwrap(), lo);
        assert!(matches!(spec.solve_threshold(n, 2.0 * tau), Err(EvtError::NoRoot(_))));
    }

    #[test]
    fn invalid_specs_rejected() {
        let f = PiecewiseMap::affine_mod1(2).unwrap();
        let zeta = Position::parse("1/31", 80).unwrap();
        let bad_order = ObservableSpec::correlated(
            &f,
            zeta.clone(),
            None,
            vec![PointSpec::new(0, ShapeFn::NegLog), PointSpec::new(0, ShapeFn::NegLog)],
            None,
            0.0,
        );
        assert!(bad_order.is_err());
        let bad_period = ObservableSpec::correlated(
            &f,
            zeta.clone(),
            Some(3),
            vec![PointSpec::new(0, ShapeFn::NegLog)],
            None,
            0.0,
        );
        assert!(bad_period.is_err());
        let wrong_xi = ObservableSpec::correlated(
            &f,
            zeta,
            Some(5),
            vec![PointSpec::new(0, ShapeFn::NegLog), PointSpec::new(1, ShapeFn::NegLog).at(Position::parse("0.5", 80).unwrap())],
            None,
            0.0,
        );
        assert!(wrong_xi.is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn evaluate_matches_region(x in 0.0f64..1.0, u in 4.7f64..12.0) {
            let (_, spec) = pattern_spec();
            let region = spec.exceedance_region(u).unwrap();
            let radii = spec.radii(u).unwrap();
            // Skip points within rounding of a ball boundary.
            let margin = spec.points().iter().zip(&radii).map(|(p, r)| {
                (circle_distance(Domain::Circle, x, p.location.to_f64()) - r).abs()
            }).fold(f64::INFINITY, f64::min);
            prop_assume!(margin > 1e-12);
            prop_assert_eq!(spec.evaluate(x) > u, region.contains_f64(x));
        }

        #[test]
        fn shapes_invert(u in 1.0f64..50.0) {
            for shape in [ShapeFn::NegLog, ShapeFn::power_law(r("1/2")).unwrap(), ShapeFn::power_law(r("3")).unwrap()] {
                let e = shape.radius(u).unwrap();
                prop_assert!((shape.h(e) - u).abs() <= 1e-12 * u);
            }
            let b = ShapeFn::bounded_power(r("60"), r("2")).unwrap();
            let e = b.radius(u).unwrap();
            prop_assert!((b.h(e) - u).abs() <= 1e-12 * 60.0);
        }

        #[test]
        fn threshold_round_trip(n in 1.0e3f64..1.0e7, tau in 0.5f64..50.0) {
            let (_, spec) = pattern_spec();
            prop_assume!(tau / n < spec.tail_measure(spec.regime_floor()).unwrap());
            let u = spec.solve_threshold(n, tau).unwrap();
            let m = spec.tail_measure(u).unwrap();
            prop_assert!((n * m - tau).abs() <= 1e-10 * tau);
        }
    }
}
