//! Piecewise maps of the circle or the unit interval.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{EvtError, Result};
use crate::real::{rational_string, Position, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `[0,1)` with endpoints identified.
    Circle,
    /// `[0,1]`, no wrap-around.
    Interval,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BranchLaw {
    /// `x -> a x + b (mod 1)`.
    Affine { slope: BigRational, offset: BigRational },
    /// `x -> x (1 + (2x)^alpha)` on `[0, 1/2)`.
    LsvLeft { alpha: f64 },
    /// `x -> 2x - 1` on `[1/2, 1]`.
    LsvRight,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub lo: BigRational,
    pub hi: BigRational,
    pub law: BranchLaw,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    AffineMod1 { slope: i64 },
    PiecewiseAffine,
    Lsv { alpha: f64 },
}

/// Derivative product along an orbit segment.
#[derive(Clone, Debug, PartialEq)]
pub enum DerivProduct {
    Exact(BigRational),
    Approx(f64),
}

impl DerivProduct {
    pub fn to_f64(&self) -> f64 {
        match self {
            DerivProduct::Exact(r) => crate::real::rational_to_f64(r),
            DerivProduct::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            DerivProduct::Exact(r) => Some(r),
            DerivProduct::Approx(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicCheck {
    pub is_periodic: bool,
    pub is_prime_period: bool,
    pub multiplier: DerivProduct,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseMap {
    kind: MapKind,
    domain: Domain,
    branches: Vec<Branch>,
    continuous: bool,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl PiecewiseMap {
    /// `x -> k x mod 1` on the circle, `k >= 2`.
    pub fn affine_mod1(slope: i64) -> Result<Self> {
        if slope < 2 {
            return Err(EvtError::invalid(format!(
                "affine_mod1 needs an integer slope >= 2, got {slope}"
            )));
        }
        let branches = (0..slope)
            .map(|j| Branch {
                lo: rat(j, slope),
                hi: rat(j + 1, slope),
                law: BranchLaw::Affine {
                    slope: rat(slope, 1),
                    offset: rat(-j, 1),
                },
            })
            .collect();
        Ok(PiecewiseMap {
            kind: MapKind::AffineMod1 { slope },
            domain: Domain::Circle,
            branches,
            continuous: true,
        })
    }

    /// General piecewise-affine circle map. Branches must tile `[0,1)` in
    /// order and every slope must satisfy `|a| > 1`.
    pub fn piecewise_affine(branches: Vec<(BigRational, BigRational, BigRational, BigRational)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(EvtError::invalid("piecewise map needs at least one branch"));
        }
        let mut out = Vec::with_capacity(branches.len());
        let mut expected = BigRational::zero();
        for (lo, hi, a, b) in branches {
            if lo != expected {
                return Err(EvtError::invalid(format!(
                    "branch domains must tile [0,1): expected a branch starting at {}, got {}",
                    rational_string(&expected),
                    rational_string(&lo)
                )));
            }
            if hi <= lo {
                return Err(EvtError::invalid("empty branch domain"));
            }
            if a.abs() <= BigRational::one() {
                return Err(EvtError::invalid(format!(
                    "branch slope {} is not expanding",
                    rational_string(&a)
                )));
            }
            expected = hi.clone();
            out.push(Branch {
                lo,
                hi,
                law: BranchLaw::Affine { slope: a, offset: b },
            });
        }
        if !expected.is_one() {
            return Err(EvtError::invalid("branch domains must end at 1"));
        }
        let continuous = (0..out.len()).all(|i| {
            let next = &out[(i + 1) % out.len()];
            let end = affine_lift_rational(&out[i].law, &out[i].hi);
            let start = affine_lift_rational(&next.law, &next.lo);
            let same_slope = matches!((&out[i].law, &next.law),
                (BranchLaw::Affine { slope: a, .. }, BranchLaw::Affine { slope: b, .. }) if a == b);
            same_slope && (end - start).fract().is_zero()
        });
        Ok(PiecewiseMap {
            kind: MapKind::PiecewiseAffine,
            domain: Domain::Circle,
            branches: out,
            continuous,
        })
    }

    /// Liverani-Saussol-Vaienti map on `[0,1]`, `alpha` in `(0,1)`.
    pub fn lsv(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(EvtError::invalid(format!("LSV alpha must lie in (0,1), got {alpha}")));
        }
        Ok(PiecewiseMap {
            kind: MapKind::Lsv { alpha },
            domain: Domain::Interval,
            branches: vec![
                Branch { lo: rat(0, 1), hi: rat(1, 2), law: BranchLaw::LsvLeft { alpha } },
                Branch { lo: rat(1, 2), hi: rat(1, 1), law: BranchLaw::LsvRight },
            ],
            continuous: false,
        })
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn degree(&self) -> usize {
        self.branches.len()
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn is_affine(&self) -> bool {
        !matches!(self.kind, MapKind::Lsv { .. })
    }

    /// Integer slope when the map is `k x mod 1`.
    pub fn integer_slope(&self) -> Option<u32> {
        match self.kind {
            MapKind::AffineMod1 { slope } => u32::try_from(slope).ok(),
            _ => None,
        }
    }

    /// Largest `|f'|`, used to size precision budgets.
    pub fn max_expansion(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| match &b.law {
                BranchLaw::Affine { slope, .. } => slope.abs().to_f64().unwrap_or(f64::MAX),
                BranchLaw::LsvLeft { alpha } => 1.0 + (1.0 + alpha),
                BranchLaw::LsvRight => 2.0,
            })
            .fold(1.0, f64::max)
    }

    fn branch_of_rational(&self, x: &BigRational) -> usize {
        let last = self.branches.len() - 1;
        self.branches
            .iter()
            .position(|b| *x < b.hi)
            .unwrap_or(last)
    }

    fn branch_of_real(&self, x: &Real) -> usize {
        let p = x.precision();
        let last = self.branches.len() - 1;
        self.branches
            .iter()
            .position(|b| *x < Real::from_rational(&b.hi, p))
            .unwrap_or(last)
    }

    fn branch_of_f64(&self, x: f64) -> usize {
        let last = self.branches.len() - 1;
        self.branches
            .iter()
            .position(|b| x < b.hi.to_f64().unwrap_or(1.0))
            .unwrap_or(last)
    }

    /// Is `x` a point where `f` is discontinuous or changes slope?
    fn is_singular_rational(&self, x: &BigRational) -> bool {
        match self.kind {
            MapKind::AffineMod1 { .. } => false,
            MapKind::Lsv { .. } => *x == rat(1, 2),
            MapKind::PiecewiseAffine => {
                if self.continuous {
                    return false;
                }
                self.branches.iter().any(|b| b.lo == *x) || x.is_zero()
            }
        }
    }

    fn wrap_rational(&self, v: BigRational) -> BigRational {
        match self.domain {
            Domain::Circle => {
                let f = v.fract();
                if f.is_negative() {
                    f + BigRational::one()
                } else {
                    f
                }
            }
            Domain::Interval => v,
        }
    }

    fn wrap_real(&self, v: Real) -> Real {
        match self.domain {
            Domain::Circle => v.mod_one(),
            Domain::Interval => v,
        }
    }

    /// Exact image of a rational point; `None` for non-affine maps.
    pub fn apply_rational(&self, x: &BigRational) -> Option<BigRational> {
        let b = &self.branches[self.branch_of_rational(x)];
        match &b.law {
            BranchLaw::Affine { .. } => Some(self.wrap_rational(affine_lift_rational(&b.law, x))),
            BranchLaw::LsvRight => Some(x * rat(2, 1) - BigRational::one()),
            BranchLaw::LsvLeft { .. } => None,
        }
    }

    /// Branch value before reduction mod 1.
    pub fn lift_real(&self, branch: usize, x: &Real) -> Real {
        let p = x.precision();
        match &self.branches[branch].law {
            BranchLaw::Affine { slope, offset } => {
                &(x * &Real::from_rational(slope, p)) + &Real::from_rational(offset, p)
            }
            BranchLaw::LsvLeft { alpha } => {
                let two_x = x * &Real::from_i64(2, p);
                let pow = two_x
                    .powr(&Real::from_f64(*alpha, p))
                    .expect("non-negative base");
                x * &(&Real::one(p) + &pow)
            }
            BranchLaw::LsvRight => &(x * &Real::from_i64(2, p)) - &Real::one(p),
        }
    }

    pub fn apply_real(&self, x: &Real) -> Real {
        let i = self.branch_of_real(x);
        self.wrap_real(self.lift_real(i, x))
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        let b = &self.branches[self.branch_of_f64(x)];
        match &b.law {
            BranchLaw::Affine { slope, offset } => {
                let v = slope.to_f64().unwrap() * x + offset.to_f64().unwrap();
                let v = v - v.floor();
                if v >= 1.0 {
                    0.0
                } else {
                    v
                }
            }
            BranchLaw::LsvLeft { alpha } => x * (1.0 + (2.0 * x).powf(*alpha)),
            BranchLaw::LsvRight => 2.0 * x - 1.0,
        }
    }

    /// `|f'(x)|` in double precision.
    pub fn derivative_f64(&self, x: f64) -> f64 {
        let b = &self.branches[self.branch_of_f64(x)];
        match &b.law {
            BranchLaw::Affine { slope, .. } => slope.abs().to_f64().unwrap(),
            BranchLaw::LsvLeft { alpha } => 1.0 + (1.0 + alpha) * (2.0 * x).powf(*alpha),
            BranchLaw::LsvRight => 2.0,
        }
    }

    /// `f^steps(x)`; exact whenever `x` is rational and the map is affine.
    pub fn iterate(&self, x: &Position, steps: u64) -> Position {
        let p = x.precision();
        if let Some(mut r) = x.exact_value().cloned() {
            let mut exact = true;
            let mut steps_done = 0;
            while steps_done < steps {
                match self.apply_rational(&r) {
                    Some(next) => r = next,
                    None => {
                        exact = false;
                        break;
                    }
                }
                steps_done += 1;
            }
            if exact {
                return Position::exact(r, p);
            }
            let mut v = Real::from_rational(&r, p);
            for _ in steps_done..steps {
                v = self.apply_real(&v);
            }
            return Position::approx(v);
        }
        let mut v = x.value().clone();
        for _ in 0..steps {
            v = self.apply_real(&v);
        }
        Position::approx(v)
    }

    /// `prod_{j<steps} |f'(f^j x)|`.
    pub fn derivative_product(&self, x: &Position, steps: u64) -> Result<DerivProduct> {
        let mut cur = x.clone();
        if self.is_affine() {
            let mut acc = BigRational::one();
            for step in 0..steps {
                let i = match cur.exact_value() {
                    Some(r) => {
                        if self.is_singular_rational(r) {
                            return Err(EvtError::Singular { step: step as usize, x: cur.to_f64() });
                        }
                        self.branch_of_rational(r)
                    }
                    None => self.branch_of_real(cur.value()),
                };
                if let BranchLaw::Affine { slope, .. } = &self.branches[i].law {
                    acc *= slope.abs();
                }
                cur = self.iterate(&cur, 1);
            }
            return Ok(DerivProduct::Exact(acc));
        }
        let mut acc = 1.0;
        for step in 0..steps {
            if let Some(r) = cur.exact_value() {
                if self.is_singular_rational(r) {
                    return Err(EvtError::Singular { step: step as usize, x: cur.to_f64() });
                }
            }
            acc *= self.derivative_f64(cur.to_f64());
            cur = self.iterate(&cur, 1);
        }
        Ok(DerivProduct::Approx(acc))
    }

    fn distance_real(&self, a: &Real, b: &Real) -> Real {
        let d = (a - b).abs();
        match self.domain {
            Domain::Circle => {
                let other = &Real::one(d.precision()) - &d;
                Real::min(&d, &other)
            }
            Domain::Interval => d,
        }
    }

    /// Checks `f^p(zeta) = zeta`, minimality of `p`, and the multiplier.
    pub fn verify_periodic(&self, zeta: &Position, p: u64) -> Result<PeriodicCheck> {
        if p == 0 {
            return Err(EvtError::invalid("period must be at least 1"));
        }
        let prec = zeta.precision() + 64 + (64 - p.leading_zeros() as usize) * 8;
        let z = zeta.with_precision(prec);
        let tol = Real::pow2(-60, prec);
        let mut returns = Vec::with_capacity(p as usize);
        let mut cur = z.clone();
        for _ in 0..p {
            cur = self.iterate(&cur, 1);
            let hit = match (cur.exact_value(), z.exact_value()) {
                (Some(a), Some(b)) => a == b,
                _ => self.distance_real(cur.value(), z.value()) <= tol,
            };
            returns.push(hit);
        }
        let is_periodic = returns[p as usize - 1];
        let is_prime_period = is_periodic && !returns[..p as usize - 1].iter().any(|&h| h);
        let multiplier = self.derivative_product(&z, p)?;
        Ok(PeriodicCheck { is_periodic, is_prime_period, multiplier })
    }

    /// Preimage of the segment `[s, t] ⊂ [0,1]` as raw segments of `[0,1]`.
    pub fn inverse_segments(&self, s: &Real, t: &Real) -> Vec<(Real, Real)> {
        let p = s.precision().max(t.precision());
        let mut out = Vec::new();
        for (bi, b) in self.branches.iter().enumerate() {
            let lo = Real::from_rational(&b.lo, p);
            let hi = Real::from_rational(&b.hi, p);
            match &b.law {
                BranchLaw::Affine { slope, offset } => {
                    let a = Real::from_rational(slope, p);
                    let off = Real::from_rational(offset, p);
                    let y0 = self.lift_real(bi, &lo);
                    let y1 = self.lift_real(bi, &hi);
                    let (ymin, ymax) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
                    let n_lo = (&ymin - t).floor_i64();
                    let n_hi = (&ymax - s).floor_i64() + 1;
                    for n in n_lo..=n_hi {
                        let nn = Real::from_i64(n, p);
                        let x0 = &(&(s + &nn) - &off) / &a;
                        let x1 = &(&(t + &nn) - &off) / &a;
                        let (x0, x1) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
                        let c0 = Real::max(&x0, &lo);
                        let c1 = Real::min(&x1, &hi);
                        if c0 < c1 {
                            out.push((c0, c1));
                        }
                    }
                }
                BranchLaw::LsvLeft { .. } => {
                    // Increasing onto [0,1).
                    let one = Real::one(p);
                    let s1 = Real::min(s, &one);
                    let t1 = Real::min(t, &one);
                    if s1 < t1 {
                        let x0 = self.invert_monotone(bi, &s1, &lo, &hi);
                        let x1 = self.invert_monotone(bi, &t1, &lo, &hi);
                        if x0 < x1 {
                            out.push((x0, x1));
                        }
                    }
                }
                BranchLaw::LsvRight => {
                    let half = Real::pow2(-1, p);
                    let x0 = &(s + &Real::one(p)) * &half;
                    let x1 = &(t + &Real::one(p)) * &half;
                    if x0 < x1 {
                        out.push((x0, x1));
                    }
                }
            }
        }
        out
    }

    /// Solves `lift(branch, x) = y` on `[lo, hi]` by bisection.
    fn invert_monotone(&self, branch: usize, y: &Real, lo: &Real, hi: &Real) -> Real {
        let p = y.precision();
        let half = Real::pow2(-1, p);
        let (mut a, mut b) = (lo.clone(), hi.clone());
        for _ in 0..p + 4 {
            let mid = &(&a + &b) * &half;
            if self.lift_real(branch, &mid) < *y {
                a = mid;
            } else {
                b = mid;
            }
        }
        a
    }

    /// Forward image of `[s, t]` as unreduced segments, one per branch piece.
    pub fn lifted_image_segments(&self, s: &Real, t: &Real) -> Vec<(Real, Real)> {
        let p = s.precision().max(t.precision());
        let mut out = Vec::new();
        for (bi, b) in self.branches.iter().enumerate() {
            let lo = Real::from_rational(&b.lo, p);
            let hi = Real::from_rational(&b.hi, p);
            let c0 = Real::max(s, &lo);
            let c1 = Real::min(t, &hi);
            if c0 < c1 {
                let y0 = self.lift_real(bi, &c0);
                let y1 = self.lift_real(bi, &c1);
                if y0 <= y1 {
                    out.push((y0, y1));
                } else {
                    out.push((y1, y0));
                }
            }
        }
        out
    }
}

fn affine_lift_rational(law: &BranchLaw, x: &BigRational) -> BigRational {
    match law {
        BranchLaw::Affine { slope, offset } => slope * x + offset,
        _ => unreachable!("affine law expected"),
    }
}
