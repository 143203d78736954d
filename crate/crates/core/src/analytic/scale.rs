//! Asymptotic radius classes and symbolic sums of them.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{EvtError, Result};
use crate::observables::ShapeFn;
use crate::real::rational_string;

/// Decay law of a radius as the level grows (or approaches a finite top).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Decay {
    /// `e^-u`.
    Exp,
    /// `u^-e`.
    Poly(BigRational),
    /// `(D - u)^e`.
    Root(BigRational),
}

impl Decay {
    fn family(&self) -> u8 {
        match self {
            Decay::Exp | Decay::Poly(_) => 0,
            Decay::Root(_) => 1,
        }
    }

    /// Asymptotic comparison; errors across the infinite/finite-endpoint
    /// families.
    pub fn compare(&self, other: &Decay) -> Result<Ordering> {
        if self.family() != other.family() {
            return Err(EvtError::InconsistentEndpoints(format!(
                "cannot compare {self} with {other}"
            )));
        }
        Ok(self.cmp(other))
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Decay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decay::Exp => write!(f, "exp(-u)"),
            Decay::Poly(e) => write!(f, "u^-{}", rational_string(e)),
            Decay::Root(e) => write!(f, "(D-u)^{}", rational_string(e)),
        }
    }
}

/// Smaller means asymptotically smaller radius. Within the polynomial and
/// root classes a larger exponent decays faster.
impl Ord for Decay {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Decay::Exp, Decay::Exp) => Ordering::Equal,
            (Decay::Exp, Decay::Poly(_)) => Ordering::Less,
            (Decay::Poly(_), Decay::Exp) => Ordering::Greater,
            (Decay::Poly(a), Decay::Poly(b)) | (Decay::Root(a), Decay::Root(b)) => b.cmp(a),
            (a, b) => a.family().cmp(&b.family()),
        }
    }
}

impl PartialOrd for Decay {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `coeff * decay(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleClass {
    pub decay: Decay,
    pub coeff: BigRational,
}

impl ScaleClass {
    pub fn new(decay: Decay, coeff: BigRational) -> Self {
        ScaleClass { decay, coeff }
    }

    pub fn scaled(&self, by: &BigRational) -> Self {
        ScaleClass { decay: self.decay.clone(), coeff: &self.coeff * by }
    }

    pub fn compare(&self, other: &ScaleClass) -> Result<Ordering> {
        Ok(self.decay.compare(&other.decay)?.then_with(|| self.coeff.cmp(&other.coeff)))
    }
}

impl fmt::Display for ScaleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}", rational_string(&self.coeff), self.decay)
    }
}

/// Radius class of a shape, and the finite top value for bounded shapes.
pub fn shape_class(shape: &ShapeFn) -> Result<(ScaleClass, Option<BigRational>)> {
    let one = BigRational::from_integer(1.into());
    match shape {
        ShapeFn::NegLog => Ok((ScaleClass::new(Decay::Exp, one), None)),
        ShapeFn::PowerLaw { p } => Ok((ScaleClass::new(Decay::Poly(p.recip()), one), None)),
        ShapeFn::BoundedPower { d, g } => {
            Ok((ScaleClass::new(Decay::Root(g.recip()), one), Some(d.clone())))
        }
        ShapeFn::Custom(c) => Err(EvtError::Unsupported(format!(
            "custom shape '{}' has no closed-form scale class",
            c.name
        ))),
    }
}

/// Finite sum of scale classes, keyed by decay.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScaleSum(BTreeMap<Decay, BigRational>);

impl ScaleSum {
    pub fn new() -> Self {
        ScaleSum(BTreeMap::new())
    }

    pub fn add_class(&mut self, c: &ScaleClass) {
        let e = self.0.entry(c.decay.clone()).or_insert_with(BigRational::zero);
        *e += &c.coeff;
    }

    pub fn add(&self, other: &ScaleSum) -> ScaleSum {
        let mut out = self.clone();
        for (d, c) in &other.0 {
            *out.0.entry(d.clone()).or_insert_with(BigRational::zero) += c;
        }
        out
    }

    pub fn sub(&self, other: &ScaleSum) -> ScaleSum {
        let mut out = self.clone();
        for (d, c) in &other.0 {
            *out.0.entry(d.clone()).or_insert_with(BigRational::zero) -= c;
        }
        out
    }

    pub fn coeff(&self, d: &Decay) -> BigRational {
        self.0.get(d).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Largest decay with a non-zero coefficient.
    pub fn dominant(&self) -> Option<(&Decay, &BigRational)> {
        self.0.iter().rev().find(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.dominant().is_none()
    }

    pub fn has_negative(&self) -> bool {
        self.0.values().any(|c| c.is_negative())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Decay, &BigRational)> {
        self.0.iter().rev().filter(|(_, c)| !c.is_zero())
    }
}

impl fmt::Display for ScaleSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms()
            .map(|(d, c)| format!("{}*{}", rational_string(c), d))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
