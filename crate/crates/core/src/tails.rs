//! Domains of attraction of the maxima and their competition.

use std::fmt;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{EvtError, Result};
use crate::observables::{ObservableSpec, ShapeFn};
use crate::real::{rational_string, rational_to_f64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Gumbel,
    Frechet,
    Weibull,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Gumbel => "gumbel",
            Family::Frechet => "frechet",
            Family::Weibull => "weibull",
        })
    }
}

/// `None` is the infinite endpoint.
pub type Endpoint = Option<BigRational>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TailType {
    pub family: Family,
    /// `alpha` for Frechet and Weibull.
    pub index: Option<BigRational>,
    pub endpoint: Endpoint,
}

impl TailType {
    pub fn gumbel(endpoint: Endpoint) -> Self {
        TailType { family: Family::Gumbel, index: None, endpoint }
    }

    pub fn frechet(alpha: BigRational) -> Self {
        TailType { family: Family::Frechet, index: Some(alpha), endpoint: None }
    }

    pub fn weibull(alpha: BigRational, endpoint: BigRational) -> Self {
        TailType { family: Family::Weibull, index: Some(alpha), endpoint: Some(endpoint) }
    }

    pub fn index_f64(&self) -> Option<f64> {
        self.index.as_ref().map(rational_to_f64)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family.to_string(),
            "index": self.index.as_ref().map(rational_string),
            "endpoint": self.endpoint.as_ref().map(rational_string).unwrap_or_else(|| "inf".into()),
        })
    }
}

impl fmt::Display for TailType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if let Some(a) = &self.index {
            write!(f, "({})", rational_string(a))?;
        }
        match &self.endpoint {
            Some(d) => write!(f, " endpoint {}", rational_string(d)),
            None => write!(f, " endpoint inf"),
        }
    }
}

/// Family and index of `1 - F(u) ~ 2 rho eps(u)` for one maximum.
pub fn classify_shape(shape: &ShapeFn, density_positive: bool) -> Result<TailType> {
    if !density_positive {
        return Err(EvtError::invalid("tail classification needs a positive density at the maximum"));
    }
    match shape {
        ShapeFn::NegLog => Ok(TailType::gumbel(None)),
        ShapeFn::PowerLaw { p } => Ok(TailType::frechet(p.recip())),
        ShapeFn::BoundedPower { d, g } => Ok(TailType::weibull(g.recip(), d.clone())),
        ShapeFn::Custom(c) => Err(EvtError::Unclassifiable(format!("custom shape '{}'", c.name))),
    }
}

/// Law of the maximum over all points: the heaviest tail wins.
pub fn compete(types: &[TailType]) -> Result<TailType> {
    let first = types.first().ok_or_else(|| EvtError::invalid("no tail types to compare"))?;
    if types.iter().any(|t| t.endpoint != first.endpoint) {
        return Err(EvtError::InconsistentEndpoints(
            "maxima with different endpoints cannot compete".into(),
        ));
    }
    for family in [Family::Frechet, Family::Weibull] {
        let best = types
            .iter()
            .filter(|t| t.family == family)
            .min_by(|a, b| a.index.cmp(&b.index));
        if let Some(t) = best {
            return Ok(t.clone());
        }
    }
    Ok(first.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailCheckRow {
    pub level: f64,
    pub y: f64,
    pub ratio: f64,
    pub predicted: f64,
    pub deviation: f64,
    /// Index implied by the observed ratio.
    pub fitted_index: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailCheck {
    pub rows: Vec<TailCheckRow>,
    pub max_deviation: f64,
}

/// Scale factors used by [`numeric_tail_check`].
pub const PROBE_FACTORS: [f64; 2] = [0.5, 2.0];

/// Compares `F(u) = mu(U(u))` ratios against the law of `t` at each probe.
pub fn numeric_tail_check(spec: &ObservableSpec, t: &TailType, probes: &[f64]) -> Result<TailCheck> {
    let mut rows = Vec::new();
    for &u in probes {
        for &y in &PROBE_FACTORS {
            let row = match t.family {
                Family::Frechet => {
                    let a = t.index_f64().unwrap_or(f64::NAN);
                    let ratio = spec.tail_measure(y * u)? / spec.tail_measure(u)?;
                    TailCheckRow {
                        level: u,
                        y,
                        ratio,
                        predicted: y.powf(-a),
                        deviation: 0.0,
                        fitted_index: Some(-ratio.ln() / y.ln()),
                    }
                }
                Family::Weibull => {
                    let a = t.index_f64().unwrap_or(f64::NAN);
                    let d = t.endpoint.as_ref().map(rational_to_f64).unwrap_or(f64::NAN);
                    let s = d - u;
                    let ratio = spec.tail_measure(d - y * s)? / spec.tail_measure(u)?;
                    TailCheckRow {
                        level: u,
                        y,
                        ratio,
                        predicted: y.powf(a),
                        deviation: 0.0,
                        fitted_index: Some(ratio.ln() / y.ln()),
                    }
                }
                Family::Gumbel => {
                    let ratio = spec.tail_measure(u + y)? / spec.tail_measure(u)?;
                    TailCheckRow { level: u, y, ratio, predicted: (-y).exp(), deviation: 0.0, fitted_index: None }
                }
            };
            rows.push(TailCheckRow { deviation: (row.ratio / row.predicted - 1.0).abs(), ..row });
        }
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(TailCheck { rows, max_deviation })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailVerdict {
    pub members: Vec<TailType>,
    pub winner: TailType,
    pub check: TailCheck,
}

/// Classifies every maximum, runs the competition and checks the winner.
pub fn tail_verdict(spec: &ObservableSpec, probes: &[f64]) -> Result<TailVerdict> {
    let members = spec
        .points()
        .iter()
        .map(|p| classify_shape(&p.shape, p.density > BigRational::from_integer(0.into())))
        .collect::<Result<Vec<_>>>()?;
    let winner = compete(&members)?;
    let check = numeric_tail_check(spec, &winner, probes)?;
    Ok(TailVerdict { members, winner, check })
}

impl TailVerdict {
    pub fn to_json(&self) -> Value {
        let same_family_contest = self.members.iter().filter(|m| m.family == self.winner.family).count() > 1
            && self.winner.family != Family::Gumbel;
        json!({
            "winner": {
                "family": self.winner.family.to_string(),
                "index": self.winner.index.as_ref().map(rational_string),
                "endpoint": self.winner.endpoint.as_ref().map(rational_string).unwrap_or_else(|| "inf".into()),
                "provenance": {
                    "family": "theorem",
                    "index": "derived",
                    "same_family_rule": if same_family_contest { "extension: smallest index" } else { "n/a" },
                },
            },
            "members": self.members.iter().map(TailType::to_json).collect::<Vec<_>>(),
            "checks": self.check.rows.iter().map(|r| json!({
                "level": r.level,
                "y": r.y,
                "ratio": r.ratio,
                "predicted": r.predicted,
                "deviation": r.deviation,
                "fitted_index": r.fitted_index,
            })).collect::<Vec<_>>(),
            "max_deviation": self.check.max_deviation,
        })
    }
}
