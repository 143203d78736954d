//! JSON views of analytic results.

use num_rational::BigRational;
use serde_json::{json, Value};

use super::engine::{Containment, EIResult, MultiplicityResult};
use super::oracle::OracleTable;
use super::qselect::QSelection;
use crate::real::{rational_string, rational_to_f64};

pub fn exact_json(v: &BigRational) -> Value {
    json!({ "exact": rational_string(v), "float": rational_to_f64(v) })
}

fn relation_name(c: Containment) -> &'static str {
    match c {
        Containment::Inside => "inside",
        Containment::Contains => "contains",
        Containment::Disjoint => "disjoint",
        Containment::Indeterminate => "indeterminate",
    }
}

/// Point indices are reported 1-based.
pub fn theta_json(r: &EIResult) -> Value {
    json!({
        "theta": exact_json(&r.theta),
        "q": r.q,
        "dominant_class": r.dominant_class.to_string(),
        "numerator": r.numerator.to_string(),
        "denominator": r.denominator.to_string(),
        "numerator_terms": r.numerator_terms.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "denominator_terms": r.denominator_terms.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "index_set": r.index_set.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "successors": r.successors.iter().map(|j| j.map(|j| j + 1)).collect::<Vec<_>>(),
        "groups": r.groups.iter().map(|g| json!({
            "weight": exact_json(&g.weight),
            "theta": exact_json(&g.theta),
        })).collect::<Vec<_>>(),
        "containment_matrix": r.containment.iter().map(|c| json!({
            "i": c.i + 1,
            "j": c.j + 1,
            "lag": c.lag,
            "pullback": c.pullback.to_string(),
            "relation": relation_name(c.relation),
        })).collect::<Vec<_>>(),
    })
}

pub fn multiplicity_json(r: &MultiplicityResult) -> Value {
    json!({
        "pi": r.pi.iter().enumerate().map(|(k, v)| {
            let mut e = exact_json(v);
            e["k"] = json!(k + 1);
            e
        }).collect::<Vec<_>>(),
        "tails": r.tails.iter().map(|t| json!({
            "group": t.group,
            "start": t.start,
            "period": t.period,
            "ratio": exact_json(&t.ratio),
            "block": t.block.iter().map(exact_json).collect::<Vec<_>>(),
            "index_shift": t.index_shift,
        })).collect::<Vec<_>>(),
        "total": r.total.as_ref().map(exact_json),
        "mean": r.mean.as_ref().map(exact_json),
        "dominant_class": r.dominant_class.to_string(),
        "index_sets": r.index_sets.iter()
            .map(|s| s.iter().map(|i| i + 1).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "successor_indices": r.successor_indices.iter()
            .map(|s| s.iter().map(|j| j.map(|j| j + 1)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn oracle_json(rows: &[OracleTable]) -> Value {
    Value::Array(
        rows.iter()
            .map(|t| {
                json!({
                    "level": t.level,
                    "q": t.q,
                    "precision": t.precision,
                    "mu_u": t.mu_u,
                    "mu_a": t.mu_a,
                    "theta_n": t.theta_n,
                    "pi_n": t.pi_n,
                })
            })
            .collect(),
    )
}

pub fn qselect_json(s: &QSelection) -> Value {
    json!({
        "q": s.q,
        "rationale": s.rationale.to_string(),
        "increasing": s.increasing,
        "return_times": s.rows.iter().map(|r| json!({
            "n": r.horizon,
            "level": r.level,
            "by_j": r.return_times,
        })).collect::<Vec<_>>(),
    })
}
