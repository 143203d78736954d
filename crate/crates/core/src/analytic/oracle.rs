//! Brute-force finite-level sets built with the arc algebra.

use crate::dynamics::map::PiecewiseMap;
use crate::error::{EvtError, Result};
use crate::interval_algebra::ArcSet;
use crate::observables::ObservableSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleTable {
    pub level: f64,
    pub q: u64,
    pub precision: usize,
    pub mu_u: f64,
    /// `mu(A^(kappa))` for `kappa = 0..=K`.
    pub mu_a: Vec<f64>,
    /// `mu(U^(kappa))` for `kappa = 0..=K`.
    pub mu_nested: Vec<f64>,
    pub theta_n: f64,
    /// `pi_n(k)` for cluster sizes `k = 1..=K`.
    pub pi_n: Vec<f64>,
}

/// `A = U \ (f^-1 U ∪ ... ∪ f^-q U)` and the part of `U` that comes back.
fn split(u: &ArcSet, map: &PiecewiseMap, q: u64) -> Result<(ArcSet, ArcSet)> {
    let mut back = ArcSet::empty(u.precision());
    let mut pre = u.clone();
    for _ in 0..q {
        pre = pre.preimage(map)?;
        back = back.union(&pre);
    }
    Ok((u.difference(&back), u.intersect(&back)))
}

/// Nested sets `U^(kappa)`, `A_q^(kappa)` at level `u` and the finite-level
/// extremal index and cluster size distribution they define.
pub fn finite_n_sets(spec: &ObservableSpec, map: &PiecewiseMap, u: f64, q: u64, k_max: usize) -> Result<OracleTable> {
    if k_max == 0 {
        return Err(EvtError::invalid("cutoff K must be at least 1"));
    }
    let precision = spec.precision_for(u);
    let mut current = spec.exceedance_region_at(u, precision)?;
    let mu_u = spec.weighted_measure(&current).to_f64();
    if mu_u >= 1.0 {
        return Err(EvtError::LevelBelowRegime { level: u, minimum: spec.regime_floor() });
    }
    let mut mu_a = Vec::with_capacity(k_max + 1);
    let mut mu_nested = Vec::with_capacity(k_max + 1);
    for _ in 0..=k_max {
        mu_nested.push(spec.weighted_measure(&current).to_f64());
        if current.is_empty() {
            mu_a.push(0.0);
            continue;
        }
        let (a, next) = split(&current, map, q)?;
        mu_a.push(spec.weighted_measure(&a).to_f64());
        current = next;
    }
    let theta_n = if mu_u > 0.0 { mu_a[0] / mu_u } else { f64::NAN };
    let pi_n = (1..=k_max)
        .map(|k| if mu_a[0] > 0.0 { (mu_a[k - 1] - mu_a[k]) / mu_a[0] } else { f64::NAN })
        .collect();
    Ok(OracleTable { level: u, q, precision, mu_u, mu_a, mu_nested, theta_n, pi_n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn approaches_closed_form() {
        let (f, spec) = presets::nonperiodic_sqrt2().unwrap();
        let mut last_gap = f64::INFINITY;
        for u in [10.0, 15.0, 20.0, 25.0] {
            let t = finite_n_sets(&spec, &f, u, 3, 4).unwrap();
            let gap = (t.theta_n - 0.875).abs();
            eprintln!("u = {u}: theta_n = {}", t.theta_n);
            assert!(gap < last_gap, "u = {u}: gap {gap} after {last_gap}");
            if u == 20.0 {
                assert!(gap <= 5.0 * (-u as f64).exp() * u * u, "u = {u}: gap {gap}");
            }
            last_gap = gap;
        }
        assert!(last_gap < 1e-3);
    }

    #[test]
    fn single_point_without_lag() {
        let (f, spec) = presets::typical_point(2).unwrap();
        let t = finite_n_sets(&spec, &f, 8.0, 0, 2).unwrap();
        assert_eq!(t.theta_n, 1.0);
        assert_eq!(t.pi_n, vec![1.0, 0.0]);
    }

    #[test]
    fn periodic_cluster_sizes() {
        let (f, spec) = presets::periodic_1_31().unwrap();
        let t = finite_n_sets(&spec, &f, 40.0, 5, 4).unwrap();
        assert!((t.theta_n - 13.0 / 16.0).abs() < 1e-3, "{}", t.theta_n);
        assert!((t.pi_n[0] - 21.0 / 26.0).abs() < 1e-3, "{:?}", t.pi_n);
        assert!((t.pi_n[1] - 67.0 / 416.0).abs() < 1e-3, "{:?}", t.pi_n);
    }

    #[test]
    fn low_level_rejected() {
        let (f, spec) = presets::nonperiodic_sqrt2().unwrap();
        assert!(matches!(
            finite_n_sets(&spec, &f, 0.5, 3, 2),
            Err(EvtError::LevelBelowRegime { .. })
        ));
    }
}
