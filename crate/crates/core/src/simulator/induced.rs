//! Statistics of the original map against its first-return map on `Y`.

use super::clusters::{extract_clusters, ExceedanceRecord};
use super::detect::Detector;
use super::run::{run_experiment_with, ExperimentOutput, ExperimentPlan};
use super::stats::{cluster_stats, ks_two_sample, total_variation, ClusterStats};
use crate::analytic::default_q;
use crate::dynamics::map::{MapKind, PiecewiseMap};
use crate::dynamics::orbit::{induced_first_return, orbit_rng, Orbit, RETURN_BUDGET};
use crate::error::{EvtError, Result};
use crate::exec::{map_indexed, Execution};
use crate::interval_algebra::CircleArc;
use crate::observables::ObservableSpec;

/// Mixed into the master seed for the induced streams.
const INDUCED_SALT: u64 = 0x5eed_1d0c_ed00_0001;

#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    pub theta_gap: f64,
    pub tv_pi: f64,
    pub ks_gaps: f64,
}

pub fn divergence(a: &ClusterStats, b: &ClusterStats) -> Divergence {
    Divergence {
        theta_gap: (a.theta_hat - b.theta_hat).abs(),
        tv_pi: total_variation(&a.pi_hat, &b.pi_hat),
        ks_gaps: ks_two_sample(&a.gaps, &b.gaps),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InducedReport {
    pub level: f64,
    pub original: ClusterStats,
    pub induced: ClusterStats,
    pub divergence: Divergence,
}

/// Runs the exceedance pipeline along `F_Y`, one induced step per time unit.
pub fn run_induced(
    map: &PiecewiseMap,
    y: &CircleArc,
    spec: &ObservableSpec,
    plan: &ExperimentPlan,
    exec: Execution,
) -> Result<ExperimentOutput> {
    plan.validate()?;
    if !matches!(map.kind(), MapKind::Lsv { .. }) {
        return Err(EvtError::Unsupported("induced comparison runs on lsv maps".into()));
    }
    if let Some(p) = spec.points().iter().find(|p| !y.contains_f64(p.location.to_f64())) {
        return Err(EvtError::invalid(format!(
            "maximal point {} lies outside the return set",
            p.location.to_decimal_string(20)
        )));
    }
    let level = plan.resolve_level(spec)?;
    let q = plan.q.unwrap_or_else(|| default_q(spec));
    let det = Detector::new(spec, level)?;
    let runs = map_indexed(plan.orbits, exec, |i| -> Result<Vec<ExceedanceRecord>> {
        let start = Orbit::start(map, orbit_rng(plan.seed ^ INDUCED_SALT, i as u64), plan.burn_in)?;
        let mut x = start.position_f64();
        let mut guard = 0u64;
        while !y.contains_f64(x) {
            x = map.apply_f64(x);
            guard += 1;
            if guard > RETURN_BUDGET {
                return Err(EvtError::ReturnTimeout { budget: RETURN_BUDGET });
            }
        }
        let mut out = Vec::new();
        for t in 0..plan.horizon {
            if let Some((h, d)) = det.probe(x, None) {
                out.push(ExceedanceRecord { orbit: i, t, value: det.value(h, d), hit: h });
            }
            x = induced_first_return(map, y, x, RETURN_BUDGET)?.0;
        }
        Ok(out)
    });
    let mut exceedances = Vec::new();
    for r in runs {
        exceedances.extend(r?);
    }
    let clusters = extract_clusters(&exceedances, q);
    let stats = cluster_stats(&clusters, level, plan.horizon, plan.orbits, q);
    Ok(ExperimentOutput { level, q, series: Vec::new(), exceedances, clusters, stats })
}

pub fn compare_induced_repp(
    map: &PiecewiseMap,
    y: &CircleArc,
    spec: &ObservableSpec,
    plan: &ExperimentPlan,
) -> Result<InducedReport> {
    compare_induced_repp_with(map, y, spec, plan, Execution::default())
}

pub fn compare_induced_repp_with(
    map: &PiecewiseMap,
    y: &CircleArc,
    spec: &ObservableSpec,
    plan: &ExperimentPlan,
    exec: Execution,
) -> Result<InducedReport> {
    let induced = run_induced(map, y, spec, plan, exec)?;
    let original = run_experiment_with(map, spec, plan, exec)?;
    let divergence = divergence(&original.stats, &induced.stats);
    Ok(InducedReport { level: original.level, original: original.stats, induced: induced.stats, divergence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{PointSpec, ShapeFn};
    use crate::real::Position;
    use crate::simulator::run::Level;

    fn lsv_spec(at: &str) -> (PiecewiseMap, ObservableSpec) {
        let f = PiecewiseMap::lsv(0.4).unwrap();
        let spec = ObservableSpec::correlated(
            &f,
            Position::parse(at, 128).unwrap(),
            None,
            vec![PointSpec::new(0, ShapeFn::NegLog)],
            None,
            0.0,
        )
        .unwrap();
        (f, spec)
    }

    fn y() -> CircleArc {
        CircleArc::from_f64(0.5, 0.0, 80).unwrap()
    }

    #[test]
    fn small_run_agrees() {
        let (f, spec) = lsv_spec("sqrt(2)/2");
        let plan = ExperimentPlan::new(20_000, Level::Tau(5.0), 40, 3);
        let r = compare_induced_repp(&f, &y(), &spec, &plan).unwrap();
        assert_eq!(r.original.theta_hat, 1.0);
        assert_eq!(r.induced.theta_hat, 1.0);
        assert_eq!(r.divergence.tv_pi, 0.0);
    }

    #[test]
    fn same_run_has_no_divergence() {
        let (f, spec) = lsv_spec("sqrt(2)/2");
        let plan = ExperimentPlan::new(5_000, Level::Tau(5.0), 8, 11);
        let a = run_induced(&f, &y(), &spec, &plan, Execution::Parallel).unwrap();
        let b = run_induced(&f, &y(), &spec, &plan, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        let d = divergence(&a.stats, &b.stats);
        assert_eq!(d, Divergence { theta_gap: 0.0, tv_pi: 0.0, ks_gaps: 0.0 });
    }

    #[test]
    fn point_outside_return_set() {
        let (f, spec) = lsv_spec("1/3");
        let plan = ExperimentPlan::new(100, Level::Tau(1.0), 1, 0);
        assert!(matches!(compare_induced_repp(&f, &y(), &spec, &plan), Err(EvtError::InvalidInput(_))));
    }
}
