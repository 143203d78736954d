//! Monte Carlo runs over independent orbits.

use super::clusters::{extract_clusters, Cluster, ExceedanceRecord};
use super::detect::Detector;
use super::stats::{cluster_stats, ClusterStats};
use crate::analytic::default_q;
use crate::dynamics::map::PiecewiseMap;
use crate::dynamics::orbit::{orbit_rng, Orbit};
use crate::error::{EvtError, Result};
use crate::exec::{map_indexed, Execution};
use crate::observables::ObservableSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Level {
    /// Solve `n mu(U(u)) = tau`.
    Tau(f64),
    Value(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesMode {
    None,
    FirstOrbit,
    AllOrbits,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub horizon: u64,
    pub level: Level,
    pub orbits: usize,
    pub seed: u64,
    /// Defaults to the case rule of [`default_q`].
    pub q: Option<u64>,
    /// Defaults to 0 for digit orbits and 1000 steps otherwise.
    pub burn_in: Option<u64>,
    pub series: SeriesMode,
}

impl ExperimentPlan {
    pub fn new(horizon: u64, level: Level, orbits: usize, seed: u64) -> Self {
        ExperimentPlan { horizon, level, orbits, seed, q: None, burn_in: None, series: SeriesMode::None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.orbits == 0 {
            return Err(EvtError::invalid("horizon and orbit count must be at least 1"));
        }
        match self.level {
            Level::Tau(t) if !(t > 0.0 && t.is_finite()) => Err(EvtError::invalid("tau must be positive")),
            Level::Value(u) if !u.is_finite() => Err(EvtError::invalid("level must be finite")),
            _ => Ok(()),
        }
    }

    pub fn resolve_level(&self, spec: &ObservableSpec) -> Result<f64> {
        match self.level {
            Level::Tau(t) => spec.solve_threshold(self.horizon as f64, t),
            Level::Value(u) => {
                spec.radii(u)?;
                Ok(u)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesRow {
    pub orbit: usize,
    pub t: u64,
    pub x: f64,
    pub phi: f64,
    pub hit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub level: f64,
    pub q: u64,
    pub series: Vec<SeriesRow>,
    pub exceedances: Vec<ExceedanceRecord>,
    pub clusters: Vec<Cluster>,
    pub stats: ClusterStats,
}

struct OrbitRun {
    exceedances: Vec<ExceedanceRecord>,
    series: Vec<SeriesRow>,
}

fn run_orbit(
    map: &PiecewiseMap,
    spec: &ObservableSpec,
    det: &Detector,
    plan: &ExperimentPlan,
    index: usize,
    keep_series: bool,
) -> Result<OrbitRun> {
    let mut orbit = Orbit::start(map, orbit_rng(plan.seed, index as u64), plan.burn_in)?;
    let mut exceedances = Vec::new();
    let mut series = Vec::new();
    for t in 0..plan.horizon {
        let x = orbit.position_f64();
        let hit = match &mut orbit {
            Orbit::Digits(o) => det.probe(x, Some(o)),
            Orbit::Float { .. } => det.probe(x, None),
        };
        if let Some((i, d)) = hit {
            exceedances.push(ExceedanceRecord { orbit: index, t, value: det.value(i, d), hit: i });
        }
        if keep_series {
            let phi = match hit {
                Some((i, d)) => det.value(i, d),
                None => spec.evaluate(x),
            };
            series.push(SeriesRow { orbit: index, t, x, phi, hit: hit.map(|h| h.0) });
        }
        orbit.advance();
    }
    Ok(OrbitRun { exceedances, series })
}

pub fn run_experiment(map: &PiecewiseMap, spec: &ObservableSpec, plan: &ExperimentPlan) -> Result<ExperimentOutput> {
    run_experiment_with(map, spec, plan, Execution::default())
}

/// Results are identical for both execution modes.
pub fn run_experiment_with(
    map: &PiecewiseMap,
    spec: &ObservableSpec,
    plan: &ExperimentPlan,
    exec: Execution,
) -> Result<ExperimentOutput> {
    plan.validate()?;
    let level = plan.resolve_level(spec)?;
    let q = plan.q.unwrap_or_else(|| default_q(spec));
    let det = Detector::new(spec, level)?;
    let runs = map_indexed(plan.orbits, exec, |i| {
        let keep = match plan.series {
            SeriesMode::None => false,
            SeriesMode::FirstOrbit => i == 0,
            SeriesMode::AllOrbits => true,
        };
        run_orbit(map, spec, &det, plan, i, keep)
    });
    let mut exceedances = Vec::new();
    let mut series = Vec::new();
    for r in runs {
        let r = r?;
        exceedances.extend(r.exceedances);
        series.extend(r.series);
    }
    let clusters = extract_clusters(&exceedances, q);
    let stats = cluster_stats(&clusters, level, plan.horizon, plan.orbits, q);
    Ok(ExperimentOutput { level, q, series, exceedances, clusters, stats })
}
