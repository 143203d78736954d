//! Experiment config files (TOML). Unknown keys are rejected.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use evtlab_core::dynamics::PiecewiseMap;
use evtlab_core::interval_algebra::CircleArc;
use evtlab_core::observables::{ObservableSpec, PointSpec, ShapeFn};
use evtlab_core::real::{parse_rational, Position, Real, DEFAULT_PRECISION};
use evtlab_core::simulator::{ExperimentPlan, Level, SeriesMode};

/// Bits used for base points unless the config asks for more.
const POSITION_BITS: usize = 256;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// A number written either as a TOML number or as a decimal/fraction string.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    fn rational(&self, what: &str) -> Result<BigRational, ConfigError> {
        match self {
            Num::Int(v) => Ok(BigRational::from_integer((*v).into())),
            Num::Float(v) => parse_rational(&v.to_string()),
            Num::Text(s) => parse_rational(s),
        }
        .map_err(|e| bad(format!("{what}: {e}")))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub seed: u64,
    pub out: Option<String>,
    pub map: MapConfig,
    pub observable: ObservableConfig,
    pub analytic: Option<AnalyticConfig>,
    pub oracle: Option<OracleConfig>,
    pub simulate: Option<SimulateConfig>,
    pub tails: Option<TailsConfig>,
    pub qselect: Option<QSelectConfig>,
    pub induced: Option<InducedConfig>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapConfig {
    AffineMod1 { slope: i64 },
    Lsv { alpha: f64 },
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    pub base_point: Option<String>,
    pub period: Option<u64>,
    #[serde(default = "yes")]
    pub correlated: bool,
    pub separation: Option<f64>,
    #[serde(default)]
    pub base_value: f64,
    pub precision: Option<usize>,
    pub points: Vec<PointConfig>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    /// `"auto"` or a position string.
    #[serde(default = "auto")]
    pub xi: String,
    #[serde(default)]
    pub m: u64,
    pub shape: ShapeConfig,
    pub density: Option<Num>,
    /// Own base point and period, uncorrelated observables only.
    pub base_point: Option<String>,
    pub period: Option<u64>,
}

fn auto() -> String {
    "auto".into()
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    Neglog,
    /// `h(d) = d^-p`.
    Powerlaw { p: Num },
    /// `h(d) = D - d^g`.
    Bounded { d: Num, g: Num },
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnalyticConfig {
    pub q: Option<u64>,
    pub k_max: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub levels: Vec<f64>,
    pub q: Option<u64>,
    pub k_max: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub n: u64,
    pub tau: Option<f64>,
    pub level: Option<f64>,
    #[serde(default = "one")]
    pub orbits: usize,
    pub q: Option<u64>,
    pub burn_in: Option<u64>,
    /// `none`, `first` or `all`.
    #[serde(default = "first")]
    pub series: String,
    /// Run orbits on one thread.
    #[serde(default)]
    pub sequential: bool,
}

fn one() -> usize {
    1
}

fn first() -> String {
    "first".into()
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TailsConfig {
    pub probes: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QSelectConfig {
    pub horizons: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InducedConfig {
    /// Return set `[y_lo, y_hi)`; `y_hi = "1"` closes at the right end.
    pub y_lo: String,
    pub y_hi: String,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        toml::from_str(text).map_err(|e| bad(e.to_string()))
    }

    /// Canonical text used for hashing; reflects command-line overrides.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn build_map(&self) -> Result<PiecewiseMap, ConfigError> {
        let m = match self.map {
            MapConfig::AffineMod1 { slope } => PiecewiseMap::affine_mod1(slope),
            MapConfig::Lsv { alpha } => PiecewiseMap::lsv(alpha),
        };
        m.map_err(|e| bad(format!("map: {e}")))
    }

    pub fn build_spec(&self, map: &PiecewiseMap) -> Result<ObservableSpec, ConfigError> {
        let o = &self.observable;
        let bits = o.precision.unwrap_or(POSITION_BITS).max(DEFAULT_PRECISION);
        let pos = |s: &str, what: &str| Position::parse(s, bits).map_err(|e| bad(format!("{what}: {e}")));
        let mut points = Vec::with_capacity(o.points.len());
        for (i, p) in o.points.iter().enumerate() {
            let what = format!("observable.points[{i}]");
            let shape = match &p.shape {
                ShapeConfig::Neglog => Ok(ShapeFn::NegLog),
                ShapeConfig::Powerlaw { p } => ShapeFn::power_law(p.rational(&what)?),
                ShapeConfig::Bounded { d, g } => ShapeFn::bounded_power(d.rational(&what)?, g.rational(&what)?),
            }
            .map_err(|e| bad(format!("{what}: {e}")))?;
            let mut ps = PointSpec::new(p.m, shape);
            if p.xi != "auto" {
                ps = ps.at(pos(&p.xi, &what)?);
            }
            if let Some(d) = &p.density {
                ps = ps.with_density(d.rational(&what)?);
            }
            match (&p.base_point, o.correlated) {
                (Some(b), false) => ps = ps.based_at(pos(b, &what)?, p.period),
                (None, false) if p.xi != "auto" => {}
                (None, false) => return Err(bad(format!("{what}: uncorrelated points need base_point or xi"))),
                (Some(_), true) => return Err(bad(format!("{what}: base_point belongs on [observable] when correlated"))),
                (None, true) if p.period.is_some() => {
                    return Err(bad(format!("{what}: period belongs on [observable] when correlated")))
                }
                (None, true) => {}
            }
            points.push(ps);
        }
        let spec = if o.correlated {
            let base = o.base_point.as_deref().ok_or_else(|| bad("observable.base_point is required"))?;
            ObservableSpec::correlated(map, pos(base, "observable.base_point")?, o.period, points, o.separation, o.base_value)
        } else {
            if o.base_point.is_some() || o.period.is_some() {
                return Err(bad("uncorrelated observables take base points per point"));
            }
            ObservableSpec::uncorrelated(map, points, o.separation, o.base_value)
        };
        spec.map_err(|e| bad(format!("observable: {e}")))
    }

    pub fn plan(&self) -> Result<ExperimentPlan, ConfigError> {
        let s = self.simulate.as_ref().ok_or_else(|| bad("missing [simulate] table"))?;
        let level = match (s.tau, s.level) {
            (Some(t), None) => Level::Tau(t),
            (None, Some(u)) => Level::Value(u),
            _ => return Err(bad("simulate: give exactly one of tau and level")),
        };
        let mut plan = ExperimentPlan::new(s.n, level, s.orbits, self.seed);
        plan.q = s.q;
        plan.burn_in = s.burn_in;
        plan.series = match s.series.as_str() {
            "none" => SeriesMode::None,
            "first" => SeriesMode::FirstOrbit,
            "all" => SeriesMode::AllOrbits,
            other => return Err(bad(format!("simulate.series: unknown mode {other:?}"))),
        };
        plan.validate().map_err(|e| bad(format!("simulate: {e}")))?;
        Ok(plan)
    }

    pub fn return_set(&self) -> Result<CircleArc, ConfigError> {
        let y = self.induced.as_ref().ok_or_else(|| bad("missing [induced] table"))?;
        let end = |s: &str| -> Result<Real, ConfigError> {
            let p = Position::parse(s, DEFAULT_PRECISION).map_err(|e| bad(format!("induced: {e}")))?;
            Ok(p.value().mod_one())
        };
        CircleArc::new(end(&y.y_lo)?, end(&y.y_hi)?).map_err(|e| bad(format!("induced: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
seed = 1
[map]
kind = "affine_mod1"
slope = 2
[observable]
base_point = "1/31"
period = 5
[[observable.points]]
m = 0
shape = { kind = "neglog" }
[[observable.points]]
m = 1
shape = { kind = "powerlaw", p = "1/2" }
"#;

    #[test]
    fn parses_and_builds() {
        let c = Config::parse(BASE).unwrap();
        let f = c.build_map().unwrap();
        let spec = c.build_spec(&f).unwrap();
        assert_eq!(spec.points().len(), 2);
        assert_eq!(Config::parse(&c.canonical()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = BASE.replace("seed = 1", "seed = 1\ncolour = 3");
        assert!(Config::parse(&text).is_err());
        let text = BASE.replace("slope = 2", "slope = 2\nwidth = 1");
        assert!(Config::parse(&text).is_err());
    }

    #[test]
    fn wrong_period_rejected() {
        let c = Config::parse(&BASE.replace("period = 5", "period = 4")).unwrap();
        assert!(c.build_spec(&c.build_map().unwrap()).is_err());
    }

    #[test]
    fn simulate_needs_one_level() {
        let text = format!("{BASE}[simulate]\nn = 10\ntau = 1.0\nlevel = 3.0\n");
        let c = Config::parse(&text).unwrap();
        assert!(c.plan().is_err());
    }
}
