mod config;
mod output;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use evtlab_core::analytic::report::{multiplicity_json, oracle_json, qselect_json, theta_json};
use evtlab_core::analytic::{
    analytic_multiplicity_q, analytic_theta_q, default_q, finite_n_sets, select_q_at, qselect::DEFAULT_HORIZONS,
};
use evtlab_core::error::EvtError;
use evtlab_core::exec::Execution;
use evtlab_core::real::rational_string;
use evtlab_core::simulator::report::{clusters_csv, exceedances_csv, series_csv, stats_json};
use evtlab_core::simulator::{compare_induced_repp_with, run_experiment_with};
use evtlab_core::tails::tail_verdict;

use config::{Config, ConfigError, OracleConfig, SimulateConfig};
use output::{sha256_hex, OutDir};

const DEFAULT_K_MAX: usize = 12;
const DEFAULT_ORACLE_K: usize = 4;
const DEFAULT_PROBES: [f64; 2] = [1e2, 1e3];

#[derive(Parser)]
#[command(name = "evtlab", version, about = "Extremal index and cluster statistics for chaotic maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Experiment config (TOML).
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    orbits: Option<usize>,
    /// Report directory; defaults to `out` in the config, then `out/<command>`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<f64>>,
    #[arg(long = "k-max")]
    k_max: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact extremal index and cluster size distribution.
    Analytic(Common),
    /// Finite-level set-algebra values of theta_n and pi_n.
    Oracle(Common),
    /// Monte Carlo orbits, exceedances and clusters.
    Simulate(Common),
    /// Tail type of each maximum and the winner.
    Tails(Common),
    /// Run length q with its return-time table.
    Qselect(Common),
    /// Original map against its first-return map.
    Induced(Common),
}

enum Failure {
    Config(String),
    Core(EvtError),
    Io(std::io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<EvtError> for Failure {
    fn from(e: EvtError) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Config(_) | Failure::Io(_) => 1,
        Failure::Core(e) => match e {
            EvtError::Indeterminate { .. } => 2,
            EvtError::ArcBudget { .. } | EvtError::ReturnTimeout { .. } => 3,
            EvtError::LevelBelowRegime { .. } | EvtError::NoRoot(_) | EvtError::Singular { .. } => 4,
            _ => 1,
        },
    }
}

fn describe(f: &Failure) -> String {
    match f {
        Failure::Config(m) => format!("config error: {m}"),
        Failure::Core(e) => e.to_string(),
        Failure::Io(e) => format!("i/o error: {e}"),
    }
}

fn load(name: &str, c: &Common) -> Result<(Config, PathBuf), Failure> {
    let text = std::fs::read_to_string(&c.config)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", c.config.display())))?;
    let mut cfg = Config::parse(&text)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(m) = c.orbits {
        match cfg.simulate.as_mut() {
            Some(s) => s.orbits = m,
            None => return Err(Failure::Config("--orbits needs a [simulate] table".into())),
        }
    }
    if let Some(levels) = &c.levels {
        let o = cfg.oracle.get_or_insert(OracleConfig { levels: Vec::new(), q: None, k_max: None });
        o.levels = levels.clone();
    }
    if let Some(k) = c.k_max {
        match name {
            "oracle" => {
                let o = cfg.oracle.get_or_insert(OracleConfig { levels: Vec::new(), q: None, k_max: None });
                o.k_max = Some(k);
            }
            _ => cfg.analytic.get_or_insert(config::AnalyticConfig { q: None, k_max: None }).k_max = Some(k),
        }
    }
    let out = c
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("out").join(name));
    Ok((cfg, out))
}

fn run(name: &str, c: &Common) -> Result<(), Failure> {
    let (cfg, out) = load(name, c)?;
    let map = cfg.build_map()?;
    let spec = cfg.build_spec(&map)?;
    let hash = sha256_hex(cfg.canonical().as_bytes());
    let mut dir = OutDir::create(&out, name, &hash, cfg.seed)?;

    match name {
        "analytic" => {
            let a = cfg.analytic.clone().unwrap_or(config::AnalyticConfig { q: None, k_max: None });
            let q = a.q.unwrap_or_else(|| default_q(&spec));
            let k_max = a.k_max.unwrap_or(DEFAULT_K_MAX);
            let theta = analytic_theta_q(&spec, &map, q)?;
            let mult = analytic_multiplicity_q(&spec, &map, q, k_max)?;
            let mut table = format!("theta = {}  (q = {q})\n\n  k  pi(k)\n", rational_string(&theta.theta));
            for (k, p) in mult.pi.iter().enumerate() {
                let _ = writeln!(table, "{:>3}  {}", k + 1, rational_string(p));
            }
            for t in &mult.tails {
                let _ = writeln!(
                    table,
                    "tail: from k = {} the sequence repeats with period {} and ratio {}",
                    t.start,
                    t.period,
                    rational_string(&t.ratio)
                );
            }
            if let (Some(total), Some(mean)) = (&mult.total, &mult.mean) {
                let _ = writeln!(table, "sum = {}, mean size = {}", rational_string(total), rational_string(mean));
            }
            print!("{table}");
            dir.write_json("analytic.json", json!({ "theta": theta_json(&theta), "multiplicity": multiplicity_json(&mult) }))?;
            dir.write("analytic.txt", &table)?;
        }
        "oracle" => {
            let o = cfg.oracle.clone().ok_or_else(|| Failure::Config("missing [oracle] table or --levels".into()))?;
            if o.levels.is_empty() {
                return Err(Failure::Config("oracle needs at least one level".into()));
            }
            let q = o.q.unwrap_or_else(|| default_q(&spec));
            let k = o.k_max.unwrap_or(DEFAULT_ORACLE_K);
            let rows = o
                .levels
                .iter()
                .map(|&u| finite_n_sets(&spec, &map, u, q, k))
                .collect::<Result<Vec<_>, _>>()?;
            let mut csv = String::from("level,q,mu_u,theta_n");
            for j in 1..=k {
                let _ = write!(csv, ",pi_{j}");
            }
            csv.push('\n');
            for r in &rows {
                let _ = write!(csv, "{},{},{},{}", r.level, r.q, r.mu_u, r.theta_n);
                for p in &r.pi_n {
                    let _ = write!(csv, ",{p}");
                }
                csv.push('\n');
            }
            print!("{csv}");
            dir.write_json("oracle.json", json!({ "rows": oracle_json(&rows) }))?;
            dir.write("oracle.csv", &csv)?;
        }
        "simulate" => {
            let plan = cfg.plan()?;
            let exec = execution(cfg.simulate.as_ref());
            let o = run_experiment_with(&map, &spec, &plan, exec)?;
            println!(
                "u = {}, q = {}, {} exceedances in {} clusters, theta_hat = {:.4}",
                o.level, o.q, o.stats.exceedances, o.stats.clusters, o.stats.theta_hat
            );
            dir.write("series.csv", &series_csv(&o.series))?;
            dir.write("exceedances.csv", &exceedances_csv(&o.exceedances))?;
            dir.write("clusters.csv", &clusters_csv(&o.clusters))?;
            dir.write_json("stats.json", json!({ "stats": stats_json(&o.stats) }))?;
        }
        "tails" => {
            let probes = cfg.tails.as_ref().map(|t| t.probes.clone()).unwrap_or_else(|| DEFAULT_PROBES.to_vec());
            let v = tail_verdict(&spec, &probes)?;
            println!("winner: {}, largest ratio deviation {:.3e}", v.winner, v.check.max_deviation);
            dir.write_json("tails.json", json!({ "tails": v.to_json() }))?;
        }
        "qselect" => {
            let horizons = cfg.qselect.as_ref().map(|c| c.horizons.clone()).unwrap_or_else(|| DEFAULT_HORIZONS.to_vec());
            let s = select_q_at(&spec, &map, &horizons)?;
            let mut table = format!("q = {} ({})\n\n{:>10}  {:>12}", s.q, s.rationale, "n", "u_n");
            let width = s.rows.first().map_or(0, |r| r.return_times.len());
            for j in 0..width {
                let _ = write!(table, "  {:>6}", format!("R(A_{j})"));
            }
            table.push('\n');
            for r in &s.rows {
                let _ = write!(table, "{:>10}  {:>12.6}", r.horizon, r.level);
                for v in &r.return_times {
                    let _ = write!(table, "  {:>6}", v.map_or("-".into(), |v| v.to_string()));
                }
                table.push('\n');
            }
            let _ = writeln!(table, "R(A_q) increasing: {}", s.increasing);
            print!("{table}");
            dir.write_json("qselect.json", json!({ "qselect": qselect_json(&s) }))?;
            dir.write("qselect.txt", &table)?;
        }
        "induced" => {
            let plan = cfg.plan()?;
            let y = cfg.return_set()?;
            let exec = execution(cfg.simulate.as_ref());
            let r = compare_induced_repp_with(&map, &y, &spec, &plan, exec)?;
            println!(
                "theta_hat {:.4} vs {:.4}, TV(pi) = {:.4}, KS(gaps) = {:.4}",
                r.original.theta_hat, r.induced.theta_hat, r.divergence.tv_pi, r.divergence.ks_gaps
            );
            dir.write_json(
                "induced.json",
                json!({
                    "level": r.level,
                    "original": stats_json(&r.original),
                    "induced": stats_json(&r.induced),
                    "divergence": {
                        "theta_gap": r.divergence.theta_gap,
                        "tv_pi": r.divergence.tv_pi,
                        "ks_gaps": if r.divergence.ks_gaps.is_finite() { json!(r.divergence.ks_gaps) } else { json!("NaN") },
                    },
                }),
            )?;
        }
        _ => unreachable!(),
    }
    eprintln!("wrote {} (config sha256 {}, seed {})", out.display(), &dir.meta()["config_sha256"], cfg.seed);
    dir.finish()?;
    Ok(())
}

fn execution(s: Option<&SimulateConfig>) -> Execution {
    if s.is_some_and(|s| s.sequential) {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Analytic(c) => ("analytic", c),
        Command::Oracle(c) => ("oracle", c),
        Command::Simulate(c) => ("simulate", c),
        Command::Tails(c) => ("tails", c),
        Command::Qselect(c) => ("qselect", c),
        Command::Induced(c) => ("induced", c),
    };
    match run(name, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("evtlab {name}: {}", describe(&f));
            ExitCode::from(exit_code(&f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let indet = EvtError::Indeterminate { i: 0, j: 1, detail: String::new() };
        assert_eq!(exit_code(&Failure::Core(indet)), 2);
        assert_eq!(exit_code(&Failure::Core(EvtError::ArcBudget { needed: 2, cap: 1 })), 3);
        assert_eq!(exit_code(&Failure::Core(EvtError::ReturnTimeout { budget: 1 })), 3);
        assert_eq!(exit_code(&Failure::Core(EvtError::LevelBelowRegime { level: 0.0, minimum: 1.0 })), 4);
        assert_eq!(exit_code(&Failure::Core(EvtError::NoRoot(String::new()))), 4);
        assert_eq!(exit_code(&Failure::Config(String::new())), 1);
        assert_eq!(exit_code(&Failure::Core(EvtError::Unsupported(String::new()))), 1);
    }
}
