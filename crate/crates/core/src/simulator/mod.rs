//! Exceedance simulation, runs declustering and cluster statistics.

pub mod clusters;
pub mod detect;
pub mod induced;
pub mod run;
pub mod report;
pub mod stats;

pub use clusters::{cluster_pattern, extract_clusters, Cluster, ExceedanceRecord, Pattern};
pub use detect::Detector;
pub use induced::{compare_induced_repp, compare_induced_repp_with, divergence, run_induced, Divergence, InducedReport};
pub use run::{run_experiment, run_experiment_with, ExperimentOutput, ExperimentPlan, Level, SeriesMode, SeriesRow};
pub use stats::{cluster_stats, ks_exponential, ks_two_sample, total_variation, ClusterStats, KS_CRITICAL_1PCT};
