//! CSV and JSON renderings of simulation output. Floats use the shortest
//! round-trip representation so files can be re-parsed exactly.

use std::fmt::Write;

use serde_json::{json, Value};

use super::clusters::{Cluster, ExceedanceRecord};
use super::run::SeriesRow;
use super::stats::ClusterStats;

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

pub fn stats_json(s: &ClusterStats) -> Value {
    let (lo, hi) = s.theta_ci();
    json!({
        "level": num(s.level),
        "horizon": s.horizon,
        "orbits": s.orbits,
        "q": s.q,
        "exceedances": s.exceedances,
        "clusters": s.clusters,
        "theta_hat": num(s.theta_hat),
        "theta_se": num(s.theta_se),
        "ci": [num(lo), num(hi)],
        "pi_hat": s.pi_hat.iter().enumerate().map(|(k, p)| json!({
            "k": k + 1,
            "p": num(*p),
            "se": num(s.pi_se[k]),
        })).collect::<Vec<_>>(),
        "mean_cluster_size": num(s.mean_cluster_size),
        "rate": num(s.rate),
        "gap_count": s.gaps.len(),
        "ks_stat": num(s.ks_stat),
        "ks_critical_1pct": num(s.ks_critical),
        "evl_hat": num(s.evl_hat),
        "evl_se": num(s.evl_se),
        "evl_pred": num(s.evl_pred),
    })
}

pub fn series_csv(rows: &[SeriesRow]) -> String {
    let mut out = String::from("orbit,t,x,phi,exceed,hit_point\n");
    for r in rows {
        let hit = r.hit.map(|h| (h + 1).to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{},{}", r.orbit, r.t, r.x, r.phi, u8::from(r.hit.is_some()), hit);
    }
    out
}

pub fn exceedances_csv(records: &[ExceedanceRecord]) -> String {
    let mut out = String::from("orbit,t,value,hit_point\n");
    for r in records {
        let _ = writeln!(out, "{},{},{},{}", r.orbit, r.t, r.value, r.hit + 1);
    }
    out
}

pub fn clusters_csv(clusters: &[Cluster]) -> String {
    let mut out = String::from("cluster_id,orbit,start,size,pattern\n");
    for (id, c) in clusters.iter().enumerate() {
        let pattern = c.pattern().map(|p| p.as_str()).unwrap_or("single");
        let _ = writeln!(out, "{},{},{},{},{}", id, c.orbit, c.start, c.size(), pattern);
    }
    out
}
