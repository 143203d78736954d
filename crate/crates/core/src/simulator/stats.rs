//! Pooled cluster statistics and goodness-of-fit helpers.

use super::clusters::Cluster;

/// 1% critical value of the one-sample Kolmogorov-Smirnov statistic, times
/// `sqrt(m)`.
pub const KS_CRITICAL_1PCT: f64 = 1.628;

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterStats {
    pub level: f64,
    pub horizon: u64,
    pub orbits: usize,
    pub q: u64,
    pub exceedances: usize,
    pub clusters: usize,
    pub theta_hat: f64,
    pub theta_se: f64,
    /// `pi_hat[k - 1]` is the share of clusters of size `k`.
    pub pi_hat: Vec<f64>,
    pub pi_se: Vec<f64>,
    pub mean_cluster_size: f64,
    /// Exceedances per orbit step, the empirical `mu(U)`.
    pub rate: f64,
    pub gaps: Vec<f64>,
    pub ks_stat: f64,
    pub ks_critical: f64,
    pub evl_hat: f64,
    pub evl_se: f64,
    /// `exp(-theta_hat * mean exceedances per orbit)`.
    pub evl_pred: f64,
}

impl ClusterStats {
    pub fn theta_ci(&self) -> (f64, f64) {
        (self.theta_hat - 1.96 * self.theta_se, self.theta_hat + 1.96 * self.theta_se)
    }

    pub fn pi(&self, k: usize) -> f64 {
        self.pi_hat.get(k.wrapping_sub(1)).copied().unwrap_or(0.0)
    }
}

/// Pools clusters from `orbits` independent orbits of length `horizon`.
/// `clusters` must be ordered by orbit, then time.
pub fn cluster_stats(clusters: &[Cluster], level: f64, horizon: u64, orbits: usize, q: u64) -> ClusterStats {
    let exceedances: usize = clusters.iter().map(Cluster::size).sum();
    let c = clusters.len();
    let theta_hat = if exceedances > 0 { c as f64 / exceedances as f64 } else { f64::NAN };
    let theta_se = if exceedances > 0 { (theta_hat * (1.0 - theta_hat) / exceedances as f64).sqrt() } else { f64::NAN };

    let max_size = clusters.iter().map(Cluster::size).max().unwrap_or(0);
    let mut counts = vec![0usize; max_size];
    for cl in clusters {
        counts[cl.size() - 1] += 1;
    }
    let pi_hat: Vec<f64> = counts.iter().map(|&k| k as f64 / c as f64).collect();
    let pi_se = pi_hat.iter().map(|&p| (p * (1.0 - p) / c as f64).sqrt()).collect();
    let mean_cluster_size = if c > 0 { exceedances as f64 / c as f64 } else { f64::NAN };

    let rate = exceedances as f64 / (orbits as f64 * horizon as f64);
    let half = horizon / 2;
    let mut gaps = Vec::new();
    for w in clusters.windows(2) {
        if w[0].orbit == w[1].orbit && w[0].start < half {
            gaps.push((w[1].start - w[0].start) as f64 * rate);
        }
    }
    let ks_stat = ks_exponential(&gaps, theta_hat);
    let ks_critical = if gaps.is_empty() { f64::NAN } else { KS_CRITICAL_1PCT / (gaps.len() as f64).sqrt() };

    let mut hit = vec![false; orbits];
    for cl in clusters {
        hit[cl.orbit] = true;
    }
    let empty = hit.iter().filter(|h| !**h).count();
    let evl_hat = empty as f64 / orbits as f64;
    let evl_se = (evl_hat * (1.0 - evl_hat) / orbits as f64).sqrt();
    let evl_pred = (-theta_hat * exceedances as f64 / orbits as f64).exp();

    ClusterStats {
        level,
        horizon,
        orbits,
        q,
        exceedances,
        clusters: c,
        theta_hat,
        theta_se,
        pi_hat,
        pi_se,
        mean_cluster_size,
        rate,
        gaps,
        ks_stat,
        ks_critical,
        evl_hat,
        evl_se,
        evl_pred,
    }
}

/// Kolmogorov-Smirnov distance between the sample and `Exp(rate)`.
pub fn ks_exponential(sample: &[f64], rate: f64) -> f64 {
    if sample.is_empty() {
        return f64::NAN;
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-rate * x).exp();
            (f - i as f64 / m).max((i + 1) as f64 / m - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::NAN;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Total variation distance between two histograms indexed from size 1.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    0.5 * (0..n)
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}
