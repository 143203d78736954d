//! Runs declustering and within-cluster patterns.

use std::fmt;

use crate::error::{EvtError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExceedanceRecord {
    pub orbit: usize,
    pub t: u64,
    pub value: f64,
    /// Index of the maximal point whose ball was entered.
    pub hit: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    MonotoneDecreasing,
    AscendingStep,
    Other,
}

impl Pattern {
    pub fn as_str(&self) -> &'static str {
        match self {
            Pattern::MonotoneDecreasing => "monotone-decreasing",
            Pattern::AscendingStep => "ascending-step",
            Pattern::Other => "other",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub orbit: usize,
    pub start: u64,
    pub end: u64,
    pub values: Vec<f64>,
    pub hits: Vec<usize>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.values.len()
    }

    /// `None` for single exceedances.
    pub fn pattern(&self) -> Option<Pattern> {
        cluster_pattern(&self.values).ok()
    }
}

/// Splits time-sorted records into maximal runs whose consecutive gaps are
/// at most `q`. Runs never cross orbit boundaries.
pub fn extract_clusters(records: &[ExceedanceRecord], q: u64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for r in records {
        if let Some(c) = out.last_mut() {
            if c.orbit == r.orbit && r.t > c.end && r.t - c.end <= q {
                c.end = r.t;
                c.values.push(r.value);
                c.hits.push(r.hit);
                continue;
            }
        }
        out.push(Cluster { orbit: r.orbit, start: r.t, end: r.t, values: vec![r.value], hits: vec![r.hit] });
    }
    out
}

/// Shape of the value sequence inside a cluster of size at least 2.
pub fn cluster_pattern(values: &[f64]) -> Result<Pattern> {
    if values.len() < 2 {
        return Err(EvtError::invalid("cluster pattern needs at least two exceedances"));
    }
    let steps = values.windows(2);
    if steps.clone().all(|w| w[1] < w[0]) {
        Ok(Pattern::MonotoneDecreasing)
    } else if steps.clone().any(|w| w[1] > w[0]) {
        Ok(Pattern::AscendingStep)
    } else {
        Ok(Pattern::Other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(t: u64) -> ExceedanceRecord {
        ExceedanceRecord { orbit: 0, t, value: 1.0, hit: 0 }
    }

    #[test]
    fn gap_rule() {
        let rs: Vec<_> = [5, 6, 8].into_iter().map(rec).collect();
        let c = extract_clusters(&rs, 2);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].size(), 3);
        let c = extract_clusters(&rs, 1);
        assert_eq!(c.iter().map(Cluster::size).collect::<Vec<_>>(), vec![2, 1]);
        let c = extract_clusters(&rs, 0);
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn orbits_split_clusters() {
        let rs = vec![rec(5), ExceedanceRecord { orbit: 1, t: 6, value: 1.0, hit: 0 }];
        assert_eq!(extract_clusters(&rs, 3).len(), 2);
    }

    #[test]
    fn patterns() {
        assert_eq!(cluster_pattern(&[5.0, 4.0, 3.0]).unwrap(), Pattern::MonotoneDecreasing);
        assert_eq!(cluster_pattern(&[5.7, 6.9, 5.0]).unwrap(), Pattern::AscendingStep);
        assert_eq!(cluster_pattern(&[5.0, 5.0]).unwrap(), Pattern::Other);
        assert!(cluster_pattern(&[5.0]).is_err());
    }

    proptest! {
        #[test]
        fn bookkeeping(times in proptest::collection::btree_set(0u64..500, 0..60), q in 0u64..6) {
            let rs: Vec<_> = times.iter().copied().map(rec).collect();
            let cs = extract_clusters(&rs, q);
            prop_assert_eq!(cs.iter().map(Cluster::size).sum::<usize>(), rs.len());
            let ends = rs.windows(2).filter(|w| w[1].t - w[0].t > q).count() + usize::from(!rs.is_empty());
            prop_assert_eq!(cs.len(), ends);
        }
    }
}
