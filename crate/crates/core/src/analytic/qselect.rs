//! Choice of the co-recurrence lag `q` and first-return diagnostics.

use std::fmt;

use crate::dynamics::map::PiecewiseMap;
use crate::error::Result;
use crate::interval_algebra::ArcSet;
use crate::observables::ObservableSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QRationale {
    /// `m_N - m_1` for a non-periodic base point.
    NonPeriodic(u64),
    /// Prime period of the base point.
    Periodic(u64),
    /// Largest period among uncorrelated points, or 0.
    Uncorrelated(u64),
}

impl fmt::Display for QRationale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QRationale::NonPeriodic(v) => write!(f, "non-periodic: m_N - m_1 = {v}"),
            QRationale::Periodic(v) => write!(f, "periodic: p = {v}"),
            QRationale::Uncorrelated(v) => write!(f, "uncorrelated: q = {v}"),
        }
    }
}

/// `R(A_j(u))` for `j = 0..=q` at one level. `None` means no return was
/// found within the step cap.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnRow {
    pub horizon: f64,
    pub level: f64,
    pub return_times: Vec<Option<u64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QSelection {
    pub q: u64,
    pub rationale: QRationale,
    pub rows: Vec<ReturnRow>,
    /// `R(A_q)` strictly increases down the rows.
    pub increasing: bool,
}

/// Horizons whose levels (at `tau = 1`) feed the return-time table.
pub const DEFAULT_HORIZONS: [f64; 3] = [1e2, 1e4, 1e6];

/// Step cap for forward images.
pub const RETURN_CAP: u64 = 4096;

pub fn default_q(spec: &ObservableSpec) -> u64 {
    rationale(spec).value()
}

impl QRationale {
    pub fn value(&self) -> u64 {
        match *self {
            QRationale::NonPeriodic(v) | QRationale::Periodic(v) | QRationale::Uncorrelated(v) => v,
        }
    }
}

fn rationale(spec: &ObservableSpec) -> QRationale {
    if !spec.is_correlated() {
        let q = spec.groups().iter().filter_map(|g| g.period).max().unwrap_or(0);
        return QRationale::Uncorrelated(q);
    }
    if let Some(p) = spec.groups()[0].period {
        return QRationale::Periodic(p);
    }
    let offs = spec.points().iter().map(|p| p.offset);
    let lo = offs.clone().min().unwrap_or(0);
    let hi = offs.max().unwrap_or(0);
    QRationale::NonPeriodic(hi - lo)
}

/// `A_j(u) = U ∩ f^-1(U^c) ∩ ... ∩ f^-j(U^c)`.
pub fn escape_set(u: &ArcSet, map: &PiecewiseMap, j: u64) -> Result<ArcSet> {
    let mut back = ArcSet::empty(u.precision());
    let mut pre = u.clone();
    for _ in 0..j {
        pre = pre.preimage(map)?;
        back = back.union(&pre);
    }
    Ok(u.difference(&back))
}

/// Smallest `t >= 1` with `f^t(A) ∩ A` non-empty, by forward images.
pub fn first_return_time(a: &ArcSet, map: &PiecewiseMap, cap: u64) -> Result<Option<u64>> {
    if a.is_empty() {
        return Ok(None);
    }
    let mut img = a.clone();
    for t in 1..=cap {
        img = img.image(map)?;
        if !img.intersect(a).is_empty() {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// `q` by case analysis plus the `R(A_j)` table at the default horizons.
pub fn select_q(spec: &ObservableSpec, map: &PiecewiseMap) -> Result<QSelection> {
    select_q_at(spec, map, &DEFAULT_HORIZONS)
}

pub fn select_q_at(spec: &ObservableSpec, map: &PiecewiseMap, horizons: &[f64]) -> Result<QSelection> {
    let rationale = rationale(spec);
    let q = rationale.value();
    let mut rows = Vec::with_capacity(horizons.len());
    for &n in horizons {
        let level = spec.solve_threshold(n, 1.0)?;
        let precision = spec.precision_for(level) + 2 * RETURN_CAP.min(256) as usize;
        let u = spec.exceedance_region_at(level, precision)?;
        let mut times = Vec::with_capacity(q as usize + 1);
        for j in 0..=q {
            let a = escape_set(&u, map, j)?;
            times.push(first_return_time(&a, map, RETURN_CAP)?);
        }
        rows.push(ReturnRow { horizon: n, level, return_times: times });
    }
    let last: Vec<Option<u64>> = rows.iter().map(|r| r.return_times[q as usize]).collect();
    let increasing = last.len() >= 2
        && last.windows(2).all(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => b > a,
            (Some(_), None) => true,
            _ => false,
        });
    Ok(QSelection { q, rationale, rows, increasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn lag_by_case() {
        let (f, spec) = presets::nonperiodic_sqrt2().unwrap();
        let s = select_q(&spec, &f).unwrap();
        assert_eq!(s.q, 3);
        assert_eq!(s.rationale, QRationale::NonPeriodic(3));
        assert!(s.increasing, "{:?}", s.rows);

        let (f, spec) = presets::periodic_1_31().unwrap();
        let s = select_q(&spec, &f).unwrap();
        assert_eq!(s.q, 5);
        assert!(s.increasing, "{:?}", s.rows);

        let (f, spec) = presets::typical_point(2).unwrap();
        let s = select_q(&spec, &f).unwrap();
        assert_eq!(s.q, 0);
        assert!(s.increasing, "{:?}", s.rows);

        let (_, spec) = presets::fixed_plus_typical().unwrap();
        assert_eq!(default_q(&spec), 1);
    }

    #[test]
    fn return_of_a_fixed_ball() {
        let (f, spec) = presets::fixed_point(2).unwrap();
        let u = spec.exceedance_region(10.0).unwrap();
        assert_eq!(first_return_time(&u, &f, 100).unwrap(), Some(1));
        let a = escape_set(&u, &f, 1).unwrap();
        // Points leaving the ball never come back before their images
        // cover a neighbourhood of 0 again.
        assert!(first_return_time(&a, &f, 100).unwrap().unwrap() > 5);
    }
}
