//! Orbit sampling, per-orbit RNG streams and induced first returns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::digits::{DigitOrbit, DEFAULT_WINDOW};
use super::map::{MapKind, PiecewiseMap};
use crate::error::{EvtError, Result};
use crate::interval_algebra::CircleArc;

/// Burn-in steps for orbits that are not exactly stationary.
pub const LSV_BURN_IN: u64 = 1_000;

/// Default step budget for first-return searches.
pub const RETURN_BUDGET: u64 = 1_000_000_000;

/// Independent generator for orbit `index` under `master` seed.
pub fn orbit_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// A stationary orbit source: exact digit shifts for `k x mod 1`, double
/// precision iteration otherwise.
#[derive(Clone, Debug)]
pub enum Orbit {
    Digits(DigitOrbit),
    Float { map: PiecewiseMap, x: f64 },
}

impl Orbit {
    pub fn start(map: &PiecewiseMap, mut rng: ChaCha8Rng, burn_in: Option<u64>) -> Result<Self> {
        match map.kind() {
            MapKind::AffineMod1 { slope } => {
                let mut o = DigitOrbit::new(*slope as u32, DEFAULT_WINDOW, rng);
                for _ in 0..burn_in.unwrap_or(0) {
                    o.advance();
                }
                Ok(Orbit::Digits(o))
            }
            MapKind::Lsv { .. } => {
                let mut x: f64 = rng.gen_range(f64::EPSILON..1.0);
                for _ in 0..burn_in.unwrap_or(LSV_BURN_IN) {
                    x = map.apply_f64(x);
                }
                Ok(Orbit::Float { map: map.clone(), x })
            }
            MapKind::PiecewiseAffine => Err(EvtError::Unsupported(
                "orbit sampling needs affine_mod1 (exact digit shift) or lsv".into(),
            )),
        }
    }

    pub fn position_f64(&self) -> f64 {
        match self {
            Orbit::Digits(o) => o.position_f64(),
            Orbit::Float { x, .. } => *x,
        }
    }

    pub fn advance(&mut self) {
        match self {
            Orbit::Digits(o) => o.advance(),
            Orbit::Float { map, x } => *x = map.apply_f64(*x),
        }
    }
}

/// `length` consecutive orbit positions starting from a random point.
pub fn sample_orbit(map: &PiecewiseMap, length: usize, seed: u64) -> Result<Vec<f64>> {
    if length == 0 {
        return Err(EvtError::invalid("orbit length must be at least 1"));
    }
    let mut o = Orbit::start(map, orbit_rng(seed, 0), None)?;
    let mut out = Vec::with_capacity(length);
    for _ in 0..length {
        out.push(o.position_f64());
        o.advance();
    }
    Ok(out)
}

/// First return of `x ∈ Y` to `Y`: `(f^r(x), r)`.
pub fn induced_first_return(map: &PiecewiseMap, y: &CircleArc, x: f64, budget: u64) -> Result<(f64, u64)> {
    if !y.contains_f64(x) {
        return Err(EvtError::invalid(format!("start point {x} is not in the return set")));
    }
    let mut cur = x;
    for r in 1..=budget {
        cur = map.apply_f64(cur);
        if y.contains_f64(cur) {
            return Ok((cur, r));
        }
    }
    Err(EvtError::ReturnTimeout { budget })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let f = PiecewiseMap::affine_mod1(3).unwrap();
        assert_eq!(sample_orbit(&f, 500, 9).unwrap(), sample_orbit(&f, 500, 9).unwrap());
        assert_ne!(sample_orbit(&f, 500, 9).unwrap(), sample_orbit(&f, 500, 10).unwrap());
    }

    #[test]
    fn doubling_is_lebesgue_stationary() {
        let f = PiecewiseMap::affine_mod1(2).unwrap();
        let xs = sample_orbit(&f, 1_000_000, 2024).unwrap();
        let frac = xs.iter().filter(|&&x| x < 0.5).count() as f64 / xs.len() as f64;
        assert!((frac - 0.5).abs() < 3.0 * 0.5 / 1000.0, "frac = {frac}");
    }

    #[test]
    fn occupation_of_random_arcs() {
        let f = PiecewiseMap::affine_mod1(3).unwrap();
        let n = 200_000;
        let mut ok = 0;
        let trials = 100;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
            let lo: f64 = rng.gen();
            let len: f64 = rng.gen_range(0.01..0.5);
            let arc = CircleArc::from_f64(lo, (lo + len) % 1.0, 64).unwrap();
            let xs = sample_orbit(&f, n, seed).unwrap();
            let freq = xs.iter().filter(|&&x| arc.contains_f64(x)).count() as f64 / n as f64;
            if (freq - len).abs() <= 4.0 * (len / n as f64).sqrt() {
                ok += 1;
            }
        }
        assert!(ok >= 99, "{ok} of {trials} seeds inside the band");
    }

    #[test]
    fn first_returns() {
        let f = PiecewiseMap::affine_mod1(2).unwrap();
        let upper = CircleArc::from_f64(0.5, 0.0, 64).unwrap();
        let (p, r) = induced_first_return(&f, &upper, 0.9, RETURN_BUDGET).unwrap();
        assert!((p - 0.8).abs() < 1e-15 && r == 1);
        assert_eq!(induced_first_return(&f, &CircleArc::full(64), 0.3, 10).unwrap().1, 1);

        let lsv = PiecewiseMap::lsv(0.4).unwrap();
        assert_eq!(induced_first_return(&lsv, &upper, 0.8, 10).unwrap().1, 1);
        assert!(matches!(
            induced_first_return(&lsv, &upper, 0.5 + 1e-12, 3),
            Err(EvtError::ReturnTimeout { .. })
        ));
    }

    #[test]
    fn lsv_kac_consistency() {
        // Mean return time to Y times the empirical measure of Y is about 1.
        let lsv = PiecewiseMap::lsv(0.4).unwrap();
        let xs = sample_orbit(&lsv, 2_000_000, 5).unwrap();
        let in_y: Vec<usize> = xs.iter().enumerate().filter(|(_, &x)| x >= 0.5).map(|(i, _)| i).collect();
        let mu_y = in_y.len() as f64 / xs.len() as f64;
        let mean_r = (in_y[in_y.len() - 1] - in_y[0]) as f64 / (in_y.len() - 1) as f64;
        assert!((mean_r * mu_y - 1.0).abs() < 0.1, "{}", mean_r * mu_y);
    }
}
