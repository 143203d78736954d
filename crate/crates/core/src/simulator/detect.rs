//! Ball membership at a fixed level with a high-precision fallback near
//! ball boundaries.

use crate::dynamics::digits::DigitOrbit;
use crate::dynamics::map::Domain;
use crate::error::Result;
use crate::observables::{circle_distance, ObservableSpec, ShapeFn};
use crate::real::Real;

/// Below this distance to a boundary (or a centre) the f64 position is not
/// trusted.
const FALLBACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Detector {
    domain: Domain,
    centers: Vec<f64>,
    radii: Vec<f64>,
    centers_hp: Vec<Real>,
    radii_hp: Vec<Real>,
    shapes: Vec<ShapeFn>,
    bits: usize,
}

fn distance_real(domain: Domain, a: &Real, b: &Real) -> Real {
    let d = (a - b).abs();
    match domain {
        Domain::Circle => Real::min(&d, &(&Real::one(d.precision()) - &d)),
        Domain::Interval => d,
    }
}

impl Detector {
    pub fn new(spec: &ObservableSpec, level: f64) -> Result<Self> {
        let bits = spec.precision_for(level);
        let radii_hp = spec.radii_real(level, bits)?;
        Ok(Detector {
            domain: spec.domain(),
            centers: spec.points().iter().map(|p| p.location.to_f64()).collect(),
            radii: spec.radii(level)?,
            centers_hp: spec.points().iter().map(|p| p.location.with_precision(bits).value().clone()).collect(),
            radii_hp,
            shapes: spec.points().iter().map(|p| p.shape.clone()).collect(),
            bits,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Ball hit by the point at `x` and the distance to its centre. `digits`
    /// supplies extra precision when `x` is too close to call.
    pub fn probe(&self, x: f64, mut digits: Option<&mut DigitOrbit>) -> Option<(usize, f64)> {
        for i in 0..self.centers.len() {
            let d = circle_distance(self.domain, x, self.centers[i]);
            let r = self.radii[i];
            if d >= r + FALLBACK {
                continue;
            }
            let close = (d - r).abs() < FALLBACK || d < FALLBACK;
            match (close, digits.as_deref_mut()) {
                (true, Some(o)) => {
                    let xr = o.position_hp(self.bits);
                    let dr = distance_real(self.domain, &xr, &self.centers_hp[i]);
                    if dr < self.radii_hp[i] {
                        return Some((i, dr.to_f64()));
                    }
                }
                _ => {
                    if d < r {
                        return Some((i, d));
                    }
                }
            }
        }
        None
    }

    /// `phi` at distance `d` from centre `i`.
    pub fn value(&self, i: usize, d: f64) -> f64 {
        if d == 0.0 {
            self.shapes[i].sup_value()
        } else {
            self.shapes[i].h(d)
        }
    }
}
