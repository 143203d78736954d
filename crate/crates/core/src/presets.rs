//! Ready-made maps and observables used by tests, benches and the CLI.

use crate::dynamics::map::PiecewiseMap;
use crate::error::Result;
use crate::observables::{ObservableSpec, PointSpec, ShapeFn};
use crate::real::{parse_rational, Position};

/// Bits kept for irrational base points.
const BASE_BITS: usize = 256;

fn power(p: &str) -> ShapeFn {
    ShapeFn::power_law(parse_rational(p).expect("literal")).expect("positive exponent")
}

/// `2x mod 1`, base point `sqrt(2)/16`, radii `e^-u`, `u^-2`, `u^-2` at
/// offsets 0, 1, 3.
pub fn nonperiodic_sqrt2() -> Result<(PiecewiseMap, ObservableSpec)> {
    let f = PiecewiseMap::affine_mod1(2)?;
    let spec = ObservableSpec::correlated(
        &f,
        Position::parse("sqrt(2)/16", BASE_BITS)?,
        None,
        vec![
            PointSpec::new(0, ShapeFn::NegLog),
            PointSpec::new(1, power("1/2")),
            PointSpec::new(3, power("1/2")),
        ],
        None,
        0.0,
    )?;
    Ok((f, spec))
}

/// Same shapes on the period-5 orbit of `1/31` under `2x mod 1`.
pub fn periodic_1_31() -> Result<(PiecewiseMap, ObservableSpec)> {
    let f = PiecewiseMap::affine_mod1(2)?;
    let spec = ObservableSpec::correlated(
        &f,
        Position::parse("1/31", BASE_BITS)?,
        Some(5),
        vec![
            PointSpec::new(0, ShapeFn::NegLog),
            PointSpec::new(1, power("1/2")),
            PointSpec::new(3, power("1/2")),
        ],
        None,
        0.0,
    )?;
    Ok((f, spec))
}

/// `3x mod 1` with radius `e^-u` at `1/4` and `u^-3` at `3/4`.
pub fn pattern_3x() -> Result<(PiecewiseMap, ObservableSpec)> {
    let f = PiecewiseMap::affine_mod1(3)?;
    let spec = ObservableSpec::correlated(
        &f,
        Position::parse("1/4", BASE_BITS)?,
        Some(2),
        vec![PointSpec::new(0, ShapeFn::NegLog), PointSpec::new(1, power("1/3"))],
        None,
        0.0,
    )?;
    Ok((f, spec))
}

/// One `-log d` maximum at the fixed point 0 of `k x mod 1`.
pub fn fixed_point(k: i64) -> Result<(PiecewiseMap, ObservableSpec)> {
    let f = PiecewiseMap::affine_mod1(k)?;
    let spec = ObservableSpec::correlated(
        &f,
        Position::parse("0", BASE_BITS)?,
        Some(1),
        vec![PointSpec::new(0, ShapeFn::NegLog)],
        None,
        0.0,
    )?;
    Ok((f, spec))
}

/// One `-log d` maximum at a point with a dense orbit.
pub fn typical_point(k: i64) -> Result<(PiecewiseMap, ObservableSpec)> {
    let f = PiecewiseMap::affine_mod1(k)?;
    let spec = ObservableSpec::correlated(
        &f,
        Position::parse("sqrt(2)/4", BASE_BITS)?,
        None,
        vec![PointSpec::new(0, ShapeFn::NegLog)],
        None,
        0.0,
    )?;
    Ok((f, spec))
}

/// Two `-log d` maxima on unrelated orbits of `2x mod 1`.
pub fn two_typical() -> Result<(PiecewiseMap, ObservableSpec)> {
    let f = PiecewiseMap::affine_mod1(2)?;
    let spec = ObservableSpec::uncorrelated(
        &f,
        vec![
            PointSpec::new(0, ShapeFn::NegLog).based_at(Position::parse("sqrt(2)/4", BASE_BITS)?, None),
            PointSpec::new(0, ShapeFn::NegLog).based_at(Position::parse("sqrt(3)/2", BASE_BITS)?, None),
        ],
        None,
        0.0,
    )?;
    Ok((f, spec))
}

/// The fixed point 0 of `2x mod 1` plus a typical point, equal weights.
pub fn fixed_plus_typical() -> Result<(PiecewiseMap, ObservableSpec)> {
    let f = PiecewiseMap::affine_mod1(2)?;
    let spec = ObservableSpec::uncorrelated(
        &f,
        vec![
            PointSpec::new(0, ShapeFn::NegLog).based_at(Position::parse("0", BASE_BITS)?, Some(1)),
            PointSpec::new(0, ShapeFn::NegLog).based_at(Position::parse("sqrt(2)/4", BASE_BITS)?, None),
        ],
        None,
        0.0,
    )?;
    Ok((f, spec))
}
