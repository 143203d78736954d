//! Maps, orbits and first returns.

pub mod digits;
pub mod map;
pub mod orbit;

pub use digits::DigitOrbit;
pub use map::{Branch, BranchLaw, DerivProduct, Domain, MapKind, PeriodicCheck, PiecewiseMap};
pub use orbit::{induced_first_return, orbit_rng, sample_orbit, Orbit, LSV_BURN_IN, RETURN_BUDGET};
