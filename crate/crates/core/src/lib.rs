pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod interval_algebra;
pub mod observables;
pub mod presets;
pub mod real;
pub mod simulator;
pub mod tails;
