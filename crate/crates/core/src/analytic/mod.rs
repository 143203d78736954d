//! Closed-form extremal index, multiplicity and the finite-level oracle.

pub mod engine;
pub mod oracle;
pub mod qselect;
pub mod report;
pub mod scale;

pub use engine::{
    analytic_multiplicity, analytic_multiplicity_q, analytic_theta, analytic_theta_q, pullback_containment,
    theta_mixed_uncorrelated, theta_mixed_uncorrelated_exact, Containment, ContainmentEntry, EIResult,
    GeometricTail, GroupTheta, MultiplicityResult,
};
pub use oracle::{finite_n_sets, OracleTable};
pub use qselect::{default_q, select_q, select_q_at, QRationale, QSelection, ReturnRow};
pub use scale::{Decay, ScaleClass, ScaleSum};
