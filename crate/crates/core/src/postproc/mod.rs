//! Quantities derived from a solved plate: stress resultants, through-thickness
//! kinematics, error norms and convergence rates, stress concentration around
//! holes, and file export.

pub mod export;
mod kinematics;
mod norms;
mod resultants;
mod scf;

pub use kinematics::{reconstruct, Kinematics, PointKinematics};
pub use norms::{
    convergence_study, difference_norms, error_norms, rates, self_convergence, ErrorNorms, ErrorReport, LevelError,
    MmsProblem, Norm,
};
pub use resultants::{constitutive, resultants, ElementResultants, ResultantField};
pub use scf::{
    bending_stress, nominal_stress, scf_study, stress_concentration, ScfCase, ScfError, ScfSetup, ScfStudy,
};
