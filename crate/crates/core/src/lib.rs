//! Split-operator propagation of the 4×4 matrix-valued relativistic Wigner
//! function of the Dirac equation, with a position-dephasing dissipator.
//!
//! Natural units `ħ = c = 1` throughout; the charge is absorbed into the
//! potentials.

pub mod classical;
pub mod clifford;
pub mod error;
pub mod invariants;
pub mod observables;
pub mod phase_grid;
pub mod potential;
pub mod propagator;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double precision aliases.
pub type Matrix4f64 = clifford::Matrix4<f64>;
pub type PhaseGridF64 = phase_grid::PhaseGrid<f64>;
pub type PhaseFieldF64 = phase_grid::MatrixPhaseField<f64>;
pub type SpinorFieldF64 = states::SpinorField<f64>;
pub type PotentialF64 = potential::Potential<f64>;
pub type PropagatorF64 = propagator::Propagator<f64>;

/// Single precision aliases.
pub type PhaseGridF32 = phase_grid::PhaseGrid<f32>;
pub type PhaseFieldF32 = phase_grid::MatrixPhaseField<f32>;
pub type PropagatorF32 = propagator::Propagator<f32>;

