use thiserror::Error;

use crate::phase_grid::Representation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {what}")]
    IndexOutOfRange { what: &'static str, index: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expected a field in {expected:?} representation, got {found:?}")]
    WrongRepresentation {
        expected: &'static [Representation],
        found: Representation,
    },

    #[error("invalid wavepacket: {0}")]
    InvalidWavepacket(String),

    #[error("spinor field has zero norm")]
    ZeroNorm,

    #[error("degenerate Majorana construction: the {0} combination vanishes")]
    DegenerateMajorana(&'static str),

    #[error("theta extent {theta_extent} exceeds twice the x extent {x_extent}")]
    ShiftOutOfDomain { theta_extent: f64, x_extent: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("not a Spin+(1,3) rotor: membership residue {residue:e}")]
    InvalidRotor { residue: f64 },

    #[error("matrix is not a vector in the gamma basis: residue {residue:e}")]
    NotAVector { residue: f64 },

    #[error("singular Foldy-Wouthuysen frame (E_p + m = {0:e})")]
    SingularFrame(f64),

    #[error("invalid propagator configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical abort at step {step} (t = {time}): {reason}; max |Q| = {max_magnitude:e}")]
    NumericalAbort {
        step: usize,
        time: f64,
        max_magnitude: f64,
        reason: String,
    },

    #[error("threshold {0} lies outside the x grid")]
    ThresholdOutsideGrid(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
