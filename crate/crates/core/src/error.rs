use thiserror::Error;

use crate::logic::{GateError, NetlistError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("unsupported junction `{node}`: degree {degree}, expected 4")]
    UnsupportedJunction { node: String, degree: usize },

    #[error("unknown region `{0}`")]
    UnknownRegion(String),

    #[error("site {0} out of range")]
    InvalidSite(usize),

    #[error("state has {state} spins but lattice has {lattice} sites")]
    StateMismatch { state: usize, lattice: usize },

    #[error("integrator unsupported: {0}")]
    IntegratorUnsupported(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("damped dynamics (alpha = {alpha}) cannot be run backwards")]
    IrreversibleConfiguration { alpha: f64 },

    #[error("no decay: damping_alpha must be positive to measure a relaxation time")]
    NoDecay,

    #[error("exponential fit failed: {0}")]
    FitFailed(String),

    #[error("invalid packet: {0}")]
    InvalidPacket(String),

    #[error("packet envelope clipped by arm boundary: {0}")]
    ClippedEnvelope(String),

    #[error("inconclusive measurement: {0}")]
    Inconclusive(String),

    #[error("selectivity undefined for T0 + Tpi = 0")]
    UndefinedSelectivity,

    #[error("ambiguous phase: correlation {correlation:.3} within threshold {threshold}")]
    AmbiguousPhase { correlation: f64, threshold: f64 },

    #[error("cannot calibrate shifter: {0}")]
    Uncalibratable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown sweep axis `{0}`")]
    UnknownAxis(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Netlist(#[from] NetlistError),

    #[error(transparent)]
    Gate(#[from] GateError),
}
