//! Classical spin-lattice simulator for magnonic cross-junction logic.
//!
//! The crate is layered bottom-up:
//!
//! * [`lattice`] holds the spin graph, the exchange + Zeeman energy and the
//!   per-site effective field.
//! * [`dynamics`] integrates the precession equation with an exactly
//!   norm-preserving, time-symmetric sublattice rotation scheme (and RK4 as a
//!   cross-check).
//! * [`excitation`] and [`scattering`] launch phase-encoded packets, measure
//!   arm energies and junction transmission.
//! * [`dispersion`] measures the spin-wave band and calibrates field-offset
//!   phase shifters.
//! * [`logic`] is the event-driven phase-logic engine for netlists of
//!   junctions and shifters; [`verify`] checks it against full spin runs.
//! * [`dissipation`] evaluates the energy-per-operation model.
//! * [`export`] writes the CSV formats used by the command line tool.

pub mod dispersion;
pub mod dissipation;
pub mod dynamics;
mod error;
pub mod excitation;
pub mod export;
pub mod lattice;
pub mod logic;
pub mod scattering;
pub mod vec3;
pub mod verify;

pub use error::{Error, Result};

/// Crate version, recorded in CSV metadata blocks.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
