//! Simulation library for gated quantum spin Hall devices driven as
//! detector-based quantum computers: tight-binding device Hamiltonians,
//! sparse interior eigensolvers, edge-state observables, a bosonized
//! gate library with vacuum correlators, a qubit-field-qubit channel
//! engine, and closed-form design-constraint calculators.

pub mod bhz;
pub mod constants;
pub mod gates;
pub mod maps;
pub mod quad;
pub mod sparse;
pub mod spectra;

pub use bhz::{BhzParams, Boundary, DeviceGeometry, GateRegion, LocalField, SparseHamiltonian};
pub use sparse::CsrMatrix;
pub use spectra::{EigenPair, SpectralWindow};
