//! Physical constants in the unit system used throughout: energies in eV,
//! lengths in nm, times in ns (fs where noted).

/// Reduced Planck constant in eV·fs.
pub const HBAR_EV_FS: f64 = 0.658212;

/// Reduced Planck constant in eV·ns.
pub const HBAR_EV_NS: f64 = 0.658212e-6;

/// Electron Zeeman energy over Boltzmann constant, K/T: tanh(0.672·B/T)
/// is the thermal spin polarization of a free electron.
pub const ZEEMAN_KELVIN_PER_TESLA: f64 = 0.672;

/// Free-electron spin resonance frequency per unit field, GHz/T.
pub const ESR_GHZ_PER_TESLA: f64 = 28.0;
