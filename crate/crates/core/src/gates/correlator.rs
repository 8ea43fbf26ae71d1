//! Vacuum correlators of smeared linear observables, evaluated by adaptive
//! quadrature of the spectral integral. The massless spectral weight |k|/2
//! has a kink at k = 0, so the real part of an equal-time correlator decays
//! only as 1/d^2 in the center separation d; the imaginary (commutator)
//! part is a sine transform of a smooth odd function and falls off as a
//! Gaussian, which is what keeps gates causal.

use super::{Chirality, FieldObservable, GateError, ObservableKind, SmearingProfile};
use crate::quad;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Absolute tolerance for one correlator entry.
const ABS_TOL: f64 = 1e-10;

/// Fourier transform of a Gaussian profile: exp(-i k x0 - k^2 sigma^2 / 2).
pub fn fourier_profile(p: &SmearingProfile) -> impl Fn(f64) -> Complex64 {
    let x0 = p.center;
    let s2 = p.sigma * p.sigma;
    move |k: f64| Complex64::from_polar((-0.5 * k * k * s2).exp(), -k * x0)
}

/// Which half-lines of k an observable kind lives on: (k < 0, k > 0).
fn mover_sides(kind: ObservableKind) -> Result<(bool, bool), GateError> {
    match kind {
        ObservableKind::Pi | ObservableKind::DPhi => Ok((true, true)),
        ObservableKind::PiChiral(Chirality::Right) => Ok((false, true)),
        ObservableKind::PiChiral(Chirality::Left) => Ok((true, false)),
        other => Err(GateError::UnsupportedObservable(other)),
    }
}

/// Unimodular mode factor u(k); the product u_1 u_2 |k|/2 is the spectral
/// kernel, e.g. -k/2 for a Pi-dPhi pair.
fn mode_sign(kind: ObservableKind, k: f64) -> f64 {
    match kind {
        ObservableKind::DPhi => -k.signum(),
        _ => 1.0,
    }
}

// Beyond the cutoff the remaining tail is below ABS_TOL / 100:
// |integrand| <= k exp(-k^2 S / 2) / 4pi with S = s1^2 + s2^2, whose tail
// integral from K is exp(-K^2 S / 2) / (4 pi S).
fn spectral_cutoff(p1: &SmearingProfile, p2: &SmearingProfile) -> f64 {
    let s = p1.sigma * p1.sigma + p2.sigma * p2.sigma;
    let arg = (4.0 * PI * s * (0.01 * ABS_TOL)).recip().max(std::f64::consts::E);
    (2.0 * arg.ln() / s).sqrt()
}

/// Vacuum two-point function W = <0| O1 O2 |0> of two linear observables
/// riding the same edge mode.
pub fn correlator(o1: &FieldObservable, o2: &FieldObservable) -> Result<Complex64, GateError> {
    let (neg1, pos1) = mover_sides(o1.kind)?;
    let (neg2, pos2) = mover_sides(o2.kind)?;
    if (o1.velocity - o2.velocity).abs() > 1e-12 * o1.velocity.max(o2.velocity) {
        return Err(GateError::VelocityMismatch { v1: o1.velocity, v2: o2.velocity });
    }

    let f1 = fourier_profile(&o1.smearing);
    let f2 = fourier_profile(&o2.smearing);
    let kind1 = o1.kind;
    let kind2 = o2.kind;
    let v = o1.velocity;
    let dt = o1.event_time - o2.event_time;
    let integrand = move |k: f64| {
        let kernel = mode_sign(kind1, k) * mode_sign(kind2, k) * k.abs() * 0.5;
        let phase = Complex64::from_polar(1.0, -v * k.abs() * dt);
        f1(k).conj() * f2(k) * phase * (kernel / (2.0 * PI))
    };

    // split at the spectral kink; a chirality mismatch leaves no support
    let k_max = spectral_cutoff(&o1.smearing, &o2.smearing);
    let mut w = Complex64::new(0.0, 0.0);
    if neg1 && neg2 {
        w += quad::integrate(&integrand, -k_max, 0.0, 0.5 * ABS_TOL)?;
    }
    if pos1 && pos2 {
        w += quad::integrate(&integrand, 0.0, k_max, 0.5 * ABS_TOL)?;
    }
    Ok(w)
}

/// Ordered-exponential phase -i <[O1, O2]> = 2 Im W(o1, o2).
pub fn commutator_phase(o1: &FieldObservable, o2: &FieldObservable) -> Result<f64, GateError> {
    Ok(2.0 * correlator(o1, o2)?.im)
}

/// Gram matrix W_ij = <0| O_i O_j |0> of a list of linear observables, kept
/// in the given order. Hermitian by construction; its real part is positive
/// semidefinite because the entries share one spectral measure.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorMatrix {
    w: DMatrix<Complex64>,
}

impl CorrelatorMatrix {
    /// Wrap a precomputed matrix, e.g. a discrete mode sum. The input must
    /// be Hermitian to within 1e-9 of its largest entry; the stored matrix
    /// is the Hermitian average.
    pub fn from_hermitian(w: DMatrix<Complex64>) -> Result<Self, GateError> {
        if w.nrows() != w.ncols() {
            return Err(GateError::NotSquare { rows: w.nrows(), cols: w.ncols() });
        }
        let scale = w.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let mut defect = 0.0f64;
        for i in 0..w.nrows() {
            for j in 0..w.ncols() {
                defect = defect.max((w[(i, j)] - w[(j, i)].conj()).norm());
            }
        }
        if defect > 1e-9 * scale.max(f64::MIN_POSITIVE) {
            return Err(GateError::NotHermitian { defect });
        }
        let sym = (&w + w.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self { w: sym })
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.w[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.w
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.w.map(|z| z.re)
    }
}

/// Correlator matrix of `observables` in operator-product order.
pub fn correlator_matrix(
    observables: &[FieldObservable],
) -> Result<CorrelatorMatrix, GateError> {
    let n = observables.len();
    let mut w = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in i..n {
            let mut wij = correlator(&observables[i], &observables[j])?;
            if i == j {
                // diagonal integrand is |f|^2 |k| / 2, real analytically
                wij = Complex64::new(wij.re, 0.0);
            }
            w[(i, j)] = wij;
            w[(j, i)] = wij.conj();
        }
    }
    Ok(CorrelatorMatrix { w })
}
