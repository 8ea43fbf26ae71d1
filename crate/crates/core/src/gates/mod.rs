//! Bosonized gate library: smeared linear observables of a massless 1+1D
//! boson field, their vacuum correlators, and expectation values of
//! ordered products of exponentiated observables (Weyl factors).
//!
//! Positions and smearing widths are in nm, times in ns, velocities in
//! nm/ns. Smearing profiles are normalized Gaussians with Fourier
//! transform f(k) = exp(-i k x0 - k^2 sigma^2 / 2), so f(0) = 1. Vacuum
//! two-point functions are spectral integrals over the mode momentum,
//!
//!   W_ij = integral dk/2pi  u_i(k) u_j(k) (|k|/2) f_i(k)* f_j(k)
//!          exp(-i v |k| (t_i - t_j)),
//!
//! with u = 1 for momentum-density and chiral kinds and u = -sign(k) for
//! the gradient kind, so the cross kernel is -k/2 and the smeared
//! commutator reproduces [phi(x), Pi(y)] = i delta(x - y). Chiral kinds
//! restrict the integral to one half-line, right-movers to k > 0.

mod correlator;
mod weyl;

pub use correlator::{
    commutator_phase, correlator, correlator_matrix, fourier_profile, CorrelatorMatrix,
};
pub use weyl::gaussian_weyl_expectation;

use crate::quad::QuadError;
use nalgebra::Matrix2;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GateError {
    #[error("smearing width must be positive and finite, got {0}")]
    NonPositiveSigma(f64),
    #[error("field velocity must be positive and finite, got {0}")]
    NonPositiveVelocity(f64),
    #[error("parameter {name} is not finite")]
    NonFiniteParameter { name: &'static str },
    #[error("a gate needs at least one factor")]
    EmptyGate,
    #[error("gate factors must share one detector, found ({theta1}, {omega1}) and ({theta2}, {omega2})")]
    MixedDetectors {
        theta1: f64,
        omega1: f64,
        theta2: f64,
        omega2: f64,
    },
    #[error("observable kind {0:?} has no Gaussian correlator")]
    UnsupportedObservable(ObservableKind),
    #[error("correlated observables must share one field velocity, got {v1} and {v2}")]
    VelocityMismatch { v1: f64, v2: f64 },
    #[error("coefficient list has {got} entries but the correlator matrix is {expected} x {expected}")]
    CoefficientMismatch { expected: usize, got: usize },
    #[error("correlator matrix must be square, got {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian, max defect {defect:e}")]
    NotHermitian { defect: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Normalized Gaussian smearing along the edge coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearingProfile {
    /// Center in nm.
    pub center: f64,
    /// Width in nm.
    pub sigma: f64,
}

impl SmearingProfile {
    pub fn new(center: f64, sigma: f64) -> Result<Self, GateError> {
        if !center.is_finite() {
            return Err(GateError::NonFiniteParameter { name: "center" });
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(GateError::NonPositiveSigma(sigma));
        }
        Ok(Self { center, sigma })
    }

    /// Real-space density; integrates to 1.
    pub fn density(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Delta-like switching: the detector couples to the field only at `time`,
/// with dimensionless strength `strength`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingEvent {
    /// Switching instant in ns.
    pub time: f64,
    /// Dimensionless coupling at that instant.
    pub strength: f64,
}

impl SwitchingEvent {
    pub fn new(time: f64, strength: f64) -> Result<Self, GateError> {
        if !time.is_finite() {
            return Err(GateError::NonFiniteParameter { name: "time" });
        }
        if !strength.is_finite() {
            return Err(GateError::NonFiniteParameter { name: "strength" });
        }
        Ok(Self { time, strength })
    }
}

/// Two-level detector monopole in the x-y spin plane. At time t the
/// coupling operator is mu(t) = cos(theta + Omega t) sigma_x +
/// sin(theta + Omega t) sigma_y: Hermitian, traceless, mu^2 = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorOp {
    /// Monopole axis angle in rad.
    pub theta: f64,
    /// Level splitting in rad/ns.
    pub omega: f64,
}

impl DetectorOp {
    pub fn new(theta: f64, omega: f64) -> Result<Self, GateError> {
        if !theta.is_finite() {
            return Err(GateError::NonFiniteParameter { name: "theta" });
        }
        if !omega.is_finite() {
            return Err(GateError::NonFiniteParameter { name: "omega" });
        }
        Ok(Self { theta, omega })
    }

    /// Interaction-picture angle theta + Omega t.
    pub fn phase(&self, t: f64) -> f64 {
        self.theta + self.omega * t
    }

    /// mu(t) in the sigma_z eigenbasis: [[0, e^{-i phase}], [e^{i phase}, 0]].
    pub fn matrix(&self, t: f64) -> Matrix2<Complex64> {
        let e = Complex64::from_polar(1.0, self.phase(t));
        let zero = Complex64::new(0.0, 0.0);
        Matrix2::new(zero, e.conj(), e, zero)
    }
}

/// Which edge movers a chiral observable couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Right,
    Left,
}

/// Observable kinds in the gate library. The first three are linear in the
/// field and give Gaussian-computable gates; the cosine vertex and the
/// quadratic fermion bilinear are carried for classification only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    /// Smeared conjugate momentum density.
    Pi,
    /// Smeared field gradient.
    DPhi,
    /// Momentum density of a single chirality.
    PiChiral(Chirality),
    /// Vertex operator cos(phi).
    CosinePhi,
    /// Fermion bilinear, quadratic in the boson.
    DiracQuadratic,
}

impl ObservableKind {
    pub fn is_linear(self) -> bool {
        matches!(self, Self::Pi | Self::DPhi | Self::PiChiral(_))
    }
}

/// A smeared field observable attached to one switching instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldObservable {
    pub kind: ObservableKind,
    pub smearing: SmearingProfile,
    /// Switching instant in ns.
    pub event_time: f64,
    /// Edge mode velocity in nm/ns.
    pub velocity: f64,
}

impl FieldObservable {
    pub fn new(
        kind: ObservableKind,
        smearing: SmearingProfile,
        event_time: f64,
        velocity: f64,
    ) -> Result<Self, GateError> {
        if !event_time.is_finite() {
            return Err(GateError::NonFiniteParameter { name: "event_time" });
        }
        if !velocity.is_finite() || velocity <= 0.0 {
            return Err(GateError::NonPositiveVelocity(velocity));
        }
        Ok(Self { kind, smearing, event_time, velocity })
    }
}

/// One exponentiated coupling exp(i J mu(t) (x) O).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateFactor {
    /// Dimensionless coupling strength J.
    pub strength: f64,
    pub detector: DetectorOp,
    pub observable: FieldObservable,
}

impl GateFactor {
    pub fn new(
        strength: f64,
        detector: DetectorOp,
        observable: FieldObservable,
    ) -> Result<Self, GateError> {
        if !strength.is_finite() {
            return Err(GateError::NonFiniteParameter { name: "strength" });
        }
        Ok(Self { strength, detector, observable })
    }
}

/// An ordered product of gate factors on a single detector. Factors are
/// listed in operator-product order and applied right to left: the last
/// factor acts on the state first.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    factors: Vec<GateFactor>,
}

impl GateSpec {
    pub fn new(factors: Vec<GateFactor>) -> Result<Self, GateError> {
        let first = *factors.first().ok_or(GateError::EmptyGate)?;
        if let Some(other) = factors.iter().find(|f| f.detector != first.detector) {
            return Err(GateError::MixedDetectors {
                theta1: first.detector.theta,
                omega1: first.detector.omega,
                theta2: other.detector.theta,
                omega2: other.detector.omega,
            });
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[GateFactor] {
        &self.factors
    }

    pub fn detector(&self) -> DetectorOp {
        self.factors[0].detector
    }
}

/// Whether a gate can be evaluated exactly with Gaussian algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateClass {
    GaussianComputable,
    NonGaussian,
}

pub fn classify(gate: &GateSpec) -> GateClass {
    if gate.factors().iter().all(|f| f.observable.kind.is_linear()) {
        GateClass::GaussianComputable
    } else {
        GateClass::NonGaussian
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn detector() -> DetectorOp {
        DetectorOp::new(0.3, 2.0).unwrap()
    }

    fn observable(kind: ObservableKind) -> FieldObservable {
        let smearing = SmearingProfile::new(0.0, 1.0).unwrap();
        FieldObservable::new(kind, smearing, 0.0, 1.0).unwrap()
    }

    #[test]
    fn detector_matrix_is_hermitian_and_squares_to_identity() {
        let d = detector();
        for t in [0.0, 0.7, -3.2] {
            let m = d.matrix(t);
            assert_eq!(m[(0, 0)], Complex64::new(0.0, 0.0));
            assert_eq!(m, m.adjoint());
            let sq = m * m;
            assert_relative_eq!(sq[(0, 0)].re, 1.0, max_relative = 1e-15);
            assert_relative_eq!(sq[(1, 1)].re, 1.0, max_relative = 1e-15);
            assert!(sq[(0, 1)].norm() < 1e-15 && sq[(1, 0)].norm() < 1e-15);
            // traceless, so mu^2 = 1 forces eigenvalues +1 and -1
            assert!((m[(0, 0)] + m[(1, 1)]).norm() < 1e-15);
        }
        assert_relative_eq!(d.phase(2.0), 4.3, max_relative = 1e-15);
    }

    #[test]
    fn profile_validation_and_density() {
        assert!(SmearingProfile::new(0.0, 0.0).is_err());
        assert!(SmearingProfile::new(0.0, -1.0).is_err());
        assert!(SmearingProfile::new(0.0, f64::NAN).is_err());
        assert!(SmearingProfile::new(f64::INFINITY, 1.0).is_err());
        let p = SmearingProfile::new(2.0, 0.5).unwrap();
        let peak = 1.0 / (0.5 * (2.0 * std::f64::consts::PI).sqrt());
        assert_relative_eq!(p.density(2.0), peak, max_relative = 1e-15);
        assert_relative_eq!(p.density(2.5), peak * (-0.5f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn gate_spec_needs_factors_on_one_detector() {
        assert!(matches!(GateSpec::new(vec![]), Err(GateError::EmptyGate)));
        let f1 = GateFactor::new(0.5, detector(), observable(ObservableKind::Pi)).unwrap();
        let mut f2 = f1;
        f2.detector = DetectorOp::new(0.4, 2.0).unwrap();
        assert!(matches!(
            GateSpec::new(vec![f1, f2]),
            Err(GateError::MixedDetectors { .. })
        ));
        let spec = GateSpec::new(vec![f1, f1]).unwrap();
        assert_eq!(spec.factors().len(), 2);
        assert_eq!(spec.detector(), detector());
    }

    #[test]
    fn classification_follows_linearity() {
        let d = detector();
        let linear = GateSpec::new(vec![
            GateFactor::new(1.0, d, observable(ObservableKind::Pi)).unwrap(),
            GateFactor::new(0.2, d, observable(ObservableKind::DPhi)).unwrap(),
            GateFactor::new(0.1, d, observable(ObservableKind::PiChiral(Chirality::Left)))
                .unwrap(),
        ])
        .unwrap();
        assert_eq!(classify(&linear), GateClass::GaussianComputable);

        for kind in [ObservableKind::CosinePhi, ObservableKind::DiracQuadratic] {
            assert!(!kind.is_linear());
            let spec = GateSpec::new(vec![
                GateFactor::new(1.0, d, observable(ObservableKind::Pi)).unwrap(),
                GateFactor::new(1.0, d, observable(kind)).unwrap(),
            ])
            .unwrap();
            assert_eq!(classify(&spec), GateClass::NonGaussian);
        }
    }

    #[test]
    fn construction_rejects_non_finite_inputs() {
        let p = SmearingProfile::new(0.0, 1.0).unwrap();
        assert!(FieldObservable::new(ObservableKind::Pi, p, f64::NAN, 1.0).is_err());
        assert!(FieldObservable::new(ObservableKind::Pi, p, 0.0, 0.0).is_err());
        assert!(FieldObservable::new(ObservableKind::Pi, p, 0.0, -2.0).is_err());
        assert!(DetectorOp::new(f64::NAN, 0.0).is_err());
        assert!(SwitchingEvent::new(0.0, f64::INFINITY).is_err());
        assert!(SwitchingEvent::new(f64::NEG_INFINITY, 1.0).is_err());
        let d = detector();
        assert!(GateFactor::new(f64::NAN, d, observable(ObservableKind::Pi)).is_err());
    }
}
