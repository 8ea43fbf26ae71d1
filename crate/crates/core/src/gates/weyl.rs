//! Vacuum expectation of an ordered product of Weyl factors exp(i a O).

use super::{CorrelatorMatrix, GateError};
use num_complex::Complex64;

/// <0| prod_i exp(i alphas[i] O_i) |0> for linear observables with Gram
/// matrix `w`, the product taken in list order: alphas[0] belongs to the
/// leftmost factor, which acts on the state last.
///
/// The magnitude is exp(-<(sum_i a_i O_i)^2> / 2), at most 1 whenever the
/// real part of `w` is positive semidefinite, and the ordered commutator
/// phases contribute exp(-i sum_{i<j} a_i a_j Im W_ij).
pub fn gaussian_weyl_expectation(
    alphas: &[f64],
    w: &CorrelatorMatrix,
) -> Result<Complex64, GateError> {
    if alphas.len() != w.dim() {
        return Err(GateError::CoefficientMismatch { expected: w.dim(), got: alphas.len() });
    }
    let mut quad_form = 0.0;
    let mut scale = 0.0f64;
    let mut bch = 0.0;
    for (i, &ai) in alphas.iter().enumerate() {
        for (j, &aj) in alphas.iter().enumerate() {
            let wij = w.entry(i, j);
            quad_form += ai * aj * wij.re;
            scale += (ai * aj).abs() * wij.norm();
            if i < j {
                bch += ai * aj * wij.im;
            }
        }
    }
    // the form is analytically >= 0; forgive cancellation-level negatives
    if quad_form < 0.0 && quad_form >= -1e-12 * scale {
        quad_form = 0.0;
    }
    Ok(Complex64::from_polar((-0.5 * quad_form).exp(), -bch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{
        correlator_matrix, FieldObservable, ObservableKind, SmearingProfile,
    };
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn pi_at(center: f64, sigma: f64, t: f64) -> FieldObservable {
        FieldObservable::new(
            ObservableKind::Pi,
            SmearingProfile::new(center, sigma).unwrap(),
            t,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn zero_coefficients_give_unity() {
        let w = correlator_matrix(&[pi_at(0.0, 1.0, 0.0), pi_at(1.0, 0.5, 0.2)]).unwrap();
        assert_eq!(
            gaussian_weyl_expectation(&[0.0, 0.0], &w).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn single_momentum_factor_reference_value() {
        let w = correlator_matrix(&[pi_at(0.0, 1.0, 0.0)]).unwrap();
        let z = gaussian_weyl_expectation(&[1.0], &w).unwrap();
        assert_relative_eq!(z.re, (-1.0 / (8.0 * PI)).exp(), max_relative = 1e-8);
        assert_eq!(z.im, 0.0);
    }

    #[test]
    fn commuting_equal_factors_merge_into_one() {
        let o = pi_at(0.3, 1.2, 0.0);
        let pair = correlator_matrix(&[o, o]).unwrap();
        let single = correlator_matrix(&[o]).unwrap();
        for (a1, a2) in [(1.0, 0.5), (-0.7, 0.7), (0.2, 2.0)] {
            let z2 = gaussian_weyl_expectation(&[a1, a2], &pair).unwrap();
            let z1 = gaussian_weyl_expectation(&[a1 + a2], &single).unwrap();
            assert!((z2 - z1).norm() < 1e-12, "{z2} vs {z1}");
        }
    }

    #[test]
    fn reversing_the_product_conjugates_the_phase() {
        let a = pi_at(0.0, 1.0, 0.0);
        let b = pi_at(0.5, 1.0, 0.3);
        let w_ab = correlator_matrix(&[a, b]).unwrap();
        let w_ba = correlator_matrix(&[b, a]).unwrap();
        let z_ab = gaussian_weyl_expectation(&[0.9, 1.4], &w_ab).unwrap();
        let z_ba = gaussian_weyl_expectation(&[1.4, 0.9], &w_ba).unwrap();
        assert!(z_ab.arg().abs() > 1e-3, "factors should not commute");
        assert_relative_eq!(z_ab.norm(), z_ba.norm(), max_relative = 1e-12);
        assert_relative_eq!(z_ab.arg(), -z_ba.arg(), max_relative = 1e-10);
        // phase difference is the full commutator phase
        let im = w_ab.entry(0, 1).im;
        assert_relative_eq!(z_ab.arg(), -0.9 * 1.4 * im, max_relative = 1e-10);
    }

    #[test]
    fn magnitude_never_exceeds_one() {
        let obs = [
            pi_at(0.0, 1.0, 0.0),
            pi_at(0.4, 0.7, 0.2),
            pi_at(-0.8, 1.3, -0.1),
        ];
        let w = correlator_matrix(&obs).unwrap();
        for alphas in [
            [1.0, 1.0, 1.0],
            [2.5, -3.0, 0.7],
            [-1.0, 1.0, 0.0],
            [0.1, 0.1, -0.2],
        ] {
            let z = gaussian_weyl_expectation(&alphas, &w).unwrap();
            assert!(z.norm() <= 1.0 + 1e-12, "|z| = {}", z.norm());
        }
    }

    #[test]
    fn coefficient_count_must_match() {
        let w = correlator_matrix(&[pi_at(0.0, 1.0, 0.0)]).unwrap();
        assert!(matches!(
            gaussian_weyl_expectation(&[1.0, 2.0], &w),
            Err(GateError::CoefficientMismatch { expected: 1, got: 2 })
        ));
    }
}
