//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands on a
//! finite interval. 7-point Gauss / 15-point Kronrod pairs give the error
//! estimate; the worst interval is bisected until the summed estimate
//! meets the absolute tolerance.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not reach tolerance {tol:e}: error estimate {achieved:e} after {intervals} intervals")]
    NonConvergence { tol: f64, achieved: f64, intervals: usize },
    #[error("integration bounds must be finite and ordered, got [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
    #[error("tolerance must be positive, got {0:e}")]
    BadTolerance(f64),
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFiniteIntegrand(f64),
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights; the
// embedded 7-point Gauss rule uses the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

const MAX_INTERVALS: usize = 4000;

struct Segment {
    error: f64,
    a: f64,
    b: f64,
    value: Complex64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(std::cmp::Ordering::Equal)
    }
}

fn kronrod_segment<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Result<Segment, QuadError> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let eval = |t: f64| -> Result<Complex64, QuadError> {
            let v = f(t);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(QuadError::NonFiniteIntegrand(t))
            }
        };
        let pair = if x == 0.0 {
            eval(mid)?
        } else {
            eval(mid - half * x)? + eval(mid + half * x)?
        };
        kronrod += pair * wk;
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    kronrod *= half;
    gauss *= half;
    Ok(Segment { error: (kronrod - gauss).norm(), a, b, value: kronrod })
}

/// Integrate f over [a, b] to the given absolute tolerance.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<Complex64, QuadError> {
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(QuadError::BadInterval { a, b });
    }
    if !(abs_tol > 0.0) {
        return Err(QuadError::BadTolerance(abs_tol));
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }

    let mut heap = BinaryHeap::new();
    heap.push(kronrod_segment(&f, a, b)?);
    loop {
        let total_err: f64 = heap.iter().map(|s| s.error).sum();
        if total_err <= abs_tol {
            return Ok(heap.iter().map(|s| s.value).sum());
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(QuadError::NonConvergence {
                tol: abs_tol,
                achieved: total_err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; keep its estimate
            let mut poisoned = worst;
            poisoned.error = 0.0;
            heap.push(poisoned);
            continue;
        }
        heap.push(kronrod_segment(&f, worst.a, mid)?);
        heap.push(kronrod_segment(&f, mid, worst.b)?);
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64, QuadError> {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, abs_tol).map(|v| v.re)
}
