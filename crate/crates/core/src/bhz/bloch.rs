//! Momentum-space form of the four-band model and the 4x4 blocks used by
//! real-space assembly.
//!
//! H(k) = (M - eps(cos kx + cos ky)) G5 + lambda sin(kx) Gx - lambda sin(ky) Gy
//! with G5 = I x tz, Gx = sz x tx, Gy = -I x ty in the spin x orbital basis.
//! Inverse Fourier transform fixes the hopping blocks acting from site r to
//! r + x / r + y:
//!   T_x = -(eps/2) G5 - (i lambda/2) Gx
//!   T_y = -(eps/2) G5 + (i lambda/2) Gy
//! so H[r + d, r] = T_d and H[r, r + d] = T_d^dagger.

use super::BhzParams;
use nalgebra::Matrix4;
use num_complex::Complex64;

type C = Complex64;
type M4 = Matrix4<Complex64>;

fn cr(re: f64) -> C {
    C::new(re, 0.0)
}

fn ci(im: f64) -> C {
    C::new(0.0, im)
}

/// I ⊗ tau_z = diag(1, -1, 1, -1).
pub fn gamma5() -> M4 {
    M4::from_diagonal(&nalgebra::Vector4::new(cr(1.0), cr(-1.0), cr(1.0), cr(-1.0)))
}

/// sigma_z ⊗ tau_x.
pub fn gamma_x() -> M4 {
    let mut m = M4::zeros();
    m[(0, 1)] = cr(1.0);
    m[(1, 0)] = cr(1.0);
    m[(2, 3)] = cr(-1.0);
    m[(3, 2)] = cr(-1.0);
    m
}

/// -I ⊗ tau_y.
pub fn gamma_y() -> M4 {
    let mut m = M4::zeros();
    m[(0, 1)] = ci(1.0);
    m[(1, 0)] = ci(-1.0);
    m[(2, 3)] = ci(1.0);
    m[(3, 2)] = ci(-1.0);
    m
}

/// b · (sigma ⊗ I2): Zeeman energy acting on spin only.
pub fn zeeman_block(b: [f64; 3]) -> M4 {
    let mut m = M4::zeros();
    // sigma_z x I2
    m[(0, 0)] = cr(b[2]);
    m[(1, 1)] = cr(b[2]);
    m[(2, 2)] = cr(-b[2]);
    m[(3, 3)] = cr(-b[2]);
    // (sigma_x + i-parts of sigma_y) x I2: upper-right block b_x - i b_y
    let off = C::new(b[0], -b[1]);
    m[(0, 2)] = off;
    m[(1, 3)] = off;
    m[(2, 0)] = off.conj();
    m[(3, 1)] = off.conj();
    m
}

/// Onsite block: M G5 + V I4 + b · (sigma ⊗ I2).
pub fn onsite_block(params: &BhzParams, potential: f64, b: [f64; 3]) -> M4 {
    let mut m = gamma5() * cr(params.mass);
    for i in 0..4 {
        m[(i, i)] += cr(potential);
    }
    m + zeeman_block(b)
}

/// Hopping block from site r onto r + x.
pub fn hop_x(params: &BhzParams) -> M4 {
    gamma5() * cr(-params.epsilon / 2.0) + gamma_x() * ci(-params.lambda / 2.0)
}

/// Hopping block from site r onto r + y.
pub fn hop_y(params: &BhzParams) -> M4 {
    gamma5() * cr(-params.epsilon / 2.0) + gamma_y() * ci(params.lambda / 2.0)
}

pub fn bloch_hamiltonian(params: &BhzParams, kx: f64, ky: f64) -> M4 {
    let mass_term = params.mass - params.epsilon * (kx.cos() + ky.cos());
    gamma5() * cr(mass_term) + gamma_x() * cr(params.lambda * kx.sin())
        - gamma_y() * cr(params.lambda * ky.sin())
}

/// Positive branch of the closed-form dispersion; the spectrum at (kx, ky)
/// is {+E, -E}, each twofold.
pub fn analytic_dispersion(params: &BhzParams, kx: f64, ky: f64) -> f64 {
    let m = params.mass - params.epsilon * (kx.cos() + ky.cos());
    let s = params.lambda * params.lambda * (kx.sin().powi(2) + ky.sin().powi(2));
    (m * m + s).sqrt()
}

/// All four eigenvalues at (kx, ky), ascending.
pub fn dispersion_levels(params: &BhzParams, kx: f64, ky: f64) -> [f64; 4] {
    let e = analytic_dispersion(params, kx, ky);
    [-e, -e, e, e]
}
