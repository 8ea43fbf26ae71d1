//! Translationally invariant strip spectra. The strip is periodic along x
//! and `width` sites tall in y, so momentum k is a good quantum number and
//! each k gives a finite transverse eigenproblem.
//!
//! With the Zeeman term absent the Hamiltonian is block-diagonal in spin,
//! and each spin block is real symmetric in the orbital basis: the up block
//! at momentum k equals the down block at -k. Solving the two 2W x 2W real
//! blocks instead of one 4W x 4W complex matrix keeps the spin label exact
//! rather than reconstructed from expectation values.

use super::MapError;
use crate::bhz::{BhzParams, Boundary};
use crate::constants::HBAR_EV_NS;
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Band structure of an infinite strip, sorted per k by energy.
#[derive(Clone, Debug)]
pub struct RibbonBands {
    pub ks: Vec<f64>,
    /// energies[i] holds the 4*width band energies at ks[i], ascending.
    pub energies: Vec<Vec<f64>>,
    /// Exact spin label per band, +1 or -1, aligned with `energies`.
    pub sigma_z: Vec<Vec<f64>>,
    /// Mean transverse position per band in [0, 1]; 0 is the bottom row.
    pub transverse_mean: Vec<Vec<f64>>,
    pub width: usize,
    pub boundary_y: Boundary,
    pub params: BhzParams,
    /// Set when the strip is thinner than twice the edge decay length,
    /// so the two edges hybridize strongly.
    pub narrow_width_warning: bool,
}

impl RibbonBands {
    pub fn bands_per_k(&self) -> usize {
        4 * self.width
    }
}

/// Bands on a uniform k grid spanning [-pi, pi] inclusive.
pub fn ribbon_bands(
    params: &BhzParams,
    width: usize,
    k_count: usize,
    boundary_y: Boundary,
) -> Result<RibbonBands, MapError> {
    if k_count < 16 {
        return Err(MapError::TooFewKSamples { got: k_count });
    }
    let step = 2.0 * PI / (k_count - 1) as f64;
    let ks: Vec<f64> = (0..k_count).map(|i| -PI + step * i as f64).collect();
    ribbon_bands_at(params, width, boundary_y, &ks)
}

/// Bands on an explicit strictly increasing k grid, for zooming in on a
/// crossing without resolving the whole zone.
pub fn ribbon_bands_at(
    params: &BhzParams,
    width: usize,
    boundary_y: Boundary,
    ks: &[f64],
) -> Result<RibbonBands, MapError> {
    let min_width = match boundary_y {
        Boundary::Open => 2,
        // a 2-site periodic ring would stack both wrap bonds on one link
        Boundary::Periodic => 3,
    };
    if width < min_width {
        return Err(MapError::InvalidWidth { width });
    }
    if ks.is_empty() {
        return Err(MapError::TooFewKSamples { got: 0 });
    }
    if ks.windows(2).any(|w| !(w[1] > w[0])) || ks.iter().any(|k| !k.is_finite()) {
        return Err(MapError::FitFailed { reason: "k samples must be finite and strictly increasing" });
    }

    let mut energies = Vec::with_capacity(ks.len());
    let mut sigma_z = Vec::with_capacity(ks.len());
    let mut transverse_mean = Vec::with_capacity(ks.len());
    for &k in ks {
        let mut merged: Vec<(f64, f64, f64)> = Vec::with_capacity(4 * width);
        for (sign, spin) in [(1.0, 1.0), (-1.0, -1.0)] {
            let block = sector_matrix(params, width, boundary_y, sign * k);
            let eig = block.symmetric_eigen();
            for (j, &e) in eig.eigenvalues.iter().enumerate() {
                let col = eig.eigenvectors.column(j);
                let mut mean = 0.0;
                for y in 0..width {
                    let w = col[2 * y] * col[2 * y] + col[2 * y + 1] * col[2 * y + 1];
                    mean += w * y as f64;
                }
                if width > 1 {
                    mean /= (width - 1) as f64;
                }
                merged.push((e, spin, mean));
            }
        }
        merged.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        energies.push(merged.iter().map(|t| t.0).collect());
        sigma_z.push(merged.iter().map(|t| t.1).collect());
        transverse_mean.push(merged.iter().map(|t| t.2).collect());
    }

    Ok(RibbonBands {
        ks: ks.to_vec(),
        energies,
        sigma_z,
        transverse_mean,
        width,
        boundary_y,
        params: *params,
        narrow_width_warning: width_is_narrow(params, width),
    })
}

fn width_is_narrow(params: &BhzParams, width: usize) -> bool {
    let gap = (params.mass - 2.0 * params.epsilon).abs();
    if params.lambda == 0.0 {
        return false;
    }
    if gap == 0.0 {
        return true;
    }
    (width as f64) < 2.0 * params.lambda.abs() / gap
}

/// Spin-up transverse block at momentum k. Spin-down is this block at -k.
fn sector_matrix(params: &BhzParams, width: usize, boundary_y: Boundary, k: f64) -> DMatrix<f64> {
    let n = 2 * width;
    let m_k = params.mass - params.epsilon * k.cos();
    let s_k = params.lambda * k.sin();
    let he = 0.5 * params.epsilon;
    let hl = 0.5 * params.lambda;
    // hop y -> y+1 in the orbital basis; real, not symmetric on its own
    let t = [[-he, -hl], [hl, he]];

    let mut h = DMatrix::zeros(n, n);
    for y in 0..width {
        h[(2 * y, 2 * y)] = m_k;
        h[(2 * y + 1, 2 * y + 1)] = -m_k;
        h[(2 * y, 2 * y + 1)] = s_k;
        h[(2 * y + 1, 2 * y)] = s_k;
    }
    let mut bond = |lo: usize, hi: usize| {
        for a in 0..2 {
            for b in 0..2 {
                h[(2 * hi + a, 2 * lo + b)] += t[a][b];
                h[(2 * lo + b, 2 * hi + a)] += t[a][b];
            }
        }
    };
    for y in 0..width - 1 {
        bond(y, y + 1);
    }
    if boundary_y == Boundary::Periodic {
        bond(width - 1, 0);
    }
    h
}

/// Group velocity of the gap-crossing branch in nm/ns.
///
/// Finds the sampled k of smallest |E|, then steps symmetrically outward
/// until the branch is clear of the finite-width hybridization splitting
/// (6x the splitting scale) while still below the bulk continuum (0.7x the
/// fifth-smallest |E| anywhere). The branch passes through zero, so the
/// centered difference uses +E on one side and -E on the other.
pub fn edge_velocity(bands: &RibbonBands) -> Result<f64, MapError> {
    let n_k = bands.ks.len();
    if n_k < 3 {
        return Err(MapError::TooFewKSamples { got: n_k });
    }

    let mut abs_min = Vec::with_capacity(n_k);
    let mut pos_min = Vec::with_capacity(n_k);
    let mut fifth = Vec::with_capacity(n_k);
    for es in &bands.energies {
        let mut a: Vec<f64> = es.iter().map(|e| e.abs()).collect();
        a.sort_by(f64::total_cmp);
        abs_min.push(a[0]);
        fifth.push(if a.len() > 4 { a[4] } else { *a.last().unwrap() });
        pos_min.push(
            es.iter().copied().filter(|&e| e > 0.0).fold(f64::INFINITY, f64::min),
        );
    }
    let bulk_floor = fifth.iter().copied().fold(f64::INFINITY, f64::min);
    let i0 = (0..n_k).min_by(|&a, &b| abs_min[a].total_cmp(&abs_min[b])).unwrap();
    let e0 = abs_min[i0];
    if !(e0 < 0.25 * bulk_floor) {
        return Err(MapError::NoCrossing);
    }

    let clear = 6.0 * e0;
    let cap = 0.7 * bulk_floor;
    let max_m = i0.min(n_k - 1 - i0);
    if max_m == 0 {
        return Err(MapError::VelocityGridTooCoarse);
    }
    for m in 1..=max_m {
        let lo = pos_min[i0 - m];
        let hi = pos_min[i0 + m];
        if !lo.is_finite() || !hi.is_finite() {
            continue;
        }
        if lo.max(hi) > cap {
            // past this point the smallest positive state is bulk, not edge
            return Err(MapError::VelocityGridTooCoarse);
        }
        if lo.min(hi) >= clear {
            let dk = bands.ks[i0 + m] - bands.ks[i0 - m];
            let slope = (hi + lo) / dk;
            return Ok(slope * bands.params.lattice_constant / HBAR_EV_NS);
        }
    }
    Err(MapError::VelocityGridTooCoarse)
}
