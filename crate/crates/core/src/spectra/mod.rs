//! Eigenpair extraction for device Hamiltonians: extremal pairs via
//! Lanczos, interior windows via a Chebyshev-filtered subspace iteration
//! on the folded operator (H - sigma)^2, and a dense fallback for small
//! matrices that doubles as the completeness oracle in tests.

mod filtered;
mod lanczos;

pub use filtered::interior_eigs_with_report;
pub use lanczos::extremal_eigs;

use crate::bhz::SparseHamiltonian;
use crate::sparse::{CsrMatrix, SparseError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("spectral window needs e_min < e_max, got [{e_min}, {e_max}]")]
    InvalidWindow { e_min: f64, e_max: f64 },
    #[error("max_pairs must be at least 1")]
    ZeroMaxPairs,
    #[error("extremal count must be at least 1")]
    ZeroCount,
    #[error(
        "solver did not converge: worst residual {achieved:e} against tolerance {required:e} after {passes} passes"
    )]
    NonConvergence { achieved: f64, required: f64, passes: usize },
    #[error("iteration broke down {restarts} times; giving up")]
    Breakdown { restarts: usize },
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// Energy window of interest plus a result-size cap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralWindow {
    pub e_min: f64,
    pub e_max: f64,
    pub max_pairs: usize,
}

impl SpectralWindow {
    pub fn new(e_min: f64, e_max: f64, max_pairs: usize) -> Result<Self, SolverError> {
        if !(e_min < e_max) || !e_min.is_finite() || !e_max.is_finite() {
            return Err(SolverError::InvalidWindow { e_min, e_max });
        }
        if max_pairs == 0 {
            return Err(SolverError::ZeroMaxPairs);
        }
        Ok(SpectralWindow { e_min, e_max, max_pairs })
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.e_min + self.e_max)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.e_max - self.e_min)
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.e_min && e <= self.e_max
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub energy: f64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
}

/// Solver telemetry for one window solve.
#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    pub matvecs: usize,
    pub passes: usize,
    pub block_size: usize,
    pub filter_degree: usize,
    /// Worst in-window residual after each pass.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// True when the window held more states than max_pairs and the
    /// result was capped to the ones nearest the window center.
    pub truncated: bool,
    pub found: usize,
    pub spectral_bounds: (f64, f64),
    pub tolerance: f64,
    pub dense_path: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Seed for the random start block; fixed seed gives bit-stable runs.
    pub seed: u64,
    /// Residual tolerance relative to the Gershgorin radius of H.
    pub rel_tol: f64,
    /// Initial filter block width; grows when the window saturates it.
    pub block_size: Option<usize>,
    pub max_passes: usize,
    /// At or below this dimension the window is solved densely.
    pub dense_cutoff: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { seed: 7, rel_tol: 1e-8, block_size: None, max_passes: 40, dense_cutoff: 600 }
    }
}

/// Eigenvalues closer than this are one degenerate cluster.
pub const CLUSTER_WIDTH: f64 = 1e-10;

/// All eigenpairs of H inside the window, ascending in energy, capped at
/// `window.max_pairs` nearest the window center.
pub fn interior_eigs(
    h: &CsrMatrix,
    window: &SpectralWindow,
    opts: &SolverOptions,
) -> Result<Vec<EigenPair>, SolverError> {
    interior_eigs_with_report(h, window, opts).map(|(pairs, _)| pairs)
}

/// Window solve for an assembled device. Spin-conserving devices split
/// into two half-dimension sector solves, which is both cheaper and an
/// exact reformulation; results are re-verified against the full matrix.
pub fn solve_device_window(
    device: &SparseHamiltonian,
    window: &SpectralWindow,
    opts: &SolverOptions,
) -> Result<(Vec<EigenPair>, SolveReport), SolverError> {
    let Some((up, down)) = device.spin_sectors() else {
        return interior_eigs_with_report(device.matrix(), window, opts);
    };

    let mut merged: Vec<EigenPair> = Vec::new();
    let mut report = SolveReport::default();
    report.converged = true;
    for (spin, sector) in [(0usize, up), (1usize, down)] {
        let sector_opts = SolverOptions { seed: opts.seed.wrapping_add(spin as u64), ..*opts };
        let (pairs, rep) = interior_eigs_with_report(&sector, window, &sector_opts)?;
        report.matvecs += rep.matvecs;
        report.passes = report.passes.max(rep.passes);
        report.block_size = report.block_size.max(rep.block_size);
        report.filter_degree = report.filter_degree.max(rep.filter_degree);
        report.converged &= rep.converged;
        report.truncated |= rep.truncated;
        report.dense_path |= rep.dense_path;
        report.tolerance = report.tolerance.max(rep.tolerance);
        report.spectral_bounds = (
            report.spectral_bounds.0.min(rep.spectral_bounds.0),
            report.spectral_bounds.1.max(rep.spectral_bounds.1),
        );
        for p in pairs {
            let vector = device.embed_sector_vector(spin, &p.vector);
            merged.push(EigenPair { energy: p.energy, vector, residual: p.residual });
        }
    }

    // fresh residuals against the full operator
    for p in &mut merged {
        let hv = device.matrix().matvec(&p.vector)?;
        report.matvecs += 1;
        p.residual = residual_norm(&hv, &p.vector, p.energy);
    }
    merged.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    if merged.len() > window.max_pairs {
        report.truncated = true;
        let center = window.center();
        merged.sort_by(|a, b| {
            (a.energy - center)
                .abs()
                .partial_cmp(&(b.energy - center).abs())
                .unwrap()
                .then(a.energy.partial_cmp(&b.energy).unwrap())
        });
        merged.truncate(window.max_pairs);
        merged.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    }
    report.found = merged.len();
    Ok((merged, report))
}

pub(crate) fn residual_norm(hv: &[Complex64], v: &[Complex64], energy: f64) -> f64 {
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - b * Complex64::new(energy, 0.0)).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Rotate so the largest-magnitude component is real positive; pins the
/// arbitrary eigenvector phase for reproducible output files.
pub(crate) fn canonicalize_phase(v: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_norm = -1.0f64;
    for (i, z) in v.iter().enumerate() {
        let n = z.norm_sqr();
        if n > best_norm + 1e-30 {
            best_norm = n;
            best = i;
        }
    }
    let z = v[best];
    if z.norm() == 0.0 {
        return;
    }
    let phase = z.conj() / z.norm();
    for c in v.iter_mut() {
        *c *= phase;
    }
}

/// Re-orthonormalize vectors within degenerate clusters (energies closer
/// than CLUSTER_WIDTH); between clusters the pairs are already orthogonal.
pub(crate) fn orthonormalize_clusters(pairs: &mut [EigenPair]) {
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end].energy - pairs[end - 1].energy).abs() < CLUSTER_WIDTH {
            end += 1;
        }
        for i in start..end {
            for j in start..i {
                let proj: Complex64 = pairs[j]
                    .vector
                    .iter()
                    .zip(&pairs[i].vector)
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let (head, tail) = pairs.split_at_mut(i);
                let vj = &head[j].vector;
                for (t, s) in tail[0].vector.iter_mut().zip(vj) {
                    *t -= proj * s;
                }
            }
            let n = pairs[i].vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n > 0.0 {
                for z in pairs[i].vector.iter_mut() {
                    *z /= n;
                }
            }
        }
        start = end;
    }
}

/// Dense in-window eigenpairs, ascending; the completeness oracle.
pub(crate) fn dense_window_pairs(
    h: &CsrMatrix,
    window: &SpectralWindow,
) -> Result<(Vec<EigenPair>, bool), SolverError> {
    let dense = h.to_dense()?;
    let eig = nalgebra::linalg::SymmetricEigen::new(dense);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| window.contains(eig.eigenvalues[i]))
        .collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let mut truncated = false;
    if idx.len() > window.max_pairs {
        truncated = true;
        let center = window.center();
        idx.sort_by(|&a, &b| {
            (eig.eigenvalues[a] - center)
                .abs()
                .partial_cmp(&(eig.eigenvalues[b] - center).abs())
                .unwrap()
                .then(eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap())
        });
        idx.truncate(window.max_pairs);
        idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    }

    let mut pairs = Vec::with_capacity(idx.len());
    for &i in &idx {
        let mut vector: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
        canonicalize_phase(&mut vector);
        let hv = h.matvec(&vector)?;
        let energy = eig.eigenvalues[i];
        let residual = residual_norm(&hv, &vector, energy);
        pairs.push(EigenPair { energy, vector, residual });
    }
    orthonormalize_clusters(&mut pairs);
    Ok((pairs, truncated))
}

/// Dense full-spectrum helper used by oracle-style tests.
pub fn dense_spectrum(h: &CsrMatrix) -> Result<Vec<f64>, SolverError> {
    let eig = nalgebra::linalg::SymmetricEigen::new(h.to_dense()?);
    let mut e: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_validation() {
        assert!(SpectralWindow::new(-1.0, 1.0, 4).is_ok());
        assert!(matches!(
            SpectralWindow::new(1.0, -1.0, 4),
            Err(SolverError::InvalidWindow { .. })
        ));
        assert!(matches!(SpectralWindow::new(-1.0, 1.0, 0), Err(SolverError::ZeroMaxPairs)));
    }

    #[test]
    fn phase_canonicalization_fixes_largest_component() {
        let mut v = vec![
            Complex64::new(0.1, 0.2),
            Complex64::new(0.0, -0.9),
            Complex64::new(0.3, 0.0),
        ];
        canonicalize_phase(&mut v);
        assert!(v[1].im.abs() < 1e-15);
        assert!(v[1].re > 0.0);
    }
}
