//! Eigenpair post-processing into device observables: site-resolved
//! density and spin maps, ribbon band structures, edge velocity, and the
//! transverse decay length of edge states.

mod decay;
mod ribbon;

pub use decay::decay_length;
pub use ribbon::{edge_velocity, ribbon_bands, ribbon_bands_at, RibbonBands};

use crate::bhz::{BhzError, DeviceGeometry};
use crate::spectra::{EigenPair, SpectralWindow};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("state vector has {got} components, geometry needs {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("pair at {energy} eV lies outside the window [{e_min}, {e_max}]")]
    PairOutsideWindow { energy: f64, e_min: f64, e_max: f64 },
    #[error(
        "state is not edge-localized: {edge_fraction:.3} of its weight in the outer quarter, need 0.6"
    )]
    NotAnEdgeState { edge_fraction: f64 },
    #[error("transverse profile fit failed: {reason}")]
    FitFailed { reason: &'static str },
    #[error("no mid-gap branch crosses zero inside the sampled k range")]
    NoCrossing,
    #[error("k grid too coarse to step off the hybridization region at the crossing")]
    VelocityGridTooCoarse,
    #[error("ribbon needs at least 16 k samples, got {got}")]
    TooFewKSamples { got: usize },
    #[error("ribbon width {width} too small for boundary handling")]
    InvalidWidth { width: usize },
    #[error(transparent)]
    Bhz(#[from] BhzError),
}

/// Site-resolved probability weight summed over the included states.
#[derive(Clone, Debug)]
pub struct DensityMap {
    /// Row-major, index y*nx + x.
    pub grid: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub window: SpectralWindow,
    pub state_count: usize,
}

impl DensityMap {
    pub fn cell(&self, x: usize, y: usize) -> f64 {
        self.grid[y * self.nx + x]
    }

    pub fn total(&self) -> f64 {
        self.grid.iter().sum()
    }
}

/// Site-resolved spin polarization: per-cell expectation of sigma_z x I2
/// summed over states. |cell| never exceeds the matching density cell.
#[derive(Clone, Debug)]
pub struct SpinMap {
    pub grid: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub window: SpectralWindow,
    pub state_count: usize,
}

impl SpinMap {
    pub fn cell(&self, x: usize, y: usize) -> f64 {
        self.grid[y * self.nx + x]
    }
}

fn check_pairs(
    pairs: &[EigenPair],
    geometry: &DeviceGeometry,
    window: &SpectralWindow,
) -> Result<(), MapError> {
    let expected = geometry.dimension();
    for p in pairs {
        if p.vector.len() != expected {
            return Err(MapError::DimensionMismatch { expected, got: p.vector.len() });
        }
        if !window.contains(p.energy) {
            return Err(MapError::PairOutsideWindow {
                energy: p.energy,
                e_min: window.e_min,
                e_max: window.e_max,
            });
        }
    }
    Ok(())
}

/// cell(x,y) = sum over states and the 4 local components of |psi|^2;
/// the grid total equals the state count for unit-norm inputs.
pub fn density_map(
    pairs: &[EigenPair],
    geometry: &DeviceGeometry,
    window: &SpectralWindow,
) -> Result<DensityMap, MapError> {
    check_pairs(pairs, geometry, window)?;
    let mut grid = vec![0.0; geometry.num_sites()];
    for p in pairs {
        for (site, cell) in grid.iter_mut().enumerate() {
            let base = 4 * site;
            *cell += p.vector[base].norm_sqr()
                + p.vector[base + 1].norm_sqr()
                + p.vector[base + 2].norm_sqr()
                + p.vector[base + 3].norm_sqr();
        }
    }
    Ok(DensityMap { grid, nx: geometry.nx, ny: geometry.ny, window: *window, state_count: pairs.len() })
}

/// cell(x,y) = sum over states of <psi(x,y)| sigma_z x I2 |psi(x,y)>:
/// spin-up weight minus spin-down weight on the site.
pub fn spin_map(
    pairs: &[EigenPair],
    geometry: &DeviceGeometry,
    window: &SpectralWindow,
) -> Result<SpinMap, MapError> {
    check_pairs(pairs, geometry, window)?;
    let mut grid = vec![0.0; geometry.num_sites()];
    for p in pairs {
        for (site, cell) in grid.iter_mut().enumerate() {
            let base = 4 * site;
            *cell += p.vector[base].norm_sqr() + p.vector[base + 1].norm_sqr()
                - p.vector[base + 2].norm_sqr()
                - p.vector[base + 3].norm_sqr();
        }
    }
    Ok(SpinMap { grid, nx: geometry.nx, ny: geometry.ny, window: *window, state_count: pairs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bhz::Boundary;
    use num_complex::Complex64;

    fn geometry(nx: usize, ny: usize) -> DeviceGeometry {
        DeviceGeometry::new(nx, ny, Boundary::Open, Boundary::Open).unwrap()
    }

    fn window() -> SpectralWindow {
        SpectralWindow::new(-1.0, 1.0, 16).unwrap()
    }

    fn unit_state(dim: usize, seed: u64) -> EigenPair {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= n);
        EigenPair { energy: 0.0, vector: v, residual: 0.0 }
    }

    #[test]
    fn density_total_counts_states() {
        let g = geometry(3, 4);
        let pairs = vec![unit_state(g.dimension(), 1), unit_state(g.dimension(), 2)];
        let map = density_map(&pairs, &g, &window()).unwrap();
        assert!((map.total() - 2.0).abs() < 1e-10);
        assert!(map.grid.iter().all(|&c| c >= 0.0));
        assert_eq!(map.state_count, 2);
    }

    #[test]
    fn empty_input_gives_zero_map() {
        let g = geometry(2, 2);
        let map = density_map(&[], &g, &window()).unwrap();
        assert_eq!(map.state_count, 0);
        assert!(map.grid.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn kramers_pair_cancels_spin() {
        // time reversal T = i sigma_y K in the spin factor: up <-> down
        // with a sign, so the summed polarization vanishes cellwise
        let g = geometry(3, 3);
        let psi = unit_state(g.dimension(), 5);
        let mut partner = psi.clone();
        for site in 0..g.num_sites() {
            let b = 4 * site;
            let (u0, u1) = (psi.vector[b], psi.vector[b + 1]);
            let (d0, d1) = (psi.vector[b + 2], psi.vector[b + 3]);
            partner.vector[b] = -d0.conj();
            partner.vector[b + 1] = -d1.conj();
            partner.vector[b + 2] = u0.conj();
            partner.vector[b + 3] = u1.conj();
        }
        let map = spin_map(&[psi, partner], &g, &window()).unwrap();
        assert!(map.grid.iter().all(|&c| c.abs() < 1e-12));
    }

    #[test]
    fn spin_bounded_by_density() {
        let g = geometry(4, 2);
        let pairs = vec![unit_state(g.dimension(), 9)];
        let d = density_map(&pairs, &g, &window()).unwrap();
        let s = spin_map(&pairs, &g, &window()).unwrap();
        for (sv, dv) in s.grid.iter().zip(&d.grid) {
            assert!(sv.abs() <= dv + 1e-15);
        }
    }

    #[test]
    fn input_validation() {
        let g = geometry(2, 2);
        let mut p = unit_state(g.dimension(), 3);
        p.vector.pop();
        assert!(matches!(
            density_map(&[p], &g, &window()),
            Err(MapError::DimensionMismatch { .. })
        ));
        let mut q = unit_state(g.dimension(), 4);
        q.energy = 5.0;
        assert!(matches!(
            density_map(&[q], &g, &window()),
            Err(MapError::PairOutsideWindow { .. })
        ));
    }
}
