//! Real-space device assembly: onsite blocks carry the mass term plus gate
//! potential and local Zeeman energy, neighbor blocks carry the hopping.
//! Hermiticity is exact by construction because every bond writes a block
//! and its conjugate transpose from the same 4x4.

use super::bloch::{hop_x, hop_y, onsite_block};
use super::{BhzError, BhzParams, Boundary, DeviceGeometry, GateRegion, LocalField};
use crate::sparse::CsrMatrix;
use nalgebra::Matrix4;
use num_complex::Complex64;

/// Dimension guard for accidental huge devices; a 1024x1024 lattice is
/// already past what the iterative solver is meant for.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 22;

pub struct SparseHamiltonian {
    matrix: CsrMatrix,
    geometry: DeviceGeometry,
    params: BhzParams,
    spin_conserving: bool,
}

impl SparseHamiltonian {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn geometry(&self) -> &DeviceGeometry {
        &self.geometry
    }

    pub fn params(&self) -> &BhzParams {
        &self.params
    }

    pub fn dimension(&self) -> usize {
        self.matrix.dim()
    }

    /// True when no term couples spin up to spin down; the matrix then
    /// splits into two half-dimension blocks (see [`spin_sectors`]).
    pub fn spin_conserving(&self) -> bool {
        self.spin_conserving
    }

    /// Split into (spin-up, spin-down) blocks, each indexed by
    /// 2·site + orbital. None when any entry couples the sectors.
    pub fn spin_sectors(&self) -> Option<(CsrMatrix, CsrMatrix)> {
        let half = self.matrix.dim() / 2;
        let mut up = Vec::with_capacity(self.matrix.nnz() / 2);
        let mut down = Vec::with_capacity(self.matrix.nnz() / 2);
        for (r, c, v) in self.matrix.iter_entries() {
            let (spin_r, spin_c) = ((r % 4) / 2, (c % 4) / 2);
            if spin_r != spin_c {
                return None;
            }
            let fold = |i: usize| 2 * (i / 4) + (i % 4) % 2;
            if spin_r == 0 {
                up.push((fold(r), fold(c), v));
            } else {
                down.push((fold(r), fold(c), v));
            }
        }
        let up = CsrMatrix::from_triplets(half, up).expect("indices in range by construction");
        let down = CsrMatrix::from_triplets(half, down).expect("indices in range by construction");
        Some((up, down))
    }

    /// Lift a sector eigenvector back to the full device basis.
    pub fn embed_sector_vector(&self, spin: usize, v: &[Complex64]) -> Vec<Complex64> {
        assert!(spin < 2);
        assert_eq!(v.len(), self.matrix.dim() / 2);
        let mut full = vec![Complex64::new(0.0, 0.0); self.matrix.dim()];
        for (i, &z) in v.iter().enumerate() {
            let (site, orb) = (i / 2, i % 2);
            full[4 * site + 2 * spin + orb] = z;
        }
        full
    }
}

pub fn assemble(
    params: &BhzParams,
    geometry: &DeviceGeometry,
    gates: &[GateRegion],
    fields: &[LocalField],
) -> Result<SparseHamiltonian, BhzError> {
    assemble_capped(params, geometry, gates, fields, DEFAULT_DIMENSION_CAP)
}

pub fn assemble_capped(
    params: &BhzParams,
    geometry: &DeviceGeometry,
    gates: &[GateRegion],
    fields: &[LocalField],
    dimension_cap: usize,
) -> Result<SparseHamiltonian, BhzError> {
    let dim = geometry.dimension();
    if dim > dimension_cap {
        return Err(BhzError::DimensionCapExceeded { dim, cap: dimension_cap });
    }
    for g in gates {
        g.shape.validate()?;
        if !g.potential.is_finite() {
            return Err(BhzError::NonFinitePotential);
        }
    }

    let a = params.lattice_constant;
    let tx = hop_x(params);
    let ty = hop_y(params);
    let (nx, ny) = (geometry.nx, geometry.ny);

    // each site: onsite block + up to 4 neighbor blocks, 16 entries each
    let mut trip: Vec<(usize, usize, Complex64)> = Vec::with_capacity(dim * 20);
    let mut spin_conserving = true;

    let push_block = |trip: &mut Vec<(usize, usize, Complex64)>,
                          site_r: usize,
                          site_c: usize,
                          block: &Matrix4<Complex64>| {
        for i in 0..4 {
            for j in 0..4 {
                let v = block[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    trip.push((4 * site_r + i, 4 * site_c + j, v));
                }
            }
        }
    };

    for y in 0..ny {
        for x in 0..nx {
            let site = geometry.site_index(x, y);
            let (px, py) = (x as f64 * a, y as f64 * a);

            let potential: f64 = gates
                .iter()
                .filter(|g| g.shape.contains(px, py))
                .map(|g| g.potential)
                .sum();
            let mut b = [0.0f64; 3];
            for f in fields {
                let d = ((px - f.center.0).powi(2) + (py - f.center.1).powi(2)).sqrt();
                let w = f.weight(d);
                if w != 0.0 {
                    b[0] += w * f.b_vec[0];
                    b[1] += w * f.b_vec[1];
                    b[2] += w * f.b_vec[2];
                }
            }
            if b[0] != 0.0 || b[1] != 0.0 {
                spin_conserving = false;
            }

            push_block(&mut trip, site, site, &onsite_block(params, potential, b));

            // bond to the +x neighbor: H[neighbor, site] = T_x
            let x_bond = if x + 1 < nx {
                Some(geometry.site_index(x + 1, y))
            } else if geometry.boundary_x == Boundary::Periodic {
                Some(geometry.site_index(0, y))
            } else {
                None
            };
            if let Some(nb) = x_bond {
                push_block(&mut trip, nb, site, &tx);
                push_block(&mut trip, site, nb, &tx.adjoint());
            }

            let y_bond = if y + 1 < ny {
                Some(geometry.site_index(x, y + 1))
            } else if geometry.boundary_y == Boundary::Periodic {
                Some(geometry.site_index(x, 0))
            } else {
                None
            };
            if let Some(nb) = y_bond {
                push_block(&mut trip, nb, site, &ty);
                push_block(&mut trip, site, nb, &ty.adjoint());
            }
        }
    }

    let matrix = CsrMatrix::from_triplets(dim, trip).map_err(|_| BhzError::NonFinitePotential)?;
    debug_assert_eq!(matrix.hermiticity_defect(), 0.0);
    Ok(SparseHamiltonian { matrix, geometry: *geometry, params: *params, spin_conserving })
}
