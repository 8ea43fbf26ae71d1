//! Transverse decay length of an edge-localized state.
//!
//! The profile rho(y) sums |psi|^2 over x and the four local components.
//! An exponential envelope rho ~ exp(-2y/xi) is fit by least squares on
//! ln rho over the monotone part of the tail, and the amplitude 1/e
//! length xi is returned in the same unit as the lattice constant.

use super::MapError;
use crate::bhz::DeviceGeometry;
use crate::spectra::EigenPair;

/// Fraction of total weight that must sit in the outer quarter rows for
/// the state to count as an edge state at all.
const EDGE_WEIGHT_MIN: f64 = 0.6;
/// The fit stops once the profile drops below this fraction of its peak,
/// before the tail of the opposite edge contaminates it.
const TAIL_FLOOR: f64 = 0.08;

pub fn decay_length(
    pair: &EigenPair,
    geometry: &DeviceGeometry,
    lattice_constant: f64,
) -> Result<f64, MapError> {
    let expected = geometry.dimension();
    if pair.vector.len() != expected {
        return Err(MapError::DimensionMismatch { expected, got: pair.vector.len() });
    }
    let (nx, ny) = (geometry.nx, geometry.ny);

    let mut rho = vec![0.0; ny];
    for y in 0..ny {
        for x in 0..nx {
            let base = 4 * geometry.site_index(x, y);
            for c in 0..4 {
                rho[y] += pair.vector[base + c].norm_sqr();
            }
        }
    }
    let total: f64 = rho.iter().sum();
    if !(total > 0.0) {
        return Err(MapError::NotAnEdgeState { edge_fraction: 0.0 });
    }

    let quarter = (ny / 4).max(1);
    let outer: f64 = rho[..quarter].iter().sum::<f64>() + rho[ny - quarter..].iter().sum::<f64>();
    let edge_fraction = outer / total;
    if edge_fraction < EDGE_WEIGHT_MIN {
        return Err(MapError::NotAnEdgeState { edge_fraction });
    }

    // orient the profile so it decays away from y = 0
    let bottom: f64 = rho[..ny / 2].iter().sum();
    if bottom < total - bottom {
        rho.reverse();
    }

    let peak = (0..ny).max_by(|&a, &b| rho[a].total_cmp(&rho[b])).unwrap();
    let floor = TAIL_FLOOR * rho[peak];
    let mut end = peak;
    while end + 1 < ny && rho[end + 1] < rho[end] && rho[end + 1] >= floor {
        end += 1;
    }
    if end - peak + 1 < 3 {
        return Err(MapError::FitFailed { reason: "monotone tail shorter than three rows" });
    }

    let pts: Vec<(f64, f64)> = (peak..=end).map(|y| (y as f64, rho[y].ln())).collect();
    let n = pts.len() as f64;
    let x_bar = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let z_bar = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - x_bar) * (p.0 - x_bar)).sum();
    let sxz: f64 = pts.iter().map(|p| (p.0 - x_bar) * (p.1 - z_bar)).sum();
    let slope = sxz / sxx;
    if !(slope < 0.0) {
        return Err(MapError::FitFailed { reason: "tail does not decay" });
    }
    Ok(-2.0 / slope * lattice_constant)
}
