//! Interior window solver. Works on the folded operator (H - sigma)^2,
//! whose smallest eigenvalues are the states nearest the window center,
//! and suppresses everything else with a Chebyshev polynomial filter
//! before Rayleigh-Ritz extraction on H itself. Ritz on H, not on the
//! fold, cleanly separates the +E/-E partners that the fold degenerates.

use super::{
    canonicalize_phase, dense_window_pairs, orthonormalize_clusters, residual_norm, EigenPair,
    SolveReport, SolverError, SolverOptions, SpectralWindow,
};
use crate::sparse::{CsrMatrix, DENSE_CAP};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Per-pass amplification exponent of the deepest in-window state.
const TARGET_EXPONENT: f64 = 5.0;
const MIN_DEGREE: usize = 8;
const MAX_DEGREE: usize = 20_000;
const MAX_RESTARTS: usize = 100;

pub fn interior_eigs_with_report(
    h: &CsrMatrix,
    window: &SpectralWindow,
    opts: &SolverOptions,
) -> Result<(Vec<EigenPair>, SolveReport), SolverError> {
    // fields are public, so revalidate
    let window = SpectralWindow::new(window.e_min, window.e_max, window.max_pairs)?;
    let dim = h.dim();

    let mut report = SolveReport::default();
    report.spectral_bounds = h.gershgorin_bounds();

    if dim <= opts.dense_cutoff && dim <= DENSE_CAP {
        let (pairs, truncated) = dense_window_pairs(h, &window)?;
        report.dense_path = true;
        report.converged = true;
        report.truncated = truncated;
        report.found = pairs.len();
        return Ok((pairs, report));
    }

    let (lo, hi) = report.spectral_bounds;
    let radius = lo.abs().max(hi.abs());
    let abs_tol = opts.rel_tol * radius.max(f64::MIN_POSITIVE);
    report.tolerance = abs_tol;

    let sigma = window.center();
    let delta = window.half_width();
    let r_fold = ((lo - sigma) * (lo - sigma)).max((hi - sigma) * (hi - sigma)).max(1e-30);
    // First-pass passband edge; later passes move it to the block's own
    // worst folded Rayleigh quotient so the wanted states separate from
    // the first state the block cannot hold. A cut fixed at the window
    // scale gives every near-center state the same gain and stalls.
    let mut cut = (4.0 * delta * delta).min(0.25 * r_fold);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut p = opts.block_size.unwrap_or(8).max(2).min(dim);
    let growth_cap = (2 * (window.max_pairs + 2)).max(32).min(dim).max(p);

    let mut block: Vec<Vec<Complex64>> = (0..p).map(|_| random_vector(dim, &mut rng)).collect();
    let mut restarts = 0usize;
    mgs(&mut block, dim, &mut rng, &mut restarts)?;

    let mut tmp1 = vec![Complex64::default(); dim];
    let mut tmp2 = vec![Complex64::default(); dim];
    let mut tmp3 = vec![Complex64::default(); dim];

    let mut theta: Vec<f64> = Vec::new();
    let mut resid: Vec<f64> = Vec::new();
    let mut success = false;
    let mut last_growth_pass = 0usize;

    while report.passes < opts.max_passes {
        report.passes += 1;

        let degree = {
            let eta = (cut / r_fold).sqrt();
            let d = (TARGET_EXPONENT / (2.0 * eta)).ceil() as usize;
            d.clamp(MIN_DEGREE, MAX_DEGREE)
        };
        report.filter_degree = degree;
        // map [cut, r_fold] onto [-1, 1] so the filter suppresses it
        let map_center = 0.5 * (r_fold + cut);
        let map_half_inv = 2.0 / (r_fold - cut);

        for col in block.iter_mut() {
            chebyshev_filter(
                h, sigma, map_center, map_half_inv, degree, col, &mut tmp1, &mut tmp2, &mut tmp3,
            );
            report.matvecs += 2 * degree;
        }
        mgs(&mut block, dim, &mut rng, &mut restarts)?;

        // Rayleigh-Ritz on H over the filtered block
        let mut ys: Vec<Vec<Complex64>> = Vec::with_capacity(p);
        for col in &block {
            let mut y = vec![Complex64::default(); dim];
            h.apply_into(col, &mut y);
            report.matvecs += 1;
            ys.push(y);
        }
        let mut b = DMatrix::<Complex64>::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                b[(i, j)] = dot(&block[i], &ys[j]);
            }
        }
        let b = (b.clone() + b.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = nalgebra::linalg::SymmetricEigen::new(b);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &bb| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[bb])
                .unwrap()
                .then(a.cmp(&bb))
        });

        let mut new_block: Vec<Vec<Complex64>> = Vec::with_capacity(p);
        theta.clear();
        resid.clear();
        let mut y = vec![Complex64::default(); dim];
        for &k in &order {
            let mut x = vec![Complex64::default(); dim];
            y.iter_mut().for_each(|z| *z = Complex64::default());
            for i in 0..p {
                let w = eig.eigenvectors[(i, k)];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                axpy(w, &block[i], &mut x);
                axpy(w, &ys[i], &mut y);
            }
            let t = eig.eigenvalues[k];
            theta.push(t);
            resid.push(residual_norm(&y, &x, t));
            new_block.push(x);
        }
        block = new_block;

        let worst_in_window = theta
            .iter()
            .zip(&resid)
            .filter(|(t, _)| window.contains(**t))
            .map(|(_, r)| *r)
            .fold(0.0f64, f64::max);
        report.residual_history.push(worst_in_window);

        let all_converged = theta
            .iter()
            .zip(&resid)
            .all(|(t, r)| !window.contains(*t) || *r < abs_tol);
        // a pair certainly beyond the window edge seals the window
        let sealed = theta
            .iter()
            .zip(&resid)
            .any(|(t, r)| (t - sigma).abs() - r > delta);

        if all_converged && sealed {
            success = true;
            break;
        }

        let in_window_total = theta.iter().filter(|t| window.contains(**t)).count();

        // Capped exit: once max_pairs converged pairs sit nearest the
        // center and every straggler column provably lives farther out
        // in the fold, the capped answer cannot change any more.
        // ||(H - sigma) x||^2 = (theta - sigma)^2 + residual^2 exactly.
        if report.passes >= 3 {
            let mut conv_in: Vec<usize> = (0..theta.len())
                .filter(|&i| window.contains(theta[i]) && resid[i] < abs_tol)
                .collect();
            conv_in.sort_by(|&a, &b| {
                (theta[a] - sigma)
                    .abs()
                    .partial_cmp(&(theta[b] - sigma).abs())
                    .unwrap()
                    .then(a.cmp(&b))
            });
            if conv_in.len() >= window.max_pairs && in_window_total > window.max_pairs {
                let edge = theta[conv_in[window.max_pairs - 1]] - sigma;
                let threshold = 4.0 * edge * edge + 1e-12 * r_fold;
                let strays_far = (0..theta.len())
                    .filter(|&i| resid[i] >= abs_tol)
                    .all(|i| {
                        let d = theta[i] - sigma;
                        d * d + resid[i] * resid[i] > threshold
                    });
                if strays_far {
                    report.truncated = true;
                    success = true;
                    break;
                }
            }
        }

        // A block saturated with in-window Ritz values cannot see the
        // window boundary, and a stalled residual means a state the block
        // cannot hold sits at the passband edge with unit gain; both are
        // cured by more columns, never by more filtering.
        let saturated = in_window_total + 1 >= p;
        let stalled = {
            let h = &report.residual_history;
            !all_converged
                && report.passes >= last_growth_pass + 3
                && h.len() >= 3
                && h[h.len() - 1] > 0.0
                && h[h.len() - 1] > 0.5 * h[h.len() - 3]
        };

        let mut grew = false;
        if (saturated || stalled || (all_converged && !sealed)) && p < growth_cap {
            let grown = (2 * p).min(growth_cap);
            while block.len() < grown {
                block.push(random_vector(dim, &mut rng));
            }
            p = grown;
            mgs(&mut block, dim, &mut rng, &mut restarts)?;
            grew = true;
            last_growth_pass = report.passes;
            cut = (4.0 * delta * delta).min(0.25 * r_fold);
        } else if all_converged && !sealed && resid.iter().all(|r| *r < abs_tol) {
            // the whole block converged and nothing lies beyond the
            // window: the block simply holds the entire spectrum
            success = true;
            break;
        }
        if !grew {
            let folded_max = theta
                .iter()
                .zip(&resid)
                .map(|(t, r)| (t - sigma) * (t - sigma) + r * r)
                .fold(0.0f64, f64::max);
            cut = folded_max.min(0.5 * r_fold).max(1e-14 * r_fold);
        }
    }
    report.block_size = p;

    if !success {
        let achieved = report.residual_history.last().copied().unwrap_or(f64::INFINITY);
        return Err(SolverError::NonConvergence {
            achieved,
            required: abs_tol,
            passes: report.passes,
        });
    }

    // collect converged in-window pairs with fresh residuals; stragglers
    // only exist on a capped exit and were certified farther out
    let mut pairs: Vec<EigenPair> = Vec::new();
    for (k, t) in theta.iter().enumerate() {
        if !window.contains(*t) || resid[k] >= abs_tol {
            continue;
        }
        let mut vector = std::mem::take(&mut block[k]);
        canonicalize_phase(&mut vector);
        h.apply_into(&vector, &mut tmp1);
        report.matvecs += 1;
        let residual = residual_norm(&tmp1, &vector, *t);
        if residual >= abs_tol {
            return Err(SolverError::NonConvergence {
                achieved: residual,
                required: abs_tol,
                passes: report.passes,
            });
        }
        pairs.push(EigenPair { energy: *t, vector, residual });
    }
    pairs.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    if pairs.len() > window.max_pairs {
        report.truncated = true;
        pairs.sort_by(|a, b| {
            (a.energy - sigma)
                .abs()
                .partial_cmp(&(b.energy - sigma).abs())
                .unwrap()
                .then(a.energy.partial_cmp(&b.energy).unwrap())
        });
        pairs.truncate(window.max_pairs);
        pairs.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    }
    orthonormalize_clusters(&mut pairs);
    report.converged = true;
    report.found = pairs.len();
    Ok((pairs, report))
}

fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Modified Gram-Schmidt with a second sweep; dead columns are replaced
/// with fresh random draws so the block keeps full rank.
fn mgs(
    block: &mut Vec<Vec<Complex64>>,
    dim: usize,
    rng: &mut ChaCha8Rng,
    restarts: &mut usize,
) -> Result<(), SolverError> {
    let n = block.len();
    for j in 0..n {
        let mut attempts = 0;
        loop {
            for _sweep in 0..2 {
                for i in 0..j {
                    let (head, tail) = block.split_at_mut(j);
                    let proj = dot(&head[i], &tail[0]);
                    let minus = -proj;
                    axpy(minus, &head[i], &mut tail[0]);
                }
            }
            let nrm = block[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 1e-12 {
                for z in block[j].iter_mut() {
                    *z /= nrm;
                }
                break;
            }
            *restarts += 1;
            attempts += 1;
            if *restarts > MAX_RESTARTS || attempts > 5 {
                return Err(SolverError::Breakdown { restarts: *restarts });
            }
            block[j] = random_vector(dim, rng);
        }
    }
    Ok(())
}

/// In-place Chebyshev filter of one column against the mapped fold.
#[allow(clippy::too_many_arguments)]
fn chebyshev_filter(
    h: &CsrMatrix,
    sigma: f64,
    map_center: f64,
    map_half_inv: f64,
    degree: usize,
    col: &mut Vec<Complex64>,
    t0: &mut Vec<Complex64>,
    t1: &mut Vec<Complex64>,
    scratch: &mut Vec<Complex64>,
) {
    // t_next = A~ col where A~ = ((H-sigma)^2 - center) / half
    let apply_mapped =
        |x: &[Complex64], out: &mut Vec<Complex64>, tmp: &mut Vec<Complex64>, h: &CsrMatrix| {
            h.apply_into(x, tmp);
            for (t, xv) in tmp.iter_mut().zip(x) {
                *t -= Complex64::new(sigma, 0.0) * xv;
            }
            h.apply_into(tmp, out);
            for ((o, t), xv) in out.iter_mut().zip(tmp.iter()).zip(x) {
                *o = (*o - Complex64::new(sigma, 0.0) * t - Complex64::new(map_center, 0.0) * xv)
                    * map_half_inv;
            }
        };

    t0.copy_from_slice(col);
    apply_mapped(t0, t1, scratch, h);
    for _ in 2..=degree {
        apply_mapped(t1, col, scratch, h);
        for (c, z) in col.iter_mut().zip(t0.iter()) {
            *c = 2.0 * *c - z;
        }
        std::mem::swap(t0, t1);
        std::mem::swap(t1, col);
    }
    col.copy_from_slice(t1);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CsrMatrix;

    fn diag_matrix(values: &[f64]) -> CsrMatrix {
        let triplets: Vec<(usize, usize, Complex64)> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i, Complex64::new(v, 0.0)))
            .collect();
        CsrMatrix::from_triplets(values.len(), triplets).unwrap()
    }

    #[test]
    fn diagonal_window_via_filter_path() {
        // force the iterative path with a tiny dense cutoff
        let vals: Vec<f64> = (0..40).map(|i| i as f64 * 0.5 - 10.0).collect();
        let h = diag_matrix(&vals);
        let window = SpectralWindow::new(-0.6, 0.6, 10).unwrap();
        let opts = SolverOptions { dense_cutoff: 0, ..Default::default() };
        let (pairs, report) = interior_eigs_with_report(&h, &window, &opts).unwrap();
        let expect: Vec<f64> = vals.iter().copied().filter(|e| e.abs() <= 0.6).collect();
        assert_eq!(pairs.len(), expect.len());
        for (p, e) in pairs.iter().zip(expect) {
            assert!((p.energy - e).abs() < 1e-8, "got {} want {}", p.energy, e);
            assert!(p.residual < report.tolerance);
        }
        assert!(report.converged);
        assert!(!report.truncated);
        assert!(!report.dense_path);
    }

    #[test]
    fn empty_window_certified() {
        let vals: Vec<f64> = (0..30).map(|i| 2.0 + i as f64).collect();
        let h = diag_matrix(&vals);
        let window = SpectralWindow::new(-1.0, 1.0, 5).unwrap();
        let opts = SolverOptions { dense_cutoff: 0, ..Default::default() };
        let (pairs, report) = interior_eigs_with_report(&h, &window, &opts).unwrap();
        assert!(pairs.is_empty());
        assert!(report.converged);
    }

    #[test]
    fn cap_keeps_states_nearest_center() {
        let vals: Vec<f64> = (0..50).map(|i| i as f64 * 0.1 - 2.45).collect();
        let h = diag_matrix(&vals);
        // window spans everything, cap at 4
        let window = SpectralWindow::new(-3.0, 3.0, 4).unwrap();
        let opts = SolverOptions { dense_cutoff: 0, ..Default::default() };
        let (pairs, report) = interior_eigs_with_report(&h, &window, &opts).unwrap();
        assert_eq!(pairs.len(), 4);
        assert!(report.truncated);
        for p in &pairs {
            assert!(p.energy.abs() < 0.3, "kept {} far from center", p.energy);
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let vals: Vec<f64> = (0..36).map(|i| (i as f64 * 0.37).sin() * 4.0).collect();
        let h = diag_matrix(&vals);
        let window = SpectralWindow::new(-0.5, 0.5, 8).unwrap();
        let opts = SolverOptions { dense_cutoff: 0, ..Default::default() };
        let (a, _) = interior_eigs_with_report(&h, &window, &opts).unwrap();
        let (b, _) = interior_eigs_with_report(&h, &window, &opts).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.energy.to_bits(), y.energy.to_bits());
            for (u, v) in x.vector.iter().zip(&y.vector) {
                assert_eq!(u.re.to_bits(), v.re.to_bits());
                assert_eq!(u.im.to_bits(), v.im.to_bits());
            }
        }
    }
}
