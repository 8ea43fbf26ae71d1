//! Extremal eigenpairs by Lanczos with full reorthogonalization.
//!
//! Degenerate edge eigenvalues are invisible to a single Krylov sequence,
//! so converged pairs are deflated and the iteration restarts on the
//! orthogonal complement until each spectral edge has `count` verified
//! pairs. Every accepted pair carries an explicitly recomputed residual.

use super::{canonicalize_phase, residual_norm, EigenPair, SolverError, SolverOptions};
use crate::sparse::{CsrMatrix, DENSE_CAP};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

const MAX_KRYLOV: usize = 300;
const CHECK_EVERY: usize = 5;

/// The `count` algebraically smallest and largest eigenpairs, ascending.
/// The two groups merge when they overlap (2*count >= dim).
pub fn extremal_eigs(
    h: &CsrMatrix,
    count: usize,
    opts: &SolverOptions,
) -> Result<Vec<EigenPair>, SolverError> {
    if count == 0 {
        return Err(SolverError::ZeroCount);
    }
    let dim = h.dim();

    if dim <= opts.dense_cutoff && dim <= DENSE_CAP {
        return dense_extremal(h, count);
    }

    let (lo, hi) = h.gershgorin_bounds();
    let radius = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let tol = opts.rel_tol * radius;
    let breakdown_tol = radius * 1e-13;
    let need = count.min(dim);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pool: Vec<EigenPair> = Vec::new();
    // verified frontier depth per spectral side
    let mut low_depth = 0usize;
    let mut high_depth = 0usize;

    for _restart in 0..(need + 3) {
        if (low_depth >= need && high_depth >= need) || pool.len() >= dim {
            break;
        }
        let run = lanczos_run(h, &pool, need, tol, breakdown_tol, dim.min(MAX_KRYLOV), &mut rng)?;
        if run.accepted.is_empty() {
            return Err(SolverError::NonConvergence {
                achieved: run.best_residual,
                required: tol,
                passes: dim.min(MAX_KRYLOV),
            });
        }
        low_depth += run.low_prefix;
        high_depth += run.high_suffix;
        pool.extend(run.accepted);
        pool.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    }
    if (low_depth < need || high_depth < need) && pool.len() < dim {
        return Err(SolverError::NonConvergence {
            achieved: f64::INFINITY,
            required: tol,
            passes: need + 3,
        });
    }

    let mut keep: BTreeSet<usize> = BTreeSet::new();
    for i in 0..need.min(pool.len()) {
        keep.insert(i);
    }
    for i in pool.len().saturating_sub(need)..pool.len() {
        keep.insert(i);
    }
    let mut out: Vec<EigenPair> = Vec::with_capacity(keep.len());
    for (i, p) in pool.into_iter().enumerate() {
        if keep.contains(&i) {
            out.push(p);
        }
    }
    Ok(out)
}

struct RunOutcome {
    accepted: Vec<EigenPair>,
    /// How many of the run's algebraically smallest Ritz values were
    /// verified as a contiguous prefix; these extend the global frontier.
    low_prefix: usize,
    high_suffix: usize,
    best_residual: f64,
}

/// One Lanczos sweep on the orthogonal complement of `deflated`.
fn lanczos_run(
    h: &CsrMatrix,
    deflated: &[EigenPair],
    need: usize,
    tol: f64,
    breakdown_tol: f64,
    m_max: usize,
    rng: &mut ChaCha8Rng,
) -> Result<RunOutcome, SolverError> {
    let dim = h.dim();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut v = random_orthonormal_start(dim, deflated, rng)?;
    basis.push(v.clone());
    let mut w = vec![Complex64::default(); dim];
    let mut best_residual = f64::INFINITY;

    for j in 0..m_max {
        h.apply_into(&v, &mut w);
        if j > 0 {
            let beta = betas[j - 1];
            for (wi, pi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= Complex64::new(beta, 0.0) * pi;
            }
        }
        let alpha = dot(&basis[j], &w).re;
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= Complex64::new(alpha, 0.0) * vi;
        }
        // full reorthogonalization, two sweeps, deflated set included
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= proj * bi;
                }
            }
            for d in deflated {
                let proj = dot(&d.vector, &w);
                for (wi, di) in w.iter_mut().zip(&d.vector) {
                    *wi -= proj * di;
                }
            }
        }
        let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

        let exhausted = beta < breakdown_tol;
        let at_cap = j + 1 == m_max;
        let m = alphas.len();
        if exhausted || at_cap || (m >= 2 && m % CHECK_EVERY == 0) {
            let mut outcome =
                harvest_edges(h, &basis, &alphas, &betas, beta, need, tol, exhausted)?;
            best_residual = best_residual.min(outcome.best_residual);
            if outcome.low_prefix > 0 || outcome.high_suffix > 0 || exhausted {
                outcome.best_residual = best_residual;
                return Ok(outcome);
            }
        }
        if exhausted || at_cap {
            break;
        }
        betas.push(beta);
        v = w.iter().map(|z| z / beta).collect();
        basis.push(v.clone());
    }
    Ok(RunOutcome { accepted: Vec::new(), low_prefix: 0, high_suffix: 0, best_residual })
}

/// Diagonalize the tridiagonal projection; verify edge Ritz pairs as a
/// contiguous prefix from each end so frontier accounting stays sound.
#[allow(clippy::too_many_arguments)]
fn harvest_edges(
    h: &CsrMatrix,
    basis: &[Vec<Complex64>],
    alphas: &[f64],
    betas: &[f64],
    beta_last: f64,
    need: usize,
    tol: f64,
    exhausted: bool,
) -> Result<RunOutcome, SolverError> {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = nalgebra::linalg::SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap().then(a.cmp(&b))
    });

    let mut accepted: Vec<EigenPair> = Vec::new();
    let mut best_residual = f64::INFINITY;
    let limit = need.min(m);

    let mut claimed: BTreeSet<usize> = BTreeSet::new();
    let mut low_prefix = 0usize;
    for i in 0..limit {
        match verify_ritz(h, basis, &eig, order[i], beta_last, tol, exhausted)? {
            Some(pair) => {
                best_residual = best_residual.min(pair.residual);
                accepted.push(pair);
                claimed.insert(order[i]);
                low_prefix += 1;
            }
            None => break,
        }
    }
    let mut high_suffix = 0usize;
    for i in 0..limit {
        let k = order[m - 1 - i];
        // the ends met: every unclaimed pair is already accounted for
        if claimed.contains(&k) {
            break;
        }
        match verify_ritz(h, basis, &eig, k, beta_last, tol, exhausted)? {
            Some(pair) => {
                best_residual = best_residual.min(pair.residual);
                accepted.push(pair);
                claimed.insert(k);
                high_suffix += 1;
            }
            None => break,
        }
    }
    accepted.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    Ok(RunOutcome { accepted, low_prefix, high_suffix, best_residual })
}

fn verify_ritz(
    h: &CsrMatrix,
    basis: &[Vec<Complex64>],
    eig: &nalgebra::linalg::SymmetricEigen<f64, nalgebra::Dyn>,
    k: usize,
    beta_last: f64,
    tol: f64,
    exhausted: bool,
) -> Result<Option<EigenPair>, SolverError> {
    let m = basis.len();
    let bound = beta_last * eig.eigenvectors[(m - 1, k)].abs();
    if !exhausted && bound > tol {
        return Ok(None);
    }
    let dim = basis[0].len();
    let mut x = vec![Complex64::default(); dim];
    for (i, b) in basis.iter().enumerate() {
        let weight = eig.eigenvectors[(i, k)];
        if weight == 0.0 {
            continue;
        }
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi += Complex64::new(weight, 0.0) * bi;
        }
    }
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 {
        return Ok(None);
    }
    for z in x.iter_mut() {
        *z /= n;
    }
    canonicalize_phase(&mut x);
    let hx = h.matvec(&x)?;
    let energy = eig.eigenvalues[k];
    let residual = residual_norm(&hx, &x, energy);
    if residual < tol {
        Ok(Some(EigenPair { energy, vector: x, residual }))
    } else {
        Ok(None)
    }
}

fn random_orthonormal_start(
    dim: usize,
    deflated: &[EigenPair],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Complex64>, SolverError> {
    for _ in 0..8 {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for _ in 0..2 {
            for d in deflated {
                let proj = dot(&d.vector, &v);
                for (vi, di) in v.iter_mut().zip(&d.vector) {
                    *vi -= proj * di;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            for z in v.iter_mut() {
                *z /= n;
            }
            return Ok(v);
        }
    }
    Err(SolverError::Breakdown { restarts: 8 })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn dense_extremal(h: &CsrMatrix, count: usize) -> Result<Vec<EigenPair>, SolverError> {
    let eig = nalgebra::linalg::SymmetricEigen::new(h.to_dense()?);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap().then(a.cmp(&b))
    });
    let need = count.min(n);
    let mut keep: BTreeSet<usize> = BTreeSet::new();
    for i in 0..need {
        keep.insert(order[i]);
        keep.insert(order[n - 1 - i]);
    }
    let mut out = Vec::with_capacity(keep.len());
    for &k in &keep {
        let mut vector: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
        canonicalize_phase(&mut vector);
        let hv = h.matvec(&vector)?;
        let energy = eig.eigenvalues[k];
        let residual = residual_norm(&hv, &vector, energy);
        out.push(EigenPair { energy, vector, residual });
    }
    out.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::dense_spectrum;

    fn seeded_hermitian(dim: usize, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut triplets = Vec::new();
        for i in 0..dim {
            triplets.push((i, i, Complex64::new(rng.gen_range(-2.0..2.0), 0.0)));
        }
        for i in 0..dim {
            let j = (i + 1 + (i % 7)) % dim;
            if i == j {
                continue;
            }
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            triplets.push((i, j, z));
            triplets.push((j, i, z.conj()));
        }
        CsrMatrix::from_triplets(dim, triplets).unwrap()
    }

    #[test]
    fn matches_dense_oracle_on_both_edges() {
        let h = seeded_hermitian(150, 11);
        let spectrum = dense_spectrum(&h).unwrap();
        let opts = SolverOptions { dense_cutoff: 0, ..Default::default() };
        let pairs = extremal_eigs(&h, 2, &opts).unwrap();
        assert_eq!(pairs.len(), 4);
        let want = [spectrum[0], spectrum[1], spectrum[148], spectrum[149]];
        for (p, w) in pairs.iter().zip(want) {
            assert!((p.energy - w).abs() < 1e-7, "got {} want {}", p.energy, w);
        }
    }

    #[test]
    fn degenerate_edges_give_full_multiplicity() {
        // two-point spectrum, fourfold each: plain Krylov sees one copy,
        // deflated restarts must find the rest
        let m = 3.25f64;
        let vals: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { m } else { -m }).collect();
        let triplets: Vec<(usize, usize, Complex64)> = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i, Complex64::new(v, 0.0)))
            .collect();
        let h = CsrMatrix::from_triplets(8, triplets).unwrap();
        let opts = SolverOptions { dense_cutoff: 0, ..Default::default() };
        let pairs = extremal_eigs(&h, 2, &opts).unwrap();
        assert_eq!(pairs.len(), 4);
        assert!((pairs[0].energy + m).abs() < 1e-9);
        assert!((pairs[1].energy + m).abs() < 1e-9);
        assert!((pairs[2].energy - m).abs() < 1e-9);
        assert!((pairs[3].energy - m).abs() < 1e-9);
        // the two copies per edge are independent directions
        let overlap: Complex64 = pairs[0]
            .vector
            .iter()
            .zip(&pairs[1].vector)
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(overlap.norm() < 1e-8);
    }

    #[test]
    fn zero_count_is_rejected() {
        let h = seeded_hermitian(10, 3);
        assert!(matches!(
            extremal_eigs(&h, 0, &SolverOptions::default()),
            Err(SolverError::ZeroCount)
        ));
    }
}
