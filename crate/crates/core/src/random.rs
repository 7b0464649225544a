//! Seeded test-input generators.
//!
//! All generators draw from a ChaCha8 stream seeded with the given `u64`, so
//! a seed always produces the same matrix on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::qr;
use crate::matrix::Matrix;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with independent entries uniform in `[-1, 1)`.
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    uniform_matrix(rows, cols, &mut r)
}

pub(crate) fn uniform_matrix(rows: usize, cols: usize, r: &mut impl Rng) -> Matrix {
    let data = (0..rows * cols).map(|_| r.gen_range(-1.0..1.0)).collect();
    Matrix::new(rows, cols, data).expect("finite entries")
}

/// Orthogonal matrix from the QR factor of a random square matrix.
pub fn random_orthogonal(n: usize, seed: u64) -> Matrix {
    let g = random_matrix(n, n, seed);
    qr(&g).expect("square input").0
}

/// Symmetric positive definite `GᵀG + I`.
pub fn random_spd(n: usize, seed: u64) -> Matrix {
    let g = random_matrix(n, n, seed);
    let gtg = &g.transpose() * &g;
    (&gtg + &Matrix::identity(n)).symmetric_part()
}

/// Skew-symmetric `G − Gᵀ`.
pub fn random_skew(n: usize, seed: u64) -> Matrix {
    let g = random_matrix(n, n, seed);
    &g - &g.transpose()
}

/// Block-diagonal `diag(real_eigs) ⊕ [[α, β], [−β, α]] ⊕ …`.
pub fn canonical_block_matrix(real_eigs: &[f64], blocks: &[(f64, f64)]) -> Matrix {
    let n = real_eigs.len() + 2 * blocks.len();
    let mut d = Matrix::zeros(n, n);
    for (i, &x) in real_eigs.iter().enumerate() {
        d[(i, i)] = x;
    }
    let k = real_eigs.len();
    for (j, &(alpha, beta)) in blocks.iter().enumerate() {
        let i = k + 2 * j;
        d[(i, i)] = alpha;
        d[(i + 1, i + 1)] = alpha;
        d[(i, i + 1)] = beta;
        d[(i + 1, i)] = -beta;
    }
    d
}

/// A random normal matrix `Qᵀ D Q` together with the spectral data of `D`.
#[derive(Clone, Debug)]
pub struct NormalSample {
    pub matrix: Matrix,
    pub real_eigs: Vec<f64>,
    /// `(α, β)` with `β > 0`.
    pub blocks: Vec<(f64, f64)>,
}

/// Random normal `n x n` matrix. Real eigenvalues are uniform in `[-3, 3)`,
/// block centres uniform in `[-3, 3)` and block widths `β` in `[0.2, 3)`.
pub fn random_normal(n: usize, seed: u64) -> NormalSample {
    let mut r = rng(seed);
    let max_blocks = n / 2;
    let n_blocks = r.gen_range(0..=max_blocks);
    let n_real = n - 2 * n_blocks;
    let real_eigs: Vec<f64> = (0..n_real).map(|_| r.gen_range(-3.0..3.0)).collect();
    let blocks: Vec<(f64, f64)> = (0..n_blocks)
        .map(|_| (r.gen_range(-3.0..3.0), r.gen_range(0.2..3.0)))
        .collect();
    let d = canonical_block_matrix(&real_eigs, &blocks);
    let q = qr(&uniform_matrix(n, n, &mut r)).expect("square input").0;
    let matrix = &(&q.transpose() * &d) * &q;
    NormalSample {
        matrix,
        real_eigs,
        blocks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_seeded() {
        assert_eq!(random_matrix(3, 2, 42), random_matrix(3, 2, 42));
        assert_ne!(random_matrix(3, 2, 42), random_matrix(3, 2, 43));
    }

    #[test]
    fn generated_matrices_have_their_structure() {
        assert!(random_orthogonal(6, 1).orthogonality_defect() < 1e-13);
        assert_eq!(random_spd(5, 2).asymmetry(), 0.0);
        assert_eq!(random_skew(5, 3).skew_defect(), 0.0);
        let s = random_normal(7, 4);
        assert_eq!(s.real_eigs.len() + 2 * s.blocks.len(), 7);
        let a = &s.matrix;
        let comm = &(a * &a.transpose()) - &(&a.transpose() * a);
        assert!(comm.frobenius_norm() < 1e-12 * a.frobenius_norm().powi(2));
    }
}
