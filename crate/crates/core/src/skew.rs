//! Canonical form of real skew-symmetric matrices.
//!
//! A skew-symmetric `S` is orthogonally equivalent to a direct sum of 2×2
//! blocks `[[0, −p], [p, 0]]` and a zero block. Grouping the first vectors of
//! every block ahead of the second vectors gives the split arrangement
//!
//! ```text
//! S = vᵀ · [[0, −P], [P, 0]] ⊕ 0 · v,    P = diag(p₁ ≥ p₂ ≥ … > 0)
//! ```
//!
//! which for invertible `S` is the global `K ⊕ K` form. Two routes are
//! provided: [`skew_canonical`] pairs eigenvectors of `SᵀS`, and
//! [`skew_canonical_cyclic`] builds the even/odd cyclic subspaces of a
//! starting vector and applies a polar decomposition to the coupling block.

use crate::error::{Error, Result};
use crate::linalg::{polar_decompose, sym_eig, DEFAULT_EIG_TOL};
use crate::matrix::Matrix;
use crate::vecops::{norm, orthogonalize, scale, unit};

/// Default skewness tolerance, relative to `‖s‖_F`.
pub const DEFAULT_SKEW_TOL: f64 = 1e-10;

/// Block scalars at or below `KERNEL_REL · ‖s‖_F` count as kernel.
pub const KERNEL_REL: f64 = 1e-10;

// Consecutive SᵀS eigenvalues closer than this (relative to the largest)
// are handled as one pairing cluster.
const CLUSTER_REL: f64 = 1e-10;

// A candidate whose residual against the extracted vectors is below this
// norm carries no new direction.
const PIVOT_MIN: f64 = 1e-2;

// Allowed drift of ‖s u‖² outside its cluster's eigenvalue range.
const PAIRING_REL: f64 = 1e-8;

// Deflation restarts take the first standard basis vector whose component
// in the unexplored complement exceeds this norm.
pub(crate) const RESTART_MIN: f64 = 1e-8;

/// Orthogonal reduction of a skew-symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewCanonicalForm {
    /// Orthogonal `n x n`. Rows `0..k` are the vectors `u_j`, rows `k..2k`
    /// their partners `w_j = s·u_j / p_j`, the remaining rows span the
    /// kernel.
    pub v: Matrix,
    /// Block scalars, descending.
    pub p: Vec<f64>,
    pub kernel_dim: usize,
}

impl SkewCanonicalForm {
    pub fn dim(&self) -> usize {
        self.v.rows()
    }

    /// The pair `(u_j, w_j)` spanning the `j`-th invariant plane, with
    /// `s·u_j = p_j·w_j` and `s·w_j = −p_j·u_j`.
    pub fn pair(&self, j: usize) -> (Vec<f64>, Vec<f64>) {
        let k = self.p.len();
        (self.v.row(j).to_vec(), self.v.row(k + j).to_vec())
    }

    pub fn kernel_vectors(&self) -> Vec<Vec<f64>> {
        let start = 2 * self.p.len();
        (start..self.dim()).map(|i| self.v.row(i).to_vec()).collect()
    }

    /// `[[0, −P], [P, 0]] ⊕ 0_{kernel}`.
    pub fn split_matrix(&self) -> Matrix {
        let n = self.dim();
        let k = self.p.len();
        let mut m = Matrix::zeros(n, n);
        for (j, &pj) in self.p.iter().enumerate() {
            m[(j, k + j)] = -pj;
            m[(k + j, j)] = pj;
        }
        m
    }

    /// `vᵀ · split_matrix() · v`.
    pub fn reconstruct(&self) -> Matrix {
        let vt = self.v.transpose();
        &(&vt * &self.split_matrix()) * &self.v
    }

    /// Orthogonal matrix with rows `u₁, w₁, u₂, w₂, …, kernel`; it reduces
    /// `s` to the interleaved block diagonal of [`Self::block_matrix`].
    pub fn block_basis(&self) -> Matrix {
        let n = self.dim();
        let k = self.p.len();
        let mut b = Matrix::zeros(n, n);
        for j in 0..k {
            b.set_row(2 * j, self.v.row(j));
            b.set_row(2 * j + 1, self.v.row(k + j));
        }
        for i in 2 * k..n {
            b.set_row(i, self.v.row(i));
        }
        b
    }

    /// `blockdiag([[0, −p₁], [p₁, 0]], …, 0_{kernel})`.
    pub fn block_matrix(&self) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (j, &pj) in self.p.iter().enumerate() {
            m[(2 * j, 2 * j + 1)] = -pj;
            m[(2 * j + 1, 2 * j)] = pj;
        }
        m
    }
}

fn check_skew(s: &Matrix, tol: f64) -> Result<Matrix> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let norm = s.frobenius_norm();
    let defect = s.skew_defect();
    if defect > tol * norm {
        return Err(Error::NotSkew {
            defect: defect / norm,
        });
    }
    Ok(s.skew_part())
}

/// Canonical form via the eigenvectors of `sᵀs = −s²`.
///
/// Each eigenspace of `sᵀs` for `p² > 0` is even dimensional and invariant
/// under `s`. Inside it a unit vector `u` is paired with `w = s·u / p`, the
/// pair is removed, and the process repeats on what is left.
pub fn skew_canonical(s: &Matrix, tol: f64) -> Result<SkewCanonicalForm> {
    let s = check_skew(s, tol)?;
    let kernel_abs = KERNEL_REL * s.frobenius_norm();
    reduce_skew(&s, kernel_abs)
}

/// Pairing reduction of an exactly skew-symmetric `s`; vectors `u` with
/// `‖s u‖ ≤ kernel_abs` are assigned to the kernel.
pub(crate) fn reduce_skew(s: &Matrix, kernel_abs: f64) -> Result<SkewCanonicalForm> {
    let n = s.rows();
    let g = (&s.transpose() * s).symmetric_part();
    let eig = sym_eig(&g, DEFAULT_EIG_TOL)?;
    let lam_max = eig.d[0].max(0.0);

    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || eig.d[i - 1] - eig.d[i] > CLUSTER_REL * lam_max {
            clusters.push((start, i));
            start = i;
        }
    }

    let mut extracted: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pairs: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut kernel: Vec<Vec<f64>> = Vec::new();
    let slack = PAIRING_REL * lam_max;

    for &(lo, hi) in &clusters {
        let d_hi = eig.d[lo];
        let d_lo = eig.d[hi - 1];
        let candidates: Vec<Vec<f64>> = (lo..hi).map(|j| eig.q.column(j)).collect();
        loop {
            let best = candidates
                .iter()
                .map(|c| {
                    let mut r = c.clone();
                    orthogonalize(&mut r, &extracted);
                    let nr = norm(&r);
                    (nr, r)
                })
                .fold(None::<(f64, Vec<f64>)>, |acc, cur| match acc {
                    Some(a) if a.0 >= cur.0 => Some(a),
                    _ => Some(cur),
                });
            let Some((nr, mut u)) = best else { break };
            if nr < PIVOT_MIN {
                break;
            }
            scale(1.0 / nr, &mut u);
            let su = s.mul_vec(&u);
            let p = norm(&su);
            if p <= kernel_abs {
                extracted.push(u.clone());
                kernel.push(u);
                continue;
            }
            let p2 = p * p;
            if p2 < d_lo - slack || p2 > d_hi + slack {
                return Err(Error::PairingBreakdown(format!(
                    "‖s·u‖² = {p2:e} outside eigenvalue cluster [{d_lo:e}, {d_hi:e}]"
                )));
            }
            let mut w = su;
            scale(1.0 / p, &mut w);
            extracted.push(u.clone());
            orthogonalize(&mut w, &extracted);
            let nw = norm(&w);
            if nw < 0.5 {
                return Err(Error::PairingBreakdown(format!(
                    "partner vector lost {:.3e} of its norm",
                    1.0 - nw
                )));
            }
            scale(1.0 / nw, &mut w);
            extracted.push(w.clone());
            pairs.push((p, u, w));
        }
    }

    if 2 * pairs.len() + kernel.len() != n {
        return Err(Error::PairingBreakdown(format!(
            "{} pairs and {} kernel vectors do not span dimension {n}",
            pairs.len(),
            kernel.len()
        )));
    }

    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(assemble_form(n, pairs, kernel))
}

fn assemble_form(
    n: usize,
    pairs: Vec<(f64, Vec<f64>, Vec<f64>)>,
    kernel: Vec<Vec<f64>>,
) -> SkewCanonicalForm {
    let k = pairs.len();
    let mut v = Matrix::zeros(n, n);
    for (j, (_, u, w)) in pairs.iter().enumerate() {
        v.set_row(j, u);
        v.set_row(k + j, w);
    }
    for (i, z) in kernel.iter().enumerate() {
        v.set_row(2 * k + i, z);
    }
    SkewCanonicalForm {
        v,
        p: pairs.into_iter().map(|(p, _, _)| p).collect(),
        kernel_dim: kernel.len(),
    }
}

/// Canonical form of an invertible skew-symmetric matrix from the cyclic
/// subspaces of a starting vector `x`.
///
/// `K = span{x, s²x, s⁴x, …}` and `N = span{s x, s³x, …}` are orthogonal and
/// `s` maps `K` onto `N`. When they do not fill the space the construction
/// restarts in the orthogonal complement. With `R = s|_K : K → N` written in
/// orthonormal bases, the polar decomposition `R = U·P` gives
/// `s = [K, N·U] · [[0, −P], [P, 0]] · [K, N·U]ᵀ`, and diagonalizing `P`
/// yields the canonical `p` list.
pub fn skew_canonical_cyclic(s: &Matrix, x: &[f64], tol: f64) -> Result<SkewCanonicalForm> {
    let s = check_skew(s, tol)?;
    let n = s.rows();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            left_rows: n,
            left_cols: n,
            right_rows: x.len(),
            right_cols: 1,
        });
    }
    if norm(x) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let s_norm = s.frobenius_norm();
    if n % 2 == 1 || s_norm == 0.0 {
        return Err(Error::Singular {
            sigma_min: 0.0,
            threshold: tol * s_norm,
        });
    }
    let rank_tol = 1e-10 * s_norm;

    let mut k_basis: Vec<Vec<f64>> = Vec::with_capacity(n / 2);
    let mut n_basis: Vec<Vec<f64>> = Vec::with_capacity(n / 2);
    let mut all: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut start = x.to_vec();
    let mut restarts = 0;

    loop {
        let mut k = start;
        orthogonalize(&mut k, &all);
        let nk = norm(&k);
        if nk == 0.0 {
            return Err(Error::KrylovBreakdown("starting vector lies in the explored span".into()));
        }
        scale(1.0 / nk, &mut k);
        loop {
            let mut nv = s.mul_vec(&k);
            all.push(k.clone());
            k_basis.push(k);
            orthogonalize(&mut nv, &all);
            let nn = norm(&nv);
            if nn <= rank_tol {
                return Err(Error::Singular {
                    sigma_min: nn,
                    threshold: rank_tol,
                });
            }
            scale(1.0 / nn, &mut nv);
            let mut kv = s.mul_vec(&nv);
            all.push(nv.clone());
            n_basis.push(nv);
            if all.len() >= n {
                break;
            }
            orthogonalize(&mut kv, &all);
            let nkv = norm(&kv);
            if nkv <= rank_tol {
                break;
            }
            scale(1.0 / nkv, &mut kv);
            k = kv;
        }
        if all.len() >= n {
            break;
        }
        restarts += 1;
        if restarts > n {
            return Err(Error::KrylovBreakdown(format!(
                "deflation budget of {n} restarts exhausted"
            )));
        }
        start = restart_vector(n, &all).ok_or_else(|| {
            Error::KrylovBreakdown("no standard basis vector reaches the complement".into())
        })?;
    }

    let m = k_basis.len();
    let kmat = Matrix::from_columns(n, &k_basis);
    let nmat = Matrix::from_columns(n, &n_basis);
    // R = Nᵀ s K, the coupling K → N
    let r = &(&nmat.transpose() * &s) * &kmat;
    let (u, p) = polar_decompose(&r, tol)?;
    let pe = sym_eig(&p.symmetric_part(), DEFAULT_EIG_TOL)?;
    let left = &kmat * &pe.q;
    let right = &(&nmat * &u) * &pe.q;

    let mut v = Matrix::zeros(n, n);
    for j in 0..m {
        v.set_row(j, &left.column(j));
        v.set_row(m + j, &right.column(j));
    }
    Ok(SkewCanonicalForm {
        v,
        p: pe.d,
        kernel_dim: 0,
    })
}

/// First `e_i` (projected onto the complement of `basis`) with norm above
/// [`RESTART_MIN`].
pub(crate) fn restart_vector(n: usize, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    (0..n).find_map(|i| {
        let mut e = unit(n, i);
        orthogonalize(&mut e, basis);
        (norm(&e) > RESTART_MIN).then_some(e)
    })
}

/// `vᵀ · [[0, −P], [P, 0]] · v` for a form without kernel.
pub fn assemble_split(form: &SkewCanonicalForm) -> Result<Matrix> {
    if form.kernel_dim != 0 {
        return Err(Error::NonzeroKernel(form.kernel_dim));
    }
    Ok(form.reconstruct())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_orthogonal, random_skew};

    fn j2() -> Matrix {
        Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap()
    }

    #[test]
    fn two_by_two_block() {
        let s = j2().scale(3.0);
        let f = skew_canonical(&s, DEFAULT_SKEW_TOL).unwrap();
        assert_eq!(f.p, vec![3.0]);
        assert_eq!(f.kernel_dim, 0);
        assert_eq!(f.v, Matrix::identity(2));
        assert_eq!(assemble_split(&f).unwrap(), s);
    }

    #[test]
    fn zero_matrix_is_all_kernel() {
        let f = skew_canonical(&Matrix::zeros(3, 3), DEFAULT_SKEW_TOL).unwrap();
        assert!(f.p.is_empty());
        assert_eq!(f.kernel_dim, 3);
        assert!(matches!(assemble_split(&f), Err(Error::NonzeroKernel(3))));
    }

    #[test]
    fn odd_dimension_keeps_a_kernel_vector() {
        let s = random_skew(5, 10);
        let f = skew_canonical(&s, DEFAULT_SKEW_TOL).unwrap();
        assert_eq!(f.p.len(), 2);
        assert_eq!(f.kernel_dim, 1);
        let z = &f.kernel_vectors()[0];
        assert!(norm(&s.mul_vec(z)) < 1e-13 * s.frobenius_norm());
        assert!((&f.reconstruct() - &s).frobenius_norm() < 1e-12 * s.frobenius_norm());
    }

    #[test]
    fn rejects_non_skew() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(
            skew_canonical(&a, DEFAULT_SKEW_TOL),
            Err(Error::NotSkew { .. })
        ));
    }

    #[test]
    fn random_skew_matches_singular_values() {
        let s = random_skew(6, 21);
        let f = skew_canonical(&s, DEFAULT_SKEW_TOL).unwrap();
        // oracle: eigenvalues of sᵀs, each appearing twice
        let g = sym_eig(&(&s.transpose() * &s).symmetric_part(), DEFAULT_EIG_TOL).unwrap();
        for (j, &pj) in f.p.iter().enumerate() {
            let a = g.d[2 * j].sqrt();
            let b = g.d[2 * j + 1].sqrt();
            assert!((pj - a).abs() <= 1e-9 * a);
            assert!((pj - b).abs() <= 1e-9 * b);
        }
        assert!(f.v.orthogonality_defect() <= 1e-10);
        assert!((&f.reconstruct() - &s).frobenius_norm() <= 1e-9 * s.frobenius_norm());
        // block form through the interleaved basis
        let b = f.block_basis();
        let blocks = &(&b * &s) * &b.transpose();
        assert!((&blocks - &f.block_matrix()).frobenius_norm() <= 1e-9 * s.frobenius_norm());
    }

    #[test]
    fn degenerate_blocks_pair_up() {
        // J₂ ⊕ J₂ ⊕ 2J₂ conjugated: a 4-dimensional eigenspace of sᵀs
        let d = Matrix::block_diag(&[&j2(), &j2(), &j2().scale(2.0)]);
        let q = random_orthogonal(6, 3);
        let s = &(&q.transpose() * &d) * &q;
        let f = skew_canonical(&s, DEFAULT_SKEW_TOL).unwrap();
        assert_eq!(f.p.len(), 3);
        assert!((f.p[0] - 2.0).abs() < 1e-12);
        assert!((f.p[1] - 1.0).abs() < 1e-12 && (f.p[2] - 1.0).abs() < 1e-12);
        let r = (&f.reconstruct() - &s).frobenius_norm();
        assert!(r < 1e-11 * s.frobenius_norm(), "{r:e}");
    }

    #[test]
    fn cyclic_one_step() {
        let s = j2().scale(3.0);
        let f = skew_canonical_cyclic(&s, &[1.0, 0.0], DEFAULT_SKEW_TOL).unwrap();
        assert_eq!(f.p, vec![3.0]);
        assert_eq!(f.v, Matrix::identity(2));
    }

    #[test]
    fn cyclic_two_blocks() {
        let s = Matrix::block_diag(&[&j2(), &j2().scale(2.0)]);
        let f = skew_canonical_cyclic(&s, &[1.0, 0.0, 1.0, 0.0], DEFAULT_SKEW_TOL).unwrap();
        assert_eq!(f.p.len(), 2);
        assert!((f.p[0] - 2.0).abs() < 1e-14 && (f.p[1] - 1.0).abs() < 1e-14);
        assert!((&f.reconstruct() - &s).frobenius_norm() < 1e-13);
    }

    #[test]
    fn cyclic_deflates_on_repeated_blocks() {
        // repeated p: no single vector is cyclic
        let s = Matrix::block_diag(&[&j2(), &j2()]);
        let f = skew_canonical_cyclic(&s, &[1.0, 0.0, 0.0, 0.0], DEFAULT_SKEW_TOL).unwrap();
        assert_eq!(f.p.len(), 2);
        assert!((&f.reconstruct() - &s).frobenius_norm() < 1e-13);
    }

    #[test]
    fn cyclic_agrees_with_eigen_route() {
        let s = random_skew(8, 5);
        let x: Vec<f64> = (0..8).map(|i| 1.0 + i as f64 * 0.1).collect();
        let a = skew_canonical(&s, DEFAULT_SKEW_TOL).unwrap();
        let b = skew_canonical_cyclic(&s, &x, DEFAULT_SKEW_TOL).unwrap();
        for (pa, pb) in a.p.iter().zip(&b.p) {
            assert!((pa - pb).abs() <= 1e-8 * pa);
        }
        assert!(b.v.orthogonality_defect() <= 1e-10);
        assert!((&b.reconstruct() - &s).frobenius_norm() <= 1e-9 * s.frobenius_norm());
    }

    #[test]
    fn cyclic_rejects_singular() {
        let s = random_skew(5, 1);
        assert!(matches!(
            skew_canonical_cyclic(&s, &[1.0; 5], DEFAULT_SKEW_TOL),
            Err(Error::Singular { .. })
        ));
        let s = Matrix::block_diag(&[&j2(), &Matrix::zeros(2, 2)]);
        assert!(matches!(
            skew_canonical_cyclic(&s, &[1.0; 4], DEFAULT_SKEW_TOL),
            Err(Error::Singular { .. })
        ));
        assert!(matches!(
            skew_canonical_cyclic(&j2(), &[0.0, 0.0], DEFAULT_SKEW_TOL),
            Err(Error::ZeroVector)
        ));
    }
}
