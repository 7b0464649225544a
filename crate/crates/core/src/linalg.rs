//! Factorization primitives: Householder QR, cyclic Jacobi eigensolver,
//! symmetric square root and polar decomposition.
//!
//! Every routine is a deterministic function of its input: loops run in a
//! fixed order and no thread-level parallelism is used, so identical inputs
//! give bit-identical outputs.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default convergence tolerance of [`sym_eig`], relative to `‖a‖_F`.
pub const DEFAULT_EIG_TOL: f64 = 1e-12;

/// Sweep budget of the Jacobi iteration.
pub const MAX_SWEEPS: usize = 64;

/// Default clamp window for slightly negative eigenvalues in [`sym_sqrt`].
pub const DEFAULT_SQRT_TOL: f64 = 1e-10;

/// Default invertibility threshold of [`polar_decompose`].
pub const DEFAULT_POLAR_TOL: f64 = 1e-10;

/// Checked matrix product `a · b`.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.matmul(b)
}

/// Eigendecomposition `a = q · diag(d) · qᵀ` of a symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymEig {
    /// Orthogonal matrix whose columns are the eigenvectors.
    pub q: Matrix,
    /// Eigenvalues in descending order, matching the columns of `q`.
    pub d: Vec<f64>,
}

impl SymEig {
    /// `q · diag(f(d)) · qᵀ`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.d.len();
        let mut scaled = self.q.clone();
        for j in 0..n {
            let fj = f(self.d[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        (&scaled * &self.q.transpose()).symmetric_part()
    }

    pub fn reconstruct(&self) -> Matrix {
        self.apply_fn(|x| x)
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Symmetric eigendecomposition by the cyclic Jacobi method.
///
/// Sweeps visit the pairs `(p, q)`, `p < q`, in row-cyclic order and rotate
/// every nonzero off-diagonal entry. Iteration stops once the off-diagonal
/// Frobenius mass is at most `tol · ‖a‖_F`, after one final sweep. The input must be symmetric
/// within `tol · ‖a‖_F`; its symmetric part is what gets diagonalized.
///
/// Eigenvalues are returned in descending order, ties kept in the order of
/// the diagonal they converged on.
pub fn sym_eig(a: &Matrix, tol: f64) -> Result<SymEig> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm = a.frobenius_norm();
    let asym = a.asymmetry();
    if asym > tol * norm {
        return Err(Error::NotSymmetric {
            defect: if norm > 0.0 { asym / norm } else { asym },
        });
    }
    let n = a.rows();
    let mut w = a.symmetric_part();
    let mut v = Matrix::identity(n);
    let target = tol * norm;

    let sweep = |w: &mut Matrix, v: &mut Matrix| {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(w, v, p, q);
            }
        }
    };
    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        let off = off_diagonal_norm(&w);
        if off <= target {
            converged = true;
            // convergence is quadratic, so one more sweep takes the
            // remainder from ~tol down to roundoff
            if off > 0.0 {
                sweep(&mut w, &mut v);
            }
            break;
        }
        sweep(&mut w, &mut v);
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let diag = w.diagonal();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their index order
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let d = order.iter().map(|&i| diag[i]).collect();
    let mut q = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            q[(i, new)] = v[(i, old)];
        }
    }
    Ok(SymEig { q, d })
}

/// One Jacobi rotation annihilating `w[p][q]`, accumulated into `v`.
fn rotate(w: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = w.rows();
    let app = w[(p, p)];
    let aqq = w[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let akp = w[(k, p)];
        let akq = w[(k, q)];
        w[(k, p)] = c * akp - s * akq;
        w[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = w[(p, k)];
        let aqk = w[(q, k)];
        w[(p, k)] = c * apk - s * aqk;
        w[(q, k)] = s * apk + c * aqk;
    }
    w[(p, p)] = app - t * apq;
    w[(q, q)] = aqq + t * apq;
    w[(p, q)] = 0.0;
    w[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Clamps eigenvalues within `tol · max|d|` below zero, rejects the rest.
fn clamp_nonnegative(d: &[f64], tol: f64) -> Result<Vec<f64>> {
    let scale = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = -tol * scale;
    d.iter()
        .map(|&x| {
            if x >= 0.0 {
                Ok(x)
            } else if x >= floor {
                Ok(0.0)
            } else {
                Err(Error::NotPositive {
                    min_eig: x,
                    threshold: floor,
                })
            }
        })
        .collect()
}

/// The unique positive semidefinite square root of a symmetric PSD matrix.
///
/// Eigenvalues in `[-tol·‖a‖, 0)` are treated as roundoff and clamped to
/// zero; anything more negative is an error.
pub fn sym_sqrt(a: &Matrix, tol: f64) -> Result<Matrix> {
    let eig = symmetric_eig(a, tol)?;
    let d = clamp_nonnegative(&eig.d, tol)?;
    let eig = SymEig { q: eig.q, d };
    Ok(eig.apply_fn(f64::sqrt))
}

// Symmetry is checked against `tol` and convergence uses the default
// Jacobi tolerance.
fn symmetric_eig(a: &Matrix, tol: f64) -> Result<SymEig> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm = a.frobenius_norm();
    let asym = a.asymmetry();
    if asym > tol.max(DEFAULT_EIG_TOL) * norm {
        return Err(Error::NotSymmetric {
            defect: asym / norm,
        });
    }
    sym_eig(&a.symmetric_part(), DEFAULT_EIG_TOL)
}

/// Polar decomposition `a = u · p` of an invertible square matrix, with `u`
/// orthogonal and `p = (aᵀa)^{1/2}` positive definite.
pub fn polar_decompose(a: &Matrix, tol: f64) -> Result<(Matrix, Matrix)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let ata = (&a.transpose() * a).symmetric_part();
    let eig = sym_eig(&ata, DEFAULT_EIG_TOL)?;
    let sq = clamp_nonnegative(&eig.d, DEFAULT_SQRT_TOL)?;
    let sigma: Vec<f64> = sq.iter().map(|x| x.sqrt()).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let sigma_min = sigma.last().copied().unwrap_or(0.0);
    let threshold = tol * sigma_max;
    if sigma_max == 0.0 || sigma_min <= threshold {
        return Err(Error::Singular {
            sigma_min,
            threshold,
        });
    }
    let eig = SymEig { q: eig.q, d: sq };
    let p = eig.apply_fn(f64::sqrt);
    let p_inv = eig.apply_fn(|x| 1.0 / x.sqrt());
    let u = a * &p_inv;
    Ok((u, p))
}

/// Thin Householder QR of a matrix with `rows ≥ cols`.
///
/// `q` has orthonormal columns and `r` is upper triangular with a
/// nonnegative diagonal. Rank deficiency shows up as (near) zero diagonal
/// entries of `r`.
pub fn qr(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::DimensionMismatch {
            left_rows: m,
            left_cols: n,
            right_rows: n,
            right_cols: n,
        });
    }
    let mut r = a.clone();
    let mut reflectors: Vec<Option<Vec<f64>>> = Vec::with_capacity(n);
    for k in 0..n {
        let x: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            reflectors.push(None);
            continue;
        }
        let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
        let mut v = x;
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|t| t * t).sum();
        if vv == 0.0 {
            reflectors.push(None);
            continue;
        }
        for j in k..n {
            let s: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
            let f = 2.0 * s / vv;
            for i in k..m {
                r[(i, j)] -= f * v[i - k];
            }
        }
        for i in (k + 1)..m {
            r[(i, k)] = 0.0;
        }
        reflectors.push(Some(v));
    }

    let mut q = Matrix::zeros(m, n);
    for j in 0..n {
        q[(j, j)] = 1.0;
    }
    for (k, refl) in reflectors.iter().enumerate().rev() {
        let Some(v) = refl else { continue };
        let vv: f64 = v.iter().map(|t| t * t).sum();
        for j in 0..n {
            let s: f64 = (k..m).map(|i| v[i - k] * q[(i, j)]).sum();
            let f = 2.0 * s / vv;
            for i in k..m {
                q[(i, j)] -= f * v[i - k];
            }
        }
    }

    let mut r_out = r.block(0, 0, n, n);
    for k in 0..n {
        if r_out[(k, k)] < 0.0 {
            for j in 0..n {
                r_out[(k, j)] = -r_out[(k, j)];
            }
            for i in 0..m {
                q[(i, k)] = -q[(i, k)];
            }
        }
    }
    Ok((q, r_out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_spd};

    fn j2() -> Matrix {
        Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap()
    }

    // Straight triple loop, summing k in increasing order.
    fn naive_product(a: &Matrix, b: &Matrix) -> Matrix {
        let mut c = Matrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut s = 0.0;
                for k in 0..a.cols() {
                    s += a[(i, k)] * b[(k, j)];
                }
                c[(i, j)] = s;
            }
        }
        c
    }

    #[test]
    fn matmul_identity_and_involution() {
        let x = random_matrix(3, 3, 1);
        assert_eq!(matmul(&Matrix::identity(3), &x).unwrap(), x);
        assert_eq!(matmul(&j2(), &j2()).unwrap(), -&Matrix::identity(2));
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let a = random_matrix(4, 5, 2);
        let b = random_matrix(5, 3, 3);
        let c = matmul(&a, &b).unwrap();
        let oracle = naive_product(&a, &b);
        for i in 0..4 {
            for j in 0..3 {
                let scale = oracle[(i, j)].abs().max(1.0);
                assert!((c[(i, j)] - oracle[(i, j)]).abs() <= 1e-14 * scale);
            }
        }
    }

    #[test]
    fn eig_of_diagonal_is_trivial() {
        let e = sym_eig(&Matrix::from_diag(&[3.0, 1.0]), DEFAULT_EIG_TOL).unwrap();
        assert_eq!(e.d, vec![3.0, 1.0]);
        assert_eq!(e.q, Matrix::identity(2));
    }

    #[test]
    fn eig_of_swap_matrix() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let e = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
        assert!((e.d[0] - 1.0).abs() < 1e-15);
        assert!((e.d[1] + 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c0 = e.q.column(0);
        let c1 = e.q.column(1);
        // up to sign
        assert!((c0[0] * c0[0] - 0.5).abs() < 1e-15 && (c0[0] - c0[1]).abs() < 1e-15);
        assert!((c1[0].abs() - h).abs() < 1e-15 && (c1[0] + c1[1]).abs() < 1e-15);
    }

    #[test]
    fn eig_reconstructs_random_symmetric() {
        let g = random_matrix(8, 8, 7);
        let a = (&g + &g.transpose()).scale(0.5);
        let e = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
        let resid = (&e.reconstruct() - &a).frobenius_norm();
        assert!(resid <= 1e-12 * a.frobenius_norm(), "{resid}");
        assert!(e.q.orthogonality_defect() <= 1e-12);
        assert!(e.d.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eig_rejects_bad_input() {
        assert!(matches!(
            sym_eig(&Matrix::zeros(2, 3), DEFAULT_EIG_TOL),
            Err(Error::NotSquare { .. })
        ));
        let a = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            sym_eig(&a, DEFAULT_EIG_TOL),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn eig_ties_keep_index_order() {
        let e = sym_eig(&Matrix::identity(3), DEFAULT_EIG_TOL).unwrap();
        assert_eq!(e.q, Matrix::identity(3));
    }

    #[test]
    fn sqrt_of_simple_matrices() {
        assert_eq!(
            sym_sqrt(&Matrix::identity(3), DEFAULT_SQRT_TOL).unwrap(),
            Matrix::identity(3)
        );
        let b = sym_sqrt(&Matrix::from_diag(&[4.0, 9.0]), DEFAULT_SQRT_TOL).unwrap();
        assert_eq!(b, Matrix::from_diag(&[2.0, 3.0]));
    }

    #[test]
    fn sqrt_squares_back_and_commutes() {
        let a = random_spd(6, 11);
        let b = sym_sqrt(&a, DEFAULT_SQRT_TOL).unwrap();
        let na = a.frobenius_norm();
        assert!((&(&b * &b) - &a).frobenius_norm() <= 1e-10 * na);
        assert!((&(&b * &a) - &(&a * &b)).frobenius_norm() <= 1e-10 * na);
        let eb = sym_eig(&b, DEFAULT_EIG_TOL).unwrap();
        assert!(*eb.d.last().unwrap() > 0.0);
    }

    #[test]
    fn sqrt_clamps_roundoff_and_rejects_indefinite() {
        let a = Matrix::from_diag(&[1.0, -1e-13]);
        let b = sym_sqrt(&a, DEFAULT_SQRT_TOL).unwrap();
        assert_eq!(b, Matrix::from_diag(&[1.0, 0.0]));
        let bad = Matrix::from_diag(&[1.0, -1e-3]);
        assert!(matches!(
            sym_sqrt(&bad, DEFAULT_SQRT_TOL),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn polar_of_orthogonal_and_diagonal() {
        let (q, _) = qr(&random_matrix(4, 4, 5)).unwrap();
        let (u, p) = polar_decompose(&q, DEFAULT_POLAR_TOL).unwrap();
        assert!((&u - &q).frobenius_norm() < 1e-13);
        assert!((&p - &Matrix::identity(4)).frobenius_norm() < 1e-13);

        let (u, p) = polar_decompose(&Matrix::from_diag(&[2.0, -3.0]), DEFAULT_POLAR_TOL).unwrap();
        assert!((&u - &Matrix::from_diag(&[1.0, -1.0])).frobenius_norm() < 1e-15);
        assert!((&p - &Matrix::from_diag(&[2.0, 3.0])).frobenius_norm() < 1e-15);
    }

    #[test]
    fn polar_reconstructs_random() {
        let a = random_matrix(5, 5, 9);
        let (u, p) = polar_decompose(&a, DEFAULT_POLAR_TOL).unwrap();
        assert!(u.orthogonality_defect() <= 1e-10);
        assert!((&(&u * &p) - &a).frobenius_norm() <= 1e-10 * a.frobenius_norm());
        assert_eq!(p.asymmetry(), 0.0);
    }

    #[test]
    fn polar_rejects_singular() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(
            polar_decompose(&a, DEFAULT_POLAR_TOL),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn qr_small_cases() {
        let (q, r) = qr(&Matrix::identity(3)).unwrap();
        assert_eq!(q, Matrix::identity(3));
        assert_eq!(r, Matrix::identity(3));

        let (q, r) = qr(&Matrix::from_rows(&[[3.0], [4.0]]).unwrap()).unwrap();
        assert!((q[(0, 0)] - 0.6).abs() < 1e-15 && (q[(1, 0)] - 0.8).abs() < 1e-15);
        assert!((r[(0, 0)] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn qr_random_tall() {
        let a = random_matrix(6, 4, 4);
        let (q, r) = qr(&a).unwrap();
        assert!((&(&q * &r) - &a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
        let qtq = &q.transpose() * &q;
        assert!((&qtq - &Matrix::identity(4)).frobenius_norm() <= 1e-12);
        for i in 0..4 {
            assert!(r[(i, i)] >= 0.0);
            for j in 0..i {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn deterministic_outputs() {
        let a = random_spd(7, 3);
        assert_eq!(sym_eig(&a, DEFAULT_EIG_TOL), sym_eig(&a, DEFAULT_EIG_TOL));
        assert_eq!(
            sym_sqrt(&a, DEFAULT_SQRT_TOL).unwrap(),
            sym_sqrt(&a, DEFAULT_SQRT_TOL).unwrap()
        );
    }
}
