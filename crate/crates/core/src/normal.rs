//! Real normal matrices: canonical block form, spectrum and the symmetric
//! orthogonal equivalence between `A` and `Aᵀ`.
//!
//! A normal `A` splits as `H + S` with `H = (A + Aᵀ)/2` symmetric and
//! `S = (A − Aᵀ)/2` skew, and normality is exactly `HS = SH`. So `S` leaves
//! every eigenspace of `H` invariant, and inside an eigenspace with
//! eigenvalue `α` it reduces by the skew canonical form to blocks
//! `[[α, β], [−β, α]]` and real eigenvalues `α`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, DEFAULT_EIG_TOL};
use crate::matrix::Matrix;
use crate::skew::{reduce_skew, restart_vector};
use crate::vecops::{axpy, dot, norm, scale};

/// Default normality tolerance: `‖AAᵀ − AᵀA‖_F ≤ tol · ‖A‖_F²`.
pub const DEFAULT_NORMAL_TOL: f64 = 1e-10;

/// Eigenvalues of `H` within this multiple of `‖A‖_F` form one cluster.
pub const CLUSTER_REL: f64 = 1e-8;

/// Rotation parts `β` at or below this multiple of `‖A‖_F` are real.
pub const BLOCK_MIN_REL: f64 = 1e-10;

/// Orthogonal block diagonalization `wᵀ·A·w = D` of a real normal matrix.
///
/// `D` lists the real eigenvalues first, then one 2×2 block
/// `[[α, β], [−β, α]]` per conjugate pair `α ± iβ`, stored with `β > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealNormalForm {
    pub w: Matrix,
    /// Descending.
    pub real_eigs: Vec<f64>,
    /// `(α, β)`, sorted by `α` then `β`, both descending.
    pub blocks: Vec<(f64, f64)>,
}

impl RealNormalForm {
    pub fn dim(&self) -> usize {
        self.w.rows()
    }

    pub fn block_diagonal(&self) -> Matrix {
        crate::random::canonical_block_matrix(&self.real_eigs, &self.blocks)
    }

    /// `w·D·wᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        &(&self.w * &self.block_diagonal()) * &self.w.transpose()
    }

    /// `{a₁, …, a_k} ∪ {α_j ± iβ_j}` with each conjugate pair adjacent.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self
            .real_eigs
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        for &(alpha, beta) in &self.blocks {
            out.push(Complex64::new(alpha, beta));
            out.push(Complex64::new(alpha, -beta));
        }
        out
    }

    /// Columns `(c₁, c₂)` of `w` carrying block `j`:
    /// `A c₁ = α c₁ − β c₂` and `A c₂ = β c₁ + α c₂`.
    pub fn block_columns(&self, j: usize) -> (Vec<f64>, Vec<f64>) {
        let i = self.real_eigs.len() + 2 * j;
        (self.w.column(i), self.w.column(i + 1))
    }
}

/// `‖AAᵀ − AᵀA‖_F / ‖A‖_F²`, zero for the zero matrix.
pub fn normality_defect(a: &Matrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let at = a.transpose();
    let comm = &(a * &at) - &(&at * a);
    let n2 = a.frobenius_norm().powi(2);
    Ok(if n2 > 0.0 {
        comm.frobenius_norm() / n2
    } else {
        0.0
    })
}

pub fn is_normal(a: &Matrix, tol: f64) -> Result<bool> {
    Ok(normality_defect(a)? <= tol)
}

fn check_normal(a: &Matrix, tol: f64) -> Result<()> {
    let defect = normality_defect(a)?;
    if defect > tol {
        return Err(Error::NotNormal { defect });
    }
    Ok(())
}

/// Rayleigh quotient `xᵀ m x` of a unit vector.
fn rayleigh(m: &Matrix, x: &[f64]) -> f64 {
    dot(x, &m.mul_vec(x))
}

/// Canonical real block form of a normal matrix.
pub fn real_normal_form(a: &Matrix, tol: f64) -> Result<RealNormalForm> {
    check_normal(a, tol)?;
    let n = a.rows();
    let a_norm = a.frobenius_norm();
    let h = a.symmetric_part();
    let s = a.skew_part();
    let eig = sym_eig(&h, DEFAULT_EIG_TOL)?;

    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || eig.d[i - 1] - eig.d[i] > CLUSTER_REL * a_norm {
            clusters.push((start, i));
            start = i;
        }
    }

    let mut reals: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut blocks: Vec<(f64, f64, Vec<f64>, Vec<f64>)> = Vec::new();
    for (lo, hi) in clusters {
        let m = hi - lo;
        let cols: Vec<Vec<f64>> = (lo..hi).map(|j| eig.q.column(j)).collect();
        if m == 1 {
            let x = cols.into_iter().next().expect("one column");
            reals.push((rayleigh(&h, &x), x));
            continue;
        }
        let qc = Matrix::from_columns(n, &cols);
        let sc = (&(&qc.transpose() * &s) * &qc).skew_part();
        let form = reduce_skew(&sc, BLOCK_MIN_REL * a_norm)?;
        for j in 0..form.p.len() {
            let (u, w) = form.pair(j);
            let gu = qc.mul_vec(&u);
            let gw = qc.mul_vec(&w);
            let alpha = 0.5 * (rayleigh(&h, &gu) + rayleigh(&h, &gw));
            // c₁ = gw, c₂ = gu gives c₁ᵀ A c₂ = wᵀ S u = p > 0
            blocks.push((alpha, form.p[j], gw, gu));
        }
        for z in form.kernel_vectors() {
            let x = qc.mul_vec(&z);
            reals.push((rayleigh(&h, &x), x));
        }
    }

    reals.sort_by(|x, y| y.0.total_cmp(&x.0));
    blocks.sort_by(|x, y| y.0.total_cmp(&x.0).then(y.1.total_cmp(&x.1)));

    let mut w = Matrix::zeros(n, n);
    let mut col = 0;
    for (_, x) in &reals {
        w.set_column(col, x);
        col += 1;
    }
    for (_, _, c1, c2) in &blocks {
        w.set_column(col, c1);
        w.set_column(col + 1, c2);
        col += 2;
    }
    Ok(RealNormalForm {
        w,
        real_eigs: reals.into_iter().map(|r| r.0).collect(),
        blocks: blocks.into_iter().map(|b| (b.0, b.1)).collect(),
    })
}

/// Spectrum of a normal matrix as a conjugate-closed multiset.
pub fn spectrum(a: &Matrix, tol: f64) -> Result<Vec<Complex64>> {
    Ok(real_normal_form(a, tol)?.spectrum())
}

/// Symmetric orthogonal `U` with `U·A·Uᵀ = Aᵀ`, read off the block form:
/// `U = w·D±·wᵀ`, where `D±` is the identity on real eigenvalues and
/// `diag(1, −1)` on every rotation block.
pub fn transpose_equivalence(a: &Matrix, tol: f64) -> Result<Matrix> {
    let form = real_normal_form(a, tol)?;
    let n = form.dim();
    let mut signs = vec![1.0; n];
    let k = form.real_eigs.len();
    for j in 0..form.blocks.len() {
        signs[k + 2 * j + 1] = -1.0;
    }
    let u = &(&form.w * &Matrix::from_diag(&signs)) * &form.w.transpose();
    Ok(u.symmetric_part())
}

/// `U` with `U·A·Uᵀ = Aᵀ` built from transpose-cyclic subspaces.
///
/// On the span of `{Aⁿ(Aᵀ)ᵐ x}` the map is fixed by
/// `U(Aⁿ(Aᵀ)ᵐ x) = (Aᵀ)ⁿAᵐ x`. The span is grown by applying `A` and `Aᵀ`
/// to basis vectors already found, always taking the candidate with the
/// largest component outside the current span, and every Gram–Schmidt
/// combination is applied to the images as well (the formula is linear).
/// If the span is proper the construction restarts in its orthogonal
/// complement, which is again invariant under `A` and `Aᵀ`. The assembled
/// map is finally rounded to the nearest symmetric orthogonal matrix.
pub fn transpose_equivalence_cyclic(a: &Matrix, x: &[f64], tol: f64) -> Result<Matrix> {
    check_normal(a, tol)?;
    let n = a.rows();
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
    let at = a.transpose();
    let rank_tol = 1e-10 * a.frobenius_norm();

    let mut basis = CyclicBasis::default();
    let mut generator = x.to_vec();
    let mut restarts = 0;
    loop {
        // the generator lies in the unexplored complement, where U fixes it
        let g = norm(&generator);
        scale(1.0 / g, &mut generator);
        let mut pending: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        basis.push_with_candidates(generator.clone(), generator, a, &at, &mut pending);

        loop {
            let mut best: Option<(usize, f64, Vec<f64>, Vec<f64>)> = None;
            for (idx, (v, u)) in pending.iter().enumerate() {
                let (rv, ru) = basis.residual(v, u);
                let nr = norm(&rv);
                if best.as_ref().map_or(true, |b| nr > b.1) {
                    best = Some((idx, nr, rv, ru));
                }
            }
            let Some((idx, nr, mut rv, mut ru)) = best else { break };
            if nr <= rank_tol || basis.len() == n {
                break;
            }
            pending.swap_remove(idx);
            scale(1.0 / nr, &mut rv);
            scale(1.0 / nr, &mut ru);
            basis.push_with_candidates(rv, ru, a, &at, &mut pending);
        }

        if basis.len() >= n {
            break;
        }
        restarts += 1;
        if restarts > n {
            return Err(Error::KrylovBreakdown(format!(
                "deflation budget of {n} restarts exhausted"
            )));
        }
        generator = restart_vector(n, &basis.v).ok_or_else(|| {
            Error::KrylovBreakdown("no standard basis vector reaches the complement".into())
        })?;
    }

    let mut u = Matrix::zeros(n, n);
    for (v, img) in basis.v.iter().zip(&basis.u) {
        for i in 0..n {
            for j in 0..n {
                u[(i, j)] += img[i] * v[j];
            }
        }
    }
    nearest_involution(&u)
}

/// Nearest symmetric orthogonal matrix `q·sign(Λ)·qᵀ` to the symmetric part
/// of `u`. Gram–Schmidt steps with small residuals amplify roundoff in the
/// images; this removes the drift without touching the cyclic structure.
/// Eigenvalues far from ±1 mean the construction itself failed.
fn nearest_involution(u: &Matrix) -> Result<Matrix> {
    let eig = sym_eig(&u.symmetric_part(), DEFAULT_EIG_TOL)?;
    if let Some(&bad) = eig.d.iter().find(|x| (x.abs() - 1.0).abs() > 1e-4) {
        return Err(Error::KrylovBreakdown(format!(
            "assembled map has eigenvalue {bad:e}, not ±1"
        )));
    }
    Ok(eig.apply_fn(f64::signum))
}

/// Orthonormal vectors `v_i` with their images `u_i = U v_i`.
#[derive(Default)]
struct CyclicBasis {
    v: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
}

impl CyclicBasis {
    fn len(&self) -> usize {
        self.v.len()
    }

    /// Gram–Schmidt residual of `v` (two passes), with the same
    /// combination applied to its image `u`.
    fn residual(&self, v: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut rv = v.to_vec();
        let mut ru = u.to_vec();
        for _ in 0..2 {
            for (bv, bu) in self.v.iter().zip(&self.u) {
                let c = dot(bv, &rv);
                axpy(-c, bv, &mut rv);
                axpy(-c, bu, &mut ru);
            }
        }
        (rv, ru)
    }

    // U A = Aᵀ U on the cyclic span, so A v ↦ Aᵀ u and Aᵀ v ↦ A u.
    fn push_with_candidates(
        &mut self,
        v: Vec<f64>,
        u: Vec<f64>,
        a: &Matrix,
        at: &Matrix,
        pending: &mut Vec<(Vec<f64>, Vec<f64>)>,
    ) {
        pending.push((a.mul_vec(&v), at.mul_vec(&u)));
        pending.push((at.mul_vec(&v), a.mul_vec(&u)));
        self.v.push(v);
        self.u.push(u);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{canonical_block_matrix, random_normal, random_orthogonal};

    fn rotation(theta: f64) -> Matrix {
        let (s, c) = theta.sin_cos();
        Matrix::from_rows(&[[c, -s], [s, c]]).unwrap()
    }

    fn check_transpose_equivalence(a: &Matrix, u: &Matrix) {
        let na = a.frobenius_norm();
        assert!(u.asymmetry() <= 1e-10, "asym {}", u.asymmetry());
        assert!(u.orthogonality_defect() <= 1e-10, "orth {}", u.orthogonality_defect());
        let r = &(&(u * a) * &u.transpose()) - &a.transpose();
        assert!(r.frobenius_norm() <= 1e-9 * na, "equiv {}", r.frobenius_norm());
    }

    #[test]
    fn normality_examples() {
        let sym = Matrix::from_rows(&[[1.0, 2.0], [2.0, 5.0]]).unwrap();
        assert!(is_normal(&sym, DEFAULT_NORMAL_TOL).unwrap());
        assert!(is_normal(&rotation(1.0), DEFAULT_NORMAL_TOL).unwrap());
        let jordan = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(!is_normal(&jordan, DEFAULT_NORMAL_TOL).unwrap());
        // [A, Aᵀ] = diag(1, −1): squared norm 2, and ‖A‖_F² = 3
        assert!((normality_defect(&jordan).unwrap() - 2f64.sqrt() / 3.0).abs() < 1e-15);
        assert!(is_normal(&Matrix::zeros(2, 3), 1e-10).is_err());
    }

    #[test]
    fn rotation_by_sixty_degrees() {
        let f = real_normal_form(&rotation(std::f64::consts::FRAC_PI_3), DEFAULT_NORMAL_TOL).unwrap();
        assert!(f.real_eigs.is_empty());
        assert_eq!(f.blocks.len(), 1);
        let (alpha, beta) = f.blocks[0];
        assert!((alpha - 0.5).abs() < 1e-15);
        assert!((beta - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_input() {
        let f = real_normal_form(&Matrix::from_diag(&[2.0, 5.0]), DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(f.real_eigs, vec![5.0, 2.0]);
        assert!(f.blocks.is_empty());
    }

    #[test]
    fn construct_then_recover() {
        let d = canonical_block_matrix(&[-3.0], &[(1.0, 2.0)]);
        let q = random_orthogonal(3, 8);
        let a = &(&q.transpose() * &d) * &q;
        let f = real_normal_form(&a, DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(f.real_eigs.len(), 1);
        assert!((f.real_eigs[0] + 3.0).abs() < 1e-9);
        assert!((f.blocks[0].0 - 1.0).abs() < 1e-9 && (f.blocks[0].1 - 2.0).abs() < 1e-9);
        assert!((&f.reconstruct() - &a).frobenius_norm() < 1e-9 * a.frobenius_norm());
        assert!(f.w.orthogonality_defect() < 1e-10);
    }

    #[test]
    fn spectrum_examples() {
        let j2 = rotation(std::f64::consts::FRAC_PI_2);
        let sp = spectrum(&j2, DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(sp.len(), 2);
        assert!((sp[0] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((sp[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);

        let sp = spectrum(&Matrix::identity(3), DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(sp, vec![Complex64::new(1.0, 0.0); 3]);

        let d = canonical_block_matrix(&[], &[(0.0, 1.0), (3.0, 4.0)]);
        let q = random_orthogonal(4, 2);
        let a = &(&q.transpose() * &d) * &q;
        let sp = spectrum(&a, DEFAULT_NORMAL_TOL).unwrap();
        let expect = [
            Complex64::new(3.0, 4.0),
            Complex64::new(3.0, -4.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        for (x, y) in sp.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn repeated_eigenvalue_cluster_with_mixed_parts() {
        // α = 1 appears both as a real eigenvalue and as a block centre
        let d = canonical_block_matrix(&[1.0, 4.0], &[(1.0, 2.0), (1.0, 2.0)]);
        let q = random_orthogonal(6, 31);
        let a = &(&q.transpose() * &d) * &q;
        let f = real_normal_form(&a, DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(f.real_eigs.len(), 2);
        assert_eq!(f.blocks.len(), 2);
        assert!((&f.reconstruct() - &a).frobenius_norm() < 1e-9 * a.frobenius_norm());
    }

    #[test]
    fn rejects_non_normal() {
        let jordan = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            real_normal_form(&jordan, DEFAULT_NORMAL_TOL),
            Err(Error::NotNormal { .. })
        ));
        assert!(matches!(
            transpose_equivalence_cyclic(&jordan, &[1.0, 0.0], DEFAULT_NORMAL_TOL),
            Err(Error::NotNormal { .. })
        ));
    }

    #[test]
    fn transpose_equivalence_of_symmetric_and_rotation() {
        let sym = Matrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        check_transpose_equivalence(&sym, &transpose_equivalence(&sym, DEFAULT_NORMAL_TOL).unwrap());

        let r = rotation(0.7);
        let flip = Matrix::from_diag(&[1.0, -1.0]);
        let lhs = &(&flip * &r) * &flip.transpose();
        assert!((&lhs - &r.transpose()).frobenius_norm() < 1e-15);
        check_transpose_equivalence(&r, &transpose_equivalence(&r, DEFAULT_NORMAL_TOL).unwrap());
    }

    #[test]
    fn transpose_equivalence_random() {
        for seed in 0..5 {
            let a = random_normal(8, seed).matrix;
            let u = transpose_equivalence(&a, DEFAULT_NORMAL_TOL).unwrap();
            check_transpose_equivalence(&a, &u);
            assert!((&(&u * &u) - &Matrix::identity(8)).frobenius_norm() <= 1e-9);
        }
    }

    #[test]
    fn cyclic_on_j2() {
        let j2 = rotation(std::f64::consts::FRAC_PI_2);
        let j2 = j2.map(|x| x.round());
        let u = transpose_equivalence_cyclic(&j2, &[1.0, 0.0], DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(u, Matrix::from_diag(&[1.0, -1.0]));
        check_transpose_equivalence(&j2, &u);
    }

    #[test]
    fn cyclic_on_symmetric_fixes_a() {
        let g = crate::random::random_spd(5, 4);
        let u = transpose_equivalence_cyclic(&g, &[1.0, 0.5, 0.0, -1.0, 2.0], DEFAULT_NORMAL_TOL)
            .unwrap();
        let r = &(&(&u * &g) * &u.transpose()) - &g;
        assert!(r.frobenius_norm() <= 1e-9 * g.frobenius_norm());
    }

    #[test]
    fn cyclic_random_and_deflation() {
        for seed in 0..5 {
            let a = random_normal(6, 100 + seed).matrix;
            let x: Vec<f64> = (0..6).map(|i| ((i * 7 + 3) % 5) as f64 - 1.5).collect();
            let u = transpose_equivalence_cyclic(&a, &x, DEFAULT_NORMAL_TOL).unwrap();
            check_transpose_equivalence(&a, &u);
        }
        // identity: every subspace is cyclic of dimension one
        let u = transpose_equivalence_cyclic(&Matrix::identity(4), &[1.0; 4], DEFAULT_NORMAL_TOL)
            .unwrap();
        check_transpose_equivalence(&Matrix::identity(4), &u);
        // J₂ ⊕ J₂ needs two cyclic blocks
        let d = canonical_block_matrix(&[], &[(0.0, 1.0), (0.0, 1.0)]);
        let u = transpose_equivalence_cyclic(&d, &[1.0, 0.0, 0.0, 0.0], DEFAULT_NORMAL_TOL).unwrap();
        check_transpose_equivalence(&d, &u);
    }
}
