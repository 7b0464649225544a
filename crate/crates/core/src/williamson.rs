//! Williamson normal form of strictly positive matrices.
//!
//! Coordinates are ordered `(q₁, …, q_n, p₁, …, p_n)` and
//! `J = [[0, −I], [I, 0]]`. For a symmetric positive definite `A` of order
//! `2n`, the skew matrix `B = A^{1/2}·J·A^{1/2}` is invertible, so its
//! canonical form reads `Γᵀ·B·Γ = [[0, −P], [P, 0]]` for an orthogonal `Γ`.
//! Then
//!
//! ```text
//! L = diag(P^{-1/2}, P^{-1/2}) · Γᵀ · A^{1/2}
//! ```
//!
//! is symplectic and `A = Lᵀ·diag(P, P)·L`. The diagonal of `P` is the
//! symplectic spectrum of `A`; it does not depend on which `L` is found.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, sym_sqrt, DEFAULT_EIG_TOL, DEFAULT_SQRT_TOL};
use crate::matrix::Matrix;
use crate::random::{rng, uniform_matrix};
use crate::skew::{reduce_skew, KERNEL_REL};
use crate::vecops::{norm, orthogonalize, scale};

/// Default tolerance for symmetry and strict positivity.
pub const DEFAULT_WILLIAMSON_TOL: f64 = 1e-10;

// Relative mismatch allowed between the two copies of each eigenvalue of
// BᵀB in the oracle.
const ORACLE_PAIRING_REL: f64 = 1e-8;

/// The standard symplectic form `J = [[0, −I], [I, 0]]` on `ℝⁿ ⊕ ℝⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Involution {
    n: usize,
}

impl Involution {
    /// `n` is the half dimension.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "half dimension must be positive");
        Self { n }
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> Matrix {
        let n = self.n;
        let mut j = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = -1.0;
            j[(n + i, i)] = 1.0;
        }
        j
    }

    /// `J·m` by row permutation, no arithmetic.
    pub fn apply_left(&self, m: &Matrix) -> Matrix {
        let n = self.n;
        assert_eq!(m.rows(), 2 * n);
        let mut out = Matrix::zeros(m.rows(), m.cols());
        for i in 0..n {
            out.set_row(i, &m.row(n + i).iter().map(|x| -x).collect::<Vec<_>>());
            out.set_row(n + i, m.row(i));
        }
        out
    }

    /// `m·J` by column permutation, no arithmetic.
    pub fn apply_right(&self, m: &Matrix) -> Matrix {
        let n = self.n;
        assert_eq!(m.cols(), 2 * n);
        let mut out = Matrix::zeros(m.rows(), m.cols());
        for r in 0..m.rows() {
            for i in 0..n {
                out[(r, i)] = m[(r, n + i)];
                out[(r, n + i)] = -m[(r, i)];
            }
        }
        out
    }
}

/// `A = lᵀ·diag(D, D)·l` with `l` symplectic, `D = diag(d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WilliamsonForm {
    pub l: Matrix,
    /// Symplectic eigenvalues, descending.
    pub d: Vec<f64>,
}

impl WilliamsonForm {
    pub fn half_dim(&self) -> usize {
        self.d.len()
    }

    /// `diag(D, D)`.
    pub fn normal_form(&self) -> Matrix {
        let dd: Vec<f64> = self.d.iter().chain(self.d.iter()).copied().collect();
        Matrix::from_diag(&dd)
    }

    /// `lᵀ·diag(D, D)·l`.
    pub fn reconstruct(&self) -> Matrix {
        (&(&self.l.transpose() * &self.normal_form()) * &self.l).symmetric_part()
    }

    /// `‖l·J·lᵀ − J‖_F`.
    pub fn symplectic_residual_ljlt(&self) -> f64 {
        let j = Involution::new(self.half_dim());
        let ljlt = &j.apply_right(&self.l) * &self.l.transpose();
        (&ljlt - &j.matrix()).frobenius_norm()
    }

    /// `‖lᵀ·J·l − J‖_F`.
    pub fn symplectic_residual_ltjl(&self) -> f64 {
        symplectic_residual(&self.l).expect("even dimension")
    }
}

fn half_dimension(a: &Matrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() % 2 == 1 {
        return Err(Error::OddDimension(a.rows()));
    }
    Ok(a.rows() / 2)
}

/// Validates the input and returns `(half dim, symmetric A, A^{1/2}, B)`.
fn prepare(a: &Matrix, tol: f64) -> Result<(usize, Matrix, Matrix, Matrix)> {
    let n = half_dimension(a)?;
    let norm = a.frobenius_norm();
    let asym = a.asymmetry();
    if asym > tol * norm {
        return Err(Error::NotSymmetric {
            defect: asym / norm,
        });
    }
    let a = a.symmetric_part();
    let eig = sym_eig(&a, DEFAULT_EIG_TOL)?;
    let max = eig.d[0];
    let min = *eig.d.last().expect("nonempty");
    let threshold = tol * max.abs();
    if max <= 0.0 || min <= threshold {
        return Err(Error::NotPositive {
            min_eig: min,
            threshold,
        });
    }
    let root = sym_sqrt(&a, DEFAULT_SQRT_TOL)?;
    let j = Involution::new(n);
    let b = (&j.apply_right(&root) * &root).skew_part();
    Ok((n, a, root, b))
}

/// Williamson normal form of a symmetric strictly positive matrix of order
/// `2n`.
///
/// The input has to be symmetric within `tol·‖a‖_F` and its smallest
/// eigenvalue must exceed `tol` times the largest; near-singular input is
/// rejected, not regularized.
pub fn williamson(a: &Matrix, tol: f64) -> Result<WilliamsonForm> {
    let (n, _a, root, b) = prepare(a, tol)?;
    let form = reduce_skew(&b, KERNEL_REL * b.frobenius_norm())?;
    if form.kernel_dim != 0 {
        return Err(Error::NonzeroKernel(form.kernel_dim));
    }
    debug_assert_eq!(form.p.len(), n);
    // L = diag(P^{-1/2}, P^{-1/2}) · v · A^{1/2}, with Γ = vᵀ
    let mut l = &form.v * &root;
    for (j, &pj) in form.p.iter().enumerate() {
        let f = 1.0 / pj.sqrt();
        for c in 0..2 * n {
            l[(j, c)] *= f;
            l[(n + j, c)] *= f;
        }
    }
    Ok(WilliamsonForm { l, d: form.p })
}

/// `‖qᵀ·J·q − J‖_F`.
pub fn symplectic_residual(q: &Matrix) -> Result<f64> {
    let n = half_dimension(q)?;
    let j = Involution::new(n);
    let qtjq = &q.transpose() * &j.apply_left(q);
    Ok((&qtjq - &j.matrix()).frobenius_norm())
}

/// Symplectic eigenvalues of `a`, descending.
pub fn symplectic_spectrum(a: &Matrix, tol: f64) -> Result<Vec<f64>> {
    Ok(williamson(a, tol)?.d)
}

/// Symplectic eigenvalues without the pairing construction: the
/// eigenvalues of `BᵀB = −B²` come in equal pairs `d_j²`.
pub fn symplectic_spectrum_oracle(a: &Matrix, tol: f64) -> Result<Vec<f64>> {
    let (n, _a, _root, b) = prepare(a, tol)?;
    let g = (&b.transpose() * &b).symmetric_part();
    let eig = sym_eig(&g, DEFAULT_EIG_TOL)?;
    let g_max = eig.d[0];
    let floor = 64.0 * f64::EPSILON * (2 * n) as f64 * g_max;
    let mut out = Vec::with_capacity(n);
    for pair in eig.d.chunks_exact(2) {
        let (x, y) = (pair[0], pair[1]);
        if (x - y).abs() > ORACLE_PAIRING_REL * x.abs() + floor {
            return Err(Error::PairingBreakdown(format!(
                "eigenvalues {x:e} and {y:e} of BᵀB do not pair"
            )));
        }
        out.push((0.5 * (x + y)).max(0.0).sqrt());
    }
    Ok(out)
}

/// Lower shear `[[I, 0], [C, I]]`, symplectic for symmetric `C`.
pub fn lower_shear(c: &Matrix) -> Matrix {
    let n = c.rows();
    let mut m = Matrix::identity(2 * n);
    m.set_block(n, 0, c);
    m
}

/// Upper shear `[[I, C], [0, I]]`, symplectic for symmetric `C`.
pub fn upper_shear(c: &Matrix) -> Matrix {
    let n = c.rows();
    let mut m = Matrix::identity(2 * n);
    m.set_block(0, n, c);
    m
}

/// Orthogonal symplectic `[[X, Y], [−Y, X]]` from a random matrix of that
/// pattern.
///
/// The columns are orthonormalized in pairs `(c, J·c)`: Gram–Schmidt on the
/// first `n` columns against everything found so far, with the second half
/// set to `J` times the first. This is the complex Gram–Schmidt of
/// `X − iY` in real form, so the pattern (commuting with `J`) is kept.
pub fn orthogonal_symplectic(pattern_seed: &Matrix) -> Matrix {
    let n2 = pattern_seed.rows();
    let n = n2 / 2;
    let mut found: Vec<Vec<f64>> = Vec::with_capacity(n2);
    let mut firsts: Vec<Vec<f64>> = Vec::with_capacity(n);
    for col in 0..n {
        let mut c = pattern_seed.column(col);
        orthogonalize(&mut c, &found);
        let nc = norm(&c);
        assert!(nc > 1e-8, "degenerate pattern matrix");
        scale(1.0 / nc, &mut c);
        let jc = j_times(&c);
        found.push(c.clone());
        found.push(jc);
        firsts.push(c);
    }
    let mut q = Matrix::zeros(n2, n2);
    for (i, c) in firsts.iter().enumerate() {
        q.set_column(i, c);
        q.set_column(n + i, &j_times(c));
    }
    q
}

fn j_times(x: &[f64]) -> Vec<f64> {
    let n = x.len() / 2;
    let mut y = vec![0.0; x.len()];
    for i in 0..n {
        y[i] = -x[n + i];
        y[n + i] = x[i];
    }
    y
}

fn random_symmetric(n: usize, r: &mut impl Rng) -> Matrix {
    let g = uniform_matrix(n, n, r);
    let mut c = Matrix::zeros(n, n);
    for i in 0..n {
        for k in 0..=i {
            c[(i, k)] = g[(i, k)];
            c[(k, i)] = g[(i, k)];
        }
    }
    c
}

/// Random symplectic matrix of order `2n`, deterministic in `seed`:
/// `[[I, 0], [C, I]] · [[I, C'], [0, I]] · [[X, Y], [−Y, X]]` with `C`, `C'`
/// symmetric with entries in `[−1, 1)` and the last factor orthogonal.
pub fn random_symplectic(n: usize, seed: u64) -> Matrix {
    let (lower, upper, orth) = random_symplectic_factors(n, seed);
    &(&lower * &upper) * &orth
}

/// The three elementary factors of [`random_symplectic`].
pub fn random_symplectic_factors(n: usize, seed: u64) -> (Matrix, Matrix, Matrix) {
    assert!(n >= 1);
    let mut r = rng(seed);
    let c1 = random_symmetric(n, &mut r);
    let c2 = random_symmetric(n, &mut r);
    let x = uniform_matrix(n, n, &mut r);
    let y = uniform_matrix(n, n, &mut r);
    let mut pattern = Matrix::zeros(2 * n, 2 * n);
    pattern.set_block(0, 0, &x);
    pattern.set_block(0, n, &y);
    pattern.set_block(n, 0, &(-&y));
    pattern.set_block(n, n, &x);
    (lower_shear(&c1), upper_shear(&c2), orthogonal_symplectic(&pattern))
}

/// Seed of the `trial`-th conjugation in [`uniqueness_check`].
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(trial as u64 + 1)
}

/// Largest relative deviation of the symplectic spectrum of `Nᵀ·a·N` from
/// that of `a`, over `trials` random symplectic `N`.
pub fn uniqueness_check(a: &Matrix, trials: usize, seed: u64, tol: f64) -> Result<f64> {
    let base = symplectic_spectrum(a, tol)?;
    let n = base.len();
    let mut worst = 0.0f64;
    for t in 0..trials {
        let nmat = random_symplectic(n, trial_seed(seed, t));
        let conj = (&(&nmat.transpose() * a) * &nmat).symmetric_part();
        let d = symplectic_spectrum(&conj, tol)?;
        for (x, y) in base.iter().zip(&d) {
            worst = worst.max((x - y).abs() / x.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_spd;

    fn check_form(a: &Matrix, f: &WilliamsonForm) {
        let na = a.frobenius_norm();
        assert!((&f.reconstruct() - a).frobenius_norm() <= 1e-8 * na);
        assert!(f.symplectic_residual_ltjl() <= 1e-8);
        assert!(f.symplectic_residual_ljlt() <= 1e-8);
        assert!(f.d.iter().all(|&x| x > 0.0));
        assert!(f.d.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn involution_squares_to_minus_identity() {
        let j = Involution::new(3).matrix();
        assert_eq!(&j * &j, -&Matrix::identity(6));
        assert_eq!(j.transpose(), -&j);
        let m = crate::random::random_matrix(6, 6, 1);
        assert_eq!(Involution::new(3).apply_left(&m), &j * &m);
        assert_eq!(Involution::new(3).apply_right(&m), &m * &j);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let a = Matrix::identity(6);
        let f = williamson(&a, DEFAULT_WILLIAMSON_TOL).unwrap();
        assert_eq!(f.d.len(), 3);
        for &x in &f.d {
            assert!((x - 1.0).abs() <= 1e-12);
        }
        assert!(f.l.orthogonality_defect() <= 1e-12);
        assert!(f.symplectic_residual_ltjl() <= 1e-12);
        assert!((&f.reconstruct() - &a).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn two_by_two_diagonal() {
        // eigenvalues of J·diag(a₁, a₂) are ±i√(a₁a₂)
        for &(a1, a2) in &[(4.0, 1.0), (2.0, 8.0), (0.3, 0.7)] {
            let a = Matrix::from_diag(&[a1, a2]);
            let d = symplectic_spectrum(&a, DEFAULT_WILLIAMSON_TOL).unwrap();
            let expect: f64 = (a1 * a2).sqrt();
            assert!((d[0] - expect).abs() <= 1e-14 * expect);
            let o = symplectic_spectrum_oracle(&a, DEFAULT_WILLIAMSON_TOL).unwrap();
            assert!((o[0] - expect).abs() <= 1e-14 * expect);
        }
    }

    #[test]
    fn construct_then_recover() {
        let target = [3.0, 2.0, 0.5];
        let n = random_symplectic(3, 17);
        let dd: Vec<f64> = target.iter().chain(target.iter()).copied().collect();
        let a = (&(&n.transpose() * &Matrix::from_diag(&dd)) * &n).symmetric_part();
        let f = williamson(&a, DEFAULT_WILLIAMSON_TOL).unwrap();
        for (x, y) in f.d.iter().zip(&target) {
            assert!((x - y).abs() <= 1e-6 * y, "{x} vs {y}");
        }
        check_form(&a, &f);
    }

    #[test]
    fn random_spd_forms() {
        for seed in 0..6 {
            let a = random_spd(2 * (seed as usize + 1), seed);
            let f = williamson(&a, DEFAULT_WILLIAMSON_TOL).unwrap();
            check_form(&a, &f);
            let o = symplectic_spectrum_oracle(&a, DEFAULT_WILLIAMSON_TOL).unwrap();
            for (x, y) in f.d.iter().zip(&o) {
                assert!((x - y).abs() <= 1e-9 * y);
            }
        }
    }

    #[test]
    fn rejects_invalid_input() {
        assert!(matches!(
            williamson(&Matrix::identity(3), DEFAULT_WILLIAMSON_TOL),
            Err(Error::OddDimension(3))
        ));
        let asym = Matrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            williamson(&asym, DEFAULT_WILLIAMSON_TOL),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            williamson(&Matrix::from_diag(&[1.0, 0.0]), DEFAULT_WILLIAMSON_TOL),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            williamson(&Matrix::from_diag(&[1.0, -2.0]), DEFAULT_WILLIAMSON_TOL),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            symplectic_residual(&Matrix::identity(3)),
            Err(Error::OddDimension(3))
        ));
    }

    #[test]
    fn symplectic_residual_examples() {
        assert_eq!(symplectic_residual(&Matrix::identity(4)).unwrap(), 0.0);
        assert_eq!(symplectic_residual(&Involution::new(2).matrix()).unwrap(), 0.0);
        assert_eq!(symplectic_residual(&Matrix::from_diag(&[2.0, 0.5])).unwrap(), 0.0);
        assert!(symplectic_residual(&Matrix::from_diag(&[2.0, 2.0])).unwrap() > 1.0);
    }

    #[test]
    fn random_symplectic_factors_are_symplectic() {
        for seed in 0..4 {
            assert!(symplectic_residual(&random_symplectic(1, seed)).unwrap() <= 1e-12);
            let (l, u, o) = random_symplectic_factors(4, seed);
            for f in [&l, &u, &o] {
                assert!(symplectic_residual(f).unwrap() <= 1e-13);
            }
            assert!(o.orthogonality_defect() <= 1e-13);
            assert!(symplectic_residual(&random_symplectic(4, seed)).unwrap() <= 1e-10);
        }
        assert_eq!(random_symplectic(3, 5), random_symplectic(3, 5));
    }

    #[test]
    fn inverse_identity_for_symplectic_l() {
        let a = random_spd(6, 40);
        let f = williamson(&a, DEFAULT_WILLIAMSON_TOL).unwrap();
        // L⁻¹ = J⁻¹·Lᵀ·J
        let j = Involution::new(3);
        let jinv = j.matrix().transpose();
        let candidate = &(&jinv * &f.l.transpose()) * &j.matrix();
        let prod = &candidate * &f.l;
        assert!((&prod - &Matrix::identity(6)).frobenius_norm() <= 1e-7 * f.l.frobenius_norm());
    }

    #[test]
    fn uniqueness_examples() {
        let dev = uniqueness_check(&Matrix::identity(4), 3, 1, DEFAULT_WILLIAMSON_TOL).unwrap();
        assert!(dev <= 1e-8);
        let a = Matrix::from_diag(&[3.0, 3.0, 2.0, 2.0]);
        let dev = uniqueness_check(&a, 10, 2, DEFAULT_WILLIAMSON_TOL).unwrap();
        assert!(dev <= 1e-6, "{dev}");
    }

    #[test]
    fn scaling_covariance() {
        let a = random_spd(4, 8);
        let d = symplectic_spectrum(&a, DEFAULT_WILLIAMSON_TOL).unwrap();
        let d3 = symplectic_spectrum(&a.scale(3.0), DEFAULT_WILLIAMSON_TOL).unwrap();
        for (x, y) in d.iter().zip(&d3) {
            assert!((3.0 * x - y).abs() <= 1e-9 * y);
        }
    }
}
