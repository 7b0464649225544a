//! Spectral pairs of real normal matrices in atomic form.
//!
//! The complex spectral projection of `Â` onto an eigenvalue `λ` splits as
//! `Ê({λ}) = E₁({λ}) + i·E₂({λ})` with `E₁` symmetric and `E₂` skew. The
//! conjugate atom is fixed by `E₁({λ̄}) = E₁({λ})`, `E₂({λ̄}) = −E₂({λ})`, so
//! only atoms with `Im λ ≥ 0` are stored. Over the conjugate-closed family
//!
//! ```text
//! A = Σ_λ Re λ · E₁({λ}) − Im λ · E₂({λ})
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, DEFAULT_EIG_TOL};
use crate::matrix::{ComplexMatrix, Matrix};
use crate::normal::real_normal_form;

/// Atoms whose eigenvalues differ by at most this multiple of `‖A‖_F` are
/// merged.
pub const MERGE_REL: f64 = 1e-8;

/// Largest total exponent accepted by [`moment`].
pub const MAX_MOMENT_ORDER: usize = 8;

/// One atom `({λ}, E₁({λ}), E₂({λ}))`, `Im λ ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralAtom {
    pub lambda: Complex64,
    pub e1: Matrix,
    pub e2: Matrix,
}

impl SpectralAtom {
    pub fn is_real(&self) -> bool {
        self.lambda.im == 0.0
    }

    /// The atom at `λ̄`, from the conjugation symmetry of spectral pairs.
    pub fn conjugate(&self) -> SpectralAtom {
        SpectralAtom {
            lambda: self.lambda.conj(),
            e1: self.e1.clone(),
            e2: -&self.e2,
        }
    }

    /// `Ê({λ}) = complexify(E₁) + i·complexify(E₂)`.
    pub fn complex_projection(&self) -> ComplexMatrix {
        ComplexMatrix {
            re: self.e1.clone(),
            im: self.e2.clone(),
        }
    }
}

/// The spectral pair of a normal matrix on its (finite) spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralAtomSet {
    pub atoms: Vec<SpectralAtom>,
    pub dim: usize,
}

impl SpectralAtomSet {
    /// Stored atoms plus the conjugates of the non-real ones.
    pub fn conjugate_closed(&self) -> Vec<SpectralAtom> {
        let mut out = Vec::with_capacity(2 * self.atoms.len());
        for atom in &self.atoms {
            out.push(atom.clone());
            if !atom.is_real() {
                out.push(atom.conjugate());
            }
        }
        out
    }

    /// `E₁(σ(A))`, which must be the identity.
    pub fn e1_total(&self) -> Matrix {
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for atom in self.conjugate_closed() {
            acc = &acc + &atom.e1;
        }
        acc
    }

    /// `E₂(σ(A))`, which must vanish.
    pub fn e2_total(&self) -> Matrix {
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for atom in self.conjugate_closed() {
            acc = &acc + &atom.e2;
        }
        acc
    }

    /// The signed measures `μ₁^{(x,y)}` and `μ₂^{(x,y)}` on the stored
    /// atoms: `(λ, xᵀE₁y, xᵀE₂y)`.
    pub fn measures(&self, x: &[f64], y: &[f64]) -> Vec<(Complex64, f64, f64)> {
        self.atoms
            .iter()
            .map(|atom| {
                let m1 = crate::vecops::dot(x, &atom.e1.mul_vec(y));
                let m2 = crate::vecops::dot(x, &atom.e2.mul_vec(y));
                (atom.lambda, m1, m2)
            })
            .collect()
    }
}

/// Spectral pair of a normal matrix, read off its real normal form.
///
/// A real eigenvalue with eigenvector cluster `Q_r` gives the atom
/// `(a_r, Q_r Q_rᵀ, 0)`. A block `α ± iβ` on columns `(c₁, c₂)` gives
/// `(α + iβ, (c₁c₁ᵀ + c₂c₂ᵀ)/2, ±(c₂c₁ᵀ − c₁c₂ᵀ)/2)`, the sign chosen so the
/// atoms reproduce `A`.
pub fn spectral_pair(a: &Matrix, tol: f64) -> Result<SpectralAtomSet> {
    let form = real_normal_form(a, tol)?;
    let n = form.dim();
    let merge = MERGE_REL * a.frobenius_norm();
    let mut atoms: Vec<SpectralAtom> = Vec::new();

    let mut push = |atom: SpectralAtom| {
        if let Some(existing) = atoms
            .iter_mut()
            .find(|x| (x.lambda - atom.lambda).norm() <= merge)
        {
            existing.e1 = &existing.e1 + &atom.e1;
            existing.e2 = &existing.e2 + &atom.e2;
        } else {
            atoms.push(atom);
        }
    };

    for (i, &x) in form.real_eigs.iter().enumerate() {
        let c = form.w.column(i);
        push(SpectralAtom {
            lambda: Complex64::new(x, 0.0),
            e1: outer(&c, &c),
            e2: Matrix::zeros(n, n),
        });
    }
    for (j, &(alpha, beta)) in form.blocks.iter().enumerate() {
        let (c1, c2) = form.block_columns(j);
        let e1 = (&outer(&c1, &c1) + &outer(&c2, &c2)).scale(0.5);
        let rot = (&outer(&c2, &c1) - &outer(&c1, &c2)).scale(0.5);
        // −2β·E₂ must equal the rotation part β(c₁c₂ᵀ − c₂c₁ᵀ) of A
        let coupling = crate::vecops::dot(&c1, &a.mul_vec(&c2))
            - crate::vecops::dot(&c2, &a.mul_vec(&c1));
        let e2 = if coupling >= 0.0 { rot } else { -&rot };
        push(SpectralAtom {
            lambda: Complex64::new(alpha, beta),
            e1: e1.symmetric_part(),
            e2: e2.skew_part(),
        });
    }

    Ok(SpectralAtomSet { atoms, dim: n })
}

fn outer(x: &[f64], y: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(x.len(), y.len());
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            m[(i, j)] = xi * yj;
        }
    }
    m
}

/// `Σ_λ Re λ · E₁({λ}) − Im λ · E₂({λ})` over the conjugate-closed family.
pub fn reconstruct(s: &SpectralAtomSet) -> Matrix {
    let mut acc = Matrix::zeros(s.dim, s.dim);
    for atom in s.conjugate_closed() {
        let term = &atom.e1.scale(atom.lambda.re) - &atom.e2.scale(atom.lambda.im);
        acc = &acc + &term;
    }
    acc
}

/// `A^{t1}(Aᵀ)^{t2}` from the atoms: with `λ = r·e^{iθ}`,
/// `Σ_λ r^{t1+t2} [cos((t1−t2)θ)·E₁({λ}) − sin((t1−t2)θ)·E₂({λ})]`.
pub fn moment(s: &SpectralAtomSet, t1: usize, t2: usize) -> Result<Matrix> {
    if t1 + t2 > MAX_MOMENT_ORDER {
        return Err(Error::ExponentBound {
            t1,
            t2,
            max: MAX_MOMENT_ORDER,
        });
    }
    let mut acc = Matrix::zeros(s.dim, s.dim);
    for atom in s.conjugate_closed() {
        // λ^{t1}·λ̄^{t2} = r^{t1+t2}·e^{i(t1−t2)θ}
        let z = atom.lambda.powu(t1 as u32) * atom.lambda.conj().powu(t2 as u32);
        let term = &atom.e1.scale(z.re) - &atom.e2.scale(z.im);
        acc = &acc + &term;
    }
    Ok(acc)
}

/// The complexification `Â(x + iy) = Ax + iAy`.
pub fn complexify(a: &Matrix) -> ComplexMatrix {
    ComplexMatrix {
        re: a.clone(),
        im: Matrix::zeros(a.rows(), a.cols()),
    }
}

/// Largest singular value of a complex matrix, through the real embedding
/// of `Z*Z`.
pub fn operator_norm(z: &ComplexMatrix) -> f64 {
    let zz = z.adjoint().matmul(z).expect("square product");
    let n = zz.re.rows();
    let mut emb = Matrix::zeros(2 * n, 2 * n);
    emb.set_block(0, 0, &zz.re);
    emb.set_block(n, n, &zz.re);
    emb.set_block(0, n, &(-&zz.im));
    emb.set_block(n, 0, &zz.im);
    let eig = sym_eig(&emb.symmetric_part(), DEFAULT_EIG_TOL).expect("hermitian embedding");
    eig.d[0].max(0.0).sqrt()
}

/// Residuals of the conjugation identity `𝒥·Ê(e) = Ê(ē)·𝒥` on every atom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WongReport {
    /// `max_λ ‖conj(Ê({λ})) − Ê({λ̄})‖_F`.
    pub conjugation: f64,
    /// `max_μ ‖Â·Ê({μ}) − μ·Ê({μ})‖_F / ‖A‖_F` over both `λ` and `λ̄`.
    pub eigen_relation: f64,
    pub max: f64,
}

/// Checks that entrywise conjugation maps `Ê({λ})` to `Ê({λ̄})`, where the
/// latter comes from the spectral-pair symmetry, and that both are
/// eigenprojections of `Â` for their eigenvalue.
pub fn wong_check(a: &Matrix, tol: f64) -> Result<WongReport> {
    let s = spectral_pair(a, tol)?;
    Ok(wong_residuals(a, &s))
}

pub fn wong_residuals(a: &Matrix, s: &SpectralAtomSet) -> WongReport {
    let a_hat = complexify(a);
    let a_norm = a.frobenius_norm();
    let mut conjugation = 0.0f64;
    let mut eigen_relation = 0.0f64;
    for atom in &s.atoms {
        let e = atom.complex_projection();
        let e_bar = atom.conjugate().complex_projection();
        conjugation = conjugation.max(e.conj().sub(&e_bar).frobenius_norm());
        for (mu, proj) in [(atom.lambda, &e), (atom.lambda.conj(), &e_bar)] {
            let lhs = a_hat.matmul(proj).expect("square");
            let rhs = proj.scale(mu.re, mu.im);
            let r = lhs.sub(&rhs).frobenius_norm();
            let r = if a_norm > 0.0 { r / a_norm } else { r };
            eigen_relation = eigen_relation.max(r);
        }
    }
    WongReport {
        conjugation,
        eigen_relation,
        max: conjugation.max(eigen_relation),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::DEFAULT_NORMAL_TOL;
    use crate::random::random_normal;

    fn j2() -> Matrix {
        Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap()
    }

    #[test]
    fn single_real_atom() {
        let a = Matrix::from_diag(&[7.0]);
        let s = spectral_pair(&a, DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(s.atoms.len(), 1);
        assert_eq!(s.atoms[0].lambda, Complex64::new(7.0, 0.0));
        assert_eq!(s.atoms[0].e1, Matrix::identity(1));
        assert_eq!(s.atoms[0].e2, Matrix::zeros(1, 1));
        assert_eq!(reconstruct(&s), a);
    }

    #[test]
    fn j2_atom_matches_hand_computation() {
        // Ê({i}) = (I − iJ₂)/2 is the projection onto (1, −i)/√2.
        let s = spectral_pair(&j2(), DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(s.atoms.len(), 1);
        let atom = &s.atoms[0];
        assert!((atom.lambda - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((&atom.e1 - &Matrix::identity(2).scale(0.5)).frobenius_norm() < 1e-15);
        let expect_e2 = j2().scale(-0.5);
        assert!((&atom.e2 - &expect_e2).frobenius_norm() < 1e-15);
        assert!((&reconstruct(&s) - &j2()).frobenius_norm() < 1e-15);
        let w = wong_check(&j2(), DEFAULT_NORMAL_TOL).unwrap();
        assert!(w.max <= 1e-12);
    }

    #[test]
    fn random_normal_invariants() {
        let sample = random_normal(6, 77);
        let a = &sample.matrix;
        let s = spectral_pair(a, DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(s.atoms.len(), sample.real_eigs.len() + sample.blocks.len());
        let na = a.frobenius_norm();
        assert!((&reconstruct(&s) - a).frobenius_norm() <= 1e-9 * na);
        assert!((&s.e1_total() - &Matrix::identity(6)).frobenius_norm() <= 1e-9);
        assert!(s.e2_total().frobenius_norm() <= 1e-9);
        for atom in &s.atoms {
            assert!(atom.e1.asymmetry() <= 1e-10);
            assert!(atom.e2.skew_defect() <= 1e-10);
            let e = sym_eig(&atom.e1, DEFAULT_EIG_TOL).unwrap();
            assert!(*e.d.last().unwrap() >= -1e-10);
        }
    }

    #[test]
    fn repeated_eigenvalues_merge() {
        let a = Matrix::from_diag(&[2.0, 2.0, -1.0]);
        let s = spectral_pair(&a, DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(s.atoms.len(), 2);
        assert_eq!(s.atoms[0].e1, Matrix::from_diag(&[1.0, 1.0, 0.0]));
    }

    #[test]
    fn moments_basic() {
        let sample = random_normal(5, 3);
        let a = &sample.matrix;
        let s = spectral_pair(a, DEFAULT_NORMAL_TOL).unwrap();
        let m0 = moment(&s, 0, 0).unwrap();
        assert!((&m0 - &Matrix::identity(5)).frobenius_norm() < 1e-12);
        assert_eq!(moment(&s, 1, 0).unwrap(), reconstruct(&s));
        let direct = &(a * a) * &a.transpose();
        let m21 = moment(&s, 2, 1).unwrap();
        let na = a.frobenius_norm();
        assert!((&m21 - &direct).frobenius_norm() <= 1e-8 * na.powi(3));
        assert!(matches!(moment(&s, 5, 4), Err(Error::ExponentBound { .. })));
    }

    #[test]
    fn complexify_properties() {
        let a = crate::random::random_matrix(3, 3, 12);
        let z = complexify(&a);
        assert_eq!(z.re, a);
        assert_eq!(z.im, Matrix::zeros(3, 3));
        assert_eq!(complexify(&a.transpose()), z.adjoint());
        let ata = (&a.transpose() * &a).symmetric_part();
        let op = sym_eig(&ata, DEFAULT_EIG_TOL).unwrap().d[0].sqrt();
        assert!((operator_norm(&z) - op).abs() < 1e-12 * op);
    }

    #[test]
    fn wong_on_symmetric_is_exact() {
        let a = crate::random::random_spd(4, 2);
        let w = wong_check(&a, DEFAULT_NORMAL_TOL).unwrap();
        assert_eq!(w.conjugation, 0.0);
        assert!(w.eigen_relation < 1e-12);
    }
}
