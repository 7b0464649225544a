use proptest::prelude::*;
use symspec::linalg::{sym_eig, sym_sqrt};
use symspec::normal::{real_normal_form, spectrum, transpose_equivalence};
use symspec::random::{random_matrix, random_normal, random_orthogonal, random_skew, random_spd};
use symspec::skew::skew_canonical;
use symspec::spectral::spectral_pair;
use symspec::williamson::{symplectic_spectrum, symplectic_spectrum_oracle, williamson};
use symspec::{Complex64, ComplexMatrix, Matrix};

fn conj_by(q: &Matrix, a: &Matrix) -> Matrix {
    &(&q.transpose() * a) * q
}

// Greedy nearest-neighbour matching; returns the worst matched distance.
fn multiset_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut used = vec![false; y.len()];
    let mut worst = 0.0f64;
    for a in x {
        let (j, d) = y
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, b)| (j, (a - b).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn cfg() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn eig_reconstructs(n in 1usize..10, seed in any::<u64>()) {
        let g = random_matrix(n, n, seed);
        let a = g.symmetric_part();
        let e = sym_eig(&a, 1e-12).unwrap();
        let r = (&e.reconstruct() - &a).frobenius_norm();
        prop_assert!(r <= 1e-11 * a.frobenius_norm());
        prop_assert!(e.d.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(sym_eig(&a, 1e-12).unwrap(), e);
    }

    #[test]
    fn sqrt_commutes_with_input(n in 1usize..9, seed in any::<u64>()) {
        let a = random_spd(n, seed);
        let b = sym_sqrt(&a, 1e-10).unwrap();
        let na = a.frobenius_norm();
        prop_assert!((&(&b * &b) - &a).frobenius_norm() <= 1e-10 * na);
        prop_assert!((&(&a * &b) - &(&b * &a)).frobenius_norm() <= 1e-10 * na * b.frobenius_norm());
    }

    #[test]
    fn spectrum_is_conjugate_closed_and_transpose_invariant(n in 1usize..10, seed in any::<u64>()) {
        let a = random_normal(n, seed).matrix;
        let sp = spectrum(&a, 1e-10).unwrap();
        let conj: Vec<Complex64> = sp.iter().map(|z| z.conj()).collect();
        let scale = a.frobenius_norm();
        prop_assert!(multiset_distance(&sp, &conj) <= 1e-9 * scale);
        let spt = spectrum(&a.transpose(), 1e-10).unwrap();
        prop_assert!(multiset_distance(&sp, &spt) <= 1e-9 * scale);
    }

    #[test]
    fn normal_parts_commute(n in 1usize..10, seed in any::<u64>()) {
        let a = random_normal(n, seed).matrix;
        let (h, s) = (a.symmetric_part(), a.skew_part());
        let c = &(&h * &s) - &(&s * &h);
        prop_assert!(c.frobenius_norm() <= 1e-10 * a.frobenius_norm().powi(2));
    }

    #[test]
    fn transpose_equivalence_is_an_involution(n in 1usize..10, seed in any::<u64>()) {
        let a = random_normal(n, seed).matrix;
        let u = transpose_equivalence(&a, 1e-10).unwrap();
        prop_assert!((&(&u * &u) - &Matrix::identity(n)).frobenius_norm() <= 1e-9);
    }

    #[test]
    fn normal_form_matches_generating_data(n in 1usize..10, seed in any::<u64>()) {
        let sample = random_normal(n, seed);
        let f = real_normal_form(&sample.matrix, 1e-10).unwrap();
        let mut expected: Vec<Complex64> = sample.real_eigs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for &(al, be) in &sample.blocks {
            expected.push(Complex64::new(al, be));
            expected.push(Complex64::new(al, -be));
        }
        prop_assert!(multiset_distance(&f.spectrum(), &expected) <= 1e-9 * sample.matrix.frobenius_norm());
    }

    #[test]
    fn skew_form_is_orthogonally_invariant(n in 1usize..10, seed in any::<u64>()) {
        let s = random_skew(n, seed);
        let q = random_orthogonal(n, seed ^ 0x5555);
        let p0 = skew_canonical(&s, 1e-10).unwrap().p;
        let p1 = skew_canonical(&conj_by(&q, &s).skew_part(), 1e-10).unwrap().p;
        prop_assert_eq!(p0.len(), p1.len());
        for (x, y) in p0.iter().zip(&p1) {
            prop_assert!((x - y).abs() <= 1e-8 * x);
        }
    }

    #[test]
    fn odd_powers_of_skew_are_isotropic(n in 1usize..10, seed in any::<u64>(), k in 0usize..4) {
        let s = random_skew(n, seed);
        let x = random_matrix(n, 1, seed.wrapping_add(1)).column(0);
        let mut y = x.clone();
        for _ in 0..(2 * k + 1) {
            y = s.mul_vec(&y);
        }
        let ip: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let nx2: f64 = x.iter().map(|v| v * v).sum();
        let ns = s.frobenius_norm();
        prop_assert!(ip.abs() <= 1e-10 * ns.powi(2 * k as i32 + 1) * nx2);
    }

    #[test]
    fn e2_atoms_are_alternating(n in 1usize..9, seed in any::<u64>()) {
        let a = random_normal(n, seed).matrix;
        let set = spectral_pair(&a, 1e-10).unwrap();
        let x = random_matrix(n, 1, seed ^ 7).column(0);
        let nx2: f64 = x.iter().map(|v| v * v).sum();
        for (_, _, m2) in set.measures(&x, &x) {
            prop_assert!(m2.abs() <= 1e-12 * nx2 * a.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn complex_atoms_are_orthogonal_projections(n in 1usize..9, seed in any::<u64>()) {
        let a = random_normal(n, seed).matrix;
        let atoms = spectral_pair(&a, 1e-10).unwrap().conjugate_closed();
        let p: Vec<ComplexMatrix> = atoms.iter().map(|x| x.complex_projection()).collect();
        for (i, pi) in p.iter().enumerate() {
            for (j, pj) in p.iter().enumerate() {
                let prod = pi.matmul(pj).unwrap();
                let expect = if i == j { pi.clone() } else { ComplexMatrix::new(Matrix::zeros(n, n), Matrix::zeros(n, n)).unwrap() };
                prop_assert!(prod.sub(&expect).frobenius_norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn spectral_pair_is_basis_independent(n in 1usize..9, seed in any::<u64>()) {
        // same matrix, reduced after an orthogonal change of basis and mapped back
        let a = random_normal(n, seed).matrix;
        let q = random_orthogonal(n, seed ^ 0xabc);
        let s0 = spectral_pair(&a, 1e-10).unwrap();
        let s1 = spectral_pair(&conj_by(&q, &a), 1e-10).unwrap();
        prop_assert_eq!(s0.atoms.len(), s1.atoms.len());
        let qt = q.transpose();
        for atom in &s0.atoms {
            let other = s1
                .atoms
                .iter()
                .min_by(|x, y| (x.lambda - atom.lambda).norm().total_cmp(&(y.lambda - atom.lambda).norm()))
                .unwrap();
            prop_assert!((other.lambda - atom.lambda).norm() <= 1e-8 * a.frobenius_norm());
            let e1 = conj_by(&qt, &other.e1);
            let e2 = conj_by(&qt, &other.e2);
            prop_assert!((&e1 - &atom.e1).frobenius_norm() <= 1e-8);
            prop_assert!((&e2 - &atom.e2).frobenius_norm() <= 1e-8);
        }
    }

    #[test]
    fn symplectic_spectrum_scales_and_matches_oracle(half in 1usize..6, seed in any::<u64>(), c in 0.1f64..10.0) {
        let a = random_spd(2 * half, seed);
        let d = symplectic_spectrum(&a, 1e-10).unwrap();
        let oracle = symplectic_spectrum_oracle(&a, 1e-10).unwrap();
        let scaled = symplectic_spectrum(&a.scale(c), 1e-10).unwrap();
        for i in 0..half {
            prop_assert!((d[i] - oracle[i]).abs() <= 1e-9 * d[i]);
            prop_assert!((scaled[i] - c * d[i]).abs() <= 1e-9 * c * d[i]);
        }
    }

    #[test]
    fn williamson_factor_inverse_is_symplectic_adjoint(half in 1usize..6, seed in any::<u64>()) {
        let a = random_spd(2 * half, seed);
        let f = williamson(&a, 1e-10).unwrap();
        prop_assert!((&f.reconstruct() - &a).frobenius_norm() <= 1e-8 * a.frobenius_norm());
        // L·(J⁻¹LᵀJ) = I for symplectic L
        let j = symspec::williamson::Involution::new(half).matrix();
        let jinv = j.scale(-1.0);
        let adj = &(&jinv * &f.l.transpose()) * &j;
        let r = (&(&f.l * &adj) - &Matrix::identity(2 * half)).frobenius_norm();
        prop_assert!(r <= 1e-8 * f.l.frobenius_norm());
    }
}
