//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always show up in
//! `cargo test` output. Set `SYMSPEC_BLESS=1` to rewrite the golden reports
//! instead of comparing against them.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use serde_json::Value;
use symspec::normal::{spectrum, transpose_equivalence, transpose_equivalence_cyclic};
use symspec::random::{random_matrix, random_normal, random_orthogonal, random_skew, random_spd};
use symspec::skew::{skew_canonical, skew_canonical_cyclic};
use symspec::spectral::{moment, reconstruct, spectral_pair, wong_check};
use symspec::williamson::{random_symplectic, symplectic_spectrum, symplectic_spectrum_oracle, williamson};
use symspec::{Complex64, Matrix};
use symspec_cli::truncation::{run_study, Family};

const TOL: f64 = 1e-10;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, detail: String) -> Outcome {
    if failures.is_empty() {
        Outcome { passed: true, detail }
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        Outcome {
            passed: false,
            detail: format!("{} failure(s): {}", failures.len(), shown.join("; ")),
        }
    }
}

fn conj_by(q: &Matrix, a: &Matrix) -> Matrix {
    &(&q.transpose() * a) * q
}

fn identity_defect(m: &Matrix) -> f64 {
    (&(m * &m.transpose()) - &Matrix::identity(m.rows())).frobenius_norm()
}

fn symplectic_defect(l: &Matrix) -> (f64, f64) {
    let n = l.rows() / 2;
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    let ljlt = &(l * &j) * &l.transpose();
    let ltjl = &(&l.transpose() * &j) * l;
    ((&ljlt - &j).frobenius_norm(), (&ltjl - &j).frobenius_norm())
}

/// Worst distance in an optimal-ish (greedy nearest) matching of two multisets.
fn match_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    if x.len() != y.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; y.len()];
    let mut worst = 0.0f64;
    for a in x {
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, b) in y.iter().enumerate() {
            let d = (a - b).norm();
            if !used[j] && d < best.1 {
                best = (j, d);
            }
        }
        used[best.0] = true;
        worst = worst.max(best.1);
    }
    worst
}

fn spd_corpus() -> impl Iterator<Item = (u64, Matrix)> {
    (0..200u64).map(|seed| (seed, random_spd(2 * (1 + seed as usize % 16), seed)))
}

fn normal_corpus() -> impl Iterator<Item = (u64, symspec::random::NormalSample)> {
    (0..100u64).map(|seed| (seed, random_normal(1 + seed as usize % 12, 10_000 + seed)))
}

fn c1_williamson_reconstruction() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = (0.0f64, 0.0f64);
    let start = Instant::now();
    for (seed, a) in spd_corpus() {
        let f = match williamson(&a, TOL) {
            Ok(f) => f,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let dd: Vec<f64> = f.d.iter().chain(&f.d).copied().collect();
        let rec = conj_by(&f.l, &Matrix::from_diag(&dd));
        let r = (&rec - &a).frobenius_norm() / a.frobenius_norm();
        let (s1, s2) = symplectic_defect(&f.l);
        worst.0 = worst.0.max(r);
        worst.1 = worst.1.max(s1.max(s2));
        if r > 1e-8 || s1 > 1e-8 || s2 > 1e-8 {
            failures.push(format!("seed {seed}: rec {r:e}, symp {s1:e}/{s2:e}"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 5.0 {
        failures.push(format!("runtime {elapsed:.2} s"));
    }
    outcome(
        failures,
        format!("max rec {:.1e}, max symp {:.1e}, {elapsed:.2} s", worst.0, worst.1),
    )
}

fn c2_oracle_agreement() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (seed, a) in spd_corpus() {
        match (symplectic_spectrum(&a, TOL), symplectic_spectrum_oracle(&a, TOL)) {
            (Ok(d), Ok(o)) => {
                for (x, y) in d.iter().zip(&o) {
                    let r = (x - y).abs() / y;
                    worst = worst.max(r);
                    if r > 1e-9 {
                        failures.push(format!("seed {seed}: {x} vs {y}"));
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    outcome(failures, format!("max rel dev {worst:.1e}"))
}

fn c3_uniqueness() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let half = 1 + i as usize % 8;
        let a = random_spd(2 * half, 5_000 + i);
        let base = match symplectic_spectrum(&a, TOL) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("matrix {i}: {e}"));
                continue;
            }
        };
        for t in 0..5u64 {
            let n = random_symplectic(half, 7_000 + 10 * i + t);
            let conj = conj_by(&n, &a).symmetric_part();
            match symplectic_spectrum(&conj, TOL) {
                Ok(d) => {
                    for (x, y) in base.iter().zip(&d) {
                        let r = (x - y).abs() / x;
                        worst = worst.max(r);
                        if r > 1e-6 {
                            failures.push(format!("matrix {i} trial {t}: {x} vs {y}"));
                        }
                    }
                }
                Err(e) => failures.push(format!("matrix {i} trial {t}: {e}")),
            }
        }
    }
    outcome(failures, format!("max rel dev {worst:.1e} over 250 conjugations"))
}

fn c4_closed_forms() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let draws = random_matrix(20, 2, 4_242);
    for i in 0..20 {
        // positive entries spread over [0.01, 100]
        let a1 = 10f64.powf(2.0 * draws[(i, 0)]);
        let a2 = 10f64.powf(2.0 * draws[(i, 1)]);
        let a = Matrix::from_diag(&[a1, a2]);
        // J·diag(a1, a2) = [[0, −a2], [a1, 0]] has eigenvalues ±i√(a1·a2)
        let expect = (a1 * a2).sqrt();
        match symplectic_spectrum(&a, TOL) {
            Ok(d) => {
                let r = (d[0] - expect).abs() / expect;
                worst = worst.max(r);
                if d.len() != 1 || r > 1e-10 {
                    failures.push(format!("diag({a1}, {a2}) -> {d:?}"));
                }
            }
            Err(e) => failures.push(format!("diag({a1}, {a2}): {e}")),
        }
    }
    for half in 1..=8 {
        match symplectic_spectrum(&Matrix::identity(2 * half), TOL) {
            Ok(d) if d.len() == half && d.iter().all(|x| (x - 1.0).abs() <= 1e-12) => {}
            other => failures.push(format!("I_{}: {other:?}", 2 * half)),
        }
    }
    outcome(failures, format!("diag pairs max rel dev {worst:.1e}; identities exact"))
}

fn transpose_residuals(u: &Matrix, a: &Matrix) -> [f64; 3] {
    let sym = (u - &u.transpose()).frobenius_norm();
    let orth = identity_defect(u);
    let eq = (&(&(u * a) * &u.transpose()) - &a.transpose()).frobenius_norm() / a.frobenius_norm();
    [sym, orth, eq]
}

fn c5_transpose_equivalence() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = [0.0f64; 3];
    let mut cyclic_runs = 0;
    let mut check = |label: String, u: symspec::Result<Matrix>, a: &Matrix, failures: &mut Vec<String>| match u {
        Ok(u) => {
            let r = transpose_residuals(&u, a);
            for (w, x) in worst.iter_mut().zip(r) {
                *w = w.max(x);
            }
            if r[0] > 1e-10 || r[1] > 1e-10 || r[2] > 1e-9 {
                failures.push(format!("{label}: sym {:e}, orth {:e}, eq {:e}", r[0], r[1], r[2]));
            }
        }
        Err(e) => failures.push(format!("{label}: {e}")),
    };
    for (seed, sample) in normal_corpus() {
        let a = &sample.matrix;
        let n = a.rows();
        check(format!("seed {seed} eigen"), transpose_equivalence(a, TOL), a, &mut failures);
        if n <= 12 {
            cyclic_runs += 1;
            let x = random_matrix(n, 1, 20_000 + seed).column(0);
            check(format!("seed {seed} cyclic"), transpose_equivalence_cyclic(a, &x, TOL), a, &mut failures);
        }
    }
    outcome(
        failures,
        format!(
            "100 eigen + {cyclic_runs} cyclic; max sym {:.1e}, orth {:.1e}, eq {:.1e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn c6_spectrum_symmetry() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (seed, sample) in normal_corpus() {
        let a = &sample.matrix;
        let sp = match spectrum(a, TOL) {
            Ok(sp) => sp,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let conj: Vec<Complex64> = sp.iter().map(|z| z.conj()).collect();
        let d = match_distance(&sp, &conj);
        // also against the data the matrix was built from
        let mut built: Vec<Complex64> = sample.real_eigs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for &(al, be) in &sample.blocks {
            built.push(Complex64::new(al, be));
            built.push(Complex64::new(al, -be));
        }
        let d_built = match_distance(&sp, &built);
        worst = worst.max(d);
        if d > 1e-9 || d_built > 1e-9 * a.frobenius_norm() {
            failures.push(format!("seed {seed}: conj {d:e}, built {d_built:e}"));
        }
    }
    outcome(failures, format!("max conjugate mismatch {worst:.1e}"))
}

fn c7_spectral_pair() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_moment = 0.0f64;
    for (seed, sample) in normal_corpus() {
        let a = &sample.matrix;
        let n = a.rows();
        let norm = a.frobenius_norm();
        let set = match spectral_pair(a, TOL) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let rec = (&reconstruct(&set) - a).frobenius_norm();
        if rec > 1e-9 * norm {
            failures.push(format!("seed {seed}: reconstruction {rec:e}"));
        }
        let at = a.transpose();
        for s in 0..=4usize {
            for t in 0..=(4 - s) {
                // A^s (Aᵀ)^t by repeated multiplication
                let mut direct = Matrix::identity(n);
                for _ in 0..s {
                    direct = &direct * a;
                }
                for _ in 0..t {
                    direct = &direct * &at;
                }
                let m = moment(&set, s, t).expect("order ≤ 8");
                let r = (&m - &direct).frobenius_norm() / norm.powi((s + t) as i32);
                worst_moment = worst_moment.max(r);
                if r > 1e-8 {
                    failures.push(format!("seed {seed}: moment ({s},{t}) {r:e}"));
                }
            }
        }
        let wong = wong_check(a, TOL).map(|w| w.max).unwrap_or(f64::INFINITY);
        let e1 = (&set.e1_total() - &Matrix::identity(n)).frobenius_norm();
        let e2 = set.e2_total().frobenius_norm();
        if wong > 1e-9 || e1 > 1e-9 || e2 > 1e-9 {
            failures.push(format!("seed {seed}: wong {wong:e}, e1 {e1:e}, e2 {e2:e}"));
        }
    }
    outcome(failures, format!("max moment residual {worst_moment:.1e}"))
}

fn c8_skew_canonical() -> Outcome {
    let mut failures = Vec::new();
    let mut cyclic_runs = 0;
    for seed in 0..100u64 {
        let n = 1 + seed as usize % 12;
        let s = random_skew(n, 30_000 + seed);
        let norm = s.frobenius_norm();
        let f = match skew_canonical(&s, TOL) {
            Ok(f) => f,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let rec = (&f.reconstruct() - &s).frobenius_norm();
        if rec > 1e-9 * norm || identity_defect(&f.v) > 1e-10 {
            failures.push(format!("seed {seed}: reconstruction {rec:e}"));
        }
        // p² are the eigenvalues of sᵀs, each twice
        let g = (&s.transpose() * &s).symmetric_part();
        let ev = symspec::linalg::sym_eig(&g, 1e-14).expect("symmetric").d;
        for (j, p) in f.p.iter().enumerate() {
            let expect = (0.5 * (ev[2 * j] + ev[2 * j + 1])).sqrt();
            if (p - expect).abs() > 1e-9 * expect {
                failures.push(format!("seed {seed}: p[{j}] = {p}, sᵀs gives {expect}"));
            }
        }
        let q = random_orthogonal(n, 40_000 + seed);
        match skew_canonical(&conj_by(&q, &s).skew_part(), TOL) {
            Ok(g) if g.p.len() == f.p.len() => {
                for (x, y) in f.p.iter().zip(&g.p) {
                    if (x - y).abs() > 1e-8 * x {
                        failures.push(format!("seed {seed}: p moved {x} -> {y}"));
                    }
                }
            }
            other => failures.push(format!("seed {seed}: conjugated {other:?}")),
        }
        if n % 2 == 0 && n <= 12 {
            cyclic_runs += 1;
            let x = random_matrix(n, 1, 50_000 + seed).column(0);
            match skew_canonical_cyclic(&s, &x, TOL) {
                Ok(c) => {
                    let rec = (&c.reconstruct() - &s).frobenius_norm();
                    let agree = c.p.len() == f.p.len()
                        && c.p.iter().zip(&f.p).all(|(x, y)| (x - y).abs() <= 1e-8 * y);
                    if !agree || rec > 1e-9 * norm {
                        failures.push(format!("seed {seed}: cyclic {:?} vs {:?}", c.p, f.p));
                    }
                }
                Err(e) => failures.push(format!("seed {seed} cyclic: {e}")),
            }
        }
    }
    outcome(failures, format!("100 skew matrices, {cyclic_runs} cyclic cross-checks"))
}

// ---- golden CLI corpus ----

const CORPUS: [(&str, &[&str]); 10] = [
    ("01_identity4", &["williamson"]),
    ("02_diag41", &["williamson"]),
    ("03_spd6", &["williamson"]),
    ("04_spd8", &["symplectic-spectrum"]),
    ("05_skew_3j2", &["skew"]),
    ("06_skew5", &["skew"]),
    ("07_rotation", &["normal-form"]),
    ("08_normal6", &["spectral-pair"]),
    ("09_normal5", &["transpose-equiv", "--method", "cyclic", "--seed", "3"]),
    ("10_odd3", &["williamson"]),
];

// One entry per report: a JSON pointer to a payload number to move by 1e−3.
const PERTURBATIONS: [(&str, &str); 10] = [
    ("01_identity4", "/payload/l/data/0/2"),
    ("02_diag41", "/payload/d/0"),
    ("03_spd6", "/payload/l/data/3/4"),
    ("04_spd8", "/payload/d/2"),
    ("05_skew_3j2", "/payload/v/data/1/0"),
    ("06_skew5", "/payload/p/1"),
    ("07_rotation", "/payload/w/data/0/1"),
    ("08_normal6", "/payload/atoms/0/e1/data/2/2"),
    ("09_normal5", "/payload/u/data/4/1"),
    ("10_odd3", "/payload/a/data/1/2"),
];

fn cli_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_symspec"))
        .args(args)
        .output()
        .expect("spawn symspec");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn verify_file(path: &Path) -> i32 {
    run_cli(&["verify", path.to_str().expect("utf-8 path")]).0
}

fn c9_golden_files() -> Outcome {
    let bless = std::env::var_os("SYMSPEC_BLESS").is_some();
    let dir = cli_dir();
    let scratch = tempfile::tempdir().expect("temp dir");
    let mut failures = Vec::new();
    for (name, args) in CORPUS {
        let input = dir.join("data").join(format!("{name}.txt"));
        let mut full: Vec<&str> = vec![args[0], input.to_str().expect("utf-8 path")];
        full.extend(&args[1..]);
        let (code1, first) = run_cli(&full);
        let (code2, second) = run_cli(&full);
        let expected_code = if name == "10_odd3" { 2 } else { 0 };
        if code1 != expected_code || code2 != expected_code {
            failures.push(format!("{name}: exit {code1}/{code2}"));
        }
        if first != second {
            failures.push(format!("{name}: output differs between runs"));
        }
        let golden = dir.join("golden").join(format!("{name}.json"));
        if bless {
            std::fs::write(&golden, &first).expect("write golden");
        } else {
            match std::fs::read(&golden) {
                Ok(g) if g == first => {}
                Ok(_) => failures.push(format!("{name}: differs from golden")),
                Err(e) => failures.push(format!("{name}: {e}")),
            }
        }
        let report = scratch.path().join(format!("{name}.json"));
        std::fs::write(&report, &first).expect("write report");
        if verify_file(&report) != 0 {
            failures.push(format!("{name}: genuine report rejected"));
        }
    }
    let mut rejected = 0;
    for (name, pointer) in PERTURBATIONS {
        let text = std::fs::read_to_string(scratch.path().join(format!("{name}.json"))).expect("report");
        let mut v: Value = serde_json::from_str(&text).expect("json");
        let Some(x) = v.pointer_mut(pointer) else {
            failures.push(format!("{name}: no entry at {pointer}"));
            continue;
        };
        *x = Value::from(x.as_f64().expect("number") + 1e-3);
        let path = scratch.path().join(format!("{name}.perturbed.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&v).expect("json")).expect("write");
        if verify_file(&path) == 0 {
            failures.push(format!("{name}: perturbation at {pointer} accepted"));
        } else {
            rejected += 1;
        }
    }
    outcome(
        failures,
        format!("10 reports byte-stable and verified; {rejected}/10 perturbations rejected"),
    )
}

fn c10_truncation() -> Outcome {
    let mut failures = Vec::new();
    let sizes = [4, 8, 16, 32];
    let thermal = run_study(Family::ThermalDiag { c: 1.0, alpha: 2.0 }, &sizes, 3, TOL).expect("valid sizes");
    let mut worst = 0.0f64;
    for r in &thermal.results {
        match &r.spectrum {
            Ok(d) => {
                for (i, x) in d.iter().enumerate() {
                    let k = (i + 1) as f64;
                    let e = (x - (1.0 + 1.0 / (k * k))).abs();
                    worst = worst.max(e);
                    if e > 1e-12 {
                        failures.push(format!("n={} k={}: {x}", r.n, i + 1));
                    }
                }
                if d.len() != r.n {
                    failures.push(format!("n={}: {} values", r.n, d.len()));
                }
            }
            Err(e) => failures.push(format!("n={}: {e}", r.n)),
        }
    }
    let chain = run_study(
        Family::CoupledChain {
            c: 1.0,
            alpha: 2.0,
            epsilon: 0.0,
        },
        &sizes,
        3,
        TOL,
    )
    .expect("valid sizes");
    for (x, y) in thermal.results.iter().zip(&chain.results) {
        let same = match (&x.spectrum, &y.spectrum) {
            (Ok(a), Ok(b)) => a.len() == b.len() && a.iter().zip(b).all(|(p, q)| p.to_bits() == q.to_bits()),
            _ => false,
        };
        if !same {
            failures.push(format!("n={}: coupled-chain at ε=0 differs", x.n));
        }
    }
    outcome(failures, format!("max closed-form error {worst:.1e}; ε=0 bit-identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("williamson reconstruction", c1_williamson_reconstruction),
        ("oracle equivalence", c2_oracle_agreement),
        ("symplectic uniqueness", c3_uniqueness),
        ("closed-form spot checks", c4_closed_forms),
        ("transpose equivalence", c5_transpose_equivalence),
        ("spectrum symmetry", c6_spectrum_symmetry),
        ("spectral pair", c7_spectral_pair),
        ("skew canonical form", c8_skew_canonical),
        ("cli golden files", c9_golden_files),
        ("truncation study", c10_truncation),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<28} {} ({})",
            i + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
