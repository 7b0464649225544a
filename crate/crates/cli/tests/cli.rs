use std::path::{Path, PathBuf};

use proptest::prelude::*;
use serde_json::Value;
use symspec::Matrix;
use symspec_cli::matfile::{parse_matrix, serialize};
use symspec_cli::run;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn symspec(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["symspec"];
    full.extend(args);
    let code = run(full, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn report(args: &[&str]) -> (i32, Value) {
    let r = symspec(args);
    (r.code, serde_json::from_str(&r.stdout).unwrap())
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn williamson_on_identity() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "i4.txt", "4 4\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n");
    let (code, r) = report(&["williamson", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "ok");
    assert_eq!(floats(&r["payload"]["d"]), vec![1.0, 1.0]);
    for (_, v) in r["residuals"].as_object().unwrap() {
        assert!(v.as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn williamson_on_diag_4_1() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.txt", "2 2\n4 0\n0 1\n");
    let (code, r) = report(&["williamson", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let d = floats(&r["payload"]["d"]);
    assert!((d[0] - 2.0).abs() < 1e-14);
}

#[test]
fn odd_dimension_is_rejected_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "o.txt", "1 1\n3\n");
    let (code, r) = report(&["williamson", f.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "rejected");
    assert!(r["reason"].as_str().unwrap().contains("odd dimension"));
    assert_eq!(r["residuals"], serde_json::json!({}));
}

#[test]
fn indefinite_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "n.txt", "2 2\n1 0\n0 -1\n");
    assert_eq!(symspec(&["williamson", f.to_str().unwrap()]).code, 2);
    assert_eq!(symspec(&["symplectic-spectrum", f.to_str().unwrap()]).code, 2);
}

#[test]
fn skew_on_3j2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.txt", "2 2\n0 -3\n3 0\n");
    for method in ["eigen", "cyclic"] {
        let (code, r) = report(&["skew", f.to_str().unwrap(), "--method", method]);
        assert_eq!(code, 0);
        let p = floats(&r["payload"]["p"]);
        assert!(p.len() == 1 && (p[0] - 3.0).abs() <= 1e-14, "{method}: {p:?}");
        assert_eq!(r["payload"]["kernel_dim"], 0);
    }
}

#[test]
fn transpose_equiv_on_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let (s, c) = (std::f64::consts::PI / 3.0).sin_cos();
    let f = write(dir.path(), "r.txt", &serialize(&Matrix::from_rows(&[[c, -s], [s, c]]).unwrap()));
    for method in ["eigen", "cyclic"] {
        let (code, r) = report(&["transpose-equiv", f.to_str().unwrap(), "--method", method]);
        assert_eq!(code, 0);
        for (_, v) in r["residuals"].as_object().unwrap() {
            assert!(v.as_f64().unwrap() <= 1e-10);
        }
    }
}

#[test]
fn spectral_pair_on_diag7() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "7.txt", "1 1\n7\n");
    let (code, r) = report(&["spectral-pair", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let atoms = r["payload"]["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 1);
    assert_eq!(floats(&atoms[0]["lambda"]), vec![7.0, 0.0]);
    assert_eq!(r["residuals"]["reconstruction_rel"].as_f64().unwrap(), 0.0);
}

#[test]
fn normal_form_rejects_non_normal_input() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "j.txt", "2 2\n1 1\n0 1\n");
    let (code, r) = report(&["normal-form", f.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(r["reason"].as_str().unwrap().contains("normal"));
}

#[test]
fn io_and_parse_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.txt");
    let r = symspec(&["skew", missing.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("nope.txt"));
    let bad = write(dir.path(), "bad.txt", "2 2\n1 2\n3\n");
    assert_eq!(symspec(&["skew", bad.to_str().unwrap()]).code, 1);
    assert_eq!(symspec(&["no-such-command"]).code, 1);
}

#[test]
fn verify_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.txt", &symspec(&["generate", "spd", "--n", "4", "--seed", "5"]).stdout);
    let out = dir.path().join("r.json");
    let r = symspec(&["williamson", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    assert_eq!(symspec(&["verify", out.to_str().unwrap()]).code, 0);

    let genuine: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let tamper = |f: &dyn Fn(&mut Value)| {
        let mut v = genuine.clone();
        f(&mut v);
        let p = write(dir.path(), "t.json", &serde_json::to_string(&v).unwrap());
        symspec(&["verify", p.to_str().unwrap()]).code
    };
    // residual value edited
    assert_eq!(tamper(&|v| v["residuals"]["symplectic_ljlt"] = 1e-9.into()), 3);
    // bound loosened
    assert_eq!(tamper(&|v| v["tolerances"]["reconstruction_rel"] = 1.0.into()), 3);
    // factor entry moved
    assert_eq!(
        tamper(&|v| {
            let x = v["payload"]["l"]["data"][0][0].as_f64().unwrap();
            v["payload"]["l"]["data"][0][0] = (x + 1e-3).into();
        }),
        3
    );
    // structure broken
    assert_eq!(tamper(&|v| v["payload"]["d"] = Value::Null), 1);
    assert_eq!(tamper(&|v| v["kind"] = "mystery".into()), 1);
    let garbage = write(dir.path(), "g.json", "{ not json");
    assert_eq!(symspec(&["verify", garbage.to_str().unwrap()]).code, 1);
}

#[test]
fn every_subcommand_report_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |what: &str, n: &str, name: &str| {
        write(dir.path(), name, &symspec(&["generate", what, "--n", n, "--seed", "9"]).stdout)
    };
    let spd = gen("spd", "6", "spd.txt");
    let skew = gen("skew", "6", "skew.txt");
    let normal = gen("normal", "7", "normal.txt");
    let cases: Vec<Vec<&str>> = vec![
        vec!["williamson", spd.to_str().unwrap()],
        vec!["symplectic-spectrum", spd.to_str().unwrap()],
        vec!["skew", skew.to_str().unwrap()],
        vec!["skew", skew.to_str().unwrap(), "--method", "cyclic", "--seed", "2"],
        vec!["normal-form", normal.to_str().unwrap()],
        vec!["spectral-pair", normal.to_str().unwrap()],
        vec!["transpose-equiv", normal.to_str().unwrap()],
        vec!["transpose-equiv", normal.to_str().unwrap(), "--method", "cyclic"],
    ];
    for args in cases {
        let r = symspec(&args);
        assert_eq!(r.code, 0, "{args:?}");
        let p = write(dir.path(), "r.json", &r.stdout);
        let v = symspec(&["verify", p.to_str().unwrap()]);
        assert_eq!(v.code, 0, "{args:?}\n{}", v.stdout);
    }
}

#[test]
fn truncation_study_outputs() {
    let r = symspec(&["truncation-study", "--family", "thermal-diag", "--sizes", "2,4", "--top-m", "2"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["results"][1]["n"], 4);
    let d = floats(&v["results"][1]["spectrum"]);
    let expect = [2.0, 1.25, 1.0 + 1.0 / 9.0, 1.0625];
    for (x, y) in d.iter().zip(expect) {
        assert!((x - y).abs() <= 1e-12);
    }
    // top value 1 + c never drifts
    assert_eq!(floats(&v["deltas"][0]["top"])[0], 0.0);

    let csv = symspec(&["truncation-study", "--family", "coupled-chain", "--epsilon", "0.05", "--format", "csv"]);
    assert_eq!(csv.code, 0);
    assert!(csv.stdout.starts_with("n,index,value\n"));
    assert_eq!(csv.stdout.lines().count(), 1 + 4 + 8 + 16 + 32);

    let bad = symspec(&["truncation-study", "--family", "thermal-diag", "--sizes", "8,4"]);
    assert_eq!(bad.code, 1);
    let csv_elsewhere = symspec(&["williamson", "x.txt", "--format", "csv"]);
    assert_eq!(csv_elsewhere.code, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_files_round_trip(
        rows in 1usize..6,
        cols in 1usize..6,
        bits in prop::collection::vec(any::<f64>(), 36),
    ) {
        let data: Vec<f64> = bits
            .into_iter()
            .map(|x| if x.is_finite() { x } else { 0.5 })
            .take(rows * cols)
            .collect();
        let m = Matrix::new(rows, cols, data).unwrap();
        let once = parse_matrix(&serialize(&m)).unwrap();
        let twice = parse_matrix(&serialize(&once)).unwrap();
        for ((a, b), c) in m.as_slice().iter().zip(once.as_slice()).zip(twice.as_slice()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
            prop_assert_eq!(b.to_bits(), c.to_bits());
        }
    }

    #[test]
    fn comments_never_change_the_value(seed in any::<u64>(), every in 1usize..4) {
        let m = symspec::random::random_matrix(3, 2, seed);
        let plain = serialize(&m);
        let mut noisy = String::from("# header comment\n");
        for (i, line) in plain.lines().enumerate() {
            noisy.push_str(line);
            noisy.push('\n');
            if i % every == 0 {
                noisy.push_str("   # interleaved\n\n");
            }
        }
        prop_assert_eq!(parse_matrix(&noisy).unwrap(), parse_matrix(&plain).unwrap());
    }
}
