//! Independent re-check of a decomposition report.

use serde_json::Value;

use crate::report::{
    compute, field, read_f64, read_matrix, read_payload, read_str, read_usize, residuals, Kind,
    Method, Options,
};
use crate::CliError;

/// Stored and recomputed values must agree to this absolute tolerance.
pub const MATCH_ABS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub stored: Option<f64>,
    pub recomputed: Option<f64>,
    pub bound: Option<f64>,
    pub passed: bool,
    pub note: Option<String>,
}

impl Check {
    fn fail(name: &str, note: impl Into<String>) -> Check {
        Check {
            name: name.to_string(),
            stored: None,
            recomputed: None,
            bound: None,
            passed: false,
            note: Some(note.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub kind: Kind,
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3e}"));
            out.push_str(&format!(
                "{:<6} {:<20} stored={} recomputed={} bound={}{}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                fmt(c.stored),
                fmt(c.recomputed),
                fmt(c.bound),
                c.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default(),
            ));
        }
        out.push_str(if self.passed() { "verified\n" } else { "verification failed\n" });
        out
    }
}

fn malformed(msg: impl Into<String>) -> CliError {
    CliError::Report(msg.into())
}

fn read_options(kind: Kind, report: &Value, tol: f64) -> Result<Options, CliError> {
    let opts = field(report, "options").map_err(malformed)?;
    let mut out = Options {
        tol,
        method: Method::Eigen,
        seed: 0,
    };
    if matches!(kind, Kind::Skew | Kind::TransposeEquiv) {
        let m = read_str(opts, "method").map_err(malformed)?;
        out.method = Method::from_name(m).ok_or_else(|| malformed(format!("unknown method {m:?}")))?;
        out.seed = field(opts, "seed")
            .map_err(malformed)?
            .as_u64()
            .ok_or_else(|| malformed("seed is not an integer"))?;
    }
    Ok(out)
}

/// Parses a report and re-derives everything it claims. Structural problems
/// (bad JSON, missing fields) are errors; numerical disagreements are
/// failed checks.
pub fn verify_str(text: &str) -> Result<Verification, CliError> {
    let report: Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let kind_name = read_str(&report, "kind").map_err(malformed)?;
    let kind = Kind::from_name(kind_name).ok_or_else(|| malformed(format!("unknown kind {kind_name:?}")))?;
    let status = read_str(&report, "status").map_err(malformed)?;
    let tol = read_f64(&report, "tolerance").map_err(malformed)?;
    let options = read_options(kind, &report, tol)?;
    let payload = field(&report, "payload").map_err(malformed)?;
    let a = read_matrix(payload, "a").map_err(malformed)?;
    let digest = field(&report, "input").map_err(malformed)?;

    let mut checks = Vec::new();

    let shape_ok = read_usize(digest, "rows").map_err(malformed)? == a.rows()
        && read_usize(digest, "cols").map_err(malformed)? == a.cols();
    if !shape_ok {
        checks.push(Check::fail("input_shape", "digest shape differs from payload"));
    }
    let stored_norm = read_f64(digest, "frobenius").map_err(malformed)?;
    let norm = a.frobenius_norm();
    checks.push(Check {
        name: "input_frobenius".into(),
        stored: Some(stored_norm),
        recomputed: Some(norm),
        bound: None,
        passed: (stored_norm - norm).abs() <= MATCH_ABS,
        note: None,
    });

    match status {
        "rejected" => {
            // a rejection is verified by reproducing it
            let reason = read_str(&report, "reason").map_err(malformed)?;
            let check = match compute(kind, &a, &options) {
                Ok(_) => Check::fail("rejection", "input is accepted on recomputation"),
                Err(e) if e.to_string() == reason => Check {
                    name: "rejection".into(),
                    stored: None,
                    recomputed: None,
                    bound: None,
                    passed: true,
                    note: None,
                },
                Err(e) => Check::fail("rejection", format!("recomputed reason: {e}")),
            };
            checks.push(check);
        }
        "ok" => {
            let stored = field(&report, "residuals")
                .map_err(malformed)?
                .as_object()
                .ok_or_else(|| malformed("residuals is not an object"))?;
            let bounds = field(&report, "tolerances")
                .map_err(malformed)?
                .as_object()
                .ok_or_else(|| malformed("tolerances is not an object"))?;
            let payload = match read_payload(kind, payload) {
                Ok(p) => p,
                Err(msg) => return Err(malformed(msg)),
            };
            let names: Vec<&str> = kind.bounds().iter().map(|b| b.0).collect();
            for key in stored.keys().chain(bounds.keys()) {
                if !names.contains(&key.as_str()) {
                    checks.push(Check::fail(key, "unexpected residual"));
                }
            }
            match residuals(&a, &payload, tol) {
                Err(msg) => checks.push(Check::fail("payload", msg)),
                Ok(values) => {
                    for ((name, value), (_, default_bound)) in values.into_iter().zip(kind.bounds()) {
                        let s = stored.get(name).and_then(Value::as_f64);
                        let b = bounds.get(name).and_then(Value::as_f64);
                        let mut note = None;
                        let mut passed = value <= *default_bound;
                        match (s, b) {
                            (Some(s), Some(b)) => {
                                if (s - value).abs() > MATCH_ABS {
                                    passed = false;
                                    note = Some("stored value does not match".to_string());
                                } else if b != *default_bound {
                                    passed = false;
                                    note = Some(format!("stored bound differs from {default_bound:e}"));
                                } else if !passed {
                                    note = Some("above bound".to_string());
                                }
                            }
                            _ => {
                                passed = false;
                                note = Some("missing stored value or bound".to_string());
                            }
                        }
                        checks.push(Check {
                            name: name.to_string(),
                            stored: s,
                            recomputed: Some(value),
                            bound: b,
                            passed,
                            note,
                        });
                    }
                }
            }
        }
        other => return Err(malformed(format!("unknown status {other:?}"))),
    }
    Ok(Verification { kind, checks })
}
