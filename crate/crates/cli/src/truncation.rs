//! Finite sections of infinite-mode positive operators.
//!
//! Two families of `2n × 2n` matrices in `(q₁…qₙ, p₁…pₙ)` layout:
//!
//! * `thermal-diag`: `diag(D, D)`, `D = diag(1 + c·k^{−α})`, `k = 1…n`. It is
//!   already in Williamson form, so its symplectic spectrum is `D` itself.
//! * `coupled-chain`: thermal-diag plus `ε·diag(T, T)` with the Toeplitz
//!   coupling `T[i][j] = 1/(1 + (i − j)²)`. No closed form.
//!
//! The study records the spectrum at each size and the change of the top
//! values between consecutive sizes. It makes no claim about a limit.

use std::fmt::Write as _;

use symspec::williamson::symplectic_spectrum;
use symspec::Matrix;

use crate::json::Json;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    ThermalDiag { c: f64, alpha: f64 },
    CoupledChain { c: f64, alpha: f64, epsilon: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::ThermalDiag { .. } => "thermal-diag",
            Family::CoupledChain { .. } => "coupled-chain",
        }
    }

    fn parameters(&self) -> Json {
        match *self {
            Family::ThermalDiag { c, alpha } => Json::object().with("c", c).with("alpha", alpha),
            Family::CoupledChain { c, alpha, epsilon } => Json::object()
                .with("c", c)
                .with("alpha", alpha)
                .with("epsilon", epsilon),
        }
    }

    /// The `2n × 2n` section.
    pub fn section(&self, n: usize) -> Matrix {
        match *self {
            Family::ThermalDiag { c, alpha } => thermal_diag(n, c, alpha),
            Family::CoupledChain { c, alpha, epsilon } => {
                let mut a = thermal_diag(n, c, alpha);
                for i in 0..n {
                    for j in 0..n {
                        let d = i as f64 - j as f64;
                        let t = epsilon * (1.0 / (1.0 + d * d));
                        a[(i, j)] += t;
                        a[(n + i, n + j)] += t;
                    }
                }
                a
            }
        }
    }
}

fn thermal_diag(n: usize, c: f64, alpha: f64) -> Matrix {
    let mut a = Matrix::zeros(2 * n, 2 * n);
    for k in 1..=n {
        let v = 1.0 + c * (k as f64).powf(-alpha);
        a[(k - 1, k - 1)] = v;
        a[(n + k - 1, n + k - 1)] = v;
    }
    a
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeResult {
    pub n: usize,
    /// Descending symplectic spectrum, or the rejection reason.
    pub spectrum: Result<Vec<f64>, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Delta {
    pub from: usize,
    pub to: usize,
    /// `d_i(to) − d_i(from)` for the leading `min(top_m, from)` values.
    pub top: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncationStudy {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub top_m: usize,
    pub tol: f64,
    pub results: Vec<SizeResult>,
    pub deltas: Vec<Delta>,
}

/// Runs the study; `sizes` must be strictly increasing and positive.
pub fn run_study(family: Family, sizes: &[usize], top_m: usize, tol: f64) -> Result<TruncationStudy, String> {
    if sizes.is_empty() {
        return Err("no sizes given".into());
    }
    if sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err("sizes must be positive and strictly increasing".into());
    }
    let results: Vec<SizeResult> = sizes
        .iter()
        .map(|&n| SizeResult {
            n,
            spectrum: symplectic_spectrum(&family.section(n), tol).map_err(|e| e.to_string()),
        })
        .collect();
    let deltas = results
        .windows(2)
        .filter_map(|w| match (&w[0].spectrum, &w[1].spectrum) {
            (Ok(x), Ok(y)) => Some(Delta {
                from: w[0].n,
                to: w[1].n,
                top: x.iter().zip(y).take(top_m).map(|(a, b)| b - a).collect(),
            }),
            _ => None,
        })
        .collect();
    Ok(TruncationStudy {
        family,
        sizes: sizes.to_vec(),
        top_m,
        tol,
        results,
        deltas,
    })
}

impl TruncationStudy {
    pub fn to_json(&self) -> Json {
        let results = self
            .results
            .iter()
            .map(|r| {
                let base = Json::object().with("n", r.n);
                match &r.spectrum {
                    Ok(d) => base
                        .with("status", "ok")
                        .with("reason", Json::Null)
                        .with("spectrum", Json::floats(d)),
                    Err(msg) => base
                        .with("status", "rejected")
                        .with("reason", msg.as_str())
                        .with("spectrum", Json::Array(Vec::new())),
                }
            })
            .collect();
        let deltas = self
            .deltas
            .iter()
            .map(|d| {
                Json::object()
                    .with("from", d.from)
                    .with("to", d.to)
                    .with("top", Json::floats(&d.top))
            })
            .collect();
        Json::object()
            .with("kind", "truncation-study")
            .with("family", self.family.name())
            .with("parameters", self.family.parameters())
            .with(
                "sizes",
                Json::Array(self.sizes.iter().map(|&n| Json::from(n)).collect()),
            )
            .with("top_m", self.top_m)
            .with("tolerance", self.tol)
            .with("results", Json::Array(results))
            .with("deltas", Json::Array(deltas))
    }

    /// `n,index,value` with 1-based `index`; rejected sizes contribute no rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,index,value\n");
        for r in &self.results {
            if let Ok(d) = &r.spectrum {
                for (i, v) in d.iter().enumerate() {
                    writeln!(out, "{},{},{:.16e}", r.n, i + 1, v).expect("string write");
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_diag_n4() {
        let s = run_study(Family::ThermalDiag { c: 1.0, alpha: 2.0 }, &[4], 2, 1e-10).unwrap();
        let d = s.results[0].spectrum.clone().unwrap();
        let expect = [2.0, 1.25, 1.0 + 1.0 / 9.0, 1.0625];
        for (x, y) in d.iter().zip(expect) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn sizes_must_increase() {
        let f = Family::ThermalDiag { c: 1.0, alpha: 2.0 };
        assert!(run_study(f, &[4, 4], 1, 1e-10).is_err());
        assert!(run_study(f, &[8, 4], 1, 1e-10).is_err());
        assert!(run_study(f, &[], 1, 1e-10).is_err());
    }

    #[test]
    fn negative_coupling_is_rejected_per_size() {
        // ε = −3 makes every diagonal entry negative
        let f = Family::CoupledChain {
            c: 1.0,
            alpha: 2.0,
            epsilon: -3.0,
        };
        let s = run_study(f, &[1, 2, 4], 1, 1e-10).unwrap();
        assert!(s.results.iter().all(|r| r.spectrum.is_err()));
        assert!(s.deltas.is_empty());
    }

    #[test]
    fn csv_has_header_and_one_row_per_value() {
        let s = run_study(Family::ThermalDiag { c: 1.0, alpha: 2.0 }, &[1, 2], 1, 1e-10).unwrap();
        let csv = s.to_csv();
        assert_eq!(csv.lines().count(), 1 + 1 + 2);
        assert!(csv.starts_with("n,index,value\n1,1,"));
    }
}
