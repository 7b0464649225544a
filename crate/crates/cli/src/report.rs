//! Decomposition reports: typed payloads, their residuals, and the JSON
//! schema shared by the subcommands and `verify`.
//!
//! Every residual is a function of the payload (plus the recorded
//! tolerance), so a report can be re-checked without trusting the process
//! that wrote it.

use serde_json::Value;
use symspec::normal::{real_normal_form, transpose_equivalence, transpose_equivalence_cyclic};
use symspec::random::random_matrix;
use symspec::skew::{skew_canonical, skew_canonical_cyclic, SkewCanonicalForm};
use symspec::spectral::{reconstruct, spectral_pair, wong_residuals, SpectralAtom, SpectralAtomSet};
use symspec::williamson::{
    symplectic_spectrum, symplectic_spectrum_oracle, williamson, Involution, WilliamsonForm,
};
use symspec::{Complex64, Matrix};

use crate::json::Json;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Williamson,
    SymplecticSpectrum,
    Skew,
    NormalForm,
    SpectralPair,
    TransposeEquiv,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Williamson,
        Kind::SymplecticSpectrum,
        Kind::Skew,
        Kind::NormalForm,
        Kind::SpectralPair,
        Kind::TransposeEquiv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Williamson => "williamson",
            Kind::SymplecticSpectrum => "symplectic-spectrum",
            Kind::Skew => "skew",
            Kind::NormalForm => "normal-form",
            Kind::SpectralPair => "spectral-pair",
            Kind::TransposeEquiv => "transpose-equiv",
        }
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Residual names and their acceptance bounds, in report order.
    pub fn bounds(self) -> &'static [(&'static str, f64)] {
        match self {
            Kind::Williamson => &[
                ("reconstruction_rel", 1e-8),
                ("symplectic_ljlt", 1e-8),
                ("symplectic_ltjl", 1e-8),
                ("inverse_identity", 1e-7),
            ],
            Kind::SymplecticSpectrum => &[("oracle_agreement", 1e-9)],
            Kind::Skew => &[("reconstruction_rel", 1e-9), ("orthogonality", 1e-10)],
            Kind::NormalForm => &[("reconstruction_rel", 1e-9), ("orthogonality", 1e-10)],
            Kind::SpectralPair => &[
                ("reconstruction_rel", 1e-9),
                ("e1_sum", 1e-9),
                ("e2_sum", 1e-9),
                ("wong", 1e-9),
            ],
            Kind::TransposeEquiv => &[
                ("equivalence_rel", 1e-9),
                ("symmetry", 1e-10),
                ("orthogonality", 1e-10),
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Eigen,
    Cyclic,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Eigen => "eigen",
            Method::Cyclic => "cyclic",
        }
    }

    pub fn from_name(s: &str) -> Option<Method> {
        match s {
            "eigen" => Some(Method::Eigen),
            "cyclic" => Some(Method::Cyclic),
            _ => None,
        }
    }
}

/// Settings that influence the computation and are recorded in the report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Options {
    pub tol: f64,
    pub method: Method,
    /// Seeds the starting vector of the cyclic methods.
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Williamson { l: Matrix, d: Vec<f64> },
    SymplecticSpectrum { d: Vec<f64> },
    Skew { v: Matrix, p: Vec<f64>, kernel_dim: usize },
    NormalForm { w: Matrix, real_eigs: Vec<f64>, blocks: Vec<(f64, f64)> },
    SpectralPair { atoms: Vec<SpectralAtom> },
    TransposeEquiv { u: Matrix },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub kind: Kind,
    pub options: Options,
    pub input: Matrix,
    pub outcome: Result<Payload, String>,
}

fn rel(r: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

fn starting_vector(n: usize, seed: u64) -> Vec<f64> {
    random_matrix(n, 1, seed).column(0)
}

/// Runs the decomposition for `kind`; library errors become the rejection
/// reason.
pub fn compute(kind: Kind, a: &Matrix, opts: &Options) -> Result<Payload, symspec::Error> {
    let tol = opts.tol;
    Ok(match kind {
        Kind::Williamson => {
            let f = williamson(a, tol)?;
            Payload::Williamson { l: f.l, d: f.d }
        }
        Kind::SymplecticSpectrum => Payload::SymplecticSpectrum {
            d: symplectic_spectrum(a, tol)?,
        },
        Kind::Skew => {
            let f = match opts.method {
                Method::Eigen => skew_canonical(a, tol)?,
                Method::Cyclic => skew_canonical_cyclic(a, &starting_vector(a.rows(), opts.seed), tol)?,
            };
            Payload::Skew {
                v: f.v,
                p: f.p,
                kernel_dim: f.kernel_dim,
            }
        }
        Kind::NormalForm => {
            let f = real_normal_form(a, tol)?;
            Payload::NormalForm {
                w: f.w,
                real_eigs: f.real_eigs,
                blocks: f.blocks,
            }
        }
        Kind::SpectralPair => Payload::SpectralPair {
            atoms: spectral_pair(a, tol)?.atoms,
        },
        Kind::TransposeEquiv => {
            let u = match opts.method {
                Method::Eigen => transpose_equivalence(a, tol)?,
                Method::Cyclic => {
                    if !a.is_square() {
                        return Err(symspec::Error::NotSquare {
                            rows: a.rows(),
                            cols: a.cols(),
                        });
                    }
                    transpose_equivalence_cyclic(a, &starting_vector(a.rows(), opts.seed), tol)?
                }
            };
            Payload::TransposeEquiv { u }
        }
    })
}

/// Residuals of a payload against its input, named as in [`Kind::bounds`].
/// Shape inconsistencies (possible only in hand-edited reports) are errors.
pub fn residuals(a: &Matrix, payload: &Payload, tol: f64) -> Result<Vec<(&'static str, f64)>, String> {
    let n = a.rows();
    let square = |m: &Matrix, what: &str| -> Result<(), String> {
        if m.shape() != (n, n) || !a.is_square() {
            return Err(format!("{what} has shape {:?}, input {:?}", m.shape(), a.shape()));
        }
        Ok(())
    };
    let a_norm = a.frobenius_norm();
    Ok(match payload {
        Payload::Williamson { l, d } => {
            square(l, "l")?;
            if 2 * d.len() != n {
                return Err(format!("{} symplectic eigenvalues for dimension {n}", d.len()));
            }
            let f = WilliamsonForm {
                l: l.clone(),
                d: d.clone(),
            };
            let j = Involution::new(d.len()).matrix();
            // symplectic l has inverse J⁻¹·lᵀ·J
            let adj = &(&(-&j) * &l.transpose()) * &j;
            let inv = (&(l * &adj) - &Matrix::identity(n)).frobenius_norm();
            vec![
                ("reconstruction_rel", rel((&f.reconstruct() - a).frobenius_norm(), a_norm)),
                ("symplectic_ljlt", f.symplectic_residual_ljlt()),
                ("symplectic_ltjl", f.symplectic_residual_ltjl()),
                ("inverse_identity", rel(inv, l.frobenius_norm())),
            ]
        }
        Payload::SymplecticSpectrum { d } => {
            let oracle = symplectic_spectrum_oracle(a, tol).map_err(|e| e.to_string())?;
            if oracle.len() != d.len() {
                return Err(format!("{} values, oracle has {}", d.len(), oracle.len()));
            }
            let worst = d
                .iter()
                .zip(&oracle)
                .map(|(x, y)| (x - y).abs() / y.abs())
                .fold(0.0, f64::max);
            vec![("oracle_agreement", worst)]
        }
        Payload::Skew { v, p, kernel_dim } => {
            square(v, "v")?;
            if 2 * p.len() + kernel_dim != n {
                return Err(format!("{} pairs and kernel {kernel_dim} for dimension {n}", p.len()));
            }
            let f = SkewCanonicalForm {
                v: v.clone(),
                p: p.clone(),
                kernel_dim: *kernel_dim,
            };
            vec![
                ("reconstruction_rel", rel((&f.reconstruct() - a).frobenius_norm(), a_norm)),
                ("orthogonality", v.orthogonality_defect()),
            ]
        }
        Payload::NormalForm { w, real_eigs, blocks } => {
            square(w, "w")?;
            if real_eigs.len() + 2 * blocks.len() != n {
                return Err(format!("block data does not fill dimension {n}"));
            }
            let d = symspec::random::canonical_block_matrix(real_eigs, blocks);
            let rec = &(w * &d) * &w.transpose();
            vec![
                ("reconstruction_rel", rel((&rec - a).frobenius_norm(), a_norm)),
                ("orthogonality", w.orthogonality_defect()),
            ]
        }
        Payload::SpectralPair { atoms } => {
            for atom in atoms {
                square(&atom.e1, "e1")?;
                square(&atom.e2, "e2")?;
            }
            let set = SpectralAtomSet {
                atoms: atoms.clone(),
                dim: n,
            };
            vec![
                ("reconstruction_rel", rel((&reconstruct(&set) - a).frobenius_norm(), a_norm)),
                ("e1_sum", (&set.e1_total() - &Matrix::identity(n)).frobenius_norm()),
                ("e2_sum", set.e2_total().frobenius_norm()),
                ("wong", wong_residuals(a, &set).max),
            ]
        }
        Payload::TransposeEquiv { u } => {
            square(u, "u")?;
            let ut = u.transpose();
            let lhs = &(u * a) * &ut;
            vec![
                ("equivalence_rel", rel((&lhs - &a.transpose()).frobenius_norm(), a_norm)),
                ("symmetry", (u - &ut).frobenius_norm()),
                ("orthogonality", u.orthogonality_defect()),
            ]
        }
    })
}

impl Report {
    pub fn run(kind: Kind, input: Matrix, options: Options) -> Report {
        let outcome = compute(kind, &input, &options).map_err(|e| e.to_string());
        Report {
            kind,
            options,
            input,
            outcome,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn to_json(&self) -> Json {
        let a = &self.input;
        let mut options = Json::object();
        if matches!(self.kind, Kind::Skew | Kind::TransposeEquiv) {
            options = options
                .with("method", self.options.method.name())
                .with("seed", self.options.seed);
        }
        let (status, reason) = match &self.outcome {
            Ok(_) => ("ok", None),
            Err(msg) => ("rejected", Some(msg.clone())),
        };
        let mut payload = Json::object().with("a", a);
        let mut residual_map = Json::object();
        let mut tolerance_map = Json::object();
        if let Ok(p) = &self.outcome {
            payload = payload_fields(payload, p);
            // a payload fresh from `compute` always has consistent shapes
            let values = residuals(a, p, self.options.tol).expect("consistent payload");
            for ((name, value), (_, bound)) in values.iter().zip(self.kind.bounds()) {
                residual_map = residual_map.with(name, *value);
                tolerance_map = tolerance_map.with(name, *bound);
            }
        }
        Json::object()
            .with("kind", self.kind.name())
            .with("status", status)
            .with("reason", reason)
            .with(
                "input",
                Json::object()
                    .with("rows", a.rows())
                    .with("cols", a.cols())
                    .with("frobenius", a.frobenius_norm()),
            )
            .with("tolerance", self.options.tol)
            .with("options", options)
            .with("payload", payload)
            .with("residuals", residual_map)
            .with("tolerances", tolerance_map)
    }

    pub fn render(&self) -> String {
        self.to_json().render()
    }
}

fn payload_fields(obj: Json, p: &Payload) -> Json {
    match p {
        Payload::Williamson { l, d } => obj.with("d", Json::floats(d)).with("l", l),
        Payload::SymplecticSpectrum { d } => obj.with("d", Json::floats(d)),
        Payload::Skew { v, p, kernel_dim } => obj
            .with("p", Json::floats(p))
            .with("kernel_dim", *kernel_dim)
            .with("v", v),
        Payload::NormalForm { w, real_eigs, blocks } => obj
            .with("real_eigs", Json::floats(real_eigs))
            .with(
                "blocks",
                Json::Array(blocks.iter().map(|&(al, be)| Json::floats(&[al, be])).collect()),
            )
            .with("w", w),
        Payload::SpectralPair { atoms } => obj.with(
            "atoms",
            Json::Array(
                atoms
                    .iter()
                    .map(|x| {
                        Json::object()
                            .with("lambda", Json::floats(&[x.lambda.re, x.lambda.im]))
                            .with("e1", &x.e1)
                            .with("e2", &x.e2)
                    })
                    .collect(),
            ),
        ),
        Payload::TransposeEquiv { u } => obj.with("u", u),
    }
}

// ---- reading reports back ----

pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing field {key:?}"))
}

pub fn read_f64(v: &Value, key: &str) -> Result<f64, String> {
    field(v, key)?
        .as_f64()
        .ok_or_else(|| format!("field {key:?} is not a number"))
}

pub fn read_usize(v: &Value, key: &str) -> Result<usize, String> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| format!("field {key:?} is not a count"))
}

pub fn read_str<'a>(v: &'a Value, key: &str) -> Result<&'a str, String> {
    field(v, key)?
        .as_str()
        .ok_or_else(|| format!("field {key:?} is not a string"))
}

fn as_floats(v: &Value, what: &str) -> Result<Vec<f64>, String> {
    v.as_array()
        .ok_or_else(|| format!("{what} is not an array"))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| format!("{what} has a non-number entry")))
        .collect()
}

pub fn read_floats(v: &Value, key: &str) -> Result<Vec<f64>, String> {
    as_floats(field(v, key)?, key)
}

pub fn read_matrix(v: &Value, key: &str) -> Result<Matrix, String> {
    let m = field(v, key)?;
    let rows = read_usize(m, "rows")?;
    let cols = read_usize(m, "cols")?;
    let data = field(m, "data")?
        .as_array()
        .ok_or_else(|| format!("{key}.data is not an array"))?;
    if data.len() != rows {
        return Err(format!("{key}: {} rows listed, header says {rows}", data.len()));
    }
    let mut flat = Vec::with_capacity(rows * cols);
    for row in data {
        let xs = as_floats(row, key)?;
        if xs.len() != cols {
            return Err(format!("{key}: row of length {}, header says {cols}", xs.len()));
        }
        flat.extend(xs);
    }
    Matrix::new(rows, cols, flat).map_err(|e| format!("{key}: {e}"))
}

pub fn read_payload(kind: Kind, p: &Value) -> Result<Payload, String> {
    Ok(match kind {
        Kind::Williamson => Payload::Williamson {
            l: read_matrix(p, "l")?,
            d: read_floats(p, "d")?,
        },
        Kind::SymplecticSpectrum => Payload::SymplecticSpectrum {
            d: read_floats(p, "d")?,
        },
        Kind::Skew => Payload::Skew {
            v: read_matrix(p, "v")?,
            p: read_floats(p, "p")?,
            kernel_dim: read_usize(p, "kernel_dim")?,
        },
        Kind::NormalForm => {
            let blocks = field(p, "blocks")?
                .as_array()
                .ok_or("blocks is not an array")?
                .iter()
                .map(|b| match as_floats(b, "block")?.as_slice() {
                    [al, be] => Ok((*al, *be)),
                    _ => Err("block must be [alpha, beta]".to_string()),
                })
                .collect::<Result<Vec<_>, String>>()?;
            Payload::NormalForm {
                w: read_matrix(p, "w")?,
                real_eigs: read_floats(p, "real_eigs")?,
                blocks,
            }
        }
        Kind::SpectralPair => {
            let atoms = field(p, "atoms")?
                .as_array()
                .ok_or("atoms is not an array")?
                .iter()
                .map(|x| {
                    let lambda = match read_floats(x, "lambda")?.as_slice() {
                        [re, im] => Complex64::new(*re, *im),
                        _ => return Err("lambda must be [re, im]".to_string()),
                    };
                    Ok(SpectralAtom {
                        lambda,
                        e1: read_matrix(x, "e1")?,
                        e2: read_matrix(x, "e2")?,
                    })
                })
                .collect::<Result<Vec<_>, String>>()?;
            Payload::SpectralPair { atoms }
        }
        Kind::TransposeEquiv => Payload::TransposeEquiv {
            u: read_matrix(p, "u")?,
        },
    })
}
