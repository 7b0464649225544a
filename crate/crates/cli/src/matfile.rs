//! Plain-text matrix files.
//!
//! ```text
//! # comment lines start with '#'; blank lines are ignored
//! 2 2
//! 1 0
//! 0 1
//! ```
//!
//! The header is `ROWS COLS`; then exactly `ROWS` lines of `COLS` finite
//! floats. [`serialize`] prints the shortest representation that parses
//! back to the same bits.

use std::fmt::Write as _;
use std::path::Path;

use symspec::Matrix;

use crate::CliError;

pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_matrix(&text).map_err(|msg| CliError::Parse {
        path: path.display().to_string(),
        msg,
    })
}

pub fn parse_matrix(text: &str) -> Result<Matrix, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hl, header) = lines.next().ok_or("missing header line")?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(format!("line {hl}: header must be \"ROWS COLS\""));
    }
    let parse_dim = |s: &str| -> Result<usize, String> {
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("line {hl}: invalid dimension {s:?}")),
            Ok(d) => Ok(d),
        }
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;

    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| format!("expected {rows} rows, found {r}"))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != cols {
            return Err(format!("line {ln}: expected {cols} values, found {}", tokens.len()));
        }
        for t in tokens {
            let x: f64 = t
                .parse()
                .map_err(|_| format!("line {ln}: invalid number {t:?}"))?;
            if !x.is_finite() {
                return Err(format!("line {ln}: non-finite value {t:?}"));
            }
            data.push(x);
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(format!("line {ln}: extra tokens after {rows} rows"));
    }
    Matrix::new(rows, cols, data).map_err(|e| e.to_string())
}

pub fn serialize(m: &Matrix) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", m.rows(), m.cols()).expect("string write");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", row.join(" ")).expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_identity() {
        assert_eq!(parse_matrix("2 2\n1 0\n0 1\n").unwrap(), Matrix::identity(2));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let plain = parse_matrix("2 2\n1 2\n3 4\n").unwrap();
        let noisy = parse_matrix("# a\n\n2 2\n  # b\n1 2\n\n3 4\n# end\n").unwrap();
        assert_eq!(plain, noisy);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "2\n1 2\n",
            "0 2\n",
            "2 x\n",
            "2 2\n1 2\n3\n",
            "2 2\n1 2\n3 4 5\n",
            "2 2\n1 2\n",
            "1 1\n1\n2\n",
            "1 1\nnan\n",
            "1 1\ninf\n",
            "1 1\n1e400\n",
            "1 1\nabc\n",
        ] {
            assert!(parse_matrix(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn serialization_is_bit_exact() {
        let m = Matrix::new(2, 2, vec![0.1, -1.0 / 3.0, 1e-300, 12345.678901234567]).unwrap();
        let back = parse_matrix(&serialize(&m)).unwrap();
        for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
