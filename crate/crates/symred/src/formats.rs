//! Text formats for scalars, matrices, irreps and spectra.
//!
//! Scalars: integers `3`, fractions `-3/4`, decimals `0.25` or `1e-3` (all read
//! exactly), and complex literals `a+bi`, `2i`, `-i` (read as floats).
//!
//! Matrices: a dense row-major literal `[[1, 2], [3, 4]]`, or a sparse triplet
//! list headed by its shape:
//!
//! ```text
//! sparse 3 3
//! (0, 0, 4)
//! (0, 1, -1)
//! ```
//!
//! Triplet indices are 0-based.

use std::fs;
use std::io;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use symred_core::catalog::NumberMatrix;
use symred_core::chartable::IrrepData;
use symred_core::matrix::{CsrMatrix, DenseMatrix, Matrix};
use symred_core::reduction::SpectrumEntry;
use symred_core::scalar::{Complex64, Number, Rational, Scalar};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("invalid number {0:?}")]
    Number(String),
    #[error("invalid matrix literal: {0}")]
    Matrix(String),
    #[error("value {value} has no exact rational form; use the float backend")]
    NotExact { value: String },
    #[error("invalid irrep file: {0}")]
    Irreps(String),
    #[error("invalid spectrum file: {0}")]
    Spectrum(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parses one scalar literal.
pub fn parse_number(text: &str) -> Result<Number, FormatError> {
    let s = text.trim();
    let bad = || FormatError::Number(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some(body) = s.strip_suffix('i') {
        let split = body
            .char_indices()
            .rev()
            .find(|&(i, c)| (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
            .map(|(i, _)| i);
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let re = parse_float(re).ok_or_else(bad)?;
        let im = parse_float(im).ok_or_else(bad)?;
        return Ok(Number::Approx(Complex64::new(re, im)));
    }
    parse_real(s).map(Number::Exact).ok_or_else(bad)
}

/// Float part of a complex literal. Decimals use the correctly rounded std
/// parser; fractions go through the exact path.
fn parse_float(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.contains('/') {
        return parse_real(s).map(|q| q.to_complex().re);
    }
    let ok = !s.is_empty() && s.trim_start_matches(['+', '-']).starts_with(|c: char| c.is_ascii_digit() || c == '.');
    ok.then(|| s.parse::<f64>().ok()).flatten()
}

/// Exact value of an integer, fraction or decimal literal.
fn parse_real(s: &str) -> Option<Rational> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10u8);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    let mut q = if shift >= 0 { Rational::from_integer(digits * scale) } else { Rational::new(digits, scale) };
    if neg {
        q = -q;
    }
    Some(q)
}

/// Formats a scalar so that [`parse_number`] reads it back unchanged.
pub fn format_number(n: &Number) -> String {
    n.to_string()
}

/// A parsed matrix before conversion into a backend.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixLiteral {
    Dense(NumberMatrix),
    Sparse { rows: usize, cols: usize, entries: Vec<(usize, usize, Number)> },
}

impl MatrixLiteral {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let t = text.trim_start();
        if let Some(rest) = t.strip_prefix("sparse") {
            parse_sparse(rest)
        } else {
            parse_dense(t).map(MatrixLiteral::Dense)
        }
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixLiteral::Dense(rows) => (rows.len(), rows.first().map_or(0, Vec::len)),
            MatrixLiteral::Sparse { rows, cols, .. } => (*rows, *cols),
        }
    }

    /// Converts into backend `T`; sparse literals stay sparse.
    pub fn to_matrix<T: Scalar>(&self) -> Result<Matrix<T>, FormatError> {
        let conv = |n: &Number| T::from_number(n).ok_or_else(|| FormatError::NotExact { value: n.to_string() });
        Ok(match self {
            MatrixLiteral::Dense(rows) => {
                let rows = rows.iter().map(|r| r.iter().map(conv).collect()).collect::<Result<Vec<Vec<T>>, _>>()?;
                Matrix::Dense(DenseMatrix::from_rows(rows))
            }
            MatrixLiteral::Sparse { rows, cols, entries } => {
                let triplets = entries.iter().map(|(i, j, v)| Ok((*i, *j, conv(v)?))).collect::<Result<Vec<_>, FormatError>>()?;
                Matrix::Sparse(CsrMatrix::from_triplets(*rows, *cols, triplets))
            }
        })
    }

    pub fn to_number_matrix(&self) -> NumberMatrix {
        match self {
            MatrixLiteral::Dense(rows) => rows.clone(),
            MatrixLiteral::Sparse { rows, cols, entries } => {
                let mut out = vec![vec![Number::integer(0); *cols]; *rows];
                for (i, j, v) in entries {
                    out[*i][*j] = out[*i][*j].add(v);
                }
                out
            }
        }
    }
}

fn parse_dense(text: &str) -> Result<NumberMatrix, FormatError> {
    let err = |m: &str| FormatError::Matrix(m.to_string());
    let t = text.trim();
    let inner = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(|| err("expected [[...], ...]"))?;
    let mut rows = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('[').ok_or_else(|| err("expected '[' at start of row"))?;
        let end = body.find(']').ok_or_else(|| err("unterminated row"))?;
        let row = body[..end]
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(parse_number)
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
        rest = body[end + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    if rows.is_empty() {
        return Err(err("empty matrix"));
    }
    if rows.iter().any(|r| r.len() != rows[0].len() || r.is_empty()) {
        return Err(err("rows have different lengths"));
    }
    Ok(rows)
}

fn parse_sparse(text: &str) -> Result<MatrixLiteral, FormatError> {
    let err = |m: String| FormatError::Matrix(m);
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| err("missing shape after 'sparse'".into()))?;
    let dims: Vec<usize> = header.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| err(format!("bad shape {header:?}")))?;
    let [rows, cols] = dims[..] else {
        return Err(err(format!("bad shape {header:?}")));
    };
    let mut entries = Vec::new();
    for line in lines {
        let body = line.strip_prefix('(').and_then(|l| l.strip_suffix(')')).ok_or_else(|| err(format!("bad triplet {line:?}")))?;
        let parts: Vec<&str> = body.splitn(3, ',').collect();
        let [i, j, v] = parts[..] else {
            return Err(err(format!("bad triplet {line:?}")));
        };
        let i: usize = i.trim().parse().map_err(|_| err(format!("bad row in {line:?}")))?;
        let j: usize = j.trim().parse().map_err(|_| err(format!("bad column in {line:?}")))?;
        if i >= rows || j >= cols {
            return Err(err(format!("triplet {line:?} outside {rows}x{cols}")));
        }
        entries.push((i, j, parse_number(v)?));
    }
    Ok(MatrixLiteral::Sparse { rows, cols, entries })
}

/// Dense literal, one row per line.
pub fn format_dense<T: Scalar>(m: &DenseMatrix<T>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = m.row(i).iter().map(|v| v.to_number().to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(",\n "))
}

/// Sparse triplet literal.
pub fn format_sparse<T: Scalar>(m: &CsrMatrix<T>) -> String {
    let mut out = format!("sparse {} {}\n", m.rows(), m.cols());
    for (i, j, v) in m.iter() {
        out.push_str(&format!("({i}, {j}, {})\n", v.to_number()));
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrrepFile {
    irrep: Vec<IrrepEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrrepEntry {
    label: String,
    /// One matrix literal per group generator.
    images: Vec<String>,
}

/// Reads a TOML irrep file:
///
/// ```toml
/// [[irrep]]
/// label = "E"
/// images = ["[[0, -1], [1, 0]]", "[[1, 0], [0, -1]]"]
/// ```
pub fn parse_irreps(text: &str) -> Result<Vec<IrrepData>, FormatError> {
    let file: IrrepFile = toml::from_str(text).map_err(|e| FormatError::Irreps(e.to_string()))?;
    file.irrep
        .into_iter()
        .map(|e| {
            let images = e.images.iter().map(|m| MatrixLiteral::parse(m).map(|l| l.to_number_matrix())).collect::<Result<_, _>>()?;
            Ok(IrrepData { label: e.label, images })
        })
        .collect()
}

pub fn format_irreps(data: &[IrrepData]) -> String {
    let file = IrrepFile {
        irrep: data
            .iter()
            .map(|d| IrrepEntry {
                label: d.label.clone(),
                images: d
                    .images
                    .iter()
                    .map(|m| {
                        let rows: Vec<String> =
                            m.iter().map(|r| format!("[{}]", r.iter().map(Number::to_string).collect::<Vec<_>>().join(", "))).collect();
                        format!("[{}]", rows.join(", "))
                    })
                    .collect(),
            })
            .collect(),
    };
    toml::to_string(&file).expect("irrep file serializes")
}

#[derive(Serialize, Deserialize)]
struct SpectrumRow {
    real: f64,
    imag: f64,
    block: String,
    copy: usize,
}

/// Columnar spectrum: `real,imag,block,copy` with a header row. Floats use the
/// shortest representation that reads back to the same value.
pub fn write_spectrum<W: io::Write>(out: W, spectrum: &[SpectrumEntry]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    for e in spectrum {
        w.serialize(SpectrumRow { real: e.value.re, imag: e.value.im, block: e.label.clone(), copy: e.copy })
            .map_err(|e| FormatError::Spectrum(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum<R: io::Read>(input: R) -> Result<Vec<SpectrumEntry>, FormatError> {
    csv::Reader::from_reader(input)
        .deserialize::<SpectrumRow>()
        .map(|row| {
            let row = row.map_err(|e| FormatError::Spectrum(e.to_string()))?;
            Ok(SpectrumEntry { value: Complex64::new(row.real, row.imag), label: row.block, copy: row.copy })
        })
        .collect()
}

/// `true` when `q` is an integer; used by reports to keep exact output compact.
pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(n: i64, d: i64) -> Number {
        Number::Exact(Rational::from_ratio(n, d))
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_number("3").unwrap(), exact(3, 1));
        assert_eq!(parse_number(" -3/4 ").unwrap(), exact(-3, 4));
        assert_eq!(parse_number("0.25").unwrap(), exact(1, 4));
        assert_eq!(parse_number("-1.5e2").unwrap(), exact(-150, 1));
        assert_eq!(parse_number("1e-3").unwrap(), exact(1, 1000));
        assert_eq!(parse_number(".5").unwrap(), exact(1, 2));
        assert_eq!(parse_number("1+2i").unwrap(), Number::Approx(Complex64::new(1.0, 2.0)));
        assert_eq!(parse_number("1.5e-3-2i").unwrap(), Number::Approx(Complex64::new(1.5e-3, -2.0)));
        assert_eq!(parse_number("-i").unwrap(), Number::Approx(Complex64::new(0.0, -1.0)));
        assert_eq!(parse_number("2i").unwrap(), Number::Approx(Complex64::new(0.0, 2.0)));
        for bad in ["", "abc", "1/0", "1..2", "i1", "--1", "nan"] {
            assert!(parse_number(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn numbers_round_trip() {
        for n in [exact(7, 3), exact(-2, 1), Number::Approx(Complex64::new(0.1, -3.25)), Number::Approx(Complex64::new(-1e-17, 0.5))] {
            assert_eq!(parse_number(&format_number(&n)).unwrap(), n);
        }
    }

    #[test]
    fn dense_and_sparse_literals() {
        let d = MatrixLiteral::parse("[[1, 2],\n [3, 1/2]]").unwrap();
        assert_eq!(d.shape(), (2, 2));
        let m = d.to_matrix::<Rational>().unwrap().to_dense();
        assert_eq!(m[(1, 1)], Rational::from_ratio(1, 2));
        let s = MatrixLiteral::parse("sparse 2 3\n(0, 2, 5)\n# note\n(1, 0, -1+i)\n").unwrap();
        assert_eq!(s.shape(), (2, 3));
        assert!(matches!(s.to_matrix::<Rational>(), Err(FormatError::NotExact { .. })));
        let f = s.to_matrix::<Complex64>().unwrap();
        assert!(f.is_sparse());
        assert_eq!(f.get(1, 0), Complex64::new(-1.0, 1.0));
        assert!(MatrixLiteral::parse("[[1,2],[3]]").is_err());
        assert!(MatrixLiteral::parse("sparse 2 2\n(2, 0, 1)").is_err());
    }

    #[test]
    fn formatted_matrices_parse_back() {
        let m = DenseMatrix::from_rows(vec![vec![Rational::from_ratio(1, 3), Rational::from_i64(0)], vec![Rational::from_i64(-2), Rational::from_i64(5)]]);
        let back = MatrixLiteral::parse(&format_dense(&m)).unwrap().to_matrix::<Rational>().unwrap().to_dense();
        assert_eq!(back, m);
        let sparse = CsrMatrix::from_dense(&m);
        let back = MatrixLiteral::parse(&format_sparse(&sparse)).unwrap().to_matrix::<Rational>().unwrap();
        assert_eq!(back.to_dense(), m);
    }

    #[test]
    fn irrep_file_round_trip() {
        let text = "[[irrep]]\nlabel = \"A\"\nimages = [\"[[1]]\"]\n\n[[irrep]]\nlabel = \"B\"\nimages = [\"[[-1]]\"]\n";
        let data = parse_irreps(text).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data[1].images[0][0][0], Number::integer(-1));
        assert_eq!(parse_irreps(&format_irreps(&data)).unwrap(), data);
    }
}
