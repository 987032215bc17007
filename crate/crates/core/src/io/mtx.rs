//! Matrix Market coordinate files holding real symmetric matrices.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::matpair::SymMatrix;

/// Largest accepted dimension; the matrix is stored dense.
pub const MAX_DIM: usize = 16_384;

/// Relative asymmetry tolerated in files declared `general`.
pub const GENERAL_SYMMETRY_TOL: f64 = 1e-12;

/// Parse failures. `line` is 1-based; `0` means no line was read.
#[derive(Debug, Error)]
pub enum MtxError {
    #[error("line {line}: bad banner: {detail}")]
    BadBanner { line: usize, detail: String },

    #[error("line {line}: unsupported format: {detail}")]
    UnsupportedFormat { line: usize, detail: String },

    #[error("line {line}: index ({row}, {col}) outside a {n}x{n} matrix")]
    IndexOutOfRange { line: usize, row: i64, col: i64, n: usize },

    #[error("line {line}: entry ({row}, {col}) already given on line {first}")]
    DuplicateEntry { line: usize, row: usize, col: usize, first: usize },

    #[error("line {line}: matrix is {rows}x{cols}, expected square")]
    NotSquare { line: usize, rows: usize, cols: usize },

    #[error("line {line}: matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { line: usize, row: usize, col: usize },

    #[error("line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("line {line}: {source}")]
    Io {
        line: usize,
        #[source]
        source: io::Error,
    },
}

impl MtxError {
    pub fn line(&self) -> usize {
        match self {
            MtxError::BadBanner { line, .. }
            | MtxError::UnsupportedFormat { line, .. }
            | MtxError::IndexOutOfRange { line, .. }
            | MtxError::DuplicateEntry { line, .. }
            | MtxError::NotSquare { line, .. }
            | MtxError::NotSymmetric { line, .. }
            | MtxError::Parse { line, .. }
            | MtxError::Io { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxFormat {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxField {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtxSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

/// Banner line `%%MatrixMarket matrix <format> <field> <symmetry>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MtxHeader {
    pub format: MtxFormat,
    pub field: MtxField,
    pub symmetry: MtxSymmetry,
}

impl MtxHeader {
    pub const SYMMETRIC_REAL: Self =
        Self { format: MtxFormat::Coordinate, field: MtxField::Real, symmetry: MtxSymmetry::Symmetric };

    fn parse(text: &str, line: usize) -> Result<Self, MtxError> {
        let bad = |detail: String| MtxError::BadBanner { line, detail };
        let tokens: Vec<String> = text.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
        if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
            return Err(bad("expected '%%MatrixMarket'".into()));
        }
        if tokens.len() != 5 {
            return Err(bad(format!("expected 4 qualifiers, found {}", tokens.len() - 1)));
        }
        if tokens[1] != "matrix" {
            return Err(MtxError::UnsupportedFormat { line, detail: format!("object '{}'", tokens[1]) });
        }
        let format = match tokens[2].as_str() {
            "coordinate" => MtxFormat::Coordinate,
            "array" => MtxFormat::Array,
            other => return Err(bad(format!("unknown format '{other}'"))),
        };
        let field = match tokens[3].as_str() {
            "real" | "double" => MtxField::Real,
            "integer" => MtxField::Integer,
            "complex" => MtxField::Complex,
            "pattern" => MtxField::Pattern,
            other => return Err(bad(format!("unknown field '{other}'"))),
        };
        let symmetry = match tokens[4].as_str() {
            "general" => MtxSymmetry::General,
            "symmetric" => MtxSymmetry::Symmetric,
            "skew-symmetric" => MtxSymmetry::SkewSymmetric,
            "hermitian" => MtxSymmetry::Hermitian,
            other => return Err(bad(format!("unknown symmetry '{other}'"))),
        };
        let header = Self { format, field, symmetry };
        header.check_supported(line)?;
        Ok(header)
    }

    fn check_supported(&self, line: usize) -> Result<(), MtxError> {
        let unsupported = |detail: String| Err(MtxError::UnsupportedFormat { line, detail });
        if self.format != MtxFormat::Coordinate {
            return unsupported("only coordinate storage is read".into());
        }
        if !matches!(self.field, MtxField::Real | MtxField::Integer) {
            return unsupported(format!("field {:?} is not real", self.field));
        }
        if !matches!(self.symmetry, MtxSymmetry::General | MtxSymmetry::Symmetric) {
            return unsupported(format!("symmetry {:?}", self.symmetry));
        }
        Ok(())
    }
}

impl fmt::Display for MtxHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let format = match self.format {
            MtxFormat::Coordinate => "coordinate",
            MtxFormat::Array => "array",
        };
        let field = match self.field {
            MtxField::Real => "real",
            MtxField::Integer => "integer",
            MtxField::Complex => "complex",
            MtxField::Pattern => "pattern",
        };
        let symmetry = match self.symmetry {
            MtxSymmetry::General => "general",
            MtxSymmetry::Symmetric => "symmetric",
            MtxSymmetry::SkewSymmetric => "skew-symmetric",
            MtxSymmetry::Hermitian => "hermitian",
        };
        write!(f, "%%MatrixMarket matrix {format} {field} {symmetry}")
    }
}

/// Yields `(line_number, text)` for every line, failing on invalid UTF-8.
struct Lines<R> {
    reader: R,
    buf: Vec<u8>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(reader: R) -> Self {
        Self { reader, buf: Vec::new(), line: 0 }
    }

    fn next_line(&mut self) -> Result<Option<(usize, String)>, MtxError> {
        self.buf.clear();
        let read = self
            .reader
            .read_until(b'\n', &mut self.buf)
            .map_err(|source| MtxError::Io { line: self.line + 1, source })?;
        if read == 0 {
            return Ok(None);
        }
        self.line += 1;
        let text = std::str::from_utf8(&self.buf)
            .map_err(|_| MtxError::Parse { line: self.line, detail: "invalid UTF-8".into() })?;
        Ok(Some((self.line, text.trim_end_matches(['\n', '\r']).to_owned())))
    }

    /// Next line that is neither blank nor a `%` comment.
    fn next_content(&mut self) -> Result<Option<(usize, String)>, MtxError> {
        while let Some((line, text)) = self.next_line()? {
            let trimmed = text.trim();
            if !trimmed.is_empty() && !trimmed.starts_with('%') {
                return Ok(Some((line, trimmed.to_owned())));
            }
        }
        Ok(None)
    }
}

fn parse_count(token: &str, what: &str, line: usize) -> Result<usize, MtxError> {
    token
        .parse::<usize>()
        .map_err(|_| MtxError::Parse { line, detail: format!("{what} '{token}' is not a non-negative integer") })
}

fn parse_index(token: &str, line: usize) -> Result<i64, MtxError> {
    token.parse::<i64>().map_err(|_| MtxError::Parse { line, detail: format!("index '{token}' is not an integer") })
}

fn parse_value(token: &str, field: MtxField, line: usize) -> Result<f64, MtxError> {
    let value = match field {
        MtxField::Integer => token
            .parse::<i64>()
            .map(|v| v as f64)
            .map_err(|_| MtxError::Parse { line, detail: format!("value '{token}' is not an integer") })?,
        _ => token
            .parse::<f64>()
            .map_err(|_| MtxError::Parse { line, detail: format!("value '{token}' is not a number") })?,
    };
    if !value.is_finite() {
        return Err(MtxError::Parse { line, detail: format!("value '{token}' is not finite") });
    }
    Ok(value)
}

/// Reads a coordinate file into a dense symmetric matrix.
///
/// `symmetric` files may only list the lower triangle; `general` files must
/// be symmetric to a relative [`GENERAL_SYMMETRY_TOL`]. Duplicates are rejected.
pub fn parse_mtx<R: BufRead>(reader: R) -> Result<SymMatrix, MtxError> {
    let mut lines = Lines::new(reader);
    let (banner_line, banner) = lines
        .next_line()?
        .ok_or_else(|| MtxError::BadBanner { line: 1, detail: "empty input".into() })?;
    let header = MtxHeader::parse(&banner, banner_line)?;

    let (size_line, size) = lines
        .next_content()?
        .ok_or_else(|| MtxError::Parse { line: lines.line + 1, detail: "missing size line".into() })?;
    let tokens: Vec<&str> = size.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(MtxError::Parse {
            line: size_line,
            detail: format!("size line needs 'rows cols entries', found {} fields", tokens.len()),
        });
    }
    let rows = parse_count(tokens[0], "row count", size_line)?;
    let cols = parse_count(tokens[1], "column count", size_line)?;
    let entries = parse_count(tokens[2], "entry count", size_line)?;
    if rows != cols {
        return Err(MtxError::NotSquare { line: size_line, rows, cols });
    }
    let n = rows;
    if n == 0 {
        return Err(MtxError::Parse { line: size_line, detail: "matrix is empty".into() });
    }
    if n > MAX_DIM {
        return Err(MtxError::UnsupportedFormat {
            line: size_line,
            detail: format!("dimension {n} exceeds the dense limit {MAX_DIM}"),
        });
    }
    let capacity = match header.symmetry {
        MtxSymmetry::Symmetric => n * (n + 1) / 2,
        _ => n * n,
    };
    if entries > capacity {
        return Err(MtxError::Parse {
            line: size_line,
            detail: format!("{entries} entries cannot fit a {n}x{n} {:?} matrix", header.symmetry),
        });
    }

    let mut dense = DMatrix::<f64>::zeros(n, n);
    let mut seen: HashMap<(usize, usize), usize> = HashMap::with_capacity(entries);
    for read in 0..entries {
        let (line, text) = lines.next_content()?.ok_or_else(|| MtxError::Parse {
            line: lines.line + 1,
            detail: format!("expected {entries} entries, found {read}"),
        })?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(MtxError::Parse { line, detail: format!("entry needs 'row col value', found {} fields", fields.len()) });
        }
        let (row, col) = (parse_index(fields[0], line)?, parse_index(fields[1], line)?);
        let value = parse_value(fields[2], header.field, line)?;
        let in_range = |v: i64| v >= 1 && v as u64 <= n as u64;
        if !in_range(row) || !in_range(col) {
            return Err(MtxError::IndexOutOfRange { line, row, col, n });
        }
        let (i, j) = (row as usize - 1, col as usize - 1);
        if header.symmetry == MtxSymmetry::Symmetric && j > i {
            return Err(MtxError::NotSymmetric { line, row: i + 1, col: j + 1 });
        }
        if let Some(&first) = seen.get(&(i, j)) {
            return Err(MtxError::DuplicateEntry { line, row: i + 1, col: j + 1, first });
        }
        seen.insert((i, j), line);
        dense[(i, j)] = value;
        if header.symmetry == MtxSymmetry::Symmetric {
            dense[(j, i)] = value;
        }
    }
    if let Some((line, _)) = lines.next_content()? {
        return Err(MtxError::Parse { line, detail: format!("data after the declared {entries} entries") });
    }

    if header.symmetry == MtxSymmetry::General {
        let mut offending: Vec<(usize, usize, usize)> = seen
            .iter()
            .filter(|(&(i, j), _)| i != j)
            .filter(|(&(i, j), _)| {
                let (a, b) = (dense[(i, j)], dense[(j, i)]);
                (a - b).abs() > GENERAL_SYMMETRY_TOL * a.abs().max(b.abs())
            })
            .map(|(&(i, j), &line)| (line, i + 1, j + 1))
            .collect();
        offending.sort_unstable();
        if let Some(&(line, row, col)) = offending.first() {
            return Err(MtxError::NotSymmetric { line, row, col });
        }
    }
    SymMatrix::from_lower(dense).map_err(|e| MtxError::Parse { line: 0, detail: e.to_string() })
}

pub fn read_mtx_file(path: impl AsRef<Path>) -> Result<SymMatrix, MtxError> {
    let file = File::open(path).map_err(|source| MtxError::Io { line: 0, source })?;
    parse_mtx(BufReader::new(file))
}

/// Writes the lower-triangle nonzeros row by row with 17 significant digits.
pub fn write_mtx<W: Write>(a: &SymMatrix, mut out: W) -> io::Result<()> {
    let n = a.dim();
    writeln!(out, "{}", MtxHeader::SYMMETRIC_REAL)?;
    writeln!(out, "{n} {n} {}", a.lower_nnz())?;
    for i in 0..n {
        for j in 0..=i {
            let v = a.get(i, j);
            if v != 0.0 {
                writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v)?;
            }
        }
    }
    out.flush()
}

/// `diag(1, 2, …, n)`.
pub fn diag_matrix(n: usize) -> SymMatrix {
    let values: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    SymMatrix::from_diagonal(&values).expect("diagonal of positive integers is finite")
}
