//! Text formats for complex matrices (`.cmx`) and vectors (`.cvec`).
//!
//! ```text
//! # optional comments
//! 2 2
//! 1 0   0 1
//! 0 -1  1 0
//! ```
//!
//! The header gives `rows cols` (or `len` for vectors), each following
//! line one row as `re im` pairs. Blank lines and lines starting with `#`
//! are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::numerics::{ComplexMatrix, ComplexVector, C64};

/// Upper bound on the number of entries a file may declare.
pub const MAX_ENTRIES: usize = 1 << 24;

/// Parse failure with its position (1-based line and column).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: invalid UTF-8")]
    InvalidUtf8 { line: usize, column: usize },

    #[error("line {line}, column {column}: malformed header: {detail}")]
    MalformedHeader { line: usize, column: usize, detail: String },

    #[error("line {line}, column {column}: expected {expected} tokens, found {found}")]
    TokenCount {
        line: usize,
        column: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: '{token}' is not a number")]
    NonNumeric { line: usize, column: usize, token: String },

    #[error("line {line}, column {column}: '{token}' is not finite")]
    NonFinite { line: usize, column: usize, token: String },

    #[error("line {line}, column {column}: declared size {rows}x{cols} exceeds {MAX_ENTRIES} entries")]
    DimensionOverflow {
        line: usize,
        column: usize,
        rows: usize,
        cols: usize,
    },

    #[error("line {line}: expected {expected} data rows, found {found}")]
    MissingRows { line: usize, expected: usize, found: usize },

    #[error("line {line}, column {column}: data after the last row")]
    TrailingData { line: usize, column: usize },
}

impl ParseError {
    /// `(line, column)` of the failure; missing rows report column 1.
    pub fn location(&self) -> (usize, usize) {
        match *self {
            ParseError::InvalidUtf8 { line, column }
            | ParseError::MalformedHeader { line, column, .. }
            | ParseError::TokenCount { line, column, .. }
            | ParseError::NonNumeric { line, column, .. }
            | ParseError::NonFinite { line, column, .. }
            | ParseError::DimensionOverflow { line, column, .. }
            | ParseError::TrailingData { line, column } => (line, column),
            ParseError::MissingRows { line, .. } => (line, 1),
        }
    }
}

/// Failure to load a file: unreadable or unparsable.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct DataLine<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    end_column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

fn decode(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let good = &bytes[..e.valid_up_to()];
        let line = good.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = good.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        ParseError::InvalidUtf8 {
            line,
            column: good.len() - line_start + 1,
        }
    })
}

/// Non-comment, non-blank lines with their tokens.
fn data_lines(text: &str) -> impl Iterator<Item = DataLine<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return None;
        }
        Some(DataLine {
            number: i + 1,
            tokens: tokens(raw),
            end_column: raw.len() + 1,
        })
    })
}

fn last_line(text: &str) -> usize {
    text.lines().count().max(1)
}

fn header_dim(tok: &Token<'_>, line: usize) -> Result<usize, ParseError> {
    let malformed = |detail: String| ParseError::MalformedHeader { line, column: tok.column, detail };
    if !tok.text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(format!("'{}' is not a positive integer", tok.text)));
    }
    match tok.text.parse::<usize>() {
        Ok(0) => Err(malformed("dimensions must be positive".into())),
        Ok(v) => Ok(v),
        Err(_) => Err(ParseError::DimensionOverflow { line, column: tok.column, rows: usize::MAX, cols: 1 }),
    }
}

fn number(tok: &Token<'_>, line: usize) -> Result<f64, ParseError> {
    let v: f64 = tok.text.parse().map_err(|_| ParseError::NonNumeric {
        line,
        column: tok.column,
        token: tok.text.to_string(),
    })?;
    if !v.is_finite() {
        return Err(ParseError::NonFinite { line, column: tok.column, token: tok.text.to_string() });
    }
    Ok(v)
}

fn read_row(line: &DataLine<'_>, cols: usize, out: &mut Vec<C64>) -> Result<(), ParseError> {
    let expected = 2 * cols;
    if line.tokens.len() != expected {
        let column = line.tokens.get(expected).map_or(line.end_column, |t| t.column);
        return Err(ParseError::TokenCount { line: line.number, column, expected, found: line.tokens.len() });
    }
    for pair in line.tokens.chunks(2) {
        out.push(C64::new(number(&pair[0], line.number)?, number(&pair[1], line.number)?));
    }
    Ok(())
}

fn parse_body(text: &str, header_tokens: usize) -> Result<(usize, usize, Vec<C64>), ParseError> {
    let mut lines = data_lines(text);
    let header = lines.next().ok_or_else(|| ParseError::MalformedHeader {
        line: last_line(text),
        column: 1,
        detail: "missing header".into(),
    })?;
    if header.tokens.len() != header_tokens {
        let column = header.tokens.get(header_tokens).map_or(header.end_column, |t| t.column);
        return Err(ParseError::MalformedHeader {
            line: header.number,
            column,
            detail: format!("expected {header_tokens} dimension(s), found {}", header.tokens.len()),
        });
    }
    let (rows, cols) = if header_tokens == 2 {
        (header_dim(&header.tokens[0], header.number)?, header_dim(&header.tokens[1], header.number)?)
    } else {
        (header_dim(&header.tokens[0], header.number)?, 1)
    };
    if rows.checked_mul(cols).is_none_or(|n| n > MAX_ENTRIES) {
        return Err(ParseError::DimensionOverflow { line: header.number, column: header.tokens[0].column, rows, cols });
    }
    let mut data = Vec::new();
    let mut found = 0;
    for line in lines.by_ref() {
        read_row(&line, cols, &mut data)?;
        found += 1;
        if found == rows {
            break;
        }
    }
    if found < rows {
        return Err(ParseError::MissingRows { line: last_line(text), expected: rows, found });
    }
    if let Some(extra) = lines.next() {
        return Err(ParseError::TrailingData { line: extra.number, column: extra.tokens[0].column });
    }
    Ok((rows, cols, data))
}

/// Parses matrix text.
pub fn parse_matrix_str(text: &str) -> Result<ComplexMatrix, ParseError> {
    let (rows, cols, data) = parse_body(text, 2)?;
    Ok(ComplexMatrix::from_vec(rows, cols, data).expect("entry count and finiteness checked"))
}

/// Parses vector text.
pub fn parse_vector_str(text: &str) -> Result<ComplexVector, ParseError> {
    let (_, _, data) = parse_body(text, 1)?;
    Ok(ComplexVector::from_vec(data).expect("finiteness checked"))
}

pub fn parse_matrix_bytes(bytes: &[u8]) -> Result<ComplexMatrix, ParseError> {
    parse_matrix_str(decode(bytes)?)
}

pub fn parse_vector_bytes(bytes: &[u8]) -> Result<ComplexVector, ParseError> {
    parse_vector_str(decode(bytes)?)
}

fn read(path: &Path) -> Result<Vec<u8>, LoadError> {
    fs::read(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })
}

pub fn parse_matrix(path: &Path) -> Result<ComplexMatrix, LoadError> {
    parse_matrix_bytes(&read(path)?).map_err(|source| LoadError::Parse { path: path.display().to_string(), source })
}

pub fn parse_vector(path: &Path) -> Result<ComplexVector, LoadError> {
    parse_vector_bytes(&read(path)?).map_err(|source| LoadError::Parse { path: path.display().to_string(), source })
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_real(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn push_entry(out: &mut String, z: C64) {
    out.push_str(&format_real(z.re));
    out.push(' ');
    out.push_str(&format_real(z.im));
}

pub fn write_matrix_string(a: &ComplexMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", a.rows(), a.cols());
    for i in 0..a.rows() {
        for (k, &z) in a.row(i).iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            push_entry(&mut out, z);
        }
        out.push('\n');
    }
    out
}

pub fn write_vector_string(v: &ComplexVector) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", v.len());
    for &z in v.iter() {
        push_entry(&mut out, z);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let a = parse_matrix_str("1 1\n2 0\n").unwrap();
        assert_eq!(a, ComplexMatrix::from_real_rows(&[&[2.0]]));
        let b = parse_matrix_str("2 2\n1 0 0 1\n0 -1 1 0\n").unwrap();
        assert_eq!(b[(0, 1)], C64::new(0.0, 1.0));
        assert_eq!(b[(1, 0)], C64::new(0.0, -1.0));
        let err = parse_matrix_str("1 2\n1 0 2\n").unwrap_err();
        assert!(matches!(err, ParseError::TokenCount { line: 2, expected: 4, found: 3, .. }), "{err}");
    }

    #[test]
    fn comments_and_blank_lines() {
        let v = parse_vector_str("# input\n\n2\n  # mid\n1 2\n\n3e-1 -4\n# end\n").unwrap();
        assert_eq!(v.as_slice(), &[C64::new(1.0, 2.0), C64::new(0.3, -4.0)]);
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(parse_matrix_str("2\n1 0\n"), Err(ParseError::MalformedHeader { line: 1, .. })));
        assert!(matches!(parse_matrix_str("a 1\n"), Err(ParseError::MalformedHeader { line: 1, column: 1, .. })));
        assert!(matches!(parse_matrix_str("0 1\n"), Err(ParseError::MalformedHeader { .. })));
        assert!(matches!(parse_matrix_str(""), Err(ParseError::MalformedHeader { .. })));
        assert!(matches!(
            parse_matrix_str("1 1\n1 x\n"),
            Err(ParseError::NonNumeric { line: 2, column: 3, .. })
        ));
        assert!(matches!(parse_matrix_str("1 1\n1 inf\n"), Err(ParseError::NonFinite { .. })));
        assert!(matches!(parse_matrix_str("100000 100000\n"), Err(ParseError::DimensionOverflow { .. })));
        assert!(matches!(
            parse_matrix_str("99999999999999999999999 1\n"),
            Err(ParseError::DimensionOverflow { .. })
        ));
        assert!(matches!(parse_matrix_str("2 1\n1 0\n"), Err(ParseError::MissingRows { expected: 2, found: 1, .. })));
        assert!(matches!(parse_matrix_str("1 1\n1 0\n2 0\n"), Err(ParseError::TrailingData { line: 3, .. })));
        assert!(matches!(parse_vector_bytes(b"1\n1 \xff\n"), Err(ParseError::InvalidUtf8 { line: 2, column: 3 })));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let values = [0.0, -0.0, 1.0, -2.5, 1e-300, 6.02214076e23, 0.1 + 0.2, f64::MIN_POSITIVE, 1e16, 123456.789];
        let a = ComplexMatrix::from_fn(2, 5, |i, k| C64::new(values[i * 5 + k], -values[9 - (i * 5 + k)]));
        let back = parse_matrix_str(&write_matrix_string(&a)).unwrap();
        for (x, y) in a.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        let v = ComplexVector::from_fn(3, |i| C64::new(values[i], values[i + 3]));
        assert_eq!(parse_vector_str(&write_vector_string(&v)).unwrap(), v);
    }
}
