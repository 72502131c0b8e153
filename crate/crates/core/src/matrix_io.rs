//! Reading and writing Llull matrices as CSV.
//!
//! ```text
//! # comment
//! ,a,b,c
//! a,*,3,1/2
//! b,2,*,4
//! c,4.5,1,*
//! V=6
//! ```
//!
//! Entries are absolute counts out of `V` (integers, decimals or `p/q`).
//! Without a `V=` line the entries are relative scores and `V = 1`. Row
//! labels and the leading empty header cell are optional.

use crate::ballot::{BallotError, CandidateSet};
use crate::llull::{LlullError, LlullMatrix};
use crate::matrix::SquareMatrix;
use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("line {line}: {message}")]
    Syntax { line: u64, message: String },
    #[error("line {line}, column {column}: `{text}` is not a number")]
    Value {
        line: u64,
        column: usize,
        text: String,
    },
    #[error(transparent)]
    Candidates(#[from] BallotError),
    #[error(transparent)]
    Domain(#[from] LlullError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixInput {
    pub candidates: CandidateSet,
    pub llull: LlullMatrix,
}

fn syntax(line: u64, message: impl Into<String>) -> MatrixError {
    MatrixError::Syntax {
        line,
        message: message.into(),
    }
}

fn is_diagonal_marker(s: &str) -> bool {
    matches!(s, "*" | "-" | "" | "0")
}

pub fn parse_matrix_csv(text: &str) -> Result<MatrixInput, MatrixError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<(u64, Vec<String>)> = Vec::new();
    let mut total: Option<Rational> = None;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            syntax(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fields: Vec<String> = record.iter().map(str::to_string).collect();
        if fields.iter().all(String::is_empty) {
            continue;
        }
        if let Some(rest) = fields[0]
            .strip_prefix("V=")
            .or_else(|| fields[0].strip_prefix("V ="))
        {
            if total.is_some() {
                return Err(syntax(line, "more than one `V=` line"));
            }
            let value = parse_rational(rest.trim()).ok_or_else(|| MatrixError::Value {
                line,
                column: 1,
                text: rest.trim().to_string(),
            })?;
            total = Some(value);
            continue;
        }
        if header.is_none() {
            let mut names = fields;
            if names.first().is_some_and(String::is_empty) {
                names.remove(0);
            }
            header = Some(names);
        } else {
            rows.push((line, fields));
        }
    }

    let names = header.ok_or_else(|| syntax(1, "missing header row"))?;
    let candidates = CandidateSet::new(&names)?;
    let n = candidates.len();
    if rows.len() != n {
        let line = rows.last().map_or(1, |r| r.0);
        return Err(syntax(
            line,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let mut counts = SquareMatrix::filled(n, Rational::zero());
    for (i, (line, fields)) in rows.iter().enumerate() {
        let (x, cells, offset) = if fields.len() == n + 1 {
            let x = candidates
                .position(&fields[0])
                .ok_or_else(|| syntax(*line, format!("unknown row label `{}`", fields[0])))?;
            (x, &fields[1..], 2)
        } else if fields.len() == n {
            (i, &fields[..], 1)
        } else {
            return Err(syntax(
                *line,
                format!("expected {n} entries, found {}", fields.len()),
            ));
        };
        for (y, cell) in cells.iter().enumerate() {
            if x == y {
                if !is_diagonal_marker(cell) {
                    return Err(MatrixError::Value {
                        line: *line,
                        column: y + offset,
                        text: cell.clone(),
                    });
                }
                continue;
            }
            counts[(x, y)] = parse_rational(cell).ok_or_else(|| MatrixError::Value {
                line: *line,
                column: y + offset,
                text: cell.clone(),
            })?;
        }
    }
    let llull = LlullMatrix::from_absolute(counts, total.unwrap_or_else(Rational::one))?;
    Ok(MatrixInput { candidates, llull })
}

/// Writes absolute counts with a `V=` line, exact fractions where needed.
pub fn write_matrix_csv(candidates: &CandidateSet, llull: &LlullMatrix) -> String {
    let absolute = llull.absolute();
    let mut out = String::new();
    out.push(',');
    out.push_str(&candidates.names().join(","));
    out.push('\n');
    for x in 0..llull.n() {
        out.push_str(candidates.name(x));
        for y in 0..llull.n() {
            out.push(',');
            if x == y {
                out.push('*');
            } else {
                out.push_str(&format_rational(&absolute[(x, y)]));
            }
        }
        out.push('\n');
    }
    out.push_str(&format!("V={}\n", format_rational(llull.total_voters())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn labelled_matrix_with_total() {
        let m = parse_matrix_csv("# votes\n,a,b,c\na,*,3,1/2\nb,2,*,4\nc,4.5,1,*\nV=6\n").unwrap();
        assert_eq!(m.candidates.names(), ["a", "b", "c"]);
        assert_eq!(m.llull.total_voters(), &int(6));
        assert_eq!(m.llull.score(0, 2), &ratio(1, 12));
        assert_eq!(m.llull.score(2, 0), &ratio(3, 4));
    }

    #[test]
    fn bare_relative_matrix() {
        let m = parse_matrix_csv("x,y\n-,0.25\n0.5,-\n").unwrap();
        assert_eq!(m.llull.total_voters(), &int(1));
        assert_eq!(m.llull.score(0, 1), &ratio(1, 4));
    }

    #[test]
    fn rows_may_come_in_any_order_when_labelled() {
        let m = parse_matrix_csv(",a,b\nb,1,*\na,*,2\nV=3\n").unwrap();
        assert_eq!(m.llull.score(0, 1), &ratio(2, 3));
        assert_eq!(m.llull.score(1, 0), &ratio(1, 3));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_matrix_csv(",a,b\na,*,x\nb,1,*\n"),
            Err(MatrixError::Value {
                line: 2,
                column: 3,
                text: "x".into()
            })
        );
        assert!(matches!(
            parse_matrix_csv(",a,b\na,*,1\n"),
            Err(MatrixError::Syntax { .. })
        ));
        assert!(matches!(
            parse_matrix_csv(",a,b\na,*,3\nb,1,*\nV=2\n"),
            Err(MatrixError::Domain(LlullError::TotalVotersTooSmall { .. }))
        ));
        assert!(matches!(
            parse_matrix_csv(",a,a\na,*,1\na,1,*\n"),
            Err(MatrixError::Candidates(_))
        ));
    }

    #[test]
    fn round_trip() {
        let text = ",a,b,c\na,*,3,1/2\nb,2,*,4\nc,9/2,1,*\nV=6\n";
        let m = parse_matrix_csv(text).unwrap();
        assert_eq!(write_matrix_csv(&m.candidates, &m.llull), text);
    }
}
