//! DIMACS CNF reading and writing.
//!
//! Comment lines start with `c`, the header is `p cnf <vars> <clauses>`, and
//! clauses are whitespace-separated signed integers terminated by `0`,
//! possibly spanning line breaks. The header's clause count is advisory:
//! real benchmark files get it wrong often enough that a mismatch is only a
//! warning.

use super::{Clause, Formula, Literal};
use std::io::{self, BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header {header:?} (expected \"p cnf <vars> <clauses>\")")]
    MalformedHeader { line: usize, header: String },
    #[error("line {line}: clause data before the \"p cnf\" header")]
    MissingHeader { line: usize },
    #[error("line {line}: duplicate \"p cnf\" header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: literal {lit} exceeds declared {num_vars} variables")]
    LiteralOutOfRange { line: usize, lit: i32, num_vars: u32 },
    #[error("line {line}: {token:?} is not a literal")]
    BadToken { line: usize, token: String },
    #[error("unterminated final clause starting on line {line} (missing trailing 0)")]
    UnterminatedClause { line: usize },
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
}

/// A parsed formula plus any non-fatal irregularities found in the input.
#[derive(Debug, Clone)]
pub struct ParsedDimacs {
    pub formula: Formula,
    pub warnings: Vec<String>,
}

/// Parses DIMACS CNF from a buffered reader.
pub fn parse_dimacs<R: BufRead>(input: R) -> Result<ParsedDimacs, ParseError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_start = 0usize;
    let mut warnings = Vec::new();

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('c') {
            continue;
        }
        if let Some(rest) = text.strip_prefix('p') {
            if header.is_some() {
                return Err(ParseError::DuplicateHeader { line: line_no });
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["cnf", vars, count] => vars.parse::<u32>().ok().zip(count.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some((vars, count)) => header = Some((vars, count)),
                None => {
                    return Err(ParseError::MalformedHeader {
                        line: line_no,
                        header: text.to_string(),
                    })
                }
            }
            continue;
        }

        let (num_vars, _) = header.ok_or(ParseError::MissingHeader { line: line_no })?;
        for token in text.split_whitespace() {
            let value: i32 = token
                .parse()
                .map_err(|_| ParseError::BadToken { line: line_no, token: token.to_string() })?;
            if value == 0 {
                clauses.push(Clause::new(std::mem::take(&mut current)));
            } else {
                if value.unsigned_abs() > num_vars {
                    return Err(ParseError::LiteralOutOfRange {
                        line: line_no,
                        lit: value,
                        num_vars,
                    });
                }
                if current.is_empty() {
                    current_start = line_no;
                }
                current.push(Literal::from_dimacs(value));
            }
        }
    }

    if !current.is_empty() {
        return Err(ParseError::UnterminatedClause { line: current_start });
    }
    let (num_vars, declared) = header.ok_or(ParseError::MissingHeader { line: 0 })?;
    if clauses.len() != declared {
        warnings
            .push(format!("header declares {declared} clauses but {} were found", clauses.len()));
    }
    let formula = Formula::new(num_vars, clauses).expect("literals were range-checked");
    Ok(ParsedDimacs { formula, warnings })
}

/// Parses DIMACS CNF from an in-memory string.
pub fn parse_dimacs_str(text: &str) -> Result<ParsedDimacs, ParseError> {
    parse_dimacs(text.as_bytes())
}

/// Writes `f` in DIMACS CNF, one clause per line.
pub fn write_dimacs<W: Write>(f: &Formula, mut out: W) -> io::Result<()> {
    writeln!(out, "p cnf {} {}", f.num_vars(), f.num_clauses())?;
    for clause in f.clauses() {
        for lit in clause.iter() {
            write!(out, "{} ", lit.to_dimacs())?;
        }
        writeln!(out, "0")?;
    }
    Ok(())
}

pub fn write_dimacs_string(f: &Formula) -> String {
    let mut buf = Vec::new();
    write_dimacs(f, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("DIMACS output is ASCII")
}
