//! CNF data model: literals, clauses, formulas, models, and model checking.
//!
//! Variables are 1-based, matching DIMACS. A [`Formula`] stores clauses
//! verbatim (no normalization), so parse/write round-trips preserve clause
//! and literal order exactly; the solver normalizes on load instead.

mod brute;
mod dimacs;

pub use brute::{brute_force_solve, BruteForceError, BRUTE_FORCE_VAR_LIMIT};
pub use dimacs::{
    parse_dimacs, parse_dimacs_str, write_dimacs, write_dimacs_string, ParseError, ParsedDimacs,
};

use std::fmt;
use thiserror::Error;

/// A positive or negative occurrence of a Boolean variable.
///
/// Encoded as `(var - 1) * 2 + negated_bit`, so literals of the same variable
/// are adjacent and [`Literal::index`] can be used directly for watch lists.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(u32);

impl Literal {
    /// Builds a literal from a 1-based variable index and a polarity
    /// (`true` = positive).
    pub fn new(var: u32, positive: bool) -> Literal {
        assert!(var >= 1, "variables are 1-based");
        Literal((var - 1) * 2 + u32::from(!positive))
    }

    /// Converts from a signed DIMACS integer (nonzero).
    pub fn from_dimacs(code: i32) -> Literal {
        assert!(code != 0, "0 is the DIMACS clause terminator, not a literal");
        Literal::new(code.unsigned_abs(), code > 0)
    }

    /// The signed DIMACS representation.
    pub fn to_dimacs(self) -> i32 {
        let v = self.var() as i32;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    /// 1-based variable index.
    #[inline]
    pub fn var(self) -> u32 {
        self.0 / 2 + 1
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense 0-based code, suitable for indexing per-literal arrays.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Inverse of [`Literal::index`].
    #[inline]
    pub fn from_index(index: usize) -> Literal {
        Literal(index as u32)
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;

    #[inline]
    fn not(self) -> Literal {
        Literal(self.0 ^ 1)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals, kept in insertion order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Clause {
        Clause { literals }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Literal> {
        self.literals.iter()
    }

    /// True if the clause contains some literal together with its negation.
    pub fn is_tautology(&self) -> bool {
        let mut sorted: Vec<Literal> = self.literals.clone();
        sorted.sort_unstable();
        sorted.windows(2).any(|w| w[0] == !w[1])
    }

    /// Removes duplicate literals, keeping first occurrences in order.
    pub fn dedup(&mut self) {
        let mut seen = Vec::with_capacity(self.literals.len());
        self.literals.retain(|&l| {
            if seen.contains(&l) {
                false
            } else {
                seen.push(l);
                true
            }
        });
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<T: IntoIterator<Item = Literal>>(iter: T) -> Clause {
        Clause::new(iter.into_iter().collect())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("literal {lit} references variable {var} beyond declared count {num_vars}")]
    VariableOutOfRange { lit: i32, var: u32, num_vars: u32 },
    #[error("model assigns {got} variables but the formula has {expected}")]
    PartialModel { got: usize, expected: usize },
}

/// A CNF formula: a conjunction of clauses over variables `1..=num_vars`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Formula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl Formula {
    /// Builds a formula, checking every literal against `num_vars`.
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Formula, FormulaError> {
        for clause in &clauses {
            for &lit in clause.iter() {
                if lit.var() > num_vars {
                    return Err(FormulaError::VariableOutOfRange {
                        lit: lit.to_dimacs(),
                        var: lit.var(),
                        num_vars,
                    });
                }
            }
        }
        Ok(Formula { num_vars, clauses })
    }

    /// Builds a formula from signed DIMACS integers; convenient in tests.
    pub fn from_dimacs_clauses(num_vars: u32, clauses: &[&[i32]]) -> Formula {
        let clauses =
            clauses.iter().map(|c| c.iter().map(|&i| Literal::from_dimacs(i)).collect()).collect();
        Formula::new(num_vars, clauses).expect("literal out of range")
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }
}

/// A total assignment over a formula's variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(values: Vec<bool>) -> Model {
        Model { values }
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    /// Value of a 1-based variable.
    pub fn value(&self, var: u32) -> bool {
        self.values[(var - 1) as usize]
    }

    pub fn satisfies_literal(&self, lit: Literal) -> bool {
        self.value(lit.var()) == lit.is_positive()
    }

    /// The model as signed DIMACS integers, one per variable.
    pub fn to_dimacs(&self) -> Vec<i32> {
        (1..=self.num_vars()).map(|v| if self.value(v) { v as i32 } else { -(v as i32) }).collect()
    }
}

/// True iff every clause of `f` contains at least one literal satisfied by `m`.
///
/// `m` must assign every variable of `f`.
pub fn check_model(f: &Formula, m: &Model) -> Result<bool, FormulaError> {
    if m.num_vars() < f.num_vars() {
        return Err(FormulaError::PartialModel {
            got: m.num_vars() as usize,
            expected: f.num_vars() as usize,
        });
    }
    Ok(f.clauses().iter().all(|c| c.iter().any(|&l| m.satisfies_literal(l))))
}
