//! Exhaustive-enumeration solver, used as an independent oracle.
//!
//! Assignments are enumerated as the integers `0..2^n`, where variable 1 is
//! the most significant bit and `false` sorts before `true`; the first
//! satisfying assignment in that order is returned. The enumeration is
//! evaluated 64 assignments at a time with per-literal bit patterns, which
//! keeps 24-variable instances in the low milliseconds, but the result is
//! identical to the one-by-one sweep (the unit tests pin that equivalence).

use super::{Formula, Model};
use thiserror::Error;

/// Enumeration is exponential; refuse anything bigger than this.
pub const BRUTE_FORCE_VAR_LIMIT: u32 = 26;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BruteForceError {
    #[error("{num_vars} variables exceed the brute-force limit of {BRUTE_FORCE_VAR_LIMIT}")]
    TooManyVariables { num_vars: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForceResult {
    Sat(Model),
    Unsat,
}

impl BruteForceResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, BruteForceResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            BruteForceResult::Sat(m) => Some(m),
            BruteForceResult::Unsat => None,
        }
    }
}

/// Patterns for assignment-index bits 0..=5 within one 64-assignment word:
/// bit `k` is set iff `(k >> b) & 1 == 1`.
const BIT_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// The 64 assignments `64*word..64*word+64` in which `lit` holds, as a bitmask.
#[inline]
fn literal_word(num_vars: u32, lit: super::Literal, word: usize) -> u64 {
    let bit = num_vars - lit.var(); // position of this variable in the index
    let when_true = if bit >= 6 {
        if (word as u64 >> (bit - 6)) & 1 == 1 {
            !0u64
        } else {
            0
        }
    } else {
        BIT_PATTERNS[bit as usize]
    };
    if lit.is_positive() {
        when_true
    } else {
        !when_true
    }
}

/// Enumerates all `2^n` assignments in a fixed order and returns the first
/// satisfying [`Model`], or `Unsat` when none exists.
pub fn brute_force_solve(f: &Formula) -> Result<BruteForceResult, BruteForceError> {
    let n = f.num_vars();
    if n > BRUTE_FORCE_VAR_LIMIT {
        return Err(BruteForceError::TooManyVariables { num_vars: n });
    }
    if f.clauses().iter().any(|c| c.is_empty()) {
        return Ok(BruteForceResult::Unsat);
    }
    if n == 0 {
        // No empty clauses, so the empty assignment satisfies everything.
        return Ok(BruteForceResult::Sat(Model::new(vec![])));
    }

    let total: u64 = 1u64 << n;
    let num_words = total.div_ceil(64) as usize;
    let tail = if total.is_multiple_of(64) { !0u64 } else { (1u64 << (total % 64)) - 1 };
    let mut alive = vec![!0u64; num_words];
    alive[num_words - 1] = tail;

    for clause in f.clauses() {
        let mut any = 0u64;
        for (w, slot) in alive.iter_mut().enumerate() {
            if *slot == 0 {
                continue;
            }
            let mut sat = 0u64;
            for &lit in clause.iter() {
                sat |= literal_word(n, lit, w);
                if sat == !0u64 {
                    break;
                }
            }
            *slot &= sat;
            any |= *slot;
        }
        if any == 0 {
            return Ok(BruteForceResult::Unsat);
        }
    }

    let (w, word) = alive
        .iter()
        .enumerate()
        .find(|(_, &word)| word != 0)
        .expect("a satisfying assignment survived the sweep");
    let index = w as u64 * 64 + word.trailing_zeros() as u64;
    let values = (1..=n).map(|var| index >> (n - var) & 1 == 1).collect();
    Ok(BruteForceResult::Sat(Model::new(values)))
}
