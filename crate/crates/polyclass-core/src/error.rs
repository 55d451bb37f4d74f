// SPDX-License-Identifier: MIT OR Apache-2.0

//! Error type shared by every module of the crate.
//!
//! The crate is `no_std`, so the error type is a plain enum with a manual
//! [`core::fmt::Display`] implementation.  Variants are grouped by the kind of
//! failure they report:
//!
//! * malformed caller input (arities, indices, symbols, relation types),
//! * exhausted search budgets (every potentially expensive enumeration takes
//!   an explicit budget and fails loudly instead of running away),
//! * verification failures (a constructed witness did not check out), and
//! * internal contract violations (states the algorithms are supposed to make
//!   unreachable; seeing one of these is a bug, not a property of the input).

use alloc::string::String;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Unified error enum for all core operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Two operations that must share an arity do not.
    ArityMismatch {
        /// Arity of the left operand.
        left: u8,
        /// Arity of the right operand.
        right: u8,
    },
    /// An arity outside the supported range was requested.
    ArityOutOfRange {
        /// The offending arity.
        arity: u8,
        /// Largest arity supported in this context.
        max: u8,
    },
    /// An index into a truth table, tuple or carrier was out of range.
    IndexOutOfRange {
        /// The offending index.
        index: usize,
        /// Number of valid positions.
        len: usize,
    },
    /// A minor map had the wrong length or a target coordinate out of range.
    InvalidMinorMap {
        /// Human-readable detail.
        detail: &'static str,
    },
    /// A symbol index referred outside the description.
    SymbolOutOfRange {
        /// The offending symbol index (zero-based).
        symbol: usize,
        /// Number of symbols available.
        count: usize,
    },
    /// A sort index referred outside the signature.
    SortOutOfRange {
        /// The offending sort index (zero-based).
        sort: usize,
        /// Number of sorts available.
        count: usize,
    },
    /// A sort that must be Boolean (two-element) is not.
    NonBooleanSort {
        /// The offending sort index (zero-based).
        sort: usize,
    },
    /// A relation has an unsupported arity (only unary and binary relations
    /// participate in descriptions).
    UnsupportedRelation {
        /// Human-readable detail.
        detail: &'static str,
    },
    /// A relation is empty; the surrounding pipeline should have recognised
    /// the situation before reaching this operation.
    EmptyRelation,
    /// A finite-domain relation has a coordinate projection with more than two
    /// elements, so the small-projection translation does not apply.
    LargeProjection {
        /// Relation position (zero-based) in the input list.
        relation: usize,
        /// Coordinate (zero-based) whose projection is too large.
        coordinate: usize,
    },
    /// A description is not in reduced form where reduced form was required.
    NotReduced {
        /// Human-readable detail.
        detail: &'static str,
    },
    /// An identifier of a canonical minion was malformed or out of range.
    InvalidCore {
        /// Human-readable detail.
        detail: &'static str,
    },
    /// Two canonical minions are not related by a homomorphism in the
    /// requested direction.
    NotComparable {
        /// Name of the requested source.
        lower: String,
        /// Name of the requested target.
        upper: String,
    },
    /// An explicit operation budget was exhausted.
    BudgetExceeded {
        /// The budget that was in force.
        budget: u64,
    },
    /// A constructed witness failed its verification check.
    VerificationFailed {
        /// Human-readable diagnostics.
        detail: String,
    },
    /// An internal invariant was violated.  This indicates a bug in the crate,
    /// not a property of the input.
    Internal {
        /// Human-readable detail.
        detail: String,
    },
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::ArityMismatch { left, right } => {
                write!(f, "arity mismatch: {left} vs {right}")
            }
            Error::ArityOutOfRange { arity, max } => {
                write!(f, "arity {arity} out of range (1..={max})")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range (len {len})")
            }
            Error::InvalidMinorMap { detail } => write!(f, "invalid minor map: {detail}"),
            Error::SymbolOutOfRange { symbol, count } => {
                write!(f, "symbol {symbol} out of range ({count} symbols)")
            }
            Error::SortOutOfRange { sort, count } => {
                write!(f, "sort {sort} out of range ({count} sorts)")
            }
            Error::NonBooleanSort { sort } => {
                write!(f, "sort {sort} is not Boolean (two-element)")
            }
            Error::UnsupportedRelation { detail } => {
                write!(f, "unsupported relation: {detail}")
            }
            Error::EmptyRelation => write!(f, "empty relation"),
            Error::LargeProjection {
                relation,
                coordinate,
            } => write!(
                f,
                "relation {relation} has a projection with more than two elements \
                 at coordinate {coordinate}"
            ),
            Error::NotReduced { detail } => write!(f, "description not reduced: {detail}"),
            Error::InvalidCore { detail } => write!(f, "invalid canonical core: {detail}"),
            Error::NotComparable { lower, upper } => {
                write!(f, "no homomorphism from {lower} to {upper}")
            }
            Error::BudgetExceeded { budget } => {
                write!(f, "operation budget exceeded ({budget} steps)")
            }
            Error::VerificationFailed { detail } => {
                write!(f, "verification failed: {detail}")
            }
            Error::Internal { detail } => write!(f, "internal invariant violated: {detail}"),
        }
    }
}

/// A step counter enforcing an explicit budget on brute-force loops.
///
/// Every enumeration or search in this crate that can grow superpolynomially
/// charges its inner steps against one of these counters and aborts with
/// [`Error::BudgetExceeded`] instead of silently running away.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    /// Creates a budget allowing `limit` charged steps.
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    /// Charges `n` steps, failing if the budget is now exhausted.
    #[inline]
    pub fn charge(&mut self, n: u64) -> Result<()> {
        self.used = self.used.saturating_add(n);
        if self.used > self.limit {
            Err(Error::BudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }

    /// Number of steps charged so far.
    pub fn used(&self) -> u64 {
        self.used
    }

    /// The configured limit.
    pub fn limit(&self) -> u64 {
        self.limit
    }
}
