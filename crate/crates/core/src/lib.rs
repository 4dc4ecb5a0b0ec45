//! Perturbation-resilient balanced defining sets.
//!
//! A balanced defining set splits the popularity ranks `[1, 4t]` into `t`
//! companion pairs of 2-sets with equal sums. Adjacent rank swaps model
//! popularity changes of magnitude one; the worst case over all disjoint swap
//! sets measures how badly a defining set can be unbalanced.
//!
//! * [`companion`]: domain types, validation, swaps, discrepancy, pair types.
//! * [`adversary`]: exact worst case over all swap sets.
//! * [`construct`]: the recursive near-optimal family and the bounds.
//! * [`optsearch`]: exhaustive search for optimal sets at small `t`.
//! * [`graphs`]: swap and potential graphs and their degree checks.

pub mod adversary;
pub mod companion;
pub mod construct;
mod error;
pub mod graphs;
pub mod optsearch;

pub use adversary::{worst_case, Adversary, AdversaryResult, Strategy};
pub use companion::{
    classify_pair, swap_groups, CompanionPair, DefiningSet, PairType, Rank, Swap, SwapSet, Validation, Violation,
};
pub use error::{Error, Result};
