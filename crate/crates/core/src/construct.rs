//! The recursive near-optimal family and the closed-form bounds.
//!
//! Level `z >= 2` has `t = 5·2^(z-2) − 1` pairs over `4t = 5·2^z − 4` ranks.
//! Level `z + 1` is two shifted copies of level `z` (by `+1` and by
//! `+(5·2^z − 1)`) followed by the closing pair
//! `({1, 5·2^(z+1) − 4}, {5·2^z − 2, 5·2^z − 1})`.

use num_rational::Ratio;

use crate::adversary::{Adversary, Strategy, EXHAUSTIVE_RANK_LIMIT};
use crate::companion::{CompanionPair, DefiningSet, Rank};
use crate::error::{Error, Result};

/// Largest rank count `construct_for_z` builds by default.
pub const DEFAULT_RANK_CAP: u64 = 1 << 24;

/// Level parameter of the recursive family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructionParams {
    z: u32,
}

impl ConstructionParams {
    pub fn new(z: u32) -> Result<Self> {
        if !(2..=40).contains(&z) {
            return Err(Error::OutOfRange {
                what: "z",
                constraint: "z must satisfy 2 <= z <= 40".into(),
            });
        }
        Ok(ConstructionParams { z })
    }

    pub fn z(&self) -> u32 {
        self.z
    }

    /// `t = 5·2^(z-2) − 1`.
    pub fn t(&self) -> u64 {
        5 * (1u64 << (self.z - 2)) - 1
    }

    /// `4t = 5·2^z − 4`.
    pub fn ranks(&self) -> u64 {
        4 * self.t()
    }

    /// The level whose pair count is `t`, if `t` belongs to the family.
    pub fn for_t(t: u64) -> Option<Self> {
        (2..=40).map(|z| ConstructionParams { z }).find(|p| p.t() == t)
    }
}

/// The unique optimum at `t = 4`.
pub fn base_case() -> DefiningSet {
    DefiningSet::from_arrays(&[
        ([1, 16], [8, 9]),
        ([2, 7], [4, 5]),
        ([10, 15], [12, 13]),
        ([3, 14], [6, 11]),
    ])
}

/// Builds level `z + 1` from level `z`.
pub fn recursive_step(prev: &DefiningSet, z: u32) -> Result<DefiningSet> {
    let params = ConstructionParams::new(z)?;
    let t = params.t();
    if prev.t() as u64 != t || !prev.validate().is_partition() {
        return Err(Error::OutOfRange {
            what: "previous level",
            constraint: format!("level z={z} needs a partition of [1,{}] into {t} pairs", params.ranks()),
        });
    }
    let half: Rank = 5 << z;
    let mut pairs = Vec::with_capacity(2 * t as usize + 1);
    pairs.extend(prev.shifted(1));
    pairs.extend(prev.shifted(half - 1));
    pairs.push(CompanionPair::new([1, 2 * half - 4], [half - 2, half - 1]));
    Ok(DefiningSet::new(pairs))
}

/// Level `z` of the family, refusing more than [`DEFAULT_RANK_CAP`] ranks.
pub fn construct_for_z(z: u32) -> Result<DefiningSet> {
    construct_for_z_capped(z, DEFAULT_RANK_CAP)
}

pub fn construct_for_z_capped(z: u32, max_ranks: u64) -> Result<DefiningSet> {
    let params = ConstructionParams::new(z)?;
    if params.ranks() > max_ranks {
        return Err(Error::SizeRefused(format!(
            "level z={z} has {} ranks, above the cap of {max_ranks}",
            params.ranks()
        )));
    }
    let mut ds = base_case();
    for level in 2..z {
        ds = recursive_step(&ds, level)?;
    }
    Ok(ds)
}

/// `(3t − 2) / 2`.
pub fn lower_bound(t: u64) -> Ratio<i64> {
    Ratio::new(3 * t as i64 - 2, 2)
}

/// Smallest even integer not below [`lower_bound`]; worst cases are even.
pub fn lower_bound_even(t: u64) -> u64 {
    let ceil = lower_bound(t).ceil().to_integer().max(0) as u64;
    ceil + ceil % 2
}

/// `2^(z+1) − 2`.
pub fn upper_bound(z: u32) -> Result<u64> {
    let params = ConstructionParams::new(z)?;
    Ok((2u64 << params.z()) - 2)
}

/// `(8t − 2) / 5`, equal to [`upper_bound`] on the family.
pub fn upper_bound_in_t(t: u64) -> Ratio<i64> {
    Ratio::new(8 * t as i64 - 2, 5)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma1Report {
    pub z: u32,
    pub d_z: u64,
    pub d_z_plus_1: u64,
    /// `d_{z+1} <= 2 d_z + 2`.
    pub holds: bool,
}

/// Computes `d_z` and `d_{z+1}` exactly and checks the doubling recursion.
/// Both levels must fit the exhaustive envelope.
pub fn check_lemma1(z: u32) -> Result<Lemma1Report> {
    let next = ConstructionParams::new(z + 1)?;
    if next.ranks() > u64::from(EXHAUSTIVE_RANK_LIMIT) {
        return Err(Error::SizeRefused(format!(
            "exact d_{} needs {} ranks, above the exact limit of {}",
            z + 1,
            next.ranks(),
            EXHAUSTIVE_RANK_LIMIT
        )));
    }
    let exact = |level: u32| -> Result<u64> {
        let ds = construct_for_z(level)?;
        Ok(Adversary::new(&ds)?
            .strategy(Strategy::BranchAndBound)
            .run()?
            .worst_case)
    };
    let d_z = exact(z)?;
    let d_z_plus_1 = exact(z + 1)?;
    Ok(Lemma1Report {
        z,
        d_z,
        d_z_plus_1,
        holds: d_z_plus_1 <= 2 * d_z + 2,
    })
}
