use std::collections::BTreeMap;

use balset_core::optsearch::SearchResult;
use balset_core::{CompanionPair, DefiningSet, Rank, Swap, SwapSet};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::Failure;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDocument {
    pub odd: [Rank; 2],
    pub even: [Rank; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefiningSetDocument {
    pub t: usize,
    pub pairs: Vec<PairDocument>,
}

impl DefiningSetDocument {
    pub fn from_set(ds: &DefiningSet) -> Self {
        DefiningSetDocument {
            t: ds.t(),
            pairs: ds
                .pairs()
                .iter()
                .map(|p| PairDocument {
                    odd: p.odd(),
                    even: p.even(),
                })
                .collect(),
        }
    }

    /// The set as written, without validation.
    pub fn to_set(&self) -> DefiningSet {
        let pairs = self.pairs.iter().map(|p| CompanionPair::new(p.odd, p.even)).collect();
        DefiningSet::with_declared_t(self.t, pairs)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Invalid(format!("defining set document: {e}")))
    }

    /// Parses and requires a balanced partition of `[1, 4t]`.
    pub fn parse_balanced(text: &str) -> Result<DefiningSet, Failure> {
        let ds = Self::parse(text)?.to_set();
        ds.require_balanced()?;
        Ok(ds)
    }

    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("document serializes");
        format!("sha256:{}", hex::encode(Sha256::digest(&bytes)))
    }
}

/// A swaps file is a JSON array of `[i, i+1]`; an empty file means no swaps.
pub fn parse_swaps(text: &str, t: usize) -> Result<SwapSet, Failure> {
    if text.trim().is_empty() {
        return Ok(SwapSet::empty());
    }
    let raw: Vec<[Rank; 2]> =
        serde_json::from_str(text).map_err(|e| Failure::Invalid(format!("swaps document: {e}")))?;
    let swaps = raw
        .iter()
        .map(|&[i, j]| Swap::new(i, j))
        .collect::<Result<Vec<_>, _>>()
        .and_then(SwapSet::new)
        .map_err(Failure::from)?;
    swaps.check_range(t)?;
    Ok(swaps)
}

pub fn swaps_json(swaps: &SwapSet) -> Vec<[Rank; 2]> {
    swaps.iter().map(|s| [s.lower(), s.upper()]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    /// `(3t − 2) / 2` as `"p/q"`.
    pub lower: String,
    /// `2^(z+1) − 2` when `t` belongs to the recursive family.
    pub upper: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckOutcome {
    pub holds: bool,
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub input_digest: String,
    pub worst_case: Option<u64>,
    pub minimal_maximizer: Option<Vec<[Rank; 2]>>,
    pub bounds: Bounds,
    pub checks: BTreeMap<String, CheckOutcome>,
    pub tool_version: String,
}

impl CertificateDocument {
    pub fn all_hold(&self) -> bool {
        self.checks.values().all(|c| c.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationDocument {
    pub t: usize,
    pub samples: usize,
    pub seed: u64,
    /// Per check: instances on which it held.
    pub checks: BTreeMap<String, PopulationCheck>,
    /// Certificates of the instances where some check failed.
    pub failures: Vec<CertificateDocument>,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationCheck {
    pub holds: bool,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchDocument {
    pub t: usize,
    pub d_star: u64,
    pub optima: Vec<DefiningSetDocument>,
    pub reflection_classes: usize,
    pub candidates_examined: u64,
    pub certified: bool,
}

impl SearchDocument {
    pub fn from_result(r: &SearchResult) -> Self {
        SearchDocument {
            t: r.t,
            d_star: r.d_star,
            optima: r.optima.iter().map(DefiningSetDocument::from_set).collect(),
            reflection_classes: r.reflection_classes,
            candidates_examined: r.candidates_examined,
            certified: r.certified,
        }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}
