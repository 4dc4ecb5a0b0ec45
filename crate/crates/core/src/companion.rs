//! Companion pairs, defining sets, adjacent swap sets and the discrepancy
//! functional.
//!
//! A defining set over parameter `t` is an ordered list of `t` companion
//! pairs whose `4t` ranks partition `[1, 4t]`. Each pair holds an odd set and
//! an even set of two ranks each; it is balanced when both sums agree. A swap
//! `(i, i + 1)` exchanges the set membership of two adjacent ranks, and a swap
//! set is a matching of the path `1 - 2 - ... - 4t`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A popularity rank. Members of a defining set over `t` lie in `[1, 4t]`.
pub type Rank = u32;

/// Which of the two sets of a companion pair a rank belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Odd,
    Even,
}

impl Side {
    /// Sign of this side in `Σ(odd) − Σ(even)`.
    #[inline]
    pub fn sign(self) -> i64 {
        match self {
            Side::Odd => 1,
            Side::Even => -1,
        }
    }
}

/// Two disjoint 2-element rank sets. Each 2-set is stored in ascending order;
/// the odd/even roles are kept as given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompanionPair {
    odd: [Rank; 2],
    even: [Rank; 2],
}

fn sorted2([a, b]: [Rank; 2]) -> [Rank; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

impl CompanionPair {
    pub fn new(odd: [Rank; 2], even: [Rank; 2]) -> Self {
        CompanionPair {
            odd: sorted2(odd),
            even: sorted2(even),
        }
    }

    pub fn odd(&self) -> [Rank; 2] {
        self.odd
    }

    pub fn even(&self) -> [Rank; 2] {
        self.even
    }

    pub fn odd_sum(&self) -> u64 {
        self.odd.iter().map(|&r| u64::from(r)).sum()
    }

    pub fn even_sum(&self) -> u64 {
        self.even.iter().map(|&r| u64::from(r)).sum()
    }

    /// `Σ(odd) − Σ(even)`.
    pub fn difference(&self) -> i64 {
        self.odd_sum() as i64 - self.even_sum() as i64
    }

    pub fn is_balanced(&self) -> bool {
        self.odd_sum() == self.even_sum()
    }

    pub fn min_rank(&self) -> Rank {
        self.odd[0].min(self.even[0])
    }

    /// All four ranks in ascending order.
    pub fn sorted_ranks(&self) -> [Rank; 4] {
        let mut r = [self.odd[0], self.odd[1], self.even[0], self.even[1]];
        r.sort_unstable();
        r
    }

    pub fn contains(&self, rank: Rank) -> bool {
        self.side_of(rank).is_some()
    }

    pub fn side_of(&self, rank: Rank) -> Option<Side> {
        if self.odd.contains(&rank) {
            Some(Side::Odd)
        } else if self.even.contains(&rank) {
            Some(Side::Even)
        } else {
            None
        }
    }

    /// Swaps the odd/even roles.
    pub fn flipped(&self) -> Self {
        CompanionPair {
            odd: self.even,
            even: self.odd,
        }
    }

    /// The odd set holds the minimum of the four ranks.
    pub fn canonical(&self) -> Self {
        if self.odd[0] < self.even[0] {
            *self
        } else {
            self.flipped()
        }
    }

    pub fn map(&self, f: impl Fn(Rank) -> Rank) -> Self {
        CompanionPair::new([f(self.odd[0]), f(self.odd[1])], [f(self.even[0]), f(self.even[1])])
    }

    pub fn shifted(&self, by: Rank) -> Self {
        self.map(|r| r + by)
    }

    /// Change of `Σ(odd) − Σ(even)` when the swap `(lower, lower + 1)` is
    /// applied to this pair in isolation.
    pub fn swap_effect(&self, lower: Rank) -> i64 {
        let up = self.side_of(lower).map_or(0, Side::sign);
        let down = self.side_of(lower + 1).map_or(0, Side::sign);
        up - down
    }
}

impl fmt::Display for CompanionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({{{},{}}},{{{},{}}})",
            self.odd[0], self.odd[1], self.even[0], self.even[1]
        )
    }
}

/// One adjacent transposition `(lower, lower + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Swap(Rank);

impl Swap {
    /// Builds `(i, j)`, rejecting anything that is not `j = i + 1`.
    pub fn new(i: Rank, j: Rank) -> Result<Self> {
        if j != i.wrapping_add(1) || i == 0 {
            return Err(Error::InvalidSwapSet(format!(
                "({i},{j}) is not an adjacent swap (i, i+1) with i >= 1"
            )));
        }
        Ok(Swap(i))
    }

    pub fn at(lower: Rank) -> Self {
        Swap(lower)
    }

    pub fn lower(self) -> Rank {
        self.0
    }

    pub fn upper(self) -> Rank {
        self.0 + 1
    }
}

impl fmt::Display for Swap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.0 + 1)
    }
}

/// A set of pairwise-disjoint adjacent swaps, kept sorted by lower endpoint.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SwapSet {
    swaps: Vec<Swap>,
}

impl SwapSet {
    pub fn empty() -> Self {
        SwapSet::default()
    }

    /// Builds a swap set, rejecting repeated or overlapping swaps.
    pub fn new(swaps: impl IntoIterator<Item = Swap>) -> Result<Self> {
        let mut swaps: Vec<Swap> = swaps.into_iter().collect();
        swaps.sort_unstable();
        for w in swaps.windows(2) {
            if w[1].lower() < w[0].lower() + 2 {
                return Err(Error::InvalidSwapSet(format!(
                    "swaps {} and {} share rank {}",
                    w[0],
                    w[1],
                    w[1].lower()
                )));
            }
        }
        Ok(SwapSet { swaps })
    }

    /// Builds from `(i, i + 1)` tuples.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Rank, Rank)>) -> Result<Self> {
        let swaps = pairs
            .into_iter()
            .map(|(i, j)| Swap::new(i, j))
            .collect::<Result<Vec<_>>>()?;
        SwapSet::new(swaps)
    }

    /// Builds from lower endpoints.
    pub fn from_lowers(lowers: impl IntoIterator<Item = Rank>) -> Result<Self> {
        SwapSet::new(lowers.into_iter().map(Swap::at))
    }

    /// Internal constructor for lower endpoints already sorted and disjoint.
    pub(crate) fn from_sorted_lowers_unchecked(lowers: &[Rank]) -> Self {
        debug_assert!(lowers.windows(2).all(|w| w[1] >= w[0] + 2));
        SwapSet {
            swaps: lowers.iter().copied().map(Swap).collect(),
        }
    }

    /// Checks every swap lies inside `[1, 4t]`.
    pub fn check_range(&self, t: usize) -> Result<()> {
        let n = 4 * t as u64;
        match self.swaps.iter().find(|s| s.lower() == 0 || u64::from(s.upper()) > n) {
            Some(s) => Err(Error::InvalidSwapSet(format!("swap {s} lies outside [1,{n}]"))),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Swap> + '_ {
        self.swaps.iter().copied()
    }

    pub fn contains(&self, swap: Swap) -> bool {
        self.swaps.binary_search(&swap).is_ok()
    }

    pub fn lowers(&self) -> Vec<Rank> {
        self.swaps.iter().map(|s| s.lower()).collect()
    }

    pub fn without(&self, swap: Swap) -> SwapSet {
        SwapSet {
            swaps: self.swaps.iter().copied().filter(|&s| s != swap).collect(),
        }
    }

    /// Image under `x ↦ 4t + 1 − x`.
    pub fn reflect(&self, t: usize) -> SwapSet {
        let n = 4 * t as Rank;
        let mut swaps: Vec<Swap> = self.swaps.iter().map(|s| Swap(n - s.lower())).collect();
        swaps.sort_unstable();
        SwapSet { swaps }
    }

    /// Order used to break ties between maximizers: lexicographic on the
    /// sorted lower endpoints, a proper prefix sorting first.
    pub fn enumeration_cmp(&self, other: &SwapSet) -> Ordering {
        self.swaps.cmp(&other.swaps)
    }
}

impl fmt::Display for SwapSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, s) in self.swaps.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// A constraint broken by a candidate defining set. Pair indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoPairs,
    PairCount { declared: usize, found: usize },
    RankOutOfRange { pair: usize, rank: Rank },
    RepeatedRank { rank: Rank },
    MissingRank { rank: Rank },
    Unbalanced { pair: usize, odd_sum: u64, even_sum: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPairs => write!(f, "defining set has no pairs"),
            Violation::PairCount { declared, found } => {
                write!(f, "declared t={declared} but {found} pairs given")
            }
            Violation::RankOutOfRange { pair, rank } => {
                write!(f, "pair {pair}: rank {rank} out of range")
            }
            Violation::RepeatedRank { rank } => write!(f, "rank {rank} repeated"),
            Violation::MissingRank { rank } => write!(f, "rank {rank} missing"),
            Violation::Unbalanced {
                pair,
                odd_sum,
                even_sum,
            } => write!(f, "pair {pair} unbalanced ({odd_sum} != {even_sum})"),
        }
    }
}

/// Outcome of [`DefiningSet::validate`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when only balance violations were found.
    pub fn is_partition(&self) -> bool {
        self.violations
            .iter()
            .all(|v| matches!(v, Violation::Unbalanced { .. }))
    }
}

/// Where each rank lives: `locate(r)` gives the 0-based pair index and side.
#[derive(Debug, Clone)]
pub struct RankLayout {
    slots: Vec<(usize, Side)>,
}

impl RankLayout {
    /// Number of ranks, `4t`.
    pub fn ranks(&self) -> Rank {
        (self.slots.len() - 1) as Rank
    }

    #[inline]
    pub fn locate(&self, rank: Rank) -> (usize, Side) {
        self.slots[rank as usize]
    }

    #[inline]
    pub fn pair_of(&self, rank: Rank) -> usize {
        self.slots[rank as usize].0
    }
}

/// An ordered list of companion pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DefiningSet {
    t: usize,
    pairs: Vec<CompanionPair>,
}

impl DefiningSet {
    /// `t` is taken from the number of pairs.
    pub fn new(pairs: Vec<CompanionPair>) -> Self {
        DefiningSet { t: pairs.len(), pairs }
    }

    /// Keeps a declared `t` that may disagree with the pair count; the
    /// validator reports the mismatch.
    pub fn with_declared_t(t: usize, pairs: Vec<CompanionPair>) -> Self {
        DefiningSet { t, pairs }
    }

    /// Convenience constructor from `(odd, even)` arrays.
    pub fn from_arrays(pairs: &[([Rank; 2], [Rank; 2])]) -> Self {
        DefiningSet::new(pairs.iter().map(|&(o, e)| CompanionPair::new(o, e)).collect())
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn ranks(&self) -> Rank {
        4 * self.t as Rank
    }

    pub fn pairs(&self) -> &[CompanionPair] {
        &self.pairs
    }

    pub fn pair(&self, index: usize) -> &CompanionPair {
        &self.pairs[index]
    }

    /// Checks cardinality, partition of `[1, 4t]` and balance. Never fails;
    /// violations are returned as data.
    pub fn validate(&self) -> Validation {
        let mut violations = Vec::new();
        if self.pairs.is_empty() {
            violations.push(Violation::NoPairs);
        }
        if self.t != self.pairs.len() {
            violations.push(Violation::PairCount {
                declared: self.t,
                found: self.pairs.len(),
            });
        }
        let n = 4 * self.pairs.len() as Rank;
        let mut seen = vec![0u32; n as usize + 1];
        for (k, p) in self.pairs.iter().enumerate() {
            for r in p.odd.iter().chain(p.even.iter()).copied() {
                if r == 0 || r > n {
                    violations.push(Violation::RankOutOfRange { pair: k + 1, rank: r });
                } else {
                    seen[r as usize] += 1;
                }
            }
        }
        for r in 1..=n {
            match seen[r as usize] {
                0 => violations.push(Violation::MissingRank { rank: r }),
                1 => {}
                _ => violations.push(Violation::RepeatedRank { rank: r }),
            }
        }
        for (k, p) in self.pairs.iter().enumerate() {
            if !p.is_balanced() {
                violations.push(Violation::Unbalanced {
                    pair: k + 1,
                    odd_sum: p.odd_sum(),
                    even_sum: p.even_sum(),
                });
            }
        }
        Validation { violations }
    }

    pub fn is_balanced(&self) -> bool {
        self.validate().is_ok()
    }

    /// Rank locations. Fails unless the pairs partition `[1, 4t]`.
    pub fn layout(&self) -> Result<RankLayout> {
        let v = self.validate();
        if !v.is_partition() {
            return Err(Error::InvalidDefiningSet(v.violations));
        }
        let mut slots = vec![(usize::MAX, Side::Odd); self.ranks() as usize + 1];
        for (k, p) in self.pairs.iter().enumerate() {
            for &r in &p.odd {
                slots[r as usize] = (k, Side::Odd);
            }
            for &r in &p.even {
                slots[r as usize] = (k, Side::Even);
            }
        }
        Ok(RankLayout { slots })
    }

    /// Fails unless the set is a balanced partition.
    pub fn require_balanced(&self) -> Result<()> {
        let v = self.validate();
        if v.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidDefiningSet(v.violations))
        }
    }

    /// Exchanges the set membership of `i` and `i + 1` for every swap.
    pub fn apply_swaps(&self, swaps: &SwapSet) -> Result<DefiningSet> {
        self.layout()?;
        swaps.check_range(self.t)?;
        let mut image: Vec<Rank> = (0..=self.ranks()).collect();
        for s in swaps.iter() {
            image[s.lower() as usize] = s.upper();
            image[s.upper() as usize] = s.lower();
        }
        Ok(DefiningSet {
            t: self.t,
            pairs: self.pairs.iter().map(|p| p.map(|r| image[r as usize])).collect(),
        })
    }

    /// Total discrepancy `Σ_i |Σ(S'_{2i-1}) − Σ(S'_{2i})|` after the swaps.
    pub fn discrepancy(&self, swaps: &SwapSet) -> Result<u64> {
        Ok(self.apply_swaps(swaps)?.total_imbalance())
    }

    /// Discrepancy of the sets as they stand.
    pub fn total_imbalance(&self) -> u64 {
        self.pairs.iter().map(|p| p.difference().unsigned_abs()).sum()
    }

    /// Each pair in canonical role order, pairs sorted by their minimum.
    pub fn canonical(&self) -> DefiningSet {
        let mut pairs: Vec<CompanionPair> = self.pairs.iter().map(CompanionPair::canonical).collect();
        pairs.sort_by_key(CompanionPair::min_rank);
        DefiningSet { t: self.t, pairs }
    }

    /// Image under `x ↦ 4t + 1 − x`, pair order kept.
    pub fn reflect(&self) -> DefiningSet {
        let m = self.ranks() + 1;
        DefiningSet {
            t: self.t,
            pairs: self.pairs.iter().map(|p| p.map(|r| m - r)).collect(),
        }
    }

    /// Every pair shifted by `by`.
    pub fn shifted(&self, by: Rank) -> Vec<CompanionPair> {
        self.pairs.iter().map(|p| p.shifted(by)).collect()
    }

    pub fn rank_set(&self) -> BTreeSet<Rank> {
        self.pairs
            .iter()
            .flat_map(|p| p.odd.into_iter().chain(p.even))
            .collect()
    }
}

impl fmt::Display for DefiningSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.pairs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Structural form of a balanced pair with sorted ranks `l1 < l2 < l3 < l4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairType {
    /// `{a, a+b, a+b+1, a+2b+1}`, `b >= 2`.
    Type1 { a: Rank, b: Rank },
    /// `{a, a+b, a+b+c, a+2b+c}`, `b, c > 1`.
    Type2 { a: Rank, b: Rank, c: Rank },
    /// `{a, a+1, a+1+b, a+2+b}`, `b >= 1`.
    Type3 { a: Rank, b: Rank },
}

impl PairType {
    pub fn number(&self) -> u8 {
        match self {
            PairType::Type1 { .. } => 1,
            PairType::Type2 { .. } => 2,
            PairType::Type3 { .. } => 3,
        }
    }
}

impl fmt::Display for PairType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairType::Type1 { a, b } => write!(f, "type 1 (a={a}, b={b})"),
            PairType::Type2 { a, b, c } => write!(f, "type 2 (a={a}, b={b}, c={c})"),
            PairType::Type3 { a, b } => write!(f, "type 3 (a={a}, b={b})"),
        }
    }
}

/// Classifies a balanced pair. The `l2 − l1 = 1` branch is tested first, so
/// the run `{a, a+1, a+2, a+3}` is type 3.
pub fn classify_pair(pair: &CompanionPair) -> Result<PairType> {
    let [l1, l2, l3, l4] = pair.sorted_ranks();
    if !pair.is_balanced() || l1 == l2 || l2 == l3 || l3 == l4 {
        return Err(Error::UnbalancedPair(*pair));
    }
    debug_assert_eq!(l2 - l1, l4 - l3);
    Ok(if l2 - l1 == 1 {
        PairType::Type3 { a: l1, b: l3 - l2 }
    } else if l3 - l2 == 1 {
        PairType::Type1 { a: l1, b: l2 - l1 }
    } else {
        PairType::Type2 {
            a: l1,
            b: l2 - l1,
            c: l3 - l2,
        }
    })
}

/// One candidate swap in a swap group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSwap {
    /// Lower endpoint; `0` stands for the virtual swap `(0, 1)`.
    pub lower: Rank,
    /// An endpoint lies outside `[1, 4t]`.
    pub boundary: bool,
    /// Shares a rank with another swap of the same group.
    pub overlap: bool,
}

impl GroupSwap {
    pub fn upper(&self) -> Rank {
        self.lower + 1
    }
}

/// The two coherent swap families around a type 1 or type 2 pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapGroups {
    pub group_a: Vec<GroupSwap>,
    pub group_b: Vec<GroupSwap>,
}

impl SwapGroups {
    pub fn lowers_a(&self) -> Vec<Rank> {
        self.group_a.iter().map(|g| g.lower).collect()
    }

    pub fn lowers_b(&self) -> Vec<Rank> {
        self.group_b.iter().map(|g| g.lower).collect()
    }
}

fn flag_group(lowers: &[Rank], ranks: Rank) -> Vec<GroupSwap> {
    lowers
        .iter()
        .enumerate()
        .map(|(k, &lower)| GroupSwap {
            lower,
            boundary: lower == 0 || lower + 1 > ranks,
            overlap: lowers
                .iter()
                .enumerate()
                .any(|(j, &other)| j != k && other.abs_diff(lower) <= 1),
        })
        .collect()
}

/// Swaps grouped by the direction in which they push `Σ(odd) − Σ(even)` of
/// `pair`. `t` decides which swaps are flagged as boundary swaps.
pub fn swap_groups(pair: &CompanionPair, t: usize) -> Result<SwapGroups> {
    let ranks = 4 * t as Rank;
    let (a, b) = match classify_pair(pair)? {
        PairType::Type1 { a, b } => (vec![a - 1, a + b + 1, a + 2 * b], vec![a, a + b - 1, a + 2 * b + 1]),
        PairType::Type2 { a, b, c } => (
            vec![a - 1, a + b, a + b + c, a + 2 * b + c - 1],
            vec![a, a + b - 1, a + b + c - 1, a + 2 * b + c],
        ),
        PairType::Type3 { .. } => return Err(Error::Type3Pair),
    };
    Ok(SwapGroups {
        group_a: flag_group(&a, ranks),
        group_b: flag_group(&b, ranks),
    })
}
