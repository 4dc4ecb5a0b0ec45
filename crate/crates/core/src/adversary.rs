//! Exact worst-case adversary.
//!
//! The allowed swap sets over `[1, n]` are the matchings of the path graph on
//! `n` vertices, so there are `F(n + 1)` of them. They are visited depth first
//! in lexicographic order of their sorted lower endpoints (a proper prefix
//! first), and the per-pair differences are updated in `O(1)` as swaps are
//! placed and removed.
//!
//! Among all maximizers the reported one has the fewest swaps, ties going to
//! the first in visiting order. Parallel runs split the tree by the swaps
//! placed on the first `k` positions and reduce with the same total order,
//! so the answer does not depend on scheduling.

use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::companion::{DefiningSet, Rank, SwapSet};
use crate::error::{Error, Result};

/// Exhaustive enumeration is refused above this many ranks unless forced
/// (`F(41)` is about `1.65e8`).
pub const EXHAUSTIVE_RANK_LIMIT: Rank = 40;

/// Positions fixed per parallel task prefix.
const PREFIX_POSITIONS: Rank = 14;

/// Below this many ranks parallel runs fall back to a single walk.
const PARALLEL_MIN_RANKS: Rank = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Exhaustive,
    #[default]
    BranchAndBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryResult {
    pub worst_case: u64,
    pub minimal_maximizer: SwapSet,
    /// Number of distinct swap sets attaining `worst_case`.
    pub maximizer_count: u64,
    /// Swap sets evaluated (pruned subtrees are not counted).
    pub enumerated: u64,
}

/// `F(n)` with `F(1) = F(2) = 1`.
pub fn fibonacci(n: u32) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..n {
        let next = a + b;
        a = b;
        b = next;
    }
    a
}

/// Number of allowed swap sets over `t`, `F(4t + 1)`.
pub fn swap_set_count(t: usize) -> u128 {
    fibonacci(4 * t as u32 + 1)
}

/// Every matching of the path on `[1, 4t]`, once each, in visiting order.
pub fn enumerate_swap_sets(t: usize) -> SwapSetIter {
    SwapSetIter::over_ranks(4 * t as Rank)
}

/// Iterator over the matchings of a path.
#[derive(Debug, Clone)]
pub struct SwapSetIter {
    ranks: Rank,
    lowers: Vec<Rank>,
    started: bool,
    done: bool,
}

impl SwapSetIter {
    pub fn over_ranks(ranks: Rank) -> Self {
        SwapSetIter {
            ranks,
            lowers: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        let next = self.lowers.last().map_or(1, |&x| x + 2);
        if next < self.ranks {
            self.lowers.push(next);
            return true;
        }
        while let Some(x) = self.lowers.pop() {
            if x + 2 <= self.ranks {
                self.lowers.push(x + 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for SwapSetIter {
    type Item = SwapSet;

    fn next(&mut self) -> Option<SwapSet> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(SwapSet::from_sorted_lowers_unchecked(&self.lowers))
    }
}

/// Best swap set seen so far under the (value desc, size asc, order asc)
/// ordering.
#[derive(Debug, Clone)]
struct Incumbent {
    value: i64,
    lowers: Vec<Rank>,
    count: u64,
}

impl Incumbent {
    fn none() -> Self {
        Incumbent {
            value: -1,
            lowers: Vec::new(),
            count: 0,
        }
    }

    fn merge(self, other: Incumbent) -> Incumbent {
        use std::cmp::Ordering::*;
        match self.value.cmp(&other.value) {
            Greater => self,
            Less => other,
            Equal => {
                let count = self.count + other.count;
                let keep_self = (self.lowers.len(), &self.lowers) <= (other.lowers.len(), &other.lowers);
                let mut best = if keep_self { self } else { other };
                best.count = count;
                best
            }
        }
    }
}

/// Read-only tables shared by every walk over one defining set.
struct Tables {
    ranks: Rank,
    /// `slots[r] = (pair, sign of r's side)`.
    slots: Vec<(usize, i64)>,
    /// Upper bound on the gain of the swap with lower endpoint `i`.
    gain: Vec<i64>,
    /// `suffix[i]`: best total gain from swaps with lower endpoints `>= i`.
    suffix: Vec<i64>,
    pairs: usize,
}

impl Tables {
    fn new(ds: &DefiningSet) -> Result<Self> {
        let layout = ds.layout()?;
        let ranks = ds.ranks();
        let mut slots = vec![(0usize, 0i64); ranks as usize + 2];
        for r in 1..=ranks {
            let (p, side) = layout.locate(r);
            slots[r as usize] = (p, side.sign());
        }
        let mut gain = vec![0i64; ranks as usize + 3];
        for i in 1..ranks {
            let (p1, side1) = layout.locate(i);
            let (p2, side2) = layout.locate(i + 1);
            // Both ranks in one set: the sums do not move.
            gain[i as usize] = if p1 == p2 && side1 == side2 { 0 } else { 2 };
        }
        let mut suffix = vec![0i64; ranks as usize + 3];
        for i in (1..ranks as usize).rev() {
            suffix[i] = suffix[i + 1].max(gain[i] + suffix[i + 2]);
        }
        Ok(Tables {
            ranks,
            slots,
            gain,
            suffix,
            pairs: ds.t(),
        })
    }
}

#[derive(Clone, Copy)]
enum Mode {
    /// Track the best swap set.
    Best,
    /// Collect every swap set with exactly this value.
    Collect(i64),
}

struct Walker<'a> {
    tables: &'a Tables,
    diff: Vec<i64>,
    total: i64,
    chosen: Vec<Rank>,
    best: Incumbent,
    floor: i64,
    prune: bool,
    mode: Mode,
    cutoff: Option<i64>,
    abort: &'a AtomicBool,
    enumerated: u64,
    collected: Vec<Vec<Rank>>,
}

struct Undo {
    p1: usize,
    old1: i64,
    p2: usize,
    old2: i64,
    total: i64,
}

impl<'a> Walker<'a> {
    fn new(tables: &'a Tables, abort: &'a AtomicBool) -> Self {
        Walker {
            tables,
            diff: vec![0; tables.pairs],
            total: 0,
            chosen: Vec::new(),
            best: Incumbent::none(),
            floor: -1,
            prune: false,
            mode: Mode::Best,
            cutoff: None,
            abort,
            enumerated: 0,
            collected: Vec::new(),
        }
    }

    #[inline]
    fn place(&mut self, i: Rank) -> Undo {
        let (p1, s1) = self.tables.slots[i as usize];
        let (p2, s2) = self.tables.slots[i as usize + 1];
        let undo = Undo {
            p1,
            old1: self.diff[p1],
            p2,
            old2: self.diff[p2],
            total: self.total,
        };
        // The set holding i now holds i + 1, and the other way round.
        self.diff[p1] += s1;
        self.diff[p2] -= s2;
        if p1 == p2 {
            self.total += self.diff[p1].abs() - undo.old1.abs();
        } else {
            self.total += self.diff[p1].abs() - undo.old1.abs() + self.diff[p2].abs() - undo.old2.abs();
        }
        self.chosen.push(i);
        undo
    }

    #[inline]
    fn undo(&mut self, u: Undo) {
        self.diff[u.p2] = u.old2;
        self.diff[u.p1] = u.old1;
        self.total = u.total;
        self.chosen.pop();
    }

    fn consider(&mut self) {
        let value = self.total;
        if let Some(cutoff) = self.cutoff {
            if value > cutoff {
                self.abort.store(true, AtomicOrdering::Relaxed);
                return;
            }
        }
        match self.mode {
            Mode::Collect(target) => {
                if value == target {
                    self.collected.push(self.chosen.clone());
                }
            }
            Mode::Best => {
                if value > self.best.value {
                    self.best = Incumbent {
                        value,
                        lowers: self.chosen.clone(),
                        count: 1,
                    };
                    self.floor = self.floor.max(value);
                } else if value == self.best.value {
                    self.best.count += 1;
                    if self.chosen.len() < self.best.lowers.len() {
                        self.best.lowers.clone_from(&self.chosen);
                    }
                }
            }
        }
    }

    fn visit(&mut self, start: Rank) {
        if self.abort.load(AtomicOrdering::Relaxed) {
            return;
        }
        self.enumerated += 1;
        self.consider();
        let ranks = self.tables.ranks;
        let mut i = start;
        while i < ranks {
            if self.prune {
                let suffix = &self.tables.suffix;
                if self.total + suffix[i as usize] < self.floor {
                    break;
                }
                if self.total + self.tables.gain[i as usize] + suffix[i as usize + 2] < self.floor {
                    i += 1;
                    continue;
                }
            }
            let u = self.place(i);
            self.visit(i + 2);
            self.undo(u);
            i += 1;
        }
    }
}

/// Exact worst-case evaluation for one balanced defining set.
pub struct Adversary<'a> {
    ds: &'a DefiningSet,
    tables: Tables,
    strategy: Strategy,
    parallel: bool,
    force_exhaustive: bool,
}

/// Outcome of one (possibly parallel) walk of the whole tree.
struct Walk {
    best: Incumbent,
    enumerated: u64,
    collected: Vec<Vec<Rank>>,
    aborted: bool,
}

impl<'a> Adversary<'a> {
    /// Fails unless `ds` is a balanced defining set.
    pub fn new(ds: &'a DefiningSet) -> Result<Self> {
        ds.require_balanced()?;
        Ok(Adversary {
            ds,
            tables: Tables::new(ds)?,
            strategy: Strategy::default(),
            parallel: true,
            force_exhaustive: false,
        })
    }

    pub fn strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn force_exhaustive(mut self, force: bool) -> Self {
        self.force_exhaustive = force;
        self
    }

    pub fn defining_set(&self) -> &DefiningSet {
        self.ds
    }

    /// The exact worst case and a minimal maximizer.
    pub fn run(&self) -> Result<AdversaryResult> {
        self.check_envelope()?;
        let walk = self.walk(Mode::Best, None);
        Ok(self.finish(walk))
    }

    /// Like [`run`](Self::run), but gives up with `None` as soon as some swap
    /// set exceeds `cutoff`.
    pub fn run_with_cutoff(&self, cutoff: u64) -> Result<Option<AdversaryResult>> {
        self.check_envelope()?;
        let walk = self.walk(Mode::Best, Some(i64::try_from(cutoff).unwrap_or(i64::MAX)));
        if walk.aborted {
            return Ok(None);
        }
        Ok(Some(self.finish(walk)))
    }

    /// Every swap set attaining the worst case, in visiting order.
    pub fn maximizers(&self) -> Result<Vec<SwapSet>> {
        let worst = self.run()?.worst_case as i64;
        let walk = self.walk(Mode::Collect(worst), None);
        Ok(walk
            .collected
            .iter()
            .map(|l| SwapSet::from_sorted_lowers_unchecked(l))
            .collect())
    }

    fn check_envelope(&self) -> Result<()> {
        if self.strategy == Strategy::Exhaustive && !self.force_exhaustive && self.tables.ranks > EXHAUSTIVE_RANK_LIMIT
        {
            return Err(Error::SizeRefused(format!(
                "exhaustive enumeration over {} ranks exceeds the limit of {}; \
                 use branch and bound or force it",
                self.tables.ranks, EXHAUSTIVE_RANK_LIMIT
            )));
        }
        Ok(())
    }

    fn finish(&self, walk: Walk) -> AdversaryResult {
        let best = walk.best;
        debug_assert!(best.value >= 0);
        AdversaryResult {
            worst_case: best.value as u64,
            minimal_maximizer: SwapSet::from_sorted_lowers_unchecked(&best.lowers),
            maximizer_count: best.count,
            enumerated: walk.enumerated,
        }
    }

    /// Value of a left-to-right greedy swap set: a sound starting floor.
    fn greedy_floor(&self) -> i64 {
        let abort = AtomicBool::new(false);
        let mut w = Walker::new(&self.tables, &abort);
        let mut i = 1;
        while i < self.tables.ranks {
            let before = w.total;
            let u = w.place(i);
            if w.total > before {
                i += 2;
            } else {
                w.undo(u);
                i += 1;
            }
        }
        w.total
    }

    fn configure<'w>(&'w self, abort: &'w AtomicBool, mode: Mode, cutoff: Option<i64>, floor: i64) -> Walker<'w> {
        let mut w = Walker::new(&self.tables, abort);
        w.mode = mode;
        w.cutoff = cutoff;
        match mode {
            Mode::Collect(target) => {
                w.prune = true;
                w.floor = target;
            }
            Mode::Best => {
                w.prune = self.strategy == Strategy::BranchAndBound;
                w.floor = floor;
            }
        }
        w
    }

    fn walk(&self, mode: Mode, cutoff: Option<i64>) -> Walk {
        let abort = AtomicBool::new(false);
        let floor = match (mode, self.strategy) {
            (Mode::Best, Strategy::BranchAndBound) => self.greedy_floor(),
            _ => -1,
        };
        if let (Mode::Best, Some(cutoff)) = (mode, cutoff) {
            if floor > cutoff {
                return Walk {
                    best: Incumbent::none(),
                    enumerated: 0,
                    collected: Vec::new(),
                    aborted: true,
                };
            }
        }
        let ranks = self.tables.ranks;
        if !self.parallel || ranks < PARALLEL_MIN_RANKS {
            let mut w = self.configure(&abort, mode, cutoff, floor);
            w.visit(1);
            return Walk {
                best: w.best,
                enumerated: w.enumerated,
                collected: w.collected,
                aborted: abort.load(AtomicOrdering::Relaxed),
            };
        }

        let k = PREFIX_POSITIONS.min(ranks - 1);
        let prefixes: Vec<Vec<Rank>> = SwapSetIter::over_ranks(k + 1).map(|s| s.lowers()).collect();
        let parts: Vec<Walk> = prefixes
            .par_iter()
            .map(|prefix| {
                let mut w = self.configure(&abort, mode, cutoff, floor);
                for &i in prefix {
                    w.place(i);
                }
                let start = prefix.last().map_or(k + 1, |&x| (x + 2).max(k + 1));
                w.visit(start);
                Walk {
                    best: w.best,
                    enumerated: w.enumerated,
                    collected: w.collected,
                    aborted: false,
                }
            })
            .collect();
        let mut out = Walk {
            best: Incumbent::none(),
            enumerated: 0,
            collected: Vec::new(),
            aborted: abort.load(AtomicOrdering::Relaxed),
        };
        // Prefix order is visiting order, so concatenation keeps collected
        // sets ordered.
        for p in parts {
            out.best = out.best.merge(p.best);
            out.enumerated += p.enumerated;
            out.collected.extend(p.collected);
        }
        out.collected.sort();
        out
    }
}

/// Worst case with the default parallel settings.
pub fn worst_case(ds: &DefiningSet, strategy: Strategy) -> Result<AdversaryResult> {
    Adversary::new(ds)?.strategy(strategy).run()
}

/// Checks `worst_case = 2|I*|` and that dropping any single swap of `I*`
/// lowers the discrepancy by exactly 2.
pub fn minimal_maximizer_property(ds: &DefiningSet, res: &AdversaryResult) -> bool {
    let swaps = &res.minimal_maximizer;
    if res.worst_case != 2 * swaps.len() as u64 {
        return false;
    }
    match ds.discrepancy(swaps) {
        Ok(d) if d == res.worst_case => {}
        _ => return false,
    }
    swaps
        .iter()
        .all(|s| ds.discrepancy(&swaps.without(s)).is_ok_and(|d| d + 2 == res.worst_case))
}
