//! Exhaustive search for optimal balanced defining sets at small `t`.
//!
//! A balanced pair with sorted ranks `l1 < l2 < l3 < l4` must pair
//! `{l1, l4}` against `{l2, l3}` with `l4 = l2 + l3 − l1`. Enumeration always
//! opens a pair at the smallest unused rank, so every balanced defining set is
//! produced exactly once in canonical form (odd set holds the pair minimum,
//! pairs ordered by minimum). Reflection is not quotiented out.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::adversary::Adversary;
use crate::companion::{CompanionPair, DefiningSet, Rank};
use crate::error::{Error, Result};

/// Largest `t` searched without an explicit override.
pub const SEARCH_T_LIMIT: usize = 6;

const CHUNK: usize = 4096;

/// Canonical balanced defining sets over `t`, in lexicographic order of the
/// `(l2, l3)` choices.
pub fn enumerate_balanced(t: usize) -> BalancedIter {
    BalancedIter::new(t)
}

#[derive(Debug, Clone)]
pub struct BalancedIter {
    t: usize,
    ranks: Rank,
    used: Vec<bool>,
    /// `(l1, l2, l3)` of each open pair.
    frames: Vec<(Rank, Rank, Rank)>,
    started: bool,
    done: bool,
}

impl BalancedIter {
    fn new(t: usize) -> Self {
        let ranks = 4 * t as Rank;
        BalancedIter {
            t,
            ranks,
            used: vec![false; ranks as usize + 1],
            frames: Vec::with_capacity(t),
            started: false,
            done: t == 0,
        }
    }

    /// First `(l2, l3)` after `after` that completes a balanced pair with `l1`.
    fn next_choice(&self, l1: Rank, after: Option<(Rank, Rank)>) -> Option<(Rank, Rank)> {
        let (mut l2, mut l3) = match after {
            Some((a, b)) => (a, b + 1),
            None => (l1 + 1, l1 + 2),
        };
        loop {
            if l3 <= l2 {
                l3 = l2 + 1;
            }
            // l4 = l2 + l3 - l1 must stay within range.
            if l2 + l2 + 1 > self.ranks + l1 {
                return None;
            }
            if self.used[l2 as usize] || l2 + l3 > self.ranks + l1 {
                l2 += 1;
                l3 = l2 + 1;
                continue;
            }
            let l4 = l2 + l3 - l1;
            if !self.used[l3 as usize] && !self.used[l4 as usize] {
                return Some((l2, l3));
            }
            l3 += 1;
        }
    }

    fn mark(&mut self, (l1, l2, l3): (Rank, Rank, Rank), value: bool) {
        for r in [l1, l2, l3, l2 + l3 - l1] {
            self.used[r as usize] = value;
        }
    }

    fn push(&mut self, frame: (Rank, Rank, Rank)) {
        self.mark(frame, true);
        self.frames.push(frame);
    }

    fn smallest_free(&self) -> Rank {
        (1..=self.ranks).find(|&r| !self.used[r as usize]).unwrap_or(0)
    }

    /// Extends to a full set, backtracking as needed.
    fn descend(&mut self) -> bool {
        while self.frames.len() < self.t {
            let l1 = self.smallest_free();
            match self.next_choice(l1, None) {
                Some((l2, l3)) => self.push((l1, l2, l3)),
                None => {
                    if !self.backtrack() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Moves the deepest frame that has a further choice to that choice.
    fn backtrack(&mut self) -> bool {
        while let Some(frame) = self.frames.pop() {
            self.mark(frame, false);
            let (l1, l2, l3) = frame;
            if let Some((n2, n3)) = self.next_choice(l1, Some((l2, l3))) {
                self.push((l1, n2, n3));
                return true;
            }
        }
        false
    }

    fn current(&self) -> DefiningSet {
        DefiningSet::new(
            self.frames
                .iter()
                .map(|&(l1, l2, l3)| CompanionPair::new([l1, l2 + l3 - l1], [l2, l3]))
                .collect(),
        )
    }
}

impl Iterator for BalancedIter {
    type Item = DefiningSet;

    fn next(&mut self) -> Option<DefiningSet> {
        if self.done {
            return None;
        }
        let found = if self.started {
            self.backtrack() && self.descend()
        } else {
            self.started = true;
            self.descend()
        };
        if found {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

/// Number of canonical balanced defining sets over `t`.
pub fn count_balanced(t: usize) -> u64 {
    enumerate_balanced(t).count() as u64
}

/// A random balanced defining set (canonical form), drawn by randomized
/// backtracking. Not uniform over all sets.
pub fn sample_balanced<R: Rng + ?Sized>(t: usize, rng: &mut R) -> DefiningSet {
    fn fill<R: Rng + ?Sized>(
        used: &mut [bool],
        ranks: Rank,
        left: usize,
        out: &mut Vec<CompanionPair>,
        rng: &mut R,
    ) -> bool {
        if left == 0 {
            return true;
        }
        let l1 = (1..=ranks).find(|&r| !used[r as usize]).unwrap_or(0);
        let mut choices = Vec::new();
        for l2 in l1 + 1..=ranks {
            for l3 in l2 + 1..=ranks {
                let l4 = l2 + l3 - l1;
                if l4 > ranks {
                    break;
                }
                if !used[l2 as usize] && !used[l3 as usize] && !used[l4 as usize] {
                    choices.push((l2, l3, l4));
                }
            }
        }
        choices.shuffle(rng);
        for (l2, l3, l4) in choices {
            for r in [l1, l2, l3, l4] {
                used[r as usize] = true;
            }
            out.push(CompanionPair::new([l1, l4], [l2, l3]));
            if fill(used, ranks, left - 1, out, rng) {
                return true;
            }
            out.pop();
            for r in [l1, l2, l3, l4] {
                used[r as usize] = false;
            }
        }
        false
    }

    let ranks = 4 * t as Rank;
    let mut used = vec![false; ranks as usize + 1];
    let mut pairs = Vec::with_capacity(t);
    let ok = fill(&mut used, ranks, t, &mut pairs, rng);
    debug_assert!(ok, "consecutive blocks always complete");
    DefiningSet::new(pairs)
}

/// Limits on a search. An exhausted budget yields an uncertified result.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub time: Option<Duration>,
    pub max_candidates: Option<u64>,
    /// Allow `t` above [`SEARCH_T_LIMIT`].
    pub force: bool,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub t: usize,
    /// Minimum worst case over the candidates examined.
    pub d_star: u64,
    /// Every examined candidate attaining `d_star`, in enumeration order.
    pub optima: Vec<DefiningSet>,
    /// Number of orbits of `optima` under `x ↦ 4t + 1 − x`.
    pub reflection_classes: usize,
    pub candidates_examined: u64,
    pub wall_time: Duration,
    /// True only when the enumeration ran to completion.
    pub certified: bool,
}

/// Minimizes the exact worst case over all canonical balanced defining sets.
///
/// Candidates are evaluated in parallel chunks; each adversary run abandons as
/// soon as it beats the best worst case found so far, so only candidates that
/// could still be optimal are evaluated to the end.
pub fn find_optimal(t: usize, budget: Budget) -> Result<SearchResult> {
    if t == 0 {
        return Err(Error::OutOfRange {
            what: "t",
            constraint: "t must be at least 1".into(),
        });
    }
    if t > SEARCH_T_LIMIT && !budget.force {
        return Err(Error::SizeRefused(format!(
            "full search at t={t} exceeds the limit t <= {SEARCH_T_LIMIT}"
        )));
    }
    let started = Instant::now();
    let incumbent = AtomicU64::new(u64::MAX);
    let mut kept: Vec<(u64, DefiningSet)> = Vec::new();
    let mut examined = 0u64;
    let mut certified = true;
    let mut iter = enumerate_balanced(t);

    loop {
        let mut chunk: Vec<DefiningSet> = iter.by_ref().take(CHUNK).collect();
        if let Some(cap) = budget.max_candidates {
            let room = cap.saturating_sub(examined) as usize;
            if chunk.len() > room {
                chunk.truncate(room);
                certified = false;
            }
        }
        if chunk.is_empty() {
            break;
        }
        let evaluated: Vec<Option<u64>> = chunk
            .par_iter()
            .map(|ds| -> Result<Option<u64>> {
                let adv = Adversary::new(ds)?.parallel(false);
                let cutoff = incumbent.load(Ordering::Relaxed);
                Ok(adv.run_with_cutoff(cutoff)?.map(|r| {
                    incumbent.fetch_min(r.worst_case, Ordering::Relaxed);
                    r.worst_case
                }))
            })
            .collect::<Result<_>>()?;
        examined += chunk.len() as u64;
        let threshold = incumbent.load(Ordering::Relaxed);
        kept.extend(
            chunk
                .into_iter()
                .zip(evaluated)
                .filter_map(|(ds, w)| w.filter(|&w| w <= threshold).map(|w| (w, ds))),
        );
        if !certified {
            break;
        }
        if let Some(limit) = budget.time {
            if started.elapsed() >= limit {
                certified = iter.next().is_none();
                break;
            }
        }
    }

    let d_star = incumbent.load(Ordering::Relaxed);
    let optima: Vec<DefiningSet> = kept
        .into_iter()
        .filter(|(w, _)| *w == d_star)
        .map(|(_, ds)| ds)
        .collect();
    let reflection_classes = reflection_classes(&optima);
    Ok(SearchResult {
        t,
        d_star,
        optima,
        reflection_classes,
        candidates_examined: examined,
        wall_time: started.elapsed(),
        certified,
    })
}

/// Number of orbits under reflection among canonical sets.
pub fn reflection_classes(sets: &[DefiningSet]) -> usize {
    let mut seen: HashSet<DefiningSet> = HashSet::new();
    let mut classes = 0;
    for ds in sets {
        if seen.contains(ds) {
            continue;
        }
        classes += 1;
        seen.insert(ds.clone());
        seen.insert(ds.reflect().canonical());
    }
    classes
}
