//! Decision sets and lists: conversion and the bounded branching search for
//! minimum contrastive explanations, for single lists and list ensembles.

use crate::error::{Error, Result};
use crate::models::{Classifier, DecisionList, DecisionSet, Model};

/// One rule per term with the non-default class, then the default rule.
pub fn ds_to_dl(s: &DecisionSet) -> DecisionList {
    s.to_list()
}

/// The elements of a decision set or decision list ensemble as lists.
pub fn lists_of(m: &Model) -> Result<Vec<DecisionList>> {
    m.elements()
        .iter()
        .map(|x| match x {
            Model::Ds(s) => Ok(s.to_list()),
            Model::Dl(l) => Ok(l.clone()),
            _ => Err(Error::Invalid(
                "branching applies to decision sets and lists only".into(),
            )),
        })
        .collect()
}

/// Counters describing one branching run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BranchStats {
    /// Rule combinations that were explored.
    pub candidates: usize,
    /// Largest number of search-tree leaves below one candidate.
    pub max_leaves: usize,
    /// Sum of leaves over all candidates.
    pub total_leaves: usize,
}

/// Minimum set of at most `k` features whose flip changes the class the list
/// assigns to `e`.
pub fn dl_min_lcxp_branch(l: &DecisionList, e: &[bool], k: usize) -> Option<Vec<usize>> {
    dle_min_lcxp_branch_traced(std::slice::from_ref(l), e, k).0
}

pub fn dl_min_lcxp_branch_traced(
    l: &DecisionList,
    e: &[bool],
    k: usize,
) -> (Option<Vec<usize>>, BranchStats) {
    dle_min_lcxp_branch_traced(std::slice::from_ref(l), e, k)
}

/// Minimum set of at most `k` features whose flip changes the majority
/// class of `lists` on `e`.
pub fn dle_min_lcxp_branch(lists: &[DecisionList], e: &[bool], k: usize) -> Option<Vec<usize>> {
    dle_min_lcxp_branch_traced(lists, e, k).0
}

/// Tries every combination of one rule per list whose classes outvote the
/// current class. For each, the flips needed to satisfy the chosen terms are
/// forced, and then for every earlier rule that still fires one of its
/// remaining features is flipped, branching over the choice. Each candidate
/// explores at most `a^k` leaves where `a` is the largest term size.
pub fn dle_min_lcxp_branch_traced(
    lists: &[DecisionList],
    e: &[bool],
    k: usize,
) -> (Option<Vec<usize>>, BranchStats) {
    let n = e.len();
    let votes = |x: &[bool]| lists.iter().filter(|l| l.classify(x)).count();
    let class = 2 * votes(e) > lists.len();
    let mut stats = BranchStats::default();
    let mut best: Option<Vec<usize>> = None;
    let mut combo = vec![0usize; lists.len()];
    loop {
        if let Some(start) = candidate(lists, &combo, e, class) {
            stats.candidates += 1;
            let mut search = Search {
                lists,
                chosen: &combo,
                fixed: vec![false; n],
                current: e.to_vec(),
                flipped: Vec::new(),
                k,
                leaves: 0,
            };
            for (f, b) in start.iter().enumerate() {
                if let Some(b) = *b {
                    search.fixed[f] = true;
                    if b != e[f] {
                        search.current[f] = b;
                        search.flipped.push(f);
                    }
                }
            }
            let found = search.run();
            stats.max_leaves = stats.max_leaves.max(search.leaves);
            stats.total_leaves += search.leaves;
            if let Some(set) = found {
                if best.as_ref().is_none_or(|b| set.len() < b.len()) {
                    best = Some(set);
                }
            }
        }
        // Advance the odometer; the first list is the most significant digit.
        let mut i = lists.len();
        loop {
            if i == 0 {
                return (best, stats);
            }
            i -= 1;
            combo[i] += 1;
            if combo[i] < lists[i].rules.len() {
                break;
            }
            combo[i] = 0;
        }
    }
}

/// The joint assignment of the chosen terms, if they are consistent and
/// their classes outvote `class`.
fn candidate(
    lists: &[DecisionList],
    combo: &[usize],
    e: &[bool],
    class: bool,
) -> Option<Vec<Option<bool>>> {
    let against = lists
        .iter()
        .zip(combo)
        .filter(|(l, &j)| l.rules[j].class != class)
        .count();
    if 2 * against <= lists.len() {
        return None;
    }
    let mut assign = vec![None; e.len()];
    for (l, &j) in lists.iter().zip(combo) {
        for lit in &l.rules[j].term.literals {
            match assign[lit.feature] {
                Some(b) if b != lit.value => return None,
                _ => assign[lit.feature] = Some(lit.value),
            }
        }
    }
    Some(assign)
}

struct Search<'a> {
    lists: &'a [DecisionList],
    chosen: &'a [usize],
    /// Features mentioned by the chosen terms; never flipped by branching.
    fixed: Vec<bool>,
    current: Vec<bool>,
    flipped: Vec<usize>,
    k: usize,
    leaves: usize,
}

impl Search<'_> {
    fn run(&mut self) -> Option<Vec<usize>> {
        if self.flipped.len() > self.k {
            self.leaves += 1;
            return None;
        }
        let blocking = self.lists.iter().zip(self.chosen).find_map(|(l, &j)| {
            l.rules[..j]
                .iter()
                .find(|r| r.term.satisfied_by(&self.current))
        });
        let Some(rule) = blocking else {
            self.leaves += 1;
            let mut set = self.flipped.clone();
            set.sort_unstable();
            return Some(set);
        };
        let mut branch: Vec<usize> = rule
            .term
            .features()
            .filter(|&f| !self.fixed[f] && !self.flipped.contains(&f))
            .collect();
        branch.sort_unstable();
        branch.dedup();
        if branch.is_empty() || self.flipped.len() + 1 > self.k {
            self.leaves += 1;
            return None;
        }
        let mut best: Option<Vec<usize>> = None;
        for f in branch {
            self.current[f] = !self.current[f];
            self.flipped.push(f);
            let found = self.run();
            self.flipped.pop();
            self.current[f] = !self.current[f];
            if let Some(set) = found {
                if best.as_ref().is_none_or(|b| set.len() < b.len()) {
                    best = Some(set);
                }
            }
        }
        best
    }
}

/// Decision list semantics helper for ensembles given as lists.
pub fn lists_classify(lists: &[DecisionList], e: &[bool]) -> bool {
    2 * lists.iter().filter(|l| l.classify(e)).count() > lists.len()
}

