//! Polynomial-time explanation routines for single decision trees, the
//! bounded search for small witnesses, and product constructions.

use crate::error::{Error, Result};
use crate::explain::{assignments, local_fixing, Combinations, Kind, Query, Witness};
use crate::models::{
    Classifier, DecisionTree, DtBuilder, DtNode, Ensemble, Model, Obdd, ObddBuilder, T0, T1,
};

/// Decides whether `w` explains `q` on `t` by restricting the tree and
/// looking at the leaf labels that remain reachable.
pub fn dt_check(t: &DecisionTree, q: &Query, w: &Witness) -> Result<bool> {
    q.validate(t)?;
    Ok(match (q.kind, w) {
        (Kind::LocalAbductive, Witness::Features(s)) => {
            let e = q.expect_example();
            let c = t.classify(e);
            !t.reachable_classes(&local_fixing(e, s, false))[!c as usize]
        }
        (Kind::LocalContrastive, Witness::Features(s)) => {
            let e = q.expect_example();
            let c = t.classify(e);
            t.reachable_classes(&local_fixing(e, s, true))[!c as usize]
        }
        (Kind::GlobalAbductive, Witness::Assignment(tau)) => {
            !t.reachable_classes(tau.values())[!q.expect_class() as usize]
        }
        (Kind::GlobalContrastive, Witness::Assignment(tau)) => {
            !t.reachable_classes(tau.values())[q.expect_class() as usize]
        }
        _ => {
            return Err(Error::Invalid(format!(
                "witness shape does not fit a {} query",
                q.kind
            )))
        }
    })
}

/// Smallest set of features whose flip changes the class of `e`: the
/// disagreement set of the closest leaf with the other label. Ties go to the
/// lexicographically smallest set.
pub fn dt_min_lcxp(t: &DecisionTree, e: &[bool]) -> Option<Vec<usize>> {
    let c = t.classify(e);
    t.leaf_paths()
        .into_iter()
        .filter(|p| p.class != c && p.is_consistent())
        .map(|p| {
            let mut set: Vec<usize> = p
                .literals
                .iter()
                .filter(|l| e[l.feature] != l.value)
                .map(|l| l.feature)
                .collect();
            set.sort_unstable();
            set.dedup();
            set
        })
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
}

/// A subset-minimal explanation: seeded from a valid witness and shrunk by
/// dropping features in ascending order while the witness stays valid.
/// Contrastive local queries are answered with the cardinality-minimal set.
pub fn dt_subset_min(t: &DecisionTree, q: &Query) -> Result<Option<Witness>> {
    q.validate(t)?;
    let seed = match q.kind {
        Kind::LocalContrastive => {
            return Ok(dt_min_lcxp(t, q.expect_example()).map(Witness::Features));
        }
        Kind::LocalAbductive => Witness::Features((0..t.num_features()).collect()),
        Kind::GlobalAbductive | Kind::GlobalContrastive => {
            let want = q.expect_class() == (q.kind == Kind::GlobalAbductive);
            match t.leaf_paths().into_iter().find(|p| p.class == want && p.is_consistent()) {
                Some(p) => Witness::Assignment(crate::models::PartialExample::from_pairs(
                    t.num_features(),
                    p.literals.iter().map(|l| (l.feature, l.value)),
                )),
                None => return Ok(None),
            }
        }
    };
    shrink(seed, |w| dt_check(t, q, w)).map(Some)
}

/// Greedy deletion in ascending feature order.
pub(crate) fn shrink(
    mut w: Witness,
    mut valid: impl FnMut(&Witness) -> Result<bool>,
) -> Result<Witness> {
    let features: Vec<usize> = match &w {
        Witness::Features(s) => s.clone(),
        Witness::Assignment(t) => t.domain(),
    };
    for f in features {
        let candidate = match &w {
            Witness::Features(s) => Witness::Features(s.iter().copied().filter(|&g| g != f).collect()),
            Witness::Assignment(t) => Witness::Assignment(t.without(f)),
        };
        if valid(&candidate)? {
            w = candidate;
        }
    }
    Ok(w)
}

/// Enumerates candidate witnesses of size at most the query budget in the
/// oracle's order and returns the first valid one, so results are minimum
/// cardinality and identical to the oracle's.
pub fn xp_search(
    n: usize,
    q: &Query,
    mut valid: impl FnMut(&Witness) -> Result<bool>,
) -> Result<Option<Witness>> {
    let limit = q.budget.unwrap_or(n).min(n);
    for size in 0..=limit {
        for set in Combinations::new(n, size) {
            if q.kind.is_local() {
                let w = Witness::Features(set);
                if valid(&w)? {
                    return Ok(Some(w));
                }
            } else {
                for tau in assignments(n, &set) {
                    let w = Witness::Assignment(tau);
                    if valid(&w)? {
                        return Ok(Some(w));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Cardinality-minimal explanation within the budget for a single tree,
/// `n^O(k)` checks.
pub fn dt_xp_search(t: &DecisionTree, q: &Query) -> Result<Option<Witness>> {
    q.validate(t)?;
    xp_search(t.num_features(), q, |w| dt_check(t, q, w))
}

/// A single tree equivalent to a tree ensemble, built by replacing every leaf
/// of element `i` with a copy of element `i + 1` and labelling the final
/// leaves by majority. The result is not simplified. Fails if it would exceed
/// `cap` nodes.
pub fn dt_ensemble_to_dt(ens: &Ensemble, cap: usize) -> Result<DecisionTree> {
    let trees: Vec<&DecisionTree> = ens
        .elements()
        .iter()
        .map(|m| match m {
            Model::Dt(t) => Ok(t),
            _ => Err(Error::MixedEnsemble),
        })
        .collect::<Result<_>>()?;
    let leaves: usize = trees
        .iter()
        .try_fold(1usize, |acc, t| acc.checked_mul(t.size()))
        .filter(|&l| l <= cap)
        .ok_or(Error::BudgetExceeded { cap })?;
    if 2 * leaves - 1 > cap {
        return Err(Error::BudgetExceeded { cap });
    }
    let mut b = DtBuilder::new();
    let threshold = ens.threshold();
    let root = graft(&trees, 0, trees[0].root(), 0, threshold, &mut b);
    b.build(ens.feature_names().to_vec(), root)
}

fn graft(
    trees: &[&DecisionTree],
    i: usize,
    v: usize,
    ones: usize,
    threshold: usize,
    b: &mut DtBuilder,
) -> usize {
    match trees[i].nodes()[v] {
        DtNode::Inner { feature, zero, one } => {
            let z = graft(trees, i, zero, ones, threshold, b);
            let o = graft(trees, i, one, ones, threshold, b);
            b.inner(feature, z, o)
        }
        DtNode::Leaf(c) => {
            let ones = ones + c as usize;
            if i + 1 == trees.len() {
                b.leaf(ones >= threshold)
            } else {
                graft(trees, i + 1, trees[i + 1].root(), ones, threshold, b)
            }
        }
    }
}

/// Converts a tree that respects `order` (or an inferred order) into a
/// complete diagram by identifying equally labelled leaves.
pub fn dt_to_obdd(t: &DecisionTree, order: Option<Vec<usize>>) -> Result<Obdd> {
    let t = t.simplify();
    let order = match order {
        Some(o) => o,
        None => t
            .infer_order()
            .ok_or_else(|| Error::NotOrdered("tree admits no feature order".into()))?,
    };
    if !t.respects_order(&order) {
        return Err(Error::NotOrdered(
            "tree tests features against the given order".into(),
        ));
    }
    let mut b = ObddBuilder::new();
    let mut ids = vec![usize::MAX; t.nodes().len()];
    // Children precede parents in a post-order walk.
    let mut stack = vec![(t.root(), false)];
    while let Some((v, expanded)) = stack.pop() {
        match t.nodes()[v] {
            DtNode::Leaf(c) => ids[v] = if c { T1 } else { T0 },
            DtNode::Inner { feature, zero, one } => {
                if expanded {
                    ids[v] = b.inner(feature, ids[zero], ids[one]);
                } else {
                    stack.push((v, true));
                    stack.push((one, false));
                    stack.push((zero, false));
                }
            }
        }
    }
    Ok(b.build(t.feature_names().to_vec(), ids[t.root()], order)?
        .complete())
}
