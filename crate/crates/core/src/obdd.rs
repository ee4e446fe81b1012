//! Explanation routines for single diagrams and the product construction for
//! ensembles of diagrams that share one order.

use std::collections::{HashMap, VecDeque};

use crate::dt::{shrink, xp_search};
use crate::error::{Error, Result};
use crate::explain::{local_fixing, Kind, Query, Witness};
use crate::models::{Classifier, Ensemble, Model, Obdd, ObddBuilder, ObddNode, PartialExample, T0, T1};

/// Decides whether `w` explains `q` on `o` via sink reachability under the
/// assignment the witness fixes.
pub fn obdd_check(o: &Obdd, q: &Query, w: &Witness) -> Result<bool> {
    q.validate(o)?;
    Ok(match (q.kind, w) {
        (Kind::LocalAbductive, Witness::Features(s)) => {
            let e = q.expect_example();
            let c = o.classify(e);
            !o.reachable_sinks(&local_fixing(e, s, false))[!c as usize]
        }
        (Kind::LocalContrastive, Witness::Features(s)) => {
            let e = q.expect_example();
            let c = o.classify(e);
            o.reachable_sinks(&local_fixing(e, s, true))[!c as usize]
        }
        (Kind::GlobalAbductive, Witness::Assignment(tau)) => {
            !o.reachable_sinks(tau.values())[!q.expect_class() as usize]
        }
        (Kind::GlobalContrastive, Witness::Assignment(tau)) => {
            !o.reachable_sinks(tau.values())[q.expect_class() as usize]
        }
        _ => {
            return Err(Error::Invalid(format!(
                "witness shape does not fit a {} query",
                q.kind
            )))
        }
    })
}

/// Smallest set of features whose flip changes the class of `e`: a shortest
/// path to the other sink where arcs that disagree with `e` cost one. Among
/// all minimum sets the lexicographically smallest is returned, found by
/// deciding features in index order with one shortest-path run each.
pub fn obdd_min_lcxp(o: &Obdd, e: &[bool]) -> Option<Vec<usize>> {
    let target = if o.classify(e) { T0 } else { T1 };
    let o = o.complete();
    let mut forced = vec![None; o.num_features()];
    let best = flip_distance(&o, e, target, &forced)?;
    let mut set = Vec::new();
    for f in 0..o.num_features() {
        forced[f] = Some(true);
        if flip_distance(&o, e, target, &forced) == Some(best) {
            set.push(f);
        } else {
            forced[f] = Some(false);
        }
    }
    Some(set)
}

/// Fewest flips on a source-to-`target` path. `forced[f]` requires
/// (`Some(true)`) or forbids (`Some(false)`) flipping `f`.
fn flip_distance(o: &Obdd, e: &[bool], target: usize, forced: &[Option<bool>]) -> Option<usize> {
    let nodes = o.nodes();
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes.len()];
    for (v, node) in nodes.iter().enumerate() {
        if let ObddNode::Inner { feature, zero, one } = *node {
            for (c, value) in [(zero, false), (one, true)] {
                let flip = e[feature] != value;
                if forced[feature].is_none_or(|must| must == flip) {
                    preds[c].push((v, flip as usize));
                }
            }
        }
    }
    let mut dist = vec![usize::MAX; nodes.len()];
    let mut queue = VecDeque::from([target]);
    dist[target] = 0;
    while let Some(v) = queue.pop_front() {
        for &(u, w) in &preds[v] {
            let d = dist[v] + w;
            if d < dist[u] {
                dist[u] = d;
                if w == 0 {
                    queue.push_front(u);
                } else {
                    queue.push_back(u);
                }
            }
        }
    }
    (dist[o.source()] != usize::MAX).then_some(dist[o.source()])
}

/// A subset-minimal explanation; see [`crate::dt::dt_subset_min`] for the
/// seeding and shrinking scheme. Global seeds come from a shortest path to
/// the wanted sink, 0-arcs tried first.
pub fn obdd_subset_min(o: &Obdd, q: &Query) -> Result<Option<Witness>> {
    q.validate(o)?;
    let seed = match q.kind {
        Kind::LocalContrastive => {
            return Ok(obdd_min_lcxp(o, q.expect_example()).map(Witness::Features));
        }
        Kind::LocalAbductive => Witness::Features((0..o.num_features()).collect()),
        Kind::GlobalAbductive | Kind::GlobalContrastive => {
            let want = q.expect_class() == (q.kind == Kind::GlobalAbductive);
            match path_to(o, if want { T1 } else { T0 }) {
                Some(tau) => Witness::Assignment(tau),
                None => return Ok(None),
            }
        }
    };
    shrink(seed, |w| obdd_check(o, q, w)).map(Some)
}

/// Breadth-first shortest path from the source to `sink`, as the partial
/// example it reads.
fn path_to(o: &Obdd, sink: usize) -> Option<PartialExample> {
    let nodes = o.nodes();
    let mut parent: Vec<Option<(usize, bool)>> = vec![None; nodes.len()];
    let mut seen = vec![false; nodes.len()];
    let mut queue = VecDeque::from([o.source()]);
    seen[o.source()] = true;
    while let Some(v) = queue.pop_front() {
        if v == sink {
            let mut tau = PartialExample::new(o.num_features());
            let mut u = v;
            while let Some((p, b)) = parent[u] {
                if let ObddNode::Inner { feature, .. } = nodes[p] {
                    tau.set(feature, Some(b));
                }
                u = p;
            }
            return Some(tau);
        }
        if let ObddNode::Inner { zero, one, .. } = nodes[v] {
            for (c, b) in [(zero, false), (one, true)] {
                if !std::mem::replace(&mut seen[c], true) {
                    parent[c] = Some((v, b));
                    queue.push_back(c);
                }
            }
        }
    }
    None
}

/// Cardinality-minimal explanation within the budget, `n^O(k)` checks.
pub fn obdd_xp_search(o: &Obdd, q: &Query) -> Result<Option<Witness>> {
    q.validate(o)?;
    xp_search(o.num_features(), q, |w| obdd_check(o, q, w))
}

/// A single diagram equivalent to a diagram ensemble with a shared order.
/// States are tuples of element nodes; at each state the elements whose
/// current node tests the earliest feature move together, and all-sink
/// tuples become the majority sink. Only reachable states are built, and the
/// result is completed. Fails if more than `cap` nodes would be needed.
pub fn obdd_ensemble_product(ens: &Ensemble, cap: usize) -> Result<Obdd> {
    let Some(order) = ens.shared_order() else {
        return Err(Error::NotOrdered("ensemble has no shared order".into()));
    };
    let diagrams: Vec<&Obdd> = ens
        .elements()
        .iter()
        .map(|m| match m {
            Model::Obdd(o) => Ok(o),
            _ => Err(Error::MixedEnsemble),
        })
        .collect::<Result<_>>()?;
    let n = ens.num_features();
    let mut level = vec![0; n];
    for (i, &f) in order.iter().enumerate() {
        level[f] = i;
    }
    let threshold = ens.threshold();
    let start: Vec<usize> = diagrams.iter().map(|o| o.source()).collect();

    // Discover states breadth first; remember each state's successors.
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut states: Vec<Vec<usize>> = Vec::new();
    let mut arcs: Vec<Option<(usize, usize, usize)>> = Vec::new();
    index.insert(start.clone(), 0);
    states.push(start);
    let mut next = 0;
    while next < states.len() {
        let tuple = states[next].clone();
        next += 1;
        let tested = tuple
            .iter()
            .zip(&diagrams)
            .filter_map(|(&v, o)| match o.nodes()[v] {
                ObddNode::Inner { feature, .. } => Some(feature),
                ObddNode::Sink(_) => None,
            })
            .min_by_key(|&f| level[f]);
        let Some(f) = tested else {
            arcs.push(None);
            continue;
        };
        let mut child = |b: bool| -> Result<usize> {
            let t: Vec<usize> = tuple
                .iter()
                .zip(&diagrams)
                .map(|(&v, o)| match o.nodes()[v] {
                    ObddNode::Inner { feature, zero, one } if feature == f => {
                        if b {
                            one
                        } else {
                            zero
                        }
                    }
                    _ => v,
                })
                .collect();
            if let Some(&id) = index.get(&t) {
                return Ok(id);
            }
            if states.len() + 2 > cap {
                return Err(Error::BudgetExceeded { cap });
            }
            index.insert(t.clone(), states.len());
            states.push(t);
            Ok(states.len() - 1)
        };
        let z = child(false)?;
        let o = child(true)?;
        arcs.push(Some((f, z, o)));
    }

    // Allocate diagram nodes children first so ids stay valid.
    let mut b = ObddBuilder::new();
    let mut ids = vec![usize::MAX; states.len()];
    let mut stack = vec![(0usize, false)];
    while let Some((s, expanded)) = stack.pop() {
        if ids[s] != usize::MAX {
            continue;
        }
        match arcs[s] {
            None => {
                let ones = states[s].iter().filter(|&&v| v == T1).count();
                ids[s] = if ones >= threshold { T1 } else { T0 };
            }
            Some((f, z, o)) => {
                if expanded {
                    ids[s] = b.inner(f, ids[z], ids[o]);
                } else {
                    stack.push((s, true));
                    stack.push((o, false));
                    stack.push((z, false));
                }
            }
        }
    }
    let product = b.build(ens.feature_names().to_vec(), ids[0], order.to_vec())?;
    let product = product.complete();
    if product.nodes().len() > cap {
        return Err(Error::BudgetExceeded { cap });
    }
    Ok(product)
}

/// Searches for an example with at most `max_ones` ones that the ensemble
/// classifies as `class`. Features are fixed in index order; a branch is cut
/// as soon as too few elements can still reach the wanted sink.
pub fn find_example_with_class(
    ens: &Ensemble,
    class: bool,
    max_ones: usize,
) -> Result<Option<PartialExample>> {
    let diagrams: Vec<&Obdd> = ens
        .elements()
        .iter()
        .map(|m| match m {
            Model::Obdd(o) => Ok(o),
            _ => Err(Error::MixedEnsemble),
        })
        .collect::<Result<_>>()?;
    let need = if class {
        ens.threshold()
    } else {
        diagrams.len() - ens.threshold() + 1
    };
    let n = ens.num_features();
    let mut tau = vec![None; n];
    let found = search(&diagrams, class, need, max_ones, 0, &mut tau);
    Ok(found.then(|| PartialExample::from_pairs(n, tau.iter().enumerate().filter_map(|(f, v)| v.map(|b| (f, b))))))
}

fn search(
    diagrams: &[&Obdd],
    class: bool,
    need: usize,
    ones_left: usize,
    f: usize,
    tau: &mut Vec<Option<bool>>,
) -> bool {
    let can = diagrams
        .iter()
        .filter(|o| o.reachable_sinks(tau)[class as usize])
        .count();
    if can < need {
        return false;
    }
    if f == tau.len() {
        return true;
    }
    for b in [false, true] {
        if b && ones_left == 0 {
            continue;
        }
        tau[f] = Some(b);
        if search(diagrams, class, need, ones_left - b as usize, f + 1, tau) {
            return true;
        }
    }
    tau[f] = None;
    false
}
