//! Deterministic generators for the reduction families: each turns a small
//! combinatorial instance (a multicoloured graph, a set family, a DNF) into a
//! model whose explanation or homogeneity properties encode the answer.

use std::collections::{HashMap, HashSet};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::explain::{Kind, Minimality, Query};
use crate::models::{
    Classifier, DecisionSet, DecisionTree, DtBuilder, DtNode, Ensemble, Example, Literal, Model,
    Obdd, ObddBuilder, ObddNode, Term, T0, T1,
};
use crate::obdd::obdd_ensemble_product;

/// Default cap on the clique size accepted by [`gen_mcc_gaxp_dt`], whose
/// output grows with `2^k`.
pub const DEFAULT_GAXP_K_CAP: usize = 10;

/// A graph with a proper colouring into `k` non-empty parts. Vertices keep
/// their input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MccInstance {
    names: Vec<String>,
    part_of: Vec<usize>,
    parts: Vec<Vec<usize>>,
    adj: Vec<Vec<bool>>,
    edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct VertexSpec {
    name: String,
    part: usize,
}

/// JSON shape: either `{"vertices": [{"name", "part"}], "edges": [[u, v]]}`
/// or `{"parts": [[names...]], "edges": [[u, v]]}`.
#[derive(Deserialize)]
struct GraphSpec {
    #[serde(default)]
    vertices: Option<Vec<VertexSpec>>,
    #[serde(default)]
    parts: Option<Vec<Vec<String>>>,
    #[serde(default)]
    edges: Vec<(String, String)>,
}

impl MccInstance {
    pub fn new(vertices: Vec<(String, usize)>, edges: &[(String, String)]) -> Result<Self> {
        let n = vertices.len();
        let k = vertices.iter().map(|v| v.1 + 1).max().unwrap_or(0);
        let mut parts = vec![Vec::new(); k];
        let mut index = HashMap::new();
        for (i, (name, part)) in vertices.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Invalid(format!("vertex `{name}` listed twice")));
            }
            parts[*part].push(i);
        }
        if let Some(i) = parts.iter().position(Vec::is_empty) {
            return Err(Error::Invalid(format!("part {i} is empty")));
        }
        let mut adj = vec![vec![false; n]; n];
        let mut edge_list = Vec::new();
        for (u, v) in edges {
            let a = *index
                .get(u)
                .ok_or_else(|| Error::Invalid(format!("unknown vertex `{u}`")))?;
            let b = *index
                .get(v)
                .ok_or_else(|| Error::Invalid(format!("unknown vertex `{v}`")))?;
            if vertices[a].1 == vertices[b].1 {
                return Err(Error::Invalid(format!(
                    "edge {u}-{v} joins two vertices of the same part"
                )));
            }
            if !adj[a][b] {
                adj[a][b] = true;
                adj[b][a] = true;
                edge_list.push((a.min(b), a.max(b)));
            }
        }
        edge_list.sort_unstable();
        Ok(MccInstance {
            names: vertices.iter().map(|v| v.0.clone()).collect(),
            part_of: vertices.iter().map(|v| v.1).collect(),
            parts,
            adj,
            edges: edge_list,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let spec: GraphSpec = serde_json::from_value(value.clone())?;
        let vertices = match (spec.vertices, spec.parts) {
            (Some(vs), None) => vs.into_iter().map(|v| (v.name, v.part)).collect(),
            (None, Some(ps)) => ps
                .into_iter()
                .enumerate()
                .flat_map(|(i, p)| p.into_iter().map(move |v| (v, i)))
                .collect(),
            _ => {
                return Err(Error::Parse(
                    "graph needs exactly one of `vertices` or `parts`".into(),
                ))
            }
        };
        MccInstance::new(vertices, &spec.edges)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn part(&self, i: usize) -> &[usize] {
        &self.parts[i]
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Vertex pairs `(a, b)`, `a < b`, that are not adjacent.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| !self.adj[a][b])
            .collect()
    }

    /// A clique with one vertex per part, found by exhaustive search.
    pub fn find_clique(&self) -> Option<Vec<usize>> {
        fn go(g: &MccInstance, i: usize, chosen: &mut Vec<usize>) -> bool {
            if i == g.k() {
                return true;
            }
            for &v in g.part(i) {
                if chosen.iter().all(|&u| g.adjacent(u, v)) {
                    chosen.push(v);
                    if go(g, i + 1, chosen) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        let mut chosen = Vec::new();
        go(self, 0, &mut chosen).then_some(chosen)
    }

    fn vertex_features(&self) -> Vec<String> {
        self.names.iter().map(|v| format!("f_{v}")).collect()
    }
}

fn check_k(g: &MccInstance, k: Option<usize>) -> Result<usize> {
    match k {
        Some(k) if k != g.k() => Err(Error::Invalid(format!(
            "k = {k} but the graph has {} parts",
            g.k()
        ))),
        _ => Ok(g.k()),
    }
}

/// Builds the ordered tree accepting exactly `examples`. Each example lists
/// one value per entry of `features`, which also fixes the test order.
pub fn dt_from_examples(
    examples: &[Vec<bool>],
    features: &[usize],
    universe: Vec<String>,
) -> Result<DecisionTree> {
    let n = features.len();
    for ex in examples {
        if ex.len() != n {
            return Err(Error::ExampleLength {
                expected: n,
                got: ex.len(),
            });
        }
    }
    let mut nodes = vec![DtNode::Leaf(false)];
    for ex in examples {
        let mut v = 0;
        let mut depth = 0;
        while let DtNode::Inner { zero, one, .. } = nodes[v] {
            v = if ex[depth] { one } else { zero };
            depth += 1;
        }
        if nodes[v] == DtNode::Leaf(true) {
            continue;
        }
        // Hang the chain accepting `ex` below the leaf it currently reaches.
        let mut current = v;
        for j in depth..n {
            nodes.push(DtNode::Leaf(false));
            let other = nodes.len() - 1;
            nodes.push(DtNode::Leaf(j + 1 == n));
            let next = nodes.len() - 1;
            let (zero, one) = if ex[j] { (other, next) } else { (next, other) };
            nodes[current] = DtNode::Inner {
                feature: features[j],
                zero,
                one,
            };
            current = next;
        }
        nodes[current] = DtNode::Leaf(true);
    }
    DecisionTree::new(universe, nodes, 0)
}

/// Copies `t` into `b`, letting `on_leaf` supply the node that replaces each
/// leaf.
fn copy_tree(
    b: &mut DtBuilder,
    t: &DecisionTree,
    v: usize,
    on_leaf: &mut dyn FnMut(&mut DtBuilder, usize, bool) -> usize,
) -> usize {
    match t.nodes()[v] {
        DtNode::Leaf(c) => on_leaf(b, v, c),
        DtNode::Inner { feature, zero, one } => {
            let z = copy_tree(b, t, zero, on_leaf);
            let o = copy_tree(b, t, one, on_leaf);
            b.inner(feature, z, o)
        }
    }
}

fn copy_whole(b: &mut DtBuilder, t: &DecisionTree) -> usize {
    copy_tree(b, t, t.root(), &mut |b, _, c| b.leaf(c))
}

/// The all-zero example and the local abductive query whose minimum size is
/// the minimum hitting set size of `sets` over `universe`.
pub fn gen_hitting_set_laxp(
    universe: &[String],
    sets: &[Vec<usize>],
    k: usize,
) -> Result<(DecisionTree, Example, usize)> {
    if sets.is_empty() {
        return Err(Error::Invalid("set family is empty".into()));
    }
    let n = universe.len();
    let examples = sets
        .iter()
        .map(|s| {
            let mut e = vec![false; n];
            for &u in s {
                if u >= n {
                    return Err(Error::FeatureOutOfRange { index: u, len: n });
                }
                e[u] = true;
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    let names = universe.iter().map(|u| format!("f_{u}")).collect();
    let features: Vec<usize> = (0..n).collect();
    Ok((dt_from_examples(&examples, &features, names)?, Example::zeros(n), k))
}

fn one_hot(len: usize, at: &[usize]) -> Vec<bool> {
    let mut e = vec![false; len];
    for &i in at {
        e[i] = true;
    }
    e
}

/// A tree that has a global abductive explanation of size at most `k` for
/// class 0 iff the graph has a multicoloured clique. The tree has one
/// padding copy per leaf of a complete tree of height `k`, so its size grows
/// with `2^k`; `k` above `k_cap` or more than `node_cap` nodes is refused.
pub fn gen_mcc_gaxp_dt(
    g: &MccInstance,
    k_cap: usize,
    node_cap: usize,
) -> Result<(DecisionTree, bool, usize)> {
    let k = g.k();
    if k < 2 {
        return Err(Error::Invalid("needs at least two parts".into()));
    }
    if k > k_cap {
        return Err(Error::BudgetExceeded { cap: k_cap });
    }
    let n = g.n();
    let height = usize::BITS as usize - (k * (k - 1) - 1).leading_zeros() as usize;
    let copies = 1usize << k;
    let mut names = g.vertex_features();
    let upper_first = names.len();
    names.extend((0..copies - 1).map(|i| format!("u{i}")));
    let lower_first = names.len();
    let per_copy = (1usize << height) - 1;
    for c in 0..copies {
        names.extend((0..per_copy).map(|i| format!("d{c}_{i}")));
    }

    // T_{i,j}: accepts iff part i is all zero, or exactly one vertex v of
    // part i is set and none of v's neighbours in part j is.
    let mut pair_trees = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let part = g.part(i);
            let mut examples = vec![vec![false; part.len()]];
            examples.extend((0..part.len()).map(|p| one_hot(part.len(), &[p])));
            let ti = dt_from_examples(&examples, part, names.clone())?;
            let mut replace = HashMap::new();
            for &v in part {
                let mut e = vec![false; names.len()];
                e[v] = true;
                let nbrs: Vec<usize> = g.part(j).iter().copied().filter(|&u| g.adjacent(v, u)).collect();
                let tv = dt_from_examples(&[vec![false; nbrs.len()]], &nbrs, names.clone())?;
                replace.insert(ti.leaf_for(&e), tv);
            }
            let mut b = DtBuilder::new();
            let root = copy_tree(&mut b, &ti, ti.root(), &mut |b, leaf, c| match replace.get(&leaf) {
                Some(tv) => copy_whole(b, tv),
                None => b.leaf(c),
            });
            pair_trees.push(b.build(names.clone(), root)?);
        }
    }
    let pair_nodes: usize = pair_trees.iter().map(|t| t.nodes().len()).sum();
    let estimate = copies
        .checked_mul(pair_nodes + 2 * (per_copy + 1))
        .and_then(|x| x.checked_add(2 * copies))
        .unwrap_or(usize::MAX);
    if estimate > node_cap {
        return Err(Error::BudgetExceeded { cap: node_cap });
    }

    let mut b = DtBuilder::new();
    let mut upper_next = upper_first;
    let root = complete_tree(&mut b, k, &mut upper_next, &mut |b, leaf| {
        let mut lower_next = lower_first + leaf * per_copy;
        complete_tree(b, height, &mut lower_next, &mut |b, slot| match pair_trees.get(slot) {
            Some(t) => copy_whole(b, t),
            None => b.leaf(false),
        })
    });
    debug_assert_eq!(n, upper_first);
    Ok((b.build(names, root)?, false, k))
}

/// Complete tree of the given height with a fresh feature per inner node,
/// taken from `next_feature` in preorder. Leaves are numbered left to right.
fn complete_tree(
    b: &mut DtBuilder,
    height: usize,
    next_feature: &mut usize,
    leaf: &mut dyn FnMut(&mut DtBuilder, usize) -> usize,
) -> usize {
    fn go(
        b: &mut DtBuilder,
        height: usize,
        next_feature: &mut usize,
        first_leaf: usize,
        leaf: &mut dyn FnMut(&mut DtBuilder, usize) -> usize,
    ) -> usize {
        if height == 0 {
            return leaf(b, first_leaf);
        }
        let f = *next_feature;
        *next_feature += 1;
        let z = go(b, height - 1, next_feature, first_leaf, leaf);
        let o = go(b, height - 1, next_feature, first_leaf + (1 << (height - 1)), leaf);
        b.inner(f, z, o)
    }
    go(b, height, next_feature, 0, leaf)
}

/// Tree ensemble with `2(k + C(k,2)) - 1` elements that classifies some
/// example positively iff the graph has a multicoloured clique.
pub fn gen_mcc_dt_ensemble(g: &MccInstance) -> Result<Ensemble> {
    let k = g.k();
    let names = g.vertex_features();
    let mut elements = Vec::new();
    for i in 0..k {
        let part = g.part(i);
        let examples: Vec<Vec<bool>> = (0..part.len()).map(|p| one_hot(part.len(), &[p])).collect();
        elements.push(Model::Dt(dt_from_examples(&examples, part, names.clone())?));
    }
    for i in 0..k {
        for j in i + 1..k {
            let mut features: Vec<usize> = g.part(i).iter().chain(g.part(j)).copied().collect();
            features.sort_unstable();
            let examples: Vec<Vec<bool>> = g
                .edges()
                .iter()
                .filter(|&&(a, b)| {
                    let (pa, pb) = (g.part_of(a), g.part_of(b));
                    (pa, pb) == (i, j) || (pa, pb) == (j, i)
                })
                .map(|&(a, b)| features.iter().map(|&f| f == a || f == b).collect())
                .collect();
            elements.push(Model::Dt(dt_from_examples(&examples, &features, names.clone())?));
        }
    }
    for _ in 0..k + k * (k - 1) / 2 - 1 {
        elements.push(Model::Dt(DecisionTree::constant(names.clone(), false)));
    }
    Ensemble::new(elements, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Dt,
    Ds,
    Obdd,
}

/// Majority ensemble of an odd number of tiny models that classifies an
/// example with at most `k` ones positively iff the graph has a
/// multicoloured clique, where `k` is the number of parts. Diagram elements
/// share the vertex order.
///
/// Elements: one "not both" model per non-adjacent vertex pair, one
/// "this vertex" model per vertex and `C(n,2) - m - n + 2k - 1` constant-0
/// models. When that count is negative, the same number of constant-1
/// models is added instead, which keeps the vote margin identical.
pub fn gen_maj_hom(g: &MccInstance, family: Family) -> Result<Ensemble> {
    let n = g.n();
    let k = g.k() as i64;
    let names = g.vertex_features();
    let order: Vec<usize> = (0..n).collect();
    let non_edges = g.non_edges();
    let d = non_edges.len() as i64 - n as i64 + 2 * k - 1;
    let constant = |c: bool| -> Result<Model> {
        Ok(match family {
            Family::Dt => Model::Dt(DecisionTree::constant(names.clone(), c)),
            Family::Ds => Model::Ds(DecisionSet::new(names.clone(), vec![], c)?),
            Family::Obdd => Model::Obdd(Obdd::constant(names.clone(), order.clone(), c)?.complete()),
        })
    };
    let single = |f: usize| -> Result<Model> {
        Ok(match family {
            Family::Dt => {
                let mut b = DtBuilder::new();
                let (z, o) = (b.leaf(false), b.leaf(true));
                let r = b.inner(f, z, o);
                Model::Dt(b.build(names.clone(), r)?)
            }
            Family::Ds => Model::Ds(DecisionSet::new(
                names.clone(),
                vec![Term::new(vec![Literal::new(f, true)])],
                false,
            )?),
            Family::Obdd => {
                let mut b = ObddBuilder::new();
                let s = b.inner(f, T0, T1);
                Model::Obdd(b.build(names.clone(), s, order.clone())?.complete())
            }
        })
    };
    let not_both = |f1: usize, f2: usize| -> Result<Model> {
        Ok(match family {
            Family::Dt => {
                let mut b = DtBuilder::new();
                let l0 = b.leaf(true);
                let l1 = b.leaf(true);
                let l2 = b.leaf(false);
                let inner = b.inner(f2, l1, l2);
                let r = b.inner(f1, l0, inner);
                Model::Dt(b.build(names.clone(), r)?)
            }
            Family::Ds => Model::Ds(DecisionSet::new(
                names.clone(),
                vec![Term::new(vec![Literal::new(f1, true), Literal::new(f2, true)])],
                true,
            )?),
            Family::Obdd => {
                let mut b = ObddBuilder::new();
                let second = b.inner(f2, T1, T0);
                let s = b.inner(f1, T1, second);
                Model::Obdd(b.build(names.clone(), s, order.clone())?.complete())
            }
        })
    };
    let mut elements = Vec::new();
    for &(a, b) in &non_edges {
        elements.push(not_both(a, b)?);
    }
    for v in 0..n {
        elements.push(single(v)?);
    }
    for _ in 0..d.max(0) {
        elements.push(constant(false)?);
    }
    for _ in 0..(-d).max(0) {
        elements.push(constant(true)?);
    }
    let shared = (family == Family::Obdd).then_some(order);
    Ensemble::new(elements, shared)
}

/// The decision set `(terms, 0)` for a DNF over `variables`, and whether the
/// all-zero assignment satisfies the DNF. The set is homogeneous iff the DNF
/// is a tautology, provided that flag is true.
pub fn gen_taut_ds(variables: &[String], terms: &[Vec<(usize, bool)>]) -> Result<(DecisionSet, bool)> {
    let terms: Vec<Term> = terms
        .iter()
        .map(|t| Term::new(t.iter().map(|&(f, b)| Literal::new(f, b)).collect()))
        .collect();
    let zero = vec![false; variables.len()];
    let satisfied = terms.iter().any(|t| t.satisfied_by(&zero));
    Ok((DecisionSet::new(variables.to_vec(), terms, false)?, satisfied))
}

/// Decision set that classifies an example with at most `k` ones positively
/// iff the graph has a multicoloured clique; the all-zero example is
/// negative.
pub fn gen_mcc_ds(g: &MccInstance) -> Result<DecisionSet> {
    let mut terms: Vec<Term> = g
        .non_edges()
        .into_iter()
        .map(|(a, b)| Term::new(vec![Literal::new(a, true), Literal::new(b, true)]))
        .collect();
    for i in 0..g.k() {
        terms.push(Term::new(
            g.part(i).iter().map(|&v| Literal::new(v, false)).collect(),
        ));
    }
    DecisionSet::new(g.vertex_features(), terms, true)
}

/// Ensemble of `2k + 1` decision sets with terms of size at most two and the
/// same clique property as [`gen_mcc_ds`].
pub fn gen_mcc_ds_ensemble(g: &MccInstance) -> Result<Ensemble> {
    let names = g.vertex_features();
    let non_edges = g
        .non_edges()
        .into_iter()
        .map(|(a, b)| Term::new(vec![Literal::new(a, true), Literal::new(b, true)]))
        .collect();
    let mut elements = vec![Model::Ds(DecisionSet::new(names.clone(), non_edges, true)?)];
    for i in 0..g.k() {
        let terms = g
            .part(i)
            .iter()
            .map(|&v| Term::new(vec![Literal::new(v, true)]))
            .collect();
        elements.push(Model::Ds(DecisionSet::new(names.clone(), terms, false)?));
    }
    for _ in 0..g.k() {
        elements.push(Model::Ds(DecisionSet::new(names.clone(), vec![], false)?));
    }
    Ensemble::new(elements, None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Primitive {
    /// Exactly one feature is 1.
    ExactlyOne,
    /// Some feature is 1.
    Exists,
    /// The named extra feature is 1 iff some feature is 1. It is read last.
    IffExists(String),
    /// All features are equal.
    AllEqual,
}

/// A complete diagram that reads `features` in order while moving through a
/// finite set of states. `step(level, state, bit)` gives the next state and
/// `accept(state)` the class at the end. Only reachable states get nodes.
fn layered(
    features: Vec<String>,
    start: usize,
    step: impl Fn(usize, usize, bool) -> usize,
    accept: impl Fn(usize) -> bool,
) -> Result<Obdd> {
    let n = features.len();
    let mut reach: Vec<Vec<usize>> = vec![vec![start]];
    for p in 0..n {
        let mut next: Vec<usize> = reach[p]
            .iter()
            .flat_map(|&s| [step(p, s, false), step(p, s, true)])
            .collect();
        next.sort_unstable();
        next.dedup();
        reach.push(next);
    }
    let mut b = ObddBuilder::new();
    let mut ids: HashMap<usize, usize> = reach[n]
        .iter()
        .map(|&s| (s, accept(s) as usize))
        .collect();
    for p in (0..n).rev() {
        let mut level = HashMap::new();
        for &s in &reach[p] {
            let z = ids[&step(p, s, false)];
            let o = ids[&step(p, s, true)];
            level.insert(s, b.inner(p, z, o));
        }
        ids = level;
    }
    b.build(features, ids[&start], (0..n).collect())
}

/// The counter gadgets of width at most three.
pub fn obdd_primitive(kind: &Primitive, features: &[String]) -> Result<Obdd> {
    let mut names = features.to_vec();
    let mut seen = HashSet::new();
    if let Primitive::IffExists(f) = kind {
        names.push(f.clone());
    }
    for f in &names {
        if !seen.insert(f) {
            return Err(Error::SharedFeature(f.clone()));
        }
    }
    let n = features.len();
    // States 0, 1, 2 count ones seen so far, saturating at 2.
    let count = |s: usize, b: bool| (s + b as usize).min(2);
    match kind {
        Primitive::ExactlyOne => layered(names, 0, |_, s, b| count(s, b), |s| s == 1),
        Primitive::Exists => layered(names, 0, |_, s, b| count(s, b), |s| s >= 1),
        Primitive::IffExists(_) => layered(
            names,
            0,
            // After the counter, state 3 accepts and state 4 rejects.
            move |p, s, b| {
                if p < n {
                    count(s, b)
                } else if b == (s >= 1) {
                    3
                } else {
                    4
                }
            },
            |s| s == 3,
        ),
        // State 0 or 1: every feature so far equals that value; 2: mismatch.
        Primitive::AllEqual => layered(
            names,
            0,
            |p, s, b| match (p, s) {
                (0, _) => b as usize,
                (_, 2) => 2,
                (_, s) if b as usize == s => s,
                _ => 2,
            },
            |s| s < 2,
        ),
    }
}

/// Serial composition of feature-disjoint diagrams: success in one enters
/// the next, failure drops onto a bypass track that reads the remaining
/// features and ends in the 0-sink. Features keep the element order.
pub fn obdd_conjoin(parts: &[Obdd]) -> Result<Obdd> {
    let mut names: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    let mut starts = Vec::new();
    for o in parts {
        starts.push(names.len());
        for &f in o.order() {
            let name = &o.feature_names()[f];
            if !seen.insert(name.clone()) {
                return Err(Error::SharedFeature(name.clone()));
            }
            names.push(name.clone());
        }
    }
    let total = names.len();
    let mut b = ObddBuilder::new();
    let mut bypass: Vec<usize> = vec![usize::MAX; total + 1];
    bypass[total] = T0;
    let mut entry = T1;
    for (i, o) in parts.iter().enumerate().rev() {
        let o = o.complete();
        let end = starts[i] + o.num_features();
        let fail = bypass_node(&mut b, &mut bypass, end);
        // Element feature f sits at global position starts[i] + level(f).
        let levels = o.levels();
        let pos: Vec<usize> = levels.iter().map(|&l| starts[i] + l).collect();
        entry = copy_diagram(&mut b, &o, [fail, entry], &pos);
    }
    let order = (0..total).collect();
    Ok(b.build(names, entry, order)?.complete())
}

fn bypass_node(b: &mut ObddBuilder, bypass: &mut [usize], p: usize) -> usize {
    if bypass[p] == usize::MAX {
        let next = bypass_node(b, bypass, p + 1);
        bypass[p] = b.inner(p, next, next);
    }
    bypass[p]
}

/// Copies `o` into `b`, renaming features through `feature_map` and sending
/// its two sinks to `sinks`. Returns the copy of the source.
fn copy_diagram(b: &mut ObddBuilder, o: &Obdd, sinks: [usize; 2], feature_map: &[usize]) -> usize {
    let mut ids = vec![usize::MAX; o.nodes().len()];
    ids[T0] = sinks[0];
    ids[T1] = sinks[1];
    let mut stack = vec![(o.source(), false)];
    while let Some((v, expanded)) = stack.pop() {
        if ids[v] != usize::MAX {
            continue;
        }
        if let ObddNode::Inner { feature, zero, one } = o.nodes()[v] {
            if expanded {
                ids[v] = b.inner(feature_map[feature], ids[zero], ids[one]);
            } else {
                stack.push((v, true));
                stack.push((one, false));
                stack.push((zero, false));
            }
        }
    }
    ids[o.source()]
}

/// Three diagrams over vertex, copy and edge features, the third constant 0,
/// whose majority is positive iff the graph has a multicoloured clique.
/// Positive examples have exactly `3 C(k,2) + k (k + 2)` ones.
pub fn gen_mcc_obdd_maj(g: &MccInstance) -> Result<Ensemble> {
    let k = g.k();
    if k < 2 {
        return Err(Error::Invalid("needs at least two parts".into()));
    }
    let v = |a: usize| format!("f_{}", g.name(a));
    let v_copy = |a: usize| format!("f'_{}", g.name(a));
    let v_part = |a: usize, j: usize| format!("f^{}_{}", j + 1, g.name(a));
    let e_copy = |a: usize, b: usize| format!("g'_{}_{}", g.name(a), g.name(b));
    let e_dir = |a: usize, b: usize| format!("g_{}_{}", g.name(a), g.name(b));

    let mut first = Vec::new();
    for a in 0..g.n() {
        let mut fs = vec![v(a), v_copy(a)];
        fs.extend((0..k).map(|j| v_part(a, j)));
        first.push(obdd_primitive(&Primitive::AllEqual, &fs)?);
    }
    for &(a, b) in g.edges() {
        first.push(obdd_primitive(
            &Primitive::AllEqual,
            &[e_copy(a, b), e_dir(a, b), e_dir(b, a)],
        )?);
    }

    let between = |i: usize, j: usize| -> Vec<(usize, usize)> {
        g.edges()
            .iter()
            .copied()
            .filter(|&(a, b)| {
                let (pa, pb) = (g.part_of(a), g.part_of(b));
                (pa, pb) == (i, j) || (pa, pb) == (j, i)
            })
            .collect()
    };
    let mut second = Vec::new();
    for i in 0..k {
        let fs: Vec<String> = g.part(i).iter().map(|&a| v_copy(a)).collect();
        second.push(obdd_primitive(&Primitive::ExactlyOne, &fs)?);
    }
    for i in 0..k {
        for j in i + 1..k {
            let fs: Vec<String> = between(i, j).into_iter().map(|(a, b)| e_copy(a, b)).collect();
            second.push(obdd_primitive(&Primitive::ExactlyOne, &fs)?);
        }
    }
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            for &a in g.part(i) {
                let fs: Vec<String> = g
                    .part(j)
                    .iter()
                    .filter(|&&b| g.adjacent(a, b))
                    .map(|&b| e_dir(a, b))
                    .collect();
                second.push(obdd_primitive(&Primitive::IffExists(v_part(a, j)), &fs)?);
            }
        }
    }
    let o1 = obdd_conjoin(&first)?;
    let o2 = obdd_conjoin(&second)?;
    let o3 = Obdd::constant(vec![], vec![], false)?;
    Ensemble::over_union(vec![Model::Obdd(o1), Model::Obdd(o2), Model::Obdd(o3)])
}

/// Diagram over `o`'s universe and order that gives `out_class` to examples
/// agreeing with `e` on at least `k` features and the other class otherwise.
pub fn obdd_agreement_counter(
    e: &Example,
    k: usize,
    features: Vec<String>,
    order: &[usize],
    out_class: bool,
) -> Result<Obdd> {
    if k > features.len() || e.len() != features.len() || order.len() != features.len() {
        return Err(Error::Invalid(
            "counter needs 0 <= k <= |F| and a full example and order".into(),
        ));
    }
    // The layered builder reads features 0..n; relabel through the order.
    let ordered: Vec<String> = order.iter().map(|&f| features[f].clone()).collect();
    let values: Vec<bool> = order.iter().map(|&f| e[f]).collect();
    let counter = layered(
        ordered,
        0,
        |p, s, b| if s < k && b == values[p] { s + 1 } else { s },
        |s| if s >= k { out_class } else { !out_class },
    )?;
    Model::Obdd(counter).embed(&features).map(|m| match m {
        Model::Obdd(o) => o,
        _ => unreachable!(),
    })
}

/// Product of `o`, the agreement counter for `(e, k)` and a constant
/// diagram of the other class. Returns the product and the class `o(e)`:
/// `o` has a local abductive explanation of size at most `k` for `e` iff
/// the product has a global abductive explanation of size at most `k` for
/// that class.
pub fn gen_laxp_to_gaxp(o: &Obdd, e: &Example, k: usize, cap: usize) -> Result<(Obdd, bool, usize)> {
    let o = o.complete();
    let class = o.classify(e);
    let names = o.feature_names().to_vec();
    let order = o.order().to_vec();
    let counter = obdd_agreement_counter(e, k, names.clone(), &order, class)?;
    let bottom = Obdd::constant(names, order.clone(), !class)?.complete();
    let ens = Ensemble::new(
        vec![Model::Obdd(o), Model::Obdd(counter), Model::Obdd(bottom)],
        Some(order),
    )?;
    Ok((obdd_ensemble_product(&ens, cap)?, class, k))
}

/// A generated model with the query whose answer encodes the source
/// instance, plus facts about the construction.
#[derive(Clone, Debug)]
pub struct Generated {
    pub model: Model,
    pub query: Option<Query>,
    pub info: serde_json::Value,
}

pub const GENERATORS: &[&str] = &[
    "dt_from_examples",
    "hitting_set",
    "mcc_gaxp_dt",
    "mcc_dt_ensemble",
    "maj_hom",
    "taut_ds",
    "mcc_ds",
    "mcc_ds_ensemble",
    "obdd_primitive",
    "obdd_conjoin",
    "agreement_counter",
    "mcc_obdd_maj",
    "laxp_to_gaxp",
];

fn param<'a>(params: &'a serde_json::Value, key: &str) -> Result<&'a serde_json::Value> {
    params
        .get(key)
        .ok_or_else(|| Error::Parse(format!("missing parameter `{key}`")))
}

fn param_of<T: serde::de::DeserializeOwned>(params: &serde_json::Value, key: &str) -> Result<T> {
    serde_json::from_value(param(params, key)?.clone())
        .map_err(|e| Error::Parse(format!("parameter `{key}`: {e}")))
}

fn opt_param<T: serde::de::DeserializeOwned>(
    params: &serde_json::Value,
    key: &str,
) -> Result<Option<T>> {
    match params.get(key) {
        None | Some(serde_json::Value::Null) => Ok(None),
        Some(_) => param_of(params, key).map(Some),
    }
}

fn graph_param(params: &serde_json::Value) -> Result<(MccInstance, usize)> {
    let g = MccInstance::from_json(params.get("graph").unwrap_or(params))?;
    let k = check_k(&g, opt_param(params, "k")?)?;
    Ok((g, k))
}

/// Runs the generator called `name` on JSON parameters. Graph generators
/// take `{"parts": [[..]], "edges": [[u, v]]}` (or `"vertices"` with part
/// labels), inline or under `"graph"`.
pub fn generate(name: &str, params: &serde_json::Value) -> Result<Generated> {
    use serde_json::json;
    let zero_lcxp = |m: &Model, k: usize| {
        Query::local(
            Kind::LocalContrastive,
            Example::zeros(m.num_features()),
            Minimality::Cardinality,
            Some(k),
        )
    };
    let gaxp = |class: bool, k: usize| {
        Query::global(Kind::GlobalAbductive, class, Minimality::Cardinality, Some(k))
    };
    let generated = match name {
        "dt_from_examples" => {
            let features: Vec<String> = param_of(params, "features")?;
            let examples: Vec<Vec<u8>> = param_of(params, "examples")?;
            let examples: Vec<Vec<bool>> = examples
                .into_iter()
                .map(|e| e.into_iter().map(|b| b != 0).collect())
                .collect();
            let order: Vec<usize> = (0..features.len()).collect();
            let t = dt_from_examples(&examples, &order, features)?;
            Generated {
                info: json!({"leaves": t.size()}),
                model: Model::Dt(t),
                query: None,
            }
        }
        "hitting_set" => {
            let universe: Vec<String> = param_of(params, "universe")?;
            let sets: Vec<Vec<String>> = param_of(params, "sets")?;
            let sets = sets
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|u| {
                            universe
                                .iter()
                                .position(|v| v == u)
                                .ok_or_else(|| Error::Invalid(format!("`{u}` is not in the universe")))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let k = opt_param(params, "k")?.unwrap_or(universe.len());
            let (t, e, k) = gen_hitting_set_laxp(&universe, &sets, k)?;
            Generated {
                query: Some(Query::local(Kind::LocalAbductive, e, Minimality::Cardinality, Some(k))),
                info: json!({"leaves": t.size()}),
                model: Model::Dt(t),
            }
        }
        "mcc_gaxp_dt" => {
            let (g, _) = graph_param(params)?;
            let k_cap = opt_param(params, "k_cap")?.unwrap_or(DEFAULT_GAXP_K_CAP);
            let node_cap = opt_param(params, "node_cap")?.unwrap_or(crate::solve::DEFAULT_CAP_NODES);
            let (t, class, k) = gen_mcc_gaxp_dt(&g, k_cap, node_cap)?;
            Generated {
                query: Some(gaxp(class, k)),
                info: json!({"k": k, "nodes": t.nodes().len(), "features": t.num_features()}),
                model: Model::Dt(t),
            }
        }
        "mcc_dt_ensemble" => {
            let (g, k) = graph_param(params)?;
            let ens = gen_mcc_dt_ensemble(&g)?;
            Generated {
                // The empty assignment explains class 0 iff nothing is positive.
                query: Some(gaxp(false, 0)),
                info: json!({"k": k, "elements": ens.elements().len()}),
                model: Model::Ensemble(ens),
            }
        }
        "maj_hom" => {
            let (g, k) = graph_param(params)?;
            let family: Family = opt_param(params, "family")?.unwrap_or(Family::Dt);
            let m = Model::Ensemble(gen_maj_hom(&g, family)?);
            Generated {
                query: Some(zero_lcxp(&m, k)),
                info: json!({"k": k, "elements": m.elements().len()}),
                model: m,
            }
        }
        "taut_ds" => {
            let variables: Vec<String> = param_of(params, "variables")?;
            let terms: Vec<Vec<(String, u8)>> = param_of(params, "terms")?;
            let terms = terms
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|(v, b)| {
                            variables
                                .iter()
                                .position(|x| x == v)
                                .map(|i| (i, *b != 0))
                                .ok_or_else(|| Error::UndefinedFeature(v.clone()))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let (s, zero_satisfies) = gen_taut_ds(&variables, &terms)?;
            Generated {
                // The empty assignment explains class 1 iff the DNF is valid.
                query: Some(gaxp(true, 0)),
                info: json!({"zero_satisfies": zero_satisfies}),
                model: Model::Ds(s),
            }
        }
        "mcc_ds" => {
            let (g, k) = graph_param(params)?;
            let m = Model::Ds(gen_mcc_ds(&g)?);
            Generated {
                query: Some(zero_lcxp(&m, k)),
                info: json!({"k": k}),
                model: m,
            }
        }
        "mcc_ds_ensemble" => {
            let (g, k) = graph_param(params)?;
            let m = Model::Ensemble(gen_mcc_ds_ensemble(&g)?);
            Generated {
                query: Some(zero_lcxp(&m, k)),
                info: json!({"k": k, "elements": m.elements().len()}),
                model: m,
            }
        }
        "obdd_primitive" => {
            let features: Vec<String> = param_of(params, "features")?;
            let kind = match param_of::<String>(params, "primitive")?.as_str() {
                "exactly_one" => Primitive::ExactlyOne,
                "exists" => Primitive::Exists,
                "all_equal" => Primitive::AllEqual,
                "iff_exists" => Primitive::IffExists(param_of(params, "extra")?),
                other => return Err(Error::Invalid(format!("unknown primitive `{other}`"))),
            };
            let o = obdd_primitive(&kind, &features)?;
            Generated {
                info: json!({"width": o.width()}),
                model: Model::Obdd(o),
                query: None,
            }
        }
        "obdd_conjoin" => {
            let parts = param(params, "parts")?
                .as_array()
                .ok_or_else(|| Error::Parse("`parts` must be an array".into()))?
                .iter()
                .map(|p| match crate::format::model_from_value(p)? {
                    Model::Obdd(o) => Ok(o),
                    _ => Err(Error::Invalid("conjoin parts must be OBDDs".into())),
                })
                .collect::<Result<Vec<_>>>()?;
            let o = obdd_conjoin(&parts)?;
            Generated {
                info: json!({"width": o.width()}),
                model: Model::Obdd(o),
                query: None,
            }
        }
        "agreement_counter" => {
            let features: Vec<String> = param_of(params, "features")?;
            let e = crate::format::example_from_value(&features, param(params, "example")?)?;
            let k: usize = param_of(params, "k")?;
            let class = opt_param::<u8>(params, "class")?.unwrap_or(1) != 0;
            let order: Vec<usize> = (0..features.len()).collect();
            let o = obdd_agreement_counter(&e, k, features, &order, class)?;
            Generated {
                info: json!({"width": o.width()}),
                model: Model::Obdd(o),
                query: None,
            }
        }
        "mcc_obdd_maj" => {
            let (g, k) = graph_param(params)?;
            let ens = gen_mcc_obdd_maj(&g)?;
            let weight = 3 * k * (k - 1) / 2 + k * (k + 2);
            let widths: Vec<usize> = ens
                .elements()
                .iter()
                .map(|m| match m {
                    Model::Obdd(o) => o.width(),
                    _ => unreachable!(),
                })
                .collect();
            Generated {
                query: Some(gaxp(false, 0)),
                info: json!({"k": k, "positive_weight": weight, "widths": widths}),
                model: Model::Ensemble(ens),
            }
        }
        "laxp_to_gaxp" => {
            let o = match crate::format::model_from_value(param(params, "model")?)? {
                Model::Obdd(o) => o,
                _ => return Err(Error::Invalid("`model` must be an OBDD".into())),
            };
            let e = crate::format::example_from_value(o.feature_names(), param(params, "example")?)?;
            let k: usize = param_of(params, "k")?;
            let cap = opt_param(params, "cap_nodes")?.unwrap_or(crate::solve::DEFAULT_CAP_NODES);
            let (p, class, k) = gen_laxp_to_gaxp(&o, &e, k, cap)?;
            Generated {
                query: Some(gaxp(class, k)),
                info: json!({"class": class as u8, "width": p.width()}),
                model: Model::Obdd(p),
            }
        }
        other => return Err(Error::Invalid(format!("unknown generator `{other}`"))),
    };
    Ok(generated)
}
