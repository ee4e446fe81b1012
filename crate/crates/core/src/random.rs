//! Seeded random instances for cross-checking solvers against the oracle.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::gadgets::MccInstance;
use crate::models::{
    DecisionList, DecisionSet, DecisionTree, DtBuilder, Example, Literal, Obdd, ObddBuilder, Rule,
    Term, T0, T1,
};

/// `x0, x1, ...`
pub fn feature_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

pub fn random_example(rng: &mut impl Rng, n: usize) -> Example {
    Example::new((0..n).map(|_| rng.gen()).collect())
}

/// A tree without contradictory paths and with at most `max_leaves`
/// leaves (at least 1).
pub fn random_dt(rng: &mut impl Rng, n: usize, max_leaves: usize) -> DecisionTree {
    fn go(
        rng: &mut impl Rng,
        b: &mut DtBuilder,
        free: &mut Vec<usize>,
        budget: usize,
    ) -> (usize, usize) {
        if free.is_empty() || budget < 2 || rng.gen_bool(0.25) {
            return (b.leaf(rng.gen()), 1);
        }
        let i = rng.gen_range(0..free.len());
        let f = free.swap_remove(i);
        let left_budget = rng.gen_range(1..budget);
        let (z, lz) = go(rng, b, free, left_budget);
        let (o, lo) = go(rng, b, free, budget - lz);
        free.push(f);
        let last = free.len() - 1;
        free.swap(i, last);
        (b.inner(f, z, o), lz + lo)
    }
    let mut b = DtBuilder::new();
    let mut free: Vec<usize> = (0..n).collect();
    let (root, _) = go(rng, &mut b, &mut free, max_leaves.max(1));
    b.build(feature_names(n), root).expect("well-formed tree")
}

/// A complete diagram over a random order with at most `max_width` nodes
/// per level.
pub fn random_obdd(rng: &mut impl Rng, n: usize, max_width: usize) -> Obdd {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    random_obdd_with_order(rng, order, max_width)
}

/// Like [`random_obdd`] over a given order of `0..order.len()`.
pub fn random_obdd_with_order(rng: &mut impl Rng, order: Vec<usize>, max_width: usize) -> Obdd {
    let n = order.len();
    let mut b = ObddBuilder::new();
    let mut below = vec![T0, T1];
    let mut source = if rng.gen() { T1 } else { T0 };
    for p in (0..n).rev() {
        let width = if p == 0 { 1 } else { rng.gen_range(1..=max_width.max(1)) };
        let level: Vec<usize> = (0..width)
            .map(|_| {
                let z = *below.choose(rng).unwrap();
                let o = *below.choose(rng).unwrap();
                b.inner(order[p], z, o)
            })
            .collect();
        source = level[0];
        below = level;
    }
    b.build(feature_names(n), source, order)
        .expect("levels respect the order")
        .complete()
}

fn random_term(rng: &mut impl Rng, n: usize, max_len: usize) -> Term {
    let mut fs: Vec<usize> = (0..n).collect();
    fs.shuffle(rng);
    let len = rng.gen_range(1..=max_len.min(n).max(1)).min(n);
    let mut lits: Vec<Literal> = fs[..len].iter().map(|&f| Literal::new(f, rng.gen())).collect();
    lits.sort();
    Term::new(lits)
}

/// A list with `1..=max_rules` rules; the last has the empty term.
pub fn random_dl(rng: &mut impl Rng, n: usize, max_rules: usize, max_term: usize) -> DecisionList {
    let rules = rng.gen_range(1..=max_rules.max(1));
    let mut list: Vec<Rule> = (0..rules - 1)
        .map(|_| Rule {
            term: random_term(rng, n, max_term),
            class: rng.gen(),
        })
        .collect();
    list.push(Rule {
        term: Term::default(),
        class: rng.gen(),
    });
    DecisionList::new(feature_names(n), list).expect("last term is empty")
}

pub fn random_ds(rng: &mut impl Rng, n: usize, max_terms: usize, max_term: usize) -> DecisionSet {
    let terms = (0..rng.gen_range(0..=max_terms))
        .map(|_| random_term(rng, n, max_term))
        .collect();
    DecisionSet::new(feature_names(n), terms, rng.gen()).expect("terms use known features")
}

/// A graph whose vertices are spread over `k` non-empty parts, with each
/// cross-part pair adjacent with probability `p`.
pub fn random_mcc(rng: &mut impl Rng, vertices: usize, k: usize, p: f64) -> MccInstance {
    assert!(k >= 1 && vertices >= k);
    let mut parts: Vec<usize> = (0..vertices).map(|v| if v < k { v } else { rng.gen_range(0..k) }).collect();
    parts.shuffle(rng);
    let named: Vec<(String, usize)> = parts
        .iter()
        .enumerate()
        .map(|(v, &i)| (format!("v{v}"), i))
        .collect();
    let mut edges = Vec::new();
    for a in 0..vertices {
        for b in a + 1..vertices {
            if parts[a] != parts[b] && rng.gen_bool(p) {
                edges.push((named[a].0.clone(), named[b].0.clone()));
            }
        }
    }
    MccInstance::new(named, &edges).expect("proper colouring")
}
