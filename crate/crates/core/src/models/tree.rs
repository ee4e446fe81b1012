use std::collections::BTreeSet;

use super::{check_feature, Classifier, Literal, PartialExample};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DtNode {
    Leaf(bool),
    Inner { feature: usize, zero: usize, one: usize },
}

/// A binary decision tree stored as a node arena.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionTree {
    features: Vec<String>,
    nodes: Vec<DtNode>,
    root: usize,
}

/// A root-to-leaf path: the literals it tests and the leaf label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafPath {
    pub leaf: usize,
    pub literals: Vec<Literal>,
    pub class: bool,
}

impl LeafPath {
    /// False if the path tests some feature with both outcomes.
    pub fn is_consistent(&self) -> bool {
        !crate::models::Term::new(self.literals.clone()).is_contradictory()
    }
}

#[derive(Default)]
pub struct DtBuilder {
    nodes: Vec<DtNode>,
}

impl DtBuilder {
    pub fn new() -> Self {
        DtBuilder::default()
    }

    pub fn leaf(&mut self, class: bool) -> usize {
        self.nodes.push(DtNode::Leaf(class));
        self.nodes.len() - 1
    }

    pub fn inner(&mut self, feature: usize, zero: usize, one: usize) -> usize {
        self.nodes.push(DtNode::Inner { feature, zero, one });
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn build(self, features: Vec<String>, root: usize) -> Result<DecisionTree> {
        DecisionTree::new(features, self.nodes, root)
    }
}

impl DecisionTree {
    /// Validates that `nodes` forms a single tree rooted at `root` in which
    /// every node is reachable exactly once.
    pub fn new(features: Vec<String>, nodes: Vec<DtNode>, root: usize) -> Result<Self> {
        if root >= nodes.len() {
            return Err(Error::Invalid(format!("root {root} is not a node")));
        }
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::Invalid(format!("node {v} has more than one parent")));
            }
            if let DtNode::Inner { feature, zero, one } = nodes[v] {
                check_feature(feature, features.len())?;
                for c in [zero, one] {
                    if c >= nodes.len() {
                        return Err(Error::Invalid(format!("child {c} is not a node")));
                    }
                    stack.push(c);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Invalid(format!("node {v} is unreachable from the root")));
        }
        Ok(DecisionTree {
            features,
            nodes,
            root,
        })
    }

    pub fn constant(features: Vec<String>, class: bool) -> Self {
        DecisionTree {
            features,
            nodes: vec![DtNode::Leaf(class)],
            root: 0,
        }
    }

    pub fn nodes(&self) -> &[DtNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn leaf_for(&self, e: &[bool]) -> usize {
        let mut v = self.root;
        while let DtNode::Inner { feature, zero, one } = self.nodes[v] {
            v = if e[feature] { one } else { zero };
        }
        v
    }

    /// Leaves in depth-first order, 0-child first.
    pub fn leaves(&self) -> Vec<usize> {
        self.leaf_paths().into_iter().map(|p| p.leaf).collect()
    }

    /// All root-to-leaf paths in depth-first order, 0-child first.
    pub fn leaf_paths(&self) -> Vec<LeafPath> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_paths(self.root, &mut path, &mut out);
        out
    }

    fn collect_paths(&self, v: usize, path: &mut Vec<Literal>, out: &mut Vec<LeafPath>) {
        match self.nodes[v] {
            DtNode::Leaf(class) => out.push(LeafPath {
                leaf: v,
                literals: path.clone(),
                class,
            }),
            DtNode::Inner { feature, zero, one } => {
                for (child, value) in [(zero, false), (one, true)] {
                    path.push(Literal::new(feature, value));
                    self.collect_paths(child, path, out);
                    path.pop();
                }
            }
        }
    }

    /// Number of 0-leaves and 1-leaves.
    pub fn leaf_counts(&self) -> (usize, usize) {
        self.nodes.iter().fold((0, 0), |(z, o), n| match n {
            DtNode::Leaf(false) => (z + 1, o),
            DtNode::Leaf(true) => (z, o + 1),
            DtNode::Inner { .. } => (z, o),
        })
    }

    /// Minimum number of leaves carrying one class.
    pub fn mnl(&self) -> usize {
        let (z, o) = self.leaf_counts();
        z.min(o)
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        let (z, o) = self.leaf_counts();
        z + o
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, v: usize) -> usize {
            match t.nodes[v] {
                DtNode::Leaf(_) => 0,
                DtNode::Inner { zero, one, .. } => 1 + go(t, zero).max(go(t, one)),
            }
        }
        go(self, self.root)
    }

    /// True if some path tests a feature twice with different outcomes.
    pub fn has_contradictions(&self) -> bool {
        self.leaf_paths().iter().any(|p| !p.is_consistent())
    }

    /// Removes contradictory paths by replacing every repeated test with the
    /// branch already taken higher up. Returns an identical tree when there is
    /// nothing to remove.
    pub fn simplify(&self) -> DecisionTree {
        if !self.has_contradictions() {
            return self.clone();
        }
        let mut b = DtBuilder::new();
        let mut assign = vec![None; self.features.len()];
        let root = self.rebuild(self.root, &mut assign, true, &mut b);
        b.build(self.features.clone(), root)
            .expect("rebuilt tree is well formed")
    }

    /// The tree obtained by replacing every node testing an assigned feature
    /// with the subtree selected by `tau`.
    pub fn restrict(&self, tau: &PartialExample) -> DecisionTree {
        let mut b = DtBuilder::new();
        let mut assign = tau.values().to_vec();
        let root = self.rebuild(self.root, &mut assign, false, &mut b);
        b.build(self.features.clone(), root)
            .expect("rebuilt tree is well formed")
    }

    fn rebuild(
        &self,
        v: usize,
        assign: &mut Vec<Option<bool>>,
        learn: bool,
        b: &mut DtBuilder,
    ) -> usize {
        match self.nodes[v] {
            DtNode::Leaf(c) => b.leaf(c),
            DtNode::Inner { feature, zero, one } => match assign[feature] {
                Some(false) => self.rebuild(zero, assign, learn, b),
                Some(true) => self.rebuild(one, assign, learn, b),
                None => {
                    if learn {
                        assign[feature] = Some(false);
                    }
                    let z = self.rebuild(zero, assign, learn, b);
                    if learn {
                        assign[feature] = Some(true);
                    }
                    let o = self.rebuild(one, assign, learn, b);
                    if learn {
                        assign[feature] = None;
                    }
                    b.inner(feature, z, o)
                }
            },
        }
    }

    /// Which leaf labels `[class 0, class 1]` are reachable by examples that
    /// agree with `tau`. Contradictory paths are not followed.
    pub fn reachable_classes(&self, tau: &[Option<bool>]) -> [bool; 2] {
        let mut found = [false; 2];
        let mut assign = tau.to_vec();
        self.reach(self.root, &mut assign, &mut found);
        found
    }

    fn reach(&self, v: usize, assign: &mut [Option<bool>], found: &mut [bool; 2]) {
        if found[0] && found[1] {
            return;
        }
        match self.nodes[v] {
            DtNode::Leaf(c) => found[c as usize] = true,
            DtNode::Inner { feature, zero, one } => match assign[feature] {
                Some(false) => self.reach(zero, assign, found),
                Some(true) => self.reach(one, assign, found),
                None => {
                    assign[feature] = Some(false);
                    self.reach(zero, assign, found);
                    assign[feature] = Some(true);
                    self.reach(one, assign, found);
                    assign[feature] = None;
                }
            },
        }
    }

    /// True if along every path the tested features appear in the order given.
    pub fn respects_order(&self, order: &[usize]) -> bool {
        let mut level = vec![usize::MAX; self.features.len()];
        for (i, &f) in order.iter().enumerate() {
            level[f] = i;
        }
        self.nodes.iter().all(|n| match *n {
            DtNode::Leaf(_) => true,
            DtNode::Inner { feature, zero, one } => [zero, one].iter().all(|&c| {
                match self.nodes[c] {
                    DtNode::Leaf(_) => true,
                    DtNode::Inner { feature: g, .. } => {
                        level[feature] != usize::MAX
                            && level[g] != usize::MAX
                            && level[feature] < level[g]
                    }
                }
            }),
        })
    }

    /// A total feature order the tree respects, preferring smaller feature
    /// indices among unconstrained choices. `None` if no such order exists.
    pub fn infer_order(&self) -> Option<Vec<usize>> {
        let n = self.features.len();
        let mut succ = vec![BTreeSet::new(); n];
        for node in &self.nodes {
            if let DtNode::Inner { feature, zero, one } = *node {
                for c in [zero, one] {
                    if let DtNode::Inner { feature: g, .. } = self.nodes[c] {
                        succ[feature].insert(g);
                    }
                }
            }
        }
        topological_order(&succ)
    }

    pub(crate) fn remap(&self, features: Vec<String>, map: &[usize]) -> DecisionTree {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                DtNode::Inner { feature, zero, one } => DtNode::Inner {
                    feature: map[feature],
                    zero,
                    one,
                },
                leaf => leaf,
            })
            .collect();
        DecisionTree {
            features,
            nodes,
            root: self.root,
        }
    }
}

impl Classifier for DecisionTree {
    fn feature_names(&self) -> &[String] {
        &self.features
    }

    fn classify(&self, e: &[bool]) -> bool {
        match self.nodes[self.leaf_for(e)] {
            DtNode::Leaf(c) => c,
            DtNode::Inner { .. } => unreachable!(),
        }
    }
}

/// Kahn's algorithm with the smallest available vertex first.
pub(crate) fn topological_order(succ: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    let n = succ.len();
    let mut indeg = vec![0usize; n];
    for s in succ {
        for &g in s {
            indeg[g] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&f| indeg[f] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(f) = ready.pop_first() {
        order.push(f);
        for &g in &succ[f] {
            indeg[g] -= 1;
            if indeg[g] == 0 {
                ready.insert(g);
            }
        }
    }
    (order.len() == n).then_some(order)
}
