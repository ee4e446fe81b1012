use std::collections::{BTreeSet, HashMap};

use super::{check_feature, tree::topological_order, Classifier};
use crate::error::{Error, Result};

pub const T0: usize = 0;
pub const T1: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObddNode {
    Sink(bool),
    Inner { feature: usize, zero: usize, one: usize },
}

/// An ordered binary decision diagram. Node 0 is the 0-sink and node 1 the
/// 1-sink; every arc leads to a node whose feature comes later in `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obdd {
    features: Vec<String>,
    nodes: Vec<ObddNode>,
    source: usize,
    order: Vec<usize>,
}

pub struct ObddBuilder {
    nodes: Vec<ObddNode>,
}

impl Default for ObddBuilder {
    fn default() -> Self {
        ObddBuilder {
            nodes: vec![ObddNode::Sink(false), ObddNode::Sink(true)],
        }
    }
}

impl ObddBuilder {
    pub fn new() -> Self {
        ObddBuilder::default()
    }

    pub fn sink(class: bool) -> usize {
        class as usize
    }

    pub fn inner(&mut self, feature: usize, zero: usize, one: usize) -> usize {
        self.nodes.push(ObddNode::Inner { feature, zero, one });
        self.nodes.len() - 1
    }

    /// Replaces a previously allocated node; used to tie cyclic references
    /// while building layered gadgets top-down.
    pub fn set(&mut self, id: usize, feature: usize, zero: usize, one: usize) {
        self.nodes[id] = ObddNode::Inner { feature, zero, one };
    }

    /// Allocates a placeholder node to be filled with [`ObddBuilder::set`].
    pub fn reserve(&mut self) -> usize {
        self.nodes.push(ObddNode::Sink(false));
        self.nodes.len() - 1
    }

    pub fn build(self, features: Vec<String>, source: usize, order: Vec<usize>) -> Result<Obdd> {
        Obdd::new(features, self.nodes, source, order)
    }
}

impl Obdd {
    pub fn new(
        features: Vec<String>,
        nodes: Vec<ObddNode>,
        source: usize,
        order: Vec<usize>,
    ) -> Result<Self> {
        let n = features.len();
        if nodes.len() < 2 || nodes[T0] != ObddNode::Sink(false) || nodes[T1] != ObddNode::Sink(true)
        {
            return Err(Error::Invalid("nodes 0 and 1 must be the two sinks".into()));
        }
        if source >= nodes.len() {
            return Err(Error::Invalid(format!("source {source} is not a node")));
        }
        let mut level = vec![usize::MAX; n];
        for (i, &f) in order.iter().enumerate() {
            check_feature(f, n)?;
            if level[f] != usize::MAX {
                return Err(Error::NotOrdered(format!(
                    "feature `{}` appears twice in the order",
                    features[f]
                )));
            }
            level[f] = i;
        }
        if order.len() != n {
            return Err(Error::NotOrdered(
                "order does not cover every feature".into(),
            ));
        }
        for (v, node) in nodes.iter().enumerate().skip(2) {
            let ObddNode::Inner { feature, zero, one } = *node else {
                return Err(Error::Invalid(format!("node {v} is an extra sink")));
            };
            check_feature(feature, n)?;
            for c in [zero, one] {
                match nodes.get(c) {
                    None => return Err(Error::Invalid(format!("arc to missing node {c}"))),
                    Some(ObddNode::Inner { feature: g, .. }) if level[*g] <= level[feature] => {
                        return Err(Error::NotOrdered(format!(
                            "arc from `{}` to `{}` goes against the order",
                            features[feature], features[*g]
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(Obdd {
            features,
            nodes,
            source,
            order,
        })
    }

    /// A total order compatible with every arc of `nodes`, smallest feature
    /// index first among unconstrained choices.
    pub fn infer_order(n: usize, nodes: &[ObddNode]) -> Option<Vec<usize>> {
        let mut succ = vec![BTreeSet::new(); n];
        for node in nodes {
            if let ObddNode::Inner { feature, zero, one } = *node {
                for c in [zero, one] {
                    if let Some(ObddNode::Inner { feature: g, .. }) = nodes.get(c) {
                        if feature >= n || *g >= n {
                            return None;
                        }
                        succ[feature].insert(*g);
                    }
                }
            }
        }
        topological_order(&succ)
    }

    pub fn constant(features: Vec<String>, order: Vec<usize>, class: bool) -> Result<Self> {
        ObddBuilder::new().build(features, class as usize, order)
    }

    pub fn nodes(&self) -> &[ObddNode] {
        &self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Position of every feature in the order.
    pub fn levels(&self) -> Vec<usize> {
        let mut level = vec![0; self.features.len()];
        for (i, &f) in self.order.iter().enumerate() {
            level[f] = i;
        }
        level
    }

    pub fn sink_for(&self, e: &[bool]) -> usize {
        let mut v = self.source;
        while let ObddNode::Inner { feature, zero, one } = self.nodes[v] {
            v = if e[feature] { one } else { zero };
        }
        v
    }

    /// Which sinks `[t0, t1]` are reachable from the source along arcs
    /// consistent with `tau`.
    pub fn reachable_sinks(&self, tau: &[Option<bool>]) -> [bool; 2] {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.source];
        seen[self.source] = true;
        while let Some(v) = stack.pop() {
            if let ObddNode::Inner { feature, zero, one } = self.nodes[v] {
                let next: &[usize] = match tau[feature] {
                    Some(false) => &[zero],
                    Some(true) => &[one],
                    None => &[zero, one],
                };
                for &c in next {
                    if !std::mem::replace(&mut seen[c], true) {
                        stack.push(c);
                    }
                }
            }
            if seen[T0] && seen[T1] {
                break;
            }
        }
        [seen[T0], seen[T1]]
    }

    /// Nodes reachable from the source. The sinks are always counted.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[T0] = true;
        seen[T1] = true;
        seen[self.source] = true;
        let mut stack = vec![self.source];
        while let Some(v) = stack.pop() {
            if let ObddNode::Inner { zero, one, .. } = self.nodes[v] {
                for c in [zero, one] {
                    if !std::mem::replace(&mut seen[c], true) {
                        stack.push(c);
                    }
                }
            }
        }
        seen
    }

    /// `|V(D)|`: reachable nodes including both sinks.
    pub fn size(&self) -> usize {
        self.reachable().iter().filter(|&&s| s).count()
    }

    /// True if every source-to-sink path tests every feature, in order, and
    /// the arena holds no unreachable inner nodes.
    pub fn is_complete(&self) -> bool {
        let n = self.features.len();
        let level = self.levels();
        let at = |v: usize| match self.nodes[v] {
            ObddNode::Sink(_) => n,
            ObddNode::Inner { feature, .. } => level[feature],
        };
        if at(self.source) != 0 && !(n == 0 && self.source < 2) {
            return false;
        }
        if self.reachable().iter().skip(2).any(|s| !s) {
            return false;
        }
        self.nodes.iter().all(|node| match *node {
            ObddNode::Sink(_) => true,
            ObddNode::Inner { feature, zero, one } => {
                at(zero) == level[feature] + 1 && at(one) == level[feature] + 1
            }
        })
    }

    /// An equivalent complete diagram over the same order. Skipped features
    /// are filled in with padding nodes whose two arcs coincide. Returns an
    /// identical diagram when it is already complete.
    pub fn complete(&self) -> Obdd {
        if self.is_complete() {
            return self.clone();
        }
        let level = self.levels();
        let mut out = ObddBuilder::new();
        let mut memo = HashMap::new();
        let source = self.pad(self.source, 0, &level, &mut out, &mut memo);
        Obdd {
            features: self.features.clone(),
            nodes: out.nodes,
            source,
            order: self.order.clone(),
        }
    }

    fn pad(
        &self,
        v: usize,
        p: usize,
        level: &[usize],
        out: &mut ObddBuilder,
        memo: &mut HashMap<(usize, usize), usize>,
    ) -> usize {
        if p == self.order.len() {
            return v;
        }
        if let Some(&id) = memo.get(&(v, p)) {
            return id;
        }
        let f = self.order[p];
        let id = match self.nodes[v] {
            ObddNode::Inner { feature, zero, one } if level[feature] == p => {
                let z = self.pad(zero, p + 1, level, out, memo);
                let o = self.pad(one, p + 1, level, out, memo);
                out.inner(f, z, o)
            }
            _ => {
                let c = self.pad(v, p + 1, level, out, memo);
                out.inner(f, c, c)
            }
        };
        memo.insert((v, p), id);
        id
    }

    /// Largest number of nodes testing the same feature in the complete form.
    pub fn width(&self) -> usize {
        let complete = self.complete();
        let mut count = vec![0usize; self.features.len()];
        for node in &complete.nodes {
            if let ObddNode::Inner { feature, .. } = *node {
                count[feature] += 1;
            }
        }
        count.into_iter().max().unwrap_or(0)
    }

    /// The same diagram validated against another total order.
    pub fn with_order(&self, order: Vec<usize>) -> Result<Obdd> {
        Obdd::new(self.features.clone(), self.nodes.clone(), self.source, order)
    }

    /// Moves the diagram into a larger universe. Unless `order` is given,
    /// features it did not know are appended to the end of its order.
    pub(crate) fn remap(&self, features: Vec<String>, map: &[usize], order: Option<&[usize]>) -> Result<Obdd> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                ObddNode::Inner { feature, zero, one } => ObddNode::Inner {
                    feature: map[feature],
                    zero,
                    one,
                },
                sink => sink,
            })
            .collect();
        let order = match order {
            Some(o) => o.to_vec(),
            None => {
                let mut order: Vec<usize> = self.order.iter().map(|&f| map[f]).collect();
                let mut known = vec![false; features.len()];
                for &f in &order {
                    known[f] = true;
                }
                order.extend((0..features.len()).filter(|&f| !known[f]));
                order
            }
        };
        Ok(Obdd::new(features, nodes, self.source, order)?.complete())
    }
}

impl Classifier for Obdd {
    fn feature_names(&self) -> &[String] {
        &self.features
    }

    fn classify(&self, e: &[bool]) -> bool {
        self.sink_for(e) == T1
    }
}
