//! Explanation queries, witness checking and the exhaustive reference oracle.

mod enumerate;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use enumerate::{assignments, Combinations};

use crate::error::{Error, Result};
use crate::models::{check_example, Classifier, Example, PartialExample};

/// Default number of features the exhaustive routines accept.
pub const DEFAULT_GUARD: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// A set of features whose values in `e` force the class of `e`.
    #[serde(rename = "laxp")]
    LocalAbductive,
    /// A set of features that can be changed in `e` to change its class.
    #[serde(rename = "lcxp")]
    LocalContrastive,
    /// A partial example all of whose completions get class `c`.
    #[serde(rename = "gaxp")]
    GlobalAbductive,
    /// A partial example none of whose completions gets class `c`.
    #[serde(rename = "gcxp")]
    GlobalContrastive,
}

impl Kind {
    pub fn is_local(self) -> bool {
        matches!(self, Kind::LocalAbductive | Kind::LocalContrastive)
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::LocalAbductive => "laxp",
            Kind::LocalContrastive => "lcxp",
            Kind::GlobalAbductive => "gaxp",
            Kind::GlobalContrastive => "gcxp",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Minimality {
    Subset,
    Cardinality,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Example(Example),
    Class(bool),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub kind: Kind,
    pub minimality: Minimality,
    pub target: Target,
    /// Largest admissible witness size.
    pub budget: Option<usize>,
}

impl Query {
    pub fn local(kind: Kind, e: Example, minimality: Minimality, budget: Option<usize>) -> Self {
        debug_assert!(kind.is_local());
        Query {
            kind,
            minimality,
            target: Target::Example(e),
            budget,
        }
    }

    pub fn global(kind: Kind, class: bool, minimality: Minimality, budget: Option<usize>) -> Self {
        debug_assert!(!kind.is_local());
        Query {
            kind,
            minimality,
            target: Target::Class(class),
            budget,
        }
    }

    pub fn example(&self) -> Option<&Example> {
        match &self.target {
            Target::Example(e) => Some(e),
            Target::Class(_) => None,
        }
    }

    pub fn class(&self) -> Option<bool> {
        match self.target {
            Target::Class(c) => Some(c),
            Target::Example(_) => None,
        }
    }

    /// Checks that the target matches the kind and the model's universe.
    pub fn validate(&self, m: &dyn Classifier) -> Result<()> {
        match (&self.target, self.kind.is_local()) {
            (Target::Example(e), true) => check_example(m, e),
            (Target::Class(_), false) => Ok(()),
            (Target::Example(_), false) => Err(Error::Invalid(format!(
                "{} queries take a class target",
                self.kind
            ))),
            (Target::Class(_), true) => Err(Error::Invalid(format!(
                "{} queries take an example target",
                self.kind
            ))),
        }
    }

    pub(crate) fn expect_example(&self) -> &Example {
        self.example().expect("validated local query")
    }

    pub(crate) fn expect_class(&self) -> bool {
        self.class().expect("validated global query")
    }

    pub(crate) fn within_budget(&self, size: usize) -> bool {
        self.budget.is_none_or(|k| size <= k)
    }
}

/// A feature set for local queries, a partial example for global ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Features(Vec<usize>),
    Assignment(PartialExample),
}

impl Witness {
    pub fn size(&self) -> usize {
        match self {
            Witness::Features(s) => s.len(),
            Witness::Assignment(tau) => tau.size(),
        }
    }

    pub fn features(&self) -> Option<&[usize]> {
        match self {
            Witness::Features(s) => Some(s),
            Witness::Assignment(_) => None,
        }
    }

    pub fn assignment(&self) -> Option<&PartialExample> {
        match self {
            Witness::Assignment(t) => Some(t),
            Witness::Features(_) => None,
        }
    }

    fn check_shape(&self, q: &Query, n: usize) -> Result<()> {
        match (self, q.kind.is_local()) {
            (Witness::Features(s), true) => {
                if let Some(&f) = s.iter().find(|&&f| f >= n) {
                    return Err(Error::FeatureOutOfRange { index: f, len: n });
                }
                Ok(())
            }
            (Witness::Assignment(t), false) if t.universe() == n => Ok(()),
            (Witness::Assignment(t), false) => Err(Error::ExampleLength {
                expected: n,
                got: t.universe(),
            }),
            _ => Err(Error::Invalid(format!(
                "witness shape does not fit a {} query",
                q.kind
            ))),
        }
    }
}

/// Calls `f` on every completion of `tau` and returns true if it holds on
/// all of them. Stops at the first failure.
pub fn for_all_completions(tau: &[Option<bool>], mut f: impl FnMut(&[bool]) -> bool) -> bool {
    let free: Vec<usize> = (0..tau.len()).filter(|&i| tau[i].is_none()).collect();
    let mut e: Vec<bool> = tau.iter().map(|v| v.unwrap_or(false)).collect();
    let total = 1u64 << free.len();
    for a in 0..total {
        for (j, &i) in free.iter().enumerate() {
            e[i] = a >> j & 1 == 1;
        }
        if !f(&e) {
            return false;
        }
    }
    true
}

fn guard_free(free: usize, guard: usize) -> Result<()> {
    if free > guard {
        Err(Error::TooLarge {
            features: free,
            guard,
        })
    } else {
        Ok(())
    }
}

/// The partial assignment a local witness fixes: `e` restricted to `A` for
/// abductive queries and to the complement of `A` for contrastive ones.
pub(crate) fn local_fixing(e: &Example, set: &[usize], contrastive: bool) -> Vec<Option<bool>> {
    let mut fixed = vec![contrastive; e.len()];
    for &f in set {
        fixed[f] = !contrastive;
    }
    e.iter()
        .zip(fixed)
        .map(|(&b, keep)| keep.then_some(b))
        .collect()
}

/// Decides whether `w` is a (not necessarily minimal) explanation for `q`,
/// by enumerating the completions it leaves open. The budget of `q` is not
/// checked. Fails with [`Error::TooLarge`] when more than `guard` features
/// are left open.
pub fn is_explanation(m: &dyn Classifier, q: &Query, w: &Witness, guard: usize) -> Result<bool> {
    q.validate(m)?;
    w.check_shape(q, m.num_features())?;
    let (tau, class, negate) = match (q.kind, w) {
        (Kind::LocalAbductive, Witness::Features(s)) => {
            let e = q.expect_example();
            (local_fixing(e, s, false), m.classify(e), false)
        }
        (Kind::LocalContrastive, Witness::Features(s)) => {
            let e = q.expect_example();
            (local_fixing(e, s, true), m.classify(e), true)
        }
        (Kind::GlobalAbductive, Witness::Assignment(t)) => {
            (t.values().to_vec(), q.expect_class(), false)
        }
        (Kind::GlobalContrastive, Witness::Assignment(t)) => {
            (t.values().to_vec(), !q.expect_class(), false)
        }
        _ => unreachable!("shape checked"),
    };
    guard_free(tau.iter().filter(|v| v.is_none()).count(), guard)?;
    let all_agree = for_all_completions(&tau, |e| m.classify(e) == class);
    Ok(all_agree != negate)
}

/// True if `w` is an explanation and dropping any single feature from it
/// breaks that. All four kinds are monotone, so this is subset-minimality.
pub fn verify_subset_minimal(
    m: &dyn Classifier,
    q: &Query,
    w: &Witness,
    guard: usize,
) -> Result<bool> {
    if !is_explanation(m, q, w, guard)? {
        return Ok(false);
    }
    for smaller in single_deletions(w) {
        if is_explanation(m, q, &smaller, guard)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn single_deletions(w: &Witness) -> Vec<Witness> {
    match w {
        Witness::Features(s) => (0..s.len())
            .map(|i| {
                let mut t = s.clone();
                t.remove(i);
                Witness::Features(t)
            })
            .collect(),
        Witness::Assignment(tau) => tau
            .domain()
            .into_iter()
            .map(|f| Witness::Assignment(tau.without(f)))
            .collect(),
    }
}

/// Classification of all `2^n` examples; bit `i` of the index is feature `i`.
pub struct TruthTable {
    n: usize,
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn new(m: &dyn Classifier, guard: usize) -> Result<Self> {
        let n = m.num_features();
        guard_free(n, guard)?;
        let bits = (0..1u64 << n)
            .map(|i| m.classify(&Example::from_index(n, i)))
            .collect();
        Ok(TruthTable { n, bits })
    }

    pub fn num_features(&self) -> usize {
        self.n
    }

    pub fn get(&self, index: u64) -> bool {
        self.bits[index as usize]
    }

    /// True if every completion of the assignment `values` on `mask` has
    /// class `c`.
    pub fn uniform(&self, mask: u64, values: u64, c: bool) -> bool {
        let full = (1u64 << self.n) - 1;
        let free = full & !mask;
        let base = values & mask;
        let mut sub = free;
        loop {
            if self.bits[(base | sub) as usize] != c {
                return false;
            }
            if sub == 0 {
                return true;
            }
            sub = (sub - 1) & free;
        }
    }

    fn check(&self, q: &Query, w: &Witness) -> bool {
        match (q.kind, w) {
            (Kind::LocalAbductive | Kind::LocalContrastive, Witness::Features(s)) => {
                let e = q.expect_example();
                let ei = e.to_index();
                let set = s.iter().fold(0u64, |acc, &f| acc | 1 << f);
                let c = self.get(ei);
                if q.kind == Kind::LocalAbductive {
                    self.uniform(set, ei, c)
                } else {
                    let full = (1u64 << self.n) - 1;
                    !self.uniform(full & !set, ei, c)
                }
            }
            (Kind::GlobalAbductive | Kind::GlobalContrastive, Witness::Assignment(tau)) => {
                let (mask, values) = tau.iter().fold((0u64, 0u64), |(m, v), (f, b)| {
                    (m | 1 << f, v | (b as u64) << f)
                });
                let c = q.expect_class() == (q.kind == Kind::GlobalAbductive);
                self.uniform(mask, values, c)
            }
            _ => false,
        }
    }

    /// Smallest explanation within the budget, scanning sets by size and
    /// then lexicographically, and for global kinds each set's assignments in
    /// binary counting order with the first feature most significant.
    pub fn min_explanation(&self, q: &Query) -> Option<Witness> {
        let limit = q.budget.unwrap_or(self.n).min(self.n);
        for size in 0..=limit {
            for set in Combinations::new(self.n, size) {
                if q.kind.is_local() {
                    let w = Witness::Features(set);
                    if self.check(q, &w) {
                        return Some(w);
                    }
                } else {
                    for tau in assignments(self.n, &set) {
                        let w = Witness::Assignment(tau);
                        if self.check(q, &w) {
                            return Some(w);
                        }
                    }
                }
            }
        }
        None
    }
}

/// Exhaustive reference solver. Returns a minimum-cardinality explanation
/// within the query budget (which is also subset-minimal), or `None`.
pub fn oracle_min(m: &dyn Classifier, q: &Query, guard: usize) -> Result<Option<Witness>> {
    q.validate(m)?;
    Ok(TruthTable::new(m, guard)?.min_explanation(q))
}

/// True if every example gets the class of the all-zero example.
pub fn is_homogeneous(m: &dyn Classifier, guard: usize) -> Result<bool> {
    guard_free(m.num_features(), guard)?;
    let c = m.classify(&vec![false; m.num_features()]);
    Ok(for_all_completions(&vec![None; m.num_features()], |e| {
        m.classify(e) == c
    }))
}

/// An example with at most `k` ones classified differently from the
/// all-zero example, if there is one. Examples are scanned by number of ones
/// and then lexicographically by the set of ones.
pub fn differing_low_weight_example(
    m: &dyn Classifier,
    k: usize,
    guard: usize,
) -> Result<Option<Example>> {
    let n = m.num_features();
    guard_free(n, guard)?;
    let zero = Example::zeros(n);
    let c = m.classify(&zero);
    for size in 0..=k.min(n) {
        for ones in Combinations::new(n, size) {
            let e = zero.flip(&ones);
            if m.classify(&e) != c {
                return Ok(Some(e));
            }
        }
    }
    Ok(None)
}
