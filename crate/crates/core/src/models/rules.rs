use serde::{Deserialize, Serialize};

use super::{check_feature, Classifier};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub feature: usize,
    pub value: bool,
}

impl Literal {
    pub fn new(feature: usize, value: bool) -> Self {
        Literal { feature, value }
    }
}

/// A conjunction of literals. The empty term is satisfied by every example.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Term {
    pub literals: Vec<Literal>,
}

impl Term {
    pub fn new(literals: Vec<Literal>) -> Self {
        Term { literals }
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn satisfied_by(&self, e: &[bool]) -> bool {
        self.literals.iter().all(|l| e[l.feature] == l.value)
    }

    /// True if the term contains both `f = 0` and `f = 1` for some `f`.
    pub fn is_contradictory(&self) -> bool {
        self.literals.iter().any(|a| {
            self.literals
                .iter()
                .any(|b| a.feature == b.feature && a.value != b.value)
        })
    }

    pub fn features(&self) -> impl Iterator<Item = usize> + '_ {
        self.literals.iter().map(|l| l.feature)
    }

    fn check(&self, n: usize) -> Result<()> {
        self.literals
            .iter()
            .try_for_each(|l| check_feature(l.feature, n))
    }
}

/// A decision set `(T, b)`: classifies `1 - b` when some term applies and `b`
/// otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionSet {
    features: Vec<String>,
    pub terms: Vec<Term>,
    pub default: bool,
}

impl DecisionSet {
    pub fn new(features: Vec<String>, terms: Vec<Term>, default: bool) -> Result<Self> {
        for t in &terms {
            t.check(features.len())?;
        }
        Ok(DecisionSet {
            features,
            terms,
            default,
        })
    }

    /// `sum |t| + 1`.
    pub fn size(&self) -> usize {
        self.terms.iter().map(Term::len).sum::<usize>() + 1
    }

    /// The equivalent decision list: one rule per term followed by the default.
    pub fn to_list(&self) -> DecisionList {
        let mut rules: Vec<Rule> = self
            .terms
            .iter()
            .map(|t| Rule {
                term: t.clone(),
                class: !self.default,
            })
            .collect();
        rules.push(Rule {
            term: Term::default(),
            class: self.default,
        });
        DecisionList {
            features: self.features.clone(),
            rules,
        }
    }

    pub(crate) fn remap(&self, features: Vec<String>, map: &[usize]) -> DecisionSet {
        DecisionSet {
            features,
            terms: self.terms.iter().map(|t| remap_term(t, map)).collect(),
            default: self.default,
        }
    }
}

impl Classifier for DecisionSet {
    fn feature_names(&self) -> &[String] {
        &self.features
    }

    fn classify(&self, e: &[bool]) -> bool {
        if self.terms.iter().any(|t| t.satisfied_by(e)) {
            !self.default
        } else {
            self.default
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub term: Term,
    pub class: bool,
}

/// An ordered rule list whose last rule has the empty term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionList {
    features: Vec<String>,
    pub rules: Vec<Rule>,
}

impl DecisionList {
    pub fn new(features: Vec<String>, rules: Vec<Rule>) -> Result<Self> {
        match rules.last() {
            Some(r) if r.term.is_empty() => {}
            _ => {
                return Err(Error::Invalid(
                    "decision list must end with a rule whose term is empty".into(),
                ))
            }
        }
        for r in &rules {
            r.term.check(features.len())?;
        }
        Ok(DecisionList { features, rules })
    }

    /// `sum (|t| + 1)`.
    pub fn size(&self) -> usize {
        self.rules.iter().map(|r| r.term.len() + 1).sum()
    }

    /// Index of the first rule whose term `e` satisfies.
    pub fn classifying_rule(&self, e: &[bool]) -> usize {
        self.rules
            .iter()
            .position(|r| r.term.satisfied_by(e))
            .expect("last rule has an empty term")
    }

    pub(crate) fn remap(&self, features: Vec<String>, map: &[usize]) -> DecisionList {
        DecisionList {
            features,
            rules: self
                .rules
                .iter()
                .map(|r| Rule {
                    term: remap_term(&r.term, map),
                    class: r.class,
                })
                .collect(),
        }
    }
}

impl Classifier for DecisionList {
    fn feature_names(&self) -> &[String] {
        &self.features
    }

    fn classify(&self, e: &[bool]) -> bool {
        self.rules[self.classifying_rule(e)].class
    }
}

fn remap_term(t: &Term, map: &[usize]) -> Term {
    Term::new(
        t.literals
            .iter()
            .map(|l| Literal::new(map[l.feature], l.value))
            .collect(),
    )
}
