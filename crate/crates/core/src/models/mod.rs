//! Model types, examples and structural parameters.

mod diagram;
mod example;
mod rules;
mod tree;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use diagram::{Obdd, ObddBuilder, ObddNode, T0, T1};
pub use example::{Example, PartialExample};
pub use rules::{DecisionList, DecisionSet, Literal, Rule, Term};
pub use tree::{DecisionTree, DtBuilder, DtNode, LeafPath};

use crate::error::{Error, Result};

/// Anything that maps a total example to a class.
pub trait Classifier {
    fn feature_names(&self) -> &[String];

    fn classify(&self, e: &[bool]) -> bool;

    fn num_features(&self) -> usize {
        self.feature_names().len()
    }
}

pub(crate) fn check_feature(f: usize, n: usize) -> Result<()> {
    if f < n {
        Ok(())
    } else {
        Err(Error::FeatureOutOfRange { index: f, len: n })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Dt,
    Ds,
    Dl,
    Obdd,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Dt => "dt",
            ModelKind::Ds => "ds",
            ModelKind::Dl => "dl",
            ModelKind::Obdd => "obdd",
        })
    }
}

/// A majority-vote ensemble of an odd number of models of one kind over a
/// common feature universe.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    features: Vec<String>,
    elements: Vec<Model>,
    shared_order: Option<Vec<usize>>,
}

impl Ensemble {
    /// Elements must already share the exact same feature list. With a shared
    /// order all elements must be diagrams; they are re-validated and
    /// completed against it.
    pub fn new(elements: Vec<Model>, shared_order: Option<Vec<usize>>) -> Result<Self> {
        if elements.len() % 2 == 0 {
            return Err(Error::EvenEnsemble(elements.len()));
        }
        let features = elements[0].feature_names().to_vec();
        let kind = elements[0].kind();
        let mut checked = Vec::with_capacity(elements.len());
        for m in elements {
            if matches!(m, Model::Ensemble(_)) || m.kind() != kind {
                return Err(Error::MixedEnsemble);
            }
            if m.feature_names() != features.as_slice() {
                return Err(Error::Invalid(
                    "ensemble elements must share one feature universe".into(),
                ));
            }
            checked.push(match (&shared_order, m) {
                (Some(order), Model::Obdd(o)) => Model::Obdd(o.with_order(order.clone())?.complete()),
                (Some(_), _) => {
                    return Err(Error::Invalid(
                        "a shared order only applies to diagram ensembles".into(),
                    ))
                }
                (None, m) => m,
            });
        }
        Ok(Ensemble {
            features,
            elements: checked,
            shared_order,
        })
    }

    /// Embeds every element into the union of their universes, in order of
    /// first appearance, and builds an ensemble without a shared order.
    pub fn over_union(elements: Vec<Model>) -> Result<Self> {
        let mut universe: Vec<String> = Vec::new();
        let mut seen = HashMap::new();
        for m in &elements {
            for name in m.feature_names() {
                if !seen.contains_key(name) {
                    seen.insert(name.clone(), universe.len());
                    universe.push(name.clone());
                }
            }
        }
        let embedded = elements
            .iter()
            .map(|m| m.embed(&universe))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(embedded, None)
    }

    pub fn elements(&self) -> &[Model] {
        &self.elements
    }

    pub fn shared_order(&self) -> Option<&[usize]> {
        self.shared_order.as_deref()
    }

    pub fn kind(&self) -> ModelKind {
        self.elements[0].kind()
    }

    /// Number of positive votes needed for class 1.
    pub fn threshold(&self) -> usize {
        self.elements.len() / 2 + 1
    }
}

impl Classifier for Ensemble {
    fn feature_names(&self) -> &[String] {
        &self.features
    }

    fn classify(&self, e: &[bool]) -> bool {
        let ones = self.elements.iter().filter(|m| m.classify(e)).count();
        ones >= self.threshold()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Dt(DecisionTree),
    Ds(DecisionSet),
    Dl(DecisionList),
    Obdd(Obdd),
    Ensemble(Ensemble),
}

impl Model {
    /// Kind of the model, or of the elements for an ensemble.
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Dt(_) => ModelKind::Dt,
            Model::Ds(_) => ModelKind::Ds,
            Model::Dl(_) => ModelKind::Dl,
            Model::Obdd(_) => ModelKind::Obdd,
            Model::Ensemble(e) => e.kind(),
        }
    }

    /// The ensemble elements, or the model itself.
    pub fn elements(&self) -> &[Model] {
        match self {
            Model::Ensemble(e) => e.elements(),
            m => std::slice::from_ref(m),
        }
    }

    pub fn as_ensemble(&self) -> Option<&Ensemble> {
        match self {
            Model::Ensemble(e) => Some(e),
            _ => None,
        }
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names().iter().position(|f| f == name)
    }

    /// Rewrites the model over `universe`, which must contain all of its
    /// features. Diagrams get the new features appended to their order.
    pub fn embed(&self, universe: &[String]) -> Result<Model> {
        self.embed_ordered(universe, None)
    }

    /// Like [`Model::embed`], but diagrams are re-read under `order`, a total
    /// order of `universe`, instead of their own extended order.
    pub fn embed_ordered(&self, universe: &[String], order: Option<&[usize]>) -> Result<Model> {
        let index: HashMap<&str, usize> = universe
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_str(), i))
            .collect();
        let map = self
            .feature_names()
            .iter()
            .map(|f| {
                index
                    .get(f.as_str())
                    .copied()
                    .ok_or_else(|| Error::UndefinedFeature(f.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let features = universe.to_vec();
        Ok(match self {
            Model::Dt(t) => Model::Dt(t.remap(features, &map)),
            Model::Ds(s) => Model::Ds(s.remap(features, &map)),
            Model::Dl(l) => Model::Dl(l.remap(features, &map)),
            Model::Obdd(o) => Model::Obdd(o.remap(features, &map, order)?),
            Model::Ensemble(e) => {
                let elements = e
                    .elements
                    .iter()
                    .map(|m| m.embed_ordered(universe, order))
                    .collect::<Result<Vec<_>>>()?;
                let shared_order = e
                    .shared_order
                    .as_ref()
                    .map(|_| match &elements[0] {
                        Model::Obdd(o) => o.order().to_vec(),
                        _ => unreachable!("shared orders only exist for diagrams"),
                    });
                Model::Ensemble(Ensemble::new(elements, shared_order)?)
            }
        })
    }

    /// Removes contradictory tree paths and completes diagrams.
    pub fn normalize(self) -> Model {
        match self {
            Model::Dt(t) => Model::Dt(t.simplify()),
            Model::Obdd(o) => Model::Obdd(o.complete()),
            Model::Ensemble(e) => Model::Ensemble(Ensemble {
                features: e.features,
                elements: e.elements.into_iter().map(Model::normalize).collect(),
                shared_order: e.shared_order,
            }),
            m => m,
        }
    }

    /// Element size: leaves for trees, `sum |t| + 1` for decision sets,
    /// `sum (|t| + 1)` for decision lists, `|V(D)|` for diagrams.
    pub fn size(&self) -> usize {
        match self {
            Model::Dt(t) => t.size(),
            Model::Ds(s) => s.size(),
            Model::Dl(l) => l.size(),
            Model::Obdd(o) => o.size(),
            Model::Ensemble(e) => e.elements.iter().map(Model::size).max().unwrap_or(0),
        }
    }

    /// Measures every structural parameter that applies to this model.
    pub fn parameters(&self) -> Parameters {
        let elements = self.elements();
        let max = |f: &dyn Fn(&Model) -> Option<usize>| elements.iter().filter_map(f).max();
        Parameters {
            ens_size: Some(elements.len()),
            mnl_size: max(&|m| match m {
                Model::Dt(t) => Some(t.mnl()),
                _ => None,
            }),
            terms_elem: max(&|m| match m {
                Model::Ds(s) => Some(s.terms.len()),
                Model::Dl(l) => Some(l.rules.len()),
                _ => None,
            }),
            term_size: max(&|m| match m {
                Model::Ds(s) => Some(s.terms.iter().map(Term::len).max().unwrap_or(0)),
                Model::Dl(l) => Some(l.rules.iter().map(|r| r.term.len()).max().unwrap_or(0)),
                _ => None,
            }),
            width_elem: max(&|m| match m {
                Model::Obdd(o) => Some(o.width()),
                _ => None,
            }),
            size_elem: max(&|m| Some(m.size())),
            xp_size: None,
        }
    }
}

impl Classifier for Model {
    fn feature_names(&self) -> &[String] {
        match self {
            Model::Dt(t) => t.feature_names(),
            Model::Ds(s) => s.feature_names(),
            Model::Dl(l) => l.feature_names(),
            Model::Obdd(o) => o.feature_names(),
            Model::Ensemble(e) => e.feature_names(),
        }
    }

    fn classify(&self, e: &[bool]) -> bool {
        match self {
            Model::Dt(t) => t.classify(e),
            Model::Ds(s) => s.classify(e),
            Model::Dl(l) => l.classify(e),
            Model::Obdd(o) => o.classify(e),
            Model::Ensemble(x) => x.classify(e),
        }
    }
}

/// Structural parameters. Fields that do not apply to a model are `None`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub ens_size: Option<usize>,
    pub mnl_size: Option<usize>,
    pub terms_elem: Option<usize>,
    pub term_size: Option<usize>,
    pub width_elem: Option<usize>,
    pub size_elem: Option<usize>,
    pub xp_size: Option<usize>,
}

/// Checks that `e` has one value per feature of `m`.
pub fn check_example(m: &dyn Classifier, e: &[bool]) -> Result<()> {
    if e.len() == m.num_features() {
        Ok(())
    } else {
        Err(Error::ExampleLength {
            expected: m.num_features(),
            got: e.len(),
        })
    }
}
