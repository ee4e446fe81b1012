//! Route selection: model-specific polynomial algorithms first, then
//! product constructions under a node cap, then circuit compilation with
//! the exhaustive oracle under the feature guard.

use std::fmt;
use std::str::FromStr;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use serde::Serialize;

use crate::circuits::{circuit_explain_bruteforce, compile};
use crate::dslist::{dle_min_lcxp_branch_traced, lists_of, BranchStats};
use crate::dt::{dt_check, dt_ensemble_to_dt, dt_min_lcxp, dt_subset_min, dt_xp_search};
use crate::error::{Error, Result};
use crate::explain::{
    is_explanation, oracle_min, single_deletions, Kind, Minimality, Query, Witness, DEFAULT_GUARD,
};
use crate::models::{Classifier, DecisionTree, Model, ModelKind, Obdd};
use crate::obdd::{obdd_check, obdd_ensemble_product, obdd_min_lcxp, obdd_subset_min, obdd_xp_search};

/// Default node cap for product constructions.
pub const DEFAULT_CAP_NODES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Tree algorithms on a single decision tree.
    Dt,
    /// Diagram algorithms on a single OBDD.
    Obdd,
    /// Bounded branching for contrastive queries on decision sets and lists.
    Branching,
    /// Ensemble flattened into one tree or diagram, then `Dt` or `Obdd`.
    Product,
    /// Majority circuit plus the exhaustive oracle.
    Compile,
    /// Exhaustive oracle on the model itself.
    BruteForce,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Dt => "dt",
            Route::Obdd => "obdd",
            Route::Branching => "branching",
            Route::Product => "product",
            Route::Compile => "compile",
            Route::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dt" => Route::Dt,
            "obdd" => Route::Obdd,
            "branching" => Route::Branching,
            "product" => Route::Product,
            "compile" => Route::Compile,
            "brute-force" => Route::BruteForce,
            other => return Err(Error::Invalid(format!("unknown route `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub route: Option<Route>,
    pub cap_nodes: usize,
    pub guard: usize,
    pub timeout: Option<Duration>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            route: None,
            cap_nodes: DEFAULT_CAP_NODES,
            guard: DEFAULT_GUARD,
            timeout: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub witness: Option<Witness>,
    pub route: Route,
    pub branch_stats: Option<BranchStats>,
}

/// The route chosen when none is forced.
pub fn auto_route(m: &Model, q: &Query) -> Route {
    match (m, m.kind()) {
        (Model::Dt(_), _) => Route::Dt,
        (Model::Obdd(_), _) => Route::Obdd,
        (_, ModelKind::Ds | ModelKind::Dl) if q.kind == Kind::LocalContrastive => Route::Branching,
        (Model::Ds(_) | Model::Dl(_), _) => Route::BruteForce,
        (Model::Ensemble(_), ModelKind::Dt) => Route::Product,
        (Model::Ensemble(e), ModelKind::Obdd) if e.shared_order().is_some() => Route::Product,
        _ => Route::Compile,
    }
}

fn as_dt(m: &Model) -> Result<&DecisionTree> {
    match m {
        Model::Dt(t) => Ok(t),
        _ => Err(Error::Invalid("route `dt` needs a decision tree".into())),
    }
}

fn as_obdd(m: &Model) -> Result<&Obdd> {
    match m {
        Model::Obdd(o) => Ok(o),
        _ => Err(Error::Invalid("route `obdd` needs an OBDD".into())),
    }
}

/// Subset-minimal queries with a budget are answered by the cardinality
/// search, since a greedy subset-minimal witness can exceed the budget even
/// when a small one exists.
fn wants_minimum(q: &Query) -> bool {
    q.minimality == Minimality::Cardinality || q.budget.is_some()
}

fn within(q: &Query, w: Option<Witness>) -> Option<Witness> {
    w.filter(|w| q.within_budget(w.size()))
}

fn solve_dt(t: &DecisionTree, q: &Query) -> Result<Option<Witness>> {
    q.validate(t)?;
    if q.kind == Kind::LocalContrastive {
        let e = q.example().expect("validated");
        return Ok(within(q, dt_min_lcxp(t, e).map(Witness::Features)));
    }
    if wants_minimum(q) {
        dt_xp_search(t, q)
    } else {
        dt_subset_min(t, q)
    }
}

fn solve_obdd(o: &Obdd, q: &Query) -> Result<Option<Witness>> {
    q.validate(o)?;
    if q.kind == Kind::LocalContrastive {
        let e = q.example().expect("validated");
        return Ok(within(q, obdd_min_lcxp(o, e).map(Witness::Features)));
    }
    if wants_minimum(q) {
        obdd_xp_search(o, q)
    } else {
        obdd_subset_min(o, q)
    }
}

/// Answers `q` on `m`. `None` in the solution means no explanation exists
/// within the budget.
pub fn explain(m: &Model, q: &Query, opts: &Options) -> Result<Solution> {
    q.validate(m)?;
    let route = opts.route.unwrap_or_else(|| auto_route(m, q));
    let mut branch_stats = None;
    let witness = match route {
        Route::Dt => solve_dt(as_dt(m)?, q)?,
        Route::Obdd => solve_obdd(as_obdd(m)?, q)?,
        Route::Branching => {
            if q.kind != Kind::LocalContrastive {
                return Err(Error::Invalid(
                    "route `branching` answers lcxp queries only".into(),
                ));
            }
            let lists = lists_of(m)?;
            let e = q.example().expect("validated");
            let k = q.budget.unwrap_or(m.num_features());
            let (w, stats) = dle_min_lcxp_branch_traced(&lists, e, k);
            branch_stats = Some(stats);
            w.map(Witness::Features)
        }
        Route::Product => {
            let Model::Ensemble(ens) = m else {
                return Err(Error::Invalid("route `product` needs an ensemble".into()));
            };
            match ens.kind() {
                ModelKind::Dt => solve_dt(&dt_ensemble_to_dt(ens, opts.cap_nodes)?.simplify(), q)?,
                ModelKind::Obdd => solve_obdd(&obdd_ensemble_product(ens, opts.cap_nodes)?, q)?,
                kind => {
                    return Err(Error::Invalid(format!(
                        "no product construction for {kind} ensembles"
                    )))
                }
            }
        }
        Route::Compile => {
            let class = match q.example() {
                Some(e) => m.classify(e),
                None => q.class().expect("validated"),
            };
            let c = compile(m, class)?;
            circuit_explain_bruteforce(&c, q, opts.guard)?
        }
        Route::BruteForce => oracle_min(m, q, opts.guard)?,
    };
    Ok(Solution {
        witness,
        route,
        branch_stats,
    })
}

/// [`explain`] on a worker thread, giving up with [`Error::Timeout`] after
/// `opts.timeout`. The worker is detached, not killed.
pub fn explain_with_timeout(m: &Model, q: &Query, opts: &Options) -> Result<Solution> {
    let Some(limit) = opts.timeout else {
        return explain(m, q, opts);
    };
    let (tx, rx) = mpsc::channel();
    let (m, q, o) = (m.clone(), q.clone(), opts.clone());
    thread::spawn(move || {
        let _ = tx.send(explain(&m, &q, &o));
    });
    rx.recv_timeout(limit).map_err(|_| Error::Timeout)?
}

/// Checks `w` with the model-specific polynomial checker where there is one
/// and by enumeration otherwise. The budget is not checked.
pub fn check(m: &Model, q: &Query, w: &Witness, guard: usize) -> Result<bool> {
    match m {
        Model::Dt(t) => dt_check(t, q, w),
        Model::Obdd(o) => obdd_check(o, q, w),
        _ => is_explanation(m, q, w, guard),
    }
}

/// Whether `w` is an explanation and, with `minimal`, also subset-minimal.
pub fn verify(m: &Model, q: &Query, w: &Witness, minimal: bool, guard: usize) -> Result<bool> {
    q.validate(m)?;
    if !check(m, q, w, guard)? {
        return Ok(false);
    }
    if minimal {
        for smaller in single_deletions(w) {
            if check(m, q, &smaller, guard)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
