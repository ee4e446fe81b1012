//! Boolean circuits with majority gates, compilers from every model kind and
//! an exhaustive explanation solver over compiled circuits.
//!
//! Compiled circuits carry the closed-form rankwidth bound that holds for
//! their shape as metadata; rankwidth itself is never computed.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::dslist::lists_of;
use crate::error::{Error, Result};
use crate::explain::{oracle_min, Query, Witness};
use crate::models::{
    Classifier, DecisionList, DecisionSet, DecisionTree, Ensemble, Model, ModelKind, Obdd,
    ObddNode, T0, T1,
};

/// A gate and the gates it reads. AND and OR gates with no inputs are the
/// constants true and false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Input(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
    Not(usize),
    Maj { inputs: Vec<usize>, threshold: usize },
}

impl Gate {
    fn inputs(&self) -> &[usize] {
        match self {
            Gate::Input(_) => &[],
            Gate::And(v) | Gate::Or(v) | Gate::Maj { inputs: v, .. } => v,
            Gate::Not(g) => std::slice::from_ref(g),
        }
    }

    fn map_inputs(&self, map: &[usize]) -> Gate {
        let m = |v: &[usize]| v.iter().map(|&g| map[g]).collect();
        match self {
            Gate::Input(f) => Gate::Input(*f),
            Gate::And(v) => Gate::And(m(v)),
            Gate::Or(v) => Gate::Or(m(v)),
            Gate::Not(g) => Gate::Not(map[*g]),
            Gate::Maj { inputs, threshold } => Gate::Maj {
                inputs: m(inputs),
                threshold: *threshold,
            },
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            Gate::Input(_) => "in",
            Gate::And(_) => "and",
            Gate::Or(_) => "or",
            Gate::Not(_) => "not",
            Gate::Maj { .. } => "maj",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitMeta {
    /// Kind of model the circuit was compiled from.
    pub source: String,
    /// The circuit is true exactly on the examples the model assigns `class`.
    pub class: bool,
    /// Upper bound on the rankwidth, saturating at `u128::MAX`.
    pub reported_width_bound: u128,
}

/// Gates are stored in topological order; gate `f` is the input for
/// feature `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    features: Vec<String>,
    gates: Vec<Gate>,
    output: usize,
    pub meta: CircuitMeta,
}

impl Circuit {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn maj_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Maj { .. }))
            .count()
    }

    /// Value of the output gate under `alpha`, one value per feature.
    pub fn eval(&self, alpha: &[bool]) -> Result<bool> {
        if alpha.len() < self.features.len() {
            return Err(Error::UnassignedInput(alpha.len()));
        }
        Ok(self.eval_unchecked(alpha))
    }

    fn eval_unchecked(&self, alpha: &[bool]) -> bool {
        let mut val = vec![false; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            val[i] = match g {
                Gate::Input(f) => alpha[*f],
                Gate::And(v) => v.iter().all(|&j| val[j]),
                Gate::Or(v) => v.iter().any(|&j| val[j]),
                Gate::Not(j) => !val[*j],
                Gate::Maj { inputs, threshold } => {
                    inputs.iter().filter(|&&j| val[j]).count() >= *threshold
                }
            };
        }
        val[self.output]
    }

    /// JSON gate table with the output gate and metadata.
    pub fn to_json(&self) -> Value {
        let gates: Vec<Value> = self
            .gates
            .iter()
            .enumerate()
            .map(|(id, g)| {
                let mut obj = json!({ "id": id, "kind": g.kind_name() });
                match g {
                    Gate::Input(f) => obj["feature"] = json!(self.features[*f]),
                    Gate::Maj { threshold, .. } => {
                        obj["inputs"] = json!(g.inputs());
                        obj["threshold"] = json!(threshold);
                    }
                    _ => obj["inputs"] = json!(g.inputs()),
                }
                obj
            })
            .collect();
        json!({
            "features": self.features,
            "gates": gates,
            "output": self.output,
            "meta": {
                "source": self.meta.source,
                "class": self.meta.class as u8,
                "reported_width_bound": self.meta.reported_width_bound,
            }
        })
    }

    /// Graphviz rendering; the output gate is drawn with a double border.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph circuit {\n  rankdir=BT;\n");
        for (id, g) in self.gates.iter().enumerate() {
            let label = match g {
                Gate::Input(f) => self.features[*f].clone(),
                Gate::Maj { threshold, .. } => format!("MAJ>={threshold}"),
                other => other.kind_name().to_uppercase(),
            };
            let shape = if id == self.output { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  g{id} [label=\"{label}\", shape={shape}];");
            for &j in g.inputs() {
                let _ = writeln!(s, "  g{j} -> g{id};");
            }
        }
        s.push_str("}\n");
        s
    }
}

impl Classifier for Circuit {
    fn feature_names(&self) -> &[String] {
        &self.features
    }

    fn classify(&self, e: &[bool]) -> bool {
        self.eval_unchecked(e)
    }
}

/// Reads a compiled circuit back as the model it came from: class
/// `meta.class` where the circuit is true, the other class elsewhere.
pub struct CompiledModel<'a>(pub &'a Circuit);

impl Classifier for CompiledModel<'_> {
    fn feature_names(&self) -> &[String] {
        &self.0.features
    }

    fn classify(&self, e: &[bool]) -> bool {
        self.0.eval_unchecked(e) == self.0.meta.class
    }
}

struct Builder {
    n: usize,
    gates: Vec<Gate>,
    negated: HashMap<usize, usize>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            n,
            gates: (0..n).map(Gate::Input).collect(),
            negated: HashMap::new(),
        }
    }

    fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    fn not(&mut self, g: usize) -> usize {
        self.push(Gate::Not(g))
    }

    /// Gate that is true iff feature `f` has `value`; negations are shared.
    fn literal(&mut self, f: usize, value: bool) -> usize {
        if value {
            return f;
        }
        if let Some(&g) = self.negated.get(&f) {
            return g;
        }
        let g = self.not(f);
        self.negated.insert(f, g);
        g
    }

    fn finish(self, features: Vec<String>, output: usize, meta: CircuitMeta) -> Circuit {
        // Keep every input gate and everything the output depends on.
        let mut live = vec![false; self.gates.len()];
        live[output] = true;
        for i in (0..self.gates.len()).rev() {
            if live[i] {
                for &j in self.gates[i].inputs() {
                    live[j] = true;
                }
            }
        }
        for l in live.iter_mut().take(self.n) {
            *l = true;
        }
        let mut map = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            if live[i] {
                map[i] = gates.len();
                gates.push(g.map_inputs(&map));
            }
        }
        Circuit {
            features,
            gates,
            output: map[output],
            meta,
        }
    }
}

fn pow2_times3(exp: u128) -> u128 {
    u32::try_from(exp)
        .ok()
        .and_then(|e| 1u128.checked_shl(e))
        .and_then(|p| p.checked_mul(3))
        .unwrap_or(u128::MAX)
}

fn meta(source: &str, class: bool, bound: u128) -> CircuitMeta {
    CircuitMeta {
        source: source.into(),
        class,
        reported_width_bound: bound,
    }
}

/// OR over the leaves of the minority label (ties: label 0), negated when
/// `c` is the other label.
fn emit_dt(b: &mut Builder, t: &DecisionTree, c: bool) -> usize {
    let (zeros, ones) = t.leaf_counts();
    let minority = ones < zeros;
    let mut terms = Vec::new();
    for p in t.leaf_paths() {
        if p.class == minority && p.is_consistent() {
            let lits = p
                .literals
                .iter()
                .map(|l| b.literal(l.feature, l.value))
                .collect();
            terms.push(b.push(Gate::And(lits)));
        }
    }
    let d = b.push(Gate::Or(terms));
    if c == minority {
        d
    } else {
        b.not(d)
    }
}

/// Rules are grouped into maximal runs of equal class. A run of class `c`
/// decides the example when one of its rules fires and no rule of an
/// earlier run of the other class does.
fn emit_dl(b: &mut Builder, l: &DecisionList, c: bool) -> usize {
    let mut blocks: Vec<(bool, Vec<usize>)> = Vec::new();
    for r in &l.rules {
        let lits = r
            .term
            .literals
            .iter()
            .map(|x| b.literal(x.feature, x.value))
            .collect();
        let g = b.push(Gate::And(lits));
        match blocks.last_mut() {
            Some((class, gs)) if *class == r.class => gs.push(g),
            _ => blocks.push((r.class, vec![g])),
        }
    }
    let mut blocked = Vec::new();
    let mut deciding = Vec::new();
    for (class, gs) in blocks {
        let any = b.push(Gate::Or(gs));
        if class == c {
            let mut inputs = vec![any];
            inputs.extend(&blocked);
            deciding.push(b.push(Gate::And(inputs)));
        } else {
            let none = b.not(any);
            blocked.push(none);
        }
    }
    b.push(Gate::Or(deciding))
}

/// One OR gate per inner node collecting the arcs that can still reach the
/// `c`-sink, each guarded by its literal.
fn emit_obdd(b: &mut Builder, o: &Obdd, c: bool) -> usize {
    let good = if c { T1 } else { T0 };
    let mut gate: Vec<Option<usize>> = vec![None; o.nodes().len()];
    let mut stack = vec![(o.source(), false)];
    while let Some((v, expanded)) = stack.pop() {
        if gate[v].is_some() {
            continue;
        }
        match o.nodes()[v] {
            ObddNode::Sink(_) => {
                gate[v] = Some(b.push(if v == good {
                    Gate::And(vec![])
                } else {
                    Gate::Or(vec![])
                }));
            }
            ObddNode::Inner { feature, zero, one } => {
                if !expanded {
                    stack.push((v, true));
                    for child in [one, zero] {
                        if child > T1 {
                            stack.push((child, false));
                        }
                    }
                    continue;
                }
                let mut inputs = Vec::new();
                for (child, value) in [(zero, false), (one, true)] {
                    let lit = b.literal(feature, value);
                    if child == good {
                        inputs.push(lit);
                    } else if child > T1 {
                        let g = gate[child].expect("children first");
                        inputs.push(b.push(Gate::And(vec![lit, g])));
                    }
                }
                gate[v] = Some(b.push(Gate::Or(inputs)));
            }
        }
    }
    gate[o.source()].expect("source compiled")
}

pub fn compile_dt(t: &DecisionTree, c: bool) -> Circuit {
    let mut b = Builder::new(t.num_features());
    let out = emit_dt(&mut b, t, c);
    b.finish(
        t.feature_names().to_vec(),
        out,
        meta("dt", c, pow2_times3(t.mnl() as u128)),
    )
}

pub fn compile_dl(l: &DecisionList, c: bool) -> Circuit {
    let mut b = Builder::new(l.num_features());
    let out = emit_dl(&mut b, l, c);
    b.finish(
        l.feature_names().to_vec(),
        out,
        meta("dl", c, pow2_times3(3 * l.size() as u128)),
    )
}

/// Compiles the equivalent decision list.
pub fn compile_ds(s: &DecisionSet, c: bool) -> Circuit {
    let mut circuit = compile_dl(&s.to_list(), c);
    circuit.meta.source = "ds".into();
    circuit
}

pub fn compile_obdd(o: &Obdd, c: bool) -> Circuit {
    let o = o.complete();
    let mut b = Builder::new(o.num_features());
    let out = emit_obdd(&mut b, &o, c);
    b.finish(
        o.feature_names().to_vec(),
        out,
        meta("obdd", c, 5 * o.width() as u128),
    )
}

/// Majority gate over the class-`c` circuits of the elements. For an odd
/// ensemble `c` wins exactly when at least `floor(n/2) + 1` elements say `c`.
fn compile_majority(
    ens: &Ensemble,
    c: bool,
    source: &str,
    bound: u128,
    emit: impl Fn(&mut Builder, usize, &Model) -> Result<usize>,
) -> Result<Circuit> {
    let mut b = Builder::new(ens.num_features());
    let inputs = ens
        .elements()
        .iter()
        .enumerate()
        .map(|(i, m)| emit(&mut b, i, m))
        .collect::<Result<Vec<_>>>()?;
    let out = b.push(Gate::Maj {
        inputs,
        threshold: ens.threshold(),
    });
    Ok(b.finish(ens.feature_names().to_vec(), out, meta(source, c, bound)))
}

pub fn compile_dt_ensemble(ens: &Ensemble, c: bool) -> Result<Circuit> {
    let mnl: usize = ens
        .elements()
        .iter()
        .map(|m| match m {
            Model::Dt(t) => Ok(t.mnl()),
            _ => Err(Error::MixedEnsemble),
        })
        .sum::<Result<usize>>()?;
    compile_majority(ens, c, "dt-ensemble", pow2_times3(mnl as u128), |b, _, m| match m {
        Model::Dt(t) => Ok(emit_dt(b, t, c)),
        _ => Err(Error::MixedEnsemble),
    })
}

/// Decision set elements are compiled through their equivalent lists.
pub fn compile_dl_ensemble(ens: &Ensemble, c: bool) -> Result<Circuit> {
    let lists = lists_of(&Model::Ensemble(ens.clone()))?;
    let total: usize = lists.iter().map(DecisionList::size).sum();
    let source = format!("{}-ensemble", ens.kind());
    compile_majority(ens, c, &source, pow2_times3(3 * total as u128), |b, i, _| {
        Ok(emit_dl(b, &lists[i], c))
    })
}

pub fn compile_obdd_ensemble(ens: &Ensemble, c: bool) -> Result<Circuit> {
    let width = ens
        .elements()
        .iter()
        .map(|m| match m {
            Model::Obdd(o) => Ok(o.width()),
            _ => Err(Error::MixedEnsemble),
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let exp = (ens.elements().len() * 5 * width) as u128;
    compile_majority(ens, c, "obdd-ensemble", pow2_times3(exp), |b, _, m| match m {
        Model::Obdd(o) => Ok(emit_obdd(b, &o.complete(), c)),
        _ => Err(Error::MixedEnsemble),
    })
}

/// Compiles any model into a circuit that is true exactly on the examples
/// the model assigns class `c`.
pub fn compile(m: &Model, c: bool) -> Result<Circuit> {
    match m {
        Model::Dt(t) => Ok(compile_dt(t, c)),
        Model::Ds(s) => Ok(compile_ds(s, c)),
        Model::Dl(l) => Ok(compile_dl(l, c)),
        Model::Obdd(o) => Ok(compile_obdd(o, c)),
        Model::Ensemble(e) => match e.kind() {
            ModelKind::Dt => compile_dt_ensemble(e, c),
            ModelKind::Ds | ModelKind::Dl => compile_dl_ensemble(e, c),
            ModelKind::Obdd => compile_obdd_ensemble(e, c),
        },
    }
}

/// Minimum explanation computed on the circuit's own truth table, reading
/// the circuit as the model it was compiled from.
pub fn circuit_explain_bruteforce(c: &Circuit, q: &Query, guard: usize) -> Result<Option<Witness>> {
    oracle_min(&CompiledModel(c), q, guard)
}
