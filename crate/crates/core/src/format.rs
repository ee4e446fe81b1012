//! JSON reading and writing for models, examples, queries and witnesses.
//!
//! Objects are written through `serde_json::Value`, whose maps keep keys
//! sorted, so serialising a parsed model is byte-stable.

use std::collections::HashMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::explain::{Kind, Minimality, Query, Target, Witness};
use crate::models::{
    Classifier, DecisionList, DecisionSet, DecisionTree, DtNode, Ensemble, Example, Literal, Model,
    Obdd, ObddNode, PartialExample, Rule, Term, T0, T1,
};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| parse_err(format!("missing field `{key}`")))
}

fn bit(v: &Value) -> Result<bool> {
    match v {
        Value::Bool(b) => Ok(*b),
        Value::Number(n) if n.as_u64() == Some(0) => Ok(false),
        Value::Number(n) if n.as_u64() == Some(1) => Ok(true),
        _ => Err(parse_err(format!("expected 0 or 1, got {v}"))),
    }
}

fn string(v: &Value) -> Result<String> {
    v.as_str()
        .map(str::to_owned)
        .ok_or_else(|| parse_err(format!("expected a string, got {v}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| parse_err(format!("`{what}` must be an array")))
}

fn strings(v: &Value, what: &str) -> Result<Vec<String>> {
    array(v, what)?.iter().map(string).collect()
}

/// Feature names in first-appearance order, unless given explicitly.
struct Names {
    names: Vec<String>,
    index: HashMap<String, usize>,
    fixed: bool,
}

impl Names {
    fn new(obj: &Value) -> Result<Self> {
        let mut names = Names {
            names: Vec::new(),
            index: HashMap::new(),
            fixed: false,
        };
        if let Some(fs) = obj.get("features") {
            for f in strings(fs, "features")? {
                if names.index.contains_key(&f) {
                    return Err(parse_err(format!("feature `{f}` listed twice")));
                }
                names.get(&f)?;
            }
            names.fixed = true;
        }
        Ok(names)
    }

    fn get(&mut self, name: &str) -> Result<usize> {
        if let Some(&i) = self.index.get(name) {
            return Ok(i);
        }
        if self.fixed {
            return Err(Error::UndefinedFeature(name.to_owned()));
        }
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), self.names.len() - 1);
        Ok(self.names.len() - 1)
    }
}

fn parse_term(v: &Value, names: &mut Names) -> Result<Term> {
    let lits = array(v, "term")?
        .iter()
        .map(|lit| match lit.as_array().map(Vec::as_slice) {
            Some([f, b]) => Ok(Literal::new(names.get(&string(f)?)?, bit(b)?)),
            _ => Err(parse_err(format!("literal must be [name, bit], got {lit}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Term::new(lits))
}

/// Maps node ids, which may be any integers or strings, to positions.
fn node_id(v: &Value) -> Result<String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(parse_err(format!("bad node id {v}"))),
    }
}

fn parse_dt(obj: &Value) -> Result<DecisionTree> {
    let mut names = Names::new(obj)?;
    let raw = array(field(obj, "nodes")?, "nodes")?;
    let mut ids = HashMap::new();
    for (i, node) in raw.iter().enumerate() {
        let id = match node.get("id") {
            Some(v) => node_id(v)?,
            None => i.to_string(),
        };
        if ids.insert(id.clone(), i).is_some() {
            return Err(parse_err(format!("node id {id} used twice")));
        }
    }
    let lookup = |v: &Value| -> Result<usize> {
        let id = node_id(v)?;
        ids.get(&id)
            .copied()
            .ok_or_else(|| parse_err(format!("unknown node {id}")))
    };
    let mut nodes = Vec::with_capacity(raw.len());
    for node in raw {
        nodes.push(match node.get("leaf") {
            Some(c) => DtNode::Leaf(bit(c)?),
            None => DtNode::Inner {
                feature: names.get(&string(field(node, "feature")?)?)?,
                zero: lookup(field(node, "zero")?)?,
                one: lookup(field(node, "one")?)?,
            },
        });
    }
    let root = match obj.get("root") {
        Some(r) => lookup(r)?,
        None => 0,
    };
    DecisionTree::new(names.names, nodes, root)
}

fn parse_obdd(obj: &Value) -> Result<Obdd> {
    let mut names = Names::new(obj)?;
    let order_names = obj.get("order").map(|o| strings(o, "order")).transpose()?;
    if let Some(order) = &order_names {
        for f in order {
            names.get(f)?;
        }
    }
    let raw = array(field(obj, "nodes")?, "nodes")?;
    let t0 = node_id(field(obj, "t0")?)?;
    let t1 = node_id(field(obj, "t1")?)?;
    if t0 == t1 {
        return Err(parse_err("t0 and t1 must differ"));
    }
    let mut ids: HashMap<String, usize> = HashMap::from([(t0.clone(), T0), (t1.clone(), T1)]);
    let mut inner = Vec::new();
    for (i, node) in raw.iter().enumerate() {
        let id = match node.get("id") {
            Some(v) => node_id(v)?,
            None => i.to_string(),
        };
        if id == t0 || id == t1 {
            if node.get("feature").is_some() {
                return Err(parse_err(format!("sink {id} has a feature")));
            }
            continue;
        }
        if ids.insert(id.clone(), inner.len() + 2).is_some() {
            return Err(parse_err(format!("node id {id} used twice")));
        }
        inner.push(node);
    }
    let lookup = |v: &Value| -> Result<usize> {
        let id = node_id(v)?;
        ids.get(&id)
            .copied()
            .ok_or_else(|| parse_err(format!("unknown node {id}")))
    };
    let mut nodes = vec![ObddNode::Sink(false), ObddNode::Sink(true)];
    for node in inner {
        nodes.push(ObddNode::Inner {
            feature: names.get(&string(field(node, "feature")?)?)?,
            zero: lookup(field(node, "zero")?)?,
            one: lookup(field(node, "one")?)?,
        });
    }
    let source = lookup(field(obj, "source")?)?;
    let n = names.names.len();
    let order = match order_names {
        Some(order) => order.iter().map(|f| names.index[f]).collect(),
        None => Obdd::infer_order(n, &nodes)
            .ok_or_else(|| Error::NotOrdered("arcs admit no common order".into()))?,
    };
    Obdd::new(names.names, nodes, source, order)
}

fn parse_ds(obj: &Value) -> Result<DecisionSet> {
    let mut names = Names::new(obj)?;
    let terms = array(field(obj, "terms")?, "terms")?
        .iter()
        .map(|t| parse_term(t, &mut names))
        .collect::<Result<Vec<_>>>()?;
    DecisionSet::new(names.names, terms, bit(field(obj, "default")?)?)
}

fn parse_dl(obj: &Value) -> Result<DecisionList> {
    let mut names = Names::new(obj)?;
    let rules = array(field(obj, "rules")?, "rules")?
        .iter()
        .map(|r| {
            Ok(Rule {
                term: parse_term(field(r, "term")?, &mut names)?,
                class: bit(field(r, "class")?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DecisionList::new(names.names, rules)
}

fn parse_ensemble(obj: &Value) -> Result<Ensemble> {
    let elements = array(field(obj, "elements")?, "elements")?
        .iter()
        .map(|e| {
            let m = model_from_value(e)?;
            if matches!(m, Model::Ensemble(_)) {
                return Err(Error::MixedEnsemble);
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut universe: Vec<String> = match obj.get("features") {
        Some(fs) => strings(fs, "features")?,
        None => Vec::new(),
    };
    let explicit = obj.get("features").is_some();
    for m in &elements {
        for f in m.feature_names() {
            if !universe.contains(f) {
                if explicit {
                    return Err(Error::UndefinedFeature(f.clone()));
                }
                universe.push(f.clone());
            }
        }
    }
    let shared_order = obj
        .get("shared_order")
        .filter(|v| !v.is_null())
        .map(|v| {
            strings(v, "shared_order")?
                .iter()
                .map(|f| {
                    universe
                        .iter()
                        .position(|g| g == f)
                        .ok_or_else(|| Error::UndefinedFeature(f.clone()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let elements = elements
        .iter()
        .map(|m| m.embed_ordered(&universe, shared_order.as_deref()))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(elements, shared_order)
}

/// Parses and normalises a model.
pub fn model_from_value(obj: &Value) -> Result<Model> {
    let kind = string(field(obj, "kind")?)?;
    let m = match kind.as_str() {
        "dt" => Model::Dt(parse_dt(obj)?),
        "ds" => Model::Ds(parse_ds(obj)?),
        "dl" => Model::Dl(parse_dl(obj)?),
        "obdd" => Model::Obdd(parse_obdd(obj)?),
        "ensemble" => Model::Ensemble(parse_ensemble(obj)?),
        other => return Err(parse_err(format!("unknown model kind `{other}`"))),
    };
    Ok(m.normalize())
}

pub fn model_from_str(s: &str) -> Result<Model> {
    model_from_value(&serde_json::from_str(s)?)
}

fn term_to_value(t: &Term, names: &[String]) -> Value {
    Value::Array(
        t.literals
            .iter()
            .map(|l| json!([names[l.feature], l.value as u8]))
            .collect(),
    )
}

pub fn model_to_value(m: &Model) -> Value {
    let names = m.feature_names();
    match m {
        Model::Dt(t) => {
            let nodes: Vec<Value> = t
                .nodes()
                .iter()
                .enumerate()
                .map(|(i, node)| match *node {
                    DtNode::Leaf(c) => json!({"id": i, "leaf": c as u8}),
                    DtNode::Inner { feature, zero, one } => {
                        json!({"id": i, "feature": names[feature], "zero": zero, "one": one})
                    }
                })
                .collect();
            json!({"kind": "dt", "features": names, "root": t.root(), "nodes": nodes})
        }
        Model::Ds(s) => json!({
            "kind": "ds",
            "features": names,
            "terms": s.terms.iter().map(|t| term_to_value(t, names)).collect::<Vec<_>>(),
            "default": s.default as u8,
        }),
        Model::Dl(l) => json!({
            "kind": "dl",
            "features": names,
            "rules": l.rules.iter().map(|r| json!({
                "term": term_to_value(&r.term, names),
                "class": r.class as u8,
            })).collect::<Vec<_>>(),
        }),
        Model::Obdd(o) => {
            let nodes: Vec<Value> = o
                .nodes()
                .iter()
                .enumerate()
                .filter_map(|(i, node)| match *node {
                    ObddNode::Sink(_) => None,
                    ObddNode::Inner { feature, zero, one } => Some(
                        json!({"id": i, "feature": names[feature], "zero": zero, "one": one}),
                    ),
                })
                .collect();
            let order: Vec<&String> = o.order().iter().map(|&f| &names[f]).collect();
            json!({
                "kind": "obdd",
                "features": names,
                "order": order,
                "source": o.source(),
                "t0": T0,
                "t1": T1,
                "nodes": nodes,
            })
        }
        Model::Ensemble(e) => {
            let mut obj = Map::new();
            obj.insert("kind".into(), json!("ensemble"));
            obj.insert("features".into(), json!(names));
            obj.insert(
                "elements".into(),
                Value::Array(e.elements().iter().map(model_to_value).collect()),
            );
            if let Some(order) = e.shared_order() {
                let order: Vec<&String> = order.iter().map(|&f| &names[f]).collect();
                obj.insert("shared_order".into(), json!(order));
            }
            Value::Object(obj)
        }
    }
}

pub fn model_to_string(m: &Model) -> String {
    let mut s = serde_json::to_string_pretty(&model_to_value(m)).expect("values serialise");
    s.push('\n');
    s
}

fn index_of(names: &[String], f: &str) -> Result<usize> {
    names
        .iter()
        .position(|g| g == f)
        .ok_or_else(|| Error::UndefinedFeature(f.to_owned()))
}

/// A partial example from a flat `{"feature": 0|1}` object.
pub fn partial_from_value(names: &[String], v: &Value) -> Result<PartialExample> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err("examples are objects mapping features to 0 or 1"))?;
    let mut tau = PartialExample::new(names.len());
    for (f, b) in obj {
        tau.set(index_of(names, f)?, Some(bit(b)?));
    }
    Ok(tau)
}

/// A total example; every feature must be assigned.
pub fn example_from_value(names: &[String], v: &Value) -> Result<Example> {
    let tau = partial_from_value(names, v)?;
    if let Some(f) = (0..names.len()).find(|&f| tau.get(f).is_none()) {
        return Err(Error::Invalid(format!(
            "example leaves feature `{}` unassigned",
            names[f]
        )));
    }
    Ok(tau.complete_with(false))
}

pub fn partial_to_value(names: &[String], tau: &PartialExample) -> Value {
    Value::Object(
        tau.iter()
            .map(|(f, b)| (names[f].clone(), json!(b as u8)))
            .collect(),
    )
}

pub fn example_to_value(names: &[String], e: &[bool]) -> Value {
    Value::Object(
        e.iter()
            .enumerate()
            .map(|(f, &b)| (names[f].clone(), json!(b as u8)))
            .collect(),
    )
}

/// `{"kind", "minimality", "target", "k"}`. The target is an example
/// object or `"zero"` for local kinds and `0`/`1` (or `{"class": c}`) for
/// global kinds. Minimality defaults to cardinality.
pub fn query_from_value(names: &[String], v: &Value) -> Result<Query> {
    let kind: Kind = serde_json::from_value(field(v, "kind")?.clone())
        .map_err(|_| parse_err("kind must be one of laxp, lcxp, gaxp, gcxp"))?;
    let minimality = match v.get("minimality") {
        Some(m) => serde_json::from_value(m.clone())
            .map_err(|_| parse_err("minimality must be subset or cardinality"))?,
        None => Minimality::Cardinality,
    };
    let budget = match v.get("k") {
        None | Some(Value::Null) => None,
        Some(k) => Some(
            k.as_u64()
                .ok_or_else(|| parse_err("k must be a non-negative integer"))? as usize,
        ),
    };
    let target = field(v, "target")?;
    let target = if kind.is_local() {
        match target {
            Value::String(s) if s == "zero" => Target::Example(Example::zeros(names.len())),
            other => Target::Example(example_from_value(names, other)?),
        }
    } else {
        match target {
            Value::Object(o) if o.contains_key("class") => Target::Class(bit(&o["class"])?),
            other => Target::Class(bit(other)?),
        }
    };
    Ok(Query {
        kind,
        minimality,
        target,
        budget,
    })
}

pub fn query_to_value(names: &[String], q: &Query) -> Value {
    let target = match &q.target {
        Target::Example(e) => example_to_value(names, e),
        Target::Class(c) => json!(*c as u8),
    };
    json!({
        "kind": q.kind,
        "minimality": q.minimality,
        "target": target,
        "k": q.budget,
    })
}

/// Local witnesses are arrays of feature names, global ones objects.
pub fn witness_from_value(names: &[String], v: &Value) -> Result<Witness> {
    match v {
        Value::Array(fs) => {
            let mut set = fs
                .iter()
                .map(|f| index_of(names, &string(f)?))
                .collect::<Result<Vec<_>>>()?;
            set.sort_unstable();
            set.dedup();
            Ok(Witness::Features(set))
        }
        Value::Object(_) => Ok(Witness::Assignment(partial_from_value(names, v)?)),
        _ => Err(parse_err("witness must be an array of names or an object")),
    }
}

/// Feature arrays are sorted by name.
pub fn witness_to_value(names: &[String], w: &Witness) -> Value {
    match w {
        Witness::Features(s) => {
            let mut fs: Vec<&String> = s.iter().map(|&f| &names[f]).collect();
            fs.sort();
            json!(fs)
        }
        Witness::Assignment(tau) => partial_to_value(names, tau),
    }
}
