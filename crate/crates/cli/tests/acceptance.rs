//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use modelxp::circuits::{
    compile_dl, compile_dl_ensemble, compile_ds, compile_dt, compile_dt_ensemble, compile_obdd,
    compile_obdd_ensemble, Circuit,
};
use modelxp::dslist::dle_min_lcxp_branch_traced;
use modelxp::dt::{dt_ensemble_to_dt, dt_min_lcxp, dt_subset_min, dt_xp_search};
use modelxp::explain::{
    differing_low_weight_example, is_explanation, is_homogeneous, oracle_min,
    verify_subset_minimal, DEFAULT_GUARD,
};
use modelxp::format::{model_from_str, model_to_value};
use modelxp::gadgets::{
    gen_hitting_set_laxp, gen_laxp_to_gaxp, gen_maj_hom, gen_mcc_ds, gen_mcc_ds_ensemble,
    gen_mcc_dt_ensemble, gen_mcc_obdd_maj, obdd_agreement_counter, obdd_conjoin, obdd_primitive,
    Family, MccInstance, Primitive,
};
use modelxp::obdd::{obdd_ensemble_product, obdd_min_lcxp, obdd_subset_min, obdd_xp_search};
use modelxp::random::{
    feature_names, random_dl, random_ds, random_dt, random_example, random_mcc, random_obdd,
    random_obdd_with_order,
};
use modelxp::solve::{explain, verify, Options};
use modelxp::{
    Classifier, DecisionList, DecisionTree, Ensemble, Example, Kind, Minimality, Model, Obdd,
    PartialExample, Query, Witness,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T>(r: modelxp::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn table(m: &dyn Classifier) -> Vec<bool> {
    let n = m.num_features();
    (0..1u64 << n)
        .map(|i| m.classify(&Example::from_index(n, i)))
        .collect()
}

fn size_of(w: &Option<Witness>) -> Option<usize> {
    w.as_ref().map(Witness::size)
}

fn all_queries(e: &Example, class: bool, min: Minimality, k: Option<usize>) -> [Query; 4] {
    [
        Query::local(Kind::LocalAbductive, e.clone(), min, k),
        Query::local(Kind::LocalContrastive, e.clone(), min, k),
        Query::global(Kind::GlobalAbductive, class, min, k),
        Query::global(Kind::GlobalContrastive, class, min, k),
    ]
}

// ---------------------------------------------------------------------------
// Command-line helpers

struct Run {
    code: i32,
    stdout: String,
}

fn cli(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_modelxp"))
        .args(args)
        .output()
        .expect("failed to start the modelxp binary");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(format!("acceptance-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const RUNNING_LIST: &str = r#"{
  "kind": "dl",
  "rules": [
    {"term": [["x", 1], ["y", 1]], "class": 0},
    {"term": [["x", 0], ["z", 0]], "class": 1},
    {"term": [["y", 0], ["z", 1]], "class": 0},
    {"term": [], "class": 1}
  ]
}"#;

// ---------------------------------------------------------------------------
// 1

fn running_example() -> Check {
    let dir = scratch("running");
    let model = dir.join("dl.json");
    fs::write(&model, RUNNING_LIST).unwrap();
    let e = json!({"x": 0, "y": 0, "z": 1});

    let laxp = json!({"kind": "laxp", "minimality": "cardinality", "target": e, "k": 2}).to_string();
    let r = cli(&["explain", "--model", s(&model), "--query", &laxp]);
    ensure!(r.code == 0, "explain laxp exited {}", r.code);
    let v: Value = serde_json::from_str(&r.stdout).map_err(|e| e.to_string())?;
    ensure!(v["witness"] == json!(["y", "z"]), "laxp witness {}", v["witness"]);

    // {y, z} must be the only abductive explanation of size at most two.
    let m = ok(model_from_str(RUNNING_LIST))?;
    let ex = Example::new(vec![false, false, true]);
    let q = Query::local(Kind::LocalAbductive, ex.clone(), Minimality::Cardinality, Some(2));
    let mut found = Vec::new();
    for mask in 0u32..8 {
        let set: Vec<usize> = (0..3).filter(|&f| mask >> f & 1 == 1).collect();
        if set.len() <= 2 && ok(is_explanation(&m, &q, &Witness::Features(set.clone()), DEFAULT_GUARD))? {
            found.push(set);
        }
    }
    ensure!(found == vec![vec![1, 2]], "explanations of size <= 2: {found:?}");

    let lcxp = json!({"kind": "lcxp", "minimality": "cardinality", "target": e}).to_string();
    let r = cli(&["explain", "--model", s(&model), "--query", &lcxp]);
    ensure!(r.code == 0, "explain lcxp exited {}", r.code);
    let v: Value = serde_json::from_str(&r.stdout).map_err(|e| e.to_string())?;
    ensure!(v["size"] == json!(1), "lcxp size {}", v["size"]);

    for (kind, tau) in [("gaxp", json!({"x": 1, "y": 1})), ("gcxp", json!({"x": 0, "z": 0}))] {
        let q = json!({"kind": kind, "minimality": "subset", "target": 0}).to_string();
        let r = cli(&["verify", "--model", s(&model), "--query", &q, "--witness", &tau.to_string(), "--minimal"]);
        ensure!(r.code == 0, "{kind} witness {tau} rejected (exit {})", r.code);
    }
    let q = json!({"kind": "gaxp", "target": 0}).to_string();
    let r = cli(&["verify", "--model", s(&model), "--query", &q, "--witness", r#"{"x": 0, "z": 0}"#]);
    ensure!(r.code == 3, "tau2 accepted as gaxp(0)");
    Ok("lAXp {y,z} unique, min lCXp 1, tau1 gAXp(0), tau2 gCXp(0)".into())
}

// ---------------------------------------------------------------------------
// 2 and 3

fn tree_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(0xd7);
    let mut checks = 0;
    for i in 0..200 {
        let n = rng.gen_range(1..=8);
        let t = random_dt(&mut rng, n, 31).simplify();
        ensure!(t.size() <= 31 && !t.has_contradictions(), "tree {i} not simplified");
        let e = random_example(&mut rng, n);
        let class = rng.gen();
        for q in all_queries(&e, class, Minimality::Subset, None) {
            let w = ok(dt_subset_min(&t, &q))?;
            let card = Query { minimality: Minimality::Cardinality, ..q.clone() };
            let best = ok(oracle_min(&t, &card, DEFAULT_GUARD))?;
            ensure!(w.is_some() == best.is_some(), "tree {i} {}: existence differs", q.kind);
            if let Some(w) = w {
                ensure!(ok(verify_subset_minimal(&t, &q, &w, DEFAULT_GUARD))?, "tree {i} {}: not subset-minimal", q.kind);
            }
            checks += 1;
        }
        for q in all_queries(&e, class, Minimality::Cardinality, Some(n)) {
            let want = size_of(&ok(oracle_min(&t, &q, DEFAULT_GUARD))?);
            ensure!(size_of(&ok(dt_xp_search(&t, &q))?) == want, "tree {i} {}: xp size differs", q.kind);
            if q.kind == Kind::LocalContrastive {
                ensure!(dt_min_lcxp(&t, &e).map(|s| s.len()) == want, "tree {i}: min lcxp size differs");
            }
            checks += 1;
        }
    }
    Ok(format!("200 trees, {checks} query checks"))
}

fn diagram_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(0x0bdd);
    let mut checks = 0;
    for i in 0..200 {
        let n = rng.gen_range(1..=8);
        let o = random_obdd(&mut rng, n, 4);
        ensure!(o.is_complete() && o.width() <= 4, "diagram {i} not complete or too wide");
        let e = random_example(&mut rng, n);
        let class = rng.gen();
        for q in all_queries(&e, class, Minimality::Subset, None) {
            let w = ok(obdd_subset_min(&o, &q))?;
            let card = Query { minimality: Minimality::Cardinality, ..q.clone() };
            let best = ok(oracle_min(&o, &card, DEFAULT_GUARD))?;
            ensure!(w.is_some() == best.is_some(), "diagram {i} {}: existence differs", q.kind);
            if let Some(w) = w {
                ensure!(ok(verify_subset_minimal(&o, &q, &w, DEFAULT_GUARD))?, "diagram {i} {}: not subset-minimal", q.kind);
            }
            checks += 1;
        }
        for q in all_queries(&e, class, Minimality::Cardinality, Some(n)) {
            let want = size_of(&ok(oracle_min(&o, &q, DEFAULT_GUARD))?);
            ensure!(size_of(&ok(obdd_xp_search(&o, &q))?) == want, "diagram {i} {}: xp size differs", q.kind);
            if q.kind == Kind::LocalContrastive {
                ensure!(obdd_min_lcxp(&o, &e).map(|s| s.len()) == want, "diagram {i}: min lcxp size differs");
            }
            checks += 1;
        }
    }
    Ok(format!("200 diagrams, {checks} query checks"))
}

// ---------------------------------------------------------------------------
// 4

fn term_size(lists: &[DecisionList]) -> usize {
    lists
        .iter()
        .flat_map(|l| l.rules.iter().map(|r| r.term.len()))
        .max()
        .unwrap_or(0)
}

fn branching_case(lists: &[DecisionList], m: &dyn Classifier, e: &Example, tag: &str) -> Result<usize, String> {
    let n = e.len();
    let q = Query::local(Kind::LocalContrastive, e.clone(), Minimality::Cardinality, None);
    let best = size_of(&ok(oracle_min(m, &q, DEFAULT_GUARD))?);
    let a = term_size(lists).max(1);
    let mut worst = 0;
    for k in 0..=n {
        let (w, stats) = dle_min_lcxp_branch_traced(lists, e, k);
        ensure!(w.as_ref().map(Vec::len) == best.filter(|&b| b <= k), "{tag} k={k}: size differs from oracle");
        if let Some(w) = &w {
            ensure!(m.classify(&e.flip(w)) != m.classify(e), "{tag} k={k}: witness does not flip");
        }
        ensure!(stats.max_leaves <= a.pow(k as u32), "{tag} k={k}: {} leaves > {a}^{k}", stats.max_leaves);
        worst = worst.max(stats.max_leaves);
    }
    Ok(worst)
}

fn branching() -> Check {
    let mut rng = StdRng::seed_from_u64(0xb4);
    let mut worst = 0;
    for i in 0..200 {
        let n = rng.gen_range(1..=8);
        let l = random_dl(&mut rng, n, 6, 3);
        let e = random_example(&mut rng, n);
        worst = worst.max(branching_case(std::slice::from_ref(&l), &l, &e, &format!("list {i}"))?);
    }
    for i in 0..50 {
        let n = rng.gen_range(1..=8);
        let lists: Vec<DecisionList> = (0..3).map(|_| random_dl(&mut rng, n, 6, 3)).collect();
        let ens = ok(Ensemble::new(lists.iter().cloned().map(Model::Dl).collect(), None))?;
        let e = random_example(&mut rng, n);
        worst = worst.max(branching_case(&lists, &ens, &e, &format!("ensemble {i}"))?);
    }
    Ok(format!("200 lists, 50 ensembles, every k; largest search tree {worst} leaves"))
}

// ---------------------------------------------------------------------------
// 5

fn products() -> Check {
    let mut rng = StdRng::seed_from_u64(0x9d);
    for i in 0..150 {
        let n = rng.gen_range(1..=8);
        let count = if i % 3 == 0 { 1 } else { 3 };
        let trees: Vec<DecisionTree> = (0..count).map(|_| random_dt(&mut rng, n, 8)).collect();
        let m = trees.iter().map(DecisionTree::size).max().unwrap();
        let ens = ok(Ensemble::new(trees.into_iter().map(Model::Dt).collect(), None))?;
        let p = ok(dt_ensemble_to_dt(&ens, 1 << 20))?.simplify();
        ensure!(table(&p) == table(&ens), "tree ensemble {i}: product disagrees");
        ensure!(p.size() <= m.pow(count as u32), "tree ensemble {i}: {} leaves > {m}^{count}", p.size());

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let diagrams: Vec<Obdd> = (0..count)
            .map(|_| random_obdd_with_order(&mut rng, order.clone(), 3))
            .collect();
        let m = diagrams.iter().map(Obdd::size).max().unwrap();
        let ens = ok(Ensemble::new(diagrams.into_iter().map(Model::Obdd).collect(), Some(order)))?;
        let p = ok(obdd_ensemble_product(&ens, 1 << 20))?;
        ensure!(table(&p) == table(&ens), "diagram ensemble {i}: product disagrees");
        ensure!(p.size() <= m.pow(count as u32), "diagram ensemble {i}: {} nodes > {m}^{count}", p.size());
    }
    Ok("150 tree and 150 diagram ensembles".into())
}

// ---------------------------------------------------------------------------
// 6

fn three_shl(exp: usize) -> u128 {
    if exp >= 126 {
        u128::MAX
    } else {
        3u128 << exp
    }
}

fn list_len(l: &DecisionList) -> usize {
    l.rules.iter().map(|r| r.term.len() + 1).sum()
}

fn computes(c: &Circuit, m: &dyn Classifier, class: bool, tag: &str) -> Result<(), String> {
    let n = m.num_features();
    for i in 0..1u64 << n {
        let e = Example::from_index(n, i);
        ensure!(ok(c.eval(&e))? == (m.classify(&e) == class), "{tag} class {class}: differs on example {i}");
    }
    ensure!(c.maj_count() <= 1, "{tag}: {} majority gates", c.maj_count());
    Ok(())
}

fn compilers() -> Check {
    let mut rng = StdRng::seed_from_u64(0xc1);
    for i in 0..30 {
        let n = rng.gen_range(1..=10);
        let t = random_dt(&mut rng, n, 31);
        let l = random_dl(&mut rng, n, 6, 3);
        let d = random_ds(&mut rng, n, 5, 3);
        let o = random_obdd(&mut rng, n, 4);
        let order: Vec<usize> = (0..n).collect();
        let trees = ok(Ensemble::new((0..3).map(|_| Model::Dt(random_dt(&mut rng, n, 12))).collect(), None))?;
        let lists = ok(Ensemble::new((0..3).map(|_| Model::Dl(random_dl(&mut rng, n, 4, 3))).collect(), None))?;
        let diagrams = ok(Ensemble::new(
            (0..3).map(|_| Model::Obdd(random_obdd_with_order(&mut rng, order.clone(), 3))).collect(),
            None,
        ))?;
        for class in [false, true] {
            let tag = |name: &str| format!("{name} {i}");
            let c = compile_dt(&t, class);
            computes(&c, &t, class, &tag("dt"))?;
            ensure!(c.meta.reported_width_bound == three_shl(t.mnl()), "dt {i}: width bound");

            let c = compile_dl(&l, class);
            computes(&c, &l, class, &tag("dl"))?;
            ensure!(c.meta.reported_width_bound == three_shl(3 * list_len(&l)), "dl {i}: width bound");

            let c = compile_ds(&d, class);
            computes(&c, &d, class, &tag("ds"))?;
            ensure!(c.meta.reported_width_bound == three_shl(3 * list_len(&d.to_list())), "ds {i}: width bound");

            let c = compile_obdd(&o, class);
            computes(&c, &o, class, &tag("obdd"))?;
            ensure!(c.meta.reported_width_bound == 5 * o.width() as u128, "obdd {i}: width bound");

            let c = ok(compile_dt_ensemble(&trees, class))?;
            computes(&c, &trees, class, &tag("dt ensemble"))?;
            let mnl: usize = trees.elements().iter().map(|m| match m { Model::Dt(t) => t.mnl(), _ => 0 }).sum();
            ensure!(c.meta.reported_width_bound == three_shl(mnl), "dt ensemble {i}: width bound");

            let c = ok(compile_dl_ensemble(&lists, class))?;
            computes(&c, &lists, class, &tag("dl ensemble"))?;
            let total: usize = lists.elements().iter().map(|m| match m { Model::Dl(l) => list_len(l), _ => 0 }).sum();
            ensure!(c.meta.reported_width_bound == three_shl(3 * total), "dl ensemble {i}: width bound");

            let c = ok(compile_obdd_ensemble(&diagrams, class))?;
            computes(&c, &diagrams, class, &tag("obdd ensemble"))?;
            let w = diagrams.elements().iter().map(|m| match m { Model::Obdd(o) => o.width(), _ => 0 }).max().unwrap();
            ensure!(c.meta.reported_width_bound == three_shl(3 * 5 * w), "obdd ensemble {i}: width bound");
        }
    }
    Ok("30 rounds of 7 compilers, both classes, |F| <= 10".into())
}

// ---------------------------------------------------------------------------
// 7

fn low_weight_flip(m: &dyn Classifier, k: usize) -> Result<bool, String> {
    Ok(ok(differing_low_weight_example(m, k, DEFAULT_GUARD))?.is_some())
}

fn reductions() -> Check {
    let mut rng = StdRng::seed_from_u64(0x3cc);
    let mut cliques = 0;
    for i in 0..500 {
        let k = 2 + i % 2;
        let vertices = rng.gen_range(k..=6);
        let p = rng.gen_range(0.2..0.9);
        let g = random_mcc(&mut rng, vertices, k, p);
        let clique = g.find_clique().is_some();
        cliques += clique as usize;

        let ens = ok(gen_mcc_dt_ensemble(&g))?;
        ensure!(ens.elements().len() == 2 * (k + k * (k - 1) / 2) - 1, "graph {i}: tree ensemble size");
        ensure!(table(&ens).contains(&true) == clique, "graph {i}: tree ensemble disagrees");
        for family in [Family::Dt, Family::Ds, Family::Obdd] {
            let m = ok(gen_maj_hom(&g, family))?;
            ensure!(low_weight_flip(&m, k)? == clique, "graph {i}: {family:?} majority disagrees");
        }
        ensure!(low_weight_flip(&ok(gen_mcc_ds(&g))?, k)? == clique, "graph {i}: decision set disagrees");
        let se = ok(gen_mcc_ds_ensemble(&g))?;
        ensure!(se.elements().len() == 2 * k + 1, "graph {i}: set ensemble size");
        ensure!(low_weight_flip(&se, k)? == clique, "graph {i}: set ensemble disagrees");
    }
    Ok(format!("500 graphs, {cliques} with a multicolored clique"))
}

// ---------------------------------------------------------------------------
// 8

fn hitting_sets() -> Check {
    let mut rng = StdRng::seed_from_u64(0x85);
    for i in 0..100 {
        let n = rng.gen_range(1..=8);
        let count = rng.gen_range(1..=6);
        let sets: Vec<Vec<usize>> = (0..count)
            .map(|_| {
                let mut s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
                if s.is_empty() {
                    s.push(rng.gen_range(0..n));
                }
                s
            })
            .collect();
        let brute = (0u32..1 << n)
            .filter(|h| sets.iter().all(|s| s.iter().any(|&u| h >> u & 1 == 1)))
            .map(u32::count_ones)
            .min()
            .unwrap() as usize;
        let universe: Vec<String> = (0..n).map(|u| format!("u{u}")).collect();
        let (t, e, _) = ok(gen_hitting_set_laxp(&universe, &sets, n))?;
        let q = Query::local(Kind::LocalAbductive, e, Minimality::Cardinality, None);
        let w = ok(explain(&Model::Dt(t), &q, &Options::default()))?.witness;
        ensure!(size_of(&w) == Some(brute), "system {i}: lAXp {:?}, hitting set {brute}", size_of(&w));
    }
    Ok("100 set systems".into())
}

// ---------------------------------------------------------------------------
// 9

fn prefixed(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn primitive(kind: usize, fs: &[String]) -> Result<Obdd, String> {
    let p = match kind {
        0 => Primitive::ExactlyOne,
        1 => Primitive::Exists,
        2 => Primitive::AllEqual,
        _ => Primitive::IffExists(format!("{}_x", fs.first().map_or("z", String::as_str))),
    };
    ok(obdd_primitive(&p, fs))
}

fn diagram_gadgets() -> Check {
    for n in 0..=6 {
        let fs = prefixed("p", n);
        let ones = |e: &[bool]| e[..n].iter().filter(|&&b| b).count();
        for kind in 0..4 {
            let o = primitive(kind, &fs)?;
            ensure!(o.is_complete() && o.width() <= 3, "primitive {kind} over {n}: width {}", o.width());
            let m = o.num_features();
            for i in 0..1u64 << m {
                let e = Example::from_index(m, i);
                let c = ones(&e);
                let want = match kind {
                    0 => c == 1,
                    1 => c >= 1,
                    2 => c == 0 || c == n,
                    _ => e[n] == (c >= 1),
                };
                ensure!(o.classify(&e) == want, "primitive {kind} over {n}: example {i}");
            }
        }
    }

    let mut rng = StdRng::seed_from_u64(0x9c);
    for i in 0..40 {
        let parts: Vec<Obdd> = (0..rng.gen_range(1..=3))
            .map(|j| primitive(rng.gen_range(0..3), &prefixed(&format!("q{j}_"), rng.gen_range(1..=2))))
            .collect::<Result<_, _>>()?;
        let o = ok(obdd_conjoin(&parts))?;
        let max = parts.iter().map(Obdd::width).max().unwrap();
        ensure!(o.is_complete() && o.width() <= max + 1, "conjoin {i}: width {} > {max} + 1", o.width());
        let m = o.num_features();
        for x in 0..1u64 << m {
            let e = Example::from_index(m, x);
            let want = parts.iter().all(|part| {
                let bits: Vec<bool> = part
                    .feature_names()
                    .iter()
                    .map(|f| e[o.feature_names().iter().position(|g| g == f).unwrap()])
                    .collect();
                part.classify(&bits)
            });
            ensure!(o.classify(&e) == want, "conjoin {i}: example {x}");
        }
    }
    // With the widest part after the first, the bypass track adds one level.
    let narrow = primitive(2, &prefixed("a", 2))?;
    let wide = primitive(0, &prefixed("b", 3))?;
    let o = ok(obdd_conjoin(&[narrow, wide.clone()]))?;
    ensure!(o.width() == wide.width() + 1, "conjoin width {} != {} + 1", o.width(), wide.width());

    for n in 0..=6 {
        let e = random_example(&mut rng, n);
        let order: Vec<usize> = (0..n).collect();
        for k in 0..=n {
            for out in [false, true] {
                let o = ok(obdd_agreement_counter(&e, k, feature_names(n), &order, out))?;
                for x in 0..1u64 << n {
                    let x = Example::from_index(n, x);
                    let want = if n - x.hamming(&e) >= k { out } else { !out };
                    ensure!(o.classify(&x) == want, "counter n={n} k={k}");
                }
            }
        }
    }

    let widths = |g: &MccInstance| -> Result<Vec<usize>, String> {
        Ok(ok(gen_mcc_obdd_maj(g))?
            .elements()
            .iter()
            .map(|m| match m {
                Model::Obdd(o) => o.width(),
                _ => 0,
            })
            .collect())
    };
    for i in 0..100 {
        let k = rng.gen_range(2..=3);
        let vertices = rng.gen_range(k..=6);
        let g = random_mcc(&mut rng, vertices, k, 0.6);
        let w = widths(&g)?;
        ensure!(w.iter().all(|&w| w <= 4), "majority gadget {i}: widths {w:?}");
    }
    // A second part of three vertices makes a width-3 counter sit behind the
    // first conjunct in both elements.
    let star = ok(MccInstance::from_json(&json!({
        "parts": [["a"], ["b", "c", "d"]],
        "edges": [["a", "b"], ["a", "c"], ["a", "d"]]
    })))?;
    let w = widths(&star)?;
    ensure!(w[0] == 4 && w[1] == 4, "majority gadget widths {w:?}");
    Ok(format!("primitives, 40 conjunctions, counters, 101 majority gadgets; widths {w:?}"))
}

// ---------------------------------------------------------------------------
// 10

fn local_to_global() -> Check {
    let mut rng = StdRng::seed_from_u64(0x10);
    let mut yes = 0;
    for i in 0..50 {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(0..=n);
        let o = random_obdd(&mut rng, n, 3);
        let e = random_example(&mut rng, n);
        let local = Query::local(Kind::LocalAbductive, e.clone(), Minimality::Cardinality, Some(k));
        let want = ok(oracle_min(&o, &local, DEFAULT_GUARD))?.is_some();
        yes += want as usize;
        let (p, class, k) = ok(gen_laxp_to_gaxp(&o, &e, k, 1 << 20))?;
        ensure!(class == o.classify(&e), "triple {i}: class");
        let gaxp = Query::global(Kind::GlobalAbductive, class, Minimality::Cardinality, Some(k));
        let gcxp = Query::global(Kind::GlobalContrastive, !class, Minimality::Cardinality, Some(k));
        ensure!(ok(oracle_min(&p, &gaxp, DEFAULT_GUARD))?.is_some() == want, "triple {i}: gAXp differs");
        ensure!(ok(oracle_min(&p, &gcxp, DEFAULT_GUARD))?.is_some() == want, "triple {i}: gCXp differs");
    }
    Ok(format!("50 triples, {yes} yes-instances"))
}

// ---------------------------------------------------------------------------
// 11

fn random_model(rng: &mut StdRng, kind: usize, n: usize) -> Model {
    let order: Vec<usize> = (0..n).collect();
    let single = |rng: &mut StdRng, kind: usize| match kind {
        0 => Model::Dt(random_dt(rng, n, 6)),
        1 => Model::Ds(random_ds(rng, n, 3, 3)),
        2 => Model::Dl(random_dl(rng, n, 4, 3)),
        _ => Model::Obdd(random_obdd_with_order(rng, order.clone(), 3)),
    };
    if kind < 4 {
        if kind == 0 && rng.gen_bool(0.3) {
            return Model::Dt(DecisionTree::constant(feature_names(n), rng.gen()));
        }
        single(rng, kind)
    } else {
        let base = kind - 4;
        let elements = (0..3).map(|_| single(rng, base)).collect();
        let shared = (base == 3).then(|| order.clone());
        Model::Ensemble(Ensemble::new(elements, shared).unwrap())
    }
}

fn statements(m: &Model) -> Result<[bool; 9], String> {
    use Kind::*;
    use Minimality::*;
    let n = m.num_features();
    let opts = Options::default();
    let e0 = Example::zeros(n);
    let c = m.classify(&e0);
    let none = Witness::Assignment(PartialExample::new(n));
    let local = |kind, min, k| Query::local(kind, e0.clone(), min, k);
    let has = |q: Query| ok(explain(m, &q, &opts)).map(|s| s.witness.is_some());
    let valid = |q: Query, w: &Witness| ok(verify(m, &q, w, true, DEFAULT_GUARD));
    Ok([
        ok(is_homogeneous(m, DEFAULT_GUARD))?,
        valid(local(LocalAbductive, Subset, None), &Witness::Features(vec![]))?,
        !has(local(LocalContrastive, Subset, None))?,
        valid(Query::global(GlobalAbductive, c, Subset, None), &none)?,
        valid(Query::global(GlobalContrastive, !c, Subset, None), &none)?,
        has(local(LocalAbductive, Cardinality, Some(0)))?,
        !has(local(LocalContrastive, Cardinality, None))?,
        has(Query::global(GlobalAbductive, c, Cardinality, Some(0)))?,
        has(Query::global(GlobalContrastive, !c, Cardinality, Some(0)))?,
    ])
}

fn homogeneity() -> Check {
    let mut rng = StdRng::seed_from_u64(0x40);
    let mut constant = 0;
    for kind in 0..8 {
        for i in 0..50 {
            let n = rng.gen_range(1..=6);
            let m = random_model(&mut rng, kind, n);
            let st = statements(&m)?;
            ensure!(st.iter().all(|&b| b == st[0]), "kind {kind} model {i}: {st:?}");
            constant += st[0] as usize;
            for k in 0..=n {
                let q = Query::local(Kind::LocalContrastive, Example::zeros(n), Minimality::Cardinality, Some(k));
                let lcxp = ok(explain(&m, &q, &Options::default()))?.witness.is_some();
                ensure!(lcxp == low_weight_flip(&m, k)?, "kind {kind} model {i} k={k}: low-weight flip differs");
            }
        }
    }
    Ok(format!("400 models over 8 kinds, {constant} constant"))
}

// ---------------------------------------------------------------------------
// 12

fn scenarios() -> Vec<(&'static str, Value)> {
    let tri = json!({"parts": [["a"], ["b"], ["c"]], "edges": [["a", "b"], ["b", "c"], ["a", "c"]]});
    let path = json!({"parts": [["a"], ["b"], ["c"]], "edges": [["a", "b"], ["b", "c"]]});
    let square = json!({"parts": [["a", "b"], ["c", "d"]], "edges": [["a", "d"], ["b", "c"]]});
    let two = json!({"parts": [["a", "b"], ["c"]], "edges": [["b", "c"]]});
    let lonely = json!({"parts": [["a"], ["b"]], "edges": []});
    let exists = model_to_value(&Model::Obdd(obdd_primitive(&Primitive::Exists, &prefixed("v", 3)).unwrap()));
    let one = model_to_value(&Model::Obdd(obdd_primitive(&Primitive::ExactlyOne, &prefixed("v", 3)).unwrap()));
    vec![
        ("hitting_set", json!({"universe": ["a", "b", "c"], "sets": [["a", "b"], ["b", "c"]], "k": 1})),
        ("hitting_set", json!({"universe": ["a", "b", "c", "d"], "sets": [["a"], ["b", "c"], ["c", "d"]], "k": 2})),
        ("hitting_set", json!({"universe": ["a", "b"], "sets": [["a"], ["b"]]})),
        ("hitting_set", json!({"universe": ["p", "q", "r", "s", "t"], "sets": [["p", "q"], ["r"], ["s", "t"], ["q", "t"]], "k": 3})),
        ("maj_hom", json!({"graph": tri, "family": "dt"})),
        ("maj_hom", json!({"graph": tri, "family": "ds"})),
        ("maj_hom", json!({"graph": tri, "family": "obdd"})),
        ("maj_hom", json!({"graph": square, "family": "dt"})),
        ("maj_hom", json!({"graph": square, "family": "obdd"})),
        ("mcc_ds", json!({"graph": tri})),
        ("mcc_ds", json!({"graph": two})),
        ("mcc_ds_ensemble", json!({"graph": tri})),
        ("mcc_ds_ensemble", json!({"graph": square})),
        ("mcc_gaxp_dt", json!({"graph": two})),
        ("mcc_dt_ensemble", json!({"graph": path})),
        ("mcc_obdd_maj", json!({"graph": lonely})),
        ("taut_ds", json!({"variables": ["a", "b"], "terms": [[["a", 0]], [["a", 1]]]})),
        ("taut_ds", json!({"variables": ["a", "b", "c"], "terms": [[["a", 1], ["b", 1]], [["a", 0]], [["b", 0]]]})),
        ("laxp_to_gaxp", json!({"model": exists, "example": {"v0": 1, "v1": 1, "v2": 1}, "k": 1})),
        ("laxp_to_gaxp", json!({"model": one, "example": {"v0": 1, "v1": 0, "v2": 0}, "k": 3})),
    ]
}

/// Runs every scenario and returns the concatenated outputs.
fn round_trip(dir: &Path) -> Result<String, String> {
    let mut transcript = String::new();
    for (i, (gadget, params)) in scenarios().into_iter().enumerate() {
        let model = dir.join(format!("{i}-model.json"));
        let query = dir.join(format!("{i}-query.json"));
        let result = dir.join(format!("{i}-result.json"));
        let r = cli(&["generate", gadget, "--params", &params.to_string(), "--out", s(&model), "--query-out", s(&query)]);
        ensure!(r.code == 0, "scenario {i} ({gadget}): generate exited {}", r.code);
        transcript += &r.stdout;
        let r = cli(&["explain", "--model", s(&model), "--query", s(&query), "--out", s(&result)]);
        ensure!(r.code == 0, "scenario {i} ({gadget}): explain exited {}", r.code);
        transcript += &r.stdout;
        let r = cli(&["verify", "--model", s(&model), "--query", s(&query), "--witness", s(&result), "--minimal"]);
        ensure!(r.code == 0, "scenario {i} ({gadget}): verify exited {}", r.code);
        transcript += &r.stdout;
        for f in [&model, &query, &result] {
            transcript += &fs::read_to_string(f).map_err(|e| e.to_string())?;
        }
    }
    Ok(transcript)
}

fn cli_round_trip() -> Check {
    let first = round_trip(&scratch("round-a"))?;
    let second = round_trip(&scratch("round-b"))?;
    ensure!(first == second, "outputs differ between runs");
    Ok(format!("20 scenarios, {} identical bytes across two runs", first.len()))
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("running example ground truth", running_example),
        ("tree routines match the oracle", tree_oracle),
        ("diagram routines match the oracle", diagram_oracle),
        ("branching search", branching),
        ("product constructions", products),
        ("circuit compilers", compilers),
        ("clique reductions", reductions),
        ("hitting-set reduction", hitting_sets),
        ("diagram gadgets", diagram_gadgets),
        ("local to global chain", local_to_global),
        ("homogeneity equivalences", homogeneity),
        ("command-line round trip", cli_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({ms} ms)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
