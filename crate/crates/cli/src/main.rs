//! `modelxp`: explain, verify, generate and bench over JSON model files.
//!
//! Exit codes: 0 when a witness is found or a witness is valid, 3 when no
//! explanation exists or the witness is invalid, 2 for unreadable or invalid
//! input, 1 for any other failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use modelxp::explain::DEFAULT_GUARD;
use modelxp::format::{
    model_from_str, model_to_string, query_from_value, query_to_value, witness_from_value,
    witness_to_value,
};
use modelxp::gadgets::{generate, GENERATORS};
use modelxp::solve::{explain_with_timeout, verify, Options, Route, Solution, DEFAULT_CAP_NODES};
use modelxp::{Classifier, Error, Model, Query};

#[derive(Parser)]
#[command(name = "modelxp", version, about = "Explanations for rule, tree and diagram classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Solver {
    /// Force a route: dt, obdd, branching, product, compile or brute-force.
    #[arg(long)]
    route: Option<Route>,
    /// Node cap for product constructions.
    #[arg(long, default_value_t = DEFAULT_CAP_NODES)]
    cap_nodes: usize,
    /// Most features the exhaustive routines may leave open.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard_features: usize,
    #[arg(long)]
    timeout_ms: Option<u64>,
}

impl Solver {
    fn options(&self) -> Options {
        Options {
            route: self.route,
            cap_nodes: self.cap_nodes,
            guard: self.guard_features,
            timeout: self.timeout_ms.map(Duration::from_millis),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute an explanation and print it as JSON.
    Explain {
        #[arg(long)]
        model: PathBuf,
        /// Query as inline JSON or a path to a JSON file.
        #[arg(long)]
        query: String,
        #[command(flatten)]
        solver: Solver,
        /// Also write the result to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a witness against a query.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        query: String,
        /// Witness as inline JSON or a path; `explain` output is accepted.
        #[arg(long)]
        witness: String,
        /// Also require subset-minimality.
        #[arg(long)]
        minimal: bool,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard_features: usize,
    },
    /// Build a reduction instance and write it as a model file.
    Generate {
        /// One of the generator names listed by `--help`.
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(GENERATORS))]
        gadget: String,
        /// Parameters as inline JSON or a path.
        #[arg(long, default_value = "{}")]
        params: String,
        #[arg(long)]
        out: PathBuf,
        /// Write the query that decides the source instance here.
        #[arg(long)]
        query_out: Option<PathBuf>,
    },
    /// Run one query over every `.json` model in a directory and write CSV.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        query: String,
        /// Overrides the query's `k`.
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        solver: Solver,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = if error.is_input_error() { 2 } else { 1 };
        Failure { code, error }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

type Outcome = std::result::Result<u8, Failure>;

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::UndefinedFeature(_) => "undefined_feature",
        Error::FeatureOutOfRange { .. } => "feature_out_of_range",
        Error::ExampleLength { .. } => "example_length",
        Error::EvenEnsemble(_) => "even_ensemble",
        Error::MixedEnsemble => "mixed_ensemble",
        Error::NotOrdered(_) => "not_ordered",
        Error::TooLarge { .. } => "too_large",
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::Timeout => "timeout",
        Error::Homogeneous => "homogeneous",
        Error::SharedFeature(_) => "shared_feature",
        Error::UnassignedInput(_) => "unassigned_input",
        Error::Invalid(_) => "invalid",
        Error::Parse(_) => "parse",
        Error::Json(_) => "json",
        Error::Io(_) => "io",
    }
}

/// Inline JSON when the argument starts like JSON, a file path otherwise.
fn json_arg(arg: &str) -> modelxp::Result<Value> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with(['{', '[', '"']) || trimmed.parse::<f64>().is_ok() {
        arg.to_owned()
    } else {
        fs::read_to_string(arg)?
    };
    Ok(serde_json::from_str(&text)?)
}

fn load_model(path: &Path) -> modelxp::Result<Model> {
    model_from_str(&fs::read_to_string(path)?)
}

fn write_json(path: Option<&Path>, v: &Value) -> modelxp::Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    print!("{text}");
    if let Some(p) = path {
        fs::write(p, text)?;
    }
    Ok(())
}

fn result_json(m: &Model, q: &Query, sol: &Solution) -> Value {
    let mut params = m.parameters();
    params.xp_size = q.budget;
    let names = m.feature_names();
    let mut v = json!({
        "witness": sol.witness.as_ref().map(|w| witness_to_value(names, w)),
        "size": sol.witness.as_ref().map(|w| w.size()),
        "algorithm": sol.route.name(),
        "parameters": params,
        "status": if sol.witness.is_some() { "witness" } else { "none" },
        "query": query_to_value(names, q),
    });
    if let Some(stats) = &sol.branch_stats {
        v["branch_stats"] = json!({
            "candidates": stats.candidates,
            "max_leaves": stats.max_leaves,
            "total_leaves": stats.total_leaves,
        });
    }
    v
}

fn cmd_explain(model: &Path, query: &str, solver: &Solver, out: Option<&Path>) -> Outcome {
    let m = load_model(model)?;
    let q = query_from_value(m.feature_names(), &json_arg(query)?)?;
    let sol = explain_with_timeout(&m, &q, &solver.options())?;
    write_json(out, &result_json(&m, &q, &sol))?;
    Ok(if sol.witness.is_some() { 0 } else { 3 })
}

fn cmd_verify(model: &Path, query: &str, witness: &str, minimal: bool, guard: usize) -> Outcome {
    let m = load_model(model)?;
    let q = query_from_value(m.feature_names(), &json_arg(query)?)?;
    let mut w = json_arg(witness)?;
    if w.get("witness").is_some() && w.get("status").is_some() {
        w = w["witness"].take();
    }
    if w.is_null() {
        return Err(Error::Invalid("the witness is null".into()).into());
    }
    let w = witness_from_value(m.feature_names(), &w)?;
    let valid = verify(&m, &q, &w, minimal, guard)? && q.budget.is_none_or(|k| w.size() <= k);
    write_json(None, &json!({"valid": valid, "size": w.size(), "minimal_checked": minimal}))?;
    Ok(if valid { 0 } else { 3 })
}

fn cmd_generate(gadget: &str, params: &str, out: &Path, query_out: Option<&Path>) -> Outcome {
    let g = generate(gadget, &json_arg(params)?)?;
    fs::write(out, model_to_string(&g.model))?;
    let query = g
        .query
        .as_ref()
        .map(|q| query_to_value(g.model.feature_names(), q));
    if let (Some(path), Some(q)) = (query_out, &query) {
        fs::write(path, serde_json::to_string_pretty(q)? + "\n")?;
    }
    write_json(
        None,
        &json!({
            "gadget": gadget,
            "kind": g.model.kind(),
            "features": g.model.num_features(),
            "elements": g.model.elements().len(),
            "query": query,
            "info": g.info,
        }),
    )?;
    Ok(0)
}

const BENCH_HEADER: [&str; 14] = [
    "instance",
    "kind",
    "ens_size",
    "mnl_size",
    "terms_elem",
    "term_size",
    "width_elem",
    "size_elem",
    "xp_size",
    "witness_size",
    "status",
    "route",
    "time_ms",
    "error",
];

fn opt(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn bench_row(path: &Path, query: &Value, budget: Option<usize>, opts: &Options) -> Vec<String> {
    let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
    let prepared = load_model(path).and_then(|m| {
        let mut q = query_from_value(m.feature_names(), query)?;
        if budget.is_some() {
            q.budget = budget;
        }
        Ok((m, q))
    });
    let (m, q) = match prepared {
        Ok(x) => x,
        Err(e) => {
            let mut row = vec![name];
            row.extend(std::iter::repeat_n(String::new(), 9));
            row.extend(["error".into(), String::new(), String::new(), e.to_string()]);
            return row;
        }
    };
    let p = m.parameters();
    let mut row = vec![name, m.kind().to_string()];
    row.extend([p.ens_size, p.mnl_size, p.terms_elem, p.term_size, p.width_elem, p.size_elem, q.budget].map(opt));
    let start = Instant::now();
    let result = explain_with_timeout(&m, &q, opts);
    let ms = format!("{:.3}", start.elapsed().as_secs_f64() * 1e3);
    let (size, status, route, error) = match result {
        Ok(sol) => (
            opt(sol.witness.as_ref().map(|w| w.size())),
            if sol.witness.is_some() { "witness" } else { "none" },
            sol.route.name(),
            String::new(),
        ),
        Err(Error::Timeout) => (String::new(), "timeout", "", String::new()),
        Err(e) => (String::new(), "error", "", e.to_string()),
    };
    row.extend([size, status.into(), route.into(), ms, error]);
    row
}

fn cmd_bench(corpus: &Path, query: &str, budget: Option<usize>, solver: &Solver, out: Option<&Path>) -> Outcome {
    let query = json_arg(query)?;
    let mut files: Vec<PathBuf> = fs::read_dir(corpus)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let opts = solver.options();
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let to_err = |e: csv::Error| Error::Invalid(e.to_string());
        w.write_record(BENCH_HEADER).map_err(to_err)?;
        for f in &files {
            w.write_record(bench_row(f, &query, budget, &opts)).map_err(to_err)?;
        }
        w.flush()?;
    }
    let text = String::from_utf8(buf).expect("csv is utf-8");
    print!("{text}");
    if let Some(p) = out {
        fs::write(p, &text)?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Explain { model, query, solver, out } => cmd_explain(model, query, solver, out.as_deref()),
        Command::Verify { model, query, witness, minimal, guard_features } => {
            cmd_verify(model, query, witness, *minimal, *guard_features)
        }
        Command::Generate { gadget, params, out, query_out } => {
            cmd_generate(gadget, params, out, query_out.as_deref())
        }
        Command::Bench { corpus, query, budget, solver, out } => {
            cmd_bench(corpus, query, *budget, solver, out.as_deref())
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            let v = json!({"error": {"kind": error_kind(&error), "message": error.to_string()}});
            println!("{v}");
            eprintln!("modelxp: {error}");
            ExitCode::from(code)
        }
    }
}
