//! Command dispatch for the workbench binary. Verdicts go to stdout
//! and drive the exit code; usage and input errors go to stderr.
//!
//! Exit codes: 0 the check passed, 1 it failed, 2 it could not be
//! decided within the configured bounds, 64 the invocation or input
//! file was unusable.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::deps::{check_termination, dep_edges, DepNode, TerminationVerdict};
use crate::fragment::{FragmentSpec, Verdict3, DEFAULT_FRAGMENT_BOUND};
use crate::model_ext::{
    build_chain_model, check_conservativity, check_consistency, wellformed, ModelConfig,
    ModelError,
};
use crate::report::{dot_graph, envelope, interp_json, write_json};
use crate::script::{elaborate, elaborate_prefix, parse_symbol, parse_theory, TheoryScript};
use crate::semantics::Budget;
use crate::theory::Context;

const EXIT_OK: i32 = 0;
const EXIT_FAIL: i32 = 1;
const EXIT_UNKNOWN: i32 = 2;
const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(name = "holdef", version, about = "Check, analyse and model definitional theories")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay a script through the update gate, then check
    /// orthogonality and termination.
    Check(CheckArgs),
    /// Print the dependency graph and its termination verdict.
    Deps(DepsArgs),
    /// Decide whether a symbol is independent of one update.
    Indep(IndepArgs),
    /// Build the chain model and dump its carriers.
    Model(ModelArgs),
    /// Compare the models before and after the newest update.
    Conserve(ConserveArgs),
    /// Derive reflexivity and falsify distinctness in the chain model.
    Consist(ConsistArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Theory script.
    file: PathBuf,
    /// Termination search bound.
    #[arg(long, default_value_t = DEFAULT_FRAGMENT_BOUND)]
    bound: usize,
    /// Write a JSON report here.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DepsArgs {
    /// Theory script.
    file: PathBuf,
    /// Termination search bound.
    #[arg(long, default_value_t = DEFAULT_FRAGMENT_BOUND)]
    bound: usize,
    /// Write the graph in DOT form here.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Write a JSON report here.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct IndepArgs {
    /// Theory script.
    file: PathBuf,
    /// The symbol to classify: (const NAME TYPE) or (type TYPE).
    #[arg(long, value_name = "SEXP")]
    symbol: String,
    /// Which growth statement defines the update, counting from 1;
    /// defaults to the last.
    #[arg(long, value_name = "N")]
    update: Option<usize>,
    /// Dependency search bound.
    #[arg(long, default_value_t = DEFAULT_FRAGMENT_BOUND)]
    bound: usize,
    /// Write a JSON report here.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    /// Theory script.
    file: PathBuf,
    /// Ground-type depth to materialize and sweep.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Largest carrier any type may take.
    #[arg(long, value_name = "N", default_value_t = Budget::default().carrier_cap)]
    carrier_cap: usize,
    /// Dependency search bound.
    #[arg(long, default_value_t = DEFAULT_FRAGMENT_BOUND)]
    bound: usize,
    /// Write a JSON report here.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ConserveArgs {
    /// Theory script.
    file: PathBuf,
    /// Ground-type depth to sweep.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Largest carrier any type may take.
    #[arg(long, value_name = "N", default_value_t = Budget::default().carrier_cap)]
    carrier_cap: usize,
    /// Dependency search bound.
    #[arg(long, default_value_t = DEFAULT_FRAGMENT_BOUND)]
    bound: usize,
    /// Write a JSON report here.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ConsistArgs {
    /// Theory script.
    file: PathBuf,
    /// Ground-type depth to sweep.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Largest carrier any type may take.
    #[arg(long, value_name = "N", default_value_t = Budget::default().carrier_cap)]
    carrier_cap: usize,
    /// Dependency search bound.
    #[arg(long, default_value_t = DEFAULT_FRAGMENT_BOUND)]
    bound: usize,
    /// Write a JSON report here.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

/// Entry point for the binary; `args` excludes the program name.
pub fn run(args: impl Iterator<Item = String>) -> i32 {
    let argv = std::iter::once("holdef".to_string()).chain(args);
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            print!("{e}");
            return EXIT_OK;
        }
    };
    match cli.cmd {
        Cmd::Check(a) => check_cmd(&a),
        Cmd::Deps(a) => deps_cmd(&a),
        Cmd::Indep(a) => indep_cmd(&a),
        Cmd::Model(a) => model_cmd(&a),
        Cmd::Conserve(a) => conserve_cmd(&a),
        Cmd::Consist(a) => consist_cmd(&a),
    }
}

fn load(file: &Path) -> Result<TheoryScript, i32> {
    let text = match std::fs::read_to_string(file) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return Err(EXIT_USAGE);
        }
    };
    parse_theory(&text).map_err(|e| {
        eprintln!("{}: {e}", file.display());
        EXIT_USAGE
    })
}

fn config(depth: usize, carrier_cap: usize, bound: usize) -> ModelConfig {
    let mut cfg = ModelConfig { depth, bound, ..ModelConfig::default() };
    cfg.budget.carrier_cap = carrier_cap;
    cfg
}

/// Exhausted bounds are inconclusive; everything else is a failure.
fn exit_for(e: &ModelError) -> i32 {
    match e {
        ModelError::TerminationUnknown(_) | ModelError::FragmentUnknown(_) => EXIT_UNKNOWN,
        ModelError::Sem(s) if s.is_resource() => EXIT_UNKNOWN,
        _ => EXIT_FAIL,
    }
}

fn emit(json_path: &Option<PathBuf>, doc: &Value) -> Result<(), i32> {
    if let Some(path) = json_path {
        write_json(path, doc).map_err(|e| {
            eprintln!("{}: {e}", path.display());
            EXIT_USAGE
        })?;
    }
    Ok(())
}

fn input_name(file: &Path) -> String {
    file.display().to_string()
}

fn check_cmd(a: &CheckArgs) -> i32 {
    let script = match load(&a.file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let bounds = json!({ "bound": a.bound });
    let (verdict, detail, code) = match elaborate(&script) {
        Err(e) => ("fail", json!({ "error": e.to_string() }), EXIT_FAIL),
        Ok(ctxt) => match wellformed(&ctxt, a.bound) {
            Ok(()) => (
                "ok",
                json!({ "updates": script.growth_count() }),
                EXIT_OK,
            ),
            Err(e @ ModelError::TerminationUnknown(_)) => {
                ("unknown", json!({ "error": e.to_string() }), EXIT_UNKNOWN)
            }
            Err(e) => ("fail", json!({ "error": e.to_string() }), EXIT_FAIL),
        },
    };
    match verdict {
        "ok" => println!("ok: {} update(s) accepted", script.growth_count()),
        _ => println!("{verdict}: {}", detail["error"].as_str().unwrap_or("")),
    }
    let doc = envelope("check", &input_name(&a.file), bounds, verdict, detail);
    if let Err(code) = emit(&a.json, &doc) {
        return code;
    }
    code
}

fn deps_cmd(a: &DepsArgs) -> i32 {
    let script = match load(&a.file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let ctxt = match elaborate(&script) {
        Ok(c) => c,
        Err(e) => {
            println!("fail: {e}");
            return EXIT_FAIL;
        }
    };
    let edges = dep_edges(&ctxt);
    let (term_line, code) = match check_termination(&ctxt, a.bound) {
        TerminationVerdict::Terminating { explored } => {
            (format!("terminating: {explored} ground instance(s) explored"), EXIT_OK)
        }
        TerminationVerdict::Cycle { path } => {
            let shown: Vec<String> = path.iter().map(|n| n.to_string()).collect();
            (format!("cycle: {}", shown.join(" -> ")), EXIT_OK)
        }
        TerminationVerdict::Unknown { bound } => {
            (format!("unknown: termination search exhausted bound {bound}"), EXIT_UNKNOWN)
        }
    };
    println!("{} schematic edge(s)", edges.len());
    println!("{term_line}");
    if let Some(path) = &a.dot {
        if let Err(e) = std::fs::write(path, dot_graph(&edges)) {
            eprintln!("{}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    let shown_edges: Vec<String> = edges.iter().map(|e| e.to_string()).collect();
    let doc = envelope(
        "deps",
        &input_name(&a.file),
        json!({ "bound": a.bound }),
        if code == EXIT_OK { "ok" } else { "unknown" },
        json!({ "edges": shown_edges, "termination": term_line }),
    );
    if let Err(code) = emit(&a.json, &doc) {
        return code;
    }
    code
}

fn indep_cmd(a: &IndepArgs) -> i32 {
    let script = match load(&a.file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let growth = script.growth_count();
    let update = a.update.unwrap_or(growth);
    if update == 0 || update > growth {
        eprintln!("the script has {growth} growth statement(s); --update {update} selects none");
        return EXIT_USAGE;
    }
    let node = match parse_symbol(&a.symbol) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("--symbol: {e}");
            return EXIT_USAGE;
        }
    };
    let ctxt = match elaborate_prefix(&script, update) {
        Ok(c) => c,
        Err(e) => {
            println!("fail: {e}");
            return EXIT_FAIL;
        }
    };
    let Some(spec) = FragmentSpec::for_update(&ctxt) else {
        eprintln!("update {update} does not extend a host context");
        return EXIT_USAGE;
    };
    let verdict = match &node {
        DepNode::Ty(ty) => spec.in_indep_frag_types(ty, a.bound),
        DepNode::Const(c) => spec.in_indep_frag_consts(c, a.bound),
    };
    let mut path_shown: Vec<String> = Vec::new();
    let (line, verdict_name, code) = match verdict {
        Verdict3::Yes => {
            (format!("in fragment: {node} is independent of update {update}"), "yes", EXIT_OK)
        }
        Verdict3::No => match spec.witness_path(&node, a.bound) {
            Some(path) => {
                path_shown = path.iter().map(|n| n.to_string()).collect();
                (format!("outside fragment: {}", path_shown.join(" -> ")), "no", EXIT_FAIL)
            }
            None => (
                format!("outside fragment: {node} is not a fragment symbol of the host"),
                "no",
                EXIT_FAIL,
            ),
        },
        Verdict3::Unknown => {
            (format!("unknown: search exhausted bound {}", a.bound), "unknown", EXIT_UNKNOWN)
        }
    };
    println!("{line}");
    let doc = envelope(
        "indep",
        &input_name(&a.file),
        json!({ "bound": a.bound, "update": update }),
        verdict_name,
        json!({ "symbol": node.to_string(), "path": path_shown }),
    );
    if let Err(code) = emit(&a.json, &doc) {
        return code;
    }
    code
}

fn elaborated(file: &Path) -> Result<Context, i32> {
    let script = load(file)?;
    elaborate(&script).map_err(|e| {
        println!("fail: {e}");
        EXIT_FAIL
    })
}

fn model_cmd(a: &ModelArgs) -> i32 {
    let ctxt = match elaborated(&a.file) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let cfg = config(a.depth, a.carrier_cap, a.bound);
    let bounds = json!({ "bound": a.bound, "carrier_cap": a.carrier_cap, "depth": a.depth });
    match build_chain_model(&ctxt, &cfg) {
        Ok((interp, steps)) => {
            for (i, s) in steps.iter().enumerate() {
                println!(
                    "step {}: {} ({} type(s), {} constant(s))",
                    i + 1,
                    s.update,
                    s.types,
                    s.consts
                );
            }
            println!(
                "model: {} type(s), {} constant(s) at depth {}",
                interp.delta.len(),
                interp.gamma.len(),
                a.depth
            );
            let shown_steps: Vec<Value> = steps
                .iter()
                .map(|s| json!({ "consts": s.consts, "types": s.types, "update": s.update }))
                .collect();
            let doc = envelope(
                "model",
                &input_name(&a.file),
                bounds,
                "ok",
                json!({ "model": interp_json(&interp), "steps": shown_steps }),
            );
            if let Err(code) = emit(&a.json, &doc) {
                return code;
            }
            EXIT_OK
        }
        Err(e) => {
            let code = exit_for(&e);
            println!("{}: {e}", if code == EXIT_UNKNOWN { "unknown" } else { "fail" });
            let doc = envelope(
                "model",
                &input_name(&a.file),
                bounds,
                if code == EXIT_UNKNOWN { "unknown" } else { "fail" },
                json!({ "error": e.to_string() }),
            );
            if let Err(code) = emit(&a.json, &doc) {
                return code;
            }
            code
        }
    }
}

fn conserve_cmd(a: &ConserveArgs) -> i32 {
    let ctxt = match elaborated(&a.file) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let Some(parent) = ctxt.parent() else {
        eprintln!("the script defines nothing to compare against");
        return EXIT_USAGE;
    };
    let Some(frag) = FragmentSpec::for_update(&ctxt) else {
        eprintln!("the script defines nothing to compare against");
        return EXIT_USAGE;
    };
    let cfg = config(a.depth, a.carrier_cap, a.bound);
    let bounds = json!({ "bound": a.bound, "carrier_cap": a.carrier_cap, "depth": a.depth });
    let run = || -> Result<_, ModelError> {
        let (base, _) = build_chain_model(&parent, &cfg)?;
        let (extended, _) = build_chain_model(&ctxt, &cfg)?;
        check_conservativity(&base, &extended, &frag, &cfg, &[])
    };
    match run() {
        Ok(rep) => {
            let held = rep.kept.iter().filter(|(_, eq)| *eq).count();
            let code = if !rep.verdict {
                EXIT_FAIL
            } else if rep.unknown.is_empty() {
                EXIT_OK
            } else {
                EXIT_UNKNOWN
            };
            let verdict = match code {
                EXIT_OK => "ok",
                EXIT_UNKNOWN => "unknown",
                _ => "fail",
            };
            println!(
                "{}: {held} of {} fragment symbol(s) kept their value, {} undecided",
                if rep.verdict { "conservative" } else { "not conservative" },
                rep.kept.len(),
                rep.unknown.len(),
            );
            for (name, eq) in rep.kept.iter().filter(|(_, eq)| !eq) {
                let _ = eq;
                println!("changed: {name}");
            }
            let kept: Vec<Value> =
                rep.kept.iter().map(|(name, eq)| json!({ "kept": eq, "symbol": name })).collect();
            let doc = envelope(
                "conserve",
                &input_name(&a.file),
                bounds,
                verdict,
                json!({ "symbols": kept, "undecided": rep.unknown }),
            );
            if let Err(code) = emit(&a.json, &doc) {
                return code;
            }
            code
        }
        Err(e) => {
            let code = exit_for(&e);
            println!("{}: {e}", if code == EXIT_UNKNOWN { "unknown" } else { "fail" });
            code
        }
    }
}

fn consist_cmd(a: &ConsistArgs) -> i32 {
    let ctxt = match elaborated(&a.file) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let cfg = config(a.depth, a.carrier_cap, a.bound);
    let bounds = json!({ "bound": a.bound, "carrier_cap": a.carrier_cap, "depth": a.depth });
    match check_consistency(&ctxt, &cfg) {
        Ok(rep) => {
            let bindings: Vec<String> = rep
                .counterexample
                .iter()
                .map(|((x, ty), v)| format!("{x}:{ty} := {v}"))
                .collect();
            println!(
                "consistent: reflexivity is derivable and distinctness fails at {} ({} model step(s))",
                bindings.join(", "),
                rep.steps.len(),
            );
            let doc = envelope(
                "consist",
                &input_name(&a.file),
                bounds,
                "ok",
                json!({ "counterexample": bindings, "steps": rep.steps.len() }),
            );
            if let Err(code) = emit(&a.json, &doc) {
                return code;
            }
            EXIT_OK
        }
        Err(e) => {
            let code = exit_for(&e);
            println!("{}: {e}", if code == EXIT_UNKNOWN { "unknown" } else { "fail" });
            let doc = envelope(
                "consist",
                &input_name(&a.file),
                bounds,
                if code == EXIT_UNKNOWN { "unknown" } else { "fail" },
                json!({ "error": e.to_string() }),
            );
            if let Err(code) = emit(&a.json, &doc) {
                return code;
            }
            code
        }
    }
}
