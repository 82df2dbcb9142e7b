//! Machine-readable verdict documents and graph renderings. Reports
//! serialize with alphabetically ordered fields and no volatile data,
//! so identical inputs produce byte-identical output.

use std::io;
use std::path::Path;

use serde_json::{json, Value};

use crate::deps::DepEdge;
use crate::semantics::Interpretation;

/// The versioned envelope every command emits.
pub fn envelope(command: &str, input: &str, bounds: Value, verdict: &str, details: Value) -> Value {
    json!({
        "schema": 1,
        "command": command,
        "input": input,
        "bounds": bounds,
        "verdict": verdict,
        "details": details,
    })
}

pub fn to_json_text(v: &Value) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("reports hold no non-string keys");
    text.push('\n');
    text
}

pub fn write_json(path: &Path, v: &Value) -> io::Result<()> {
    std::fs::write(path, to_json_text(v))
}

fn dot_quote(label: &str) -> String {
    let mut out = String::with_capacity(label.len() + 2);
    out.push('"');
    for c in label.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// A dependency graph in DOT form, nodes and edges sorted.
pub fn dot_graph(edges: &[DepEdge]) -> String {
    let mut sorted: Vec<&DepEdge> = edges.iter().collect();
    sorted.sort();
    let mut nodes: Vec<String> = Vec::new();
    for e in &sorted {
        for n in [&e.src, &e.dst] {
            let label = n.to_string();
            if !nodes.contains(&label) {
                nodes.push(label);
            }
        }
    }
    nodes.sort();
    let mut out = String::from("digraph deps {\n");
    for n in &nodes {
        out.push_str(&format!("  {};\n", dot_quote(n)));
    }
    for e in &sorted {
        out.push_str(&format!(
            "  {} -> {} [label={}];\n",
            dot_quote(&e.src.to_string()),
            dot_quote(&e.dst.to_string()),
            dot_quote(&e.rule.to_string()),
        ));
    }
    out.push_str("}\n");
    out
}

/// An interpretation as JSON: carriers and denotations in display form.
pub fn interp_json(interp: &Interpretation) -> Value {
    let types: Value = interp
        .delta
        .iter()
        .map(|(ty, den)| (ty.to_string(), Value::String(den.to_string())))
        .collect::<serde_json::Map<_, _>>()
        .into();
    let consts: Value = interp
        .gamma
        .iter()
        .map(|(c, den)| (format!("{}:{}", c.name, c.ty), Value::String(den.to_string())))
        .collect::<serde_json::Map<_, _>>()
        .into();
    json!({ "types": types, "consts": consts })
}
