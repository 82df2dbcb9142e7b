//! Schematic dependency edges, ground stepping, and termination.

use holdef::deps::{check_termination, context_orthogonal, dep_edges, DepGraph, DepNode, TerminationVerdict};
use holdef::fragment::DEFAULT_FRAGMENT_BOUND;
use holdef::script::{elaborate, parse_theory};
use holdef::syntax::{ConstInstance, Type};

// Orderings on 'a lift to orderings on list 'a: the classic recursion
// whose dependency relation is substitutive but still terminating.
const LEX: &str = include_str!("../fixtures/lex.thy");

fn rel(t: Type) -> Type {
    Type::fun(t.clone(), Type::fun(t, Type::bool_ty()))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctxt = elaborate(&parse_theory(LEX)?)?;

    // Edges are read off the updates schematically, one per mention.
    let edges = dep_edges(&ctxt);
    println!("{} schematic edge(s):", edges.len());
    for e in &edges {
        println!("  {e}");
    }

    // Ground nodes step through every matching schematic edge, with
    // the matching substitution applied to the endpoint.
    let graph = DepGraph::of(&ctxt);
    let node = DepNode::Const(ConstInstance::new(
        "leq",
        rel(Type::app("list", vec![Type::bool_ty()])),
    ));
    println!("step {node}:");
    for succ in graph.step(&node) {
        println!("  -> {succ}");
    }

    // Termination searches the ground instance space breadth-first.
    match check_termination(&ctxt, DEFAULT_FRAGMENT_BOUND) {
        TerminationVerdict::Terminating { explored } => {
            println!("terminating: {explored} ground instance(s) explored");
        }
        TerminationVerdict::Cycle { path } => {
            let shown: Vec<String> = path.iter().map(|n| n.to_string()).collect();
            println!("cycle: {}", shown.join(" -> "));
        }
        TerminationVerdict::Unknown { bound } => println!("unknown at bound {bound}"),
    }

    // Orthogonality: no two updates define overlapping instances.
    println!("orthogonal: {}", context_orthogonal(&ctxt).is_ok());

    // A self-feeding overload never reaches the context at all: the
    // update gate runs the same search and replays the offending loop.
    let cyclic = include_str!("../fixtures/cyclic.thy");
    match elaborate(&parse_theory(cyclic)?) {
        Ok(_) => unreachable!("the gate rejects cyclic specifications"),
        Err(e) => println!("gate: {e}"),
    }
    Ok(())
}
