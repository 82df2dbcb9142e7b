//! Classifying symbols against the fragment independent of an update.

use holdef::deps::DepNode;
use holdef::fragment::{enumerate_ground_types, FragmentSpec, Verdict3, DEFAULT_FRAGMENT_BOUND};
use holdef::script::{elaborate_prefix, parse_theory};
use holdef::syntax::{ConstInstance, Type};

// Update 3 overloads c at bool; d was specified from false alone while
// e was specified from c, so d survives in the fragment and e does not.
const SCRIPT: &str = include_str!("../fixtures/d_e_c.thy");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let script = parse_theory(SCRIPT)?;
    let ctxt = elaborate_prefix(&script, 3)?;
    let spec = FragmentSpec::for_update(&ctxt).expect("the prefix extends a host");

    println!("apex of update 3:");
    for node in &spec.apex {
        println!("  {node}");
    }

    // The independent fragment is everything that cannot reach the apex.
    let verdict = |node: &DepNode| match node {
        DepNode::Ty(ty) => spec.in_indep_frag_types(ty, DEFAULT_FRAGMENT_BOUND),
        DepNode::Const(c) => spec.in_indep_frag_consts(c, DEFAULT_FRAGMENT_BOUND),
    };
    // bool lands outside: built-in types are ambient, never fragment
    // members, so independence questions about them are refused.
    let imp = Type::fun(Type::bool_ty(), Type::fun(Type::bool_ty(), Type::bool_ty()));
    let candidates = [
        DepNode::Const(ConstInstance::new("d", Type::bool_ty())),
        DepNode::Const(ConstInstance::new("e", Type::bool_ty())),
        DepNode::Const(ConstInstance::new("c", Type::bool_ty())),
        DepNode::Const(ConstInstance::new("imp", imp)),
        DepNode::Ty(Type::bool_ty()),
    ];
    for node in &candidates {
        let v = match verdict(node) {
            Verdict3::Yes => "independent".to_string(),
            Verdict3::No => match spec.witness_path(node, DEFAULT_FRAGMENT_BOUND) {
                Some(path) => {
                    let shown: Vec<String> = path.iter().map(|n| n.to_string()).collect();
                    format!("reaches the apex: {}", shown.join(" -> "))
                }
                None => "not a fragment symbol of the host".to_string(),
            },
            Verdict3::Unknown => "undecided within the bound".to_string(),
        };
        println!("{node}: {v}");
    }

    // Ground host types up to a depth, the sweep space of the checks.
    let tys: Vec<String> = enumerate_ground_types(&spec.host_sig, 1)
        .iter()
        .map(|t| t.to_string())
        .collect();
    println!("ground host types to depth 1: {}", tys.join(", "));
    Ok(())
}
