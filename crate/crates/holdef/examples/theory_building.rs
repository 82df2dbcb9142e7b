//! Growing a definitional context one gated update at a time.

use holdef::base_theories::{bool_context, const_def};
use holdef::syntax::{Term, Type};
use holdef::theory::{Context, Update};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // The seed context holds equality and nothing else.
    let seed = Context::init();
    println!(
        "seed: {} type(s), {} constant(s)",
        seed.signature().tys.len(),
        seed.signature().consts.len()
    );

    // Declarations extend the signature without proof obligations.
    let ctxt = seed.extend(Update::NewType { name: "u".into(), arity: 0 }, None)?;
    let u = Type::app("u", vec![]);
    let ctxt = ctxt.extend(Update::NewConst { name: "k".into(), ty: u.clone() }, None)?;
    println!("declared: type u, constant k : {}", ctxt.signature().consts["k"]);

    // Definitions pass through the specification gate, which demands a
    // closed witness over the previous signature and records the
    // defining equation as an axiom.
    let ctxt = const_def(&ctxt, "k2", Term::constant("k", u.clone()))?;
    println!("defined:  k2, newest axiom {}", ctxt.axioms().last().unwrap());

    // Ill-scoped updates are refused instead of recorded.
    let bad = Update::NewConst { name: "q".into(), ty: Type::app("missing", vec![]) };
    println!("rejected: {}", ctxt.extend(bad, None).unwrap_err());

    // The boolean connectives are themselves a chain of such updates.
    let bools = bool_context();
    println!(
        "bool prelude: {} update(s), {} defining axiom(s)",
        bools.updates().len(),
        bools.axioms().len()
    );
    for ax in bools.axioms().iter().take(2) {
        println!("  {ax}");
    }

    // Contexts are persistent: parent() walks back down the chain.
    let mut names = Vec::new();
    let mut cur = Some(ctxt);
    while let Some(c) = cur {
        if let Some(upd) = c.updates().first() {
            names.push(upd.kind().to_string());
        }
        cur = c.parent();
    }
    println!("chain, newest first: {}", names.join(", "));
    Ok(())
}
