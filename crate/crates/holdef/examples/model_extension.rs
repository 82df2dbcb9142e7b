//! Building a model of a whole update chain, one extension at a time.

use holdef::model_ext::{build_chain_model, wellformed, ModelConfig, ModelError};
use holdef::script::{elaborate, parse_theory};

// Orderings on 'a lifted lexicographically to orderings on list 'a.
const LEX: &str = include_str!("../fixtures/lex.thy");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctxt = elaborate(&parse_theory(LEX)?)?;
    let cfg = ModelConfig::default();

    // wellformed gates the whole construction: the chain must extend
    // the seed, stay orthogonal, and have a terminating dependency
    // relation.
    wellformed(&ctxt, cfg.bound)?;

    // Each step reinterprets only what the update touches; symbols of
    // the independent fragment keep their old denotations by reuse.
    let (interp, steps) = build_chain_model(&ctxt, &cfg)?;
    for (i, s) in steps.iter().enumerate() {
        println!("step {}: {} adds {} type(s), {} constant(s)", i + 1, s.update, s.types, s.consts);
    }

    println!("carriers at depth {}:", cfg.depth);
    for (ty, den) in &interp.delta {
        println!("  {ty} has {} element(s)", den.card());
    }
    println!("constants:");
    for (c, den) in &interp.gamma {
        let shown = den.to_string();
        if shown.len() <= 32 {
            println!("  {}:{} = {shown}", c.name, c.ty);
        } else {
            println!("  {}:{} is a graph of {} pair(s)", c.name, c.ty, den.card());
        }
    }

    // Starving the budget shrinks the materialized fragment instead of
    // corrupting it: instances over the cap drop out and later checks
    // over them report vacuous, never a wrong value. Only an instance
    // the construction cannot do without surfaces as a resource error.
    let mut tight = ModelConfig::default();
    tight.budget.carrier_cap = 2;
    match build_chain_model(&ctxt, &tight) {
        Err(ModelError::Sem(e)) if e.is_resource() => println!("starved: {e}"),
        Err(e) => println!("failed: {e}"),
        Ok((small, _)) => println!(
            "tight cap: {} carrier(s), {} constant(s) still materialize",
            small.delta.len(),
            small.gamma.len()
        ),
    }
    Ok(())
}
