//! Comparing models before and after an update over the shared fragment.

use holdef::fragment::FragmentSpec;
use holdef::model_ext::{build_chain_model, check_conservativity, ModelConfig};
use holdef::script::{elaborate, parse_theory};
use holdef::syntax::{Term, Type};

// The last update overloads c := true. The host fragment around it
// must not notice: d keeps its value bit for bit, e is outside.
const SCRIPT: &str = include_str!("../fixtures/d_e_c.thy");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctxt = elaborate(&parse_theory(SCRIPT)?)?;
    let parent = ctxt.parent().expect("the script grows the seed");
    let frag = FragmentSpec::for_update(&ctxt).expect("the script grows the seed");
    let cfg = ModelConfig::default();

    let (base, _) = build_chain_model(&parent, &cfg)?;
    let (extended, _) = build_chain_model(&ctxt, &cfg)?;

    // Every fragment symbol materialized on both sides must denote the
    // same set; sample terms are evaluated in both models as well.
    let samples = vec![Term::constant("d", Type::bool_ty())];
    let report = check_conservativity(&base, &extended, &frag, &cfg, &samples)?;

    println!("verdict: {}", if report.verdict { "conservative" } else { "not conservative" });
    for (name, eq) in &report.kept {
        println!("  {:9} {name}", if *eq { "kept" } else { "changed" });
    }
    for name in &report.unknown {
        println!("  undecided {name}");
    }
    for (term, eq) in &report.term_checks {
        println!("  sample {term}: {}", if *eq { "same value" } else { "diverged" });
    }
    Ok(())
}
