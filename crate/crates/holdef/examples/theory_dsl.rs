//! The theory script language: parsing, printing, and elaboration.

use holdef::script::{elaborate, parse_symbol, parse_theory, print_theory};

// Scripts start from a prelude and grow it one statement at a time.
// Proof terms reference the derived rules by name.
const SCRIPT: &str = r#"
(prelude bool)
(newconst c (bool))
(constspec :overload true
  :eqs ((c (true)))
  :prop (= c (true))
  :proof (assume (= c (true))))
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let script = parse_theory(SCRIPT)?;
    println!("parsed {} growth statement(s)", script.growth_count());

    // Printing is canonical; parsing the print yields the same script.
    let printed = print_theory(&script);
    print!("{printed}");
    assert_eq!(parse_theory(&printed)?, script);
    println!("round-trip: stable");

    // Elaboration replays the statements through the update gate,
    // checking each proof in the kernel along the way.
    let ctxt = elaborate(&script)?;
    println!("elaborated: {} axiom(s), newest {}", ctxt.axioms().len(), ctxt.axioms().last().unwrap());

    // Parse errors carry line:column positions.
    match parse_theory("(prelude bool)\n(newconst c (bool)") {
        Err(e) => println!("parse error: {e}"),
        Ok(_) => unreachable!(),
    }

    // Elaboration errors name the offending statement.
    match elaborate(&parse_theory("(prelude bool)\n(newconst c (tycon nosuch))")?) {
        Err(e) => println!("elab error:  {e}"),
        Ok(_) => unreachable!(),
    }

    // Symbols for the fragment tooling use the same reader.
    println!("symbol: {}", parse_symbol("(const c (fun (bool) (bool)))")?);
    println!("symbol: {}", parse_symbol("(type (bool))")?);
    Ok(())
}
