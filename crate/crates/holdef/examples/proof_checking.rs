//! Kernel derivations, their replay, and the derived-rule layer.

use holdef::base_theories::{bool_context, disch, eqt_intro, mk_false, mk_true, not_intro, truth};
use holdef::derive::Prover;
use holdef::kernel::{check_derivation, Derivation};
use holdef::syntax::{mk_eq, Term, Type};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let thy = bool_context().theory();

    // A derivation is a tree of rule applications; the kernel replays
    // it bottom-up into a sequent or rejects it.
    let x = Term::var("x", Type::bool_ty());
    let seq = check_derivation(&thy, &Derivation::Refl(x.clone()))?;
    println!("refl:     {seq}");

    let fx = Term::var("f", Type::fun(Type::bool_ty(), Type::bool_ty()));
    let clash = Derivation::Trans(
        Box::new(Derivation::Refl(x.clone())),
        Box::new(Derivation::Refl(fx)),
    );
    println!("rejected: {}", check_derivation(&thy, &clash).unwrap_err());

    // The prover applies the same rules but keeps every intermediate
    // sequent checked, so a Thm is valid by construction.
    let p = Prover::new(thy)?;
    println!("truth:    {}", truth(&p)?.sequent());

    let asm = p.assume(mk_eq(x.clone(), mk_true()).unwrap())?;
    println!("assume:   {}", asm.sequent());
    println!("eqt:      {}", eqt_intro(&p, &asm)?.sequent());

    // Beta conversion is primitive; sym and the rest are derived.
    let idx = Term::comb(Term::abs("y", Type::bool_ty(), Term::var("y", Type::bool_ty())), x.clone());
    let beta = p.beta_conv(&idx)?;
    println!("beta:     {}", beta.sequent());
    println!("sym:      {}", p.sym(&beta)?.sequent());

    // Discharging an assumption builds an implication; not_intro turns
    // an implication into falsity into a negation.
    let f = mk_false();
    let absurd = p.assume(f.clone())?;
    let imp = disch(&p, &f, &absurd)?;
    println!("disch:    {}", imp.sequent());
    println!("not:      {}", not_intro(&p, &imp)?.sequent());

    // Type instantiation specializes a schematic theorem.
    let a = Type::var("a");
    let ra = p.refl(Term::var("v", a.clone()))?;
    let rb = p.inst_type(&[("a".into(), Type::fun(Type::bool_ty(), Type::bool_ty()))], &ra)?;
    println!("inst_ty:  {}", rb.sequent());
    Ok(())
}
