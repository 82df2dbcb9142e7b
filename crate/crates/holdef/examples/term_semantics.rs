//! Evaluating terms in a finite interpretation and sweeping valuations.

use holdef::hfset::HFSet;
use holdef::semantics::{satisfies, termsem, Budget, Interpretation, SatOutcome, Valuation};
use holdef::syntax::{mk_eq, ConstInstance, Term, Type, TypeSubst};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // An interpretation maps ground types to carriers and constant
    // instances to elements. This one holds bool and one constant.
    let mut interp = Interpretation::empty();
    interp.delta.insert(Type::bool_ty(), HFSet::boolset());
    interp
        .gamma
        .insert(ConstInstance::new("c", Type::bool_ty()), HFSet::tru());

    let budget = Budget::default();
    let theta = TypeSubst::new();
    let bool_ty = Type::bool_ty();

    // termsem evaluates one term under one valuation of its free vars.
    let x = Term::var("x", bool_ty.clone());
    let c = Term::constant("c", bool_ty.clone());
    let v = Valuation::empty().bind("x", bool_ty.clone(), HFSet::fls());
    println!("[[c]] = {}", termsem(&interp, budget.valuation_cap, &v, &theta, &c)?);
    let eq = mk_eq(x.clone(), c.clone()).unwrap();
    println!("[[x = c]] at x := false is {}", termsem(&interp, budget.valuation_cap, &v, &theta, &eq)?);

    // Abstractions evaluate to graphs over the domain carrier.
    let id = Term::abs("x", bool_ty.clone(), x.clone());
    println!("[[\\x. x]] = {}", termsem(&interp, budget.valuation_cap, &v, &theta, &id)?);

    // satisfies sweeps every valuation of the free variables.
    let refl = mk_eq(x.clone(), x.clone()).unwrap();
    println!("x = x: {:?}", satisfies(&interp, &budget, &theta, &[], &refl)?);

    let y = Term::var("y", bool_ty.clone());
    let xy = mk_eq(x.clone(), y.clone()).unwrap();
    match satisfies(&interp, &budget, &theta, &[], &xy)? {
        SatOutcome::Falsified(bindings) => {
            let shown: Vec<String> = bindings
                .iter()
                .map(|((n, ty), val)| format!("{n}:{ty} := {val}"))
                .collect();
            println!("x = y falsified at {}", shown.join(", "));
        }
        other => println!("x = y: {other:?}"),
    }

    // Hypotheses restrict the sweep to valuations satisfying them.
    let hyp = mk_eq(x.clone(), c.clone()).unwrap();
    let concl = mk_eq(c.clone(), x.clone()).unwrap();
    println!("x = c |- c = x: {:?}", satisfies(&interp, &budget, &theta, &[hyp], &concl)?);

    // Terms mentioning symbols outside the interpretation are vacuous,
    // never silently wrong.
    let d = Term::constant("d", bool_ty.clone());
    let dd = mk_eq(d.clone(), d).unwrap();
    match satisfies(&interp, &budget, &theta, &[], &dd)? {
        SatOutcome::Vacuous(why) => println!("d = d vacuous: {why}"),
        other => println!("d = d: {other:?}"),
    }
    Ok(())
}
