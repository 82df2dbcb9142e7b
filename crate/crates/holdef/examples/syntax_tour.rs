//! Types, terms, first-order matching, and the built-in closure.

use holdef::syntax::{
    builtin_closure_member, dest_eq, inst_term, match_type, mk_eq, Term, Type,
};

fn main() {
    // Types are variables or applications; bool and fun are built in.
    let a = Type::var("a");
    let rel = Type::fun(a.clone(), Type::fun(a.clone(), Type::bool_ty()));
    let list_bool = Type::app("list", vec![Type::bool_ty()]);
    println!("rel 'a    = {rel}");
    println!("list bool = {list_bool}, ground: {}", list_bool.is_ground());

    // Terms carry explicit types; type_of is None exactly when a
    // combination mismatches.
    let x = Term::var("x", Type::bool_ty());
    let id = Term::abs("x", Type::bool_ty(), x.clone());
    let applied = Term::comb(id.clone(), x.clone());
    println!("id        = {id} : {}", id.type_of().unwrap());
    println!("id x      = {applied} : {}", applied.type_of().unwrap());
    let clash = Term::comb(x.clone(), x.clone());
    println!("x x       types: {}", clash.type_of().is_none());

    // Equations are sugar over the schematic equality constant.
    let eq = mk_eq(x.clone(), applied.clone()).unwrap();
    let (l, r) = dest_eq(&eq).unwrap();
    println!("equation  = {eq}, sides {l} and {r}");

    // Matching is one-way: the pattern's variables get instantiated.
    let pat = Type::fun(a.clone(), Type::bool_ty());
    let tgt = Type::fun(list_bool.clone(), Type::bool_ty());
    let theta = match_type(&pat, &tgt).unwrap();
    println!("match {pat} <= {tgt}: 'a := {}", theta.lookup("a").unwrap());
    let p = Term::constant("p", pat.clone());
    let p_inst = inst_term(&theta, &p);
    println!("instance  = {p_inst} : {}", p_inst.type_of().unwrap());

    // The built-in closure of a type set adds bool and closes under fun.
    let base = |t: &Type| *t == list_bool;
    let deep = Type::fun(Type::bool_ty(), Type::fun(list_bool.clone(), Type::bool_ty()));
    println!("{deep} over {{list bool}}: {}", builtin_closure_member(&base, &deep));
    println!("{a} over {{list bool}}: {}", builtin_closure_member(&base, &a));

    // nonbuiltin_types is what a term mentions beyond that closure,
    // one entry per occurrence.
    let k = Term::constant("k", Type::fun(list_bool.clone(), Type::bool_ty()));
    let used = Term::comb(k, Term::var("l", list_bool));
    let tys: std::collections::BTreeSet<String> =
        used.nonbuiltin_types().iter().map(|t| t.to_string()).collect();
    println!("nonbuiltin types of {used}: {}", tys.into_iter().collect::<Vec<_>>().join(", "));
}
