//! The boolean base theory, built definitionally from the seed context,
//! and the derived inference rules its definitions support.
//!
//! Every connective is a defined constant whose obligation is the
//! definition itself, assumed. On top of those definitions the usual
//! structural rules (discharge, conjunction introduction and
//! projection, negation introduction) are derived constructions over
//! the ten kernel rules, so everything downstream replays through the
//! checker.

use std::collections::BTreeSet;

use crate::derive::{DeriveError, Prover, Thm};
use crate::kernel::Derivation;
use crate::syntax::{dest_eq, mk_eq, variant, Term, Type};
use crate::theory::{Context, Theory, Update, UpdateError};

pub const TRUE: &str = "true";
pub const FALSE: &str = "false";
pub const AND: &str = "and";
pub const OR: &str = "or";
pub const IMP: &str = "imp";
pub const NOT: &str = "not";
pub const FORALL: &str = "forall";
pub const EXISTS: &str = "exists";
pub const SELECT: &str = "select";

fn b() -> Type {
    Type::bool_ty()
}

fn binop_ty() -> Type {
    Type::fun(b(), Type::fun(b(), b()))
}

pub fn mk_true() -> Term {
    Term::constant(TRUE, b())
}

pub fn mk_false() -> Term {
    Term::constant(FALSE, b())
}

fn mk_binop(name: &str, p: Term, q: Term) -> Term {
    Term::comb(Term::comb(Term::constant(name, binop_ty()), p), q)
}

pub fn mk_conj(p: Term, q: Term) -> Term {
    mk_binop(AND, p, q)
}

pub fn mk_imp(p: Term, q: Term) -> Term {
    mk_binop(IMP, p, q)
}

pub fn mk_disj(p: Term, q: Term) -> Term {
    mk_binop(OR, p, q)
}

pub fn mk_neg(p: Term) -> Term {
    Term::comb(Term::constant(NOT, Type::fun(b(), b())), p)
}

fn mk_binder(name: &str, x: &str, ty: Type, body: Term) -> Term {
    let pty = Type::fun(ty.clone(), b());
    Term::comb(Term::constant(name, Type::fun(pty, b())), Term::abs(x, ty, body))
}

pub fn mk_forall(x: &str, ty: Type, body: Term) -> Term {
    mk_binder(FORALL, x, ty, body)
}

pub fn mk_exists(x: &str, ty: Type, body: Term) -> Term {
    mk_binder(EXISTS, x, ty, body)
}

pub fn dest_conj(t: &Term) -> Option<(&Term, &Term)> {
    dest_binop(AND, t)
}

pub fn dest_imp(t: &Term) -> Option<(&Term, &Term)> {
    dest_binop(IMP, t)
}

fn dest_binop<'a>(name: &str, t: &'a Term) -> Option<(&'a Term, &'a Term)> {
    match t {
        Term::Comb(pq, q) => match pq.as_ref() {
            Term::Comb(c, p) => match c.as_ref() {
                Term::Const(n, _) if n == name => Some((p, q)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

pub fn dest_neg(t: &Term) -> Option<&Term> {
    match t {
        Term::Comb(c, p) => match c.as_ref() {
            Term::Const(n, _) if n == NOT => Some(p),
            _ => None,
        },
        _ => None,
    }
}

pub fn dest_forall(t: &Term) -> Option<(&str, &Type, &Term)> {
    match t {
        Term::Comb(c, lam) => match (c.as_ref(), lam.as_ref()) {
            (Term::Const(n, _), Term::Abs(v, body)) if n == FORALL => match v.as_ref() {
                Term::Var(x, ty) => Some((x, ty, body)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn idb() -> Term {
    Term::abs("p", b(), Term::var("p", b()))
}

pub fn true_witness() -> Term {
    mk_eq(idb(), idb()).expect("identity equation is welltyped")
}

pub fn and_witness() -> Term {
    let fty = binop_ty();
    let f = Term::var("f", fty.clone());
    let p = Term::var("p", b());
    let q = Term::var("q", b());
    let lhs = Term::abs("f", fty.clone(), Term::comb(Term::comb(f.clone(), p), q));
    let rhs = Term::abs("f", fty, Term::comb(Term::comb(f, mk_true()), mk_true()));
    let body = mk_eq(lhs, rhs).expect("selector equation is welltyped");
    Term::abs("p", b(), Term::abs("q", b(), body))
}

pub fn imp_witness() -> Term {
    let p = Term::var("p", b());
    let q = Term::var("q", b());
    let body = mk_eq(mk_conj(p.clone(), q), p).expect("absorption equation is welltyped");
    Term::abs("p", b(), Term::abs("q", b(), body))
}

pub fn forall_witness() -> Term {
    let a = Type::var("a");
    let pty = Type::fun(a.clone(), b());
    let pvar = Term::var("P", pty.clone());
    let all_true = Term::abs("x", a, mk_true());
    let body = mk_eq(pvar, all_true).expect("predicate equation is welltyped");
    Term::abs("P", pty, body)
}

pub fn exists_witness() -> Term {
    let a = Type::var("a");
    let pty = Type::fun(a.clone(), b());
    let pvar = Term::var("P", pty.clone());
    let q = Term::var("q", b());
    let px = Term::comb(pvar, Term::var("x", a.clone()));
    let inner = mk_forall("x", a, mk_imp(px, q.clone()));
    Term::abs("P", pty, mk_forall("q", b(), mk_imp(inner, q)))
}

pub fn or_witness() -> Term {
    let p = Term::var("p", b());
    let q = Term::var("q", b());
    let r = Term::var("r", b());
    let body = mk_forall(
        "r",
        b(),
        mk_imp(mk_imp(p, r.clone()), mk_imp(mk_imp(q, r.clone()), r)),
    );
    Term::abs("p", b(), Term::abs("q", b(), body))
}

pub fn false_witness() -> Term {
    mk_forall("p", b(), Term::var("p", b()))
}

pub fn not_witness() -> Term {
    let p = Term::var("p", b());
    Term::abs("p", b(), mk_imp(p, mk_false()))
}

/// Define one constant by a closed witness. The characterising property
/// is the definition itself, so its obligation is a bare assumption.
pub fn const_def(ctxt: &Context, name: &str, witness: Term) -> Result<Context, UpdateError> {
    let ty = witness
        .type_of()
        .ok_or_else(|| UpdateError::TermNotOk(witness.to_string()))?;
    let prop = mk_eq(Term::var(name, ty), witness.clone())
        .ok_or_else(|| UpdateError::TermNotOk(witness.to_string()))?;
    let deriv = Derivation::Assume(prop.clone());
    ctxt.extend(
        Update::ConstSpec {
            overload: false,
            eqs: vec![(name.to_string(), witness)],
            prop,
        },
        Some(&deriv),
    )
}

/// The seed context extended with the boolean connectives, in
/// dependency order.
pub fn bool_context() -> Context {
    let defs: [(&str, Term); 8] = [
        (TRUE, true_witness()),
        (AND, and_witness()),
        (IMP, imp_witness()),
        (FORALL, forall_witness()),
        (EXISTS, exists_witness()),
        (OR, or_witness()),
        (FALSE, false_witness()),
        (NOT, not_witness()),
    ];
    let mut ctxt = Context::init();
    for (name, witness) in defs {
        ctxt = const_def(&ctxt, name, witness).expect("boolean bootstrap definitions are valid");
    }
    ctxt
}

/// `!t: a -> b. (\x. t x) = t`.
pub fn eta_axiom() -> Term {
    let fty = Type::fun(Type::var("a"), Type::var("b"));
    let t = Term::var("t", fty.clone());
    let x = Term::var("x", Type::var("a"));
    let body = mk_eq(
        Term::abs("x", Type::var("a"), Term::comb(t.clone(), x)),
        t,
    )
    .expect("eta equation is welltyped");
    mk_forall("t", fty, body)
}

/// The boolean context plus a declared (unaxiomatised) choice operator
/// and the eta axiom.
pub fn hol_context() -> Context {
    let a = Type::var("a");
    let select_ty = Type::fun(Type::fun(a.clone(), b()), a);
    bool_context()
        .extend(Update::NewConst { name: SELECT.to_string(), ty: select_ty }, None)
        .expect("select declaration is valid")
        .extend(Update::NewAxiom(eta_axiom()), None)
        .expect("eta axiom is a well-formed boolean term")
}

/// The stored axiom `c = witness` for a constant defined under `name`.
pub fn definition_axiom(thy: &Theory, name: &str) -> Option<Term> {
    thy.axioms
        .iter()
        .find(|ax| match dest_eq(ax) {
            Some((Term::Const(n, _), _)) => n.as_str() == name,
            _ => false,
        })
        .cloned()
}

fn def_thm(p: &Prover, name: &str) -> Result<Thm, DeriveError> {
    let ax = definition_axiom(p.theory(), name)
        .ok_or_else(|| DeriveError::MissingDefinition(name.to_string()))?;
    p.axiom(ax)
}

fn rhs_of(th: &Thm) -> Result<Term, DeriveError> {
    dest_eq(th.concl())
        .map(|(_, r)| r.clone())
        .ok_or_else(|| DeriveError::NotAnEquation(th.concl().to_string()))
}

/// `|- ((\p. \q. body) a) b = body[p:=a, q:=b]`, contracting exactly the
/// two outer redexes so subterms of `a` and `b` stay untouched.
fn beta2(p: &Prover, tm: &Term) -> Result<Thm, DeriveError> {
    let (fa, arg) = match tm {
        Term::Comb(fa, arg) => (fa.as_ref().clone(), arg.as_ref().clone()),
        _ => {
            return Err(DeriveError::Shape { want: "a double application", got: tm.to_string() })
        }
    };
    let th1 = p.beta_conv(&fa)?;
    let th2 = p.ap_thm(&th1, arg)?;
    let th3 = p.beta_conv(&rhs_of(&th2)?)?;
    p.trans(&th2, &th3)
}

/// Unfold a defined binary connective at two arguments.
fn unfold2(p: &Prover, name: &str, a: &Term, bt: &Term) -> Result<Thm, DeriveError> {
    let d = def_thm(p, name)?;
    let t1 = p.ap_thm(&d, a.clone())?;
    let t2 = p.ap_thm(&t1, bt.clone())?;
    let t3 = beta2(p, &rhs_of(&t2)?)?;
    p.trans(&t2, &t3)
}

/// `|- true`.
pub fn truth(p: &Prover) -> Result<Thm, DeriveError> {
    let tdef = def_thm(p, TRUE)?;
    let r = p.refl(idb())?;
    p.eq_mp(&p.sym(&tdef)?, &r)
}

/// From `A |- t` conclude `A |- t = true`.
pub fn eqt_intro(p: &Prover, th: &Thm) -> Result<Thm, DeriveError> {
    p.deduct_antisym(th, &truth(p)?)
}

/// From `A |- t = true` conclude `A |- t`.
pub fn eqt_elim(p: &Prover, th: &Thm) -> Result<Thm, DeriveError> {
    p.eq_mp(&p.sym(th)?, &truth(p)?)
}

/// From `A |- a` and `B |- b` conclude `A u B |- a /\ b`.
pub fn conj(p: &Prover, th1: &Thm, th2: &Thm) -> Result<Thm, DeriveError> {
    let a = th1.concl().clone();
    let bt = th2.concl().clone();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    for t in th1.hyps().iter().chain(th2.hyps()).chain([&a, &bt]) {
        taken.extend(t.all_var_names());
    }
    let fname = variant(&taken, "f");
    let f = Term::var(fname.clone(), binop_ty());
    let e1 = eqt_intro(p, th1)?;
    let e2 = eqt_intro(p, th2)?;
    let th3 = p.mk_comb(&p.ap_term(f, &e1)?, &e2)?;
    let th4 = p.abs(&fname, binop_ty(), &th3)?;
    let conv = unfold2(p, AND, &a, &bt)?;
    p.eq_mp(&p.sym(&conv)?, &th4)
}

/// From `A |- a /\ b` conclude `A |- a`.
pub fn conjunct1(p: &Prover, th: &Thm) -> Result<Thm, DeriveError> {
    let (a, bt) = dest_conj(th.concl())
        .map(|(a, bt)| (a.clone(), bt.clone()))
        .ok_or_else(|| DeriveError::Shape { want: "a conjunction", got: th.concl().to_string() })?;
    let conv = unfold2(p, AND, &a, &bt)?;
    let th9 = p.eq_mp(&conv, th)?;
    let sel = Term::abs("x", b(), Term::abs("y", b(), Term::var("x", b())));
    let th10 = p.ap_thm(&th9, sel.clone())?;
    let (lhs, rhs) = match dest_eq(th10.concl()) {
        Some((l, r)) => (l.clone(), r.clone()),
        None => return Err(DeriveError::NotAnEquation(th10.concl().to_string())),
    };
    let bl = {
        let step = p.beta_conv(&lhs)?;
        let tail = beta2(p, &rhs_of(&step)?)?;
        p.trans(&step, &tail)?
    };
    let br = {
        let step = p.beta_conv(&rhs)?;
        let tail = beta2(p, &rhs_of(&step)?)?;
        p.trans(&step, &tail)?
    };
    let th13 = p.trans(&p.trans(&p.sym(&bl)?, &th10)?, &br)?;
    eqt_elim(p, &th13)
}

/// From `B |- q` conclude `B - {a} |- a ==> q`.
pub fn disch(p: &Prover, a: &Term, th: &Thm) -> Result<Thm, DeriveError> {
    let cj = conj(p, &p.assume(a.clone())?, th)?;
    let asum = p.assume(mk_conj(a.clone(), th.concl().clone()))?;
    let c1 = conjunct1(p, &asum)?;
    let dd = p.deduct_antisym(&cj, &c1)?;
    let conv = unfold2(p, IMP, a, th.concl())?;
    p.eq_mp(&p.sym(&conv)?, &dd)
}

/// From `A |- t ==> false` conclude `A |- not t`.
pub fn not_intro(p: &Prover, th: &Thm) -> Result<Thm, DeriveError> {
    let (ante, _) = dest_imp(th.concl())
        .map(|(a, c)| (a.clone(), c.clone()))
        .ok_or_else(|| DeriveError::Shape { want: "an implication", got: th.concl().to_string() })?;
    let d = def_thm(p, NOT)?;
    let t1 = p.ap_thm(&d, ante)?;
    let t2 = p.beta_conv(&rhs_of(&t1)?)?;
    let conv = p.trans(&t1, &t2)?;
    p.eq_mp(&p.sym(&conv)?, th)
}
