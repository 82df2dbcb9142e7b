//! The proof kernel: ten inference rules over sequents, checked by a
//! total function on derivation trees.
//!
//! A sequent's hypotheses are kept alpha-canonical, sorted and
//! deduplicated, so hypothesis bookkeeping is plain list merging;
//! conclusions keep whatever binder names the derivation produced.
//! Every rule is checked locally against the child sequents, so the cost
//! of `check_derivation` is linear in the size of the tree.

use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{inst_term, mk_eq, vsubst, Term, Type, TypeSubst};
use crate::theory::{theory_ok, Theory};

/// A checked judgement: from the theory and hypotheses, the conclusion.
#[derive(Clone, Debug)]
pub struct Sequent {
    pub thy: Arc<Theory>,
    /// Alpha-canonical, sorted, deduplicated.
    pub hyps: Vec<Term>,
    pub concl: Term,
}

impl std::fmt::Display for Sequent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, h) in self.hyps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.hyps.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "|- {}", self.concl)
    }
}

/// A derivation tree. Leaves carry the terms they judge; inner nodes
/// carry whatever the rule needs beyond its premises.
#[derive(Clone, Debug, PartialEq)]
pub enum Derivation {
    /// `p |- p` for a boolean term.
    Assume(Term),
    /// `|- t = t`.
    Refl(Term),
    /// Chain two equations through an alpha-equal middle term.
    Trans(Box<Derivation>, Box<Derivation>),
    /// Apply equal functions to equal arguments.
    MkComb(Box<Derivation>, Box<Derivation>),
    /// Abstract both sides of an equation over a variable not free in
    /// the hypotheses.
    Abs { name: String, ty: Type, premise: Box<Derivation> },
    /// `|- (\x. t) x = t`.
    Beta { name: String, ty: Type, body: Term },
    /// From `|- p = q` and `|- p`, conclude `q`.
    EqMp(Box<Derivation>, Box<Derivation>),
    /// Conclude `p = q` from derivations of each under the other.
    DeductAntisym(Box<Derivation>, Box<Derivation>),
    /// Instantiate type variables throughout a sequent.
    InstType { subst: Vec<(String, Type)>, premise: Box<Derivation> },
    /// Substitute terms for free variables throughout a sequent.
    Inst { subst: Vec<(String, Type, Term)>, premise: Box<Derivation> },
    /// Cite an axiom of the theory.
    Axiom(Term),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("theory fails the well-formedness check")]
    TheoryNotOk,
    #[error("term {0} is not well-formed over the theory's signature")]
    TermNotOk(String),
    #[error("type {0} is not well-formed over the theory's signature")]
    TypeNotOk(String),
    #[error("expected a boolean term, got {0}")]
    NotBoolean(String),
    #[error("premise {0} is not an equation")]
    NotAnEquation(String),
    #[error("middle terms differ: {left} vs {right}")]
    MiddleMismatch { left: String, right: String },
    #[error("sides {f} and {x} do not form a welltyped application")]
    IllTypedApplication { f: String, x: String },
    #[error("abstracted variable {0} occurs free in a hypothesis")]
    BinderOccursFree(String),
    #[error("premise concludes {got}, which does not match {want}")]
    PropMismatch { want: String, got: String },
    #[error("substitute {term} does not have the type of {name}:{ty}")]
    BadSubstPair { name: String, ty: String, term: String },
    #[error("{0} is not an axiom of the theory")]
    NotAnAxiom(String),
}

fn canon_hyps(hyps: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = hyps.into_iter().map(|t| t.canon()).collect();
    out.sort();
    out.dedup();
    out
}

fn union_hyps(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out: Vec<Term> = a.iter().chain(b.iter()).cloned().collect();
    out.sort();
    out.dedup();
    out
}

fn remove_hyp(hyps: &[Term], t: &Term) -> Vec<Term> {
    let c = t.canon();
    hyps.iter().filter(|h| **h != c).cloned().collect()
}

pub(crate) fn step_assume(thy: &Theory, p: &Term) -> Result<(Vec<Term>, Term), KernelError> {
    if !thy.sig.term_ok(p) {
        return Err(KernelError::TermNotOk(p.to_string()));
    }
    if !p.has_type(&Type::bool_ty()) {
        return Err(KernelError::NotBoolean(p.to_string()));
    }
    Ok((canon_hyps(vec![p.clone()]), p.clone()))
}

pub(crate) fn step_refl(thy: &Theory, t: &Term) -> Result<(Vec<Term>, Term), KernelError> {
    if !thy.sig.term_ok(t) {
        return Err(KernelError::TermNotOk(t.to_string()));
    }
    let concl = mk_eq(t.clone(), t.clone()).ok_or_else(|| KernelError::TermNotOk(t.to_string()))?;
    Ok((vec![], concl))
}

fn dest_eq_concl(s: &Sequent) -> Result<(&Term, &Term), KernelError> {
    crate::syntax::dest_eq(&s.concl).ok_or_else(|| KernelError::NotAnEquation(s.concl.to_string()))
}

pub(crate) fn step_trans(a: &Sequent, b: &Sequent) -> Result<(Vec<Term>, Term), KernelError> {
    let (l, m1) = dest_eq_concl(a)?;
    let (m2, r) = dest_eq_concl(b)?;
    if !m1.alpha_eq(m2) {
        return Err(KernelError::MiddleMismatch { left: m1.to_string(), right: m2.to_string() });
    }
    let concl = mk_eq(l.clone(), r.clone())
        .ok_or_else(|| KernelError::NotAnEquation(b.concl.to_string()))?;
    Ok((union_hyps(&a.hyps, &b.hyps), concl))
}

pub(crate) fn step_mk_comb(a: &Sequent, b: &Sequent) -> Result<(Vec<Term>, Term), KernelError> {
    let (f, g) = dest_eq_concl(a)?;
    let (x, y) = dest_eq_concl(b)?;
    let lhs = Term::comb(f.clone(), x.clone());
    if !lhs.welltyped() {
        return Err(KernelError::IllTypedApplication { f: f.to_string(), x: x.to_string() });
    }
    let rhs = Term::comb(g.clone(), y.clone());
    let concl = mk_eq(lhs, rhs)
        .ok_or_else(|| KernelError::IllTypedApplication { f: g.to_string(), x: y.to_string() })?;
    Ok((union_hyps(&a.hyps, &b.hyps), concl))
}

pub(crate) fn step_abs(
    a: &Sequent,
    name: &str,
    ty: &Type,
) -> Result<(Vec<Term>, Term), KernelError> {
    if !a.thy.sig.type_ok(ty) {
        return Err(KernelError::TypeNotOk(ty.to_string()));
    }
    let (l, r) = dest_eq_concl(a)?;
    let key = (name.to_string(), ty.clone());
    if a.hyps.iter().any(|h| h.free_vars().contains(&key)) {
        return Err(KernelError::BinderOccursFree(format!("{name}:{ty}")));
    }
    let concl = mk_eq(
        Term::abs(name, ty.clone(), l.clone()),
        Term::abs(name, ty.clone(), r.clone()),
    )
    .ok_or_else(|| KernelError::NotAnEquation(a.concl.to_string()))?;
    Ok((a.hyps.clone(), concl))
}

pub(crate) fn step_beta(
    thy: &Theory,
    name: &str,
    ty: &Type,
    body: &Term,
) -> Result<(Vec<Term>, Term), KernelError> {
    if !thy.sig.type_ok(ty) {
        return Err(KernelError::TypeNotOk(ty.to_string()));
    }
    let v = Term::var(name, ty.clone());
    let redex = Term::comb(Term::abs(name, ty.clone(), body.clone()), v);
    if !thy.sig.term_ok(&redex) {
        return Err(KernelError::TermNotOk(redex.to_string()));
    }
    let concl = mk_eq(redex, body.clone())
        .ok_or_else(|| KernelError::TermNotOk(body.to_string()))?;
    Ok((vec![], concl))
}

pub(crate) fn step_eq_mp(a: &Sequent, b: &Sequent) -> Result<(Vec<Term>, Term), KernelError> {
    let (p, q) = dest_eq_concl(a)?;
    if !p.alpha_eq(&b.concl) {
        return Err(KernelError::PropMismatch { want: p.to_string(), got: b.concl.to_string() });
    }
    Ok((union_hyps(&a.hyps, &b.hyps), q.clone()))
}

pub(crate) fn step_deduct_antisym(
    a: &Sequent,
    b: &Sequent,
) -> Result<(Vec<Term>, Term), KernelError> {
    let ha = remove_hyp(&a.hyps, &b.concl);
    let hb = remove_hyp(&b.hyps, &a.concl);
    let concl = mk_eq(a.concl.clone(), b.concl.clone())
        .ok_or_else(|| KernelError::NotBoolean(a.concl.to_string()))?;
    Ok((union_hyps(&ha, &hb), concl))
}

pub(crate) fn step_inst_type(
    a: &Sequent,
    subst: &[(String, Type)],
) -> Result<(Vec<Term>, Term), KernelError> {
    for (_, ty) in subst {
        if !a.thy.sig.type_ok(ty) {
            return Err(KernelError::TypeNotOk(ty.to_string()));
        }
    }
    let theta = TypeSubst::from_pairs(subst.iter().cloned());
    let hyps = canon_hyps(a.hyps.iter().map(|h| inst_term(&theta, h)).collect());
    Ok((hyps, inst_term(&theta, &a.concl)))
}

pub(crate) fn step_inst(
    a: &Sequent,
    subst: &[(String, Type, Term)],
) -> Result<(Vec<Term>, Term), KernelError> {
    let mut pairs = Vec::with_capacity(subst.len());
    for (name, ty, tm) in subst {
        if !a.thy.sig.term_ok(tm) {
            return Err(KernelError::TermNotOk(tm.to_string()));
        }
        if !tm.has_type(ty) {
            return Err(KernelError::BadSubstPair {
                name: name.clone(),
                ty: ty.to_string(),
                term: tm.to_string(),
            });
        }
        pairs.push(((name.clone(), ty.clone()), tm.clone()));
    }
    let hyps = canon_hyps(a.hyps.iter().map(|h| vsubst(&pairs, h)).collect());
    Ok((hyps, vsubst(&pairs, &a.concl)))
}

pub(crate) fn step_axiom(thy: &Theory, p: &Term) -> Result<(Vec<Term>, Term), KernelError> {
    if !thy.has_axiom(p) {
        return Err(KernelError::NotAnAxiom(p.to_string()));
    }
    Ok((vec![], p.clone()))
}

/// Check a derivation tree against a theory. The theory is vetted once;
/// each node is then checked locally against its children.
pub fn check_derivation(thy: &Arc<Theory>, d: &Derivation) -> Result<Sequent, KernelError> {
    if !theory_ok(thy) {
        return Err(KernelError::TheoryNotOk);
    }
    check_rec(thy, d)
}

fn check_rec(thy: &Arc<Theory>, d: &Derivation) -> Result<Sequent, KernelError> {
    let (hyps, concl) = match d {
        Derivation::Assume(p) => step_assume(thy, p)?,
        Derivation::Refl(t) => step_refl(thy, t)?,
        Derivation::Trans(a, b) => {
            let sa = check_rec(thy, a)?;
            let sb = check_rec(thy, b)?;
            step_trans(&sa, &sb)?
        }
        Derivation::MkComb(a, b) => {
            let sa = check_rec(thy, a)?;
            let sb = check_rec(thy, b)?;
            step_mk_comb(&sa, &sb)?
        }
        Derivation::Abs { name, ty, premise } => {
            let sa = check_rec(thy, premise)?;
            step_abs(&sa, name, ty)?
        }
        Derivation::Beta { name, ty, body } => step_beta(thy, name, ty, body)?,
        Derivation::EqMp(a, b) => {
            let sa = check_rec(thy, a)?;
            let sb = check_rec(thy, b)?;
            step_eq_mp(&sa, &sb)?
        }
        Derivation::DeductAntisym(a, b) => {
            let sa = check_rec(thy, a)?;
            let sb = check_rec(thy, b)?;
            step_deduct_antisym(&sa, &sb)?
        }
        Derivation::InstType { subst, premise } => {
            let sa = check_rec(thy, premise)?;
            step_inst_type(&sa, subst)?
        }
        Derivation::Inst { subst, premise } => {
            let sa = check_rec(thy, premise)?;
            step_inst(&sa, subst)?
        }
        Derivation::Axiom(p) => step_axiom(thy, p)?,
    };
    Ok(Sequent { thy: Arc::clone(thy), hyps, concl })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{Context, Update};

    fn b() -> Type {
        Type::bool_ty()
    }

    fn thy() -> Arc<Theory> {
        Context::init().theory()
    }

    fn vx() -> Term {
        Term::var("x", b())
    }

    fn vy() -> Term {
        Term::var("y", b())
    }

    fn eq_xy() -> Term {
        mk_eq(vx(), vy()).unwrap()
    }

    #[test]
    fn assume_requires_a_boolean_term() {
        let t = thy();
        let seq = check_derivation(&t, &Derivation::Assume(eq_xy())).unwrap();
        assert_eq!(seq.hyps, vec![eq_xy()]);
        assert_eq!(seq.concl, eq_xy());
        let nonbool = Term::var("f", Type::fun(b(), b()));
        let err = check_derivation(&t, &Derivation::Assume(nonbool)).unwrap_err();
        assert!(matches!(err, KernelError::NotBoolean(_)));
    }

    #[test]
    fn refl_proves_reflexivity() {
        let t = thy();
        let seq = check_derivation(&t, &Derivation::Refl(vx())).unwrap();
        assert!(seq.hyps.is_empty());
        assert_eq!(seq.concl, mk_eq(vx(), vx()).unwrap());
        // Unknown constants are rejected at the leaves.
        let bad = Term::constant("ghost", b());
        let err = check_derivation(&t, &Derivation::Refl(bad)).unwrap_err();
        assert!(matches!(err, KernelError::TermNotOk(_)));
    }

    #[test]
    fn trans_chains_through_an_alpha_equal_middle() {
        let t = thy();
        let a = Derivation::Assume(eq_xy());
        let eq_yz = mk_eq(vy(), Term::var("z", b())).unwrap();
        let bd = Derivation::Assume(eq_yz.clone());
        let seq =
            check_derivation(&t, &Derivation::Trans(Box::new(a.clone()), Box::new(bd))).unwrap();
        assert_eq!(seq.concl, mk_eq(vx(), Term::var("z", b())).unwrap());
        assert_eq!(seq.hyps.len(), 2);
        let err = check_derivation(
            &t,
            &Derivation::Trans(Box::new(a.clone()), Box::new(a)),
        )
        .unwrap_err();
        assert!(matches!(err, KernelError::MiddleMismatch { .. }));
    }

    #[test]
    fn mk_comb_requires_a_welltyped_application() {
        let t = thy();
        let f = Term::var("f", Type::fun(b(), b()));
        let fd = Derivation::Refl(f);
        let xd = Derivation::Refl(vx());
        let seq = check_derivation(
            &t,
            &Derivation::MkComb(Box::new(fd), Box::new(xd.clone())),
        )
        .unwrap();
        assert_eq!(
            seq.concl,
            mk_eq(
                Term::comb(Term::var("f", Type::fun(b(), b())), vx()),
                Term::comb(Term::var("f", Type::fun(b(), b())), vx()),
            )
            .unwrap()
        );
        let err = check_derivation(
            &t,
            &Derivation::MkComb(Box::new(xd.clone()), Box::new(xd)),
        )
        .unwrap_err();
        assert!(matches!(err, KernelError::IllTypedApplication { .. }));
    }

    #[test]
    fn abs_rejects_a_binder_free_in_the_hypotheses() {
        let t = thy();
        let prem = Derivation::Assume(mk_eq(vx(), vx()).unwrap());
        let err = check_derivation(
            &t,
            &Derivation::Abs { name: "x".into(), ty: b(), premise: Box::new(prem.clone()) },
        )
        .unwrap_err();
        assert!(matches!(err, KernelError::BinderOccursFree(_)));
        // A different variable abstracts fine.
        let seq = check_derivation(
            &t,
            &Derivation::Abs { name: "w".into(), ty: b(), premise: Box::new(prem) },
        )
        .unwrap();
        assert_eq!(seq.hyps.len(), 1);
        assert_eq!(
            seq.concl,
            mk_eq(Term::abs("w", b(), vx()), Term::abs("w", b(), vx())).unwrap()
        );
    }

    #[test]
    fn beta_contracts_the_identity_redex() {
        let t = thy();
        let seq = check_derivation(
            &t,
            &Derivation::Beta { name: "x".into(), ty: b(), body: vx() },
        )
        .unwrap();
        let redex = Term::comb(Term::abs("x", b(), vx()), vx());
        assert_eq!(seq.concl, mk_eq(redex, vx()).unwrap());
        assert!(seq.hyps.is_empty());
    }

    #[test]
    fn eq_mp_compares_up_to_alpha() {
        let t = thy();
        let idx = Term::abs("x", b(), vx());
        let idy = Term::abs("y", b(), vy());
        // (id = id) = (id = id), proved with x-named binders.
        let r = Derivation::Refl(idx.clone());
        let dd = Derivation::DeductAntisym(Box::new(r.clone()), Box::new(r));
        // The minor premise uses y-named binders.
        let minor = Derivation::Refl(idy);
        let seq =
            check_derivation(&t, &Derivation::EqMp(Box::new(dd), Box::new(minor))).unwrap();
        assert_eq!(seq.concl, mk_eq(idx.clone(), idx).unwrap());
    }

    #[test]
    fn deduct_antisym_cancels_matching_hypotheses() {
        let t = thy();
        let p = Derivation::Assume(eq_xy());
        let seq = check_derivation(
            &t,
            &Derivation::DeductAntisym(Box::new(p.clone()), Box::new(p)),
        )
        .unwrap();
        assert!(seq.hyps.is_empty());
        assert_eq!(seq.concl, mk_eq(eq_xy(), eq_xy()).unwrap());
    }

    #[test]
    fn inst_type_replaces_type_variables_everywhere() {
        let t = thy();
        let va = Term::var("x", Type::var("a"));
        let d = Derivation::InstType {
            subst: vec![("a".into(), b())],
            premise: Box::new(Derivation::Refl(va)),
        };
        let seq = check_derivation(&t, &d).unwrap();
        assert_eq!(seq.concl, mk_eq(vx(), vx()).unwrap());
        let bad = Derivation::InstType {
            subst: vec![("a".into(), Type::app("list", vec![b()]))],
            premise: Box::new(Derivation::Refl(vx())),
        };
        assert!(matches!(
            check_derivation(&t, &bad).unwrap_err(),
            KernelError::TypeNotOk(_)
        ));
    }

    #[test]
    fn inst_substitutes_in_hypotheses_and_conclusion() {
        let t = thy();
        let d = Derivation::Inst {
            subst: vec![("x".into(), b(), Term::var("z", b()))],
            premise: Box::new(Derivation::Assume(eq_xy())),
        };
        let seq = check_derivation(&t, &d).unwrap();
        let expected = mk_eq(Term::var("z", b()), vy()).unwrap();
        assert_eq!(seq.concl, expected);
        assert_eq!(seq.hyps, vec![expected]);
        let bad = Derivation::Inst {
            subst: vec![("x".into(), b(), Term::var("z", Type::fun(b(), b())))],
            premise: Box::new(Derivation::Assume(eq_xy())),
        };
        assert!(matches!(
            check_derivation(&t, &bad).unwrap_err(),
            KernelError::BadSubstPair { .. }
        ));
    }

    #[test]
    fn axioms_are_cited_up_to_alpha() {
        let ax = mk_eq(Term::abs("x", b(), vx()), Term::abs("x", b(), vx())).unwrap();
        let ctxt = Context::init()
            .extend(Update::NewAxiom(ax.clone()), None)
            .unwrap();
        let t = ctxt.theory();
        let renamed = mk_eq(Term::abs("y", b(), vy()), Term::abs("y", b(), vy())).unwrap();
        let seq = check_derivation(&t, &Derivation::Axiom(renamed.clone())).unwrap();
        assert_eq!(seq.concl, renamed);
        let other = mk_eq(vx(), vx()).unwrap();
        assert!(matches!(
            check_derivation(&t, &Derivation::Axiom(other)).unwrap_err(),
            KernelError::NotAnAxiom(_)
        ));
        // The seed theory has no axioms at all.
        assert!(matches!(
            check_derivation(&thy(), &Derivation::Axiom(ax)).unwrap_err(),
            KernelError::NotAnAxiom(_)
        ));
    }

    #[test]
    fn hypotheses_stay_canonical_and_deduplicated() {
        let t = thy();
        // Assume the same proposition under two binder namings; the
        // union keeps one canonical copy.
        let p1 = mk_eq(Term::abs("x", b(), vx()), Term::abs("x", b(), vx())).unwrap();
        let p2 = mk_eq(Term::abs("y", b(), vy()), Term::abs("y", b(), vy())).unwrap();
        let d = Derivation::Trans(
            Box::new(Derivation::Assume(p1)),
            Box::new(Derivation::Assume(p2)),
        );
        let seq = check_derivation(&t, &d).unwrap();
        assert_eq!(seq.hyps.len(), 1);
    }
}
