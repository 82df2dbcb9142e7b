//! Incremental theorem construction: each step checks a kernel rule and
//! records the derivation tree alongside the sequent, so a finished
//! theorem replays through `check_derivation` at no extra cost.

use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{
    step_abs, step_assume, step_axiom, step_beta, step_deduct_antisym, step_eq_mp, step_inst,
    step_inst_type, step_mk_comb, step_refl, step_trans, Derivation, KernelError, Sequent,
};
use crate::syntax::{dest_eq, equal_const, Term, Type};
use crate::theory::{theory_ok, Theory};

/// A checked sequent with the derivation that produced it.
#[derive(Clone, Debug)]
pub struct Thm {
    seq: Sequent,
    d: Derivation,
}

impl Thm {
    pub fn sequent(&self) -> &Sequent {
        &self.seq
    }

    pub fn hyps(&self) -> &[Term] {
        &self.seq.hyps
    }

    pub fn concl(&self) -> &Term {
        &self.seq.concl
    }

    pub fn derivation(&self) -> &Derivation {
        &self.d
    }

    pub fn into_derivation(self) -> Derivation {
        self.d
    }
}

impl std::fmt::Display for Thm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.seq)
    }
}

#[derive(Debug, Error)]
pub enum DeriveError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("expected an equation, got {0}")]
    NotAnEquation(String),
    #[error("expected a beta redex, got {0}")]
    NotARedex(String),
    #[error("expected {want}, got {got}")]
    Shape { want: &'static str, got: String },
    #[error("theory has no definitional axiom for {0}")]
    MissingDefinition(String),
}

/// Rule applications against a fixed theory, vetted once at creation.
pub struct Prover {
    thy: Arc<Theory>,
}

impl Prover {
    pub fn new(thy: Arc<Theory>) -> Result<Prover, DeriveError> {
        if !theory_ok(&thy) {
            return Err(KernelError::TheoryNotOk.into());
        }
        Ok(Prover { thy })
    }

    pub fn theory(&self) -> &Arc<Theory> {
        &self.thy
    }

    fn mk(&self, d: Derivation, parts: (Vec<Term>, Term)) -> Thm {
        let (hyps, concl) = parts;
        Thm { seq: Sequent { thy: Arc::clone(&self.thy), hyps, concl }, d }
    }

    pub fn assume(&self, p: Term) -> Result<Thm, DeriveError> {
        let parts = step_assume(&self.thy, &p)?;
        Ok(self.mk(Derivation::Assume(p), parts))
    }

    pub fn refl(&self, t: Term) -> Result<Thm, DeriveError> {
        let parts = step_refl(&self.thy, &t)?;
        Ok(self.mk(Derivation::Refl(t), parts))
    }

    pub fn trans(&self, a: &Thm, b: &Thm) -> Result<Thm, DeriveError> {
        let parts = step_trans(&a.seq, &b.seq)?;
        Ok(self.mk(Derivation::Trans(Box::new(a.d.clone()), Box::new(b.d.clone())), parts))
    }

    pub fn mk_comb(&self, a: &Thm, b: &Thm) -> Result<Thm, DeriveError> {
        let parts = step_mk_comb(&a.seq, &b.seq)?;
        Ok(self.mk(Derivation::MkComb(Box::new(a.d.clone()), Box::new(b.d.clone())), parts))
    }

    pub fn abs(&self, name: &str, ty: Type, a: &Thm) -> Result<Thm, DeriveError> {
        let parts = step_abs(&a.seq, name, &ty)?;
        Ok(self.mk(
            Derivation::Abs { name: name.to_string(), ty, premise: Box::new(a.d.clone()) },
            parts,
        ))
    }

    pub fn beta(&self, name: &str, ty: Type, body: Term) -> Result<Thm, DeriveError> {
        let parts = step_beta(&self.thy, name, &ty, &body)?;
        Ok(self.mk(Derivation::Beta { name: name.to_string(), ty, body }, parts))
    }

    pub fn eq_mp(&self, a: &Thm, b: &Thm) -> Result<Thm, DeriveError> {
        let parts = step_eq_mp(&a.seq, &b.seq)?;
        Ok(self.mk(Derivation::EqMp(Box::new(a.d.clone()), Box::new(b.d.clone())), parts))
    }

    pub fn deduct_antisym(&self, a: &Thm, b: &Thm) -> Result<Thm, DeriveError> {
        let parts = step_deduct_antisym(&a.seq, &b.seq)?;
        Ok(self.mk(
            Derivation::DeductAntisym(Box::new(a.d.clone()), Box::new(b.d.clone())),
            parts,
        ))
    }

    pub fn inst_type(&self, subst: &[(String, Type)], a: &Thm) -> Result<Thm, DeriveError> {
        let parts = step_inst_type(&a.seq, subst)?;
        Ok(self.mk(
            Derivation::InstType { subst: subst.to_vec(), premise: Box::new(a.d.clone()) },
            parts,
        ))
    }

    pub fn inst(&self, subst: &[(String, Type, Term)], a: &Thm) -> Result<Thm, DeriveError> {
        let parts = step_inst(&a.seq, subst)?;
        Ok(self.mk(
            Derivation::Inst { subst: subst.to_vec(), premise: Box::new(a.d.clone()) },
            parts,
        ))
    }

    pub fn axiom(&self, p: Term) -> Result<Thm, DeriveError> {
        let parts = step_axiom(&self.thy, &p)?;
        Ok(self.mk(Derivation::Axiom(p), parts))
    }

    /// From `|- x = y` conclude `|- f x = f y`.
    pub fn ap_term(&self, f: Term, th: &Thm) -> Result<Thm, DeriveError> {
        let rf = self.refl(f)?;
        self.mk_comb(&rf, th)
    }

    /// From `|- f = g` conclude `|- f x = g x`.
    pub fn ap_thm(&self, th: &Thm, x: Term) -> Result<Thm, DeriveError> {
        let rx = self.refl(x)?;
        self.mk_comb(th, &rx)
    }

    /// Reverse an equation.
    pub fn sym(&self, th: &Thm) -> Result<Thm, DeriveError> {
        let (l, r) = dest_eq(th.concl())
            .ok_or_else(|| DeriveError::NotAnEquation(th.concl().to_string()))?;
        let (l, _r) = (l.clone(), r.clone());
        let lty = l.type_of().ok_or_else(|| DeriveError::NotAnEquation(l.to_string()))?;
        let rl = self.refl(l)?;
        let th1 = self.ap_term(equal_const(lty), th)?;
        let th2 = self.mk_comb(&th1, &rl)?;
        self.eq_mp(&th2, &rl)
    }

    /// `|- (\x. b) arg = b[x := arg]`, for any argument of the right
    /// type. Instantiation leaves the abstraction alone and rewrites
    /// only the free side, so no separate capture handling is needed.
    pub fn beta_conv(&self, tm: &Term) -> Result<Thm, DeriveError> {
        let not_redex = || DeriveError::NotARedex(tm.to_string());
        let (f, arg) = match tm {
            Term::Comb(f, arg) => (f.as_ref(), arg.as_ref()),
            _ => return Err(not_redex()),
        };
        let (v, body) = match f {
            Term::Abs(v, body) => (v.as_ref(), body.as_ref()),
            _ => return Err(not_redex()),
        };
        let (x, ty) = match v {
            Term::Var(x, ty) => (x.clone(), ty.clone()),
            _ => return Err(not_redex()),
        };
        let th = self.beta(&x, ty.clone(), body.clone())?;
        if arg == v {
            return Ok(th);
        }
        self.inst(&[(x, ty, arg.clone())], &th)
    }

    /// `|- tm = nf(tm)` where `nf` is the beta normal form. Hypotheses
    /// never arise, so abstracting under binders is always permitted.
    pub fn beta_norm_conv(&self, tm: &Term) -> Result<Thm, DeriveError> {
        match tm {
            Term::Var(..) | Term::Const(..) => self.refl(tm.clone()),
            Term::Abs(v, b) => {
                let (x, ty) = match v.as_ref() {
                    Term::Var(x, ty) => (x.clone(), ty.clone()),
                    _ => return Err(DeriveError::Shape {
                        want: "a variable binder",
                        got: tm.to_string(),
                    }),
                };
                let thb = self.beta_norm_conv(b)?;
                self.abs(&x, ty, &thb)
            }
            Term::Comb(f, x) => {
                let thf = self.beta_norm_conv(f)?;
                let thx = self.beta_norm_conv(x)?;
                let th1 = self.mk_comb(&thf, &thx)?;
                let (_, rhs) = dest_eq(th1.concl())
                    .ok_or_else(|| DeriveError::NotAnEquation(th1.concl().to_string()))?;
                let rhs = rhs.clone();
                if matches!(&rhs, Term::Comb(g, _) if matches!(g.as_ref(), Term::Abs(..))) {
                    let th2 = self.beta_conv(&rhs)?;
                    let (_, contractum) = dest_eq(th2.concl())
                        .ok_or_else(|| DeriveError::NotAnEquation(th2.concl().to_string()))?;
                    let th3 = self.beta_norm_conv(&contractum.clone())?;
                    let tail = self.trans(&th2, &th3)?;
                    self.trans(&th1, &tail)
                } else {
                    Ok(th1)
                }
            }
        }
    }
}
