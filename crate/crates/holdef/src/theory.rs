//! Theory contexts and the update discipline that grows them.
//!
//! A context is a list of updates over the built-in seed (`bool`, `fun`,
//! `=`). Declarations introduce unconstrained symbols; type definitions
//! carve a new type out of a host type along a nonemptiness proof;
//! constant specifications define one or more constants against proved
//! characterising properties, and may overload instances of previously
//! declared constants. `update_ok` is the single gate: nothing enters a
//! context without passing it, so every context in circulation is
//! well-formed by construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::deps::{
    check_termination, context_orthogonal, DepNode, TerminationVerdict, DEFAULT_SEARCH_BOUND,
};
use crate::kernel::{check_derivation, Derivation, KernelError};
use crate::syntax::{
    is_instance, mk_eq, vsubst, ConstInstance, Term, Type, BOOL, EQUAL, FUN,
};

/// Declared type constructors with arities, and declared constants with
/// their most general types.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Signature {
    pub tys: BTreeMap<String, usize>,
    pub consts: BTreeMap<String, Type>,
}

impl Signature {
    /// Every constructor applied at its declared arity.
    pub fn type_ok(&self, ty: &Type) -> bool {
        match ty {
            Type::Var(_) => true,
            Type::App(name, args) => {
                self.tys.get(name) == Some(&args.len())
                    && args.iter().all(|a| self.type_ok(a))
            }
        }
    }

    /// Well-formed, welltyped, every type in signature, every constant
    /// an instance of its declared type.
    pub fn term_ok(&self, t: &Term) -> bool {
        t.welltyped() && self.term_ok_rec(t)
    }

    fn term_ok_rec(&self, t: &Term) -> bool {
        match t {
            Term::Var(_, ty) => self.type_ok(ty),
            Term::Const(name, ty) => {
                self.type_ok(ty)
                    && match self.consts.get(name) {
                        Some(declared) => is_instance(declared, ty),
                        None => false,
                    }
            }
            Term::Comb(f, x) => self.term_ok_rec(f) && self.term_ok_rec(x),
            Term::Abs(v, b) => {
                matches!(v.as_ref(), Term::Var(..)) && self.term_ok_rec(v) && self.term_ok_rec(b)
            }
        }
    }
}

/// One step of theory growth.
#[derive(Clone, Debug, PartialEq)]
pub enum Update {
    /// Assert a closed boolean term with no proof.
    NewAxiom(Term),
    /// Declare a type constructor of the given arity.
    NewType { name: String, arity: usize },
    /// Declare a constant at a (possibly schematic) type.
    NewConst { name: String, ty: Type },
    /// Define a new type as the subset of a host type carved out by
    /// `pred`, with named abstraction and representation constants.
    TypeDefn {
        name: String,
        pred: Term,
        abs: String,
        rep: String,
    },
    /// Define constants against a characterising property `prop`, whose
    /// placeholder variables stand for the constants being introduced.
    /// With `overload` set, the names must already be declared and the
    /// definitions give instances of their declared types.
    ConstSpec {
        overload: bool,
        eqs: Vec<(String, Term)>,
        prop: Term,
    },
}

/// Type variables "a", "aa", "aaa", ... used for freshly declared
/// constructors, which carry no type variable names of their own.
pub fn generic_tyvars(arity: usize) -> Vec<Type> {
    (1..=arity).map(|n| Type::Var("a".repeat(n))).collect()
}

impl Update {
    /// The symbols this update introduces, as dependency nodes. A type
    /// definition introduces its type applied to the predicate's sorted
    /// type variables; a constant specification introduces each constant
    /// at its witness's type; declarations introduce themselves; axioms
    /// introduce nothing.
    pub fn introduces(&self) -> Vec<DepNode> {
        match self {
            Update::NewAxiom(_) => vec![],
            Update::NewType { name, arity } => {
                vec![DepNode::Ty(Type::App(name.clone(), generic_tyvars(*arity)))]
            }
            Update::NewConst { name, ty } => {
                vec![DepNode::Const(ConstInstance::new(name.clone(), ty.clone()))]
            }
            Update::TypeDefn { name, pred, .. } => {
                vec![DepNode::Ty(Type::App(name.clone(), sorted_tvar_types(pred)))]
            }
            Update::ConstSpec { eqs, .. } => eqs
                .iter()
                .filter_map(|(name, witness)| {
                    let ty = witness.type_of()?;
                    Some(DepNode::Const(ConstInstance::new(name.clone(), ty)))
                })
                .collect(),
        }
    }

    /// Type constructors this update adds to the signature.
    pub fn added_types(&self) -> Vec<(String, usize)> {
        match self {
            Update::NewType { name, arity } => vec![(name.clone(), *arity)],
            Update::TypeDefn { name, pred, .. } => {
                vec![(name.clone(), pred.tvars().len())]
            }
            _ => vec![],
        }
    }

    /// Constants this update adds to the signature. Overloading defines
    /// an instance of an existing declaration and adds nothing.
    pub fn added_consts(&self) -> Vec<(String, Type)> {
        match self {
            Update::NewConst { name, ty } => vec![(name.clone(), ty.clone())],
            Update::ConstSpec { overload: false, eqs, .. } => eqs
                .iter()
                .filter_map(|(name, w)| Some((name.clone(), w.type_of()?)))
                .collect(),
            Update::TypeDefn { name, pred, abs, rep } => {
                let (host, new) = match typedefn_types(name, pred) {
                    Some(pair) => pair,
                    None => return vec![],
                };
                vec![
                    (abs.clone(), Type::fun(host.clone(), new.clone())),
                    (rep.clone(), Type::fun(new, host)),
                ]
            }
            _ => vec![],
        }
    }

    /// Axioms this update contributes to the theory.
    pub fn added_axioms(&self) -> Vec<Term> {
        match self {
            Update::NewAxiom(p) => vec![p.clone()],
            Update::ConstSpec { eqs, prop, .. } => {
                // The characterising property, with each placeholder
                // variable replaced by the constant it introduces.
                let pairs: Vec<((String, Type), Term)> = eqs
                    .iter()
                    .filter_map(|(name, w)| {
                        let ty = w.type_of()?;
                        Some((
                            (name.clone(), ty.clone()),
                            Term::constant(name.clone(), ty),
                        ))
                    })
                    .collect();
                vec![vsubst(&pairs, prop)]
            }
            Update::TypeDefn { name, pred, abs, rep } => {
                let (host, new) = match typedefn_types(name, pred) {
                    Some(pair) => pair,
                    None => return vec![],
                };
                let absc = Term::constant(abs.clone(), Type::fun(host.clone(), new.clone()));
                let repc = Term::constant(rep.clone(), Type::fun(new.clone(), host.clone()));
                let a = Term::var("a", new);
                let r = Term::var("r", host);
                let ax1 = mk_eq(
                    Term::comb(absc.clone(), Term::comb(repc.clone(), a.clone())),
                    a,
                );
                let inner = mk_eq(
                    Term::comb(repc, Term::comb(absc, r.clone())),
                    r.clone(),
                );
                let ax2 = inner.and_then(|i| mk_eq(Term::comb(pred.clone(), r), i));
                ax1.into_iter().chain(ax2).collect()
            }
            _ => vec![],
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Update::NewAxiom(_) => "axiom",
            Update::NewType { .. } => "newtype",
            Update::NewConst { .. } => "newconst",
            Update::TypeDefn { .. } => "typedef",
            Update::ConstSpec { .. } => "constspec",
        }
    }
}

fn sorted_tvar_types(pred: &Term) -> Vec<Type> {
    pred.tvars().into_iter().map(Type::Var).collect()
}

/// Host type (the predicate's domain) and the new type applied to the
/// predicate's sorted type variables.
pub(crate) fn typedefn_types(name: &str, pred: &Term) -> Option<(Type, Type)> {
    let pred_ty = pred.type_of()?;
    let (host, _) = pred_ty.as_fun()?;
    let new = Type::App(name.to_string(), sorted_tvar_types(pred));
    Some((host.clone(), new))
}

/// A signature together with the axioms in force.
#[derive(Clone, Debug)]
pub struct Theory {
    pub sig: Signature,
    pub axioms: Vec<Term>,
}

impl Theory {
    pub fn has_axiom(&self, p: &Term) -> bool {
        self.axioms.iter().any(|ax| ax.alpha_eq(p))
    }
}

/// The built-ins are declared with their standard shapes and every axiom
/// is a well-formed boolean term.
pub fn theory_ok(thy: &Theory) -> bool {
    let std_sig = thy.sig.tys.get(BOOL) == Some(&0)
        && thy.sig.tys.get(FUN) == Some(&2)
        && match thy.sig.consts.get(EQUAL) {
            Some(ty) => match ty.as_fun() {
                Some((a, rest)) => match rest.as_fun() {
                    Some((b, r)) => a == b && matches!(a, Type::Var(_)) && r.is_bool(),
                    None => false,
                },
                None => false,
            },
            None => false,
        };
    std_sig
        && thy.axioms.iter().all(|ax| {
            thy.sig.term_ok(ax) && ax.has_type(&Type::bool_ty())
        })
}

/// A validated update list, newest first, with the signature and axiom
/// set it denotes cached alongside.
#[derive(Clone, Debug)]
pub struct Context {
    updates: Vec<Update>,
    sig: Signature,
    axioms: Vec<Term>,
}

#[derive(Debug, Error)]
pub enum UpdateError {
    #[error("name {0} is already in the signature")]
    NameClash(String),
    #[error("duplicate name {0} among the definitions of one specification")]
    DuplicateName(String),
    #[error("type {0} is not well-formed over the signature")]
    TypeNotOk(String),
    #[error("term {0} is not well-formed over the signature")]
    TermNotOk(String),
    #[error("axiom or property must be a boolean term, got {0}")]
    NotBoolean(String),
    #[error("witness for {0} has free variables")]
    OpenWitness(String),
    #[error("witness for {name} uses type variable '{tyvar} absent from its own type")]
    TyvarEscape { name: String, tyvar: String },
    #[error("property mentions {name}:{ty}, which no definition introduces")]
    StrayFreeVar { name: String, ty: String },
    #[error("update needs a derivation of its obligation, none supplied")]
    MissingDerivation,
    #[error("derivation proves {got}, the obligation is {expected}")]
    WrongConclusion { expected: String, got: String },
    #[error("derivation hypotheses do not match the definition equations")]
    WrongHypotheses,
    #[error("derivation rejected: {0}")]
    Kernel(#[from] KernelError),
    #[error("overloaded name {0} was never declared")]
    NotDeclared(String),
    #[error("definition of {name} at {given} is not an instance of its declared type {declared}")]
    NotAnInstance { name: String, declared: String, given: String },
    #[error("{name} already has a definition overlapping {given} (earlier: {earlier})")]
    AlreadyDefined { name: String, earlier: String, given: String },
    #[error("definitions of {a} and {b} overlap at {witness}")]
    Overlap { a: String, b: String, witness: String },
    #[error("dependency cycle: {}", format_path(.path))]
    Cycle { path: Vec<DepNode> },
    #[error("termination search exhausted its bound of {bound} expansions")]
    TerminationUnknown { bound: usize },
    #[error("type definition predicate must be a closed function to bool")]
    BadPredicate,
    #[error("abstraction and representation constants must be distinct")]
    AbsRepClash,
}

fn format_path(path: &[DepNode]) -> String {
    path.iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

impl UpdateError {
    /// Rejections that mean "could not decide", not "wrong".
    pub fn is_unknown(&self) -> bool {
        matches!(self, UpdateError::TerminationUnknown { .. })
    }
}

impl Context {
    /// The built-in seed: `bool`, `fun` and polymorphic equality.
    pub fn init() -> Context {
        let empty = Context { updates: vec![], sig: Signature::default(), axioms: vec![] };
        let a = Type::var("a");
        let eq_ty = Type::fun(a.clone(), Type::fun(a, Type::bool_ty()));
        empty
            .push_unchecked(Update::NewType { name: BOOL.to_string(), arity: 0 })
            .push_unchecked(Update::NewType { name: FUN.to_string(), arity: 2 })
            .push_unchecked(Update::NewConst { name: EQUAL.to_string(), ty: eq_ty })
    }

    /// Updates, newest first.
    pub fn updates(&self) -> &[Update] {
        &self.updates
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Axioms in introduction order.
    pub fn axioms(&self) -> &[Term] {
        &self.axioms
    }

    pub fn theory(&self) -> Arc<Theory> {
        Arc::new(Theory { sig: self.sig.clone(), axioms: self.axioms.clone() })
    }

    /// The context before the newest update, while it still extends the
    /// built-in seed.
    pub fn parent(&self) -> Option<Context> {
        if self.updates.len() <= 3 {
            return None;
        }
        let older: Vec<Update> = self.updates[1..].to_vec();
        let mut ctxt = Context { updates: vec![], sig: Signature::default(), axioms: vec![] };
        for upd in older.iter().rev() {
            ctxt = ctxt.push_unchecked(upd.clone());
        }
        Some(ctxt)
    }

    pub fn extends_init(&self) -> bool {
        let init = Context::init();
        self.updates.len() >= 3 && self.updates[self.updates.len() - 3..] == init.updates[..]
    }

    pub(crate) fn push_unchecked(&self, upd: Update) -> Context {
        let mut sig = self.sig.clone();
        for (name, arity) in upd.added_types() {
            sig.tys.insert(name, arity);
        }
        for (name, ty) in upd.added_consts() {
            sig.consts.insert(name, ty);
        }
        let mut axioms = self.axioms.clone();
        axioms.extend(upd.added_axioms());
        let mut updates = Vec::with_capacity(self.updates.len() + 1);
        updates.push(upd);
        updates.extend(self.updates.iter().cloned());
        Context { updates, sig, axioms }
    }

    /// Validate and apply one update, with the default search bound.
    pub fn extend(&self, upd: Update, deriv: Option<&Derivation>) -> Result<Context, UpdateError> {
        self.extend_bounded(upd, deriv, DEFAULT_SEARCH_BOUND)
    }

    pub fn extend_bounded(
        &self,
        upd: Update,
        deriv: Option<&Derivation>,
        bound: usize,
    ) -> Result<Context, UpdateError> {
        update_ok(self, &upd, deriv, bound)?;
        Ok(self.push_unchecked(upd))
    }
}

/// The gate every update passes before entering a context.
pub fn update_ok(
    ctxt: &Context,
    upd: &Update,
    deriv: Option<&Derivation>,
    bound: usize,
) -> Result<(), UpdateError> {
    let sig = ctxt.signature();
    match upd {
        Update::NewAxiom(p) => {
            if !sig.term_ok(p) {
                return Err(UpdateError::TermNotOk(p.to_string()));
            }
            if !p.has_type(&Type::bool_ty()) {
                return Err(UpdateError::NotBoolean(p.to_string()));
            }
            Ok(())
        }
        Update::NewType { name, .. } => {
            if sig.tys.contains_key(name) {
                return Err(UpdateError::NameClash(name.clone()));
            }
            Ok(())
        }
        Update::NewConst { name, ty } => {
            if sig.consts.contains_key(name) {
                return Err(UpdateError::NameClash(name.clone()));
            }
            if !sig.type_ok(ty) {
                return Err(UpdateError::TypeNotOk(ty.to_string()));
            }
            Ok(())
        }
        Update::TypeDefn { name, pred, abs, rep } => {
            if !sig.term_ok(pred) {
                return Err(UpdateError::TermNotOk(pred.to_string()));
            }
            let pred_ty = pred.type_of().ok_or(UpdateError::BadPredicate)?;
            match pred_ty.as_fun() {
                Some((_, rng)) if rng.is_bool() => {}
                _ => return Err(UpdateError::BadPredicate),
            }
            if !pred.is_closed() {
                return Err(UpdateError::BadPredicate);
            }
            if sig.tys.contains_key(name) {
                return Err(UpdateError::NameClash(name.clone()));
            }
            if abs == rep {
                return Err(UpdateError::AbsRepClash);
            }
            for c in [abs, rep] {
                if sig.consts.contains_key(c) {
                    return Err(UpdateError::NameClash(c.clone()));
                }
            }
            // The obligation: some witness satisfies the predicate.
            let d = deriv.ok_or(UpdateError::MissingDerivation)?;
            let seq = check_derivation(&ctxt.theory(), d)?;
            if !seq.hyps.is_empty() {
                return Err(UpdateError::WrongHypotheses);
            }
            let ok = match &seq.concl {
                Term::Comb(p, _) => p.alpha_eq(pred),
                _ => false,
            };
            if !ok {
                return Err(UpdateError::WrongConclusion {
                    expected: format!("({pred} <witness>)"),
                    got: seq.concl.to_string(),
                });
            }
            Ok(())
        }
        Update::ConstSpec { overload, eqs, prop } => {
            check_constspec(ctxt, *overload, eqs, prop, deriv, bound)
        }
    }
}

fn check_constspec(
    ctxt: &Context,
    overload: bool,
    eqs: &[(String, Term)],
    prop: &Term,
    deriv: Option<&Derivation>,
    bound: usize,
) -> Result<(), UpdateError> {
    let sig = ctxt.signature();
    let mut seen = BTreeMap::new();
    let mut intro_vars = Vec::new();
    for (name, witness) in eqs {
        if seen.insert(name.clone(), ()).is_some() {
            return Err(UpdateError::DuplicateName(name.clone()));
        }
        if !sig.term_ok(witness) {
            return Err(UpdateError::TermNotOk(witness.to_string()));
        }
        if !witness.is_closed() {
            return Err(UpdateError::OpenWitness(name.clone()));
        }
        let wty = witness.type_of().ok_or_else(|| UpdateError::TermNotOk(witness.to_string()))?;
        // Every type variable of the witness must show up in its type,
        // or instances of the constant would not determine it.
        let ty_vars = wty.tyvars();
        if let Some(loose) = witness.tvars().into_iter().find(|v| !ty_vars.contains(v)) {
            return Err(UpdateError::TyvarEscape { name: name.clone(), tyvar: loose });
        }
        if overload {
            let declared = sig
                .consts
                .get(name)
                .ok_or_else(|| UpdateError::NotDeclared(name.clone()))?;
            if !is_instance(declared, &wty) {
                return Err(UpdateError::NotAnInstance {
                    name: name.clone(),
                    declared: declared.to_string(),
                    given: wty.to_string(),
                });
            }
            // Reject a second definition touching the same instances.
            for earlier in ctxt.updates() {
                if let Update::ConstSpec { eqs: old_eqs, .. } = earlier {
                    for (old_name, old_w) in old_eqs {
                        if old_name != name {
                            continue;
                        }
                        if let Some(old_ty) = old_w.type_of() {
                            if !crate::syntax::orthogonal_type(&old_ty, &wty) {
                                return Err(UpdateError::AlreadyDefined {
                                    name: name.clone(),
                                    earlier: old_ty.to_string(),
                                    given: wty.to_string(),
                                });
                            }
                        }
                    }
                }
            }
        } else if sig.consts.contains_key(name) {
            return Err(UpdateError::NameClash(name.clone()));
        }
        intro_vars.push((name.clone(), wty));
    }
    if !sig.term_ok(prop) {
        return Err(UpdateError::TermNotOk(prop.to_string()));
    }
    if !prop.has_type(&Type::bool_ty()) {
        return Err(UpdateError::NotBoolean(prop.to_string()));
    }
    for (name, ty) in prop.free_vars() {
        if !intro_vars.iter().any(|(n, t)| *n == name && *t == ty) {
            return Err(UpdateError::StrayFreeVar { name, ty: ty.to_string() });
        }
    }
    // The obligation: prop follows from taking the definitions as
    // hypotheses.
    let d = deriv.ok_or(UpdateError::MissingDerivation)?;
    let seq = check_derivation(&ctxt.theory(), d)?;
    if !seq.concl.alpha_eq(prop) {
        return Err(UpdateError::WrongConclusion {
            expected: prop.to_string(),
            got: seq.concl.to_string(),
        });
    }
    let mut expected: Vec<Term> = eqs
        .iter()
        .filter_map(|(name, w)| {
            let ty = w.type_of()?;
            mk_eq(Term::var(name.clone(), ty), w.clone())
        })
        .map(|t| t.canon())
        .collect();
    expected.sort();
    expected.dedup();
    if seq.hyps != expected {
        return Err(UpdateError::WrongHypotheses);
    }
    // Global coherence of the extended context: pairwise orthogonality
    // of definitions and a terminating dependency relation.
    let ext = ctxt.push_unchecked(Update::ConstSpec {
        overload,
        eqs: eqs.to_vec(),
        prop: prop.clone(),
    });
    context_orthogonal(&ext).map_err(|e| UpdateError::Overlap {
        a: e.a,
        b: e.b,
        witness: e.witness,
    })?;
    match check_termination(&ext, bound) {
        TerminationVerdict::Terminating { .. } => Ok(()),
        TerminationVerdict::Cycle { path } => Err(UpdateError::Cycle { path }),
        TerminationVerdict::Unknown { bound } => Err(UpdateError::TerminationUnknown { bound }),
    }
}
