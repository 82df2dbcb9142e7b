//! Iterative model extension.
//!
//! Given a model of a context and one more update, build a model of the
//! extended context: symbols in the update's independent fragment keep
//! their old denotations bit for bit, and everything else is
//! reconstructed from its defining update, recursing through
//! dependencies. The recursion is well-founded exactly when the
//! dependency relation terminates, so the builder insists on a
//! `Terminating` verdict before it starts. Conservativity and
//! consistency checks ride on top of the construction.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::deps::{check_termination, context_orthogonal, DepNode, TerminationVerdict};
use crate::fragment::{
    enumerate_ground_consts, enumerate_ground_types, in_total_fragment_consts,
    in_total_fragment_types, FragmentSpec, Verdict3, DEFAULT_FRAGMENT_BOUND,
};
use crate::hfset::HFSet;
use crate::kernel::{check_derivation, Derivation};
use crate::semantics::{
    check_frag_interpretation, check_models_witnesses, ext_delta, models_bounded, satisfies,
    termsem, Binding, Budget, Interpretation, InterpView, ModelsFailure, SatOutcome, SemError,
    Valuation, WitnessFailure,
};
use crate::syntax::{dest_eq, match_type, ConstInstance, Term, Type};
use crate::theory::{typedefn_types, Context, Update};

/// Knobs for one model construction. `depth` bounds the ground types
/// the model materializes and the substitutions every check sweeps;
/// `designated` assigns carriers to declared-only types (the default is
/// the one-element set); `admissible` lists the underivable axioms the
/// finite construction is known to satisfy.
#[derive(Clone, Debug)]
pub struct ModelConfig {
    pub depth: usize,
    pub budget: Budget,
    pub bound: usize,
    pub designated: BTreeMap<Type, HFSet>,
    pub admissible: Vec<Term>,
}

impl Default for ModelConfig {
    fn default() -> ModelConfig {
        ModelConfig {
            depth: 2,
            budget: Budget::default(),
            bound: DEFAULT_FRAGMENT_BOUND,
            designated: BTreeMap::new(),
            admissible: vec![crate::base_theories::eta_axiom()],
        }
    }
}

#[derive(Debug, Error, Clone)]
pub enum ModelError {
    #[error("context does not extend the built-in seed")]
    NotAnExtension,
    #[error("context definitions overlap: {0}")]
    NotOrthogonal(String),
    #[error("dependency relation has a descent loop through {0}")]
    NotTerminating(String),
    #[error("termination search exhausted its bound of {0}")]
    TerminationUnknown(usize),
    #[error("axiom {0} is not in the admissible list")]
    InadmissibleAxiom(String),
    #[error("axiom {0} requires an infinite carrier; no finite model exists")]
    RequiresInfinity(String),
    #[error("fragment membership of {0} undecided within the bound")]
    FragmentUnknown(String),
    #[error("no defining update for {0}")]
    NoDefiningUpdate(String),
    #[error("type definition carves an empty subset at {0}")]
    EmptyCarvedType(String),
    #[error("reconstruction disagrees with the base model at {0}")]
    Disagrees(String),
    #[error("extended interpretation fails axiom {axiom}")]
    FailsAxiom { axiom: String, failure: Box<ModelsFailure> },
    #[error("extended interpretation fails the witness of {constant}")]
    FailsWitness { constant: String, failure: Box<WitnessFailure> },
    #[error("kernel rejects the reflexivity derivation: {0}")]
    ReflRejected(String),
    #[error("no counterexample valuation found for the distinctness sequent")]
    NoCounterexample,
    #[error(transparent)]
    Sem(#[from] SemError),
}

/// Is this context fit for model construction? Extends the seed, has
/// pairwise orthogonal definitions and a terminating dependency
/// relation.
pub fn wellformed(ctxt: &Context, bound: usize) -> Result<(), ModelError> {
    if !ctxt.extends_init() {
        return Err(ModelError::NotAnExtension);
    }
    context_orthogonal(ctxt).map_err(|e| ModelError::NotOrthogonal(e.to_string()))?;
    match check_termination(ctxt, bound) {
        TerminationVerdict::Terminating { .. } => Ok(()),
        TerminationVerdict::Cycle { path } => {
            let shown: Vec<String> = path.iter().map(|n| n.to_string()).collect();
            Err(ModelError::NotTerminating(shown.join(" -> ")))
        }
        TerminationVerdict::Unknown { bound } => Err(ModelError::TerminationUnknown(bound)),
    }
}

fn mentions_type(t: &Term, name: &str) -> bool {
    fn ty_mentions(ty: &Type, name: &str) -> bool {
        match ty {
            Type::Var(_) => false,
            Type::App(n, args) => n == name || args.iter().any(|a| ty_mentions(a, name)),
        }
    }
    match t {
        Term::Var(_, ty) | Term::Const(_, ty) => ty_mentions(ty, name),
        Term::Comb(f, x) => mentions_type(f, name) || mentions_type(x, name),
        Term::Abs(v, b) => mentions_type(v, name) || mentions_type(b, name),
    }
}

/// Builds denotations for the extended context on demand. Fragment
/// symbols are copied from the base model; the rest are reconstructed
/// from their defining updates, memoized across the recursion.
pub struct ModelBuilder<'a> {
    ctxt: &'a Context,
    base: &'a Interpretation,
    frag: FragmentSpec,
    cfg: &'a ModelConfig,
    /// An axiom step must rebuild everything: the new axiom constrains
    /// symbols the fragment split would otherwise hand to the base.
    axiom_step: bool,
    memo: RefCell<BTreeMap<DepNode, HFSet>>,
}

impl<'a> ModelBuilder<'a> {
    /// `ctxt` is the extended context whose newest update is being
    /// modelled over `base`, a model of its parent.
    pub fn new(
        ctxt: &'a Context,
        base: &'a Interpretation,
        cfg: &'a ModelConfig,
    ) -> Result<ModelBuilder<'a>, ModelError> {
        wellformed(ctxt, cfg.bound)?;
        let newest = ctxt.updates().first().expect("an extension has updates");
        if let Update::NewAxiom(p) = newest {
            if !cfg.admissible.iter().any(|ax| ax.alpha_eq(p)) {
                // A finitely satisfiable axiom can be whitelisted; an
                // axiom forcing an infinite individuals type cannot.
                if mentions_type(p, "ind") {
                    return Err(ModelError::RequiresInfinity(p.to_string()));
                }
                return Err(ModelError::InadmissibleAxiom(p.to_string()));
            }
        }
        let axiom_step = matches!(newest, Update::NewAxiom(_));
        let frag = FragmentSpec::for_update(ctxt).ok_or(ModelError::NotAnExtension)?;
        Ok(ModelBuilder { ctxt, base, frag, cfg, axiom_step, memo: RefCell::new(BTreeMap::new()) })
    }

    pub fn fragment(&self) -> &FragmentSpec {
        &self.frag
    }

    fn cap(&self) -> usize {
        self.cfg.budget.carrier_cap
    }

    /// Base reuse for symbols independent of the update. Missing base
    /// entries fall through to reconstruction, which agrees with the
    /// base by construction on independent symbols.
    fn base_value(&self, node: &DepNode) -> Result<Option<HFSet>, ModelError> {
        if self.axiom_step {
            return Ok(None);
        }
        let verdict = match node {
            DepNode::Ty(ty) => self.frag.in_indep_frag_types(ty, self.cfg.bound),
            DepNode::Const(c) => self.frag.in_indep_frag_consts(c, self.cfg.bound),
        };
        match verdict {
            Verdict3::Unknown => Err(ModelError::FragmentUnknown(node.to_string())),
            Verdict3::No => Ok(None),
            Verdict3::Yes => Ok(match node {
                DepNode::Ty(ty) => self.base.delta.get(ty).cloned(),
                DepNode::Const(c) => self.base.gamma.get(c).cloned(),
            }),
        }
    }

    fn build_type(&self, ty: &Type) -> Result<HFSet, ModelError> {
        let node = DepNode::Ty(ty.clone());
        if let Some(hit) = self.memo.borrow().get(&node) {
            return Ok(hit.clone());
        }
        let value = match self.base_value(&node)? {
            Some(v) => v,
            None => self.construct_type(ty)?,
        };
        self.memo.borrow_mut().insert(node, value.clone());
        Ok(value)
    }

    fn construct_type(&self, ty: &Type) -> Result<HFSet, ModelError> {
        for upd in self.ctxt.updates() {
            if let Update::TypeDefn { name, pred, .. } = upd {
                let (host, new) = match typedefn_types(name, pred) {
                    Some(pair) => pair,
                    None => continue,
                };
                let theta = match match_type(&new, ty) {
                    Some(theta) => theta,
                    None => continue,
                };
                let carrier = ext_delta(self, self.cap(), &theta.apply(&host))?;
                let pred_den =
                    termsem(self, self.cap(), &Valuation::empty(), &theta, pred)?;
                let mut kept = Vec::new();
                for x in carrier.elems() {
                    if pred_den.apply(x).map_err(SemError::from)? == HFSet::tru() {
                        kept.push(x.clone());
                    }
                }
                if kept.is_empty() {
                    return Err(ModelError::EmptyCarvedType(ty.to_string()));
                }
                return Ok(HFSet::from_elems(kept));
            }
        }
        if let Type::App(name, _) = ty {
            if self.ctxt.signature().tys.contains_key(name) {
                return Ok(self
                    .cfg
                    .designated
                    .get(ty)
                    .cloned()
                    .unwrap_or_else(HFSet::one));
            }
        }
        Err(ModelError::NoDefiningUpdate(ty.to_string()))
    }

    fn build_const(&self, c: &ConstInstance) -> Result<HFSet, ModelError> {
        let node = DepNode::Const(c.clone());
        if let Some(hit) = self.memo.borrow().get(&node) {
            return Ok(hit.clone());
        }
        let value = match self.base_value(&node)? {
            Some(v) => v,
            None => self.construct_const(c)?,
        };
        self.memo.borrow_mut().insert(node, value.clone());
        Ok(value)
    }

    fn construct_const(&self, c: &ConstInstance) -> Result<HFSet, ModelError> {
        for upd in self.ctxt.updates() {
            match upd {
                Update::ConstSpec { eqs, .. } => {
                    for (name, witness) in eqs {
                        if name != &c.name {
                            continue;
                        }
                        let wty = match witness.type_of() {
                            Some(t) => t,
                            None => continue,
                        };
                        let theta = match match_type(&wty, &c.ty) {
                            Some(theta) => theta,
                            None => continue,
                        };
                        return Ok(termsem(
                            self,
                            self.cap(),
                            &Valuation::empty(),
                            &theta,
                            witness,
                        )?);
                    }
                }
                Update::TypeDefn { name, pred, abs, rep } => {
                    let (host, new) = match typedefn_types(name, pred) {
                        Some(pair) => pair,
                        None => continue,
                    };
                    if &c.name == abs {
                        let sch = Type::fun(host.clone(), new.clone());
                        if let Some(theta) = match_type(&sch, &c.ty) {
                            let h = ext_delta(self, self.cap(), &theta.apply(&host))?;
                            let s = ext_delta(self, self.cap(), &theta.apply(&new))?;
                            let fallback = s
                                .least()
                                .cloned()
                                .ok_or_else(|| ModelError::EmptyCarvedType(new.to_string()))?;
                            return HFSet::graph(&h, |x| {
                                Ok(if s.mem(x) { x.clone() } else { fallback.clone() })
                            });
                        }
                    }
                    if &c.name == rep {
                        let sch = Type::fun(new.clone(), host.clone());
                        if let Some(theta) = match_type(&sch, &c.ty) {
                            let s = ext_delta(self, self.cap(), &theta.apply(&new))?;
                            return HFSet::graph(&s, |x| Ok(x.clone()));
                        }
                    }
                }
                _ => {}
            }
        }
        // Declared but never defined at this instance: the designated
        // least element of the carrier.
        if let Some(declared) = self.ctxt.signature().consts.get(&c.name) {
            if match_type(declared, &c.ty).is_some() {
                let carrier = ext_delta(self, self.cap(), &c.ty)?;
                return carrier
                    .least()
                    .cloned()
                    .ok_or_else(|| SemError::EmptyCarrier(c.ty.to_string()).into());
            }
        }
        Err(ModelError::NoDefiningUpdate(format!("{}:{}", c.name, c.ty)))
    }
}

impl InterpView for ModelBuilder<'_> {
    fn type_den(&self, ty: &Type) -> Result<HFSet, SemError> {
        self.build_type(ty).map_err(|e| match e {
            // Nested semantic errors pass through so resource
            // exhaustion stays recognizable across the recursion.
            ModelError::Sem(s) => s,
            other => SemError::MissingType(format!("{ty}: {other}")),
        })
    }

    fn const_den(&self, c: &ConstInstance) -> Result<HFSet, SemError> {
        self.build_const(c).map_err(|e| match e {
            ModelError::Sem(s) => s,
            other => SemError::MissingConst(format!("{}:{}: {other}", c.name, c.ty)),
        })
    }
}

/// Materialize a model of the extended context to the configured depth
/// and check it: a fragment interpretation that satisfies the theory's
/// axioms, pins every witness, and agrees with the base on the
/// independent fragment. Any failure is a hard error.
pub fn extend_model(
    ctxt: &Context,
    base: &Interpretation,
    cfg: &ModelConfig,
) -> Result<Interpretation, ModelError> {
    let builder = ModelBuilder::new(ctxt, base, cfg)?;
    let sig = ctxt.signature();
    let mut interp = Interpretation::empty();
    // Instances whose carriers blow the cap are left out of the
    // materialized fragment; checks over them become vacuous rather
    // than wrong.
    let is_resource = |e: &ModelError| matches!(e, ModelError::Sem(s) if s.is_resource());
    for ty in enumerate_ground_types(sig, cfg.depth) {
        if in_total_fragment_types(sig, &ty) {
            match builder.build_type(&ty) {
                Ok(den) => {
                    interp.delta.insert(ty, den);
                }
                Err(e) if is_resource(&e) => {}
                Err(e) => return Err(e),
            }
        }
    }
    // A constant enters only if its type is generated by the types
    // actually materialized, which keeps the result a signature
    // fragment: shallow substitutions can still name deeper types.
    let materialized: BTreeSet<Type> = interp.delta.keys().cloned().collect();
    let have_type =
        |ty: &Type| crate::syntax::builtin_closure_member(&|t| materialized.contains(t), ty);
    for c in enumerate_ground_consts(sig, cfg.depth) {
        if in_total_fragment_consts(sig, &c) && have_type(&c.ty) {
            match builder.build_const(&c) {
                Ok(den) => {
                    interp.gamma.insert(c, den);
                }
                Err(e) if is_resource(&e) => {}
                Err(e) => return Err(e),
            }
        }
    }

    check_frag_interpretation(&interp, sig, cfg.budget.carrier_cap)?;
    let models = models_bounded(&interp, &cfg.budget, &ctxt.theory(), cfg.depth)?;
    if let Some(failure) = models.failure {
        return Err(ModelError::FailsAxiom {
            axiom: failure.axiom.to_string(),
            failure: Box::new(failure),
        });
    }
    let witnesses = check_models_witnesses(&interp, &cfg.budget, ctxt, cfg.depth)?;
    if let Some(failure) = witnesses.failure {
        return Err(ModelError::FailsWitness {
            constant: format!("{}:{}", failure.constant.name, failure.constant.ty),
            failure: Box::new(failure),
        });
    }

    if !builder.axiom_step {
        let frag = builder.fragment();
        for (ty, den) in &interp.delta {
            if frag.in_indep_frag_types(ty, cfg.bound) == Verdict3::Yes {
                if let Some(old) = base.delta.get(ty) {
                    if old != den {
                        return Err(ModelError::Disagrees(ty.to_string()));
                    }
                }
            }
        }
        for (c, den) in &interp.gamma {
            if frag.in_indep_frag_consts(c, cfg.bound) == Verdict3::Yes {
                if let Some(old) = base.gamma.get(c) {
                    if old != den {
                        return Err(ModelError::Disagrees(format!("{}:{}", c.name, c.ty)));
                    }
                }
            }
        }
    }
    Ok(interp)
}

/// One step of the chain construction, for reporting.
#[derive(Clone, Debug)]
pub struct StepReport {
    pub update: String,
    pub types: usize,
    pub consts: usize,
}

/// Iterate `extend_model` along the whole update chain, starting from
/// the empty interpretation of the built-in seed.
pub fn build_chain_model(
    ctxt: &Context,
    cfg: &ModelConfig,
) -> Result<(Interpretation, Vec<StepReport>), ModelError> {
    let mut chain = vec![ctxt.clone()];
    while let Some(parent) = chain.last().expect("chain is nonempty").parent() {
        chain.push(parent);
    }
    // The last element is the seed itself; everything before it is an
    // extension step, applied oldest first.
    let mut interp = Interpretation::empty();
    let mut steps = Vec::new();
    for step in chain.iter().rev().skip(1) {
        interp = extend_model(step, &interp, cfg)?;
        steps.push(StepReport {
            update: {
                let upd = step.updates().first().expect("extensions have updates");
                upd.kind().to_string()
            },
            types: interp.delta.len(),
            consts: interp.gamma.len(),
        });
    }
    Ok((interp, steps))
}

/// The conservativity ledger for one extension: every old-signature
/// fragment symbol the update leaves independent must keep its value.
#[derive(Clone, Debug)]
pub struct ConservativityReport {
    /// Fragment symbols with a value on both sides and whether they
    /// kept it.
    pub kept: Vec<(String, bool)>,
    /// Symbols whose fragment membership the bound could not decide.
    pub unknown: Vec<String>,
    /// Sample ground terms evaluated under both models.
    pub term_checks: Vec<(String, bool)>,
    pub verdict: bool,
}

/// Compare a base model and an extended model over the independent
/// fragment of the extension, to the configured depth, then spot-check
/// the supplied closed sample terms.
pub fn check_conservativity(
    base: &Interpretation,
    extended: &Interpretation,
    frag: &FragmentSpec,
    cfg: &ModelConfig,
    sample_terms: &[Term],
) -> Result<ConservativityReport, ModelError> {
    let mut kept = Vec::new();
    let mut unknown = Vec::new();
    for ty in enumerate_ground_types(&frag.host_sig, cfg.depth) {
        if !in_total_fragment_types(&frag.host_sig, &ty) {
            continue;
        }
        match frag.in_indep_frag_types(&ty, cfg.bound) {
            Verdict3::No => {}
            Verdict3::Unknown => unknown.push(ty.to_string()),
            Verdict3::Yes => match (base.delta.get(&ty), extended.delta.get(&ty)) {
                (Some(a), Some(b)) => kept.push((ty.to_string(), a == b)),
                _ => unknown.push(ty.to_string()),
            },
        }
    }
    for c in enumerate_ground_consts(&frag.host_sig, cfg.depth) {
        if !in_total_fragment_consts(&frag.host_sig, &c) {
            continue;
        }
        let shown = format!("{}:{}", c.name, c.ty);
        match frag.in_indep_frag_consts(&c, cfg.bound) {
            Verdict3::No => {}
            Verdict3::Unknown => unknown.push(shown),
            Verdict3::Yes => match (base.gamma.get(&c), extended.gamma.get(&c)) {
                (Some(a), Some(b)) => kept.push((shown, a == b)),
                _ => unknown.push(shown),
            },
        }
    }
    let mut term_checks = Vec::new();
    for t in sample_terms {
        let under_base = termsem(
            base,
            cfg.budget.carrier_cap,
            &Valuation::empty(),
            &crate::syntax::TypeSubst::new(),
            t,
        )?;
        let under_ext = termsem(
            extended,
            cfg.budget.carrier_cap,
            &Valuation::empty(),
            &crate::syntax::TypeSubst::new(),
            t,
        )?;
        term_checks.push((t.to_string(), under_base == under_ext));
    }
    let verdict =
        kept.iter().all(|(_, eq)| *eq) && term_checks.iter().all(|(_, eq)| *eq);
    Ok(ConservativityReport { kept, unknown, term_checks, verdict })
}

/// Consistency at desk scale: the kernel derives `x = x`, and the chain
/// model falsifies `x = y` at some valuation, so the two sequents are
/// separated and no derivation of the second can exist.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub refl_derivable: bool,
    pub counterexample: Vec<Binding>,
    pub steps: Vec<StepReport>,
}

pub fn check_consistency(
    ctxt: &Context,
    cfg: &ModelConfig,
) -> Result<ConsistencyReport, ModelError> {
    let x = Term::var("x", Type::bool_ty());
    let refl = Derivation::Refl(x.clone());
    let seq = check_derivation(&ctxt.theory(), &refl)
        .map_err(|e| ModelError::ReflRejected(e.to_string()))?;
    let refl_derivable = seq.hyps.is_empty() && dest_eq(&seq.concl).is_some();

    let (interp, steps) = build_chain_model(ctxt, cfg)?;
    let distinct =
        crate::syntax::mk_eq(x, Term::var("y", Type::bool_ty())).expect("x = y is welltyped");
    let outcome = satisfies(
        &interp,
        &cfg.budget,
        &crate::syntax::TypeSubst::new(),
        &[],
        &distinct,
    )?;
    match outcome {
        SatOutcome::Falsified(counterexample) => {
            Ok(ConsistencyReport { refl_derivable, counterexample, steps })
        }
        _ => Err(ModelError::NoCounterexample),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_theories::{bool_context, const_def, mk_false, mk_forall, mk_imp, mk_neg, mk_true};
    use crate::syntax::mk_eq;

    fn b() -> Type {
        Type::bool_ty()
    }

    fn dec_base() -> Context {
        let ctxt = bool_context()
            .extend(Update::NewConst { name: "c".into(), ty: b() }, None)
            .unwrap();
        let ctxt = const_def(&ctxt, "d", mk_false()).unwrap();
        const_def(&ctxt, "e", mk_imp(Term::constant("c", b()), mk_true())).unwrap()
    }

    fn dec_extended() -> Context {
        let prop = mk_eq(Term::var("c", b()), mk_true()).unwrap();
        let deriv = Derivation::Assume(prop.clone());
        dec_base()
            .extend(
                Update::ConstSpec {
                    overload: true,
                    eqs: vec![("c".into(), mk_true())],
                    prop,
                },
                Some(&deriv),
            )
            .unwrap()
    }

    #[test]
    fn the_chain_model_interprets_the_boolean_connectives() {
        let (interp, steps) = build_chain_model(&bool_context(), &ModelConfig::default()).unwrap();
        assert_eq!(steps.len(), 8);
        let tru = interp.gamma.get(&ConstInstance::new("true", b())).unwrap();
        let fls = interp.gamma.get(&ConstInstance::new("false", b())).unwrap();
        assert_eq!(tru, &HFSet::tru());
        assert_eq!(fls, &HFSet::fls());
        let and_ty = Type::fun(b(), Type::fun(b(), b()));
        let and = interp.gamma.get(&ConstInstance::new("and", and_ty)).unwrap();
        let tt = and.apply(&HFSet::tru()).unwrap().apply(&HFSet::tru()).unwrap();
        let tf = and.apply(&HFSet::tru()).unwrap().apply(&HFSet::fls()).unwrap();
        assert_eq!((tt, tf), (HFSet::tru(), HFSet::fls()));
    }

    #[test]
    fn redefining_a_declared_constant_keeps_the_independent_fragment() {
        let cfg = ModelConfig::default();
        let (base, _) = build_chain_model(&dec_base(), &cfg).unwrap();
        assert_eq!(base.gamma.get(&ConstInstance::new("c", b())), Some(&HFSet::fls()));
        assert_eq!(base.gamma.get(&ConstInstance::new("d", b())), Some(&HFSet::fls()));
        assert_eq!(base.gamma.get(&ConstInstance::new("e", b())), Some(&HFSet::tru()));

        let ctxt = dec_extended();
        let extended = extend_model(&ctxt, &base, &cfg).unwrap();
        assert_eq!(extended.gamma.get(&ConstInstance::new("c", b())), Some(&HFSet::tru()));
        assert_eq!(
            extended.gamma.get(&ConstInstance::new("d", b())),
            base.gamma.get(&ConstInstance::new("d", b())),
        );
        assert_eq!(extended.gamma.get(&ConstInstance::new("e", b())), Some(&HFSet::tru()));
    }

    #[test]
    fn conservativity_holds_across_the_redefinition() {
        let cfg = ModelConfig::default();
        let (base, _) = build_chain_model(&dec_base(), &cfg).unwrap();
        let ctxt = dec_extended();
        let extended = extend_model(&ctxt, &base, &cfg).unwrap();
        let frag = FragmentSpec::for_update(&ctxt).unwrap();
        let samples = vec![
            Term::constant("d", b()),
            mk_neg(Term::constant("d", b())),
        ];
        let report = check_conservativity(&base, &extended, &frag, &cfg, &samples).unwrap();
        assert!(report.verdict, "{report:?}");
        assert!(report.unknown.is_empty());
        assert!(report.kept.iter().any(|(name, eq)| name == "d:bool" && *eq));
        assert!(report.kept.iter().all(|(name, _)| !name.starts_with("c:") && !name.starts_with("e:")));
        assert!(report.term_checks.iter().all(|(_, eq)| *eq));
    }

    #[test]
    fn corrupted_base_models_are_caught_by_the_axiom_sweep() {
        let cfg = ModelConfig::default();
        let (mut base, _) = build_chain_model(&dec_base(), &cfg).unwrap();
        base.gamma.insert(ConstInstance::new("d", b()), HFSet::tru());
        let err = extend_model(&dec_extended(), &base, &cfg).unwrap_err();
        match err {
            ModelError::FailsAxiom { axiom, .. } => assert!(axiom.contains('d')),
            other => panic!("expected an axiom failure, got {other}"),
        }
    }

    #[test]
    fn nonterminating_contexts_are_rejected_before_construction() {
        let neg_c = mk_neg(Term::constant("c", b()));
        let prop = mk_eq(Term::var("c", b()), neg_c.clone()).unwrap();
        let ctxt = bool_context()
            .extend(Update::NewConst { name: "c".into(), ty: b() }, None)
            .unwrap()
            .push_unchecked(Update::ConstSpec {
                overload: true,
                eqs: vec![("c".into(), neg_c)],
                prop,
            });
        let err = extend_model(&ctxt, &Interpretation::empty(), &ModelConfig::default())
            .unwrap_err();
        assert!(matches!(err, ModelError::NotTerminating(_)), "{err}");
    }

    #[test]
    fn undeclared_axioms_are_inadmissible() {
        let ax = mk_eq(mk_true(), mk_true()).unwrap();
        let ctxt = bool_context().extend(Update::NewAxiom(ax), None).unwrap();
        let err = build_chain_model(&ctxt, &ModelConfig::default()).unwrap_err();
        assert!(matches!(err, ModelError::InadmissibleAxiom(_)), "{err}");
    }

    #[test]
    fn axioms_forcing_infinity_get_their_own_error() {
        let ind = Type::app("ind", vec![]);
        let f = Term::var("f", Type::fun(ind.clone(), ind.clone()));
        let ax = mk_forall("f", Type::fun(ind.clone(), ind), mk_eq(f.clone(), f).unwrap());
        let ctxt = bool_context()
            .extend(Update::NewType { name: "ind".into(), arity: 0 }, None)
            .unwrap()
            .extend(Update::NewAxiom(ax), None)
            .unwrap();
        let err = build_chain_model(&ctxt, &ModelConfig::default()).unwrap_err();
        assert!(matches!(err, ModelError::RequiresInfinity(_)), "{err}");
    }

    #[test]
    fn the_eta_step_rebuilds_a_model_that_still_satisfies_everything() {
        let cfg = ModelConfig::default();
        let (interp, steps) = build_chain_model(&crate::base_theories::hol_context(), &cfg).unwrap();
        assert_eq!(steps.len(), 10);
        let report = models_bounded(
            &interp,
            &cfg.budget,
            &crate::base_theories::hol_context().theory(),
            cfg.depth,
        )
        .unwrap();
        assert!(report.ok);
        assert!(report.checked > 0);
    }

    #[test]
    fn consistency_pairs_a_derivation_with_a_countermodel() {
        let report = check_consistency(&dec_extended(), &ModelConfig::default()).unwrap();
        assert!(report.refl_derivable);
        assert_eq!(
            report.counterexample,
            vec![
                (("x".to_string(), b()), HFSet::tru()),
                (("y".to_string(), b()), HFSet::fls()),
            ]
        );
        assert_eq!(report.steps.len(), 12);
    }

    #[test]
    fn type_definitions_carve_their_carrier_and_inject_it() {
        // A type carved from bool by (\p. p = p), so the carrier is all
        // of bool and the injections are identities on it.
        let p = Term::var("p", b());
        let pred = Term::abs("p", b(), mk_eq(p.clone(), p).unwrap());
        let witness = mk_true();
        let ctxt = bool_context();
        let prover = crate::derive::Prover::new(ctxt.theory()).unwrap();
        let obligation = Term::comb(pred.clone(), witness.clone());
        let beta = prover.beta_conv(&obligation).unwrap();
        let refl = prover.refl(witness.clone()).unwrap();
        let proof = prover.eq_mp(&prover.sym(&beta).unwrap(), &refl).unwrap();
        let ctxt = ctxt
            .extend(
                Update::TypeDefn {
                    name: "point".into(),
                    pred,
                    abs: "mk_point".into(),
                    rep: "dest_point".into(),
                },
                Some(proof.derivation()),
            )
            .unwrap();
        let cfg = ModelConfig::default();
        let (interp, _) = build_chain_model(&ctxt, &cfg).unwrap();
        let point = Type::app("point", vec![]);
        let carrier = interp.delta.get(&point).unwrap();
        assert_eq!(carrier, &HFSet::boolset(), "every boolean satisfies p = p");
        let abs = interp
            .gamma
            .get(&ConstInstance::new("mk_point", Type::fun(b(), point.clone())))
            .unwrap();
        let rep = interp
            .gamma
            .get(&ConstInstance::new("dest_point", Type::fun(point, b())))
            .unwrap();
        let back = abs.apply(&rep.apply(&HFSet::tru()).unwrap()).unwrap();
        assert_eq!(back, HFSet::tru());
    }

    #[test]
    fn materialized_constants_stay_inside_the_materialized_types() {
        // Substituting depth-bounded types into a schematic constant can
        // name types one level deeper; those instances must be left out
        // rather than recorded over carriers the model never built.
        let a = Type::var("a");
        let rel = |ty: Type| Type::fun(ty.clone(), Type::fun(ty, b()));
        let list = |ty: Type| Type::app("list", vec![ty]);
        let ctxt = bool_context()
            .extend(Update::NewType { name: "list".into(), arity: 1 }, None)
            .unwrap()
            .extend(Update::NewConst { name: "leq".into(), ty: rel(a.clone()) }, None)
            .unwrap()
            .extend(
                Update::NewConst {
                    name: "lex".into(),
                    ty: Type::fun(rel(a.clone()), rel(list(a.clone()))),
                },
                None,
            )
            .unwrap();
        let witness = Term::comb(
            Term::constant("lex", Type::fun(rel(a.clone()), rel(list(a.clone())))),
            Term::constant("leq", rel(a.clone())),
        );
        let prop = mk_eq(Term::var("leq", rel(list(a))), witness.clone()).unwrap();
        let ctxt = ctxt
            .extend(
                Update::ConstSpec {
                    overload: true,
                    eqs: vec![("leq".into(), witness)],
                    prop: prop.clone(),
                },
                Some(&Derivation::Assume(prop)),
            )
            .unwrap();
        let cfg = ModelConfig::default();
        let (interp, _) = build_chain_model(&ctxt, &cfg).unwrap();
        assert!(interp.delta.contains_key(&list(b())));
        let deep = ConstInstance::new("lex", Type::fun(rel(list(b())), rel(list(list(b())))));
        assert!(!interp.gamma.contains_key(&deep), "names a type outside the model");
        for c in interp.gamma.keys() {
            assert!(
                crate::syntax::builtin_closure_member(
                    &|t| interp.delta.contains_key(t),
                    &c.ty
                ),
                "{}:{} escapes the materialized types",
                c.name,
                c.ty
            );
        }
    }
}
