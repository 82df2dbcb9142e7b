//! Set-theoretic semantics for ground terms over a fragment
//! interpretation.
//!
//! An interpretation assigns hereditarily finite carriers to the ground
//! non-built-in types of a fragment and values to its constant
//! instances. `ext_delta` and `ext_gamma` extend both through the
//! built-ins, and `termsem` evaluates a term under a type substitution
//! and a valuation. Satisfaction and model checking quantify over
//! enumerated ground substitutions and valuations, so every check is a
//! bounded search with an explicit skipped count, never a proof.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fragment::{enumerate_ground_types, ground_substs, in_total_fragment_consts, in_total_fragment_types};
use crate::hfset::{HFSet, SetError};
use crate::syntax::{dest_eq, is_equal_instance, ConstInstance, Term, Type, TypeSubst};
use crate::theory::{Context, Signature, Theory, Update};

/// Resource limits for semantic evaluation. Carriers are function
/// spaces, so sizes grow doubly exponentially in type depth; the caps
/// turn that into honest errors instead of runaway computation.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Largest function space `funspace` may materialize.
    pub carrier_cap: usize,
    /// Largest valuation grid `satisfies` may enumerate.
    pub valuation_cap: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { carrier_cap: 4096, valuation_cap: 1 << 16 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("no carrier recorded for type {0}")]
    MissingType(String),
    #[error("no value recorded for constant {0}")]
    MissingConst(String),
    #[error("carrier for {0} is empty")]
    EmptyCarrier(String),
    #[error("term is not well-typed: {0}")]
    IllTyped(String),
    #[error("type {0} is not ground")]
    NotGround(String),
    #[error("{count} valuations exceed the cap of {cap}")]
    TooManyValuations { count: u128, cap: usize },
    #[error("not a fragment interpretation: {0}")]
    NotFragmental(String),
}

impl SemError {
    /// Resource exhaustion, as opposed to a wrong or missing model.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            SemError::Set(SetError::CarrierTooBig { .. }) | SemError::TooManyValuations { .. }
        )
    }
}

/// Carrier and constant assignments, looked up during evaluation. The
/// model builder implements this by constructing values on demand; a
/// materialized `Interpretation` by map lookup.
pub trait InterpView {
    /// Carrier of a ground, non-built-in type.
    fn type_den(&self, ty: &Type) -> Result<HFSet, SemError>;
    /// Value of a ground, non-equality constant instance.
    fn const_den(&self, c: &ConstInstance) -> Result<HFSet, SemError>;
}

/// A materialized fragment interpretation: carriers for finitely many
/// ground types and values for finitely many constant instances.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    pub delta: BTreeMap<Type, HFSet>,
    pub gamma: BTreeMap<ConstInstance, HFSet>,
}

impl Interpretation {
    pub fn empty() -> Interpretation {
        Interpretation::default()
    }

    /// Is the carrier of `ty` computable from this interpretation?
    pub fn covers_type(&self, ty: &Type) -> bool {
        match ty {
            Type::Var(_) => false,
            Type::App(_, _) if ty.is_bool() => true,
            _ => match ty.as_fun() {
                Some((d, r)) => self.covers_type(d) && self.covers_type(r),
                None => self.delta.contains_key(ty),
            },
        }
    }

    /// Is the value of the instance computable from this interpretation?
    pub fn covers_const(&self, name: &str, ty: &Type) -> bool {
        if is_equal_instance(name, ty) {
            return self.covers_type(ty.as_fun().expect("equality instances are binary").0);
        }
        self.gamma.contains_key(&ConstInstance::new(name, ty.clone())) && self.covers_type(ty)
    }
}

impl InterpView for Interpretation {
    fn type_den(&self, ty: &Type) -> Result<HFSet, SemError> {
        self.delta
            .get(ty)
            .cloned()
            .ok_or_else(|| SemError::MissingType(ty.to_string()))
    }

    fn const_den(&self, c: &ConstInstance) -> Result<HFSet, SemError> {
        self.gamma
            .get(c)
            .cloned()
            .ok_or_else(|| SemError::MissingConst(format!("{}:{}", c.name, c.ty)))
    }
}

/// Carrier of a ground type: Bool and function types are interpreted by
/// the built-in boolean pair and the full function space, everything
/// else by the fragment assignment.
pub fn ext_delta(iv: &dyn InterpView, cap: usize, ty: &Type) -> Result<HFSet, SemError> {
    if ty.is_bool() {
        return Ok(HFSet::boolset());
    }
    if let Some((d, r)) = ty.as_fun() {
        let dd = ext_delta(iv, cap, d)?;
        let rr = ext_delta(iv, cap, r)?;
        return Ok(HFSet::funspace(&dd, &rr, cap)?);
    }
    match ty {
        Type::Var(_) => Err(SemError::NotGround(ty.to_string())),
        Type::App(_, _) => iv.type_den(ty),
    }
}

/// The curried equality function on the carrier of `sigma`, built as a
/// bare graph: its ambient function space is never materialized, so
/// equality exists at carriers far beyond the funspace cap.
fn equality_den(iv: &dyn InterpView, cap: usize, sigma: &Type) -> Result<HFSet, SemError> {
    let s = ext_delta(iv, cap, sigma)?;
    HFSet::graph(&s, |x| HFSet::graph(&s, |y| Ok(HFSet::boolean(x == y))))
}

/// Value of a ground constant instance: equality is built in, the rest
/// comes from the fragment assignment.
pub fn ext_gamma(iv: &dyn InterpView, cap: usize, name: &str, ty: &Type) -> Result<HFSet, SemError> {
    if is_equal_instance(name, ty) {
        let (sigma, _) = ty.as_fun().expect("equality instances are binary");
        return equality_den(iv, cap, sigma);
    }
    iv.const_den(&ConstInstance::new(name, ty.clone()))
}

/// Values for term variables, keyed by the uninstantiated name and
/// type; variables missing from the map default to the least element of
/// their instantiated carrier.
#[derive(Clone, Debug, Default)]
pub struct Valuation {
    map: BTreeMap<(String, Type), HFSet>,
}

impl Valuation {
    pub fn empty() -> Valuation {
        Valuation::default()
    }

    pub fn bind(mut self, name: &str, ty: Type, v: HFSet) -> Valuation {
        self.map.insert((name.to_string(), ty), v);
        self
    }

    pub fn get(&self, name: &str, ty: &Type) -> Option<&HFSet> {
        self.map.get(&(name.to_string(), ty.clone()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(String, Type), &HFSet)> {
        self.map.iter()
    }
}

/// Evaluate a term under a type substitution and a valuation. The
/// valuation is consulted at the *uninstantiated* variable, so terms are
/// never rewritten before evaluation; the substitution is applied
/// lazily, type by type, exactly where a carrier or instance is needed.
pub fn termsem(
    iv: &dyn InterpView,
    cap: usize,
    v: &Valuation,
    theta: &TypeSubst,
    t: &Term,
) -> Result<HFSet, SemError> {
    if let Some((l, r)) = dest_eq(t) {
        // Equality applied to both sides never materializes the
        // equality graph: carriers of the compared type stay implicit.
        let lv = termsem(iv, cap, v, theta, l)?;
        let rv = termsem(iv, cap, v, theta, r)?;
        return Ok(HFSet::boolean(lv == rv));
    }
    match t {
        Term::Var(name, ty) => match v.get(name, ty) {
            Some(x) => Ok(x.clone()),
            None => {
                let carrier = ext_delta(iv, cap, &theta.apply(ty))?;
                carrier
                    .least()
                    .cloned()
                    .ok_or_else(|| SemError::EmptyCarrier(ty.to_string()))
            }
        },
        Term::Const(name, ty) => ext_gamma(iv, cap, name, &theta.apply(ty)),
        Term::Comb(f, x) => {
            let fv = termsem(iv, cap, v, theta, f)?;
            let xv = termsem(iv, cap, v, theta, x)?;
            Ok(fv.apply(&xv)?)
        }
        Term::Abs(var, body) => {
            let (name, ty) = match var.as_ref() {
                Term::Var(name, ty) => (name.as_str(), ty),
                _ => return Err(SemError::IllTyped(t.to_string())),
            };
            let body_ty = body
                .type_of()
                .ok_or_else(|| SemError::IllTyped(t.to_string()))?;
            let dom = ext_delta(iv, cap, &theta.apply(ty))?;
            let rng = ext_delta(iv, cap, &theta.apply(&body_ty))?;
            HFSet::abstract_graph(&dom, &rng, |x| {
                let inner = v.clone().bind(name, ty.clone(), x.clone());
                termsem(iv, cap, &inner, theta, body)
            })
        }
    }
}

/// One bound variable binding of a reported counterexample.
pub type Binding = ((String, Type), HFSet);

/// A ground type substitution of a reported counterexample, as pairs.
pub type SubstPairs = Vec<(String, Type)>;

/// Outcome of one satisfaction check at one ground substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatOutcome {
    Satisfied,
    /// The instantiated sequent leaves the interpretation's fragment;
    /// satisfaction is vacuous there and the check records why.
    Vacuous(String),
    Falsified(Vec<Binding>),
}

fn collect_consts(t: &Term, acc: &mut Vec<(String, Type)>) {
    match t {
        Term::Var(..) => {}
        Term::Const(name, ty) => acc.push((name.clone(), ty.clone())),
        Term::Comb(f, x) => {
            collect_consts(f, acc);
            collect_consts(x, acc);
        }
        Term::Abs(v, b) => {
            collect_consts(v, acc);
            collect_consts(b, acc);
        }
    }
}

fn collect_var_types(t: &Term, acc: &mut Vec<Type>) {
    match t {
        Term::Var(_, ty) => acc.push(ty.clone()),
        Term::Const(..) => {}
        Term::Comb(f, x) => {
            collect_var_types(f, acc);
            collect_var_types(x, acc);
        }
        Term::Abs(v, b) => {
            collect_var_types(v, acc);
            collect_var_types(b, acc);
        }
    }
}

/// The side conditions under which `termsem` is defined on `t`: the
/// instantiated term is ground and every variable carrier and constant
/// instance it touches lies in the interpretation's fragment. Returns
/// the first violation.
fn fragment_side_conditions(
    interp: &Interpretation,
    theta: &TypeSubst,
    terms: &[&Term],
) -> Option<String> {
    for t in terms {
        for tv in t.tvars() {
            if !theta.apply(&Type::var(tv.clone())).is_ground() {
                return Some(format!("type variable {tv} is not instantiated to a ground type"));
            }
        }
        let mut vtys = Vec::new();
        collect_var_types(t, &mut vtys);
        for ty in vtys {
            let ity = theta.apply(&ty);
            if !interp.covers_type(&ity) {
                return Some(format!("variable carrier {ity} is outside the fragment"));
            }
        }
        let mut consts = Vec::new();
        collect_consts(t, &mut consts);
        for (name, ty) in consts {
            let ity = theta.apply(&ty);
            if !interp.covers_const(&name, &ity) {
                return Some(format!("constant instance {name}:{ity} is outside the fragment"));
            }
        }
    }
    None
}

/// Does the interpretation satisfy `hyps |- p` at the ground
/// substitution `theta`? Every valuation of the free variables that
/// makes all hypotheses true must make `p` true; the first
/// counterexample valuation is returned. Sequents whose instance leaves
/// the fragment are vacuously satisfied, with the reason recorded.
pub fn satisfies(
    interp: &Interpretation,
    budget: &Budget,
    theta: &TypeSubst,
    hyps: &[Term],
    p: &Term,
) -> Result<SatOutcome, SemError> {
    let mut terms: Vec<&Term> = hyps.iter().collect();
    terms.push(p);
    if let Some(reason) = fragment_side_conditions(interp, theta, &terms) {
        return Ok(SatOutcome::Vacuous(reason));
    }
    let mut vars: Vec<(String, Type)> = Vec::new();
    for t in &terms {
        for fv in t.free_vars() {
            if !vars.contains(&fv) {
                vars.push(fv);
            }
        }
    }
    vars.sort();
    let mut carriers: Vec<Vec<HFSet>> = Vec::new();
    let mut count: u128 = 1;
    for (_, ty) in &vars {
        let carrier = ext_delta(interp, budget.carrier_cap, &theta.apply(ty))?;
        count = count.saturating_mul(carrier.card() as u128);
        carriers.push(carrier.elems().to_vec());
    }
    if count > budget.valuation_cap as u128 {
        return Err(SemError::TooManyValuations { count, cap: budget.valuation_cap });
    }
    let mut picks = vec![0usize; vars.len()];
    loop {
        let mut v = Valuation::empty();
        for ((name, ty), (carrier, &i)) in vars.iter().zip(carriers.iter().zip(&picks)) {
            v = v.bind(name, ty.clone(), carrier[i].clone());
        }
        let mut relevant = true;
        for h in hyps {
            if termsem(interp, budget.carrier_cap, &v, theta, h)? != HFSet::tru() {
                relevant = false;
                break;
            }
        }
        if relevant && termsem(interp, budget.carrier_cap, &v, theta, p)? != HFSet::tru() {
            let binding = v.entries().map(|(k, x)| (k.clone(), x.clone())).collect();
            return Ok(SatOutcome::Falsified(binding));
        }
        let mut pos = 0;
        loop {
            if pos == picks.len() {
                return Ok(SatOutcome::Satisfied);
            }
            picks[pos] += 1;
            if picks[pos] < carriers[pos].len() {
                break;
            }
            picks[pos] = 0;
            pos += 1;
        }
    }
}

/// A bounded satisfaction sweep over every ground substitution built
/// from signature types up to `depth`.
#[derive(Clone, Debug)]
pub struct BoundedSat {
    pub ok: bool,
    pub checked: usize,
    pub skipped: usize,
    pub failure: Option<(SubstPairs, Vec<Binding>)>,
}

pub fn sat_bounded(
    interp: &Interpretation,
    budget: &Budget,
    sig: &Signature,
    hyps: &[Term],
    p: &Term,
    depth: usize,
) -> Result<BoundedSat, SemError> {
    let targets = enumerate_ground_types(sig, depth);
    let mut tyvars = p.tvars();
    for h in hyps {
        tyvars.extend(h.tvars());
    }
    let mut checked = 0;
    let mut skipped = 0;
    for theta in ground_substs(&tyvars, &targets) {
        match satisfies(interp, budget, &theta, hyps, p)? {
            SatOutcome::Satisfied => checked += 1,
            SatOutcome::Vacuous(_) => skipped += 1,
            SatOutcome::Falsified(binding) => {
                let subst = tyvars
                    .iter()
                    .map(|v| (v.clone(), theta.apply(&Type::var(v.clone()))))
                    .collect();
                return Ok(BoundedSat { ok: false, checked, skipped, failure: Some((subst, binding)) });
            }
        }
    }
    Ok(BoundedSat { ok: true, checked, skipped, failure: None })
}

/// The first axiom instance an interpretation fails to satisfy, if any.
#[derive(Clone, Debug)]
pub struct ModelsFailure {
    pub axiom: Term,
    pub subst: SubstPairs,
    pub valuation: Vec<Binding>,
}

#[derive(Clone, Debug)]
pub struct ModelsReport {
    pub ok: bool,
    pub checked: usize,
    pub skipped: usize,
    pub failure: Option<ModelsFailure>,
}

/// Check every axiom of the theory at every enumerated ground
/// substitution. A report with `ok` and no failure means the bounded
/// sweep found no counterexample, not that the theory is modelled.
pub fn models_bounded(
    interp: &Interpretation,
    budget: &Budget,
    thy: &Theory,
    depth: usize,
) -> Result<ModelsReport, SemError> {
    let mut checked = 0;
    let mut skipped = 0;
    for ax in &thy.axioms {
        let sat = sat_bounded(interp, budget, &thy.sig, &[], ax, depth)?;
        checked += sat.checked;
        skipped += sat.skipped;
        if let Some((subst, valuation)) = sat.failure {
            return Ok(ModelsReport {
                ok: false,
                checked,
                skipped,
                failure: Some(ModelsFailure { axiom: ax.clone(), subst, valuation }),
            });
        }
    }
    Ok(ModelsReport { ok: true, checked, skipped, failure: None })
}

#[derive(Clone, Debug)]
pub struct WitnessFailure {
    pub constant: ConstInstance,
    pub recorded: HFSet,
    pub computed: HFSet,
}

#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub ok: bool,
    pub checked: usize,
    pub skipped: usize,
    pub failure: Option<WitnessFailure>,
}

/// Every defined constant's recorded value must equal the evaluation of
/// its witness, at every enumerated ground instance the interpretation
/// materializes.
pub fn check_models_witnesses(
    interp: &Interpretation,
    budget: &Budget,
    ctxt: &Context,
    depth: usize,
) -> Result<WitnessReport, SemError> {
    let targets = enumerate_ground_types(ctxt.signature(), depth);
    let mut checked = 0;
    let mut skipped = 0;
    for upd in ctxt.updates() {
        let eqs = match upd {
            Update::ConstSpec { eqs, .. } => eqs,
            _ => continue,
        };
        for (name, witness) in eqs {
            let sch = witness
                .type_of()
                .ok_or_else(|| SemError::IllTyped(witness.to_string()))?;
            for theta in ground_substs(&sch.tyvars(), &targets) {
                let inst = ConstInstance::new(name.clone(), theta.apply(&sch));
                let recorded = match interp.gamma.get(&inst) {
                    Some(x) => x.clone(),
                    None => {
                        skipped += 1;
                        continue;
                    }
                };
                let computed =
                    termsem(interp, budget.carrier_cap, &Valuation::empty(), &theta, witness)?;
                if recorded != computed {
                    return Ok(WitnessReport {
                        ok: false,
                        checked,
                        skipped,
                        failure: Some(WitnessFailure { constant: inst, recorded, computed }),
                    });
                }
                checked += 1;
            }
        }
    }
    Ok(WitnessReport { ok: true, checked, skipped, failure: None })
}

/// Membership of a value in the carrier of a ground type, decided
/// structurally for function types so no function space is ever
/// materialized on the range side.
pub fn in_carrier(
    iv: &dyn InterpView,
    cap: usize,
    x: &HFSet,
    ty: &Type,
) -> Result<bool, SemError> {
    if ty.is_bool() {
        return Ok(HFSet::boolset().mem(x));
    }
    if let Some((d, r)) = ty.as_fun() {
        let dom = ext_delta(iv, cap, d)?;
        let mut args: Vec<HFSet> = Vec::with_capacity(x.card());
        for e in x.elems() {
            let (a, b) = match e.dest_kpair() {
                Some(p) => p,
                None => return Ok(false),
            };
            if !in_carrier(iv, cap, &b, r)? {
                return Ok(false);
            }
            args.push(a);
        }
        let covered = HFSet::from_elems(args.clone());
        return Ok(args.len() == x.card() && covered == dom && x.card() == dom.card());
    }
    match ty {
        Type::Var(_) => Err(SemError::NotGround(ty.to_string())),
        Type::App(_, _) => Ok(iv.type_den(ty)?.mem(x)),
    }
}

/// A fragment interpretation proper: carriers only for fragment types,
/// all inhabited, and every constant value inside the carrier of its
/// instance type.
pub fn check_frag_interpretation(
    interp: &Interpretation,
    sig: &Signature,
    cap: usize,
) -> Result<(), SemError> {
    for (ty, den) in &interp.delta {
        if !in_total_fragment_types(sig, ty) {
            return Err(SemError::NotFragmental(format!("{ty} is not a fragment type")));
        }
        if den.is_empty() {
            return Err(SemError::EmptyCarrier(ty.to_string()));
        }
    }
    for (ci, val) in &interp.gamma {
        if !in_total_fragment_consts(sig, ci) {
            return Err(SemError::NotFragmental(format!(
                "{}:{} is not a fragment constant",
                ci.name, ci.ty
            )));
        }
        if !in_carrier(interp, cap, val, &ci.ty)? {
            return Err(SemError::NotFragmental(format!(
                "value of {}:{} lies outside its carrier",
                ci.name, ci.ty
            )));
        }
    }
    Ok(())
}
