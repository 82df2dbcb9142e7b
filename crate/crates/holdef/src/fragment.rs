//! Fragments of a signature: the total fragment of ground non-built-in
//! symbols, and the independent fragment of an update, which removes
//! everything whose dependency cone reaches an instance of a symbol the
//! update introduces.
//!
//! Fragments are membership oracles, never materialized sets: the
//! ground types of a signature are infinite. Enumerated views exist
//! only to a caller-supplied depth, for reporting and sampling.

use std::collections::BTreeSet;

use crate::deps::{DepGraph, DepNode};
use crate::syntax::{builtin_closure_member, is_instance, ConstInstance, Type, EQUAL, FUN};
use crate::theory::{Context, Signature};

/// A bounded query's answer: definite membership, definite exclusion,
/// or an exhausted search bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict3 {
    Yes,
    No,
    Unknown,
}

impl Verdict3 {
    pub fn negate(self) -> Verdict3 {
        match self {
            Verdict3::Yes => Verdict3::No,
            Verdict3::No => Verdict3::Yes,
            Verdict3::Unknown => Verdict3::Unknown,
        }
    }
}

/// Ground, non-built-in (neither `bool` nor a function type at the top)
/// and well-formed over the signature.
pub fn in_total_fragment_types(sig: &Signature, ty: &Type) -> bool {
    if !ty.is_ground() || !sig.type_ok(ty) {
        return false;
    }
    match ty {
        Type::Var(_) => false,
        Type::App(name, _) => name != crate::syntax::BOOL && name != FUN,
    }
}

/// Ground, not equality, an instance of the declared type, and of a type
/// generated by the fragment's type side under the built-in closure.
pub fn in_total_fragment_consts(sig: &Signature, c: &ConstInstance) -> bool {
    if !c.ty.is_ground() || c.name == EQUAL {
        return false;
    }
    let declared = match sig.consts.get(&c.name) {
        Some(d) => d,
        None => return false,
    };
    is_instance(declared, &c.ty)
        && builtin_closure_member(&|t| in_total_fragment_types(sig, t), &c.ty)
}

/// The independent fragment of one update: the host signature's total
/// fragment minus every symbol that reaches an instance of an apex
/// symbol through the dependency relation.
#[derive(Clone, Debug)]
pub struct FragmentSpec {
    /// The extended context the dependency relation is read from.
    pub ctxt: Context,
    /// Symbols the update introduces.
    pub apex: Vec<DepNode>,
    /// The signature before the update; its total fragment is the host.
    pub host_sig: Signature,
    pub graph: DepGraph,
}

pub const DEFAULT_FRAGMENT_BOUND: usize = 10_000;

impl FragmentSpec {
    /// The independent fragment of the newest update of `ctxt_ext`.
    /// None while the context is the bare seed.
    pub fn for_update(ctxt_ext: &Context) -> Option<FragmentSpec> {
        let parent = ctxt_ext.parent()?;
        let upd = ctxt_ext.updates().first()?;
        Some(FragmentSpec {
            apex: upd.introduces(),
            host_sig: parent.signature().clone(),
            graph: DepGraph::of(ctxt_ext),
            ctxt: ctxt_ext.clone(),
        })
    }

    /// Does some dependency path from `x` (reflexively) reach an
    /// instance of an apex symbol? Search over ground nodes, breadth
    /// first, bounded by the number of expansions.
    pub fn in_v(&self, x: &DepNode, bound: usize) -> (Verdict3, Option<Vec<DepNode>>) {
        let mut queue: Vec<Vec<DepNode>> = vec![vec![x.clone()]];
        let mut seen: BTreeSet<DepNode> = BTreeSet::new();
        let mut expansions = 0usize;
        let mut i = 0;
        while i < queue.len() {
            let path = queue[i].clone();
            i += 1;
            let node = path.last().expect("paths are nonempty");
            if self.apex.iter().any(|u| u.matches(node).is_some()) {
                return (Verdict3::Yes, Some(path));
            }
            if seen.contains(node) {
                continue;
            }
            seen.insert(node.clone());
            if expansions >= bound {
                return (Verdict3::Unknown, None);
            }
            expansions += 1;
            for succ in self.graph.step(node) {
                let mut next = path.clone();
                next.push(succ);
                queue.push(next);
            }
        }
        (Verdict3::No, None)
    }

    /// The dependency path showing why a symbol is excluded, when it is.
    pub fn witness_path(&self, x: &DepNode, bound: usize) -> Option<Vec<DepNode>> {
        self.in_v(x, bound).1
    }

    pub fn in_indep_frag_types(&self, ty: &Type, bound: usize) -> Verdict3 {
        if !in_total_fragment_types(&self.host_sig, ty) {
            return Verdict3::No;
        }
        self.in_v(&DepNode::Ty(ty.clone()), bound).0.negate()
    }

    pub fn in_indep_frag_consts(&self, c: &ConstInstance, bound: usize) -> Verdict3 {
        if !in_total_fragment_consts(&self.host_sig, c) {
            return Verdict3::No;
        }
        self.in_v(&DepNode::Const(c.clone()), bound).0.negate()
    }

    /// Membership of a ground type in the built-in closure of the
    /// fragment's type side: the query `ty ∈ types_of_frag`.
    pub fn closure_in_indep_types(&self, ty: &Type, bound: usize) -> Verdict3 {
        match ty {
            Type::App(name, args) if name == crate::syntax::BOOL && args.is_empty() => {
                Verdict3::Yes
            }
            Type::App(name, args) if name == FUN && args.len() == 2 => {
                let d = self.closure_in_indep_types(&args[0], bound);
                let r = self.closure_in_indep_types(&args[1], bound);
                match (d, r) {
                    (Verdict3::No, _) | (_, Verdict3::No) => Verdict3::No,
                    (Verdict3::Unknown, _) | (_, Verdict3::Unknown) => Verdict3::Unknown,
                    _ => Verdict3::Yes,
                }
            }
            _ => self.in_indep_frag_types(ty, bound),
        }
    }
}

/// Why a sampled constant failed the signature-fragment check.
#[derive(Clone, Debug)]
pub enum FragmentCheckError {
    /// The constant's type is not generated by the fragment's types;
    /// indicates an implementation bug, never a property of the theory.
    NotInClosure { constant: ConstInstance },
    Unknown { constant: ConstInstance },
}

impl std::fmt::Display for FragmentCheckError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FragmentCheckError::NotInClosure { constant } => {
                write!(f, "{}:{} has a type outside the fragment closure", constant.name, constant.ty)
            }
            FragmentCheckError::Unknown { constant } => {
                write!(f, "{}:{} could not be decided within the bound", constant.name, constant.ty)
            }
        }
    }
}

/// The executable content of the fragment-closure theorem: every
/// fragment constant's type is generated by the fragment's type side.
/// Sampled constants must be fragment members.
pub fn check_is_sig_fragment(
    spec: &FragmentSpec,
    sample: &[ConstInstance],
    bound: usize,
) -> Result<(), FragmentCheckError> {
    for c in sample {
        match spec.closure_in_indep_types(&c.ty, bound) {
            Verdict3::Yes => {}
            Verdict3::No => {
                return Err(FragmentCheckError::NotInClosure { constant: c.clone() })
            }
            Verdict3::Unknown => {
                return Err(FragmentCheckError::Unknown { constant: c.clone() })
            }
        }
    }
    Ok(())
}

/// All ground well-formed types over the signature with construction
/// depth at most `depth`, sorted and duplicate-free.
pub fn enumerate_ground_types(sig: &Signature, depth: usize) -> Vec<Type> {
    let mut level: Vec<Type> = Vec::new();
    for _ in 0..depth {
        let mut next = level.clone();
        for (name, arity) in &sig.tys {
            let mut stack: Vec<Vec<Type>> = vec![vec![]];
            for _ in 0..*arity {
                let mut grown = Vec::new();
                for partial in &stack {
                    for arg in &level {
                        let mut p = partial.clone();
                        p.push(arg.clone());
                        grown.push(p);
                    }
                }
                stack = grown;
            }
            for args in stack {
                let ty = Type::App(name.clone(), args);
                if ty.depth() <= depth && !next.contains(&ty) {
                    next.push(ty);
                }
            }
        }
        if next.len() == level.len() {
            break;
        }
        level = next;
    }
    level.sort();
    level
}

/// All ground instances of the signature's constants whose type
/// substitution targets come from `enumerate_ground_types`.
pub fn enumerate_ground_consts(sig: &Signature, depth: usize) -> Vec<ConstInstance> {
    let targets = enumerate_ground_types(sig, depth);
    let mut out = Vec::new();
    for (name, sch) in &sig.consts {
        for theta in ground_substs(&sch.tyvars(), &targets) {
            let inst = ConstInstance::new(name.clone(), theta.apply(sch));
            if !out.contains(&inst) {
                out.push(inst);
            }
        }
    }
    out.sort();
    out
}

/// Every assignment of the given type variables to the target types,
/// as ground substitutions (unlisted variables default to Bool).
pub fn ground_substs(vars: &BTreeSet<String>, targets: &[Type]) -> Vec<crate::syntax::TypeSubst> {
    let vars: Vec<&String> = vars.iter().collect();
    let mut out = vec![Vec::new()];
    for v in &vars {
        let mut grown = Vec::new();
        for partial in &out {
            for t in targets {
                let mut p: Vec<(String, Type)> = partial.clone();
                p.push((v.to_string(), t.clone()));
                grown.push(p);
            }
        }
        out = grown;
    }
    out.into_iter().map(crate::syntax::TypeSubst::ground).collect()
}
