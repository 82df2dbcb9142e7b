//! The dependency relation induced by a context's definitions, and the
//! two global checks built on it: pairwise orthogonality and termination
//! of the substitutive closure.
//!
//! Edges are schematic: a node depends on another under every type
//! instantiation. Every edge keeps its target's type variables inside
//! its source's, so matching a concrete node against an edge source
//! determines the successor uniquely, and ground nodes only ever step to
//! ground nodes.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{
    common_instance, match_type, orthogonal_const, orthogonal_type, ConstInstance, Type,
    TypeSubst,
};
use crate::theory::{generic_tyvars, Context, Update};

pub const DEFAULT_SEARCH_BOUND: usize = 1000;

/// A symbol occurrence the dependency relation ranges over: a type, or a
/// constant at a specific (possibly schematic) type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DepNode {
    Ty(Type),
    Const(ConstInstance),
}

impl fmt::Display for DepNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepNode::Ty(ty) => write!(f, "{ty}"),
            DepNode::Const(c) => write!(f, "{}:{}", c.name, c.ty),
        }
    }
}

impl DepNode {
    pub fn is_ground(&self) -> bool {
        match self {
            DepNode::Ty(ty) => ty.is_ground(),
            DepNode::Const(c) => c.ty.is_ground(),
        }
    }

    fn ty(&self) -> &Type {
        match self {
            DepNode::Ty(ty) => ty,
            DepNode::Const(c) => &c.ty,
        }
    }

    pub fn apply_subst(&self, theta: &TypeSubst) -> DepNode {
        match self {
            DepNode::Ty(ty) => DepNode::Ty(theta.apply(ty)),
            DepNode::Const(c) => {
                DepNode::Const(ConstInstance::new(c.name.clone(), theta.apply(&c.ty)))
            }
        }
    }

    /// Match `self` as a pattern against a node, constant names on the
    /// nose and types by matching.
    pub fn matches(&self, node: &DepNode) -> Option<TypeSubst> {
        match (self, node) {
            (DepNode::Ty(p), DepNode::Ty(t)) => match_type(p, t),
            (DepNode::Const(p), DepNode::Const(t)) if p.name == t.name => {
                match_type(&p.ty, &t.ty)
            }
            _ => None,
        }
    }

    /// Rename type variables to a fixed scheme in first-occurrence
    /// order, so nodes equal up to renaming compare equal.
    pub fn canon_rename(&self) -> DepNode {
        let mut order = Vec::new();
        collect_tyvars(self.ty(), &mut order);
        let theta = TypeSubst::from_pairs(
            order
                .into_iter()
                .enumerate()
                .map(|(i, v)| (v, Type::var(format!("d{i}")))),
        );
        self.apply_subst(&theta)
    }
}

fn collect_tyvars(ty: &Type, order: &mut Vec<String>) {
    match ty {
        Type::Var(v) => {
            if !order.iter().any(|x| x == v) {
                order.push(v.clone());
            }
        }
        Type::App(_, args) => {
            for a in args {
                collect_tyvars(a, order);
            }
        }
    }
}

/// Why an edge exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeRule {
    /// A defined symbol depends on the symbols of its definition.
    Defines,
    /// A constant depends on the parts of its type.
    ConstType,
    /// An applied constructor depends on its arguments.
    TypeArg,
}

impl fmt::Display for EdgeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeRule::Defines => "defines",
            EdgeRule::ConstType => "const-type",
            EdgeRule::TypeArg => "type-arg",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DepEdge {
    pub src: DepNode,
    pub dst: DepNode,
    pub rule: EdgeRule,
}

impl fmt::Display for DepEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} [{}]", self.src, self.dst, self.rule)
    }
}

/// The schematic dependency edges of a context.
///
/// Definitions contribute an edge from each introduced symbol to every
/// non-built-in type and constant of the defining term. Every constant
/// of the signature, and every overloaded instance ever defined,
/// depends on the non-built-in parts of its type. Every constructor,
/// applied to generic arguments, depends on those arguments.
pub fn dep_edges(ctxt: &Context) -> Vec<DepEdge> {
    let mut edges = Vec::new();
    let push = |edges: &mut Vec<DepEdge>, e: DepEdge| {
        if !edges.contains(&e) {
            edges.push(e);
        }
    };

    for upd in ctxt.updates().iter().rev() {
        match upd {
            Update::TypeDefn { pred, .. } => {
                let src = match upd.introduces().into_iter().next() {
                    Some(n) => n,
                    None => continue,
                };
                for ty in pred.nonbuiltin_types() {
                    push(&mut edges, DepEdge {
                        src: src.clone(),
                        dst: DepNode::Ty(ty),
                        rule: EdgeRule::Defines,
                    });
                }
                for c in pred.nonbuiltin_consts() {
                    push(&mut edges, DepEdge {
                        src: src.clone(),
                        dst: DepNode::Const(c),
                        rule: EdgeRule::Defines,
                    });
                }
            }
            Update::ConstSpec { eqs, .. } => {
                for (name, witness) in eqs {
                    let wty = match witness.type_of() {
                        Some(ty) => ty,
                        None => continue,
                    };
                    let src = DepNode::Const(ConstInstance::new(name.clone(), wty));
                    for ty in witness.nonbuiltin_types() {
                        push(&mut edges, DepEdge {
                            src: src.clone(),
                            dst: DepNode::Ty(ty),
                            rule: EdgeRule::Defines,
                        });
                    }
                    for c in witness.nonbuiltin_consts() {
                        push(&mut edges, DepEdge {
                            src: src.clone(),
                            dst: DepNode::Const(c),
                            rule: EdgeRule::Defines,
                        });
                    }
                }
            }
            _ => {}
        }
    }

    let mut const_sources: Vec<ConstInstance> = ctxt
        .signature()
        .consts
        .iter()
        .map(|(name, ty)| ConstInstance::new(name.clone(), ty.clone()))
        .collect();
    for upd in ctxt.updates().iter().rev() {
        if let Update::ConstSpec { overload: true, eqs, .. } = upd {
            for (name, witness) in eqs {
                if let Some(ty) = witness.type_of() {
                    const_sources.push(ConstInstance::new(name.clone(), ty));
                }
            }
        }
    }
    for c in const_sources {
        for part in c.ty.nonbuiltin_types() {
            push(&mut edges, DepEdge {
                src: DepNode::Const(c.clone()),
                dst: DepNode::Ty(part),
                rule: EdgeRule::ConstType,
            });
        }
    }

    for (name, arity) in &ctxt.signature().tys {
        let args = generic_tyvars(*arity);
        let src = DepNode::Ty(Type::App(name.clone(), args.clone()));
        for a in args {
            push(&mut edges, DepEdge {
                src: src.clone(),
                dst: DepNode::Ty(a),
                rule: EdgeRule::TypeArg,
            });
        }
    }

    edges
}

/// All one-step successors of a node: for each edge whose source the
/// node instantiates, the correspondingly instantiated target.
pub fn dep_step_instances(edges: &[DepEdge], node: &DepNode) -> Vec<DepNode> {
    let mut out = Vec::new();
    for e in edges {
        if let Some(theta) = e.src.matches(node) {
            let succ = e.dst.apply_subst(&theta);
            if !out.contains(&succ) {
                out.push(succ);
            }
        }
    }
    out
}

/// A context's dependency edges, computed once and stepped many times.
#[derive(Clone, Debug)]
pub struct DepGraph {
    pub edges: Vec<DepEdge>,
}

impl DepGraph {
    pub fn of(ctxt: &Context) -> DepGraph {
        DepGraph { edges: dep_edges(ctxt) }
    }

    pub fn step(&self, node: &DepNode) -> Vec<DepNode> {
        dep_step_instances(&self.edges, node)
    }
}

/// Outcome of the bounded termination search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TerminationVerdict {
    /// Every search tree rooted at an edge source closed off.
    Terminating { explored: usize },
    /// A path whose last node instantiates an earlier one; stepping
    /// replays it, so it certifies a genuine descent loop.
    Cycle { path: Vec<DepNode> },
    /// The expansion bound ran out first.
    Unknown { bound: usize },
}

/// Search for substitutive descent loops. Roots are the edge sources;
/// expansion follows `dep_step_instances`; a successor instantiating a
/// node on its own path is a cycle; a node instantiating an already
/// expanded one is pruned as subsumed.
pub fn check_termination(ctxt: &Context, bound: usize) -> TerminationVerdict {
    let edges = dep_edges(ctxt);
    let mut roots = Vec::new();
    for e in &edges {
        if !roots.contains(&e.src) {
            roots.push(e.src.clone());
        }
    }
    let mut expanded: BTreeSet<DepNode> = BTreeSet::new();
    let mut expansions = 0usize;
    for root in roots {
        let mut stack = vec![vec![root]];
        while let Some(path) = stack.pop() {
            let node = path.last().expect("paths are nonempty");
            if expanded.iter().any(|g| g.matches(node).is_some()) {
                continue;
            }
            if expansions >= bound {
                return TerminationVerdict::Unknown { bound };
            }
            expansions += 1;
            let succs = dep_step_instances(&edges, node);
            expanded.insert(node.canon_rename());
            for succ in succs {
                if let Some(i) = path.iter().position(|anc| anc.matches(&succ).is_some()) {
                    let mut cycle = path[i..].to_vec();
                    cycle.push(succ);
                    return TerminationVerdict::Cycle { path: cycle };
                }
                let mut next = path.clone();
                next.push(succ);
                stack.push(next);
            }
        }
    }
    TerminationVerdict::Terminating { explored: expansions }
}

/// A cycle certificate replays when every step is a real dependency
/// step and the final node instantiates the first.
pub fn verify_cycle(edges: &[DepEdge], path: &[DepNode]) -> bool {
    if path.len() < 2 {
        return false;
    }
    for pair in path.windows(2) {
        if !dep_step_instances(edges, &pair[0]).contains(&pair[1]) {
            return false;
        }
    }
    path[0].matches(path.last().expect("nonempty")).is_some()
}

/// A pair of definitions with a common instance.
#[derive(Clone, Debug)]
pub struct OverlapError {
    pub a: String,
    pub b: String,
    pub witness: String,
}

impl fmt::Display for OverlapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} overlaps {} at {}", self.a, self.b, self.witness)
    }
}

/// Every pair of defined constant instances, and every pair of defined
/// types, must be orthogonal across the whole context.
pub fn context_orthogonal(ctxt: &Context) -> Result<(), OverlapError> {
    let mut consts: Vec<ConstInstance> = Vec::new();
    let mut types: Vec<Type> = Vec::new();
    for upd in ctxt.updates().iter().rev() {
        match upd {
            Update::ConstSpec { eqs, .. } => {
                for (name, witness) in eqs {
                    if let Some(ty) = witness.type_of() {
                        consts.push(ConstInstance::new(name.clone(), ty));
                    }
                }
            }
            Update::TypeDefn { .. } => {
                if let Some(DepNode::Ty(ty)) = upd.introduces().into_iter().next() {
                    types.push(ty);
                }
            }
            _ => {}
        }
    }
    for i in 0..consts.len() {
        for j in i + 1..consts.len() {
            let (a, b) = (&consts[i], &consts[j]);
            if !orthogonal_const(a, b) {
                let witness = common_instance(&a.ty, &b.ty)
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| a.ty.to_string());
                return Err(OverlapError {
                    a: format!("{}:{}", a.name, a.ty),
                    b: format!("{}:{}", b.name, b.ty),
                    witness,
                });
            }
        }
    }
    for i in 0..types.len() {
        for j in i + 1..types.len() {
            let (a, b) = (&types[i], &types[j]);
            if !orthogonal_type(a, b) {
                let witness = common_instance(a, b)
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| a.to_string());
                return Err(OverlapError {
                    a: a.to_string(),
                    b: b.to_string(),
                    witness,
                });
            }
        }
    }
    Ok(())
}
