//! Types and terms of the object logic, plus the substitution, matching
//! and unification machinery everything else builds on.
//!
//! The logic is simply typed higher-order logic. Three symbols are built
//! in: the nullary type `bool`, the binary type constructor `fun`, and
//! the polymorphic equality constant `=` at type `a -> a -> bool`. Every
//! other symbol has to be introduced by a theory context.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub const BOOL: &str = "bool";
pub const FUN: &str = "fun";
pub const EQUAL: &str = "=";

/// A type: a variable or an applied constructor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Var(String),
    App(String, Vec<Type>),
}

impl Type {
    pub fn var(name: impl Into<String>) -> Type {
        Type::Var(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Type>) -> Type {
        Type::App(name.into(), args)
    }

    pub fn bool_ty() -> Type {
        Type::App(BOOL.to_string(), vec![])
    }

    pub fn fun(dom: Type, rng: Type) -> Type {
        Type::App(FUN.to_string(), vec![dom, rng])
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, Type::App(name, args) if name == BOOL && args.is_empty())
    }

    /// Domain and range, if this is a (well-formed) function type.
    pub fn as_fun(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::App(name, args) if name == FUN && args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Type::Var(_) => false,
            Type::App(_, args) => args.iter().all(Type::is_ground),
        }
    }

    pub fn tyvars(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_tyvars(&mut acc);
        acc
    }

    fn collect_tyvars(&self, acc: &mut BTreeSet<String>) {
        match self {
            Type::Var(name) => {
                acc.insert(name.clone());
            }
            Type::App(_, args) => {
                for a in args {
                    a.collect_tyvars(acc);
                }
            }
        }
    }

    /// Constructor nesting depth; a variable or nullary application is 1.
    pub fn depth(&self) -> usize {
        match self {
            Type::Var(_) => 1,
            Type::App(_, args) => 1 + args.iter().map(Type::depth).max().unwrap_or(0),
        }
    }

    /// Every type reachable by walking into constructor arguments,
    /// including the type itself.
    pub fn subtypes(&self) -> Vec<Type> {
        let mut acc = vec![self.clone()];
        if let Type::App(_, args) = self {
            for a in args {
                acc.extend(a.subtypes());
            }
        }
        acc
    }

    /// The outermost non-built-in types, left to right. `bool` contributes
    /// nothing, a function type contributes the parts of its domain and
    /// range, and anything else contributes itself.
    pub fn nonbuiltin_types(&self) -> Vec<Type> {
        if self.is_bool() {
            return vec![];
        }
        if let Some((dom, rng)) = self.as_fun() {
            let mut acc = dom.nonbuiltin_types();
            acc.extend(rng.nonbuiltin_types());
            return acc;
        }
        vec![self.clone()]
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Var(name) => write!(f, "'{name}"),
            Type::App(name, args) if args.is_empty() => write!(f, "{name}"),
            Type::App(name, args) if name == FUN && args.len() == 2 => {
                write!(f, "({} -> {})", args[0], args[1])
            }
            Type::App(name, args) => {
                write!(f, "({name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A constant at one specific (possibly schematic) type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstInstance {
    pub name: String,
    pub ty: Type,
}

impl ConstInstance {
    pub fn new(name: impl Into<String>, ty: Type) -> ConstInstance {
        ConstInstance { name: name.into(), ty }
    }
}

impl fmt::Display for ConstInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.ty)
    }
}

/// A term. Binders of `Abs` must be `Var`; everything here treats a
/// non-variable binder as ill-formed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String, Type),
    Const(String, Type),
    Comb(Box<Term>, Box<Term>),
    Abs(Box<Term>, Box<Term>),
}

/// The equality constant at argument type `ty`.
pub fn equal_const(ty: Type) -> Term {
    let t = Type::fun(ty.clone(), Type::fun(ty, Type::bool_ty()));
    Term::Const(EQUAL.to_string(), t)
}

/// Is this the equality constant at a well-shaped instance type?
pub fn is_equal_instance(name: &str, ty: &Type) -> bool {
    if name != EQUAL {
        return false;
    }
    match ty.as_fun() {
        Some((a, rest)) => match rest.as_fun() {
            Some((b, r)) => a == b && r.is_bool(),
            None => false,
        },
        None => false,
    }
}

/// `l === r`, or None when the sides' types disagree or are missing.
pub fn mk_eq(l: Term, r: Term) -> Option<Term> {
    let lt = l.type_of()?;
    let rt = r.type_of()?;
    if lt != rt {
        return None;
    }
    Some(Term::comb(Term::comb(equal_const(lt), l), r))
}

/// The two sides of an equation built by `mk_eq`.
pub fn dest_eq(t: &Term) -> Option<(&Term, &Term)> {
    if let Term::Comb(lhs, r) = t {
        if let Term::Comb(eq, l) = lhs.as_ref() {
            if let Term::Const(name, ty) = eq.as_ref() {
                if is_equal_instance(name, ty) {
                    return Some((l, r));
                }
            }
        }
    }
    None
}

impl Term {
    pub fn var(name: impl Into<String>, ty: Type) -> Term {
        Term::Var(name.into(), ty)
    }

    pub fn constant(name: impl Into<String>, ty: Type) -> Term {
        Term::Const(name.into(), ty)
    }

    pub fn comb(f: Term, x: Term) -> Term {
        Term::Comb(Box::new(f), Box::new(x))
    }

    pub fn abs(name: impl Into<String>, ty: Type, body: Term) -> Term {
        Term::Abs(Box::new(Term::Var(name.into(), ty)), Box::new(body))
    }

    /// Every `Abs` binder is a variable.
    pub fn well_formed(&self) -> bool {
        match self {
            Term::Var(..) | Term::Const(..) => true,
            Term::Comb(f, x) => f.well_formed() && x.well_formed(),
            Term::Abs(v, b) => matches!(v.as_ref(), Term::Var(..)) && b.well_formed(),
        }
    }

    pub fn type_of(&self) -> Option<Type> {
        match self {
            Term::Var(_, ty) | Term::Const(_, ty) => Some(ty.clone()),
            Term::Comb(f, x) => {
                let ft = f.type_of()?;
                let (dom, rng) = ft.as_fun()?;
                if &x.type_of()? == dom {
                    Some(rng.clone())
                } else {
                    None
                }
            }
            Term::Abs(v, b) => match v.as_ref() {
                Term::Var(_, vty) => Some(Type::fun(vty.clone(), b.type_of()?)),
                _ => None,
            },
        }
    }

    pub fn welltyped(&self) -> bool {
        self.type_of().is_some()
    }

    pub fn has_type(&self, ty: &Type) -> bool {
        self.type_of().as_ref() == Some(ty)
    }

    /// Free variables, as (name, type) pairs. Variables with the same
    /// name at different types are distinct.
    pub fn free_vars(&self) -> BTreeSet<(String, Type)> {
        let mut acc = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut acc);
        acc
    }

    fn collect_free(
        &self,
        bound: &mut Vec<(String, Type)>,
        acc: &mut BTreeSet<(String, Type)>,
    ) {
        match self {
            Term::Var(name, ty) => {
                let key = (name.clone(), ty.clone());
                if !bound.contains(&key) {
                    acc.insert(key);
                }
            }
            Term::Const(..) => {}
            Term::Comb(f, x) => {
                f.collect_free(bound, acc);
                x.collect_free(bound, acc);
            }
            Term::Abs(v, b) => {
                if let Term::Var(name, ty) = v.as_ref() {
                    bound.push((name.clone(), ty.clone()));
                    b.collect_free(bound, acc);
                    bound.pop();
                } else {
                    b.collect_free(bound, acc);
                }
            }
        }
    }

    pub fn var_free_in(&self, name: &str, ty: &Type) -> bool {
        self.free_vars().contains(&(name.to_string(), ty.clone()))
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_var_names(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_var_names(&mut acc);
        acc
    }

    fn collect_var_names(&self, acc: &mut BTreeSet<String>) {
        match self {
            Term::Var(name, _) => {
                acc.insert(name.clone());
            }
            Term::Const(..) => {}
            Term::Comb(f, x) => {
                f.collect_var_names(acc);
                x.collect_var_names(acc);
            }
            Term::Abs(v, b) => {
                v.collect_var_names(acc);
                b.collect_var_names(acc);
            }
        }
    }

    /// Type variables occurring anywhere in the term's types.
    pub fn tvars(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_tvars(&mut acc);
        acc
    }

    fn collect_tvars(&self, acc: &mut BTreeSet<String>) {
        match self {
            Term::Var(_, ty) | Term::Const(_, ty) => ty.collect_tyvars(acc),
            Term::Comb(f, x) => {
                f.collect_tvars(acc);
                x.collect_tvars(acc);
            }
            Term::Abs(v, b) => {
                v.collect_tvars(acc);
                b.collect_tvars(acc);
            }
        }
    }

    /// Outermost non-built-in types of every variable, constant and
    /// binder in the term, left to right.
    pub fn nonbuiltin_types(&self) -> Vec<Type> {
        match self {
            Term::Var(_, ty) | Term::Const(_, ty) => ty.nonbuiltin_types(),
            Term::Comb(f, x) => {
                let mut acc = f.nonbuiltin_types();
                acc.extend(x.nonbuiltin_types());
                acc
            }
            Term::Abs(v, b) => {
                let mut acc = v.nonbuiltin_types();
                acc.extend(b.nonbuiltin_types());
                acc
            }
        }
    }

    /// Non-built-in constant instances of the term, left to right.
    /// Equality instances and variables contribute nothing; abstraction
    /// binders are skipped.
    pub fn nonbuiltin_consts(&self) -> Vec<ConstInstance> {
        match self {
            Term::Var(..) => vec![],
            Term::Const(name, ty) => {
                if is_equal_instance(name, ty) {
                    vec![]
                } else {
                    vec![ConstInstance::new(name.clone(), ty.clone())]
                }
            }
            Term::Comb(f, x) => {
                let mut acc = f.nonbuiltin_consts();
                acc.extend(x.nonbuiltin_consts());
                acc
            }
            Term::Abs(_, b) => b.nonbuiltin_consts(),
        }
    }

    /// Alpha-equivalence: equality up to consistent renaming of bound
    /// variables. Binder types must agree.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha_walk(self, other, &mut Vec::new())
    }

    /// Alpha-canonical form: binders renamed positionally, free
    /// variables untouched. Two terms are alpha-equivalent exactly when
    /// their canonical forms are equal.
    pub fn canon(&self) -> Term {
        let free: BTreeSet<String> =
            self.free_vars().into_iter().map(|(name, _)| name).collect();
        let mut next = 0usize;
        canon_walk(self, &mut Vec::new(), &free, &mut next)
    }
}

type VarPair = ((String, Type), (String, Type));

fn alpha_walk(a: &Term, b: &Term, env: &mut Vec<VarPair>) -> bool {
    match (a, b) {
        (Term::Var(an, at), Term::Var(bn, bt)) => {
            let ka = (an.clone(), at.clone());
            let kb = (bn.clone(), bt.clone());
            // Innermost binding wins on either side.
            for (ba, bb) in env.iter().rev() {
                let hit_a = *ba == ka;
                let hit_b = *bb == kb;
                if hit_a || hit_b {
                    return hit_a && hit_b;
                }
            }
            ka == kb
        }
        (Term::Const(an, at), Term::Const(bn, bt)) => an == bn && at == bt,
        (Term::Comb(af, ax), Term::Comb(bf, bx)) => {
            alpha_walk(af, bf, env) && alpha_walk(ax, bx, env)
        }
        (Term::Abs(av, ab), Term::Abs(bv, bb)) => match (av.as_ref(), bv.as_ref()) {
            (Term::Var(an, at), Term::Var(bn, bt)) => {
                if at != bt {
                    return false;
                }
                env.push(((an.clone(), at.clone()), (bn.clone(), bt.clone())));
                let ok = alpha_walk(ab, bb, env);
                env.pop();
                ok
            }
            _ => false,
        },
        _ => false,
    }
}

fn canon_walk(
    t: &Term,
    env: &mut Vec<((String, Type), String)>,
    free: &BTreeSet<String>,
    next: &mut usize,
) -> Term {
    match t {
        Term::Var(name, ty) => {
            let key = (name.clone(), ty.clone());
            for (k, fresh) in env.iter().rev() {
                if *k == key {
                    return Term::Var(fresh.clone(), ty.clone());
                }
            }
            t.clone()
        }
        Term::Const(..) => t.clone(),
        Term::Comb(f, x) => Term::comb(
            canon_walk(f, env, free, next),
            canon_walk(x, env, free, next),
        ),
        Term::Abs(v, b) => match v.as_ref() {
            Term::Var(name, ty) => {
                let fresh = loop {
                    let candidate = format!("%{next}");
                    *next += 1;
                    if !free.contains(&candidate) {
                        break candidate;
                    }
                };
                env.push(((name.clone(), ty.clone()), fresh.clone()));
                let body = canon_walk(b, env, free, next);
                env.pop();
                Term::abs(fresh, ty.clone(), body)
            }
            _ => Term::Abs(
                Box::new(v.as_ref().clone()),
                Box::new(canon_walk(b, env, free, next)),
            ),
        },
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name, ty) => write!(f, "{name}:{ty}"),
            Term::Const(name, _) => write!(f, "{name}"),
            Term::Comb(g, x) => {
                if let Some((l, r)) = dest_eq(self) {
                    return write!(f, "({l} = {r})");
                }
                write!(f, "({g} {x})")
            }
            Term::Abs(v, b) => write!(f, "(\\{v}. {b})"),
        }
    }
}

/// A finite map on type variables, the identity elsewhere unless a
/// default has been set. Ground substitutions set the default so that
/// unmentioned variables still land on a ground type.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeSubst {
    map: BTreeMap<String, Type>,
    default: Option<Type>,
}

impl TypeSubst {
    pub fn new() -> TypeSubst {
        TypeSubst::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Type)>) -> TypeSubst {
        TypeSubst { map: pairs.into_iter().collect(), default: None }
    }

    /// A substitution that sends every unmentioned variable to `bool`.
    pub fn ground(pairs: impl IntoIterator<Item = (String, Type)>) -> TypeSubst {
        TypeSubst {
            map: pairs.into_iter().collect(),
            default: Some(Type::bool_ty()),
        }
    }

    pub fn bind(&mut self, name: impl Into<String>, ty: Type) {
        self.map.insert(name.into(), ty);
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.map.get(name)
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&String, &Type)> {
        self.map.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.default.is_none()
            && self.map.iter().all(|(k, v)| matches!(v, Type::Var(n) if n == k))
    }

    pub fn apply(&self, ty: &Type) -> Type {
        match ty {
            Type::Var(name) => match self.map.get(name) {
                Some(t) => t.clone(),
                None => match &self.default {
                    Some(d) => d.clone(),
                    None => ty.clone(),
                },
            },
            Type::App(name, args) => {
                Type::App(name.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    /// Structural application to a term: every type inside is
    /// instantiated, variable and constant names are untouched. Not
    /// capture-avoiding; use `inst_term` where binders may collide.
    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(name, ty) => Term::Var(name.clone(), self.apply(ty)),
            Term::Const(name, ty) => Term::Const(name.clone(), self.apply(ty)),
            Term::Comb(f, x) => Term::comb(self.apply_term(f), self.apply_term(x)),
            Term::Abs(v, b) => Term::Abs(
                Box::new(self.apply_term(v)),
                Box::new(self.apply_term(b)),
            ),
        }
    }
}

/// First-order matching: the unique substitution on `pattern`'s
/// variables sending `pattern` to `target`, if one exists.
pub fn match_type(pattern: &Type, target: &Type) -> Option<TypeSubst> {
    let mut subst = TypeSubst::new();
    if match_into(pattern, target, &mut subst) {
        Some(subst)
    } else {
        None
    }
}

fn match_into(pattern: &Type, target: &Type, subst: &mut TypeSubst) -> bool {
    match pattern {
        Type::Var(name) => match subst.lookup(name) {
            Some(bound) => bound == target,
            None => {
                subst.bind(name.clone(), target.clone());
                true
            }
        },
        Type::App(name, args) => match target {
            Type::App(tname, targs) if tname == name && targs.len() == args.len() => {
                args.iter().zip(targs).all(|(p, t)| match_into(p, t, subst))
            }
            _ => false,
        },
    }
}

/// Is `target` an instance of `pattern`?
pub fn is_instance(pattern: &Type, target: &Type) -> bool {
    match_type(pattern, target).is_some()
}

/// Unification up to renaming: `t2`'s variables are first renamed apart
/// from `t1`'s, then the most general unifier of the renamed pair is
/// computed with an occurs check. A result means the two types have a
/// common instance, recoverable by applying the substitution to `t1`.
pub fn unify_types(t1: &Type, t2: &Type) -> Option<TypeSubst> {
    let taken: BTreeSet<String> = t1.tyvars().union(&t2.tyvars()).cloned().collect();
    let mut renaming = TypeSubst::new();
    for v in t2.tyvars() {
        if t1.tyvars().contains(&v) {
            let mut fresh = format!("{v}'");
            while taken.contains(&fresh) {
                fresh.push('\'');
            }
            renaming.bind(v, Type::Var(fresh));
        }
    }
    let t2r = renaming.apply(t2);
    let mut subst = TypeSubst::new();
    if unify_into(t1, &t2r, &mut subst) {
        Some(subst)
    } else {
        None
    }
}

fn resolve(ty: &Type, subst: &TypeSubst) -> Type {
    // Chase variable bindings to a head that is not itself bound.
    let mut current = ty.clone();
    while let Type::Var(name) = &current {
        match subst.lookup(name) {
            Some(next) => current = next.clone(),
            None => break,
        }
    }
    current
}

fn occurs(name: &str, ty: &Type, subst: &TypeSubst) -> bool {
    match resolve(ty, subst) {
        Type::Var(n) => n == name,
        Type::App(_, args) => args.iter().any(|a| occurs(name, a, subst)),
    }
}

fn unify_into(t1: &Type, t2: &Type, subst: &mut TypeSubst) -> bool {
    let a = resolve(t1, subst);
    let b = resolve(t2, subst);
    match (&a, &b) {
        (Type::Var(n), Type::Var(m)) if n == m => true,
        (Type::Var(n), other) | (other, Type::Var(n)) => {
            if occurs(n, other, subst) {
                return false;
            }
            subst.bind(n.clone(), other.clone());
            true
        }
        (Type::App(n1, a1), Type::App(n2, a2)) => {
            n1 == n2
                && a1.len() == a2.len()
                && a1.iter().zip(a2).all(|(x, y)| unify_into(x, y, subst))
        }
    }
}

/// A most general common instance of the two types, if they share one.
pub fn common_instance(t1: &Type, t2: &Type) -> Option<Type> {
    let subst = unify_types(t1, t2)?;
    // The unifier may bind through chains; normalize by applying until
    // fixpoint (bounded by the number of bindings).
    let mut out = subst.apply(t1);
    for _ in 0..subst.map.len() {
        let next = subst.apply(&out);
        if next == out {
            break;
        }
        out = next;
    }
    Some(out)
}

/// Orthogonality: no common instance.
pub fn orthogonal_type(t1: &Type, t2: &Type) -> bool {
    t1 != t2 && common_instance(t1, t2).is_none()
}

/// Constants are orthogonal when their names differ or their types are.
pub fn orthogonal_const(c1: &ConstInstance, c2: &ConstInstance) -> bool {
    c1.name != c2.name || orthogonal_type(&c1.ty, &c2.ty)
}

/// Membership in the closure of `base` under `bool` and function types.
pub fn builtin_closure_member(base: &dyn Fn(&Type) -> bool, ty: &Type) -> bool {
    if base(ty) || ty.is_bool() {
        return true;
    }
    match ty.as_fun() {
        Some((dom, rng)) => {
            builtin_closure_member(base, dom) && builtin_closure_member(base, rng)
        }
        None => false,
    }
}

/// A variable name based on `base` that avoids everything in `taken`.
pub fn variant(taken: &BTreeSet<String>, base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding substitution of terms for free variables. Pairs map
/// a variable (name, type) to its replacement; binders are renamed when
/// a replacement would otherwise be captured.
pub fn vsubst(pairs: &[((String, Type), Term)], t: &Term) -> Term {
    if pairs.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(name, ty) => {
            for ((n, vt), rep) in pairs {
                if n == name && vt == ty {
                    return rep.clone();
                }
            }
            t.clone()
        }
        Term::Const(..) => t.clone(),
        Term::Comb(f, x) => Term::comb(vsubst(pairs, f), vsubst(pairs, x)),
        Term::Abs(v, b) => {
            let (bname, bty) = match v.as_ref() {
                Term::Var(n, ty) => (n.clone(), ty.clone()),
                _ => return Term::Abs(v.clone(), Box::new(vsubst(pairs, b))),
            };
            let live: Vec<((String, Type), Term)> = pairs
                .iter()
                .filter(|((n, ty), _)| !(*n == bname && *ty == bty))
                .filter(|((n, ty), _)| b.var_free_in(n, ty))
                .cloned()
                .collect();
            if live.is_empty() {
                return Term::Abs(v.clone(), b.clone());
            }
            let captures = live
                .iter()
                .any(|(_, rep)| rep.var_free_in(&bname, &bty));
            if captures {
                let mut taken = b.all_var_names();
                for (_, rep) in &live {
                    taken.extend(rep.all_var_names());
                }
                let fresh = variant(&taken, &bname);
                let renamed = vsubst(
                    &[((bname.clone(), bty.clone()), Term::Var(fresh.clone(), bty.clone()))],
                    b,
                );
                Term::abs(fresh, bty, vsubst(&live, &renamed))
            } else {
                Term::Abs(v.clone(), Box::new(vsubst(&live, b)))
            }
        }
    }
}

/// Capture-avoiding type instantiation. Instantiating binder types can
/// make a bound variable collide with a distinct free variable that
/// instantiates to the same (name, type); such binders are renamed.
pub fn inst_term(subst: &TypeSubst, t: &Term) -> Term {
    match t {
        Term::Var(name, ty) => Term::Var(name.clone(), subst.apply(ty)),
        Term::Const(name, ty) => Term::Const(name.clone(), subst.apply(ty)),
        Term::Comb(f, x) => Term::comb(inst_term(subst, f), inst_term(subst, x)),
        Term::Abs(v, b) => {
            let (bname, bty) = match v.as_ref() {
                Term::Var(n, ty) => (n.clone(), ty.clone()),
                _ => {
                    return Term::Abs(
                        Box::new(inst_term(subst, v)),
                        Box::new(inst_term(subst, b)),
                    )
                }
            };
            let new_bty = subst.apply(&bty);
            let clash = b.free_vars().into_iter().any(|(n, ty)| {
                !(n == bname && ty == bty) && n == bname && subst.apply(&ty) == new_bty
            });
            if clash {
                let taken = b.all_var_names();
                let fresh = variant(&taken, &bname);
                let renamed = vsubst(
                    &[((bname.clone(), bty.clone()), Term::Var(fresh.clone(), bty.clone()))],
                    b,
                );
                Term::abs(fresh, new_bty, inst_term(subst, &renamed))
            } else {
                Term::abs(bname, new_bty, inst_term(subst, b))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn a() -> Type {
        Type::var("a")
    }

    fn b() -> Type {
        Type::var("b")
    }

    fn list(ty: Type) -> Type {
        Type::app("list", vec![ty])
    }

    #[test]
    fn apply_subst_on_function_type() {
        let subst = TypeSubst::from_pairs([("a".to_string(), Type::bool_ty())]);
        let ty = Type::fun(a(), b());
        assert_eq!(subst.apply(&ty), Type::fun(Type::bool_ty(), b()));
    }

    #[test]
    fn ground_subst_defaults_unmapped_variables() {
        let subst = TypeSubst::ground([("a".to_string(), list(Type::bool_ty()))]);
        assert_eq!(subst.apply(&b()), Type::bool_ty());
        assert_eq!(subst.apply(&a()), list(Type::bool_ty()));
    }

    // Matching oracle: any match must send pattern variables to subtypes
    // of the target, so enumerating those candidates and re-applying is a
    // complete independent check.
    fn match_oracle(pattern: &Type, target: &Type) -> Option<TypeSubst> {
        let vars: Vec<String> = pattern.tyvars().into_iter().collect();
        let candidates = target.subtypes();
        let mut picks = vec![0usize; vars.len()];
        loop {
            let subst = TypeSubst::from_pairs(
                vars.iter()
                    .cloned()
                    .zip(picks.iter().map(|&i| candidates[i].clone())),
            );
            if subst.apply(pattern) == *target {
                return Some(subst);
            }
            let mut pos = 0;
            loop {
                if pos == vars.len() {
                    return None;
                }
                picks[pos] += 1;
                if picks[pos] < candidates.len() {
                    break;
                }
                picks[pos] = 0;
                pos += 1;
            }
            if vars.is_empty() {
                return None;
            }
        }
    }

    #[test]
    fn match_shared_variable_conflict() {
        // a -> a cannot match bool -> (list bool).
        let pattern = Type::fun(a(), a());
        let target = Type::fun(Type::bool_ty(), list(Type::bool_ty()));
        assert!(match_type(&pattern, &target).is_none());
        assert!(match_oracle(&pattern, &target).is_none());
    }

    #[test]
    fn match_agrees_with_enumeration_oracle() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..300 {
            let pattern = random_type(&mut rng, 3, true);
            let target = random_type(&mut rng, 3, false);
            let fast = match_type(&pattern, &target);
            let slow = match_oracle(&pattern, &target);
            assert_eq!(fast.is_some(), slow.is_some(), "{pattern} vs {target}");
            if let Some(s) = fast {
                assert_eq!(s.apply(&pattern), target);
            }
        }
    }

    fn random_type(rng: &mut StdRng, depth: usize, with_vars: bool) -> Type {
        if depth == 1 {
            return match rng.gen_range(0..3) {
                0 if with_vars => a(),
                1 if with_vars => b(),
                _ => Type::bool_ty(),
            };
        }
        match rng.gen_range(0..4) {
            0 => random_type(rng, 1, with_vars),
            1 => list(random_type(rng, depth - 1, with_vars)),
            _ => Type::fun(
                random_type(rng, depth - 1, with_vars),
                random_type(rng, depth - 1, with_vars),
            ),
        }
    }

    // Unification oracle: two types share an instance exactly when their
    // ground instance sets intersect; at small depth over a small
    // signature that is finitely checkable.
    fn ground_instances(ty: &Type, depth: usize) -> BTreeSet<Type> {
        let mut grounds = vec![Type::bool_ty()];
        for d in 2..=depth {
            let prev: Vec<Type> = grounds.clone();
            for x in prev.iter().filter(|t| t.depth() < d) {
                grounds.push(list(x.clone()));
                for y in prev.iter().filter(|t| t.depth() < d) {
                    grounds.push(Type::fun(x.clone(), y.clone()));
                }
            }
            grounds.sort();
            grounds.dedup();
        }
        let vars: Vec<String> = ty.tyvars().into_iter().collect();
        let mut out = BTreeSet::new();
        let mut picks = vec![0usize; vars.len()];
        loop {
            let subst = TypeSubst::from_pairs(
                vars.iter()
                    .cloned()
                    .zip(picks.iter().map(|&i| grounds[i].clone())),
            );
            let inst = subst.apply(ty);
            if inst.is_ground() {
                out.insert(inst);
            }
            let mut pos = 0;
            loop {
                if pos == vars.len() {
                    return out;
                }
                picks[pos] += 1;
                if picks[pos] < grounds.len() {
                    break;
                }
                picks[pos] = 0;
                pos += 1;
            }
            if vars.is_empty() {
                return out;
            }
        }
    }

    #[test]
    fn unify_finds_shared_instance_of_crossed_functions() {
        // 'a -> bool and bool -> 'b overlap at bool -> bool.
        let t1 = Type::fun(a(), Type::bool_ty());
        let t2 = Type::fun(Type::bool_ty(), b());
        let witness = common_instance(&t1, &t2).expect("unifiable");
        assert_eq!(witness, Type::fun(Type::bool_ty(), Type::bool_ty()));
    }

    #[test]
    fn unify_same_variable_both_sides() {
        assert!(unify_types(&a(), &Type::bool_ty()).is_some());
        // a and (list a) only overlap through renaming; a' := list a works.
        assert!(unify_types(&a(), &list(a())).is_some());
        // But a -> a and a -> (list a) share no instance: occurs check.
        let t1 = Type::fun(a(), a());
        let t2 = Type::fun(a(), list(a()));
        assert!(unify_types(&t1, &t2).is_none());
    }

    #[test]
    fn unify_agrees_with_ground_intersection_oracle() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..200 {
            let t1 = random_type(&mut rng, 2, true);
            let t2 = random_type(&mut rng, 2, true);
            let unifiable = unify_types(&t1, &t2).is_some();
            let g1 = ground_instances(&t1, 3);
            let g2 = ground_instances(&t2, 3);
            let overlap = g1.intersection(&g2).next().is_some();
            if overlap {
                assert!(unifiable, "{t1} and {t2} overlap but did not unify");
            }
            if !unifiable {
                assert!(!overlap, "{t1} and {t2} unified but depth-3 grounds agree");
            }
        }
    }

    #[test]
    fn orthogonality_of_list_instances() {
        // bool list and (bool -> bool) list have no common instance.
        let t1 = list(Type::bool_ty());
        let t2 = list(Type::fun(Type::bool_ty(), Type::bool_ty()));
        assert!(orthogonal_type(&t1, &t2));
        // 'a list overlaps both.
        assert!(!orthogonal_type(&list(a()), &t1));
        let c1 = ConstInstance::new("leq", t1);
        let c2 = ConstInstance::new("leq", t2);
        assert!(orthogonal_const(&c1, &c2));
        let d = ConstInstance::new("other", list(Type::bool_ty()));
        assert!(orthogonal_const(&c1, &d));
    }

    #[test]
    fn nonbuiltin_types_of_map_signature() {
        // ('a -> bool) -> 'a list -> bool list
        let ty = Type::fun(
            Type::fun(a(), Type::bool_ty()),
            Type::fun(list(a()), list(Type::bool_ty())),
        );
        assert_eq!(
            ty.nonbuiltin_types(),
            vec![a(), list(a()), list(Type::bool_ty())]
        );
    }

    #[test]
    fn nonbuiltin_extraction_does_not_commute_with_substitution() {
        // Instantiating first can erase entries: with a := bool -> bool,
        // the parts of the instance differ from the instances of the parts.
        let ty = a();
        let subst =
            TypeSubst::from_pairs([(
                "a".to_string(),
                Type::fun(Type::bool_ty(), Type::bool_ty()),
            )]);
        let parts_then_subst: Vec<Type> =
            ty.nonbuiltin_types().iter().map(|t| subst.apply(t)).collect();
        let subst_then_parts = subst.apply(&ty).nonbuiltin_types();
        assert_eq!(parts_then_subst, vec![Type::fun(Type::bool_ty(), Type::bool_ty())]);
        assert_eq!(subst_then_parts, Vec::<Type>::new());
        assert_ne!(parts_then_subst, subst_then_parts);
    }

    // Closure oracle: saturate bottom-up over the subtype universe
    // instead of recursive descent.
    fn closure_oracle(base: &BTreeSet<Type>, ty: &Type) -> bool {
        let mut universe: BTreeSet<Type> = ty.subtypes().into_iter().collect();
        for t in base {
            universe.extend(t.subtypes());
        }
        universe.insert(Type::bool_ty());
        let mut members: BTreeSet<Type> = base.clone();
        members.insert(Type::bool_ty());
        loop {
            let mut grew = false;
            for t in &universe {
                if members.contains(t) {
                    continue;
                }
                if let Some((dom, rng)) = t.as_fun() {
                    if members.contains(dom) && members.contains(rng) {
                        members.insert(t.clone());
                        grew = true;
                    }
                }
            }
            if !grew {
                return members.contains(ty);
            }
        }
    }

    #[test]
    fn every_type_is_in_the_closure_of_its_nonbuiltin_parts() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..500 {
            let ty = random_type(&mut rng, 4, true);
            let base: BTreeSet<Type> = ty.nonbuiltin_types().into_iter().collect();
            let member = builtin_closure_member(&|t| base.contains(t), &ty);
            assert!(member, "{ty} escaped the closure of its own parts");
            assert!(closure_oracle(&base, &ty), "oracle disagrees on {ty}");
        }
    }

    #[test]
    fn closure_membership_agrees_with_saturation_oracle() {
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..300 {
            let ty = random_type(&mut rng, 3, true);
            let mut base = BTreeSet::new();
            for _ in 0..rng.gen_range(0..3) {
                base.insert(random_type(&mut rng, 2, true));
            }
            let fast = builtin_closure_member(&|t| base.contains(t), &ty);
            let slow = closure_oracle(&base, &ty);
            assert_eq!(fast, slow, "{ty} with base {base:?}");
        }
    }

    #[test]
    fn equality_term_construction() {
        let x = Term::var("x", Type::bool_ty());
        let eq = mk_eq(x.clone(), x.clone()).unwrap();
        assert!(eq.has_type(&Type::bool_ty()));
        let (l, r) = dest_eq(&eq).unwrap();
        assert_eq!(l, &x);
        assert_eq!(r, &x);
        let y = Term::var("y", list(Type::bool_ty()));
        assert!(mk_eq(x, y).is_none());
    }

    #[test]
    fn nonbuiltin_consts_skip_equality_and_binders() {
        let nat = Type::app("nat", vec![]);
        let c = Term::constant("zero", nat.clone());
        let eq = mk_eq(c.clone(), c.clone()).unwrap();
        assert_eq!(eq.nonbuiltin_consts(), vec![
            ConstInstance::new("zero", nat.clone()),
            ConstInstance::new("zero", nat.clone()),
        ]);
        // The binder of an abstraction is not an occurrence.
        let body = Term::var("f", Type::fun(nat.clone(), nat.clone()));
        let lam = Term::Abs(
            Box::new(Term::constant("odd", nat.clone())),
            Box::new(body),
        );
        assert_eq!(lam.nonbuiltin_consts(), vec![]);
    }

    fn random_term(rng: &mut StdRng, depth: usize) -> Term {
        // Bool-typed generator with a few bound and free variables.
        if depth == 0 {
            return match rng.gen_range(0..3) {
                0 => Term::var("p", Type::bool_ty()),
                1 => Term::var("q", Type::bool_ty()),
                _ => Term::constant("c", Type::bool_ty()),
            };
        }
        match rng.gen_range(0..3) {
            0 => random_term(rng, 0),
            1 => {
                let name = ["x", "y", "p"][rng.gen_range(0..3)];
                let body = random_term(rng, depth - 1);
                Term::comb(
                    Term::abs(name, Type::bool_ty(), body),
                    random_term(rng, depth - 1),
                )
            }
            _ => {
                let l = random_term(rng, depth - 1);
                let r = random_term(rng, depth - 1);
                mk_eq(l, r).unwrap()
            }
        }
    }

    // Brute-force alpha oracle: rename every binder to every choice from
    // a fixed pool and compare syntactically.
    fn rename_binders(t: &Term, pool: &[&str], picks: &mut Vec<usize>, idx: &mut usize) -> Term {
        match t {
            Term::Var(..) | Term::Const(..) => t.clone(),
            Term::Comb(f, x) => Term::comb(
                rename_binders(f, pool, picks, idx),
                rename_binders(x, pool, picks, idx),
            ),
            Term::Abs(v, b) => {
                let (name, ty) = match v.as_ref() {
                    Term::Var(n, ty) => (n.clone(), ty.clone()),
                    _ => unreachable!(),
                };
                let choice = pool[picks[*idx]];
                *idx += 1;
                let renamed = vsubst(
                    &[((name, ty.clone()), Term::Var(choice.to_string(), ty.clone()))],
                    b,
                );
                let body = rename_binders(&renamed, pool, picks, idx);
                Term::abs(choice, ty, body)
            }
        }
    }

    fn count_binders(t: &Term) -> usize {
        match t {
            Term::Var(..) | Term::Const(..) => 0,
            Term::Comb(f, x) => count_binders(f) + count_binders(x),
            Term::Abs(_, b) => 1 + count_binders(b),
        }
    }

    fn alpha_oracle(t1: &Term, t2: &Term) -> bool {
        let pool = ["v1", "v2", "v3"];
        let n = count_binders(t1);
        if count_binders(t2) != n {
            return false;
        }
        let total = pool.len().pow(n as u32);
        for combo in 0..total {
            let mut picks = Vec::with_capacity(n);
            let mut rest = combo;
            for _ in 0..n {
                picks.push(rest % pool.len());
                rest /= pool.len();
            }
            let r1 = rename_binders(t1, &pool, &mut picks.clone(), &mut 0);
            let r2 = rename_binders(t2, &pool, &mut picks.clone(), &mut 0);
            if r1 == t2.clone() || r2 == t1.clone() || r1 == r2 {
                // Same renaming applied to both; syntactic equality under
                // any shared choice witnesses alpha-equivalence.
                if r1 == r2 {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn alpha_equivalence_of_identity_abstractions() {
        let t1 = Term::abs("x", Type::bool_ty(), Term::var("x", Type::bool_ty()));
        let t2 = Term::abs("y", Type::bool_ty(), Term::var("y", Type::bool_ty()));
        assert!(t1.alpha_eq(&t2));
        assert!(alpha_oracle(&t1, &t2));
        assert_eq!(t1.canon(), t2.canon());
        // Different binder type: not alpha-equivalent.
        let t3 = Term::abs("x", list(Type::bool_ty()), Term::var("x", list(Type::bool_ty())));
        assert!(!t1.alpha_eq(&t3));
    }

    #[test]
    fn alpha_distinguishes_free_variables() {
        let t1 = Term::abs("x", Type::bool_ty(), Term::var("p", Type::bool_ty()));
        let t2 = Term::abs("x", Type::bool_ty(), Term::var("q", Type::bool_ty()));
        assert!(!t1.alpha_eq(&t2));
        assert!(!alpha_oracle(&t1, &t2));
        // A free variable named like a canonical binder must not be captured.
        let tricky = Term::abs("x", Type::bool_ty(), Term::var("%0", Type::bool_ty()));
        let canon = tricky.canon();
        if let Term::Abs(v, body) = &canon {
            assert_ne!(v.as_ref(), body.as_ref());
        } else {
            panic!("canon changed the shape");
        }
    }

    #[test]
    fn alpha_walk_agrees_with_canon_and_brute_force() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..200 {
            let t1 = random_term(&mut rng, 2);
            let t2 = random_term(&mut rng, 2);
            let direct = t1.alpha_eq(&t2);
            let via_canon = t1.canon() == t2.canon();
            assert_eq!(direct, via_canon, "{t1} vs {t2}");
            assert_eq!(direct, alpha_oracle(&t1, &t2), "{t1} vs {t2}");
            assert!(t1.alpha_eq(&t1));
        }
    }

    #[test]
    fn shadowed_binders_compare_by_innermost_binding() {
        // \x. \x. x is the constant-second-binder function, not the first.
        let inner = Term::abs("x", Type::bool_ty(), Term::var("x", Type::bool_ty()));
        let t1 = Term::abs("x", Type::bool_ty(), inner);
        let t2 = Term::abs(
            "y",
            Type::bool_ty(),
            Term::abs("z", Type::bool_ty(), Term::var("z", Type::bool_ty())),
        );
        let t3 = Term::abs(
            "y",
            Type::bool_ty(),
            Term::abs("z", Type::bool_ty(), Term::var("y", Type::bool_ty())),
        );
        assert!(t1.alpha_eq(&t2));
        assert!(!t1.alpha_eq(&t3));
    }

    #[test]
    fn vsubst_avoids_capture() {
        // (\y. x) [x := y]  must rename the binder, giving \y'. y.
        let t = Term::abs("y", Type::bool_ty(), Term::var("x", Type::bool_ty()));
        let out = vsubst(
            &[((
                "x".to_string(),
                Type::bool_ty(),
            ), Term::var("y", Type::bool_ty()))],
            &t,
        );
        let expected = Term::abs("w", Type::bool_ty(), Term::var("y", Type::bool_ty()));
        assert!(out.alpha_eq(&expected));
        // And the naive reading would have produced the identity function.
        assert!(!out.alpha_eq(&Term::abs(
            "y",
            Type::bool_ty(),
            Term::var("y", Type::bool_ty())
        )));
    }

    #[test]
    fn vsubst_respects_shadowing() {
        // (\x. x) [x := c] is unchanged.
        let t = Term::abs("x", Type::bool_ty(), Term::var("x", Type::bool_ty()));
        let out = vsubst(
            &[(("x".to_string(), Type::bool_ty()), Term::constant("c", Type::bool_ty()))],
            &t,
        );
        assert!(out.alpha_eq(&t));
    }

    #[test]
    fn inst_term_renames_colliding_binders() {
        // \x:'a. (x:'a, x:bool free)  with 'a := bool would conflate the
        // bound x with the free one unless the binder is renamed.
        let body = Term::comb(
            Term::comb(
                equal_const(Type::bool_ty()),
                Term::var("x", a()),
            ),
            Term::var("x", Type::bool_ty()),
        );
        // Body is ill-typed as an equation until 'a := bool, which is fine:
        // instantiation is purely syntactic.
        let t = Term::Abs(Box::new(Term::var("x", a())), Box::new(body));
        let subst = TypeSubst::from_pairs([("a".to_string(), Type::bool_ty())]);
        let out = inst_term(&subst, &t);
        if let Term::Abs(v, b) = &out {
            let (bn, bt) = match v.as_ref() {
                Term::Var(n, ty) => (n.clone(), ty.clone()),
                _ => panic!("binder vanished"),
            };
            assert_eq!(bt, Type::bool_ty());
            assert_ne!(bn, "x");
            // The free x:bool stays free.
            assert!(b.var_free_in("x", &Type::bool_ty()));
        } else {
            panic!("instantiation changed the shape");
        }
    }

    #[test]
    fn type_of_rejects_bad_applications() {
        let f = Term::var("f", Type::fun(Type::bool_ty(), Type::bool_ty()));
        let x = Term::var("x", Type::bool_ty());
        assert_eq!(
            Term::comb(f.clone(), x.clone()).type_of(),
            Some(Type::bool_ty())
        );
        let bad = Term::comb(x.clone(), f);
        assert_eq!(bad.type_of(), None);
        assert!(!bad.welltyped());
    }
}
