//! Statement grammar over s-expressions and its elaboration into a
//! checked context. Scripts are data: parsing never consults a
//! signature, so `parse_theory(print_theory(s)) = s` holds for every
//! script, and all name resolution happens during elaboration.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::base_theories::{
    bool_context, conj, conjunct1, disch, eqt_elim, eqt_intro, hol_context, not_intro, truth,
};
use crate::deps::DepNode;
use crate::derive::{Prover, Thm};
use crate::sexpr::{parse_all, parse_one, print_sexp, ParseError, Sexp, Span};
use crate::syntax::{inst_term, match_type, mk_eq, ConstInstance, Term, Type};
use crate::theory::{Context, Signature, Update};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeExpr {
    /// `(tyvar a)`
    Var(String),
    /// `(bool)`
    Bool,
    /// `(fun A B)`
    Fun(Box<TypeExpr>, Box<TypeExpr>),
    /// `(tycon name args...)`
    Con(String, Vec<TypeExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TermExpr {
    /// A bare name, resolved against enclosing binders, then the
    /// statement's placeholders, then the signature.
    Atom(String),
    /// `(var x TYPE)`, for free variables.
    Var(String, TypeExpr),
    /// `(const c TYPE)`, pinning an instance of a schematic constant.
    Const(String, TypeExpr),
    /// `(lam x TYPE BODY)`
    Lam(String, TypeExpr, Box<TermExpr>),
    /// `(= A B)`
    Eq(Box<TermExpr>, Box<TermExpr>),
    /// `(F A...)`; schematic heads specialize against each operand.
    App(Box<TermExpr>, Vec<TermExpr>),
}

/// Proof surface: the ten primitive inferences and axiom citation,
/// plus derived rules that elaborate through the prover.
#[derive(Clone, Debug, PartialEq)]
pub enum DerivExpr {
    Refl(TermExpr),
    Assume(TermExpr),
    Trans(Box<DerivExpr>, Box<DerivExpr>),
    MkComb(Box<DerivExpr>, Box<DerivExpr>),
    Abs(String, TypeExpr, Box<DerivExpr>),
    Beta(String, TypeExpr, TermExpr),
    EqMp(Box<DerivExpr>, Box<DerivExpr>),
    DeductAntisym(Box<DerivExpr>, Box<DerivExpr>),
    InstType(Vec<(String, TypeExpr)>, Box<DerivExpr>),
    Inst(Vec<(String, TypeExpr, TermExpr)>, Box<DerivExpr>),
    Axiom(TermExpr),
    Sym(Box<DerivExpr>),
    ApTerm(TermExpr, Box<DerivExpr>),
    ApThm(Box<DerivExpr>, TermExpr),
    BetaConv(TermExpr),
    Truth,
    EqtIntro(Box<DerivExpr>),
    EqtElim(Box<DerivExpr>),
    Conj(Box<DerivExpr>, Box<DerivExpr>),
    Conjunct1(Box<DerivExpr>),
    Disch(TermExpr, Box<DerivExpr>),
    NotIntro(Box<DerivExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prelude {
    Bool,
    Hol,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    /// `(prelude bool)` or `(prelude hol)`; must come first if present.
    Prelude(Prelude),
    NewType { name: String, arity: usize },
    NewConst { name: String, ty: TypeExpr },
    Axiom(TermExpr),
    TypeDefn { name: String, pred: TermExpr, abs: String, rep: String, proof: DerivExpr },
    ConstSpec { overload: bool, eqs: Vec<(String, TermExpr)>, prop: TermExpr, proof: DerivExpr },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct TheoryScript {
    pub statements: Vec<Statement>,
}

impl TheoryScript {
    /// Statements that grow the context, i.e. everything but preludes.
    pub fn growth_count(&self) -> usize {
        self.statements.iter().filter(|s| !matches!(s, Statement::Prelude(_))).count()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScriptError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{span}: {msg}")]
    Form { span: Span, msg: String },
    #[error("statement {stmt}: {msg}")]
    Elab { stmt: usize, msg: String },
}

fn form<T>(span: Span, msg: impl Into<String>) -> Result<T, ScriptError> {
    Err(ScriptError::Form { span, msg: msg.into() })
}

fn atom_of(sexp: &Sexp, what: &str) -> Result<String, ScriptError> {
    match sexp.as_atom() {
        Some(a) => Ok(a.to_string()),
        None => form(sexp.span(), format!("expected {what}, found a list")),
    }
}

fn list_of<'a>(sexp: &'a Sexp, what: &str) -> Result<&'a [Sexp], ScriptError> {
    match sexp.as_list() {
        Some(items) => Ok(items),
        None => form(sexp.span(), format!("expected {what}, found an atom")),
    }
}

fn arity_check(items: &[Sexp], n: usize, span: Span, head: &str) -> Result<(), ScriptError> {
    if items.len() != n {
        return form(span, format!("{head} takes {n} arguments, found {}", items.len()));
    }
    Ok(())
}

fn parse_type(sexp: &Sexp) -> Result<TypeExpr, ScriptError> {
    let span = sexp.span();
    let items = match sexp.as_list() {
        Some(items) => items,
        None => return form(span, "types are lists, e.g. (bool) or (tyvar a)"),
    };
    let head = match items.first().and_then(|h| h.as_atom()) {
        Some(h) => h,
        None => return form(span, "a type starts with bool, tyvar, fun or tycon"),
    };
    let rest = &items[1..];
    match head {
        "bool" => {
            arity_check(rest, 0, span, "bool")?;
            Ok(TypeExpr::Bool)
        }
        "tyvar" => {
            arity_check(rest, 1, span, "tyvar")?;
            Ok(TypeExpr::Var(atom_of(&rest[0], "a type variable name")?))
        }
        "fun" => {
            arity_check(rest, 2, span, "fun")?;
            Ok(TypeExpr::Fun(
                Box::new(parse_type(&rest[0])?),
                Box::new(parse_type(&rest[1])?),
            ))
        }
        "tycon" => {
            if rest.is_empty() {
                return form(span, "tycon needs a constructor name");
            }
            let name = atom_of(&rest[0], "a type constructor name")?;
            let args = rest[1..].iter().map(parse_type).collect::<Result<_, _>>()?;
            Ok(TypeExpr::Con(name, args))
        }
        other => form(span, format!("unknown type form {other}")),
    }
}

fn parse_term(sexp: &Sexp) -> Result<TermExpr, ScriptError> {
    let span = sexp.span();
    let items = match sexp {
        Sexp::Atom(a, _) => return Ok(TermExpr::Atom(a.clone())),
        Sexp::List(items, _) => items,
    };
    let Some(head) = items.first() else {
        return form(span, "empty application");
    };
    let rest = &items[1..];
    match head.as_atom() {
        Some("var") => {
            arity_check(rest, 2, span, "var")?;
            Ok(TermExpr::Var(atom_of(&rest[0], "a variable name")?, parse_type(&rest[1])?))
        }
        Some("const") => {
            arity_check(rest, 2, span, "const")?;
            Ok(TermExpr::Const(atom_of(&rest[0], "a constant name")?, parse_type(&rest[1])?))
        }
        Some("lam") => {
            arity_check(rest, 3, span, "lam")?;
            Ok(TermExpr::Lam(
                atom_of(&rest[0], "a bound variable name")?,
                parse_type(&rest[1])?,
                Box::new(parse_term(&rest[2])?),
            ))
        }
        Some("=") => {
            arity_check(rest, 2, span, "=")?;
            Ok(TermExpr::Eq(Box::new(parse_term(&rest[0])?), Box::new(parse_term(&rest[1])?)))
        }
        _ => {
            let f = parse_term(head)?;
            let args = rest.iter().map(parse_term).collect::<Result<_, _>>()?;
            Ok(TermExpr::App(Box::new(f), args))
        }
    }
}

fn parse_ty_subst(sexp: &Sexp) -> Result<Vec<(String, TypeExpr)>, ScriptError> {
    let mut out = Vec::new();
    for pair in list_of(sexp, "a substitution list")? {
        let items = list_of(pair, "a (name TYPE) pair")?;
        arity_check(items, 2, pair.span(), "a type substitution pair")?;
        out.push((atom_of(&items[0], "a type variable name")?, parse_type(&items[1])?));
    }
    Ok(out)
}

fn parse_term_subst(sexp: &Sexp) -> Result<Vec<(String, TypeExpr, TermExpr)>, ScriptError> {
    let mut out = Vec::new();
    for triple in list_of(sexp, "a substitution list")? {
        let items = list_of(triple, "a (name TYPE TERM) triple")?;
        arity_check(items, 3, triple.span(), "a term substitution triple")?;
        out.push((
            atom_of(&items[0], "a variable name")?,
            parse_type(&items[1])?,
            parse_term(&items[2])?,
        ));
    }
    Ok(out)
}

fn parse_deriv(sexp: &Sexp) -> Result<DerivExpr, ScriptError> {
    let span = sexp.span();
    let items = list_of(sexp, "a derivation")?;
    let head = match items.first().and_then(|h| h.as_atom()) {
        Some(h) => h,
        None => return form(span, "a derivation starts with a rule name"),
    };
    let rest = &items[1..];
    let d1 = |rest: &[Sexp]| -> Result<Box<DerivExpr>, ScriptError> {
        Ok(Box::new(parse_deriv(&rest[0])?))
    };
    let d2 = |rest: &[Sexp]| -> Result<(Box<DerivExpr>, Box<DerivExpr>), ScriptError> {
        Ok((Box::new(parse_deriv(&rest[0])?), Box::new(parse_deriv(&rest[1])?)))
    };
    match head {
        "refl" => {
            arity_check(rest, 1, span, head)?;
            Ok(DerivExpr::Refl(parse_term(&rest[0])?))
        }
        "assume" => {
            arity_check(rest, 1, span, head)?;
            Ok(DerivExpr::Assume(parse_term(&rest[0])?))
        }
        "trans" => {
            arity_check(rest, 2, span, head)?;
            let (a, b) = d2(rest)?;
            Ok(DerivExpr::Trans(a, b))
        }
        "mk-comb" => {
            arity_check(rest, 2, span, head)?;
            let (a, b) = d2(rest)?;
            Ok(DerivExpr::MkComb(a, b))
        }
        "abs" => {
            arity_check(rest, 3, span, head)?;
            Ok(DerivExpr::Abs(
                atom_of(&rest[0], "a bound variable name")?,
                parse_type(&rest[1])?,
                Box::new(parse_deriv(&rest[2])?),
            ))
        }
        "beta" => {
            arity_check(rest, 3, span, head)?;
            Ok(DerivExpr::Beta(
                atom_of(&rest[0], "a bound variable name")?,
                parse_type(&rest[1])?,
                parse_term(&rest[2])?,
            ))
        }
        "eq-mp" => {
            arity_check(rest, 2, span, head)?;
            let (a, b) = d2(rest)?;
            Ok(DerivExpr::EqMp(a, b))
        }
        "deduct-antisym" => {
            arity_check(rest, 2, span, head)?;
            let (a, b) = d2(rest)?;
            Ok(DerivExpr::DeductAntisym(a, b))
        }
        "inst-type" => {
            arity_check(rest, 2, span, head)?;
            Ok(DerivExpr::InstType(parse_ty_subst(&rest[0])?, Box::new(parse_deriv(&rest[1])?)))
        }
        "inst" => {
            arity_check(rest, 2, span, head)?;
            Ok(DerivExpr::Inst(parse_term_subst(&rest[0])?, Box::new(parse_deriv(&rest[1])?)))
        }
        "axiom" => {
            arity_check(rest, 1, span, head)?;
            Ok(DerivExpr::Axiom(parse_term(&rest[0])?))
        }
        "sym" => {
            arity_check(rest, 1, span, head)?;
            Ok(DerivExpr::Sym(d1(rest)?))
        }
        "ap-term" => {
            arity_check(rest, 2, span, head)?;
            Ok(DerivExpr::ApTerm(parse_term(&rest[0])?, Box::new(parse_deriv(&rest[1])?)))
        }
        "ap-thm" => {
            arity_check(rest, 2, span, head)?;
            Ok(DerivExpr::ApThm(Box::new(parse_deriv(&rest[0])?), parse_term(&rest[1])?))
        }
        "beta-conv" => {
            arity_check(rest, 1, span, head)?;
            Ok(DerivExpr::BetaConv(parse_term(&rest[0])?))
        }
        "truth" => {
            arity_check(rest, 0, span, head)?;
            Ok(DerivExpr::Truth)
        }
        "eqt-intro" => {
            arity_check(rest, 1, span, head)?;
            Ok(DerivExpr::EqtIntro(d1(rest)?))
        }
        "eqt-elim" => {
            arity_check(rest, 1, span, head)?;
            Ok(DerivExpr::EqtElim(d1(rest)?))
        }
        "conj" => {
            arity_check(rest, 2, span, head)?;
            let (a, b) = d2(rest)?;
            Ok(DerivExpr::Conj(a, b))
        }
        "conjunct1" => {
            arity_check(rest, 1, span, head)?;
            Ok(DerivExpr::Conjunct1(d1(rest)?))
        }
        "disch" => {
            arity_check(rest, 2, span, head)?;
            Ok(DerivExpr::Disch(parse_term(&rest[0])?, Box::new(parse_deriv(&rest[1])?)))
        }
        "not-intro" => {
            arity_check(rest, 1, span, head)?;
            Ok(DerivExpr::NotIntro(d1(rest)?))
        }
        other => form(span, format!("unknown derivation rule {other}")),
    }
}

/// Keyword arguments `:key value`, each required exactly once.
fn keyword_args<'a>(
    rest: &'a [Sexp],
    keys: &[&str],
    span: Span,
) -> Result<BTreeMap<String, &'a Sexp>, ScriptError> {
    if rest.len() != 2 * keys.len() {
        return form(span, format!("expected the keyword arguments {}", keys.join(", ")));
    }
    let mut out = BTreeMap::new();
    for chunk in rest.chunks(2) {
        let key = atom_of(&chunk[0], "a keyword")?;
        let Some(name) = key.strip_prefix(':') else {
            return form(chunk[0].span(), format!("expected a keyword, found {key}"));
        };
        if !keys.contains(&name) {
            return form(chunk[0].span(), format!("unknown keyword :{name}"));
        }
        if out.insert(name.to_string(), &chunk[1]).is_some() {
            return form(chunk[0].span(), format!("duplicate keyword :{name}"));
        }
    }
    Ok(out)
}

fn parse_statement(sexp: &Sexp) -> Result<Statement, ScriptError> {
    let span = sexp.span();
    let items = list_of(sexp, "a statement")?;
    let head = match items.first().and_then(|h| h.as_atom()) {
        Some(h) => h,
        None => return form(span, "a statement starts with its kind"),
    };
    let rest = &items[1..];
    match head {
        "prelude" => {
            arity_check(rest, 1, span, head)?;
            match atom_of(&rest[0], "bool or hol")?.as_str() {
                "bool" => Ok(Statement::Prelude(Prelude::Bool)),
                "hol" => Ok(Statement::Prelude(Prelude::Hol)),
                other => form(rest[0].span(), format!("unknown prelude {other}")),
            }
        }
        "newtype" => {
            arity_check(rest, 2, span, head)?;
            let name = atom_of(&rest[0], "a type constructor name")?;
            let arity_text = atom_of(&rest[1], "an arity")?;
            let arity = arity_text
                .parse::<usize>()
                .map_err(|_| ScriptError::Form {
                    span: rest[1].span(),
                    msg: format!("arity must be a number, found {arity_text}"),
                })?;
            Ok(Statement::NewType { name, arity })
        }
        "newconst" => {
            arity_check(rest, 2, span, head)?;
            Ok(Statement::NewConst {
                name: atom_of(&rest[0], "a constant name")?,
                ty: parse_type(&rest[1])?,
            })
        }
        "axiom" => {
            arity_check(rest, 1, span, head)?;
            Ok(Statement::Axiom(parse_term(&rest[0])?))
        }
        "typedef" => {
            if rest.is_empty() {
                return form(span, "typedef needs a type name");
            }
            let name = atom_of(&rest[0], "a type name")?;
            let kw = keyword_args(&rest[1..], &["pred", "abs", "rep", "proof"], span)?;
            Ok(Statement::TypeDefn {
                name,
                pred: parse_term(kw["pred"])?,
                abs: atom_of(kw["abs"], "an abstraction constant name")?,
                rep: atom_of(kw["rep"], "a representation constant name")?,
                proof: parse_deriv(kw["proof"])?,
            })
        }
        "constspec" => {
            let kw = keyword_args(rest, &["overload", "eqs", "prop", "proof"], span)?;
            let overload = match atom_of(kw["overload"], "true or false")?.as_str() {
                "true" => true,
                "false" => false,
                other => {
                    return form(
                        kw["overload"].span(),
                        format!(":overload must be true or false, found {other}"),
                    )
                }
            };
            let mut eqs = Vec::new();
            for eq in list_of(kw["eqs"], "a list of (name TERM) definitions")? {
                let pair = list_of(eq, "a (name TERM) definition")?;
                arity_check(pair, 2, eq.span(), "a definition")?;
                eqs.push((atom_of(&pair[0], "a constant name")?, parse_term(&pair[1])?));
            }
            Ok(Statement::ConstSpec {
                overload,
                eqs,
                prop: parse_term(kw["prop"])?,
                proof: parse_deriv(kw["proof"])?,
            })
        }
        other => form(span, format!("unknown statement {other}")),
    }
}

pub fn parse_theory(text: &str) -> Result<TheoryScript, ScriptError> {
    let statements =
        parse_all(text)?.iter().map(parse_statement).collect::<Result<Vec<_>, _>>()?;
    Ok(TheoryScript { statements })
}

/// `(type TYPE)` or `(const NAME TYPE)` as a dependency node.
pub fn parse_symbol(text: &str) -> Result<DepNode, ScriptError> {
    let sexp = parse_one(text)?;
    let span = sexp.span();
    let items = list_of(&sexp, "a symbol")?;
    match items.first().and_then(|h| h.as_atom()) {
        Some("type") => {
            arity_check(&items[1..], 1, span, "type")?;
            Ok(DepNode::Ty(elab_type(&parse_type(&items[1])?)))
        }
        Some("const") => {
            arity_check(&items[1..], 2, span, "const")?;
            let name = atom_of(&items[1], "a constant name")?;
            Ok(DepNode::Const(ConstInstance::new(name, elab_type(&parse_type(&items[2])?))))
        }
        _ => form(span, "a symbol is (type TYPE) or (const NAME TYPE)"),
    }
}

fn type_sexp(t: &TypeExpr) -> Sexp {
    match t {
        TypeExpr::Var(a) => Sexp::list(vec![Sexp::atom("tyvar"), Sexp::atom(a)]),
        TypeExpr::Bool => Sexp::list(vec![Sexp::atom("bool")]),
        TypeExpr::Fun(a, b) => {
            Sexp::list(vec![Sexp::atom("fun"), type_sexp(a), type_sexp(b)])
        }
        TypeExpr::Con(name, args) => {
            let mut items = vec![Sexp::atom("tycon"), Sexp::atom(name)];
            items.extend(args.iter().map(type_sexp));
            Sexp::list(items)
        }
    }
}

fn term_sexp(t: &TermExpr) -> Sexp {
    match t {
        TermExpr::Atom(a) => Sexp::atom(a),
        TermExpr::Var(x, ty) => Sexp::list(vec![Sexp::atom("var"), Sexp::atom(x), type_sexp(ty)]),
        TermExpr::Const(c, ty) => {
            Sexp::list(vec![Sexp::atom("const"), Sexp::atom(c), type_sexp(ty)])
        }
        TermExpr::Lam(x, ty, body) => Sexp::list(vec![
            Sexp::atom("lam"),
            Sexp::atom(x),
            type_sexp(ty),
            term_sexp(body),
        ]),
        TermExpr::Eq(a, b) => Sexp::list(vec![Sexp::atom("="), term_sexp(a), term_sexp(b)]),
        TermExpr::App(f, args) => {
            let mut items = vec![term_sexp(f)];
            items.extend(args.iter().map(term_sexp));
            Sexp::list(items)
        }
    }
}

fn deriv_sexp(d: &DerivExpr) -> Sexp {
    let rule = |name: &str, items: Vec<Sexp>| {
        let mut all = vec![Sexp::atom(name)];
        all.extend(items);
        Sexp::list(all)
    };
    match d {
        DerivExpr::Refl(t) => rule("refl", vec![term_sexp(t)]),
        DerivExpr::Assume(t) => rule("assume", vec![term_sexp(t)]),
        DerivExpr::Trans(a, b) => rule("trans", vec![deriv_sexp(a), deriv_sexp(b)]),
        DerivExpr::MkComb(a, b) => rule("mk-comb", vec![deriv_sexp(a), deriv_sexp(b)]),
        DerivExpr::Abs(x, ty, a) => {
            rule("abs", vec![Sexp::atom(x), type_sexp(ty), deriv_sexp(a)])
        }
        DerivExpr::Beta(x, ty, body) => {
            rule("beta", vec![Sexp::atom(x), type_sexp(ty), term_sexp(body)])
        }
        DerivExpr::EqMp(a, b) => rule("eq-mp", vec![deriv_sexp(a), deriv_sexp(b)]),
        DerivExpr::DeductAntisym(a, b) => {
            rule("deduct-antisym", vec![deriv_sexp(a), deriv_sexp(b)])
        }
        DerivExpr::InstType(subst, a) => {
            let pairs = subst
                .iter()
                .map(|(x, ty)| Sexp::list(vec![Sexp::atom(x), type_sexp(ty)]))
                .collect();
            rule("inst-type", vec![Sexp::list(pairs), deriv_sexp(a)])
        }
        DerivExpr::Inst(subst, a) => {
            let triples = subst
                .iter()
                .map(|(x, ty, t)| Sexp::list(vec![Sexp::atom(x), type_sexp(ty), term_sexp(t)]))
                .collect();
            rule("inst", vec![Sexp::list(triples), deriv_sexp(a)])
        }
        DerivExpr::Axiom(t) => rule("axiom", vec![term_sexp(t)]),
        DerivExpr::Sym(a) => rule("sym", vec![deriv_sexp(a)]),
        DerivExpr::ApTerm(t, a) => rule("ap-term", vec![term_sexp(t), deriv_sexp(a)]),
        DerivExpr::ApThm(a, t) => rule("ap-thm", vec![deriv_sexp(a), term_sexp(t)]),
        DerivExpr::BetaConv(t) => rule("beta-conv", vec![term_sexp(t)]),
        DerivExpr::Truth => rule("truth", vec![]),
        DerivExpr::EqtIntro(a) => rule("eqt-intro", vec![deriv_sexp(a)]),
        DerivExpr::EqtElim(a) => rule("eqt-elim", vec![deriv_sexp(a)]),
        DerivExpr::Conj(a, b) => rule("conj", vec![deriv_sexp(a), deriv_sexp(b)]),
        DerivExpr::Conjunct1(a) => rule("conjunct1", vec![deriv_sexp(a)]),
        DerivExpr::Disch(t, a) => rule("disch", vec![term_sexp(t), deriv_sexp(a)]),
        DerivExpr::NotIntro(a) => rule("not-intro", vec![deriv_sexp(a)]),
    }
}

fn statement_sexp(s: &Statement) -> Sexp {
    match s {
        Statement::Prelude(p) => Sexp::list(vec![
            Sexp::atom("prelude"),
            Sexp::atom(match p {
                Prelude::Bool => "bool",
                Prelude::Hol => "hol",
            }),
        ]),
        Statement::NewType { name, arity } => Sexp::list(vec![
            Sexp::atom("newtype"),
            Sexp::atom(name),
            Sexp::atom(&arity.to_string()),
        ]),
        Statement::NewConst { name, ty } => {
            Sexp::list(vec![Sexp::atom("newconst"), Sexp::atom(name), type_sexp(ty)])
        }
        Statement::Axiom(t) => Sexp::list(vec![Sexp::atom("axiom"), term_sexp(t)]),
        Statement::TypeDefn { name, pred, abs, rep, proof } => Sexp::list(vec![
            Sexp::atom("typedef"),
            Sexp::atom(name),
            Sexp::atom(":pred"),
            term_sexp(pred),
            Sexp::atom(":abs"),
            Sexp::atom(abs),
            Sexp::atom(":rep"),
            Sexp::atom(rep),
            Sexp::atom(":proof"),
            deriv_sexp(proof),
        ]),
        Statement::ConstSpec { overload, eqs, prop, proof } => Sexp::list(vec![
            Sexp::atom("constspec"),
            Sexp::atom(":overload"),
            Sexp::atom(if *overload { "true" } else { "false" }),
            Sexp::atom(":eqs"),
            Sexp::list(
                eqs.iter()
                    .map(|(name, t)| Sexp::list(vec![Sexp::atom(name), term_sexp(t)]))
                    .collect(),
            ),
            Sexp::atom(":prop"),
            term_sexp(prop),
            Sexp::atom(":proof"),
            deriv_sexp(proof),
        ]),
    }
}

/// Canonical text, one statement per line.
pub fn print_theory(script: &TheoryScript) -> String {
    let mut out = String::new();
    for s in &script.statements {
        out.push_str(&print_sexp(&statement_sexp(s)));
        out.push('\n');
    }
    out
}

pub fn elab_type(t: &TypeExpr) -> Type {
    match t {
        TypeExpr::Var(a) => Type::var(a.clone()),
        TypeExpr::Bool => Type::bool_ty(),
        TypeExpr::Fun(a, b) => Type::fun(elab_type(a), elab_type(b)),
        TypeExpr::Con(name, args) => Type::app(name.clone(), args.iter().map(elab_type).collect()),
    }
}

struct TermEnv<'a> {
    sig: &'a Signature,
    /// Constants a specification is about to introduce, standing in as
    /// free variables at their witness types.
    placeholders: &'a BTreeMap<String, Type>,
}

fn apply_one(f: Term, x: Term) -> Result<Term, String> {
    let fty = f.type_of().ok_or_else(|| format!("ill-typed operator {f}"))?;
    let xty = x.type_of().ok_or_else(|| format!("ill-typed operand {x}"))?;
    match fty.as_fun() {
        Some((dom, _)) if *dom == xty => Ok(Term::comb(f, x)),
        Some((dom, _)) => match match_type(dom, &xty) {
            Some(theta) => Ok(Term::comb(inst_term(&theta, &f), x)),
            None => Err(format!("cannot apply {f} : {fty} to {x} : {xty}")),
        },
        None => Err(format!("{f} : {fty} is not a function")),
    }
}

fn elab_term(
    env: &TermEnv<'_>,
    binders: &mut Vec<(String, Type)>,
    t: &TermExpr,
) -> Result<Term, String> {
    match t {
        TermExpr::Atom(name) => {
            if let Some((_, ty)) = binders.iter().rev().find(|(x, _)| x == name) {
                return Ok(Term::var(name.clone(), ty.clone()));
            }
            if let Some(ty) = env.placeholders.get(name) {
                return Ok(Term::var(name.clone(), ty.clone()));
            }
            if let Some(ty) = env.sig.consts.get(name) {
                return Ok(Term::constant(name.clone(), ty.clone()));
            }
            Err(format!("unknown name {name}"))
        }
        TermExpr::Var(x, ty) => Ok(Term::var(x.clone(), elab_type(ty))),
        TermExpr::Const(c, ty) => {
            let ty = elab_type(ty);
            let general = env.sig.consts.get(c).ok_or_else(|| format!("unknown constant {c}"))?;
            if match_type(general, &ty).is_none() {
                return Err(format!("{ty} is not an instance of {c} : {general}"));
            }
            Ok(Term::constant(c.clone(), ty))
        }
        TermExpr::Lam(x, ty, body) => {
            let ty = elab_type(ty);
            binders.push((x.clone(), ty.clone()));
            let body = elab_term(env, binders, body);
            binders.pop();
            Ok(Term::abs(x.clone(), ty, body?))
        }
        TermExpr::Eq(a, b) => {
            let l = elab_term(env, binders, a)?;
            let r = elab_term(env, binders, b)?;
            mk_eq(l.clone(), r.clone())
                .ok_or_else(|| format!("cannot equate {l} and {r}"))
        }
        TermExpr::App(f, args) => {
            let mut acc = elab_term(env, binders, f)?;
            for arg in args {
                let x = elab_term(env, binders, arg)?;
                acc = apply_one(acc, x)?;
            }
            Ok(acc)
        }
    }
}

fn elab_closed_term(env: &TermEnv<'_>, t: &TermExpr) -> Result<Term, String> {
    elab_term(env, &mut Vec::new(), t)
}

fn elab_deriv(p: &Prover, env: &TermEnv<'_>, d: &DerivExpr) -> Result<Thm, String> {
    let term = |t: &TermExpr| elab_closed_term(env, t);
    let rec = |d: &DerivExpr| elab_deriv(p, env, d);
    let thm = match d {
        DerivExpr::Refl(t) => p.refl(term(t)?),
        DerivExpr::Assume(t) => p.assume(term(t)?),
        DerivExpr::Trans(a, b) => p.trans(&rec(a)?, &rec(b)?),
        DerivExpr::MkComb(a, b) => p.mk_comb(&rec(a)?, &rec(b)?),
        DerivExpr::Abs(x, ty, a) => p.abs(x, elab_type(ty), &rec(a)?),
        DerivExpr::Beta(x, ty, body) => {
            let ty = elab_type(ty);
            let mut binders = vec![(x.clone(), ty.clone())];
            let body = elab_term(env, &mut binders, body)?;
            p.beta(x, ty, body)
        }
        DerivExpr::EqMp(a, b) => p.eq_mp(&rec(a)?, &rec(b)?),
        DerivExpr::DeductAntisym(a, b) => p.deduct_antisym(&rec(a)?, &rec(b)?),
        DerivExpr::InstType(subst, a) => {
            let subst: Vec<(String, Type)> =
                subst.iter().map(|(x, ty)| (x.clone(), elab_type(ty))).collect();
            p.inst_type(&subst, &rec(a)?)
        }
        DerivExpr::Inst(subst, a) => {
            let subst: Vec<(String, Type, Term)> = subst
                .iter()
                .map(|(x, ty, t)| Ok((x.clone(), elab_type(ty), term(t)?)))
                .collect::<Result<_, String>>()?;
            p.inst(&subst, &rec(a)?)
        }
        DerivExpr::Axiom(t) => p.axiom(term(t)?),
        DerivExpr::Sym(a) => p.sym(&rec(a)?),
        DerivExpr::ApTerm(t, a) => p.ap_term(term(t)?, &rec(a)?),
        DerivExpr::ApThm(a, t) => p.ap_thm(&rec(a)?, term(t)?),
        DerivExpr::BetaConv(t) => p.beta_conv(&term(t)?),
        DerivExpr::Truth => truth(p),
        DerivExpr::EqtIntro(a) => eqt_intro(p, &rec(a)?),
        DerivExpr::EqtElim(a) => eqt_elim(p, &rec(a)?),
        DerivExpr::Conj(a, b) => conj(p, &rec(a)?, &rec(b)?),
        DerivExpr::Conjunct1(a) => conjunct1(p, &rec(a)?),
        DerivExpr::Disch(t, a) => disch(p, &term(t)?, &rec(a)?),
        DerivExpr::NotIntro(a) => not_intro(p, &rec(a)?),
    };
    thm.map_err(|e| e.to_string())
}

/// Replays the prelude and the first `n` growth statements through the
/// update gate.
pub fn elaborate_prefix(script: &TheoryScript, n: usize) -> Result<Context, ScriptError> {
    let elab = |stmt: usize| move |msg: String| ScriptError::Elab { stmt, msg };
    let mut ctxt = Context::init();
    let mut growth = 0;
    for (i, statement) in script.statements.iter().enumerate() {
        let stmt = i + 1;
        if let Statement::Prelude(p) = statement {
            if i != 0 {
                return Err(elab(stmt)("a prelude must be the first statement".to_string()));
            }
            ctxt = match p {
                Prelude::Bool => bool_context(),
                Prelude::Hol => hol_context(),
            };
            continue;
        }
        if growth == n {
            break;
        }
        growth += 1;
        let empty = BTreeMap::new();
        let sig = ctxt.signature().clone();
        let env = TermEnv { sig: &sig, placeholders: &empty };
        let (upd, proof) = match statement {
            Statement::Prelude(_) => unreachable!("handled above"),
            Statement::NewType { name, arity } => {
                (Update::NewType { name: name.clone(), arity: *arity }, None)
            }
            Statement::NewConst { name, ty } => {
                (Update::NewConst { name: name.clone(), ty: elab_type(ty) }, None)
            }
            Statement::Axiom(t) => {
                let t = elab_closed_term(&env, t).map_err(elab(stmt))?;
                (Update::NewAxiom(t), None)
            }
            Statement::TypeDefn { name, pred, abs, rep, proof } => {
                let pred = elab_closed_term(&env, pred).map_err(elab(stmt))?;
                let prover = Prover::new(ctxt.theory()).map_err(|e| elab(stmt)(e.to_string()))?;
                let thm = elab_deriv(&prover, &env, proof).map_err(elab(stmt))?;
                let upd = Update::TypeDefn {
                    name: name.clone(),
                    pred,
                    abs: abs.clone(),
                    rep: rep.clone(),
                };
                (upd, Some(thm))
            }
            Statement::ConstSpec { overload, eqs, prop, proof } => {
                let mut placeholders = BTreeMap::new();
                let mut elab_eqs = Vec::new();
                for (name, witness) in eqs {
                    let witness = elab_closed_term(&env, witness).map_err(elab(stmt))?;
                    let wty = witness
                        .type_of()
                        .ok_or_else(|| elab(stmt)(format!("ill-typed witness for {name}")))?;
                    placeholders.insert(name.clone(), wty);
                    elab_eqs.push((name.clone(), witness));
                }
                let env = TermEnv { sig: &sig, placeholders: &placeholders };
                let prop = elab_closed_term(&env, prop).map_err(elab(stmt))?;
                let prover = Prover::new(ctxt.theory()).map_err(|e| elab(stmt)(e.to_string()))?;
                let thm = elab_deriv(&prover, &env, proof).map_err(elab(stmt))?;
                let upd = Update::ConstSpec { overload: *overload, eqs: elab_eqs, prop };
                (upd, Some(thm))
            }
        };
        ctxt = ctxt
            .extend(upd, proof.as_ref().map(|t| t.derivation()))
            .map_err(|e| elab(stmt)(e.to_string()))?;
    }
    Ok(ctxt)
}

/// Replays the whole script into a checked context.
pub fn elaborate(script: &TheoryScript) -> Result<Context, ScriptError> {
    elaborate_prefix(script, usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_theories::{dest_neg, mk_true};
    use crate::syntax::dest_eq;

    const DEC: &str = r#"
        (prelude bool)
        (newconst c (bool))
        (constspec :overload false
          :eqs ((d (false)) (e (imp c (true))))
          :prop (not (= d e))
          :proof (not-intro (disch (= d e)
                   (eq-mp (sym (trans (trans (sym (assume (= d (false))))
                                             (assume (= d e)))
                                      (trans (assume (= e (imp c (true))))
                                             (eqt-intro (disch c (truth))))))
                          (truth)))))
        (constspec :overload true :eqs ((c (true)))
          :prop (= c (true)) :proof (assume (= c (true))))
    "#;

    #[test]
    fn the_basic_statements_parse() {
        let script = parse_theory("(prelude hol)\n(newtype list 1)\n(newconst c (bool))").unwrap();
        assert_eq!(
            script.statements,
            vec![
                Statement::Prelude(Prelude::Hol),
                Statement::NewType { name: "list".into(), arity: 1 },
                Statement::NewConst { name: "c".into(), ty: TypeExpr::Bool },
            ]
        );
        assert_eq!(script.growth_count(), 2);
    }

    #[test]
    fn scripts_round_trip_through_the_printer() {
        let script = parse_theory(DEC).unwrap();
        let printed = print_theory(&script);
        assert_eq!(parse_theory(&printed).unwrap(), script);
    }

    #[test]
    fn parse_errors_carry_statement_positions() {
        let e = parse_theory("(newconst c (bool))\n(frobnicate)").unwrap_err();
        assert_eq!(e.to_string(), "2:1: unknown statement frobnicate");
        let e = parse_theory("(newtype list one)").unwrap_err();
        assert!(e.to_string().contains("arity must be a number"));
    }

    #[test]
    fn the_specification_script_elaborates() {
        let ctxt = elaborate(&parse_theory(DEC).unwrap()).unwrap();
        let sig = ctxt.signature();
        for name in ["c", "d", "e"] {
            assert!(sig.consts.contains_key(name), "{name} missing");
        }
        // Oldest first: the d/e property, then the overload axiom.
        let axioms = ctxt.axioms();
        let overload = dest_eq(&axioms[axioms.len() - 1]).unwrap();
        assert_eq!(overload.0, &Term::constant("c", Type::bool_ty()));
        assert_eq!(overload.1, &mk_true());
        let property = dest_neg(&axioms[axioms.len() - 2]).unwrap();
        let (d, e) = dest_eq(property).unwrap();
        assert_eq!(d, &Term::constant("d", Type::bool_ty()));
        assert_eq!(e, &Term::constant("e", Type::bool_ty()));
    }

    #[test]
    fn prefixes_stop_after_the_requested_growth_statement() {
        let script = parse_theory(DEC).unwrap();
        let ctxt = elaborate_prefix(&script, 1).unwrap();
        assert!(ctxt.signature().consts.contains_key("c"));
        assert!(!ctxt.signature().consts.contains_key("d"));
        let full = elaborate_prefix(&script, 3).unwrap();
        let whole = elaborate(&script).unwrap();
        assert_eq!(full.signature(), whole.signature());
        assert_eq!(full.axioms(), whole.axioms());
    }

    #[test]
    fn typedefs_elaborate_their_obligation() {
        let text = r#"
            (prelude bool)
            (typedef unit
              :pred (lam p (bool) (= p p))
              :abs mk-unit :rep dest-unit
              :proof (eq-mp (sym (beta-conv ((lam p (bool) (= p p)) (true))))
                            (refl (true))))
        "#;
        let ctxt = elaborate(&parse_theory(text).unwrap()).unwrap();
        assert_eq!(ctxt.signature().tys.get("unit"), Some(&0));
        assert!(ctxt.signature().consts.contains_key("mk-unit"));
    }

    #[test]
    fn elaboration_failures_name_the_statement() {
        let e = elaborate(&parse_theory("(prelude bool)\n(axiom (= mystery mystery))").unwrap())
            .unwrap_err();
        assert_eq!(e, ScriptError::Elab { stmt: 2, msg: "unknown name mystery".into() });
        let e = elaborate(&parse_theory("(newconst x (bool))\n(prelude bool)").unwrap())
            .unwrap_err();
        assert!(e.to_string().contains("first statement"));
    }

    #[test]
    fn schematic_heads_specialize_against_their_operands() {
        let text = "(prelude hol)\n(axiom (= (select (lam x (bool) x)) (select (lam x (bool) x))))";
        let ctxt = elaborate(&parse_theory(text).unwrap()).unwrap();
        let (l, _) = dest_eq(&ctxt.axioms()[0]).unwrap();
        assert_eq!(
            l.type_of(),
            Some(Type::bool_ty()),
            "select at bool: {l}"
        );
    }

    #[test]
    fn symbols_parse_to_dependency_nodes() {
        assert_eq!(
            parse_symbol("(const e (bool))").unwrap(),
            DepNode::Const(ConstInstance::new("e", Type::bool_ty()))
        );
        assert_eq!(
            parse_symbol("(type (tycon list (bool)))").unwrap(),
            DepNode::Ty(Type::app("list", vec![Type::bool_ty()]))
        );
        assert!(parse_symbol("(frob)").is_err());
    }
}
