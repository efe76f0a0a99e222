//! Abstract syntax for every PDDL definition form.
//!
//! Spans ride along on every node but never affect equality, so two parses of
//! differently formatted (or differently cased) text compare equal when they
//! mean the same thing.

use super::sexpr::SExpr;
use super::span::SourceSpan;
use crate::model::requirements::{Requirement, RequirementSet};
use crate::numeric::NumericValue;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A case-insensitive identifier. Variables keep their leading `?`.
#[derive(Debug, Clone)]
pub struct Name {
    pub canonical: String,
    pub original: String,
    pub span: SourceSpan,
}

impl Name {
    pub fn new(original: &str, span: SourceSpan) -> Name {
        Name {
            canonical: original.to_ascii_lowercase(),
            original: original.to_string(),
            span,
        }
    }

    pub fn synthetic(text: &str) -> Name {
        Name::new(text, SourceSpan::default())
    }

    pub fn as_str(&self) -> &str {
        &self.canonical
    }

    pub fn is_variable(&self) -> bool {
        self.canonical.starts_with('?')
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical.hash(state);
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical.cmp(&other.canonical)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Atom(Name),
    Either(Vec<TypeExpr>),
    Fluent(Box<TypeExpr>),
}

impl TypeExpr {
    pub fn object() -> TypeExpr {
        TypeExpr::Atom(Name::synthetic("object"))
    }

    pub fn number() -> TypeExpr {
        TypeExpr::Atom(Name::synthetic("number"))
    }

    pub fn named(name: &str) -> TypeExpr {
        TypeExpr::Atom(Name::synthetic(name))
    }

    /// Every atomic type name mentioned.
    pub fn atoms(&self) -> Vec<&Name> {
        match self {
            TypeExpr::Atom(n) => vec![n],
            TypeExpr::Either(ts) => ts.iter().flat_map(|t| t.atoms()).collect(),
            TypeExpr::Fluent(t) => t.atoms(),
        }
    }

    pub fn is_fluent(&self) -> bool {
        matches!(self, TypeExpr::Fluent(_))
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Atom(n) => write!(f, "{n}"),
            TypeExpr::Either(ts) => {
                f.write_str("(either")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                f.write_str(")")
            }
            TypeExpr::Fluent(t) => write!(f, "(fluent {t})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedGroup<X> {
    pub items: Vec<X>,
    pub ty: TypeExpr,
    /// False when the group had no `- type` and defaulted to `object`.
    pub explicit: bool,
}

/// `x1 x2 - t1 x3 - t2 x4`: every item gets the first type after it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedList<X> {
    pub groups: Vec<TypedGroup<X>>,
}

impl<X> Default for TypedList<X> {
    fn default() -> Self {
        TypedList { groups: Vec::new() }
    }
}

impl<X> TypedList<X> {
    pub fn iter(&self) -> impl Iterator<Item = (&X, &TypeExpr)> {
        self.groups
            .iter()
            .flat_map(|g| g.items.iter().map(move |x| (x, &g.ty)))
    }

    /// Items with their type, or `None` where the type was left implicit.
    pub fn declared(&self) -> impl Iterator<Item = (&X, Option<&TypeExpr>)> {
        self.groups
            .iter()
            .flat_map(|g| g.items.iter().map(move |x| (x, g.explicit.then_some(&g.ty))))
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.items.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn items(&self) -> impl Iterator<Item = &X> {
        self.iter().map(|(x, _)| x)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (X, TypeExpr)>) -> Self {
        TypedList {
            groups: pairs
                .into_iter()
                .map(|(x, ty)| TypedGroup {
                    items: vec![x],
                    explicit: true,
                    ty,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Number {
    pub value: NumericValue,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Name(Name),
    Var(Name),
    Number(Number),
}

impl Term {
    pub fn span(&self) -> SourceSpan {
        match self {
            Term::Name(n) | Term::Var(n) => n.span,
            Term::Number(n) => n.span,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(n) | Term::Var(n) => write!(f, "{n}"),
            Term::Number(n) => write!(f, "{}", n.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicFormula {
    pub predicate: Name,
    pub args: Vec<Term>,
    pub span: SourceSpan,
}

impl fmt::Display for AtomicFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A possibly negated atomic formula, as in `:init`, `:timeless`, `:implies`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: AtomicFormula,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

/// Expressions appear only in evaluation contexts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Number(Number),
    Var(Name),
    /// A domain variable or a fluent object.
    Name(Name),
    Arith {
        op: ArithOp,
        args: Vec<Expr>,
        span: SourceSpan,
    },
    Compare {
        op: CmpOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        span: SourceSpan,
    },
    Sum {
        vars: TypedList<Name>,
        condition: Box<Gd>,
        body: Box<Expr>,
        span: SourceSpan,
    },
}

impl Expr {
    pub fn span(&self) -> SourceSpan {
        match self {
            Expr::Number(n) => n.span,
            Expr::Var(n) | Expr::Name(n) => n.span,
            Expr::Arith { span, .. } | Expr::Compare { span, .. } | Expr::Sum { span, .. } => {
                *span
            }
        }
    }

    /// Variables occurring in the expression, in order, with repeats.
    /// Variables bound inside a `sum` are excluded.
    pub fn variables(&self) -> Vec<&Name> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Name>) {
        match self {
            Expr::Var(v) => out.push(v),
            Expr::Number(_) | Expr::Name(_) => {}
            Expr::Arith { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            Expr::Compare { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            Expr::Sum {
                vars,
                condition,
                body,
                ..
            } => {
                let bound: Vec<&Name> = vars.items().collect();
                let mut inner = Vec::new();
                body.collect_vars(&mut inner);
                for v in condition.free_variables() {
                    inner.push(v);
                }
                out.extend(inner.into_iter().filter(|v| !bound.contains(v)));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Builtin {
    Eval { expr: Expr, value: Expr },
    Test(Expr),
    BoundedInt { var: Expr, low: Expr, high: Expr },
    Equation { lhs: Expr, rhs: Expr },
    FluentEval { expr: Expr, value: Expr },
    FluentTest(Expr),
    CurrentValue { fluent: Term, value: Term },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GdKind {
    Atom(AtomicFormula),
    Equal(Term, Term),
    Not(Box<Gd>),
    And(Vec<Gd>),
    Or(Vec<Gd>),
    Imply(Box<Gd>, Box<Gd>),
    Exists(TypedList<Name>, Box<Gd>),
    Forall(TypedList<Name>, Box<Gd>),
    Builtin(Builtin),
}

/// Goal description. `advice` holds the payloads of any `(^^ gd a)` wrappers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gd {
    pub kind: GdKind,
    pub span: SourceSpan,
    pub advice: Vec<SExpr>,
}

impl Gd {
    pub fn new(kind: GdKind, span: SourceSpan) -> Gd {
        Gd {
            kind,
            span,
            advice: Vec::new(),
        }
    }

    pub fn and(parts: Vec<Gd>) -> Gd {
        Gd::new(GdKind::And(parts), SourceSpan::default())
    }

    /// Free variables, first occurrence order.
    pub fn free_variables(&self) -> Vec<&Name> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        free_vars_gd(self, &mut bound, &mut out);
        out
    }
}

fn push_var<'a>(v: &'a Name, bound: &[&Name], out: &mut Vec<&'a Name>) {
    if !bound.contains(&v) && !out.contains(&v) {
        out.push(v);
    }
}

fn free_vars_term<'a>(t: &'a Term, bound: &[&Name], out: &mut Vec<&'a Name>) {
    if let Term::Var(v) = t {
        push_var(v, bound, out);
    }
}

fn free_vars_expr<'a>(e: &'a Expr, bound: &[&Name], out: &mut Vec<&'a Name>) {
    for v in e.variables() {
        push_var(v, bound, out);
    }
}

fn free_vars_gd<'a>(gd: &'a Gd, bound: &mut Vec<&'a Name>, out: &mut Vec<&'a Name>) {
    match &gd.kind {
        GdKind::Atom(a) => a.args.iter().for_each(|t| free_vars_term(t, bound, out)),
        GdKind::Equal(a, b) => {
            free_vars_term(a, bound, out);
            free_vars_term(b, bound, out);
        }
        GdKind::Not(g) => free_vars_gd(g, bound, out),
        GdKind::And(gs) | GdKind::Or(gs) => gs.iter().for_each(|g| free_vars_gd(g, bound, out)),
        GdKind::Imply(a, b) => {
            free_vars_gd(a, bound, out);
            free_vars_gd(b, bound, out);
        }
        GdKind::Exists(vars, body) | GdKind::Forall(vars, body) => {
            let n = bound.len();
            bound.extend(vars.items());
            free_vars_gd(body, bound, out);
            bound.truncate(n);
        }
        GdKind::Builtin(b) => match b {
            Builtin::Eval { expr, value } | Builtin::FluentEval { expr, value } => {
                free_vars_expr(expr, bound, out);
                free_vars_expr(value, bound, out);
            }
            Builtin::Test(e) | Builtin::FluentTest(e) => free_vars_expr(e, bound, out),
            Builtin::BoundedInt { var, low, high } => {
                free_vars_expr(var, bound, out);
                free_vars_expr(low, bound, out);
                free_vars_expr(high, bound, out);
            }
            Builtin::Equation { lhs, rhs } => {
                free_vars_expr(lhs, bound, out);
                free_vars_expr(rhs, bound, out);
            }
            Builtin::CurrentValue { fluent, value } => {
                free_vars_term(fluent, bound, out);
                free_vars_term(value, bound, out);
            }
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EffectKind {
    Add(AtomicFormula),
    Del(AtomicFormula),
    And(Vec<Effect>),
    Forall(TypedList<Name>, Box<Effect>),
    When(Gd, Box<Effect>),
    Change { fluent: Term, value: Expr },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Effect {
    pub kind: EffectKind,
    pub span: SourceSpan,
    pub advice: Vec<SExpr>,
}

impl Effect {
    pub fn new(kind: EffectKind, span: SourceSpan) -> Effect {
        Effect {
            kind,
            span,
            advice: Vec::new(),
        }
    }

    /// Every atomic formula added or deleted anywhere in the effect.
    pub fn atoms(&self) -> Vec<&AtomicFormula> {
        let mut out = Vec::new();
        fn go<'a>(e: &'a Effect, out: &mut Vec<&'a AtomicFormula>) {
            match &e.kind {
                EffectKind::Add(a) | EffectKind::Del(a) => out.push(a),
                EffectKind::And(es) => es.iter().for_each(|e| go(e, out)),
                EffectKind::Forall(_, e) | EffectKind::When(_, e) => go(e, out),
                EffectKind::Change { .. } => {}
            }
        }
        go(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelQualifier {
    Whole,
    Begin,
    End,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelTerm {
    pub label: Name,
    pub qualifier: LabelQualifier,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionTerm {
    pub functor: Name,
    pub args: Vec<Term>,
    pub span: SourceSpan,
}

impl fmt::Display for ActionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.functor)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// Conditions attached by `in-context`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ContextConditions {
    pub precondition: Option<Gd>,
    pub maintain: Option<Gd>,
    pub effect: Option<Effect>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SpecKind {
    Action(ActionTerm),
    NoOp,
    InContext {
        body: Box<ActionSpec>,
        conditions: ContextConditions,
    },
    Choice(Vec<ActionSpec>),
    Forsome {
        vars: TypedList<Name>,
        body: Box<ActionSpec>,
    },
    Series(Vec<ActionSpec>),
    Parallel(Vec<ActionSpec>),
    Tag {
        before: Vec<LabelTerm>,
        body: Box<ActionSpec>,
        after: Vec<LabelTerm>,
    },
    Foreach {
        vars: TypedList<Name>,
        condition: Gd,
        body: Box<ActionSpec>,
    },
    Constrained {
        specs: Vec<ActionSpec>,
        constraints: Vec<Constraint>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionSpec {
    pub kind: SpecKind,
    pub span: SourceSpan,
    pub advice: Vec<SExpr>,
}

impl ActionSpec {
    pub fn new(kind: SpecKind, span: SourceSpan) -> ActionSpec {
        ActionSpec {
            kind,
            span,
            advice: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Label(LabelTerm),
    Series(Vec<Constraint>),
    Parallel(Vec<Constraint>),
    InContext {
        body: Box<Constraint>,
        conditions: ContextConditions,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expansion {
    Spec(ActionSpec),
    /// `:expansion :methods`: every expansion comes from `:method`s.
    Methods,
}

/// The keyword fields shared by actions, methods, and `in-context`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ActionBody {
    pub vars: Option<TypedList<Name>>,
    pub precondition: Option<Gd>,
    pub expansion: Option<Expansion>,
    pub maintain: Option<Gd>,
    pub effect: Option<Effect>,
    pub only_in_expansions: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionDef {
    pub name: Name,
    pub params: TypedList<Name>,
    pub body: ActionBody,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AxiomDef {
    pub vars: TypedList<Name>,
    pub context: Gd,
    pub implies: Literal,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodDef {
    pub action: Name,
    pub name: Option<Name>,
    pub params: TypedList<Name>,
    pub body: ActionBody,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredicateDecl {
    pub name: Name,
    pub params: TypedList<Name>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DomainVarDecl {
    pub name: Name,
    pub initial: Option<Term>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DomainDef {
    pub name: Name,
    pub extends: Vec<Name>,
    pub requirements: Option<RequirementSet>,
    pub types: Option<TypedList<Name>>,
    pub constants: Option<TypedList<Name>>,
    pub domain_vars: Option<TypedList<DomainVarDecl>>,
    pub predicates: Vec<PredicateDecl>,
    pub timeless: Vec<Literal>,
    pub safety: Vec<Gd>,
    pub actions: Vec<ActionDef>,
    pub axioms: Vec<AxiomDef>,
    pub methods: Vec<MethodDef>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LengthSpec {
    pub serial: Option<u64>,
    pub parallel: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProblemDef {
    pub name: Name,
    pub domain: Name,
    pub requirements: Option<RequirementSet>,
    pub situation: Option<Name>,
    pub objects: Option<TypedList<Name>>,
    pub init: Option<Vec<Literal>>,
    pub goals: Vec<Gd>,
    pub expansions: Vec<ActionSpec>,
    pub length: Option<LengthSpec>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SituationDef {
    pub name: Name,
    pub domain: Name,
    pub objects: Option<TypedList<Name>>,
    pub init: Vec<Literal>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AddendumDef {
    pub name: Name,
    pub domain: Name,
    pub actions: Vec<ActionDef>,
    pub axioms: Vec<AxiomDef>,
    pub methods: Vec<MethodDef>,
    pub safety: Vec<Gd>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Definition {
    Domain(DomainDef),
    Problem(ProblemDef),
    Situation(SituationDef),
    Addendum(AddendumDef),
}

impl Definition {
    pub fn name(&self) -> &Name {
        match self {
            Definition::Domain(d) => &d.name,
            Definition::Problem(p) => &p.name,
            Definition::Situation(s) => &s.name,
            Definition::Addendum(a) => &a.name,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Definition::Domain(_) => "domain",
            Definition::Problem(_) => "problem",
            Definition::Situation(_) => "situation",
            Definition::Addendum(_) => "addendum",
        }
    }
}

/// A construct that is legal only under some requirement flag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Demand {
    /// Satisfied when any one of these is declared.
    pub any_of: Vec<Requirement>,
    pub span: SourceSpan,
    /// Unmet soft demands are warnings rather than errors.
    pub soft: bool,
}

/// A parsed `(define ...)` form together with the tree it came from.
#[derive(Debug, Clone)]
pub struct ParsedDef {
    pub def: Definition,
    pub source: SExpr,
    pub demands: Vec<Demand>,
}
