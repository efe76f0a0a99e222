//! Signature, scope, and type checking of formulas against a model.

use super::domain::{Constant, DomainModel};
use crate::diagnostics::{DiagCode, Diagnostic};
use crate::syntax::*;
use std::collections::BTreeMap;

/// What a checked atomic formula turned out to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum AtomClass {
    Predicate { derived: bool },
    Type,
    Unknown,
}

pub(crate) struct Checker<'a> {
    pub model: &'a DomainModel,
    /// Problem objects, when checking a problem or situation.
    pub objects: Option<&'a BTreeMap<String, Constant>>,
    pub source: &'a SExpr,
    pub diags: Vec<Diagnostic>,
    /// Variables in scope; `None` marks an implicit (unchecked) type.
    scope: Vec<(Name, Option<TypeExpr>)>,
}

impl<'a> Checker<'a> {
    pub fn new(model: &'a DomainModel, source: &'a SExpr) -> Checker<'a> {
        Checker {
            model,
            objects: None,
            source,
            diags: Vec::new(),
            scope: Vec::new(),
        }
    }

    pub fn anchor(&self, span: SourceSpan) -> SExpr {
        self.source.find(&span).cloned().unwrap_or_else(|| self.source.clone())
    }

    pub fn flag(&mut self, code: DiagCode, span: SourceSpan) {
        let d = Diagnostic::new(code, &self.anchor(span));
        self.diags.push(d);
    }

    pub fn flag_detail(&mut self, code: DiagCode, span: SourceSpan, detail: &str) {
        let d = Diagnostic::new(code, &self.anchor(span)).with_detail(detail);
        self.diags.push(d);
    }

    // ----- declarations -----

    /// Flags undeclared atoms in `t`.
    pub fn type_known(&mut self, t: &TypeExpr) {
        for a in self.model.types.unknown_atoms(t) {
            let span = a.span;
            self.flag(DiagCode::UnknownType, span);
        }
    }

    /// Pushes typed variables, flagging unknown types, duplicates within the
    /// list, and shadowing of outer bindings. Returns the previous depth.
    pub fn push_vars(&mut self, vars: &TypedList<Name>) -> usize {
        let depth = self.scope.len();
        for (v, t) in vars.declared() {
            if let Some(t) = t {
                self.type_known(t);
            }
            if self.scope[depth..].iter().any(|(n, _)| n == v) {
                self.flag(DiagCode::DuplicateDeclaration, v.span);
            } else if self.scope[..depth].iter().any(|(n, _)| n == v) {
                self.flag(DiagCode::ShadowedVariable, v.span);
            }
            self.scope.push((v.clone(), t.cloned()));
        }
        depth
    }

    pub fn pop_to(&mut self, depth: usize) {
        self.scope.truncate(depth);
    }

    fn lookup_var(&self, v: &Name) -> Option<&Option<TypeExpr>> {
        self.scope.iter().rev().find(|(n, _)| n == v).map(|(_, t)| t)
    }

    fn lookup_name(&self, n: &str) -> Option<Option<&TypeExpr>> {
        let c = self
            .objects
            .and_then(|o| o.get(n))
            .or_else(|| self.model.constants.get(n));
        if let Some(c) = c {
            return Some(c.explicit.then_some(&c.ty));
        }
        self.model.domain_vars.get(n).map(|d| Some(&d.ty))
    }

    fn unknown_name_code(&self) -> DiagCode {
        if self.objects.is_some() {
            DiagCode::UnknownName
        } else {
            DiagCode::UnknownConstant
        }
    }

    // ----- terms -----

    /// Resolves a term, flagging unbound variables and unknown names.
    /// `Some(None)` means the term is fine but its type is unchecked.
    fn term(&mut self, t: &Term) -> Option<Option<TypeExpr>> {
        match t {
            Term::Var(v) => match self.lookup_var(v) {
                Some(ty) => Some(ty.clone()),
                None => {
                    self.flag(DiagCode::UnboundVariable, v.span);
                    None
                }
            },
            Term::Name(n) => match self.lookup_name(n.as_str()) {
                Some(ty) => Some(ty.cloned()),
                None => {
                    let code = self.unknown_name_code();
                    self.flag(code, n.span);
                    None
                }
            },
            Term::Number(_) => Some(Some(TypeExpr::number())),
        }
    }

    fn arg(&mut self, t: &Term, expected: &TypeExpr) {
        if let Term::Number(n) = t {
            if !self.model.types.number_fits(n.value.as_integer().is_some(), expected) {
                self.flag(DiagCode::ArgumentType, n.span);
            }
            return;
        }
        let Some(Some(actual)) = self.term(t) else {
            return;
        };
        let h = &self.model.types;
        if h.subtype_of(&actual, expected) {
            return;
        }
        let code = if h.overlaps(&actual, expected) || h.subtype_of(expected, &actual) {
            DiagCode::ArgumentTypeUncertain
        } else {
            DiagCode::ArgumentType
        };
        self.flag(code, t.span());
    }

    fn args(&mut self, span: SourceSpan, args: &[Term], params: &[TypeExpr]) {
        if args.len() != params.len() {
            self.flag(DiagCode::WrongArgumentCount, span);
            args.iter().for_each(|a| {
                self.term(a);
            });
            return;
        }
        for (a, p) in args.iter().zip(params) {
            self.arg(a, p);
        }
    }

    /// Checks an atomic formula against the predicate table.
    pub fn atom(&mut self, a: &AtomicFormula) -> AtomClass {
        let p = a.predicate.as_str();
        if let Some(sig) = self.model.predicates.get(p) {
            let params: Vec<TypeExpr> = sig.param_types().into_iter().cloned().collect();
            let derived = sig.derived;
            self.args(a.span, &a.args, &params);
            AtomClass::Predicate { derived }
        } else if self.model.types.contains(p) {
            if a.args.len() != 1 {
                self.flag(DiagCode::WrongArgumentCount, a.span);
            }
            a.args.iter().for_each(|t| {
                self.term(t);
            });
            AtomClass::Type
        } else {
            self.flag(DiagCode::UnknownPredicate, a.predicate.span);
            for t in &a.args {
                if let Term::Var(_) = t {
                    self.term(t);
                }
            }
            AtomClass::Unknown
        }
    }

    // ----- goal descriptions and expressions -----

    pub fn gd(&mut self, g: &Gd) {
        match &g.kind {
            GdKind::Atom(a) => {
                self.atom(a);
            }
            GdKind::Equal(a, b) => {
                self.term(a);
                self.term(b);
            }
            GdKind::Not(x) => self.gd(x),
            GdKind::And(xs) | GdKind::Or(xs) => xs.iter().for_each(|x| self.gd(x)),
            GdKind::Imply(a, b) => {
                self.gd(a);
                self.gd(b);
            }
            GdKind::Exists(vars, body) | GdKind::Forall(vars, body) => {
                let d = self.push_vars(vars);
                self.gd(body);
                self.pop_to(d);
            }
            GdKind::Builtin(b) => self.builtin(b),
        }
    }

    fn builtin(&mut self, b: &Builtin) {
        match b {
            Builtin::Eval { expr, value } | Builtin::FluentEval { expr, value } => {
                self.expr(expr);
                self.expr(value);
            }
            Builtin::Test(e) | Builtin::FluentTest(e) => self.expr(e),
            Builtin::BoundedInt { var, low, high } => {
                self.expr(var);
                self.expr(low);
                self.expr(high);
            }
            Builtin::Equation { lhs, rhs } => {
                self.expr(lhs);
                self.expr(rhs);
                let fluent = [lhs, rhs]
                    .iter()
                    .flat_map(|e| e.variables())
                    .any(|v| matches!(self.lookup_var(v), Some(Some(t)) if t.is_fluent()));
                if fluent {
                    self.flag(DiagCode::FluentEquation, lhs.span().to(rhs.span()));
                }
            }
            Builtin::CurrentValue { fluent, value } => {
                self.term(fluent);
                self.term(value);
            }
        }
    }

    pub fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Number(_) => {}
            Expr::Var(v) => {
                if self.lookup_var(v).is_none() {
                    self.flag(DiagCode::UnboundVariable, v.span);
                }
            }
            Expr::Name(n) => {
                if self.lookup_name(n.as_str()).is_none() {
                    self.flag(DiagCode::UnknownName, n.span);
                }
            }
            Expr::Arith { args, .. } => args.iter().for_each(|a| self.expr(a)),
            Expr::Compare { lhs, rhs, .. } => {
                self.expr(lhs);
                self.expr(rhs);
            }
            Expr::Sum {
                vars,
                condition,
                body,
                ..
            } => {
                let d = self.push_vars(vars);
                self.gd(condition);
                self.expr(body);
                self.pop_to(d);
            }
        }
    }

    // ----- effects -----

    pub fn effect(&mut self, e: &Effect) {
        match &e.kind {
            EffectKind::Add(a) | EffectKind::Del(a) => self.asserted_atom(a),
            EffectKind::And(es) => es.iter().for_each(|x| self.effect(x)),
            EffectKind::Forall(vars, body) => {
                let d = self.push_vars(vars);
                self.effect(body);
                self.pop_to(d);
            }
            EffectKind::When(cond, body) => {
                self.gd(cond);
                self.effect(body);
            }
            EffectKind::Change { fluent, value } => {
                if let Some(Some(t)) = self.term(fluent) {
                    if !t.is_fluent() {
                        self.flag(DiagCode::ArgumentType, fluent.span());
                    }
                }
                self.expr(value);
            }
        }
    }

    /// An atom that an effect or an initial state asserts.
    pub fn asserted_atom(&mut self, a: &AtomicFormula) {
        match self.atom(a) {
            AtomClass::Predicate { derived: true } => self.flag(DiagCode::DerivedInEffect, a.span),
            AtomClass::Type => self.flag(DiagCode::TypeNotAssertable, a.span),
            _ => {}
        }
    }

    // ----- action specs -----

    pub fn spec(&mut self, s: &ActionSpec) {
        match &s.kind {
            SpecKind::Action(t) => self.action_term(t),
            SpecKind::NoOp => {}
            SpecKind::InContext { body, conditions } => {
                self.spec(body);
                self.conditions(conditions);
            }
            SpecKind::Choice(xs) | SpecKind::Series(xs) | SpecKind::Parallel(xs) => {
                xs.iter().for_each(|x| self.spec(x))
            }
            SpecKind::Forsome { vars, body } => {
                let d = self.push_vars(vars);
                self.spec(body);
                self.pop_to(d);
            }
            SpecKind::Tag { body, .. } => self.spec(body),
            SpecKind::Foreach {
                vars,
                condition,
                body,
            } => {
                let d = self.push_vars(vars);
                self.gd(condition);
                self.spec(body);
                self.pop_to(d);
            }
            SpecKind::Constrained { specs, constraints } => {
                specs.iter().for_each(|x| self.spec(x));
                constraints.iter().for_each(|c| self.constraint(c));
            }
        }
    }

    fn conditions(&mut self, c: &ContextConditions) {
        if let Some(g) = &c.precondition {
            self.gd(g);
        }
        if let Some(g) = &c.maintain {
            self.gd(g);
        }
        if let Some(e) = &c.effect {
            self.effect(e);
        }
    }

    fn constraint(&mut self, c: &Constraint) {
        match &c.kind {
            ConstraintKind::Label(_) => {}
            ConstraintKind::Series(cs) | ConstraintKind::Parallel(cs) => {
                cs.iter().for_each(|x| self.constraint(x))
            }
            ConstraintKind::InContext { body, conditions } => {
                self.constraint(body);
                self.conditions(conditions);
            }
        }
    }

    fn action_term(&mut self, t: &ActionTerm) {
        match self.model.actions.get(t.functor.as_str()) {
            Some(a) => {
                let params: Vec<TypeExpr> = a.params.iter().map(|(_, t)| t.clone()).collect();
                self.args(t.span, &t.args, &params);
            }
            None => {
                self.flag(DiagCode::UnknownAction, t.functor.span);
                t.args.iter().for_each(|a| {
                    self.term(a);
                });
            }
        }
    }

    // ----- definitions -----

    /// Checks the fields of an action or method body with `params` in scope.
    pub fn body(&mut self, params: &TypedList<Name>, body: &ActionBody) {
        let d = self.push_vars(params);
        let empty = TypedList::default();
        let vars = body.vars.as_ref().unwrap_or(&empty);
        self.push_vars(vars);
        if let Some(g) = &body.precondition {
            self.gd(g);
        }
        if let Some(Expansion::Spec(s)) = &body.expansion {
            self.spec(s);
        }
        if let Some(g) = &body.maintain {
            self.gd(g);
        }
        if let Some(e) = &body.effect {
            self.effect(e);
            let in_pre: Vec<&Name> = body
                .precondition
                .as_ref()
                .map(|g| g.free_variables())
                .unwrap_or_default();
            let in_effect = effect_free_variables(e);
            for v in vars.items() {
                if in_effect.contains(&v) && !in_pre.contains(&v) {
                    self.flag(DiagCode::VarsNotInPrecondition, v.span);
                }
            }
        }
        self.pop_to(d);
    }

    pub fn action(&mut self, def: &ActionDef) {
        self.body(&def.params, &def.body);
        match (&def.body.effect, &def.body.expansion) {
            (Some(_), Some(_)) => self.flag(DiagCode::EffectAndExpansion, def.span),
            (None, None) => self.flag(DiagCode::NoEffectOrExpansion, def.span),
            _ => {}
        }
    }

    pub fn axiom(&mut self, def: &AxiomDef) {
        let d = self.push_vars(&def.vars);
        self.gd(&def.context);
        self.atom(&def.implies.atom);
        self.pop_to(d);
    }

    pub fn method(&mut self, def: &MethodDef) {
        let Some(action) = self.model.actions.get(def.action.as_str()) else {
            self.flag(DiagCode::UnknownAction, def.action.span);
            self.body(&def.params, &def.body);
            return;
        };
        if action.effect.is_some() {
            self.flag(DiagCode::MethodForPrimitive, def.action.span);
        }
        if action.params.len() != def.params.len() {
            self.flag(DiagCode::WrongArgumentCount, def.span);
        }
        self.body(&def.params, &def.body);
    }
}

/// Free variables of an effect, first occurrence order.
pub(crate) fn effect_free_variables(e: &Effect) -> Vec<&Name> {
    fn push<'a>(v: &'a Name, bound: &[&Name], out: &mut Vec<&'a Name>) {
        if !bound.contains(&v) && !out.contains(&v) {
            out.push(v);
        }
    }
    fn terms<'a>(ts: &'a [Term], bound: &[&Name], out: &mut Vec<&'a Name>) {
        for t in ts {
            if let Term::Var(v) = t {
                push(v, bound, out);
            }
        }
    }
    fn go<'a>(e: &'a Effect, bound: &mut Vec<&'a Name>, out: &mut Vec<&'a Name>) {
        match &e.kind {
            EffectKind::Add(a) | EffectKind::Del(a) => terms(&a.args, bound, out),
            EffectKind::And(es) => es.iter().for_each(|x| go(x, bound, out)),
            EffectKind::Forall(vars, body) => {
                let n = bound.len();
                bound.extend(vars.items());
                go(body, bound, out);
                bound.truncate(n);
            }
            EffectKind::When(cond, body) => {
                for v in cond.free_variables() {
                    push(v, bound, out);
                }
                go(body, bound, out);
            }
            EffectKind::Change { fluent, value } => {
                terms(std::slice::from_ref(fluent), bound, out);
                for v in value.variables() {
                    push(v, bound, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(e, &mut Vec::new(), &mut out);
    out
}
