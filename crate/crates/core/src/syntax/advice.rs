//! Removal of `(^^ e a)` advice annotations.
//!
//! Advice never changes the meaning of an expression, so the semantic layers
//! work on stripped trees and only the printer looks at the payloads.

use super::ast::*;

pub trait StripAdvice: Sized {
    fn strip_advice_in_place(&mut self);

    fn strip_advice(mut self) -> Self {
        self.strip_advice_in_place();
        self
    }
}

impl<T: StripAdvice> StripAdvice for Option<T> {
    fn strip_advice_in_place(&mut self) {
        if let Some(x) = self {
            x.strip_advice_in_place();
        }
    }
}

impl<T: StripAdvice> StripAdvice for Vec<T> {
    fn strip_advice_in_place(&mut self) {
        self.iter_mut().for_each(T::strip_advice_in_place);
    }
}

impl<T: StripAdvice> StripAdvice for Box<T> {
    fn strip_advice_in_place(&mut self) {
        (**self).strip_advice_in_place();
    }
}

impl StripAdvice for Expr {
    fn strip_advice_in_place(&mut self) {
        match self {
            Expr::Arith { args, .. } => args.strip_advice_in_place(),
            Expr::Compare { lhs, rhs, .. } => {
                lhs.strip_advice_in_place();
                rhs.strip_advice_in_place();
            }
            Expr::Sum {
                condition, body, ..
            } => {
                condition.strip_advice_in_place();
                body.strip_advice_in_place();
            }
            Expr::Number(_) | Expr::Var(_) | Expr::Name(_) => {}
        }
    }
}

impl StripAdvice for Builtin {
    fn strip_advice_in_place(&mut self) {
        match self {
            Builtin::Eval { expr, value } | Builtin::FluentEval { expr, value } => {
                expr.strip_advice_in_place();
                value.strip_advice_in_place();
            }
            Builtin::Test(e) | Builtin::FluentTest(e) => e.strip_advice_in_place(),
            Builtin::BoundedInt { var, low, high } => {
                var.strip_advice_in_place();
                low.strip_advice_in_place();
                high.strip_advice_in_place();
            }
            Builtin::Equation { lhs, rhs } => {
                lhs.strip_advice_in_place();
                rhs.strip_advice_in_place();
            }
            Builtin::CurrentValue { .. } => {}
        }
    }
}

impl StripAdvice for Gd {
    fn strip_advice_in_place(&mut self) {
        self.advice.clear();
        match &mut self.kind {
            GdKind::Not(g) => g.strip_advice_in_place(),
            GdKind::And(gs) | GdKind::Or(gs) => gs.strip_advice_in_place(),
            GdKind::Imply(a, b) => {
                a.strip_advice_in_place();
                b.strip_advice_in_place();
            }
            GdKind::Exists(_, g) | GdKind::Forall(_, g) => g.strip_advice_in_place(),
            GdKind::Builtin(b) => b.strip_advice_in_place(),
            GdKind::Atom(_) | GdKind::Equal(..) => {}
        }
    }
}

impl StripAdvice for Effect {
    fn strip_advice_in_place(&mut self) {
        self.advice.clear();
        match &mut self.kind {
            EffectKind::And(es) => es.strip_advice_in_place(),
            EffectKind::Forall(_, e) => e.strip_advice_in_place(),
            EffectKind::When(g, e) => {
                g.strip_advice_in_place();
                e.strip_advice_in_place();
            }
            EffectKind::Change { value, .. } => value.strip_advice_in_place(),
            EffectKind::Add(_) | EffectKind::Del(_) => {}
        }
    }
}

impl StripAdvice for ContextConditions {
    fn strip_advice_in_place(&mut self) {
        self.precondition.strip_advice_in_place();
        self.maintain.strip_advice_in_place();
        self.effect.strip_advice_in_place();
    }
}

impl StripAdvice for Constraint {
    fn strip_advice_in_place(&mut self) {
        match &mut self.kind {
            ConstraintKind::Series(cs) | ConstraintKind::Parallel(cs) => cs.strip_advice_in_place(),
            ConstraintKind::InContext { body, conditions } => {
                body.strip_advice_in_place();
                conditions.strip_advice_in_place();
            }
            ConstraintKind::Label(_) => {}
        }
    }
}

impl StripAdvice for ActionSpec {
    fn strip_advice_in_place(&mut self) {
        self.advice.clear();
        match &mut self.kind {
            SpecKind::InContext { body, conditions } => {
                body.strip_advice_in_place();
                conditions.strip_advice_in_place();
            }
            SpecKind::Choice(ss) | SpecKind::Series(ss) | SpecKind::Parallel(ss) => {
                ss.strip_advice_in_place()
            }
            SpecKind::Forsome { body, .. } | SpecKind::Tag { body, .. } => body.strip_advice_in_place(),
            SpecKind::Foreach {
                condition, body, ..
            } => {
                condition.strip_advice_in_place();
                body.strip_advice_in_place();
            }
            SpecKind::Constrained { specs, constraints } => {
                specs.strip_advice_in_place();
                constraints.strip_advice_in_place();
            }
            SpecKind::Action(_) | SpecKind::NoOp => {}
        }
    }
}

impl StripAdvice for Expansion {
    fn strip_advice_in_place(&mut self) {
        if let Expansion::Spec(s) = self {
            s.strip_advice_in_place();
        }
    }
}

impl StripAdvice for ActionBody {
    fn strip_advice_in_place(&mut self) {
        self.precondition.strip_advice_in_place();
        self.expansion.strip_advice_in_place();
        self.maintain.strip_advice_in_place();
        self.effect.strip_advice_in_place();
    }
}

impl StripAdvice for ActionDef {
    fn strip_advice_in_place(&mut self) {
        self.body.strip_advice_in_place();
    }
}

impl StripAdvice for MethodDef {
    fn strip_advice_in_place(&mut self) {
        self.body.strip_advice_in_place();
    }
}

impl StripAdvice for AxiomDef {
    fn strip_advice_in_place(&mut self) {
        self.context.strip_advice_in_place();
    }
}

impl StripAdvice for Definition {
    fn strip_advice_in_place(&mut self) {
        match self {
            Definition::Domain(d) => {
                d.safety.strip_advice_in_place();
                d.actions.strip_advice_in_place();
                d.axioms.strip_advice_in_place();
                d.methods.strip_advice_in_place();
            }
            Definition::Problem(p) => {
                p.goals.strip_advice_in_place();
                p.expansions.strip_advice_in_place();
            }
            Definition::Situation(_) => {}
            Definition::Addendum(a) => {
                a.safety.strip_advice_in_place();
                a.actions.strip_advice_in_place();
                a.axioms.strip_advice_in_place();
                a.methods.strip_advice_in_place();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parser::Parser, read_str, FileId};

    fn gd(text: &str) -> Gd {
        let e = read_str(text, FileId(0)).0.remove(0);
        Parser::new(false).gd(&e).unwrap()
    }

    #[test]
    fn strips_nested_and_deep() {
        let plain = gd("(and (at b ?m) (not (= ?m ?l)))");
        let advised = gd("(and (^^ (at B ?m) (goal-type: achievable)) (^^ (^^ (not (= ?m ?l)) a1) a2))");
        assert_ne!(plain, advised);
        assert_eq!(plain, advised.strip_advice());
    }

    #[test]
    fn identity_without_advice() {
        let g = gd("(or (p) (q))");
        assert_eq!(g.clone().strip_advice(), g);
    }
}
