use super::{EvalError, GroundAtom, State, Subst, Value};
use crate::model::{DomainModel, ProblemModel, CURRENT_VALUE};
use crate::numeric::NumericValue;
use crate::syntax::{Literal, Term, TypeExpr};
use std::collections::{BTreeMap, BTreeSet};

/// The unchanging context of evaluation: a domain, its object universe,
/// domain variables, and timeless facts.
#[derive(Debug, Clone)]
pub struct World<'m> {
    pub model: &'m DomainModel,
    /// Object constants with their types; `None` for untyped objects, which
    /// are admitted wherever an object is expected.
    pub objects: BTreeMap<String, Option<TypeExpr>>,
    pub domain_vars: BTreeMap<String, Value>,
    pub timeless_true: BTreeSet<GroundAtom>,
    pub timeless_false: BTreeSet<GroundAtom>,
}

impl<'m> World<'m> {
    /// A world whose universe is the domain's constants plus `objects`.
    pub fn new(
        model: &'m DomainModel,
        objects: impl IntoIterator<Item = (String, Option<TypeExpr>)>,
    ) -> World<'m> {
        let mut all: BTreeMap<String, Option<TypeExpr>> = model
            .constants
            .iter()
            .map(|(k, c)| (k.clone(), c.explicit.then(|| c.ty.clone())))
            .collect();
        all.extend(objects);
        let mut w = World {
            model,
            objects: all,
            domain_vars: BTreeMap::new(),
            timeless_true: BTreeSet::new(),
            timeless_false: BTreeSet::new(),
        };
        for (k, v) in &model.domain_vars {
            if let Some(t) = &v.initial {
                if let Ok(val) = w.ground_term(t, &Subst::new()) {
                    w.domain_vars.insert(k.clone(), val);
                }
            }
        }
        for lit in &model.timeless {
            if let Ok(a) = w.ground_atom(&lit.atom.predicate.canonical, &lit.atom.args, &Subst::new())
            {
                if lit.positive {
                    w.timeless_true.insert(a);
                } else {
                    w.timeless_false.insert(a);
                }
            }
        }
        w
    }

    pub fn for_problem(model: &'m DomainModel, problem: &ProblemModel) -> World<'m> {
        World::new(
            model,
            problem
                .objects
                .iter()
                .map(|(k, c)| (k.clone(), c.explicit.then(|| c.ty.clone()))),
        )
    }

    /// Applies `literals` in order to the empty state: positive ones add,
    /// negative ones delete, and `(current-value f v)` sets a fluent.
    pub fn initial_state(&self, literals: &[Literal]) -> Result<State, EvalError> {
        let mut s = State::default();
        for lit in literals {
            let a = &lit.atom;
            let empty = Subst::new();
            if a.predicate.as_str() == CURRENT_VALUE
                && !self.model.predicates.contains_key(CURRENT_VALUE)
            {
                let [f, v] = a.args.as_slice() else { continue };
                let f = self.ground_term(f, &empty)?;
                let Value::Object(f) = f else {
                    return Err(EvalError::NotAFluent(f.to_string()));
                };
                match self.ground_term(v, &empty)? {
                    Value::Number(n) => {
                        s.fluents.insert(f, n);
                    }
                    other => return Err(EvalError::NotNumeric(other.to_string())),
                }
                continue;
            }
            let g = self.ground_atom(a.predicate.as_str(), &a.args, &empty)?;
            if lit.positive {
                s.atoms.insert(g);
            } else {
                s.atoms.remove(&g);
            }
        }
        Ok(s)
    }

    pub fn ground_term(&self, t: &Term, sigma: &Subst) -> Result<Value, EvalError> {
        match t {
            Term::Name(n) => Ok(Value::Object(n.canonical.clone())),
            Term::Number(n) => Ok(Value::Number(n.value)),
            Term::Var(v) => sigma
                .get(v.as_str())
                .cloned()
                .ok_or_else(|| EvalError::Unbound(v.canonical.clone())),
        }
    }

    pub fn ground_atom(
        &self,
        predicate: &str,
        args: &[Term],
        sigma: &Subst,
    ) -> Result<GroundAtom, EvalError> {
        Ok(GroundAtom {
            predicate: predicate.to_string(),
            args: args
                .iter()
                .map(|t| self.ground_term(t, sigma))
                .collect::<Result<_, _>>()?,
        })
    }

    /// Whether `v` belongs to type `t`.
    pub fn has_type(&self, v: &Value, t: &TypeExpr) -> bool {
        let h = &self.model.types;
        match v {
            Value::Number(n) => h.number_fits(n.as_integer().is_some(), t),
            Value::Object(o) => match self.objects.get(o) {
                Some(Some(ot)) => h.subtype_of(ot, t),
                Some(None) => !t.is_fluent() && !type_is_numeric(h, t),
                None => false,
            },
        }
    }

    /// Every value of type `t` (`None`: any object). Numeric types cannot be
    /// enumerated.
    pub fn universe(&self, var: &str, t: Option<&TypeExpr>) -> Result<Vec<Value>, EvalError> {
        if let Some(t) = t {
            if type_is_numeric(&self.model.types, t) {
                return Err(EvalError::Unenumerable(var.to_string()));
            }
        }
        Ok(self
            .objects
            .keys()
            .map(|o| Value::Object(o.clone()))
            .filter(|v| t.is_none_or(|t| self.has_type(v, t)))
            .collect())
    }

    /// Objects that denote fluents.
    pub fn is_fluent(&self, object: &str, state: &State) -> bool {
        state.fluents.contains_key(object)
            || matches!(self.objects.get(object), Some(Some(t)) if t.is_fluent())
    }

    pub fn fluent_value(&self, object: &str, state: &State) -> Result<NumericValue, EvalError> {
        state
            .fluents
            .get(object)
            .copied()
            .ok_or_else(|| EvalError::NoFluentValue(object.to_string()))
    }
}

fn type_is_numeric(h: &crate::model::TypeHierarchy, t: &TypeExpr) -> bool {
    match t {
        TypeExpr::Atom(a) => h.is_numeric(a.as_str()),
        TypeExpr::Either(ms) => ms.iter().any(|m| type_is_numeric(h, m)),
        TypeExpr::Fluent(_) => false,
    }
}
