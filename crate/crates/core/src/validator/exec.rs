use crate::model::ActionSchema;
use crate::numeric::NumericValue;
use crate::state::eval::{scope_of, VarTypes};
use crate::state::{EvalError, Evaluator, GroundAtom, State, Subst, Value, World};
use crate::syntax::{Effect, EffectKind, Name, SourceSpan};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// A ground action term, e.g. `(mov-b home office)`.
/// Equality and order ignore `span`.
#[derive(Debug, Clone)]
pub struct GroundAction {
    pub functor: String,
    pub args: Vec<Value>,
    /// Where the step was written, when it came from a file.
    pub span: Option<SourceSpan>,
}

impl PartialEq for GroundAction {
    fn eq(&self, other: &Self) -> bool {
        self.functor == other.functor && self.args == other.args
    }
}

impl Eq for GroundAction {}

impl PartialOrd for GroundAction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroundAction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.functor, &self.args).cmp(&(&other.functor, &other.args))
    }
}

impl std::hash::Hash for GroundAction {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.functor.hash(h);
        self.args.hash(h);
    }
}

impl GroundAction {
    pub fn new(functor: &str, args: impl IntoIterator<Item = Value>) -> GroundAction {
        GroundAction {
            functor: functor.to_ascii_lowercase(),
            args: args.into_iter().collect(),
            span: None,
        }
    }

    /// Shorthand over object constants: `GroundAction::of("take-out", &["p"])`.
    pub fn of(functor: &str, args: &[&str]) -> GroundAction {
        GroundAction::new(functor, args.iter().map(|a| Value::object(a)))
    }

    /// Same functor and arguments, ignoring where either was written.
    pub fn same_term(&self, other: &GroundAction) -> bool {
        self.functor == other.functor && self.args == other.args
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.functor)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for GroundAction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("undeclared action {0}")]
    UnknownAction(String),
    #[error("{action} takes {expected} argument(s), got {got}")]
    Arity {
        action: String,
        expected: usize,
        got: usize,
    },
    #[error("argument {index} of {action} is not of type {ty}")]
    ArgumentType {
        action: String,
        index: usize,
        ty: String,
    },
    #[error("{0} is not primitive")]
    NotPrimitive(String),
    #[error("precondition of {0} is false")]
    Inapplicable(String),
    #[error("{action} has more than one instance of its :vars satisfying the precondition ({witnesses})")]
    MultipleWitnesses { action: String, witnesses: String },
    #[error("{0} would change timeless fact {1}")]
    TimelessViolation(String, String),
    #[error("{0} would change derived fact {1}")]
    DerivedInDelta(String, String),
    #[error("{0} changes fluent {1} to two different values")]
    ConflictingChange(String, String),
    #[error("{0}")]
    Eval(#[from] EvalError),
}

/// The net result of one action: computed entirely in the state before it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EffectDelta {
    pub adds: BTreeSet<GroundAtom>,
    pub dels: BTreeSet<GroundAtom>,
    pub changes: BTreeMap<String, NumericValue>,
}

impl EffectDelta {
    pub fn is_empty(&self) -> bool {
        self.adds.is_empty() && self.dels.is_empty() && self.changes.is_empty()
    }
}

fn schema<'m>(world: &World<'m>, action: &GroundAction) -> Result<&'m ActionSchema, StepError> {
    world
        .model
        .actions
        .get(&action.functor)
        .ok_or_else(|| StepError::UnknownAction(action.functor.clone()))
}

/// Binds the parameters of `schema` to the arguments of `action`, checking
/// arity and declared types.
pub fn bind_parameters(
    world: &World,
    schema_params: &crate::syntax::TypedList<Name>,
    action: &GroundAction,
) -> Result<Subst, StepError> {
    if schema_params.len() != action.args.len() {
        return Err(StepError::Arity {
            action: action.functor.clone(),
            expected: schema_params.len(),
            got: action.args.len(),
        });
    }
    let mut sigma = Subst::new();
    for (i, ((p, t), v)) in schema_params.declared().zip(&action.args).enumerate() {
        if let Some(t) = t {
            if !world.has_type(v, t) {
                return Err(StepError::ArgumentType {
                    action: action.functor.clone(),
                    index: i + 1,
                    ty: t.to_string(),
                });
            }
        } else if !world.objects.contains_key(v.as_object().unwrap_or_default())
            && matches!(v, Value::Object(_))
        {
            return Err(StepError::Eval(EvalError::UnknownName(v.to_string())));
        }
        sigma.insert(p.canonical.clone(), v.clone());
    }
    Ok(sigma)
}

/// The schema's parameter and `:vars` declarations.
pub fn action_scope(s: &ActionSchema) -> VarTypes {
    let mut scope = scope_of(&s.params);
    scope.extend(scope_of(&s.vars));
    scope
}

/// Checks that `action` can be executed in the evaluator's state and
/// returns its parameters extended by the unique `:vars` witness.
pub fn applicable(ev: &Evaluator, action: &GroundAction) -> Result<Subst, StepError> {
    let s = schema(ev.world, action)?;
    if !s.is_primitive() {
        return Err(StepError::NotPrimitive(action.to_string()));
    }
    let sigma = bind_parameters(ev.world, &s.params, action)?;
    let Some(pre) = &s.precondition else {
        return Ok(sigma);
    };
    let scope = action_scope(s);
    let sols = ev.solutions(pre, &sigma, &scope)?;
    let vars: Vec<&str> = s.vars.items().map(Name::as_str).collect();
    let mut witnesses: BTreeSet<Subst> = BTreeSet::new();
    for sol in &sols {
        witnesses.insert(
            sol.iter()
                .filter(|(k, _)| vars.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        );
    }
    match witnesses.len() {
        0 => Err(StepError::Inapplicable(action.to_string())),
        1 => {
            let mut out = sigma;
            out.extend(witnesses.into_iter().next().expect("one witness"));
            Ok(out)
        }
        _ => Err(StepError::MultipleWitnesses {
            action: action.to_string(),
            witnesses: witnesses
                .iter()
                .map(|w| {
                    w.iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join("; "),
        }),
    }
}

/// Computes the delta of `effect` under `sigma`, evaluating every `when`
/// condition and `change` value in the evaluator's (pre-)state.
pub fn effect_delta(
    ev: &Evaluator,
    effect: &Effect,
    sigma: &Subst,
    scope: &VarTypes,
) -> Result<EffectDelta, StepError> {
    let mut delta = EffectDelta::default();
    collect(ev, effect, sigma, scope, &mut delta)?;
    Ok(delta)
}

fn collect(
    ev: &Evaluator,
    effect: &Effect,
    sigma: &Subst,
    scope: &VarTypes,
    delta: &mut EffectDelta,
) -> Result<(), StepError> {
    match &effect.kind {
        EffectKind::Add(a) => {
            delta
                .adds
                .insert(ev.world.ground_atom(a.predicate.as_str(), &a.args, sigma)?);
        }
        EffectKind::Del(a) => {
            delta
                .dels
                .insert(ev.world.ground_atom(a.predicate.as_str(), &a.args, sigma)?);
        }
        EffectKind::And(es) => {
            for e in es {
                collect(ev, e, sigma, scope, delta)?;
            }
        }
        EffectKind::Forall(vars, body) => {
            let mut inner_scope = scope.clone();
            let mut inner = sigma.clone();
            for (v, t) in vars.declared() {
                inner_scope.insert(v.canonical.clone(), t.cloned());
                inner.remove(v.as_str());
            }
            let names: Vec<&str> = vars.items().map(Name::as_str).collect();
            for s in ev.ground_vars(&names, &inner, &inner_scope)? {
                collect(ev, body, &s, &inner_scope, delta)?;
            }
        }
        EffectKind::When(cond, body) => {
            for s in ev.solutions(cond, sigma, scope)? {
                collect(ev, body, &s, scope, delta)?;
            }
        }
        EffectKind::Change { fluent, value } => {
            let f = ev.world.ground_term(fluent, sigma)?;
            let name = match &f {
                Value::Object(o) if ev.world.is_fluent(o, ev.state) => o.clone(),
                _ => return Err(EvalError::NotAFluent(f.to_string()).into()),
            };
            let v = ev.eval(value, sigma, true)?;
            if let Some(old) = delta.changes.insert(name.clone(), v) {
                if old != v {
                    return Err(StepError::ConflictingChange(String::new(), name));
                }
            }
        }
    }
    Ok(())
}

/// Applies `delta` to `state`. Adds win over deletes of the same atom.
/// Timeless and derived facts cannot be changed.
pub fn apply(world: &World, state: &State, delta: &EffectDelta) -> Result<State, StepError> {
    for a in delta.adds.iter().chain(&delta.dels) {
        if world.timeless_true.contains(a) || world.timeless_false.contains(a) {
            return Err(StepError::TimelessViolation(String::new(), a.to_string()));
        }
        if world.model.is_derived(&a.predicate) {
            return Err(StepError::DerivedInDelta(String::new(), a.to_string()));
        }
    }
    let mut next = state.clone();
    for a in &delta.dels {
        next.atoms.remove(a);
    }
    next.atoms.extend(delta.adds.iter().cloned());
    next.fluents
        .extend(delta.changes.iter().map(|(k, v)| (k.clone(), *v)));
    Ok(next)
}

/// One step: applicability, delta, and successor state.
pub fn step(world: &World, state: &State, action: &GroundAction) -> Result<(EffectDelta, State), StepError> {
    let ev = Evaluator::new(world, state)?;
    let sigma = applicable(&ev, action)?;
    let s = schema(world, action)?;
    let delta = match &s.effect {
        Some(e) => effect_delta(&ev, e, &sigma, &action_scope(s))?,
        None => EffectDelta::default(),
    };
    let name = action.to_string();
    let next = apply(world, state, &delta).map_err(|e| match e {
        StepError::TimelessViolation(_, a) => StepError::TimelessViolation(name.clone(), a),
        StepError::DerivedInDelta(_, a) => StepError::DerivedInDelta(name.clone(), a),
        other => other,
    })?;
    Ok((delta, next))
}

/// The situations S_0..S_n reached by a plan, stopping at the first step
/// that cannot be executed.
#[derive(Debug, Clone)]
pub struct Execution {
    pub states: Vec<State>,
    pub deltas: Vec<EffectDelta>,
    /// 1-based index of the failed step and why.
    pub failure: Option<(usize, StepError)>,
}

impl Execution {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    pub fn final_state(&self) -> &State {
        self.states.last().expect("initial state present")
    }
}

pub fn execute(world: &World, init: State, plan: &[GroundAction]) -> Execution {
    let mut ex = Execution {
        states: vec![init],
        deltas: Vec::new(),
        failure: None,
    };
    for (i, a) in plan.iter().enumerate() {
        match step(world, ex.final_state(), a) {
            Ok((delta, next)) => {
                ex.deltas.push(delta);
                ex.states.push(next);
            }
            Err(e) => {
                let e = match e {
                    StepError::ConflictingChange(_, f) => StepError::ConflictingChange(a.to_string(), f),
                    e => e,
                };
                ex.failure = Some((i + 1, e));
                break;
            }
        }
    }
    ex
}
