//! Whether an executed plan carries out an action spec: a search for a
//! realization mapping each spec occurrence to a union of intervals over
//! the plan's time points, plus an independent checker for the result.

mod alternatives;
mod interval;
mod search;
mod verify;

pub use alternatives::{alternatives, Alternative};
pub use interval::{series_constraint_check, IntervalUnion};
pub use search::{Node, Satisfaction, Searcher, DEFAULT_BUDGET};
pub use verify::Verifier;

use crate::model::DomainModel;
use crate::state::{EvalError, State, World};
use crate::validator::{GroundAction, StepError};
use std::collections::BTreeSet;
use thiserror::Error;

/// An initial situation plus a feasible plan and the situations it
/// passes through: `states[i]` is the situation after `steps[..i]`.
#[derive(Clone, Copy)]
pub struct Anchored<'a> {
    pub world: &'a World<'a>,
    pub states: &'a [State],
    pub steps: &'a [GroundAction],
}

impl<'a> Anchored<'a> {
    pub fn new(world: &'a World<'a>, states: &'a [State], steps: &'a [GroundAction]) -> Anchored<'a> {
        assert_eq!(states.len(), steps.len() + 1, "one situation per time point");
        Anchored { world, states, steps }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpansionError {
    #[error("search budget of {0} nodes exhausted")]
    Budget(u64),
    #[error("undeclared action {0}")]
    UnknownAction(String),
    #[error("{0}")]
    Step(#[from] StepError),
    #[error("{0}")]
    Eval(#[from] EvalError),
}

/// Steps of only-in-expansions actions that no realization covers.
pub fn uncovered_steps(model: &DomainModel, steps: &[GroundAction], covered: &BTreeSet<usize>) -> BTreeSet<usize> {
    steps
        .iter()
        .enumerate()
        .filter(|(_, q)| model.actions.get(&q.functor).is_some_and(|a| a.only_in_expansions))
        .map(|(i, _)| i + 1)
        .filter(|i| !covered.contains(i))
        .collect()
}
