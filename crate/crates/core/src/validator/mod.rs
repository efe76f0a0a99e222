//! Plan validation: executing a plan and deciding whether it solves a
//! problem.

mod exec;
mod solution;

pub use exec::{
    action_scope, applicable, apply, bind_parameters, effect_delta, execute, step, EffectDelta, Execution,
    GroundAction, StepError,
};
pub use solution::{check_hints, parse_hints, parse_solution, Solution};

use crate::expansion::{uncovered_steps, Anchored, Node, Searcher, Verifier, DEFAULT_BUDGET};
use crate::model::{DomainModel, ProblemModel, Requirement};
use crate::state::{Evaluator, State, Subst, World};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Solves,
    Fails,
    /// The problem needs a requirement the validator does not support.
    Refused,
}

/// The condition of the "solves" relation that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    Feasibility,
    Goal,
    Expansion,
    OnlyInExpansions,
    Safety,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Feasibility => "feasibility",
            Clause::Goal => "goal",
            Clause::Expansion => "expansion",
            Clause::OnlyInExpansions => "only-in-expansions",
            Clause::Safety => "safety",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepTrace {
    /// 1-based.
    pub step: usize,
    pub action: GroundAction,
    /// Digest of the state after the step, when it executed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<EffectDelta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionResult {
    /// `:expansion` or the hint term.
    pub target: String,
    pub satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub nodes_searched: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realization: Option<Rc<Node>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub problem: String,
    pub domain: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_clause: Option<Clause>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub initial_state: String,
    pub steps: Vec<StepTrace>,
    pub expansions: Vec<ExpansionResult>,
    /// Steps of only-in-expansions actions no expansion or hint covers.
    pub uncovered: Vec<usize>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn solves(&self) -> bool {
        self.verdict == Verdict::Solves
    }

    fn fail(&mut self, clause: Clause, reason: impl Into<String>) {
        if self.failed_clause.is_none() {
            self.verdict = Verdict::Fails;
            self.failed_clause = Some(clause);
            self.reason = Some(reason.into());
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::Solves => writeln!(f, "{}: solves", self.problem)?,
            Verdict::Refused => writeln!(
                f,
                "{}: refused: {}",
                self.problem,
                self.reason.as_deref().unwrap_or_default()
            )?,
            Verdict::Fails => {
                writeln!(
                    f,
                    "{}: fails ({}): {}",
                    self.problem,
                    self.failed_clause.map(|c| c.to_string()).unwrap_or_default(),
                    self.reason.as_deref().unwrap_or_default()
                )?;
                writeln!(f, "  S0 {}", self.initial_state)?;
                for s in &self.steps {
                    match (&s.state, &s.error) {
                        (_, Some(e)) => writeln!(f, "  {:>3} {}  error: {e}", s.step, s.action)?,
                        (Some(d), None) => writeln!(f, "  {:>3} {}  -> {d}", s.step, s.action)?,
                        (None, None) => writeln!(f, "  {:>3} {}", s.step, s.action)?,
                    }
                }
            }
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    /// Check only the plan and the problem's own expansion.
    pub ignore_hints: bool,
    pub budget: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            ignore_hints: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Decides whether `solution` solves `problem`.
pub fn solves(
    model: &DomainModel,
    problem: &ProblemModel,
    solution: &Solution,
    options: ValidateOptions,
) -> ValidationReport {
    let mut report = ValidationReport {
        problem: problem.name.canonical.clone(),
        domain: model.name.canonical.clone(),
        verdict: Verdict::Solves,
        failed_clause: None,
        reason: None,
        initial_state: String::new(),
        steps: Vec::new(),
        expansions: Vec::new(),
        uncovered: Vec::new(),
        warnings: Vec::new(),
    };
    for r in [Requirement::OpenWorld, Requirement::TrueNegation] {
        if problem.requirements.contains(r) || model.requirements.contains(r) {
            report.verdict = Verdict::Refused;
            report.reason = Some(format!("unsupported requirement {}", r.keyword()));
            return report;
        }
    }
    let world = World::for_problem(model, problem);
    let init = match world.initial_state(&problem.initial) {
        Ok(s) => s,
        Err(e) => {
            report.fail(Clause::Feasibility, format!("initial situation: {e}"));
            return report;
        }
    };
    report.initial_state = init.digest();
    let ex = execute(&world, init, &solution.steps);
    for (i, a) in solution.steps.iter().enumerate() {
        let error = match &ex.failure {
            Some((n, e)) if *n == i + 1 => Some(e.to_string()),
            _ => None,
        };
        report.steps.push(StepTrace {
            step: i + 1,
            action: a.clone(),
            state: ex.states.get(i + 1).map(State::digest),
            delta: ex.deltas.get(i).cloned(),
            error,
        });
        if ex.failure.as_ref().is_some_and(|(n, _)| *n == i + 1) {
            break;
        }
    }
    if let Some((n, e)) = &ex.failure {
        report.fail(Clause::Feasibility, format!("step {n}: {e}"));
        return report;
    }
    if let Some(len) = problem.length.as_ref().and_then(|l| l.serial) {
        if solution.steps.len() as u64 > len {
            report.warnings.push(format!(
                "plan has {} steps; the problem announces a solution of length {len}",
                solution.steps.len()
            ));
        }
    }

    let final_ev = match Evaluator::new(&world, ex.final_state()) {
        Ok(ev) => ev,
        Err(e) => {
            report.fail(Clause::Goal, e.to_string());
            return report;
        }
    };
    if let Some(goal) = problem.goal() {
        match final_ev.holds(&goal, &Subst::new(), &Default::default()) {
            Ok(true) => {}
            Ok(false) => report.fail(Clause::Goal, "goal is false in the final situation"),
            Err(e) => report.fail(Clause::Goal, e.to_string()),
        }
    }

    let covered = check_expansions(&world, &ex, model, problem, solution, options, &mut report);

    let uncovered = uncovered_steps(model, &solution.steps, &covered);
    report.uncovered = uncovered.iter().copied().collect();
    if let Some(first) = uncovered.first() {
        report.fail(
            Clause::OnlyInExpansions,
            format!("step {first} is only allowed in expansions and no expansion covers it"),
        );
    }

    check_safety(&world, &ex, model, &mut report);
    report
}

fn check_expansions(
    world: &World,
    ex: &Execution,
    model: &DomainModel,
    problem: &ProblemModel,
    solution: &Solution,
    options: ValidateOptions,
    report: &mut ValidationReport,
) -> BTreeSet<usize> {
    let mut covered = BTreeSet::new();
    let hints: &[GroundAction] = if options.ignore_hints { &[] } else { &solution.hints };
    if problem.expansions.is_empty() && hints.is_empty() {
        return covered;
    }
    let anchored = Anchored::new(world, &ex.states, &solution.steps);
    let mut searcher = match Searcher::new(anchored, options.budget) {
        Ok(s) => s,
        Err(e) => {
            report.fail(Clause::Expansion, e.to_string());
            return covered;
        }
    };
    enum Target<'t> {
        Spec(&'t crate::syntax::ActionSpec),
        Hint(&'t GroundAction),
    }
    let targets = problem
        .expansions
        .iter()
        .map(Target::Spec)
        .chain(hints.iter().map(Target::Hint));
    for t in targets {
        let before = searcher.used();
        let (name, result) = match t {
            Target::Spec(s) => (":expansion".to_string(), searcher.satisfies(s, &Subst::new(), &Default::default())),
            Target::Hint(h) => {
                if model.actions.get(&h.functor).is_some_and(|a| a.is_primitive()) {
                    report.fail(Clause::Expansion, format!("hint {h} is not a nonprimitive action"));
                    continue;
                }
                (h.to_string(), searcher.satisfies_action(h))
            }
        };
        let mut entry = ExpansionResult {
            target: name.clone(),
            satisfied: false,
            error: None,
            nodes_searched: searcher.used() - before,
            realization: None,
        };
        match result {
            Ok(sat) => {
                covered.extend(sat.covered.iter().copied());
                if let Some(root) = &sat.realization {
                    let checked = Verifier::new(anchored).and_then(|mut v| {
                        match t {
                            Target::Spec(s) => v.verify(s, &Subst::new(), &Default::default(), root)?,
                            Target::Hint(_) => v.verify_action(root)?,
                        }
                        Ok(v.warnings)
                    });
                    match checked {
                        Ok(w) => {
                            report.warnings.extend(w);
                            entry.satisfied = true;
                        }
                        Err(e) => entry.error = Some(format!("realization failed verification: {e}")),
                    }
                }
                entry.realization = sat.realization;
            }
            Err(e) => entry.error = Some(e.to_string()),
        }
        if !entry.satisfied {
            let why = entry.error.clone().unwrap_or_else(|| "no realization in the plan".into());
            report.fail(Clause::Expansion, format!("{name}: {why}"));
        }
        report.expansions.push(entry);
    }
    covered
}

fn check_safety(world: &World, ex: &Execution, model: &DomainModel, report: &mut ValidationReport) {
    if model.safety.is_empty() {
        return;
    }
    let last = ex.states.len() - 1;
    for (i, st) in ex.states.iter().enumerate() {
        let ev = match Evaluator::new(world, st) {
            Ok(ev) => ev,
            Err(e) => {
                report.fail(Clause::Safety, e.to_string());
                return;
            }
        };
        for s in &model.safety {
            match ev.holds(&s.gd, &Subst::new(), &Default::default()) {
                Ok(true) => {}
                Ok(false) if i == last => {
                    report.fail(Clause::Safety, "a safety constraint is false in the final situation")
                }
                Ok(false) => report
                    .warnings
                    .push(format!("a safety constraint is false in S{i} (restored by the end)")),
                Err(e) => report.fail(Clause::Safety, e.to_string()),
            }
        }
    }
}
