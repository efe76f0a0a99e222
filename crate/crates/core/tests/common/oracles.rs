//! Differential checks shared by the module tests and the acceptance run.

use super::spec_oracle::{random_case, spec_text, Oracle, Run, Spec, DOMAIN};
use super::{inline, solution, validate};
use pddl::corpus::{generate_random_strips, StripsLimits};
use pddl::expansion::{Anchored, Searcher, Verifier, DEFAULT_BUDGET};
use pddl::state::{Evaluator, GroundAtom, State, Subst, World};
use pddl::validator::{execute, step, GroundAction};
use pddl::Session;
use std::collections::BTreeSet;

#[derive(Debug, Default)]
pub struct Agreement {
    pub checked: u64,
    /// Human-readable descriptions of the first few disagreements.
    pub disagreements: Vec<String>,
    pub positives: u64,
}

impl Agreement {
    fn record(&mut self, agree: bool, positive: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        self.positives += u64::from(positive);
        if !agree {
            self.disagreements.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.disagreements.is_empty()
    }
}

fn goal_holds(w: &World, state: &State, p: &pddl::model::ProblemModel) -> bool {
    let ev = Evaluator::new(w, state).unwrap();
    p.goal().is_none_or(|g| ev.holds(&g, &Subst::new(), &Default::default()).unwrap())
}

/// Validator acceptance against the brute-force simulator on every plan of
/// length `<= depth`, for each seed. Plans are enumerated depth-first with
/// shared prefixes; the full `solves` pipeline runs on the simulator's BFS
/// plan and a sample of others.
pub fn random_strips_agreement(seeds: std::ops::Range<u64>, depth: usize) -> Agreement {
    let mut out = Agreement::default();
    for seed in seeds {
        let inst = generate_random_strips(seed, StripsLimits::default());
        let s = inline(&[&inst.domain_text(), &inst.problem_text()]);
        let p = s.registry.problem(&inst.problem_name()).unwrap();
        let m = s.registry.domain(&inst.domain_name()).unwrap();
        let w = World::for_problem(m, p);
        let init = w.initial_state(&p.initial).unwrap();
        let ground = inst.ground_actions();
        let actions: Vec<GroundAction> = ground
            .iter()
            .map(|g| solution(&format!("({})", inst.step_text(g))).steps.remove(0))
            .collect();
        let mut stack = vec![(Vec::<usize>::new(), Some(init.clone()))];
        while let Some((plan, state)) = stack.pop() {
            let steps: Vec<_> = plan.iter().map(|&i| ground[i].clone()).collect();
            let ours = state.as_ref().is_some_and(|st| goal_holds(&w, st, p));
            let theirs = inst.accepts(&steps);
            out.record(ours == theirs, theirs, || format!("seed {seed}: {}", inst.plan_text(&steps)));
            if plan.len() < depth {
                for (i, a) in actions.iter().enumerate() {
                    let next = state.as_ref().and_then(|st| step(&w, st, a).ok().map(|(_, n)| n));
                    let mut longer = plan.clone();
                    longer.push(i);
                    stack.push((longer, next));
                }
            }
        }
        if let Some(plan) = inst.bfs() {
            let r = validate(&s, &inst.problem_name(), &inst.plan_text(&plan));
            out.record(r.solves(), true, || format!("seed {seed}: bfs plan rejected: {r}"));
        }
        for (i, g) in ground.iter().enumerate().take(5) {
            let plan = [g.clone(), ground[(i * 7 + seed as usize) % ground.len()].clone()];
            let r = validate(&s, &inst.problem_name(), &inst.plan_text(&plan));
            let theirs = inst.accepts(&plan);
            out.record(r.solves() == theirs, theirs, || format!("seed {seed}: {}: {r}", inst.plan_text(&plan)));
            let ex = execute(&w, init.clone(), &actions[i..=i]);
            out.record(ex.succeeded() == inst.successor(&inst.init, g).is_some(), false, || {
                format!("seed {seed}: applicability of {}", inst.step_text(g))
            });
        }
    }
    out
}

/// Runs the library search on `spec` against `run`, verifying any
/// realization it returns.
pub fn search(spec: &Spec, run: &Run) -> (bool, BTreeSet<usize>) {
    let s = inline(&[DOMAIN, &run.problem_text("case", spec)]);
    search_in(&s, run)
}

pub fn search_in(s: &Session, run: &Run) -> (bool, BTreeSet<usize>) {
    let p = s.registry.problem("case").unwrap();
    let m = s.registry.domain("toggles").unwrap();
    let w = World::for_problem(m, p);
    let init = w.initial_state(&p.initial).unwrap();
    let plan = solution(&run.plan_text()).steps;
    let ex = execute(&w, init, &plan);
    assert!(ex.succeeded());
    let anchored = Anchored::new(&w, &ex.states, &plan);
    let mut searcher = Searcher::new(anchored, DEFAULT_BUDGET).unwrap();
    let spec = &p.expansions[0];
    let sat = searcher.satisfies(spec, &Subst::new(), &Default::default()).unwrap();
    if let Some(root) = &sat.realization {
        let mut v = Verifier::new(anchored).unwrap();
        v.verify(spec, &Subst::new(), &Default::default(), root)
            .unwrap_or_else(|e| panic!("{}: realization rejected: {e}", run.problem_text("case", &Spec::NoOp)));
    }
    (sat.satisfied(), sat.covered)
}

pub fn oracle(spec: &Spec, run: &Run) -> (bool, BTreeSet<usize>) {
    let outs = Oracle::new(run).top(spec);
    (!outs.is_empty(), outs.iter().flat_map(|o| o.cover.iter().copied()).collect())
}

/// Satisfaction and coverage against exhaustive rule enumeration.
pub fn spec_agreement(seeds: std::ops::Range<u64>, max_leaves: usize, max_k: usize) -> Agreement {
    let mut out = Agreement::default();
    for seed in seeds {
        let (spec, run) = random_case(seed, max_leaves, max_k);
        let ours = search(&spec, &run);
        let theirs = oracle(&spec, &run);
        out.record(ours == theirs, theirs.0, || {
            format!("seed {seed}: {} on {}: ours {ours:?}, oracle {theirs:?}", spec_text(&spec), run.plan_text())
        });
    }
    out
}

/// Transitive closure of `on`.
pub fn closure(on: &[(String, String)]) -> BTreeSet<(String, String)> {
    let mut c: BTreeSet<(String, String)> = on.iter().cloned().collect();
    loop {
        let extra: Vec<_> = c
            .iter()
            .flat_map(|(a, b)| c.iter().filter(move |(x, _)| x == b).map(move |(_, y)| (a.clone(), y.clone())))
            .filter(|p| !c.contains(p))
            .collect();
        if extra.is_empty() {
            return c;
        }
        c.extend(extra);
    }
}

/// `above` from the blocks axioms against the closure of `on`, for every
/// world of 1..=`max` blocks in which each block sits on at most one thing
/// (another block or the table).
pub fn above_agreement(max: usize) -> Agreement {
    let dom = std::fs::read_to_string(super::corpus_path("blocks-axioms", "domain.pddl")).unwrap();
    let mut out = Agreement::default();
    for n in 1..=max {
        let blocks: Vec<String> = (0..n).map(|i| format!("b{i}")).collect();
        let problem = format!(
            "(define (problem tower-{n}) (:domain blocks-axioms) (:objects {} - block) (:init) (:goal (and)))",
            blocks.join(" ")
        );
        let s = inline(&[&dom, &problem]);
        let p = s.registry.problem(&format!("tower-{n}")).unwrap();
        let w = World::for_problem(s.registry.domain("blocks-axioms").unwrap(), p);
        // support choices: nothing, the table, or any block (itself included)
        let supports: Vec<Option<String>> = std::iter::once(None)
            .chain(std::iter::once(Some("table".to_string())))
            .chain(blocks.iter().cloned().map(Some))
            .collect();
        let total = supports.len().pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut on = Vec::new();
            for b in &blocks {
                if let Some(under) = &supports[c % supports.len()] {
                    on.push((b.clone(), under.clone()));
                }
                c /= supports.len();
            }
            let mut st = State::default();
            for (x, y) in &on {
                st.atoms.insert(GroundAtom::of("on", &[x, y]));
            }
            let ev = Evaluator::new(&w, &st).unwrap();
            let got: BTreeSet<(String, String)> = ev
                .derived()
                .iter()
                .filter(|a| a.predicate == "above")
                .map(|a| (a.args[0].to_string(), a.args[1].to_string()))
                .collect();
            let want = closure(&on);
            let positive = !want.is_empty();
            out.record(got == want, positive, || format!("{n} blocks, on {on:?}: got {got:?}"));
        }
    }
    out
}
