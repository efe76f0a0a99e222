mod common;

use common::{corpus, inline, solution, validate};
use pddl::corpus::{generate_random_strips, StripsLimits};
use pddl::numeric::NumericValue;
use pddl::state::{GroundAtom, World};
use pddl::validator::{step, Clause, GroundAction, StepError, Verdict};
use std::collections::BTreeSet;

// Briefcase world, modelled independently: where B, P, D are, and what is
// in the briefcase.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Brief {
    at: BTreeSet<(char, &'static str)>,
    inside: BTreeSet<char>,
}

const LOCS: [&str; 2] = ["home", "office"];
const PHYS: [char; 3] = ['B', 'P', 'D'];

fn brief_init() -> Brief {
    Brief {
        at: [('B', "home"), ('P', "home"), ('D', "home")].into(),
        inside: ['P'].into(),
    }
}

fn brief_goal(s: &Brief) -> bool {
    s.at.contains(&('B', "office")) && s.at.contains(&('D', "office")) && s.at.contains(&('P', "home"))
}

#[derive(Clone, Debug)]
enum BriefAct {
    Mov(&'static str, &'static str),
    PutIn(char, &'static str),
    TakeOut(char),
}

impl BriefAct {
    fn text(&self) -> String {
        match self {
            BriefAct::Mov(m, l) => format!("(mov-b {m} {l})"),
            BriefAct::PutIn(x, l) => format!("(put-in {x} {l})"),
            BriefAct::TakeOut(x) => format!("(take-out {x})"),
        }
    }

    fn all() -> Vec<BriefAct> {
        let mut v = Vec::new();
        for m in LOCS {
            for l in LOCS {
                v.push(BriefAct::Mov(m, l));
            }
        }
        for x in PHYS {
            for l in LOCS {
                v.push(BriefAct::PutIn(x, l));
            }
            v.push(BriefAct::TakeOut(x));
        }
        v
    }

    fn apply(&self, s: &Brief) -> Option<Brief> {
        let mut n = s.clone();
        match *self {
            BriefAct::Mov(m, l) => {
                if !s.at.contains(&('B', m)) || m == l {
                    return None;
                }
                n.at.remove(&('B', m));
                for &z in &s.inside {
                    if z != 'B' {
                        n.at.remove(&(z, m));
                    }
                }
                n.at.insert(('B', l));
                for &z in &s.inside {
                    if z != 'B' {
                        n.at.insert((z, l));
                    }
                }
            }
            BriefAct::PutIn(x, l) => {
                if x == 'B' {
                    return None;
                }
                if s.at.contains(&(x, l)) && s.at.contains(&('B', l)) {
                    n.inside.insert(x);
                }
            }
            BriefAct::TakeOut(x) => {
                if x == 'B' {
                    return None;
                }
                n.inside.remove(&x);
            }
        }
        Some(n)
    }
}

fn brief_accepts(plan: &[BriefAct]) -> bool {
    let mut s = brief_init();
    for a in plan {
        match a.apply(&s) {
            Some(n) => s = n,
            None => return false,
        }
    }
    brief_goal(&s)
}

#[test]
fn get_paid_three_step_plan_solves() {
    let s = corpus("briefcase");
    let text = std::fs::read_to_string(common::corpus_path("briefcase", "solution.txt")).unwrap();
    let r = validate(&s, "get-paid", &text);
    assert_eq!(r.verdict, Verdict::Solves, "{r}");
    assert_eq!(r.steps.len(), 3);
}

#[test]
fn get_paid_shortest_plan_has_three_steps() {
    // Breadth-first over the independent model.
    let acts = BriefAct::all();
    let mut frontier = vec![brief_init()];
    let mut seen: std::collections::HashSet<Brief> = frontier.iter().cloned().collect();
    let mut depth = 0;
    while !frontier.iter().any(brief_goal) {
        depth += 1;
        frontier = frontier
            .iter()
            .flat_map(|s| acts.iter().filter_map(|a| a.apply(s)).collect::<Vec<_>>())
            .filter(|n| seen.insert(n.clone()))
            .collect();
        assert!(!frontier.is_empty());
    }
    assert_eq!(depth, 3);
}

#[test]
fn get_paid_agrees_with_oracle_on_all_short_plans() {
    let s = corpus("briefcase");
    let acts = BriefAct::all();
    let mut plans: Vec<Vec<BriefAct>> = vec![vec![]];
    let mut all = plans.clone();
    for _ in 0..3 {
        plans = plans
            .iter()
            .flat_map(|p| {
                acts.iter().map(move |a| {
                    let mut p = p.clone();
                    p.push(a.clone());
                    p
                })
            })
            .collect();
        all.extend(plans.iter().cloned());
    }
    let mut accepted = 0;
    for plan in &all {
        let text = format!("({})", plan.iter().map(BriefAct::text).collect::<Vec<_>>().join(" "));
        let r = validate(&s, "get-paid", &text);
        assert_eq!(r.solves(), brief_accepts(plan), "{text}\n{r}");
        accepted += r.solves() as usize;
    }
    assert!(accepted > 0);
}

#[test]
fn one_step_plan_fails_goal() {
    let s = corpus("briefcase");
    let r = validate(&s, "get-paid", "((mov-b home office))");
    assert_eq!(r.verdict, Verdict::Fails);
    assert_eq!(r.failed_clause, Some(Clause::Goal));
    let text = r.to_string();
    assert!(text.contains("goal"), "{text}");
}

#[test]
fn inapplicable_step_fails_feasibility() {
    let s = corpus("briefcase");
    let r = validate(&s, "get-paid", "((mov-b office home))");
    assert_eq!(r.failed_clause, Some(Clause::Feasibility));
    assert!(r.steps[0].error.is_some());
    let r = validate(&s, "get-paid", "((mov-b home))");
    assert_eq!(r.failed_clause, Some(Clause::Feasibility));
    let r = validate(&s, "get-paid", "((put-in home home))");
    assert_eq!(r.failed_clause, Some(Clause::Feasibility));
    let r = validate(&s, "get-paid", "((fly B))");
    assert_eq!(r.failed_clause, Some(Clause::Feasibility));
}

#[test]
fn conditional_effects_see_the_pre_state() {
    // D goes into the briefcase only in the successor, so the move in the
    // same step must not carry it.
    let s = inline(&[
        "(define (domain brief2)
           (:requirements :strips :equality :conditional-effects)
           (:constants B)
           (:predicates (at ?x ?l) (in ?x ?y))
           (:action mov-b-and-load
              :parameters (?m ?l ?x)
              :precondition (and (at B ?m) (at ?x ?m) (not (= ?m ?l)))
              :effect (and (at B ?l) (not (at B ?m)) (in ?x B)
                           (forall (?z) (when (in ?z B) (and (at ?z ?l) (not (at ?z ?m))))))))",
        "(define (problem p2) (:domain brief2) (:objects D home office)
           (:init (at B home) (at D home)) (:goal (and (at B office) (in D B) (at D home))))",
    ]);
    let r = validate(&s, "p2", "((mov-b-and-load home office D))");
    assert_eq!(r.verdict, Verdict::Solves, "{r}");
}

#[test]
fn mov_b_moves_contents() {
    let s = corpus("briefcase");
    let p = s.registry.problem("get-paid").unwrap();
    let m = s.registry.domain("briefcase-world").unwrap();
    let w = World::for_problem(m, p);
    let init = w.initial_state(&p.initial).unwrap();
    let (delta, next) = step(&w, &init, &GroundAction::of("mov-b", &["home", "office"])).unwrap();
    let adds: BTreeSet<_> = [GroundAtom::of("at", &["b", "office"]), GroundAtom::of("at", &["p", "office"])].into();
    let dels: BTreeSet<_> = [GroundAtom::of("at", &["b", "home"]), GroundAtom::of("at", &["p", "home"])].into();
    assert_eq!(delta.adds, adds);
    assert_eq!(delta.dels, dels);
    assert!(next.atoms.contains(&GroundAtom::of("at", &["d", "home"])));
}

#[test]
fn add_wins_over_delete() {
    let s = inline(&[
        "(define (domain flip) (:predicates (p))
           (:action toggle :parameters () :effect (and (p) (not (p)))))",
        "(define (problem f) (:domain flip) (:init) (:goal (p)))",
    ]);
    assert!(validate(&s, "f", "((toggle))").solves());
}

#[test]
fn pour_changes_both_fluents() {
    let s = corpus("pour");
    let p = s.registry.problem("fill-jug").unwrap();
    let m = s.registry.domain(&p.domain).unwrap();
    let w = World::for_problem(m, p);
    let init = w.initial_state(&p.initial).unwrap();
    let (delta, next) = step(&w, &init, &GroundAction::of("pour", &["cup", "jug"])).unwrap();
    let changes: Vec<_> = delta.changes.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    assert_eq!(
        changes,
        [("cup-level", NumericValue::Int(0)), ("jug-level", NumericValue::Int(7))]
    );
    assert_eq!(next.fluents["jug-level"], NumericValue::Int(7));
    let text = std::fs::read_to_string(common::corpus_path("pour", "solution.txt")).unwrap();
    assert!(validate(&s, "fill-jug", &text).solves());
    // The jug's capacity is 10: pouring 4 into the 3-unit cup overflows.
    let r = validate(&s, "fill-jug", "((pour jug cup))");
    assert_eq!(r.failed_clause, Some(Clause::Feasibility), "{r}");
}

#[test]
fn corpus_plans_solve() {
    for (dir, problem) in [
        ("blocks-axioms", "invert-tower"),
        ("cat-in-the-hat", "two-things"),
        ("pour", "fill-jug"),
        ("briefcase", "get-paid"),
    ] {
        let s = corpus(dir);
        let text = std::fs::read_to_string(common::corpus_path(dir, "solution.txt")).unwrap();
        let r = validate(&s, problem, &text);
        assert_eq!(r.verdict, Verdict::Solves, "{dir}: {r}");
    }
}

const SPRAY: &str = "(define (domain spray)
  (:requirements :strips :typing :existential-preconditions)
  (:types can object)
  (:predicates (holding ?c - can) (full ?c - can) (painted ?o - object))
  (:action spray-paint
     :parameters (?o - object)
     :vars (?c - can)
     :precondition (and (holding ?c) (full ?c))
     :effect (and (painted ?o) (not (full ?c)))))";

#[test]
fn vars_need_a_unique_witness() {
    let s = inline(&[
        SPRAY,
        "(define (problem one-can) (:domain spray) (:objects red blue - can chair - object)
           (:init (holding red) (full red) (full blue)) (:goal (and (painted chair) (full blue))))",
        "(define (problem two-cans) (:domain spray) (:objects red blue - can chair - object)
           (:init (holding red) (holding blue) (full red) (full blue)) (:goal (painted chair)))",
    ]);
    let r = validate(&s, "one-can", "((spray-paint chair))");
    assert!(r.solves(), "{r}");
    let r = validate(&s, "two-cans", "((spray-paint chair))");
    assert_eq!(r.failed_clause, Some(Clause::Feasibility));
    let p = s.registry.problem("two-cans").unwrap();
    let w = World::for_problem(s.registry.domain("spray").unwrap(), p);
    let init = w.initial_state(&p.initial).unwrap();
    let err = step(&w, &init, &GroundAction::of("spray-paint", &["chair"])).unwrap_err();
    assert!(matches!(err, StepError::MultipleWitnesses { .. }), "{err}");
}

#[test]
fn touching_a_timeless_fact_is_an_error() {
    let s = inline(&[
        "(define (domain tl) (:predicates (road ?a ?b) (at ?a))
           (:timeless (road x y))
           (:constants x y)
           (:action drive :parameters (?a ?b) :precondition (and (at ?a) (road ?a ?b))
              :effect (and (at ?b) (not (at ?a))))
           (:action wreck :parameters (?a ?b) :effect (not (road ?a ?b))))",
        "(define (problem t) (:domain tl) (:init (at x)) (:goal (at y)))",
    ]);
    assert!(validate(&s, "t", "((drive x y))").solves());
    let r = validate(&s, "t", "((wreck x y) (drive x y))");
    assert_eq!(r.failed_clause, Some(Clause::Feasibility), "{r}");
    assert!(r.reason.unwrap().contains("timeless"));
}

const SAFE: &str = "(define (domain safe)
  (:requirements :strips :safety-constraints)
  (:predicates (door-open) (inside))
  (:safety (not (door-open)))
  (:action open :parameters () :effect (door-open))
  (:action close :parameters () :effect (not (door-open)))
  (:action enter :parameters () :precondition (door-open) :effect (inside)))";

#[test]
fn safety_is_checked_at_the_end() {
    let s = inline(&[SAFE, "(define (problem in) (:domain safe) (:init) (:goal (inside)))"]);
    let r = validate(&s, "in", "((open) (enter) (close))");
    assert!(r.solves(), "{r}");
    assert!(r.warnings.iter().any(|w| w.contains("safety")), "{:?}", r.warnings);
    let r = validate(&s, "in", "((open) (enter))");
    assert_eq!(r.failed_clause, Some(Clause::Safety), "{r}");
}

#[test]
fn open_world_is_refused() {
    let s = inline(&[
        "(define (domain ow) (:requirements :strips :open-world) (:predicates (p))
           (:action a :parameters () :effect (p)))",
        "(define (problem q) (:domain ow) (:init) (:goal (p)))",
    ]);
    assert_eq!(validate(&s, "q", "((a))").verdict, Verdict::Refused);
}

#[test]
fn length_is_only_advisory() {
    let s = inline(&[
        "(define (domain ln) (:predicates (p) (q))
           (:action a :parameters () :effect (p)) (:action b :parameters () :effect (q)))",
        "(define (problem l) (:domain ln) (:init) (:goal (and (p) (q))) (:length (:serial 1)))",
    ]);
    let r = validate(&s, "l", "((a) (b))");
    assert!(r.solves(), "{r}");
    assert_eq!(r.warnings.len(), 1);
}

#[test]
fn report_serializes() {
    let s = corpus("briefcase");
    let r = validate(&s, "get-paid", "((mov-b home office))");
    let json: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(json["verdict"], "fails");
    assert_eq!(json["failed_clause"], "goal");
    assert_eq!(json["steps"][0]["action"], "(mov-b home office)");
}

#[test]
fn unaffected_atoms_persist() {
    // Frame: anything the delta does not mention carries over.
    for seed in 0..40 {
        let inst = generate_random_strips(seed, StripsLimits::default());
        let s = inline(&[&inst.domain_text(), &inst.problem_text()]);
        let p = s.registry.problem(&inst.problem_name()).unwrap();
        let w = World::for_problem(s.registry.domain(&inst.domain_name()).unwrap(), p);
        let init = w.initial_state(&p.initial).unwrap();
        for g in inst.ground_actions() {
            let action = solution(&format!("({})", inst.step_text(&g))).steps.remove(0);
            if let Ok((delta, next)) = step(&w, &init, &action) {
                for a in init.atoms.union(&next.atoms) {
                    if !delta.adds.contains(a) && !delta.dels.contains(a) {
                        assert_eq!(init.atoms.contains(a), next.atoms.contains(a));
                    }
                }
            }
        }
    }
}

#[test]
fn random_strips_exhaustive_agreement() {
    let a = common::oracles::random_strips_agreement(0..100, 4);
    assert!(a.ok(), "{:#?}", a.disagreements);
    assert!(a.checked > 10_000);
    assert!(a.positives > 100, "{}", a.positives);
}
