use pddl::model::DomainModel;
use pddl::numeric::NumericValue;
use pddl::state::{EvalError, Evaluator, GroundAtom, State, Subst, Value, World};
use pddl::syntax::{read_str, Expr, FileId, Gd, Literal, Parser, TypeExpr};
use pddl::Session;
use std::collections::{BTreeMap, BTreeSet};

fn corpus(dir: &str) -> Session {
    let mut s = Session::new(false);
    for f in ["domain.pddl", "problem.pddl"] {
        let path = format!("{}/../../corpus/{dir}/{f}", env!("CARGO_MANIFEST_DIR"));
        let file = s.load_path(std::path::Path::new(&path)).unwrap();
        assert_eq!(file.errors(), 0, "{dir}/{f}: {:?}", file.diagnostics);
    }
    s
}

fn domain_src(text: &str) -> Session {
    let mut s = Session::new(false);
    let f = s.load("inline", text);
    assert_eq!(f.errors(), 0, "{:?}", f.diagnostics);
    s
}

fn gd(text: &str) -> Gd {
    let (forms, _) = read_str(text, FileId(90));
    Parser::new(false).gd(&forms[0]).expect("goal parses")
}

fn expr(text: &str) -> Expr {
    let (forms, _) = read_str(text, FileId(91));
    Parser::new(false).expr(&forms[0]).expect("expression parses")
}

fn num(i: i64) -> Value {
    Value::Number(NumericValue::Int(i))
}

fn no_scope() -> BTreeMap<String, Option<TypeExpr>> {
    BTreeMap::new()
}

fn model<'a>(s: &'a Session, name: &str) -> &'a DomainModel {
    s.registry.domain(name).unwrap()
}

#[test]
fn get_paid_initial_state() {
    let s = corpus("briefcase");
    let p = s.registry.problem("get-paid").unwrap();
    let m = model(&s, "briefcase-world");
    let w = World::for_problem(m, p);
    let st = w.initial_state(&p.initial).unwrap();
    let expected: BTreeSet<GroundAtom> = [
        GroundAtom::of("at", &["b", "home"]),
        GroundAtom::of("at", &["p", "home"]),
        GroundAtom::of("at", &["d", "home"]),
        GroundAtom::of("in", &["p", "b"]),
    ]
    .into();
    assert_eq!(st.atoms, expected);
    let ev = Evaluator::new(&w, &st).unwrap();
    let sc = no_scope();
    let e = Subst::new();
    assert!(ev.holds(&gd("(exists (?z - physob) (in ?z B))"), &e, &sc).unwrap());
    let sols = ev.solutions(&gd("(in ?z B)"), &e, &sc).unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0]["?z"], Value::object("p"));
    assert!(!ev.holds(&gd("(not (= home home))"), &e, &sc).unwrap());
    assert!(!ev.holds(&gd("(and (at B office) (at D office) (at P home))"), &e, &sc).unwrap());
    assert!(ev.holds(&gd("(forall (?x - physob) (at ?x home))"), &e, &sc).unwrap());
    assert!(!ev.holds(&gd("(forall (?x - physob) (in ?x B))"), &e, &sc).unwrap());
    assert!(ev.holds(&gd("(imply (in D B) (at D office))"), &e, &sc).unwrap());
    // untyped quantifier ranges over every object, including locations
    assert!(!ev.holds(&gd("(forall (?x) (at ?x home))"), &e, &sc).unwrap());
}

#[test]
fn not_is_complement_of_positive() {
    let s = corpus("briefcase");
    let p = s.registry.problem("get-paid").unwrap();
    let m = model(&s, "briefcase-world");
    let w = World::for_problem(m, p);
    let st = w.initial_state(&p.initial).unwrap();
    let ev = Evaluator::new(&w, &st).unwrap();
    let objs: Vec<&String> = w.objects.keys().collect();
    for a in &objs {
        for b in &objs {
            for pred in ["at", "in"] {
                let g = format!("({pred} {a} {b})");
                let pos = ev.holds(&gd(&g), &Subst::new(), &no_scope()).unwrap();
                let neg = ev.holds(&gd(&format!("(not {g})")), &Subst::new(), &no_scope()).unwrap();
                assert_ne!(pos, neg, "{g}");
                assert_eq!(pos, st.contains(&GroundAtom::of(pred, &[a, b])));
            }
        }
    }
}

fn blocks_state(w: &World, on: &[(&str, &str)]) -> State {
    let mut st = State::default();
    let _ = w;
    for (x, y) in on {
        st.atoms.insert(GroundAtom::of("on", &[x, y]));
    }
    st
}

/// Transitive closure of `on`, computed by repeated squaring.
fn closure(on: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    let mut c: BTreeSet<(String, String)> = on.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
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

#[test]
fn above_from_axioms() {
    let s = corpus("blocks-axioms");
    let m = model(&s, "blocks-axioms");
    let p = s.registry.problem("invert-tower").unwrap();
    let w = World::for_problem(m, p);
    let on = [("a", "b"), ("b", "c")];
    let st = blocks_state(&w, &on);
    let ev = Evaluator::new(&w, &st).unwrap();
    assert!(ev.holds_atom(&GroundAtom::of("above", &["a", "c"])));
    assert!(!ev.holds_atom(&GroundAtom::of("above", &["a", "a"])));
    assert!(ev.holds_atom(&GroundAtom::of("clear", &["table"])));
    assert!(ev.holds_atom(&GroundAtom::of("clear", &["a"])));
    assert!(!ev.holds_atom(&GroundAtom::of("clear", &["b"])));
    let above: BTreeSet<(String, String)> = ev
        .derived()
        .iter()
        .filter(|a| a.predicate == "above")
        .map(|a| (a.args[0].to_string(), a.args[1].to_string()))
        .collect();
    assert_eq!(above, closure(&on));
}

#[test]
fn above_matches_closure_exhaustively_on_three_blocks() {
    let s = corpus("blocks-axioms");
    let m = model(&s, "blocks-axioms");
    let p = s.registry.problem("invert-tower").unwrap();
    let w = World::for_problem(m, p);
    let names = ["a", "b", "c", "table"];
    let pairs: Vec<(&str, &str)> = names
        .iter()
        .flat_map(|x| names.iter().map(move |y| (*x, *y)))
        .filter(|(x, _)| *x != "table")
        .collect();
    // every on-relation over the 12 candidate pairs
    for mask in 0u32..(1 << pairs.len()) {
        let on: Vec<(&str, &str)> = (0..pairs.len()).filter(|i| mask & (1 << i) != 0).map(|i| pairs[i]).collect();
        let st = blocks_state(&w, &on);
        let ev = Evaluator::new(&w, &st).unwrap();
        let got: BTreeSet<(String, String)> = ev
            .derived()
            .iter()
            .filter(|a| a.predicate == "above")
            .map(|a| (a.args[0].to_string(), a.args[1].to_string()))
            .collect();
        assert_eq!(got, closure(&on), "mask {mask}");
    }
}

#[test]
fn expressions() {
    let s = corpus("briefcase");
    let m = model(&s, "briefcase-world");
    let w = World::new(m, []);
    let st = State::default();
    let ev = Evaluator::new(&w, &st).unwrap();
    let mut sigma = Subst::new();
    assert_eq!(ev.eval(&expr("(+ 2 2)"), &sigma, false).unwrap(), NumericValue::Int(4));
    assert_eq!(ev.eval(&expr("(/ 1 2)"), &sigma, false).unwrap(), NumericValue::Real(0.5));
    assert_eq!(ev.eval(&expr("(/ 6 3)"), &sigma, false).unwrap(), NumericValue::Int(2));
    assert!(matches!(ev.eval(&expr("(/ 1 0)"), &sigma, false), Err(EvalError::Arith(_))));
    assert!(matches!(ev.eval(&expr("(- ?y 3)"), &sigma, false), Err(EvalError::Unbound(_))));
    sigma.insert("?y".into(), num(6));
    assert_eq!(ev.eval(&expr("(- ?y 3)"), &sigma, false).unwrap(), NumericValue::Int(3));
    assert!(ev.test(&expr("(<= 3 3)"), &sigma, false).unwrap());

    let sols = ev.solutions(&gd("(equation (+ ?x 2) (- ?y 3))"), &sigma, &no_scope()).unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0]["?x"], num(1));

    let sols = ev.solutions(&gd("(bounded-int ?i 1 2)"), &Subst::new(), &no_scope()).unwrap();
    let got: Vec<&Value> = sols.iter().map(|s| &s["?i"]).collect();
    assert_eq!(got, vec![&num(1), &num(2)]);

    assert!(matches!(
        ev.solutions(&gd("(eval (+ ?q 1) 3)"), &Subst::new(), &no_scope()),
        Err(EvalError::VariableInEval(_))
    ));
    assert!(matches!(
        ev.solutions(&gd("(equation (+ ?a ?b) 3)"), &Subst::new(), &no_scope()),
        Err(EvalError::EquationUnderdetermined)
    ));
    let sols = ev.solutions(&gd("(eval (* 2 3) ?v)"), &Subst::new(), &no_scope()).unwrap();
    assert_eq!(sols[0]["?v"], num(6));
}

#[test]
fn equation_inverts_every_operator() {
    let s = corpus("briefcase");
    let m = model(&s, "briefcase-world");
    let w = World::new(m, []);
    let st = State::default();
    let ev = Evaluator::new(&w, &st).unwrap();
    for (text, want) in [
        ("(equation (- 10 ?x) 4)", Some(6)),
        ("(equation (* 3 ?x) 12)", Some(4)),
        ("(equation (/ 12 ?x) 3)", Some(4)),
        ("(equation (/ ?x 4) 2)", Some(8)),
        ("(equation 7 (+ 1 (* 2 ?x)))", Some(3)),
        ("(equation (* 0 ?x) 5)", None),
    ] {
        let sols = ev.solutions(&gd(text), &Subst::new(), &no_scope()).unwrap();
        match want {
            Some(v) => assert_eq!(sols.iter().map(|s| s["?x"].clone()).collect::<Vec<_>>(), vec![num(v)], "{text}"),
            None => assert!(sols.is_empty(), "{text}"),
        }
    }
}

#[test]
fn cat_in_the_hat_things() {
    let s = corpus("cat-in-the-hat");
    let m = model(&s, "cat-in-the-hat");
    let p = s.registry.problem("two-things").unwrap();
    let w = World::for_problem(m, p);
    let st = w.initial_state(&p.initial).unwrap();
    let ev = Evaluator::new(&w, &st).unwrap();
    let things: Vec<String> = ev
        .derived()
        .iter()
        .filter(|a| a.predicate == "thing")
        .map(|a| a.to_string())
        .collect();
    assert_eq!(things, ["(thing 1)", "(thing 2)"]);
    assert!(ev.holds(&p.goal().unwrap(), &Subst::new(), &no_scope()).unwrap());
}

#[test]
fn pour_fluents() {
    let s = corpus("pour");
    let m = model(&s, "pour");
    let p = s.registry.problem("fill-jug").unwrap();
    let w = World::for_problem(m, p);
    let st = w.initial_state(&p.initial).unwrap();
    assert_eq!(st.fluents["jug-level"], NumericValue::Int(4));
    let ev = Evaluator::new(&w, &st).unwrap();
    let sc = no_scope();
    assert!(ev.holds(&gd("(fluent-test (= jug-level 4))"), &Subst::new(), &sc).unwrap());
    assert!(matches!(
        ev.holds(&gd("(test (= jug-level 4))"), &Subst::new(), &sc),
        Err(EvalError::FluentOutsideFluentContext(_))
    ));
    let sols = ev.solutions(&gd("(current-value cup-level ?v)"), &Subst::new(), &sc).unwrap();
    assert_eq!(sols[0]["?v"], num(3));
    let sols = ev
        .solutions(&gd("(and (contents ?c ?f) (fluent-test (> ?f 3)))"), &Subst::new(), &sc)
        .unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0]["?c"], Value::object("jug"));
}

const ELEVATOR: &str = "
(define (domain elevator)
  (:requirements :typing :fluents)
  (:types person elevator)
  (:predicates (aboard ?p - person ?e - elevator)
               (weight ?p - person ?w - number)
               (mass ?p - person ?w - (fluent number))))
(define (problem ride)
  (:domain elevator)
  (:objects ann bob cy - person lift - elevator m1 m2 m3 - (fluent number))
  (:init (aboard ann lift) (aboard bob lift)
         (weight ann 70) (weight bob 80) (weight cy 55)
         (mass ann m1) (mass bob m2) (mass cy m3)
         (current-value m1 71) (current-value m2 79) (current-value m3 50))
  (:goal (aboard ann lift)))";

#[test]
fn sum_over_passengers() {
    let s = domain_src(ELEVATOR);
    let m = model(&s, "elevator");
    let p = s.registry.problem("ride").unwrap();
    let w = World::for_problem(m, p);
    let st = w.initial_state(&p.initial).unwrap();
    let ev = Evaluator::new(&w, &st).unwrap();
    let mut sigma = Subst::new();
    sigma.insert("?elevator".into(), Value::object("lift"));
    let fixed = gd("(fluent-eval (sum (?p - person ?w - number) (and (aboard ?p ?elevator) (weight ?p ?w)) ?w) ?total)");
    let sols = ev.solutions(&fixed, &sigma, &no_scope()).unwrap();
    // oracle: the two people aboard
    assert_eq!(sols[0]["?total"], num(70 + 80));
    let fluent = gd("(fluent-eval (sum (?p - person ?w - (fluent number)) (and (aboard ?p ?elevator) (mass ?p ?w)) ?w) ?total)");
    let sols = ev.solutions(&fluent, &sigma, &no_scope()).unwrap();
    assert_eq!(sols[0]["?total"], num(71 + 79));
    let empty = gd("(fluent-eval (sum (?p - person) (aboard ?p cy) 1) ?total)");
    let sols = ev.solutions(&empty, &sigma, &no_scope()).unwrap();
    assert_eq!(sols[0]["?total"], num(0));
}

#[test]
fn negative_implies_conflict_is_an_error() {
    let s = domain_src(
        "(define (domain conflict)
           (:requirements :strips :domain-axioms)
           (:predicates (p) (q) (r))
           (:axiom :vars () :context (p) :implies (r))
           (:axiom :vars () :context (q) :implies (not (r))))",
    );
    let m = model(&s, "conflict");
    let w = World::new(m, []);
    let mut st = State::default();
    st.atoms.insert(GroundAtom::of("p", &[]));
    assert!(Evaluator::new(&w, &st).is_ok());
    st.atoms.insert(GroundAtom::of("q", &[]));
    assert!(matches!(Evaluator::new(&w, &st), Err(EvalError::DerivationConflict(_))));
}

#[test]
fn timeless_facts_hold() {
    let s = domain_src(
        "(define (domain roads)
           (:requirements :strips)
           (:constants a b)
           (:predicates (road ?x ?y) (at ?x))
           (:timeless (road a b)))",
    );
    let m = model(&s, "roads");
    let w = World::new(m, []);
    let st = State::default();
    let ev = Evaluator::new(&w, &st).unwrap();
    assert!(ev.holds(&gd("(road a b)"), &Subst::new(), &no_scope()).unwrap());
    assert!(!ev.holds(&gd("(road b a)"), &Subst::new(), &no_scope()).unwrap());
    let _: &[Literal] = &m.timeless;
}
