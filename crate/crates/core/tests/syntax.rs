use pddl::syntax::{parse_source, read_str, FileId, SExpr};
use pddl::{DiagCode, Session};
use proptest::prelude::*;

fn codes(text: &str, strict: bool) -> Vec<DiagCode> {
    parse_source(text, FileId(0), strict).diagnostics.iter().map(|d| d.code).collect()
}

const OUT_OF_ORDER: &str = "(define (domain d) (:predicates (p)) (:requirements :strips)
                              (:action a :parameters () :effect (p)))";
const TWO_DEFS: &str = "(define (domain d) (:requirements :strips) (:predicates (p)))
                        (define (problem q) (:domain d) (:init) (:goal (p)))";
const ADDENDUM: &str = "(define (addendum more) (:domain d)
                          (:action b :parameters () :effect (p)))";

#[test]
fn strict_mode_flags_out_of_order_fields() {
    assert_eq!(codes(OUT_OF_ORDER, false), []);
    assert_eq!(codes(OUT_OF_ORDER, true), [DiagCode::FieldOutOfOrder]);
}

#[test]
fn strict_mode_flags_multiple_definitions() {
    assert_eq!(codes(TWO_DEFS, false), []);
    assert_eq!(codes(TWO_DEFS, true), [DiagCode::MultipleDefinitions]);
    let d = &parse_source(TWO_DEFS, FileId(0), true).diagnostics[0];
    assert_eq!(d.description, "more than one definition per file");
}

#[test]
fn strict_mode_forbids_addenda() {
    assert_eq!(codes(ADDENDUM, false), []);
    assert_eq!(codes(ADDENDUM, true), [DiagCode::AddendumForbidden]);
}

#[test]
fn strict_session_applies_to_every_file() {
    let mut s = Session::new(true);
    s.load("d.pddl", "(define (domain d) (:requirements :strips) (:predicates (p)))");
    assert_eq!(s.errors(), 0);
    s.load("a.pddl", ADDENDUM);
    assert_eq!(s.errors(), 1);
}

#[test]
fn reader_recovers_from_bad_parens() {
    let (forms, diags) = read_str("(define (domain d) (:predicates (p)", FileId(0));
    assert_eq!(forms.len(), 1);
    // both `(define` and `(:predicates` are left open
    assert_eq!(diags.iter().map(|d| d.code).collect::<Vec<_>>(), [DiagCode::UnclosedList; 2]);
    let (forms, diags) = read_str("(a)) (b)", FileId(0));
    assert_eq!(forms.len(), 2);
    assert_eq!(diags[0].code, DiagCode::UnmatchedClose);
}

#[test]
fn atoms_are_case_insensitive() {
    let a = read_str("(At B ?X)", FileId(0)).0;
    let b = read_str("(at b ?x)", FileId(0)).0;
    assert_eq!(a, b);
    assert_eq!(a[0].as_list().unwrap()[1].as_atom().unwrap().original, "B");
}

#[test]
fn undefined_field_is_flagged_not_fatal() {
    let c = codes("(define (domain d) (:requirements :strips) (:widgets 3) (:predicates (p)))", false);
    assert_eq!(c, [DiagCode::UnknownField]);
    let out = parse_source("(define (domain d) (:requirements :strips) (:widgets 3) (:predicates (p)))", FileId(0), false);
    assert_eq!(out.defs.len(), 1);
}

fn sexpr() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        "[a-z][a-z0-9-]{0,5}",
        "\\?[a-z][a-z0-9]{0,3}",
        ":[a-z]{1,6}",
        "-?[0-9]{1,3}",
        Just("-".to_string()),
    ];
    atom.prop_recursive(4, 40, 5, |inner| {
        prop::collection::vec(inner, 0..5).prop_map(|v| format!("({})", v.join(" ")))
    })
}

proptest! {
    #[test]
    fn display_re_reads_identically(texts in prop::collection::vec(sexpr(), 1..4)) {
        let text = texts.join("\n");
        let (forms, diags) = read_str(&text, FileId(0));
        prop_assert!(diags.is_empty(), "{:?}", diags);
        let shown: Vec<String> = forms.iter().map(SExpr::to_string).collect();
        let (again, _) = read_str(&shown.join(" "), FileId(0));
        prop_assert_eq!(again, forms);
    }

    #[test]
    fn pretty_printing_preserves_structure(texts in prop::collection::vec(sexpr(), 1..4), w in 10usize..100) {
        let forms = read_str(&texts.join(" "), FileId(0)).0;
        let opts = pddl::report::PrintOptions { width: w, ..Default::default() };
        let printed = pddl::report::pretty_print_all(&forms, opts);
        prop_assert_eq!(read_str(&printed, FileId(0)).0, forms);
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[ -~\n]{0,200}") {
        let out = parse_source(&text, FileId(0), false);
        let mut s = Session::new(false);
        s.load("x", &text);
        prop_assert!(out.forms.len() <= text.len());
    }
}
