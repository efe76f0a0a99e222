#![allow(dead_code)]

use pddl::report::{emit_chk, PrintOptions};
use pddl::syntax::FileId;
use pddl::validator::{parse_solution, solves, Solution, ValidateOptions, ValidationReport, Verdict};
use pddl::Session;
use std::path::PathBuf;

pub fn corpus_path(dir: &str, file: &str) -> PathBuf {
    PathBuf::from(format!("{}/../../corpus/{dir}/{file}", env!("CARGO_MANIFEST_DIR")))
}

pub fn corpus_root() -> PathBuf {
    PathBuf::from(format!("{}/../../corpus", env!("CARGO_MANIFEST_DIR")))
}

pub fn corpus_entries() -> Vec<String> {
    let mut names: Vec<_> = std::fs::read_dir(corpus_root())
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.path().is_dir())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

/// The `.pddl` files of a corpus entry in load order: `domain.pddl` first,
/// `problem.pddl` last, anything else in between.
pub fn entry_files(dir: &str) -> Vec<PathBuf> {
    let mut files: Vec<_> = std::fs::read_dir(corpus_path(dir, ""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "pddl"))
        .collect();
    files.sort_by_key(|p| (!p.ends_with("domain.pddl"), p.ends_with("problem.pddl"), p.clone()));
    files
}

pub fn load_entry(dir: &str) -> Session {
    let mut s = Session::new(false);
    for p in entry_files(dir) {
        s.load_path(&p).unwrap();
    }
    s
}

/// Loads every `.pddl` file of a corpus entry, requiring each to be clean.
pub fn corpus(dir: &str) -> Session {
    let s = load_entry(dir);
    for f in &s.files {
        assert_eq!(f.errors(), 0, "{}: {:?}", f.name, f.diagnostics);
    }
    s
}

/// The `.chk` rendering of a whole entry: each file's document under a
/// `;;; <file>` header.
pub fn entry_chk(s: &Session) -> String {
    let mut out = String::new();
    for (i, f) in s.files.iter().enumerate() {
        let name = std::path::Path::new(&f.name).file_name().unwrap().to_string_lossy();
        out.push_str(&format!(";;; {name}\n"));
        let doc = emit_chk(FileId(i as u32), &f.parsed.forms, &f.diagnostics, PrintOptions::default());
        out.push_str(&doc.text);
    }
    out
}

/// `solves`, `fails <clause>`, `refused`, or `invalid` when any file has
/// errors.
pub fn entry_verdict(dir: &str, s: &Session) -> String {
    if s.errors() > 0 {
        return "invalid".into();
    }
    let text = std::fs::read_to_string(corpus_path(dir, "solution.txt")).unwrap();
    let problems: Vec<_> = s.registry.problems().collect();
    assert_eq!(problems.len(), 1, "{dir}");
    let r = validate(s, &problems[0].name.canonical, &text);
    match r.verdict {
        Verdict::Solves => "solves".into(),
        Verdict::Fails => format!("fails {}", r.failed_clause.unwrap()),
        Verdict::Refused => "refused".into(),
    }
}

pub fn inline(texts: &[&str]) -> Session {
    let mut s = Session::new(false);
    for (i, t) in texts.iter().enumerate() {
        let f = s.load(&format!("inline{i}"), t);
        assert_eq!(f.errors(), 0, "{:?}", f.diagnostics);
    }
    s
}

pub fn solution(text: &str) -> Solution {
    let (sol, diags) = parse_solution(text, FileId(77));
    assert!(diags.is_empty(), "{diags:?}");
    sol
}

pub fn validate(s: &Session, problem: &str, plan: &str) -> ValidationReport {
    let p = s.registry.problem(problem).expect("problem");
    let m = s.registry.domain(&p.domain).expect("domain");
    solves(m, p, &solution(plan), ValidateOptions::default())
}
pub mod oracles;
pub mod spec_oracle;
