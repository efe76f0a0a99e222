//! Pretty-printing and `.chk` files: the input re-printed with every
//! diagnostic flagged inline as `<< description: thing >>`.

use crate::diagnostics::{tally, Diagnostic};
use crate::syntax::{AtomKind, FileId, SExpr};
use std::collections::HashMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrintOptions {
    pub width: usize,
    /// Print atoms as written instead of lower-cased.
    pub preserve_case: bool,
}

impl Default for PrintOptions {
    fn default() -> Self {
        PrintOptions {
            width: 80,
            preserve_case: false,
        }
    }
}

/// A rendered `.chk` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChkDocument {
    pub text: String,
    pub diagnostic_count: usize,
    /// Byte offset of each flag's `<<`, in diagnostic order.
    pub anchors: Vec<usize>,
}

/// `briefcase.pddl` -> `briefcase.chk`.
pub fn chk_path(input: &Path) -> PathBuf {
    input.with_extension("chk")
}

type Flags<'a> = HashMap<*const SExpr, Vec<(usize, &'a str)>>;

struct Printer<'a> {
    opts: PrintOptions,
    flags: Flags<'a>,
    out: String,
    col: usize,
    anchors: Vec<(usize, usize)>,
}

/// Structural forms lay their children out one per line, with
/// `:keyword value` pairs kept together: two spaces in under `define`,
/// three under a field like `:action`.
fn structural(e: &SExpr) -> bool {
    let Some(items) = e.as_list() else { return false };
    match items.first() {
        Some(SExpr::Atom(a)) => a.kind == AtomKind::Keyword || a.text == "define",
        _ => false,
    }
}

/// Whether a field keyword takes the next item as its value: any
/// non-keyword does, and so does a keyword that ends the form or is itself
/// followed by a keyword (`:expansion :methods`).
fn pairs_with_value(rest: &[SExpr]) -> bool {
    match rest {
        [] => false,
        [v, ..] if !v.is_keyword() => true,
        [_] => true,
        [_, next, ..] => next.is_keyword(),
    }
}

impl<'a> Printer<'a> {
    fn new(opts: PrintOptions, flags: Flags<'a>) -> Self {
        Printer {
            opts,
            flags,
            out: String::new(),
            col: 0,
            anchors: Vec::new(),
        }
    }

    fn atom_text(&self, e: &SExpr) -> String {
        let a = e.as_atom().expect("atom");
        if self.opts.preserve_case {
            a.original.clone()
        } else {
            a.text.clone()
        }
    }

    fn flags_of(&self, e: &SExpr) -> &[(usize, &'a str)] {
        self.flags.get(&(e as *const SExpr)).map_or(&[], Vec::as_slice)
    }

    /// Single-line rendering, flags included.
    fn flat(&self, e: &SExpr) -> String {
        let mut s = String::new();
        for (_, d) in self.flags_of(e) {
            s.push_str(&format!("<< {d}: "));
        }
        match e {
            SExpr::Atom(_) => s.push_str(&self.atom_text(e)),
            SExpr::List(l) => {
                s.push('(');
                for (i, c) in l.items.iter().enumerate() {
                    if i > 0 {
                        s.push(' ');
                    }
                    s.push_str(&self.flat(c));
                }
                s.push(')');
            }
        }
        for _ in self.flags_of(e) {
            s.push_str(" >>");
        }
        s
    }

    fn write(&mut self, s: &str) {
        self.out.push_str(s);
        match s.rfind('\n') {
            Some(i) => self.col = s.len() - i - 1,
            None => self.col += s.len(),
        }
    }

    fn newline(&mut self, indent: usize) {
        while self.out.ends_with(' ') {
            self.out.pop();
        }
        self.out.push('\n');
        self.out.push_str(&" ".repeat(indent));
        self.col = indent;
    }

    fn open_flags(&mut self, e: &SExpr) {
        for (idx, d) in self.flags_of(e).to_vec() {
            self.anchors.push((idx, self.out.len()));
            self.write(&format!("<< {d}: "));
        }
    }

    fn close_flags(&mut self, e: &SExpr) {
        for _ in 0..self.flags_of(e).len() {
            self.write(" >>");
        }
    }

    /// Lays out `e`; `trail` is how many characters will follow it on its
    /// last line (the closers of enclosing lists).
    fn print(&mut self, e: &SExpr, trail: usize) {
        let flat = self.flat(e);
        let fits = self.col + flat.len() + trail <= self.opts.width;
        let items = match e {
            SExpr::List(l) if !fits && !l.items.is_empty() => &l.items,
            _ => {
                // recorded through the same path so anchors stay exact
                self.print_flat(e);
                return;
            }
        };
        self.open_flags(e);
        let base = self.col;
        let closer = trail + 1 + 3 * self.flags_of(e).len();
        let last = items.len() - 1;
        let tail = |i: usize| if i == last { closer } else { 0 };
        self.write("(");
        if structural(e) {
            let step = if items[0].is_atom("define") { 2 } else { 3 };
            // head and its name on the first line
            self.print(&items[0], tail(0));
            let mut i = 1;
            if let Some(second) = items.get(1).filter(|s| !s.is_keyword()) {
                self.write(" ");
                self.print(second, tail(1));
                i = 2;
            }
            if items[i..].iter().all(|c| c.as_atom().is_some()) {
                self.fill(&items[i..], base + step, closer);
            } else {
                while i < items.len() {
                    self.newline(base + step);
                    if items[i].is_keyword() && pairs_with_value(&items[i + 1..]) {
                        self.print(&items[i], 0);
                        self.write(" ");
                        self.print(&items[i + 1], tail(i + 1));
                        i += 1;
                    } else {
                        self.print(&items[i], tail(i));
                    }
                    i += 1;
                }
            }
        } else if items[0].as_atom().is_some() {
            self.print(&items[0], tail(0));
            let rest = &items[1..];
            if rest.iter().all(|c| c.as_atom().is_some()) {
                self.fill(rest, base + 2, closer);
            } else if rest.first().is_some_and(|f| self.col + 1 + self.flat(f).len() + tail(1) <= self.opts.width) {
                self.write(" ");
                self.print(&rest[0], tail(1));
                for (i, c) in rest.iter().enumerate().skip(1) {
                    self.newline(base + 2);
                    self.print(c, tail(i + 1));
                }
            } else {
                for (i, c) in rest.iter().enumerate() {
                    self.newline(base + 2);
                    self.print(c, tail(i + 1));
                }
            }
        } else {
            self.print(&items[0], tail(0));
            for (i, c) in items.iter().enumerate().skip(1) {
                self.newline(base + 1);
                self.print(c, tail(i));
            }
        }
        self.write(")");
        self.close_flags(e);
    }

    /// Packs atoms onto lines, wrapping at `indent`.
    fn fill(&mut self, atoms: &[SExpr], indent: usize, closer: usize) {
        for (i, a) in atoms.iter().enumerate() {
            let len = self.flat(a).len() + if i + 1 == atoms.len() { closer } else { 0 };
            if self.col + 1 + len > self.opts.width {
                self.newline(indent);
            } else {
                self.write(" ");
            }
            self.print_flat(a);
        }
    }

    fn print_flat(&mut self, e: &SExpr) {
        self.open_flags(e);
        match e {
            SExpr::Atom(_) => {
                let t = self.atom_text(e);
                self.write(&t);
            }
            SExpr::List(l) => {
                self.write("(");
                for (i, c) in l.items.iter().enumerate() {
                    if i > 0 {
                        self.write(" ");
                    }
                    self.print_flat(c);
                }
                self.write(")");
            }
        }
        self.close_flags(e);
    }
}

/// Lays out one expression.
pub fn pretty_print(e: &SExpr, opts: PrintOptions) -> String {
    let mut p = Printer::new(opts, Flags::new());
    p.print(e, 0);
    p.out
}

/// Lays out a sequence of top-level forms separated by blank lines.
pub fn pretty_print_all(forms: &[SExpr], opts: PrintOptions) -> String {
    let mut out = String::new();
    for f in forms {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&pretty_print(f, opts));
        out.push('\n');
    }
    out
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

/// Renders `forms` (one file) with every diagnostic flagged. Diagnostics
/// whose subject is not in the tree (a dropped `)`, another file) become
/// comment lines before the next top-level form.
pub fn emit_chk(file: FileId, forms: &[SExpr], diagnostics: &[Diagnostic], opts: PrintOptions) -> ChkDocument {
    let mut flags = Flags::new();
    let mut detached: Vec<(usize, usize, &Diagnostic)> = Vec::new();
    for (i, d) in diagnostics.iter().enumerate() {
        let node = (!d.detached && d.span.file == file && !d.span.is_empty())
            .then(|| forms.iter().find_map(|f| f.find(&d.span)))
            .flatten();
        match node {
            Some(n) => flags.entry(n as *const SExpr).or_default().push((i, d.description.as_str())),
            None => detached.push((d.span.start, i, d)),
        }
    }
    detached.sort_by_key(|&(start, i, _)| (start, i));

    let mut p = Printer::new(opts, flags);
    let mut pending = detached.into_iter().peekable();
    let emit_detached = |p: &mut Printer, d: &Diagnostic, i: usize| {
        p.write(";; ");
        p.anchors.push((i, p.out.len()));
        let thing = match &d.subject {
            SExpr::Atom(a) if opts.preserve_case => a.original.clone(),
            s => s.to_string(),
        };
        p.write(&format!("<< {}: {} >>\n", d.description, thing));
    };
    for (n, f) in forms.iter().enumerate() {
        while let Some((_, i, d)) = pending.next_if(|(start, _, _)| *start < f.span().start) {
            emit_detached(&mut p, d, i);
        }
        if n > 0 {
            p.write("\n");
        }
        p.print(f, 0);
        p.write("\n");
    }
    for (_, i, d) in pending {
        emit_detached(&mut p, d, i);
    }
    let (errors, warnings) = tally(diagnostics);
    p.write(&format!(";; {}, {}\n", plural(errors, "error"), plural(warnings, "warning")));
    let mut anchors = p.anchors;
    anchors.sort();
    ChkDocument {
        text: p.out,
        diagnostic_count: diagnostics.len(),
        anchors: anchors.into_iter().map(|(_, at)| at).collect(),
    }
}

/// Removes every flag envelope, leaving the flagged text in place.
pub fn strip_flags(chk: &str) -> String {
    let mut out = String::with_capacity(chk.len());
    let mut rest = chk;
    while let Some(i) = rest.find("<< ").or_else(|| rest.find(" >>")) {
        let open = rest.find("<< ");
        let close = rest.find(" >>");
        match (open, close) {
            (Some(o), c) if c.is_none_or(|c| o < c) => {
                out.push_str(&rest[..o]);
                let after = &rest[o + 3..];
                let colon = after.find(": ").map_or(after.len(), |c| c + 2);
                rest = &after[colon..];
            }
            (_, Some(c)) => {
                out.push_str(&rest[..c]);
                rest = &rest[c + 3..];
            }
            _ => unreachable!("found at {i}"),
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::read_str;

    fn forms(text: &str) -> Vec<SExpr> {
        read_str(text, FileId(0)).0
    }

    #[test]
    fn short_forms_stay_flat() {
        let f = forms("(at B   home)");
        assert_eq!(pretty_print(&f[0], PrintOptions::default()), "(at b home)");
        let keep = PrintOptions {
            preserve_case: true,
            ..Default::default()
        };
        assert_eq!(pretty_print(&f[0], keep), "(at B home)");
    }

    #[test]
    fn structural_layout() {
        let f = forms("(define (domain d) (:requirements :strips) (:predicates (p ?x) (q ?x ?y)) (:action a :parameters (?x) :precondition (and (p ?x) (not (q ?x ?x))) :effect (q ?x ?x)))");
        let narrow = PrintOptions {
            width: 40,
            ..Default::default()
        };
        let text = pretty_print(&f[0], narrow);
        assert!(text.starts_with("(define (domain d)\n  (:requirements :strips)\n"), "{text}");
        assert!(text.contains("\n     :parameters (?x)\n"), "{text}");
        assert!(text.lines().all(|l| l.len() <= 40), "{text}");
    }

    #[test]
    fn strip_inverts_flags() {
        assert_eq!(strip_flags("(a << bad thing: << worse: (b) >> >> c)"), "(a (b) c)");
        assert_eq!(strip_flags(";; << unmatched close parenthesis: ) >>"), ";; )");
    }
}
