//! Recursive-descent parsing of s-expressions into definitions.
//!
//! The parser never stops at the first problem: a malformed field is flagged
//! and skipped, and parsing resumes with the next field, so a single pass can
//! report every error in a file.

use super::ast::*;
use super::sexpr::{read_str, AtomKind, SExpr};
use super::span::{FileId, SourceSpan};
use crate::diagnostics::{DiagCode, Diagnostic};
use crate::model::requirements::{Requirement, RequirementSet};
use crate::numeric::NumericValue;
use std::collections::HashSet;

/// Everything read from one source text.
#[derive(Debug, Clone, Default)]
pub struct ParseOutput {
    /// Top-level forms, exactly as read.
    pub forms: Vec<SExpr>,
    pub defs: Vec<ParsedDef>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Reads and parses every top-level form of `text`.
pub fn parse_source(text: &str, file: FileId, strict: bool) -> ParseOutput {
    let (forms, mut diagnostics) = read_str(text, file);
    let mut defs = Vec::new();
    for (i, form) in forms.iter().enumerate() {
        if strict && i > 0 {
            diagnostics.push(Diagnostic::new(DiagCode::MultipleDefinitions, form));
        }
        let (def, diags) = parse_definition(form, strict);
        diagnostics.extend(diags);
        defs.extend(def);
    }
    ParseOutput {
        forms,
        defs,
        diagnostics,
    }
}

/// Parses one `(define ...)` form.
pub fn parse_definition(form: &SExpr, strict: bool) -> (Option<ParsedDef>, Vec<Diagnostic>) {
    let mut p = Parser::new(strict);
    let def = p.definition(form);
    let (diags, demands) = p.finish();
    let parsed = def.map(|def| ParsedDef {
        def,
        source: form.clone(),
        demands,
    });
    (parsed, diags)
}

/// Whether typed-list items are names or variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemKind {
    Name,
    Variable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BodyContext {
    Action,
    Method,
    InContext,
}

/// Tracks keyword order and duplicates within one construct.
#[derive(Default)]
struct FieldTracker {
    highest: usize,
    seen: HashSet<String>,
}

/// Collects diagnostics and requirement demands while parsing.
pub struct Parser {
    strict: bool,
    diags: Vec<Diagnostic>,
    demands: Vec<Demand>,
}

impl Parser {
    pub fn new(strict: bool) -> Parser {
        Parser {
            strict,
            diags: Vec::new(),
            demands: Vec::new(),
        }
    }

    pub fn finish(self) -> (Vec<Diagnostic>, Vec<Demand>) {
        (self.diags, self.demands)
    }

    fn flag(&mut self, code: DiagCode, at: &SExpr) {
        self.diags.push(Diagnostic::new(code, at));
    }

    fn demand(&mut self, r: Requirement, at: &SExpr) {
        self.demands.push(Demand {
            any_of: vec![r],
            span: at.span(),
            soft: false,
        });
    }

    /// Peels `(^^ e a)` wrappers, returning `e` and the advice payloads.
    fn peel<'a>(&mut self, e: &'a SExpr) -> Option<(&'a SExpr, Vec<SExpr>)> {
        let mut cur = e;
        let mut advice = Vec::new();
        while let Some(items) = cur.as_list() {
            if !items.first().is_some_and(|h| h.is_atom("^^")) {
                break;
            }
            if items.len() != 3 {
                self.flag(DiagCode::WrongArgumentCount, cur);
                return None;
            }
            advice.push(items[2].clone());
            cur = &items[1];
        }
        Some((cur, advice))
    }

    fn bare<'a>(&mut self, e: &'a SExpr) -> Option<&'a SExpr> {
        self.peel(e).map(|(e, _)| e)
    }

    fn track(&mut self, t: &mut FieldTracker, key: &SExpr, rank: usize, repeatable: bool) -> bool {
        let text = key.as_atom().map(|a| a.text.clone()).unwrap_or_default();
        if !repeatable && !t.seen.insert(text) {
            self.flag(DiagCode::DuplicateField, key);
            return false;
        }
        if self.strict && rank < t.highest {
            self.flag(DiagCode::FieldOutOfOrder, key);
        }
        t.highest = t.highest.max(rank);
        true
    }

    // ----- definitions -----

    pub fn definition(&mut self, form: &SExpr) -> Option<Definition> {
        let form = self.bare(form)?;
        let Some(items) = form.as_list().filter(|i| i.first().is_some_and(|h| h.is_atom("define")))
        else {
            self.flag(DiagCode::NotADefinition, form);
            return None;
        };
        let Some(header) = items.get(1) else {
            self.flag(DiagCode::MalformedHeader, form);
            return None;
        };
        let header = self.bare(header)?;
        let (kind, name) = match header.as_list() {
            Some([kind, name]) if kind.as_atom().is_some() => {
                let name = self.name(name)?;
                (kind.as_atom().unwrap().text.clone(), name)
            }
            _ => {
                self.flag(DiagCode::MalformedHeader, header);
                return None;
            }
        };
        let fields = &items[2..];
        let span = form.span();
        match kind.as_str() {
            "domain" => Some(Definition::Domain(self.domain(name, fields, span))),
            "problem" => self.problem(name, fields, form).map(Definition::Problem),
            "situation" => self.situation(name, fields, form).map(Definition::Situation),
            "addendum" => {
                if self.strict {
                    self.flag(DiagCode::AddendumForbidden, header);
                }
                self.addendum(name, fields, form).map(Definition::Addendum)
            }
            _ => {
                self.flag(DiagCode::UnknownDefinitionKind, &header.as_list().unwrap()[0]);
                None
            }
        }
    }

    /// Splits the fields of a define into (keyword, field form, arguments).
    fn fields<'a>(&mut self, fields: &'a [SExpr]) -> Vec<(&'a SExpr, &'a SExpr, &'a [SExpr])> {
        let mut out = Vec::new();
        for f in fields {
            let Some(f) = self.bare(f) else { continue };
            match f.as_list() {
                Some([key, args @ ..]) if key.is_keyword() => out.push((key, f, args)),
                _ => self.flag(DiagCode::UnexpectedElement, f),
            }
        }
        out
    }

    fn domain(&mut self, name: Name, fields: &[SExpr], span: SourceSpan) -> DomainDef {
        let mut d = DomainDef {
            name,
            extends: Vec::new(),
            requirements: None,
            types: None,
            constants: None,
            domain_vars: None,
            predicates: Vec::new(),
            timeless: Vec::new(),
            safety: Vec::new(),
            actions: Vec::new(),
            axioms: Vec::new(),
            methods: Vec::new(),
            span,
        };
        let mut order = FieldTracker::default();
        for (key, field, args) in self.fields(fields) {
            let text = key.as_atom().unwrap().text.as_str();
            let rank = match text {
                ":extends" => 0,
                ":requirements" => 1,
                ":types" => 2,
                ":constants" => 3,
                ":domain-variables" => 4,
                ":predicates" => 5,
                ":timeless" => 6,
                ":safety" => 7,
                ":action" | ":axiom" | ":method" => 8,
                _ => {
                    self.flag(DiagCode::UnknownField, field);
                    continue;
                }
            };
            if !self.track(&mut order, key, rank, rank == 8) {
                continue;
            }
            match text {
                ":extends" => {
                    if args.is_empty() {
                        self.flag(DiagCode::MalformedField, field);
                    }
                    d.extends = args.iter().filter_map(|a| self.name(a)).collect();
                }
                ":requirements" => d.requirements = Some(self.requirements(field, args)),
                ":types" => {
                    self.demand(Requirement::Typing, field);
                    d.types = Some(self.typed_list(args, ItemKind::Name));
                }
                ":constants" => d.constants = Some(self.typed_list(args, ItemKind::Name)),
                ":domain-variables" => {
                    self.demand(Requirement::ExpressionEvaluation, field);
                    d.domain_vars = Some(self.typed_list_with(args, |p, e| p.domain_var(e)));
                }
                ":predicates" => {
                    for a in args {
                        d.predicates.extend(self.predicate_decl(a));
                    }
                }
                ":timeless" => {
                    for a in args {
                        d.timeless.extend(self.literal(a, false));
                    }
                }
                ":safety" => {
                    self.demand(Requirement::SafetyConstraints, field);
                    d.safety.extend(self.single_gd(field, args));
                }
                ":action" => d.actions.extend(self.action(field, args)),
                ":axiom" => d.axioms.extend(self.axiom(field, args)),
                ":method" => d.methods.extend(self.method(field, args)),
                _ => unreachable!(),
            }
        }
        d
    }

    fn requirements(&mut self, field: &SExpr, args: &[SExpr]) -> RequirementSet {
        if args.is_empty() {
            self.flag(DiagCode::MalformedField, field);
        }
        let mut set = RequirementSet::empty();
        for a in args {
            let Some(a) = self.bare(a) else { continue };
            match a.atom_text(AtomKind::Keyword).and_then(Requirement::from_keyword) {
                Some(r) => set.insert(r),
                None => self.flag(DiagCode::UnknownRequirement, a),
            }
        }
        set
    }

    fn single_gd(&mut self, field: &SExpr, args: &[SExpr]) -> Option<Gd> {
        match args {
            [g] => self.gd(g),
            _ => {
                self.flag(DiagCode::WrongArgumentCount, field);
                None
            }
        }
    }

    /// `(:domain n)` inside problems, situations, and addenda.
    fn domain_ref(&mut self, field: &SExpr, args: &[SExpr]) -> Option<Name> {
        match args {
            [n] => self.name(n),
            _ => {
                self.flag(DiagCode::WrongArgumentCount, field);
                None
            }
        }
    }

    fn problem(&mut self, name: Name, fields: &[SExpr], form: &SExpr) -> Option<ProblemDef> {
        let mut domain = None;
        let mut p = ProblemDef {
            name,
            domain: Name::synthetic(""),
            requirements: None,
            situation: None,
            objects: None,
            init: None,
            goals: Vec::new(),
            expansions: Vec::new(),
            length: None,
            span: form.span(),
        };
        let mut order = FieldTracker::default();
        for (key, field, args) in self.fields(fields) {
            let text = key.as_atom().unwrap().text.as_str();
            let rank = match text {
                ":domain" => 0,
                ":requirements" => 1,
                ":situation" => 2,
                ":objects" => 3,
                ":init" => 4,
                ":goal" | ":expansion" => 5,
                ":length" => 6,
                _ => {
                    self.flag(DiagCode::UnknownField, field);
                    continue;
                }
            };
            if !self.track(&mut order, key, rank, rank == 5) {
                continue;
            }
            match text {
                ":domain" => domain = self.domain_ref(field, args),
                ":requirements" => p.requirements = Some(self.requirements(field, args)),
                ":situation" => match args {
                    [n] => p.situation = self.name(n),
                    _ => self.flag(DiagCode::WrongArgumentCount, field),
                },
                ":objects" => p.objects = Some(self.typed_list(args, ItemKind::Name)),
                ":init" => p.init = Some(args.iter().filter_map(|a| self.literal(a, false)).collect()),
                ":goal" => p.goals.extend(self.single_gd(field, args)),
                ":expansion" => {
                    self.demand(Requirement::ActionExpansions, field);
                    match args {
                        [s] => p.expansions.extend(self.spec(s)),
                        _ => self.flag(DiagCode::WrongArgumentCount, field),
                    }
                }
                ":length" => p.length = Some(self.length(args)),
                _ => unreachable!(),
            }
        }
        match domain {
            Some(d) => p.domain = d,
            None => {
                if !order.seen.contains(":domain") {
                    self.flag(DiagCode::MissingField, form);
                }
                return None;
            }
        }
        Some(p)
    }

    fn length(&mut self, args: &[SExpr]) -> LengthSpec {
        let mut spec = LengthSpec::default();
        for a in args {
            let Some(a) = self.bare(a) else { continue };
            let parsed = match a.as_list() {
                Some([k, n]) => n
                    .atom_text(AtomKind::Number)
                    .and_then(|t| t.parse::<u64>().ok())
                    .map(|n| (k, n)),
                _ => None,
            };
            match parsed {
                Some((k, n)) if k.is_atom(":serial") && spec.serial.is_none() => spec.serial = Some(n),
                Some((k, n)) if k.is_atom(":parallel") && spec.parallel.is_none() => {
                    spec.parallel = Some(n)
                }
                _ => self.flag(DiagCode::MalformedField, a),
            }
        }
        spec
    }

    fn situation(&mut self, name: Name, fields: &[SExpr], form: &SExpr) -> Option<SituationDef> {
        let mut domain = None;
        let mut s = SituationDef {
            name,
            domain: Name::synthetic(""),
            objects: None,
            init: Vec::new(),
            span: form.span(),
        };
        let mut order = FieldTracker::default();
        for (key, field, args) in self.fields(fields) {
            let text = key.as_atom().unwrap().text.as_str();
            let rank = match text {
                ":domain" => 0,
                ":objects" => 1,
                ":init" => 2,
                _ => {
                    self.flag(DiagCode::UnknownField, field);
                    continue;
                }
            };
            if !self.track(&mut order, key, rank, false) {
                continue;
            }
            match text {
                ":domain" => domain = self.domain_ref(field, args),
                ":objects" => s.objects = Some(self.typed_list(args, ItemKind::Name)),
                ":init" => s.init = args.iter().filter_map(|a| self.literal(a, false)).collect(),
                _ => unreachable!(),
            }
        }
        match domain {
            Some(d) => s.domain = d,
            None => {
                if !order.seen.contains(":domain") {
                    self.flag(DiagCode::MissingField, form);
                }
                return None;
            }
        }
        Some(s)
    }

    fn addendum(&mut self, name: Name, fields: &[SExpr], form: &SExpr) -> Option<AddendumDef> {
        let mut a = AddendumDef {
            name,
            domain: Name::synthetic(""),
            actions: Vec::new(),
            axioms: Vec::new(),
            methods: Vec::new(),
            safety: Vec::new(),
            span: form.span(),
        };
        let mut domain = None;
        let mut rest = fields;
        // The bare `:domain n` spelling is flagged but understood.
        if let [k, n, tail @ ..] = fields {
            if k.is_atom(":domain") {
                self.flag(DiagCode::MalformedField, k);
                domain = self.name(n);
                rest = tail;
            }
        }
        let mut order = FieldTracker::default();
        for (key, field, args) in self.fields(rest) {
            let text = key.as_atom().unwrap().text.as_str();
            let rank = match text {
                ":domain" => 0,
                ":action" | ":axiom" | ":method" | ":safety" => 1,
                _ => {
                    self.flag(DiagCode::UnknownField, field);
                    continue;
                }
            };
            if domain.is_some() && rank == 0 {
                self.flag(DiagCode::DuplicateField, key);
                continue;
            }
            if !self.track(&mut order, key, rank, rank == 1) {
                continue;
            }
            match text {
                ":domain" => domain = self.domain_ref(field, args),
                ":action" => a.actions.extend(self.action(field, args)),
                ":axiom" => a.axioms.extend(self.axiom(field, args)),
                ":method" => a.methods.extend(self.method(field, args)),
                ":safety" => {
                    self.demand(Requirement::SafetyConstraints, field);
                    a.safety.extend(self.single_gd(field, args));
                }
                _ => unreachable!(),
            }
        }
        match domain {
            Some(d) => a.domain = d,
            None => {
                self.flag(DiagCode::MissingField, form);
                return None;
            }
        }
        Some(a)
    }

    // ----- structure definitions -----

    /// Pairs up `:key value` arguments.
    fn keyword_args<'a>(&mut self, items: &'a [SExpr]) -> Vec<(&'a SExpr, &'a SExpr)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < items.len() {
            let item = &items[i];
            if !item.is_keyword() {
                self.flag(DiagCode::UnexpectedElement, item);
                i += 1;
                continue;
            }
            match items.get(i + 1) {
                Some(value) => out.push((item, value)),
                None => self.flag(DiagCode::MalformedField, item),
            }
            i += 2;
        }
        out
    }

    fn body_rank(key: &str) -> Option<usize> {
        Some(match key {
            ":vars" => 0,
            ":precondition" => 1,
            ":expansion" => 2,
            ":maintain" => 3,
            ":effect" => 4,
            ":only-in-expansions" => 5,
            _ => return None,
        })
    }

    /// Parses one body field into `body`. Returns false for unknown keys.
    fn body_field(
        &mut self,
        body: &mut ActionBody,
        key: &SExpr,
        value: &SExpr,
        ctx: BodyContext,
    ) {
        let text = key.as_atom().unwrap().text.as_str();
        let allowed = match ctx {
            BodyContext::Action => true,
            BodyContext::Method => !matches!(text, ":effect" | ":only-in-expansions"),
            BodyContext::InContext => matches!(text, ":precondition" | ":maintain" | ":effect"),
        };
        if !allowed {
            let code = if ctx == BodyContext::Method {
                DiagCode::MethodFieldNotAllowed
            } else {
                DiagCode::FieldNotAllowed
            };
            self.flag(code, key);
            return;
        }
        match text {
            ":vars" => {
                self.demands.push(Demand {
                    any_of: vec![
                        Requirement::ExistentialPreconditions,
                        Requirement::ConditionalEffects,
                    ],
                    span: key.span(),
                    soft: true,
                });
                body.vars = self.var_list(value);
            }
            ":precondition" => body.precondition = self.gd(value),
            ":expansion" => {
                self.demand(Requirement::ActionExpansions, key);
                body.expansion = if value.is_atom(":methods") {
                    Some(Expansion::Methods)
                } else {
                    self.spec(value).map(Expansion::Spec)
                };
            }
            ":maintain" => {
                if ctx != BodyContext::InContext {
                    self.demand(Requirement::ActionExpansions, key);
                }
                body.maintain = self.gd(value);
            }
            ":effect" => body.effect = self.effect(value),
            ":only-in-expansions" => {
                self.demand(Requirement::ActionExpansions, key);
                body.only_in_expansions = match value.as_atom().map(|a| a.text.as_str()) {
                    Some("t") => Some(true),
                    Some("nil") => Some(false),
                    _ => {
                        self.flag(DiagCode::ExpectedBoolean, value);
                        None
                    }
                };
            }
            _ => unreachable!(),
        }
    }

    fn var_list(&mut self, value: &SExpr) -> Option<TypedList<Name>> {
        let value = self.bare(value)?;
        match value.as_list() {
            Some(items) => Some(self.typed_list(items, ItemKind::Variable)),
            None => {
                self.flag(DiagCode::MalformedTypedList, value);
                None
            }
        }
    }

    fn action(&mut self, field: &SExpr, args: &[SExpr]) -> Option<ActionDef> {
        let Some(name) = args.first() else {
            self.flag(DiagCode::MissingField, field);
            return None;
        };
        let name = self.name(name)?;
        let mut params = None;
        let mut body = ActionBody::default();
        let mut order = FieldTracker::default();
        for (key, value) in self.keyword_args(&args[1..]) {
            let text = key.as_atom().unwrap().text.clone();
            let rank = if text == ":parameters" {
                0
            } else if let Some(r) = Self::body_rank(&text) {
                r + 1
            } else {
                self.flag(DiagCode::UnknownField, key);
                continue;
            };
            if !self.track(&mut order, key, rank, false) {
                continue;
            }
            if rank == 0 {
                params = self.var_list(value);
            } else {
                self.body_field(&mut body, key, value, BodyContext::Action);
            }
        }
        if !order.seen.contains(":parameters") {
            self.flag(DiagCode::MissingField, field);
        }
        Some(ActionDef {
            name,
            params: params.unwrap_or_default(),
            body,
            span: field.span(),
        })
    }

    fn method(&mut self, field: &SExpr, args: &[SExpr]) -> Option<MethodDef> {
        self.demand(Requirement::ActionExpansions, field);
        let Some(action) = args.first() else {
            self.flag(DiagCode::MissingField, field);
            return None;
        };
        let action = self.name(action)?;
        let mut name = None;
        let mut params = None;
        let mut body = ActionBody::default();
        let mut order = FieldTracker::default();
        for (key, value) in self.keyword_args(&args[1..]) {
            let text = key.as_atom().unwrap().text.clone();
            let rank = match text.as_str() {
                ":name" => 0,
                ":parameters" => 1,
                other => match Self::body_rank(other) {
                    Some(r) => r + 2,
                    None => {
                        self.flag(DiagCode::UnknownField, key);
                        continue;
                    }
                },
            };
            if !self.track(&mut order, key, rank, false) {
                continue;
            }
            match rank {
                0 => name = self.name(value),
                1 => params = self.var_list(value),
                _ => self.body_field(&mut body, key, value, BodyContext::Method),
            }
        }
        if !order.seen.contains(":parameters") {
            self.flag(DiagCode::MissingField, field);
        }
        Some(MethodDef {
            action,
            name,
            params: params.unwrap_or_default(),
            body,
            span: field.span(),
        })
    }

    fn axiom(&mut self, field: &SExpr, args: &[SExpr]) -> Option<AxiomDef> {
        self.demand(Requirement::DomainAxioms, field);
        let mut vars = None;
        let mut context = None;
        let mut implies = None;
        let mut order = FieldTracker::default();
        for (key, value) in self.keyword_args(args) {
            let text = key.as_atom().unwrap().text.clone();
            let rank = match text.as_str() {
                ":vars" => 0,
                ":context" => 1,
                ":implies" => 2,
                _ => {
                    self.flag(DiagCode::UnknownField, key);
                    continue;
                }
            };
            if !self.track(&mut order, key, rank, false) {
                continue;
            }
            match rank {
                0 => vars = self.var_list(value),
                1 => context = self.gd(value),
                _ => implies = self.literal(value, true),
            }
        }
        let missing = !order.seen.contains(":context") || !order.seen.contains(":implies");
        if missing {
            self.flag(DiagCode::MissingField, field);
        }
        Some(AxiomDef {
            vars: vars.unwrap_or_default(),
            context: context?,
            implies: implies?,
            span: field.span(),
        })
    }

    fn predicate_decl(&mut self, e: &SExpr) -> Option<PredicateDecl> {
        let e = self.bare(e)?;
        match e.as_list() {
            Some([head, params @ ..]) => {
                let name = self.name(head)?;
                Some(PredicateDecl {
                    name,
                    params: self.typed_list(params, ItemKind::Variable),
                    span: e.span(),
                })
            }
            _ => {
                self.flag(DiagCode::MalformedField, e);
                None
            }
        }
    }

    fn domain_var(&mut self, e: &SExpr) -> Option<DomainVarDecl> {
        match e.as_list() {
            None => self.name(e).map(|name| DomainVarDecl {
                name,
                initial: None,
                span: e.span(),
            }),
            Some([n, v]) => {
                let name = self.name(n)?;
                let initial = self.term(v, false)?;
                Some(DomainVarDecl {
                    name,
                    initial: Some(initial),
                    span: e.span(),
                })
            }
            Some(_) => {
                self.flag(DiagCode::MalformedTypedList, e);
                None
            }
        }
    }

    // ----- names, terms, types -----

    pub fn name(&mut self, e: &SExpr) -> Option<Name> {
        let e = self.bare(e)?;
        match e.as_atom() {
            Some(a) if a.kind == AtomKind::Name => Some(Name::new(&a.original, a.span)),
            _ => {
                self.flag(DiagCode::ExpectedName, e);
                None
            }
        }
    }

    fn variable(&mut self, e: &SExpr) -> Option<Name> {
        let e = self.bare(e)?;
        match e.as_atom() {
            Some(a) if a.kind == AtomKind::Variable => Some(Name::new(&a.original, a.span)),
            _ => {
                self.flag(DiagCode::ExpectedVariable, e);
                None
            }
        }
    }

    /// A name, number, or (when allowed) variable.
    fn term(&mut self, e: &SExpr, allow_vars: bool) -> Option<Term> {
        let e = self.bare(e)?;
        match e.as_atom() {
            Some(a) if a.kind == AtomKind::Name => Some(Term::Name(Name::new(&a.original, a.span))),
            Some(a) if a.kind == AtomKind::Variable && allow_vars => {
                Some(Term::Var(Name::new(&a.original, a.span)))
            }
            Some(a) if a.kind == AtomKind::Number => Some(Term::Number(Number {
                value: NumericValue::parse(&a.text)?,
                span: a.span,
            })),
            _ => {
                self.flag(DiagCode::ExpectedName, e);
                None
            }
        }
    }

    pub fn type_expr(&mut self, e: &SExpr) -> Option<TypeExpr> {
        self.type_expr_at(e, false)
    }

    fn type_expr_at(&mut self, e: &SExpr, in_fluent: bool) -> Option<TypeExpr> {
        let e = self.bare(e)?;
        if let Some(a) = e.as_atom() {
            if a.kind == AtomKind::Name {
                return Some(TypeExpr::Atom(Name::new(&a.original, a.span)));
            }
            self.flag(DiagCode::MalformedType, e);
            return None;
        }
        match e.as_list().unwrap() {
            [head, members @ ..] if head.is_atom("either") && !members.is_empty() => {
                let ts: Vec<TypeExpr> = members
                    .iter()
                    .filter_map(|m| self.type_expr_at(m, in_fluent))
                    .collect();
                (ts.len() == members.len()).then_some(TypeExpr::Either(ts))
            }
            [head, inner] if head.is_atom("fluent") => {
                self.demand(Requirement::Fluents, e);
                if in_fluent {
                    self.flag(DiagCode::NestedFluentType, e);
                }
                let inner = self.type_expr_at(inner, true)?;
                Some(TypeExpr::Fluent(Box::new(inner)))
            }
            _ => {
                self.flag(DiagCode::MalformedType, e);
                None
            }
        }
    }

    pub fn typed_list(&mut self, elems: &[SExpr], kind: ItemKind) -> TypedList<Name> {
        self.typed_list_with(elems, |p, e| match kind {
            ItemKind::Name => p.name(e),
            ItemKind::Variable => p.variable(e),
        })
    }

    /// `x1 x2 - t1 x3`: scans for `-` separators; trailing items default to
    /// `object`.
    fn typed_list_with<X>(
        &mut self,
        elems: &[SExpr],
        mut item: impl FnMut(&mut Parser, &SExpr) -> Option<X>,
    ) -> TypedList<X> {
        let mut groups = Vec::new();
        let mut pending: Vec<X> = Vec::new();
        let mut pending_any = false;
        let mut i = 0;
        while i < elems.len() {
            let Some(e) = self.bare(&elems[i]) else {
                i += 1;
                continue;
            };
            if e.is_atom("-") {
                self.demand(Requirement::Typing, e);
                if !pending_any {
                    self.flag(DiagCode::MalformedTypedList, e);
                    i += 1;
                    continue;
                }
                let Some(ty_expr) = elems.get(i + 1) else {
                    self.flag(DiagCode::MalformedTypedList, e);
                    break;
                };
                if let Some(ty) = self.type_expr(ty_expr) {
                    groups.push(TypedGroup {
                        items: std::mem::take(&mut pending),
                        ty,
                        explicit: true,
                    });
                } else {
                    pending.clear();
                }
                pending_any = false;
                i += 2;
                continue;
            }
            pending_any = true;
            if let Some(x) = item(self, e) {
                pending.push(x);
            }
            i += 1;
        }
        if !pending.is_empty() {
            groups.push(TypedGroup {
                items: pending,
                ty: TypeExpr::object(),
                explicit: false,
            });
        }
        TypedList { groups }
    }

    // ----- goal descriptions -----

    fn atomic_formula(&mut self, e: &SExpr, allow_vars: bool) -> Option<AtomicFormula> {
        match e.as_list() {
            Some([head, args @ ..]) => {
                let predicate = self.name(head)?;
                let args: Vec<Term> = args.iter().filter_map(|a| self.term(a, allow_vars)).collect();
                Some(AtomicFormula {
                    predicate,
                    args,
                    span: e.span(),
                })
            }
            _ => {
                self.flag(DiagCode::ExpectedLiteral, e);
                None
            }
        }
    }

    /// `(p t*)` or `(not (p t*))`.
    pub fn literal(&mut self, e: &SExpr, allow_vars: bool) -> Option<Literal> {
        let e = self.bare(e)?;
        if let Some([head, inner]) = e.as_list() {
            if head.is_atom("not") {
                let inner = self.bare(inner)?;
                if inner.head() == Some("=") || inner.head() == Some("not") {
                    self.flag(DiagCode::ExpectedLiteral, inner);
                    return None;
                }
                return self.atomic_formula(inner, allow_vars).map(|atom| Literal {
                    positive: false,
                    atom,
                    span: e.span(),
                });
            }
        }
        if matches!(e.head(), Some("=" | "not" | "and" | "or")) {
            self.flag(DiagCode::ExpectedLiteral, e);
            return None;
        }
        self.atomic_formula(e, allow_vars).map(|atom| Literal {
            positive: true,
            atom,
            span: e.span(),
        })
    }

    fn quantified_vars(&mut self, e: &SExpr) -> Option<TypedList<Name>> {
        self.var_list(e)
    }

    pub fn gd(&mut self, e: &SExpr) -> Option<Gd> {
        let (e, advice) = self.peel(e)?;
        let mut gd = self.gd_kind(e).map(|kind| Gd::new(kind, e.span()))?;
        gd.advice = advice;
        Some(gd)
    }

    fn gd_kind(&mut self, e: &SExpr) -> Option<GdKind> {
        let Some(items) = e.as_list() else {
            self.flag(DiagCode::MalformedGoal, e);
            return None;
        };
        let Some(head) = items.first().and_then(|h| h.as_atom()) else {
            self.flag(DiagCode::MalformedGoal, e);
            return None;
        };
        let args = &items[1..];
        let arity = |p: &mut Parser, n: usize| {
            if args.len() != n {
                p.flag(DiagCode::WrongArgumentCount, e);
                false
            } else {
                true
            }
        };
        use Requirement as R;
        Some(match head.text.as_str() {
            "and" => GdKind::And(args.iter().filter_map(|a| self.gd(a)).collect()),
            "or" => {
                self.demand(R::DisjunctivePreconditions, e);
                GdKind::Or(args.iter().filter_map(|a| self.gd(a)).collect())
            }
            "not" => {
                if !arity(self, 1) {
                    return None;
                }
                let inner = self.gd(&args[0])?;
                if !matches!(inner.kind, GdKind::Atom(_) | GdKind::Equal(..)) {
                    self.demand(R::DisjunctivePreconditions, e);
                }
                GdKind::Not(Box::new(inner))
            }
            "imply" => {
                self.demand(R::DisjunctivePreconditions, e);
                if !arity(self, 2) {
                    return None;
                }
                let a = self.gd(&args[0]);
                let b = self.gd(&args[1]);
                GdKind::Imply(Box::new(a?), Box::new(b?))
            }
            q @ ("exists" | "forall") => {
                self.demand(
                    if q == "exists" {
                        R::ExistentialPreconditions
                    } else {
                        R::UniversalPreconditions
                    },
                    e,
                );
                if !arity(self, 2) {
                    return None;
                }
                let vars = self.quantified_vars(&args[0]);
                let body = self.gd(&args[1]);
                let (vars, body) = (vars?, Box::new(body?));
                if q == "exists" {
                    GdKind::Exists(vars, body)
                } else {
                    GdKind::Forall(vars, body)
                }
            }
            "=" => {
                self.demand(R::Equality, e);
                if !arity(self, 2) {
                    return None;
                }
                let a = self.term(&args[0], true);
                let b = self.term(&args[1], true);
                GdKind::Equal(a?, b?)
            }
            "eval" | "equation" | "test" | "bounded-int" => {
                self.demand(R::ExpressionEvaluation, e);
                GdKind::Builtin(self.builtin(e, &head.text, args)?)
            }
            "fluent-eval" | "fluent-test" | "current-value" => {
                self.demand(R::Fluents, e);
                GdKind::Builtin(self.builtin(e, &head.text, args)?)
            }
            _ => GdKind::Atom(self.atomic_formula(e, true)?),
        })
    }

    fn builtin(&mut self, e: &SExpr, head: &str, args: &[SExpr]) -> Option<Builtin> {
        let want = match head {
            "test" | "fluent-test" => 1,
            "bounded-int" => 3,
            _ => 2,
        };
        if args.len() != want {
            self.flag(DiagCode::WrongArgumentCount, e);
            return None;
        }
        Some(match head {
            "eval" | "fluent-eval" => {
                let expr = self.expr(&args[0]);
                let value = self.expr(&args[1]);
                let (expr, value) = (expr?, value?);
                if head == "eval" {
                    Builtin::Eval { expr, value }
                } else {
                    Builtin::FluentEval { expr, value }
                }
            }
            "test" | "fluent-test" => {
                let expr = self.expr(&args[0])?;
                if !matches!(expr, Expr::Compare { .. }) {
                    self.flag(DiagCode::MalformedExpression, &args[0]);
                    return None;
                }
                if head == "test" {
                    Builtin::Test(expr)
                } else {
                    Builtin::FluentTest(expr)
                }
            }
            "bounded-int" => {
                let var = self.expr(&args[0]);
                let low = self.expr(&args[1]);
                let high = self.expr(&args[2]);
                Builtin::BoundedInt {
                    var: var?,
                    low: low?,
                    high: high?,
                }
            }
            "equation" => {
                let lhs = self.expr(&args[0]);
                let rhs = self.expr(&args[1]);
                Builtin::Equation {
                    lhs: lhs?,
                    rhs: rhs?,
                }
            }
            "current-value" => {
                let fluent = self.term(&args[0], true);
                let value = self.term(&args[1], true);
                Builtin::CurrentValue {
                    fluent: fluent?,
                    value: value?,
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn expr(&mut self, e: &SExpr) -> Option<Expr> {
        let e = self.bare(e)?;
        if let Some(a) = e.as_atom() {
            return match a.kind {
                AtomKind::Number => NumericValue::parse(&a.text).map(|value| {
                    Expr::Number(Number {
                        value,
                        span: a.span,
                    })
                }),
                AtomKind::Variable => Some(Expr::Var(Name::new(&a.original, a.span))),
                AtomKind::Name => Some(Expr::Name(Name::new(&a.original, a.span))),
                _ => {
                    self.flag(DiagCode::MalformedExpression, e);
                    None
                }
            };
        }
        let items = e.as_list().unwrap();
        let head = items.first().and_then(|h| h.as_atom()).map(|a| a.text.as_str());
        let args = items.get(1..).unwrap_or(&[]);
        let arith = match head {
            Some("+") => Some(ArithOp::Add),
            Some("-") => Some(ArithOp::Sub),
            Some("*") => Some(ArithOp::Mul),
            Some("/") => Some(ArithOp::Div),
            _ => None,
        };
        if let Some(op) = arith {
            if args.is_empty() || (op == ArithOp::Div && args.len() < 2) {
                self.flag(DiagCode::WrongArgumentCount, e);
                return None;
            }
            let parsed: Vec<Option<Expr>> = args.iter().map(|a| self.expr(a)).collect();
            return Some(Expr::Arith {
                op,
                args: parsed.into_iter().collect::<Option<_>>()?,
                span: e.span(),
            });
        }
        let cmp = match head {
            Some("=") => Some(CmpOp::Eq),
            Some("<") => Some(CmpOp::Lt),
            Some(">") => Some(CmpOp::Gt),
            Some("<=") => Some(CmpOp::Le),
            Some(">=") => Some(CmpOp::Ge),
            _ => None,
        };
        if let Some(op) = cmp {
            if args.len() != 2 {
                self.flag(DiagCode::WrongArgumentCount, e);
                return None;
            }
            let lhs = self.expr(&args[0]);
            let rhs = self.expr(&args[1]);
            return Some(Expr::Compare {
                op,
                lhs: Box::new(lhs?),
                rhs: Box::new(rhs?),
                span: e.span(),
            });
        }
        if head == Some("sum") {
            self.demand(Requirement::Fluents, e);
            if args.len() != 3 {
                self.flag(DiagCode::WrongArgumentCount, e);
                return None;
            }
            let vars = self.var_list(&args[0]);
            let condition = self.gd(&args[1]);
            let body = self.expr(&args[2]);
            return Some(Expr::Sum {
                vars: vars?,
                condition: Box::new(condition?),
                body: Box::new(body?),
                span: e.span(),
            });
        }
        self.flag(DiagCode::MalformedExpression, e);
        None
    }

    // ----- effects -----

    pub fn effect(&mut self, e: &SExpr) -> Option<Effect> {
        let (e, advice) = self.peel(e)?;
        let mut eff = self.effect_kind(e).map(|kind| Effect::new(kind, e.span()))?;
        eff.advice = advice;
        Some(eff)
    }

    fn effect_kind(&mut self, e: &SExpr) -> Option<EffectKind> {
        let Some(head) = e.as_list().and_then(|i| i.first()).and_then(|h| h.as_atom()) else {
            self.flag(DiagCode::ExpectedLiteral, e);
            return None;
        };
        let args = &e.as_list().unwrap()[1..];
        let arity = |p: &mut Parser, n: usize| {
            let ok = args.len() == n;
            if !ok {
                p.flag(DiagCode::WrongArgumentCount, e);
            }
            ok
        };
        Some(match head.text.as_str() {
            "and" => EffectKind::And(args.iter().filter_map(|a| self.effect(a)).collect()),
            "not" => {
                if !arity(self, 1) {
                    return None;
                }
                let inner = self.bare(&args[0])?;
                if matches!(
                    inner.head(),
                    Some(
                        "and" | "or" | "not" | "imply" | "exists" | "forall" | "when" | "=" | "change"
                    )
                ) {
                    self.flag(DiagCode::ExpectedLiteral, inner);
                    return None;
                }
                EffectKind::Del(self.atomic_formula(inner, true)?)
            }
            "forall" => {
                self.demand(Requirement::ConditionalEffects, e);
                if !arity(self, 2) {
                    return None;
                }
                let vars = self.var_list(&args[0]);
                let body = self.effect(&args[1]);
                EffectKind::Forall(vars?, Box::new(body?))
            }
            "when" => {
                self.demand(Requirement::ConditionalEffects, e);
                if !arity(self, 2) {
                    return None;
                }
                let cond = self.gd(&args[0]);
                let body = self.effect(&args[1]);
                EffectKind::When(cond?, Box::new(body?))
            }
            "change" => {
                self.demand(Requirement::Fluents, e);
                if !arity(self, 2) {
                    return None;
                }
                let fluent = self.term(&args[0], true);
                let value = self.expr(&args[1]);
                EffectKind::Change {
                    fluent: fluent?,
                    value: value?,
                }
            }
            "or" | "imply" | "exists" | "=" | "eval" | "test" | "equation" | "bounded-int"
            | "fluent-eval" | "fluent-test" | "current-value" => {
                self.flag(DiagCode::NotAllowedInEffect, e);
                return None;
            }
            _ => EffectKind::Add(self.atomic_formula(e, true)?),
        })
    }

    // ----- action specs -----

    fn in_context_conditions(&mut self, args: &[SExpr]) -> ContextConditions {
        let mut body = ActionBody::default();
        let mut order = FieldTracker::default();
        for (key, value) in self.keyword_args(args) {
            let text = key.as_atom().unwrap().text.clone();
            let Some(rank) = Self::body_rank(&text) else {
                self.flag(DiagCode::UnknownField, key);
                continue;
            };
            if self.track(&mut order, key, rank, false) {
                self.body_field(&mut body, key, value, BodyContext::InContext);
            }
        }
        ContextConditions {
            precondition: body.precondition,
            maintain: body.maintain,
            effect: body.effect,
        }
    }

    fn label_term(&mut self, e: &SExpr) -> Option<LabelTerm> {
        if let Some(a) = e.as_atom() {
            if a.kind == AtomKind::Name {
                return Some(LabelTerm {
                    label: Name::new(&a.original, a.span),
                    qualifier: LabelQualifier::Whole,
                    span: e.span(),
                });
            }
            return None;
        }
        match e.as_list() {
            Some([q, l]) if q.is_atom("<") || q.is_atom(">") => {
                let label = self.name(l)?;
                Some(LabelTerm {
                    label,
                    qualifier: if q.is_atom("<") {
                        LabelQualifier::Begin
                    } else {
                        LabelQualifier::End
                    },
                    span: e.span(),
                })
            }
            _ => None,
        }
    }

    fn is_label_form(e: &SExpr) -> bool {
        e.as_atom().is_some()
            || matches!(e.as_list(), Some([q, _]) if q.is_atom("<") || q.is_atom(">"))
    }

    pub fn spec(&mut self, e: &SExpr) -> Option<ActionSpec> {
        let (e, advice) = self.peel(e)?;
        let mut spec = self.spec_kind(e).map(|kind| ActionSpec::new(kind, e.span()))?;
        spec.advice = advice;
        Some(spec)
    }

    fn specs(&mut self, items: &[SExpr]) -> Vec<ActionSpec> {
        items.iter().filter_map(|s| self.spec(s)).collect()
    }

    fn spec_kind(&mut self, e: &SExpr) -> Option<SpecKind> {
        let Some(items) = e.as_list() else {
            self.flag(DiagCode::MalformedActionSpec, e);
            return None;
        };
        let Some(head) = items.first().and_then(|h| h.as_atom()) else {
            self.flag(DiagCode::MalformedActionSpec, e);
            return None;
        };
        let args = &items[1..];
        Some(match head.text.as_str() {
            "--" => {
                if !args.is_empty() {
                    self.flag(DiagCode::NoOpWithArguments, e);
                }
                SpecKind::NoOp
            }
            "in-context" => {
                let Some(first) = args.first() else {
                    self.flag(DiagCode::WrongArgumentCount, e);
                    return None;
                };
                let body = self.spec(first)?;
                let conditions = self.in_context_conditions(&args[1..]);
                SpecKind::InContext {
                    body: Box::new(body),
                    conditions,
                }
            }
            "achieve" => {
                if args.len() != 1 {
                    self.flag(DiagCode::WrongArgumentCount, e);
                    return None;
                }
                let precondition = self.gd(&args[0])?;
                SpecKind::InContext {
                    body: Box::new(ActionSpec::new(SpecKind::NoOp, e.span())),
                    conditions: ContextConditions {
                        precondition: Some(precondition),
                        ..Default::default()
                    },
                }
            }
            "choice" => SpecKind::Choice(self.specs(args)),
            "series" => SpecKind::Series(self.specs(args)),
            "parallel" => SpecKind::Parallel(self.specs(args)),
            "forsome" => {
                if args.len() != 2 {
                    self.flag(DiagCode::WrongArgumentCount, e);
                    return None;
                }
                let vars = self.var_list(&args[0]);
                let body = self.spec(&args[1]);
                SpecKind::Forsome {
                    vars: vars?,
                    body: Box::new(body?),
                }
            }
            "foreach" => {
                self.demand(Requirement::ForeachExpansions, e);
                if args.len() != 3 {
                    self.flag(DiagCode::WrongArgumentCount, e);
                    return None;
                }
                let vars = self.var_list(&args[0]);
                let condition = self.gd(&args[1]);
                let body = self.spec(&args[2]);
                SpecKind::Foreach {
                    vars: vars?,
                    condition: condition?,
                    body: Box::new(body?),
                }
            }
            "tag" => {
                let bodies: Vec<usize> = (0..args.len())
                    .filter(|&i| !Self::is_label_form(&args[i]))
                    .collect();
                let [at] = bodies[..] else {
                    self.flag(DiagCode::MalformedTag, e);
                    return None;
                };
                let before = args[..at].iter().filter_map(|l| self.label(l)).collect();
                let after = args[at + 1..].iter().filter_map(|l| self.label(l)).collect();
                let body = self.spec(&args[at])?;
                SpecKind::Tag {
                    before,
                    body: Box::new(body),
                    after,
                }
            }
            "constrained" => {
                self.demand(Requirement::DagExpansions, e);
                let Some(first) = args.first() else {
                    self.flag(DiagCode::WrongArgumentCount, e);
                    return None;
                };
                // `((s1) (s2) ...)` is a list of specs; anything else is one spec.
                let spec_list = matches!(first.as_list(), Some([h, ..]) if h.as_list().is_some());
                let specs = if spec_list {
                    self.specs(first.as_list().unwrap())
                } else {
                    self.spec(first).into_iter().collect()
                };
                if specs.is_empty() {
                    return None;
                }
                let constraints = args[1..].iter().filter_map(|c| self.constraint(c)).collect();
                SpecKind::Constrained {
                    specs,
                    constraints,
                }
            }
            _ => {
                if head.kind != AtomKind::Name {
                    self.flag(DiagCode::MalformedActionSpec, e);
                    return None;
                }
                let args: Vec<Term> = args.iter().filter_map(|a| self.term(a, true)).collect();
                SpecKind::Action(ActionTerm {
                    functor: Name::new(&head.original, head.span),
                    args,
                    span: e.span(),
                })
            }
        })
    }

    fn label(&mut self, e: &SExpr) -> Option<LabelTerm> {
        let l = self.label_term(e);
        if l.is_none() {
            self.flag(DiagCode::MalformedTag, e);
        }
        l
    }

    pub fn constraint(&mut self, e: &SExpr) -> Option<Constraint> {
        let e = self.bare(e)?;
        if Self::is_label_form(e) {
            return match self.label_term(e) {
                Some(l) => Some(Constraint {
                    kind: ConstraintKind::Label(l),
                    span: e.span(),
                }),
                None => {
                    self.flag(DiagCode::MalformedConstraint, e);
                    None
                }
            };
        }
        let items = e.as_list().unwrap();
        let args = items.get(1..).unwrap_or(&[]);
        let kind = match items.first().and_then(|h| h.as_atom()).map(|a| a.text.as_str()) {
            Some("series") => {
                ConstraintKind::Series(args.iter().filter_map(|c| self.constraint(c)).collect())
            }
            Some("parallel") => {
                ConstraintKind::Parallel(args.iter().filter_map(|c| self.constraint(c)).collect())
            }
            Some("in-context") if !args.is_empty() => {
                let body = self.constraint(&args[0])?;
                ConstraintKind::InContext {
                    body: Box::new(body),
                    conditions: self.in_context_conditions(&args[1..]),
                }
            }
            _ => {
                self.flag(DiagCode::MalformedConstraint, e);
                return None;
            }
        };
        Some(Constraint {
            kind,
            span: e.span(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::read_str;

    fn one(text: &str) -> SExpr {
        read_str(text, FileId(0)).0.remove(0)
    }

    fn gd(text: &str) -> (Option<Gd>, Vec<Diagnostic>, Vec<Demand>) {
        let mut p = Parser::new(false);
        let g = p.gd(&one(text));
        let (d, dm) = p.finish();
        (g, d, dm)
    }

    #[test]
    fn typed_list_groups() {
        let mut p = Parser::new(false);
        let items = read_str("(integer float - number physob)", FileId(0)).0;
        let tl = p.typed_list(items[0].as_list().unwrap(), ItemKind::Name);
        let pairs: Vec<(String, String)> = tl
            .iter()
            .map(|(n, t)| (n.to_string(), t.to_string()))
            .collect();
        assert_eq!(
            pairs,
            [("integer", "number"), ("float", "number"), ("physob", "object")]
                .map(|(a, b)| (a.to_string(), b.to_string()))
        );
        assert!(p.finish().0.is_empty());
    }

    #[test]
    fn typed_list_errors() {
        let mut p = Parser::new(false);
        let items = read_str("(- a) (a -) (?x b)", FileId(0)).0;
        p.typed_list(items[0].as_list().unwrap(), ItemKind::Name);
        p.typed_list(items[1].as_list().unwrap(), ItemKind::Name);
        let tl = p.typed_list(items[2].as_list().unwrap(), ItemKind::Name);
        assert_eq!(tl.len(), 1);
        let codes: Vec<_> = p.finish().0.iter().map(|d| d.code).collect();
        assert_eq!(
            codes,
            [
                DiagCode::MalformedTypedList,
                DiagCode::MalformedTypedList,
                DiagCode::ExpectedName
            ]
        );
    }

    #[test]
    fn literal_negation_needs_no_flag() {
        let (g, d, dm) = gd("(and (at B ?m) (not (= ?m ?l)))");
        assert!(d.is_empty());
        let GdKind::And(parts) = g.unwrap().kind else {
            panic!()
        };
        assert!(matches!(parts[1].kind, GdKind::Not(_)));
        let reqs: Vec<_> = dm.iter().map(|d| d.any_of[0]).collect();
        assert_eq!(reqs, [Requirement::Equality]);
    }

    #[test]
    fn general_negation_demands_disjunction() {
        let (_, _, dm) = gd("(not (and (p) (q)))");
        assert_eq!(dm[0].any_of, [Requirement::DisjunctivePreconditions]);
    }

    #[test]
    fn achieve_is_sugar() {
        let mut p = Parser::new(false);
        let a = p.spec(&one("(achieve (p))")).unwrap();
        let b = p
            .spec(&one("(in-context (--) :precondition (p))"))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn advice_is_peeled() {
        let (g, d, _) = gd("(^^ (^^ (at b ?m) a1) (goal-type: achievable))");
        assert!(d.is_empty());
        let g = g.unwrap();
        assert_eq!(g.advice.len(), 2);
        assert!(matches!(g.kind, GdKind::Atom(_)));
    }

    #[test]
    fn or_in_effect_is_flagged() {
        let mut p = Parser::new(false);
        assert!(p.effect(&one("(or (p) (q))")).is_none());
        assert_eq!(p.finish().0[0].code, DiagCode::NotAllowedInEffect);
    }

    #[test]
    fn noop_arguments_flagged() {
        let mut p = Parser::new(false);
        let s = p.spec(&one("(-- x)")).unwrap();
        assert_eq!(s.kind, SpecKind::NoOp);
        assert_eq!(p.finish().0[0].code, DiagCode::NoOpWithArguments);
    }

    #[test]
    fn strict_order_and_duplicates() {
        let text = "(define (domain d) (:requirements :strips) (:predicates (p)) \
                    (:action a :parameters () :effect (p)) (:types t))";
        let out = parse_source(text, FileId(0), false);
        assert!(out.diagnostics.is_empty());
        let out = parse_source(text, FileId(0), true);
        let codes: Vec<_> = out.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, [DiagCode::FieldOutOfOrder]);
    }

    #[test]
    fn constrained_forms() {
        let mut p = Parser::new(false);
        let s = p
            .spec(&one(
                "(constrained ((series (tag (a) (> end-a)) (b)) (series (c) (tag (< beg-d) (d) (> end-d)))) \
                 (in-context (series end-a beg-d end-d) :maintain (p)))",
            ))
            .unwrap();
        let SpecKind::Constrained { specs, constraints } = s.kind else {
            panic!()
        };
        assert_eq!((specs.len(), constraints.len()), (2, 1));
        let s = p
            .spec(&one("(constrained (tag (carry x) (> end)) (in-context end :precondition (not (p))))"))
            .unwrap();
        let SpecKind::Constrained { specs, .. } = s.kind else {
            panic!()
        };
        assert_eq!(specs.len(), 1);
        assert!(p.finish().0.is_empty());
    }
}
