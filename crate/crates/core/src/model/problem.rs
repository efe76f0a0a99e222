//! Problems and named initial situations.

use super::build::check_demands;
use super::check::Checker;
use super::domain::{Constant, DomainModel};
use super::registry::Registry;
use super::requirements::{Requirement, RequirementSet};
use crate::diagnostics::{DiagCode, Diagnostic};
use crate::syntax::*;
use std::collections::BTreeMap;

/// The predicate that assigns a fluent its value in an initial state.
pub const CURRENT_VALUE: &str = "current-value";

#[derive(Debug, Clone, PartialEq)]
pub struct SituationModel {
    pub name: Name,
    pub domain: String,
    pub objects: BTreeMap<String, Constant>,
    /// Literals to apply, in order, to the empty state.
    pub initial: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemModel {
    pub name: Name,
    pub domain: String,
    /// The domain's flags plus the problem's own, closed.
    pub requirements: RequirementSet,
    pub situation: Option<String>,
    /// Every object visible in the problem: those of the situation, the
    /// declared ones, and those inferred from `:init`.
    pub objects: BTreeMap<String, Constant>,
    /// The situation's literals followed by the problem's own `:init`.
    pub initial: Vec<Literal>,
    pub goals: Vec<Gd>,
    pub expansions: Vec<ActionSpec>,
    pub length: Option<LengthSpec>,
}

impl ProblemModel {
    /// All `:goal`s conjoined, if there are any.
    pub fn goal(&self) -> Option<Gd> {
        match self.goals.as_slice() {
            [] => None,
            [g] => Some(g.clone()),
            gs => Some(Gd::and(gs.to_vec())),
        }
    }
}

fn flag(source: &SExpr, code: DiagCode, span: SourceSpan) -> Diagnostic {
    Diagnostic::new(code, source.find(&span).unwrap_or(source))
}

fn declare_objects(
    model: &DomainModel,
    list: Option<&TypedList<Name>>,
    objects: &mut BTreeMap<String, Constant>,
    ck: &mut Checker,
) {
    let Some(list) = list else { return };
    let mut seen = std::collections::BTreeSet::new();
    for (o, t) in list.declared() {
        if !seen.insert(o.as_str()) {
            ck.flag(DiagCode::DuplicateDeclaration, o.span);
            continue;
        }
        if let Some(t) = t {
            ck.type_known(t);
        }
        if model.constants.contains_key(o.as_str()) {
            continue;
        }
        objects.insert(
            o.canonical.clone(),
            Constant {
                name: o.clone(),
                ty: t.cloned().unwrap_or_else(TypeExpr::object),
                explicit: t.is_some(),
            },
        );
    }
}

/// Gives every undeclared (or untyped) object occurring in `init` the most
/// specific type its argument positions allow.
fn infer_objects(
    model: &DomainModel,
    objects: &mut BTreeMap<String, Constant>,
    init: &[Literal],
    source: &SExpr,
) -> Vec<Diagnostic> {
    let mut uses: BTreeMap<String, (Name, Vec<TypeExpr>)> = BTreeMap::new();
    for lit in init {
        let Some(sig) = model.predicates.get(lit.atom.predicate.as_str()) else {
            continue;
        };
        if sig.arity() != lit.atom.args.len() {
            continue;
        }
        for (arg, ty) in lit.atom.args.iter().zip(sig.param_types()) {
            let Term::Name(n) = arg else { continue };
            if model.constants.contains_key(n.as_str())
                || objects.get(n.as_str()).is_some_and(|o| o.explicit)
            {
                continue;
            }
            uses.entry(n.canonical.clone())
                .or_insert_with(|| (n.clone(), Vec::new()))
                .1
                .push(ty.clone());
        }
    }
    let h = &model.types;
    let mut diags = Vec::new();
    for (key, (first, tys)) in uses {
        let mut candidates: Vec<TypeExpr> = Vec::new();
        for t in &tys {
            candidates.push(t.clone());
            if let TypeExpr::Either(ms) = t {
                candidates.extend(ms.iter().cloned());
            }
        }
        let valid: Vec<&TypeExpr> = candidates
            .iter()
            .filter(|c| tys.iter().all(|t| h.subtype_of(c, t)))
            .collect();
        let mut best: Vec<&TypeExpr> = valid
            .iter()
            .copied()
            .filter(|c| valid.iter().all(|v| h.subtype_of(c, v)))
            .collect();
        best.dedup();
        let ty = match best.as_slice() {
            [t, ..] if best.iter().all(|b| b == t) => (*t).clone(),
            _ => {
                diags.push(flag(source, DiagCode::AmbiguousObjectType, first.span));
                TypeExpr::object()
            }
        };
        objects.insert(
            key,
            Constant {
                name: first,
                ty,
                explicit: true,
            },
        );
    }
    diags
}

fn check_init(ck: &mut Checker, reqs: RequirementSet, init: &[Literal]) {
    for lit in init {
        let a = &lit.atom;
        if a.predicate.as_str() == CURRENT_VALUE && !ck.model.predicates.contains_key(CURRENT_VALUE) {
            if !reqs.contains(Requirement::Fluents) {
                ck.flag_detail(DiagCode::RequirementMissing, a.span, Requirement::Fluents.keyword());
            }
            if a.args.len() != 2 || !lit.positive {
                ck.flag(DiagCode::WrongArgumentCount, a.span);
            }
            continue;
        }
        ck.asserted_atom(a);
    }
}

fn placeholder_domain(name: &Name) -> DomainModel {
    DomainModel::empty(name.clone())
}

/// Builds a named initial situation.
pub fn build_situation(
    def: &SituationDef,
    source: &SExpr,
    demands: &[Demand],
    registry: &Registry,
) -> (SituationModel, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let fallback;
    let model = match registry.domain(def.domain.as_str()) {
        Some(m) => m,
        None => {
            diags.push(flag(source, DiagCode::UnknownDomain, def.domain.span));
            fallback = placeholder_domain(&def.domain);
            &fallback
        }
    };
    diags.extend(check_demands(model.requirements, demands, source));
    let mut objects = BTreeMap::new();
    let mut ck = Checker::new(model, source);
    declare_objects(model, def.objects.as_ref(), &mut objects, &mut ck);
    diags.extend(ck.diags);
    diags.extend(infer_objects(model, &mut objects, &def.init, source));
    let mut ck = Checker::new(model, source);
    ck.objects = Some(&objects);
    check_init(&mut ck, model.requirements, &def.init);
    diags.extend(ck.diags);
    let sit = SituationModel {
        name: def.name.clone(),
        domain: model.name.canonical.clone(),
        initial: def.init.clone(),
        objects,
    };
    (sit, diags)
}

/// Builds a problem, resolving its domain and named situation.
pub fn build_problem(
    def: &ProblemDef,
    source: &SExpr,
    demands: &[Demand],
    registry: &Registry,
) -> (ProblemModel, Vec<Diagnostic>) {
    let def = match Definition::Problem(def.clone()).strip_advice() {
        Definition::Problem(p) => p,
        _ => unreachable!(),
    };
    let mut diags = Vec::new();
    let fallback;
    let model = match registry.domain(def.domain.as_str()) {
        Some(m) => m,
        None => {
            diags.push(flag(source, DiagCode::UnknownDomain, def.domain.span));
            fallback = placeholder_domain(&def.domain);
            &fallback
        }
    };
    let reqs = model
        .declared
        .union(def.requirements.unwrap_or_default())
        .closure();
    diags.extend(check_demands(reqs, demands, source));

    let mut objects = BTreeMap::new();
    let mut initial = Vec::new();
    if let Some(s) = &def.situation {
        match registry.situation(model, s.as_str()) {
            Some((objs, lits)) => {
                objects.extend(objs.clone());
                initial.extend(lits.iter().cloned());
            }
            None => diags.push(flag(source, DiagCode::UnknownSituation, s.span)),
        }
    } else if def.init.is_none() {
        diags.push(flag(source, DiagCode::ProblemInit, def.name.span));
    }
    if def.goals.is_empty() && def.expansions.is_empty() {
        diags.push(flag(source, DiagCode::NoGoal, def.name.span));
    }
    let own_init = def.init.clone().unwrap_or_default();
    let mut ck = Checker::new(model, source);
    declare_objects(model, def.objects.as_ref(), &mut objects, &mut ck);
    diags.extend(ck.diags);
    diags.extend(infer_objects(model, &mut objects, &own_init, source));

    let mut ck = Checker::new(model, source);
    ck.objects = Some(&objects);
    check_init(&mut ck, reqs, &own_init);
    for g in &def.goals {
        ck.gd(g);
    }
    for s in &def.expansions {
        ck.spec(s);
    }
    diags.extend(ck.diags);
    initial.extend(own_init);
    let problem = ProblemModel {
        name: def.name.clone(),
        domain: model.name.canonical.clone(),
        requirements: reqs,
        situation: def.situation.as_ref().map(|s| s.canonical.clone()),
        objects,
        initial,
        goals: def.goals.clone(),
        expansions: def.expansions.clone(),
        length: def.length.clone(),
    };
    (problem, diags)
}
