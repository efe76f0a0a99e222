//! Building domain models from parsed definitions, and applying addenda.

use super::check::Checker;
use super::domain::*;
use super::registry::Registry;
use super::requirements::RequirementSet;
use super::stratify::{predicate_occurrences, stratify, Dependency};
use super::types::TypeHierarchy;
use crate::diagnostics::{DiagCode, Diagnostic};
use crate::syntax::*;
use std::collections::{BTreeMap, BTreeSet};

/// Flags every construct whose requirement flag is not in `reqs`.
pub(crate) fn check_demands(
    reqs: RequirementSet,
    demands: &[Demand],
    source: &SExpr,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for d in demands {
        if d.any_of.iter().any(|r| reqs.contains(*r)) {
            continue;
        }
        let at = source.find(&d.span).unwrap_or(source);
        out.push(if d.soft {
            Diagnostic::new(DiagCode::VarsRequirement, at)
        } else {
            Diagnostic::new(DiagCode::RequirementMissing, at).with_detail(d.any_of[0].keyword())
        });
    }
    out
}

/// Builds the model of `def`, resolving `:extends` against `registry`.
pub fn build_domain(
    def: &DomainDef,
    source: &SExpr,
    demands: &[Demand],
    registry: &Registry,
) -> (DomainModel, Vec<Diagnostic>) {
    let def = Definition::Domain(def.clone()).strip_advice();
    let Definition::Domain(def) = def else {
        unreachable!()
    };
    let mut model = DomainModel::empty(def.name.clone());
    let mut diags = Vec::new();
    let flag = |code: DiagCode, span: SourceSpan| {
        let at = source.find(&span).unwrap_or(source);
        Diagnostic::new(code, at)
    };

    for anc in &def.extends {
        match registry.domain(anc.as_str()) {
            Some(m) if anc != &def.name => model.inherit(m),
            _ => diags.push(flag(DiagCode::UnknownDomain, anc.span)),
        }
    }
    if let Some(r) = def.requirements {
        model.declared = model.declared.union(r);
    }
    model.requirements = model.declared.closure();
    diags.extend(check_demands(model.requirements, demands, source));

    // Kinds of every name declared by this definition, for collision checks.
    let mut kinds: BTreeMap<String, &'static str> = BTreeMap::new();
    for (k, kind) in inherited_kinds(&model) {
        kinds.insert(k, kind);
    }
    let mut claim = |name: &Name, kind: &'static str, diags: &mut Vec<Diagnostic>| match kinds
        .get(name.as_str())
    {
        Some(&k) if k != kind => {
            let at = source.find(&name.span).unwrap_or(source);
            diags.push(Diagnostic::new(DiagCode::NameKindCollision, at).with_detail(article(k)));
        }
        _ => {
            kinds.insert(name.canonical.clone(), kind);
        }
    };

    // types: register every atom first so forward references resolve
    if let Some(types) = &def.types {
        let mut seen = BTreeSet::new();
        for t in types.items() {
            if !seen.insert(t.as_str()) {
                diags.push(flag(DiagCode::DuplicateDeclaration, t.span));
            }
            if !TypeHierarchy::is_builtin(t.as_str()) {
                claim(t, "type", &mut diags);
                model.types.declare(t.as_str(), []);
            }
        }
        for (t, parent) in types.iter() {
            let parents: Vec<&Name> = match parent {
                TypeExpr::Atom(p) => vec![p],
                TypeExpr::Either(ms) if ms.iter().all(|m| matches!(m, TypeExpr::Atom(_))) => {
                    ms.iter().flat_map(|m| m.atoms()).collect()
                }
                _ => {
                    diags.push(flag(DiagCode::MalformedType, t.span));
                    continue;
                }
            };
            let unknown: Vec<&&Name> =
                parents.iter().filter(|p| !model.types.contains(p.as_str())).collect();
            if !unknown.is_empty() {
                for p in unknown {
                    diags.push(flag(DiagCode::UnknownType, p.span));
                }
                continue;
            }
            if TypeHierarchy::is_builtin(t.as_str()) {
                continue;
            }
            if !model.types.declare(t.as_str(), parents.iter().map(|p| p.canonical.clone())) {
                diags.push(flag(DiagCode::TypeCycle, t.span));
            }
        }
    }

    let ck_types = |t: &TypeExpr, diags: &mut Vec<Diagnostic>, model: &DomainModel| {
        for a in model.types.unknown_atoms(t) {
            diags.push(flag(DiagCode::UnknownType, a.span));
        }
    };

    if let Some(cs) = &def.constants {
        let mut seen = BTreeSet::new();
        for (c, t) in cs.declared() {
            if !seen.insert(c.as_str()) {
                diags.push(flag(DiagCode::DuplicateDeclaration, c.span));
                continue;
            }
            if let Some(t) = t {
                ck_types(t, &mut diags, &model);
            }
            claim(c, "constant", &mut diags);
            model.constants.insert(
                c.canonical.clone(),
                Constant {
                    name: c.clone(),
                    ty: t.cloned().unwrap_or_else(TypeExpr::object),
                    explicit: t.is_some(),
                },
            );
        }
    }

    if let Some(vs) = &def.domain_vars {
        let mut seen = BTreeSet::new();
        for (v, t) in vs.iter() {
            if !seen.insert(v.name.as_str()) {
                diags.push(flag(DiagCode::DuplicateDeclaration, v.name.span));
                continue;
            }
            ck_types(t, &mut diags, &model);
            claim(&v.name, "domain variable", &mut diags);
            model.domain_vars.insert(
                v.name.canonical.clone(),
                DomainVar {
                    name: v.name.clone(),
                    ty: t.clone(),
                    initial: v.initial.clone(),
                },
            );
        }
    }

    let mut own_preds = BTreeSet::new();
    for p in &def.predicates {
        for (_, t) in p.params.iter() {
            ck_types(t, &mut diags, &model);
        }
        if !own_preds.insert(p.name.as_str()) {
            diags.push(flag(DiagCode::DuplicateDeclaration, p.name.span));
            continue;
        }
        claim(&p.name, "predicate", &mut diags);
        let sig = PredicateSig {
            name: p.name.clone(),
            params: p.params.clone(),
            origin: def.name.canonical.clone(),
            timeless: false,
            derived: false,
        };
        if model.merge_predicate(sig).is_err() {
            diags.push(flag(DiagCode::IncompatibleRedeclaration, p.span));
        }
    }

    let mut own_actions = BTreeSet::new();
    for a in &def.actions {
        if !own_actions.insert(a.name.as_str()) {
            diags.push(flag(DiagCode::DuplicateDeclaration, a.name.span));
            continue;
        }
        claim(&a.name, "action", &mut diags);
        model.actions.insert(a.name.canonical.clone(), ActionSchema::from_def(a, None));
    }

    for t in &def.timeless {
        model.timeless.push(t.clone());
        if let Some(p) = model.predicates.get_mut(t.atom.predicate.as_str()) {
            p.timeless = true;
        }
    }
    for g in &def.safety {
        model.safety.push(Safety {
            gd: g.clone(),
            origin: None,
        });
    }
    for a in &def.axioms {
        model.axioms.push(Axiom {
            vars: a.vars.clone(),
            context: a.context.clone(),
            implies: a.implies.clone(),
            origin: None,
        });
    }
    let method_diags = attach_methods(&mut model, &def.methods, None, source);
    finish(&mut model);
    let mut ck = Checker::new(&model, source);
    for a in &def.actions {
        ck.action(a);
    }
    for a in &def.axioms {
        ck.axiom(a);
    }
    for m in &def.methods {
        ck.method(m);
    }
    for t in &def.timeless {
        ck.atom(&t.atom);
    }
    for g in &def.safety {
        ck.gd(g);
    }
    diags.extend(ck.diags);
    diags.extend(method_diags);
    diags.extend(stratification_diags(&model, &def.axioms, source));
    (model, diags)
}

fn article(kind: &str) -> String {
    let a = if kind.starts_with(['a', 'e', 'i', 'o', 'u']) {
        "an"
    } else {
        "a"
    };
    format!("{a} {kind}")
}

fn inherited_kinds(model: &DomainModel) -> Vec<(String, &'static str)> {
    let mut out = Vec::new();
    out.extend(
        model
            .types
            .atoms()
            .filter(|t| !TypeHierarchy::is_builtin(t))
            .map(|t| (t.to_string(), "type")),
    );
    out.extend(model.constants.keys().map(|k| (k.clone(), "constant")));
    out.extend(model.domain_vars.keys().map(|k| (k.clone(), "domain variable")));
    out.extend(model.predicates.keys().map(|k| (k.clone(), "predicate")));
    out.extend(model.actions.keys().map(|k| (k.clone(), "action")));
    out
}

/// Attaches methods to their actions, flagging duplicates by name.
fn attach_methods(
    model: &mut DomainModel,
    methods: &[MethodDef],
    origin: Origin,
    source: &SExpr,
) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for m in methods {
        let Some(action) = model.actions.get_mut(m.action.as_str()) else {
            continue;
        };
        if action.effect.is_some() {
            continue;
        }
        if let Some(name) = &m.name {
            let own = matches!(action.expansion, Some(Expansion::Spec(_))) && name == &action.name;
            let taken = own || action.methods.iter().any(|x| x.name.as_ref() == Some(name));
            if taken {
                let at = source.find(&name.span).unwrap_or(source);
                diags.push(Diagnostic::new(DiagCode::DuplicateMethodName, at));
                continue;
            }
        }
        action.methods.push(Method::from_def(m, origin.clone()));
    }
    diags
}

/// Recomputes derived flags and strata after the axiom set changed.
fn finish(model: &mut DomainModel) {
    let derived: BTreeSet<String> = model
        .axioms
        .iter()
        .map(|a| a.implies.atom.predicate.canonical.clone())
        .collect();
    for (k, p) in model.predicates.iter_mut() {
        p.derived = derived.contains(k);
    }
    model.strata = stratify(&derived, &dependencies(model, &derived)).unwrap_or_default();
}

fn dependencies(model: &DomainModel, derived: &BTreeSet<String>) -> Vec<Dependency> {
    let mut deps = Vec::new();
    for a in &model.axioms {
        let mut occ = Vec::new();
        predicate_occurrences(&a.context, &mut occ);
        for (p, negative) in occ {
            if derived.contains(&p) {
                deps.push(Dependency {
                    head: a.implies.atom.predicate.canonical.clone(),
                    on: p,
                    negative,
                });
            }
        }
    }
    deps
}

/// One diagnostic if the axioms cannot be stratified, anchored at the first
/// offending axiom among `own`.
fn stratification_diags(model: &DomainModel, own: &[AxiomDef], source: &SExpr) -> Vec<Diagnostic> {
    let derived: BTreeSet<String> = model
        .axioms
        .iter()
        .map(|a| a.implies.atom.predicate.canonical.clone())
        .collect();
    let Err(bad) = stratify(&derived, &dependencies(model, &derived)) else {
        return Vec::new();
    };
    let at = own
        .iter()
        .find(|a| bad.contains(a.implies.atom.predicate.as_str()))
        .map(|a| a.span)
        .and_then(|s| source.find(&s))
        .unwrap_or(source);
    vec![Diagnostic::new(DiagCode::NotStratifiable, at)]
}

/// Applies an addendum: erases whatever it contributed before, then adds its
/// actions, axioms, methods, and safety constraints.
pub fn apply_addendum(
    def: &AddendumDef,
    source: &SExpr,
    demands: &[Demand],
    model: &DomainModel,
) -> (DomainModel, Vec<Diagnostic>) {
    let def = match Definition::Addendum(def.clone()).strip_advice() {
        Definition::Addendum(a) => a,
        _ => unreachable!(),
    };
    let origin: Origin = Some(def.name.canonical.clone());
    let mut model = model.clone();
    model.erase_addendum(def.name.as_str());
    model.addenda.insert(def.name.canonical.clone());
    let mut diags = check_demands(model.requirements, demands, source);
    let flag = |code: DiagCode, span: SourceSpan| {
        Diagnostic::new(code, source.find(&span).unwrap_or(source))
    };

    let kinds: BTreeMap<String, &'static str> = inherited_kinds(&model).into_iter().collect();
    for a in &def.actions {
        match kinds.get(a.name.as_str()) {
            Some(&"action") => {
                diags.push(flag(DiagCode::DuplicateDeclaration, a.name.span));
                continue;
            }
            Some(k) => {
                diags.push(flag(DiagCode::NameKindCollision, a.name.span).with_detail(article(k)));
            }
            None => {}
        }
        model
            .actions
            .insert(a.name.canonical.clone(), ActionSchema::from_def(a, origin.clone()));
    }
    for a in &def.axioms {
        model.axioms.push(Axiom {
            vars: a.vars.clone(),
            context: a.context.clone(),
            implies: a.implies.clone(),
            origin: origin.clone(),
        });
    }
    for g in &def.safety {
        model.safety.push(Safety {
            gd: g.clone(),
            origin: origin.clone(),
        });
    }
    diags.extend(attach_methods(&mut model, &def.methods, origin.clone(), source));
    finish(&mut model);

    let mut ck = Checker::new(&model, source);
    for a in &def.actions {
        ck.action(a);
    }
    for a in &def.axioms {
        ck.axiom(a);
    }
    for m in &def.methods {
        ck.method(m);
    }
    for g in &def.safety {
        ck.gd(g);
    }
    diags.extend(ck.diags);
    // New axioms may make a predicate derived that older effects assert.
    for a in &def.axioms {
        let p = a.implies.atom.predicate.as_str();
        let asserted = model.actions.values().filter(|x| x.origin != origin).any(|x| {
            x.effect
                .as_ref()
                .is_some_and(|e| e.atoms().iter().any(|at| at.predicate.as_str() == p))
        });
        if asserted {
            diags.push(flag(DiagCode::DerivedInEffect, a.implies.span));
        }
    }
    diags.extend(stratification_diags(&model, &def.axioms, source));
    (model, diags)
}
