//! A straight-line checker for realizations: given the choices recorded in
//! a realization, re-derives every union from the rules and compares.

use super::alternatives::alternatives;
use super::interval::{series_constraint_check, IntervalUnion};
use super::search::{open, resolve_label, Labels, Node};
use super::Anchored;
use crate::state::eval::{scope_of, VarTypes};
use crate::state::{Evaluator, Subst};
use crate::syntax::*;
use crate::validator::{bind_parameters, effect_delta};
use std::collections::BTreeSet;

type V<T> = Result<T, String>;

pub struct Verifier<'a> {
    anchored: Anchored<'a>,
    evals: Vec<Evaluator<'a>>,
    /// Announced `in-context` effects that the interval does not bring about.
    pub warnings: Vec<String>,
}

fn expect(cond: bool, what: impl FnOnce() -> String) -> V<()> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

impl<'a> Verifier<'a> {
    pub fn new(anchored: Anchored<'a>) -> V<Verifier<'a>> {
        let evals = anchored
            .states
            .iter()
            .map(|s| Evaluator::new(anchored.world, s))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        Ok(Verifier {
            anchored,
            evals,
            warnings: Vec::new(),
        })
    }

    /// Checks that `node` is a realization of `spec` under `sigma` that
    /// satisfies it.
    pub fn verify(&mut self, spec: &ActionSpec, sigma: &Subst, scope: &VarTypes, node: &Node) -> V<()> {
        let mut labels = Labels::new();
        collect_labels(spec, node, &mut labels)?;
        self.check(spec, sigma, scope, node, &labels)
    }

    /// Checks a realization of a ground nonprimitive action.
    pub fn verify_action(&mut self, node: &Node) -> V<()> {
        let g = node.term.as_ref().ok_or("realization has no action term")?;
        self.expanded(g, node)
    }

    fn holds(&self, at: usize, gd: &Gd, sigma: &Subst, scope: &VarTypes) -> V<bool> {
        self.evals[at].holds(gd, sigma, scope).map_err(|e| e.to_string())
    }

    fn conditions(&mut self, c: &ContextConditions, u: &IntervalUnion, sigma: &Subst, scope: &VarTypes) -> V<()> {
        let Some((lo, hi)) = u.hull() else {
            return Ok(());
        };
        if let Some(p) = &c.precondition {
            expect(self.holds(lo, p, sigma, scope)?, || format!("in-context precondition false in S_{lo}"))?;
        }
        if let Some(m) = &c.maintain {
            for s in lo..=hi {
                expect(self.holds(s, m, sigma, scope)?, || format!("maintained condition false in S_{s}"))?;
            }
        }
        if let Some(e) = &c.effect {
            let delta = effect_delta(&self.evals[lo], e, sigma, scope).map_err(|e| e.to_string())?;
            let end = &self.evals[hi];
            let missing = delta
                .adds
                .iter()
                .filter(|a| !end.holds_atom(a))
                .chain(delta.dels.iter().filter(|a| end.holds_atom(a)));
            for a in missing {
                self.warnings
                    .push(format!("announced effect on {a} does not hold in S_{hi}"));
            }
        }
        Ok(())
    }

    fn check(&mut self, spec: &ActionSpec, sigma: &Subst, scope: &VarTypes, node: &Node, labels: &Labels) -> V<()> {
        let here = || format!("{} at {}", node.kind, node.at);
        expect(node.sigma == *sigma, || format!("{}: substitution differs", here()))?;
        let k = self.anchored.steps.len();
        let got = &node.intervals;
        let union_of = |nodes: &[std::rc::Rc<Node>]| {
            nodes
                .iter()
                .fold(IntervalUnion::empty(), |u, n| u.union(&n.intervals))
        };
        let one_child = || -> V<&Node> {
            match node.children.as_slice() {
                [c] => Ok(c),
                _ => Err(format!("{}: expected one child", here())),
            }
        };
        match &spec.kind {
            SpecKind::NoOp => {
                let ok = matches!(got.intervals(), [(a, b)] if a == b && *b <= k);
                expect(ok, || format!("{}: no-op must be a single point", here()))
            }
            SpecKind::Action(t) => {
                let args = t
                    .args
                    .iter()
                    .map(|a| self.anchored.world.ground_term(a, sigma))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| e.to_string())?;
                let g = crate::validator::GroundAction::new(t.functor.as_str(), args);
                let recorded = node.term.as_ref().ok_or_else(|| format!("{}: no term", here()))?;
                expect(recorded.same_term(&g), || format!("{}: term {recorded} is not {g}", here()))?;
                self.expanded(&g, node)
            }
            SpecKind::Series(cs) | SpecKind::Parallel(cs) => {
                expect(node.children.len() == cs.len(), || format!("{}: child count", here()))?;
                for (c, n) in cs.iter().zip(&node.children) {
                    self.check(c, sigma, scope, n, labels)?;
                }
                if matches!(spec.kind, SpecKind::Series(_)) {
                    for i in 0..cs.len() {
                        for j in i + 1..cs.len() {
                            let (a, b) = (&node.children[i].intervals, &node.children[j].intervals);
                            let ordered = a.intervals().iter().all(|&(_, x)| {
                                b.intervals().iter().all(|&(y, _)| x <= y)
                            });
                            expect(ordered, || format!("{}: children {} and {} out of order", here(), i + 1, j + 1))?;
                        }
                    }
                }
                expect(*got == union_of(&node.children), || format!("{}: union mismatch", here()))
            }
            SpecKind::InContext { body, conditions } => {
                let c = one_child()?;
                self.check(body, sigma, scope, c, labels)?;
                expect(*got == c.intervals, || format!("{}: union mismatch", here()))?;
                self.conditions(conditions, got, sigma, scope)
            }
            SpecKind::Choice(cs) => {
                let i = node.choice.ok_or_else(|| format!("{}: no branch recorded", here()))?;
                let branch = cs.get(i).ok_or_else(|| format!("{}: no branch {i}", here()))?;
                let c = one_child()?;
                self.check(branch, sigma, scope, c, labels)?;
                expect(*got == c.intervals, || format!("{}: union mismatch", here()))
            }
            SpecKind::Forsome { vars, body } => {
                let c = one_child()?;
                let (_, inner_scope, names) = open(vars, sigma, scope);
                let extends = sigma
                    .iter()
                    .all(|(k, v)| names.contains(k) || c.sigma.get(k) == Some(v));
                let binds = names.iter().all(|n| c.sigma.contains_key(n))
                    && c.sigma.keys().all(|k| names.contains(k) || sigma.contains_key(k));
                expect(extends && binds, || format!("{}: not an extension by the forsome variables", here()))?;
                for (v, t) in vars.declared() {
                    if let Some(t) = t {
                        let ok = self.anchored.world.has_type(&c.sigma[v.as_str()], t);
                        expect(ok, || format!("{}: {v} has the wrong type", here()))?;
                    }
                }
                self.check(body, &c.sigma, &inner_scope, c, labels)?;
                expect(*got == c.intervals, || format!("{}: union mismatch", here()))
            }
            SpecKind::Foreach { vars, condition, body } => {
                let anchor = node.choice.ok_or_else(|| format!("{}: no anchor", here()))?;
                expect(anchor <= k, || format!("{}: anchor out of range", here()))?;
                let (inner, inner_scope, names) = open(vars, sigma, scope);
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                let ev = &self.evals[anchor];
                let mut want = BTreeSet::new();
                for s in ev.ground_vars(&names, &inner, &inner_scope).map_err(|e| e.to_string())? {
                    if ev.holds(condition, &s, &inner_scope).map_err(|e| e.to_string())? {
                        want.insert(s);
                    }
                }
                let have: BTreeSet<Subst> = node.children.iter().map(|c| c.sigma.clone()).collect();
                expect(have == want && have.len() == node.children.len(), || {
                    format!("{}: instances differ from those true in S_{anchor}", here())
                })?;
                for c in &node.children {
                    self.check(body, &c.sigma, &inner_scope, c, labels)?;
                }
                expect(*got == union_of(&node.children), || format!("{}: union mismatch", here()))?;
                expect(got.first_point().is_none_or(|m| m == anchor), || format!("{}: does not begin at its anchor", here()))
            }
            SpecKind::Tag { body, before, after } => {
                let c = one_child()?;
                self.check(body, sigma, scope, c, labels)?;
                expect(*got == c.intervals, || format!("{}: union mismatch", here()))?;
                if let Some((lo, hi)) = got.hull() {
                    for l in before.iter().chain(after) {
                        let want = match l.qualifier {
                            LabelQualifier::Begin => IntervalUnion::point(lo),
                            LabelQualifier::End => IntervalUnion::point(hi),
                            LabelQualifier::Whole => IntervalUnion::interval(lo, hi),
                        };
                        let have = labels.get(&(l.label.canonical.clone(), sigma.clone()));
                        expect(have == Some(&want), || format!("{}: label {} inconsistent", here(), l.label))?;
                    }
                }
                Ok(())
            }
            SpecKind::Constrained { specs, constraints } => {
                expect(node.children.len() == specs.len() + constraints.len(), || {
                    format!("{}: child count", here())
                })?;
                let (sn, cn) = node.children.split_at(specs.len());
                for (s, n) in specs.iter().zip(sn) {
                    self.check(s, sigma, scope, n, labels)?;
                }
                let e0 = union_of(sn);
                expect(*got == e0, || format!("{}: union mismatch", here()))?;
                // constraints see only the labels tagged inside the constrained specs
                let mut local = Labels::new();
                for (s, n) in specs.iter().zip(sn) {
                    collect_labels(s, n, &mut local)?;
                }
                for (c, n) in constraints.iter().zip(cn) {
                    let u = self.constraint(c, sigma, scope, n, &local)?;
                    expect(u.is_subset_of(&e0), || format!("{}: constraint outside the constrained spec", here()))?;
                }
                Ok(())
            }
        }
    }

    fn constraint(&mut self, c: &Constraint, sigma: &Subst, scope: &VarTypes, node: &Node, labels: &Labels) -> V<IntervalUnion> {
        let here = || format!("constraint {} at {}", node.kind, node.at);
        let u = match &c.kind {
            ConstraintKind::Label(l) => resolve_label(l, labels, sigma),
            ConstraintKind::Series(cs) | ConstraintKind::Parallel(cs) => {
                expect(node.children.len() == cs.len(), || format!("{}: child count", here()))?;
                let mut parts = Vec::new();
                for (c, n) in cs.iter().zip(&node.children) {
                    parts.push(self.constraint(c, sigma, scope, n, labels)?);
                }
                if matches!(c.kind, ConstraintKind::Series(_)) {
                    expect(series_constraint_check(&parts), || format!("{}: labels out of order", here()))?;
                }
                parts.iter().fold(IntervalUnion::empty(), |a, b| a.union(b))
            }
            ConstraintKind::InContext { body, conditions } => {
                let [n] = node.children.as_slice() else {
                    return Err(format!("{}: expected one child", here()));
                };
                let u = self.constraint(body, sigma, scope, n, labels)?;
                self.conditions(conditions, &u, sigma, scope)?;
                u
            }
        };
        expect(u == node.intervals, || format!("{}: union mismatch", here()))?;
        Ok(u)
    }

    /// Rules for an action occurrence: a matching step when primitive, else
    /// a realization of one of its expansions in a fresh label scope.
    fn expanded(&mut self, g: &crate::validator::GroundAction, node: &Node) -> V<()> {
        let k = self.anchored.steps.len();
        let schema = self
            .anchored
            .world
            .model
            .actions
            .get(&g.functor)
            .ok_or_else(|| format!("undeclared action {}", g.functor))?;
        if schema.is_primitive() {
            let i = node.step.ok_or_else(|| format!("{g}: no step recorded"))?;
            expect((1..=k).contains(&i) && self.anchored.steps[i - 1].same_term(g), || {
                format!("{g} is not step {i}")
            })?;
            return expect(node.intervals == IntervalUnion::interval(i - 1, i), || {
                format!("{g}: interval must be [{},{i}]", i - 1)
            });
        }
        let alts = alternatives(schema);
        let j = node.choice.ok_or_else(|| format!("{g}: no expansion recorded"))?;
        let alt = alts.get(j).ok_or_else(|| format!("{g}: no expansion {j}"))?;
        let [body] = node.children.as_slice() else {
            return Err(format!("{g}: expected one expansion"));
        };
        let sigma = bind_parameters(self.anchored.world, &alt.params, g).map_err(|e| e.to_string())?;
        let scope = scope_of(&alt.params);
        self.verify(&alt.spec, &sigma, &scope, body)?;
        expect(node.intervals == body.intervals, || format!("{g}: union mismatch"))
    }
}

/// Gathers label bindings from the tags of one realization scope, failing
/// if two tags bind the same label differently.
fn collect_labels(spec: &ActionSpec, node: &Node, labels: &mut Labels) -> V<()> {
    let children: Vec<&ActionSpec> = match &spec.kind {
        SpecKind::NoOp | SpecKind::Action(_) => return Ok(()),
        SpecKind::Series(cs) | SpecKind::Parallel(cs) => cs.iter().collect(),
        SpecKind::Constrained { specs, .. } => specs.iter().collect(),
        SpecKind::InContext { body, .. } | SpecKind::Forsome { body, .. } => vec![body],
        SpecKind::Foreach { body, .. } => vec![body; node.children.len()],
        SpecKind::Choice(cs) => match node.choice.and_then(|i| cs.get(i)) {
            Some(c) => vec![c],
            None => return Ok(()),
        },
        SpecKind::Tag { before, body, after } => {
            if let Some((lo, hi)) = node.intervals.hull() {
                for l in before.iter().chain(after) {
                    let v = match l.qualifier {
                        LabelQualifier::Begin => IntervalUnion::point(lo),
                        LabelQualifier::End => IntervalUnion::point(hi),
                        LabelQualifier::Whole => IntervalUnion::interval(lo, hi),
                    };
                    let key = (l.label.canonical.clone(), node.sigma.clone());
                    if let Some(old) = labels.insert(key, v.clone()) {
                        if old != v {
                            return Err(format!("label {} bound twice", l.label));
                        }
                    }
                }
            }
            vec![body]
        }
    };
    for (c, n) in children.into_iter().zip(&node.children) {
        collect_labels(c, n, labels)?;
    }
    Ok(())
}
