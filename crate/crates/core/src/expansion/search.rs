use super::alternatives::{alternatives, Alternative};
use super::interval::IntervalUnion;
use super::{Anchored, ExpansionError};
use crate::state::eval::{scope_of, VarTypes};
use crate::state::{Evaluator, Subst};
use crate::syntax::*;
use crate::validator::{bind_parameters, GroundAction};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

/// Default limit on search nodes.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// One entry of a realization: the union assigned to an occurrence under a
/// substitution, with the choices that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct Node {
    pub kind: &'static str,
    /// `line:col` of the occurrence.
    pub at: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub sigma: Subst,
    pub intervals: IntervalUnion,
    /// The step realizing a primitive action term (1-based).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    /// The ground term of an action occurrence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term: Option<GroundAction>,
    /// Choice branch, expansion alternative, or foreach anchor point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub choice: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Rc<Node>>,
}

fn at(span: SourceSpan) -> String {
    format!("{}:{}", span.line, span.col)
}

impl Node {
    fn new(kind: &'static str, span: SourceSpan, sigma: &Subst, intervals: IntervalUnion) -> Node {
        Node {
            kind,
            at: at(span),
            sigma: sigma.clone(),
            intervals,
            step: None,
            term: None,
            choice: None,
            children: Vec::new(),
        }
    }

    fn with_children(mut self, children: Vec<Rc<Node>>) -> Node {
        self.children = children;
        self
    }

    fn with_choice(mut self, c: usize) -> Node {
        self.choice = Some(c);
        self
    }
}

pub(crate) type Labels = BTreeMap<(String, Subst), IntervalUnion>;

/// A partial result: everything a parent needs, plus one witness.
#[derive(Debug, Clone)]
struct Outcome {
    union: IntervalUnion,
    labels: Labels,
    cover: BTreeSet<usize>,
    nodes: Vec<Rc<Node>>,
}

impl Outcome {
    fn empty() -> Outcome {
        Outcome {
            union: IntervalUnion::empty(),
            labels: Labels::new(),
            cover: BTreeSet::new(),
            nodes: Vec::new(),
        }
    }

    fn single(union: IntervalUnion, labels: Labels, cover: BTreeSet<usize>, node: Node) -> Outcome {
        Outcome {
            union,
            labels,
            cover,
            nodes: vec![Rc::new(node)],
        }
    }

    fn node(&self) -> Rc<Node> {
        self.nodes[0].clone()
    }

    /// Combines with a sibling's outcome; `None` when they bind a label
    /// differently.
    fn merge(&self, other: &Outcome) -> Option<Outcome> {
        let mut labels = self.labels.clone();
        for (k, v) in &other.labels {
            match labels.get(k) {
                Some(old) if old != v => return None,
                _ => {
                    labels.insert(k.clone(), v.clone());
                }
            }
        }
        let mut nodes = self.nodes.clone();
        nodes.extend(other.nodes.iter().cloned());
        Some(Outcome {
            union: self.union.union(&other.union),
            labels,
            cover: self.cover.union(&other.cover).copied().collect(),
            nodes,
        })
    }

    fn key(&self) -> (&IntervalUnion, &Labels, &BTreeSet<usize>) {
        (&self.union, &self.labels, &self.cover)
    }
}

fn dedup(mut v: Vec<Outcome>) -> Vec<Outcome> {
    v.sort_by(|a, b| a.key().cmp(&b.key()));
    v.dedup_by(|a, b| a.key() == b.key());
    v
}

type Outcomes = Rc<Vec<Outcome>>;
type R<T> = Result<T, ExpansionError>;

/// The result of a search: one satisfying realization, if any, and every
/// step some satisfying realization assigns to a primitive occurrence.
#[derive(Debug, Clone, Default)]
pub struct Satisfaction {
    pub realization: Option<Rc<Node>>,
    pub covered: BTreeSet<usize>,
}

impl Satisfaction {
    pub fn satisfied(&self) -> bool {
        self.realization.is_some()
    }
}

/// Backtracking search for realizations, memoized by occurrence and
/// substitution.
pub struct Searcher<'a> {
    anchored: Anchored<'a>,
    evals: Vec<Evaluator<'a>>,
    budget: u64,
    used: u64,
    memo: BTreeMap<(usize, Subst), Outcomes>,
    terms: BTreeMap<GroundAction, Outcomes>,
    previous: BTreeMap<GroundAction, Outcomes>,
    in_progress: BTreeSet<GroundAction>,
    recursed: bool,
    alternatives: BTreeMap<String, Rc<Vec<Alternative>>>,
}

impl<'a> Searcher<'a> {
    pub fn new(anchored: Anchored<'a>, budget: u64) -> R<Searcher<'a>> {
        assert!(budget > 0, "search budget must be positive");
        let evals = anchored
            .states
            .iter()
            .map(|s| Evaluator::new(anchored.world, s))
            .collect::<Result<_, _>>()?;
        Ok(Searcher {
            anchored,
            evals,
            budget,
            used: 0,
            memo: BTreeMap::new(),
            terms: BTreeMap::new(),
            previous: BTreeMap::new(),
            in_progress: BTreeSet::new(),
            recursed: false,
            alternatives: BTreeMap::new(),
        })
    }

    /// Search nodes used so far.
    pub fn used(&self) -> u64 {
        self.used
    }

    fn k(&self) -> usize {
        self.anchored.steps.len()
    }

    fn tick(&mut self) -> R<()> {
        self.used += 1;
        if self.used > self.budget {
            return Err(ExpansionError::Budget(self.budget));
        }
        Ok(())
    }

    /// Does the anchored sequence satisfy `spec` (whose free variables are
    /// bound by `sigma` and declared in `scope`)?
    pub fn satisfies(&mut self, spec: &ActionSpec, sigma: &Subst, scope: &VarTypes) -> R<Satisfaction> {
        self.fixpoint(|s| s.sat(spec, sigma, scope))
    }

    /// Does the anchored sequence carry out the ground action `action`?
    pub fn satisfies_action(&mut self, action: &GroundAction) -> R<Satisfaction> {
        let g = GroundAction {
            span: None,
            ..action.clone()
        };
        self.fixpoint(|s| s.term(&g))
    }

    /// Recursive expansions are evaluated to a fixpoint: a term met again
    /// while it is being expanded sees the previous round's outcomes.
    fn fixpoint(&mut self, mut f: impl FnMut(&mut Self) -> R<Outcomes>) -> R<Satisfaction> {
        self.previous.clear();
        loop {
            self.memo.clear();
            self.terms.clear();
            self.recursed = false;
            let outs = f(self)?;
            let stable = !self.recursed
                || (self.terms.len() == self.previous.len()
                    && self.terms.iter().all(|(k, v)| {
                        self.previous
                            .get(k)
                            .is_some_and(|p| p.len() == v.len() && p.iter().zip(v.iter()).all(|(a, b)| a.key() == b.key()))
                    }));
            if stable {
                return Ok(Satisfaction {
                    realization: outs.first().map(Outcome::node),
                    covered: outs.iter().flat_map(|o| o.cover.iter().copied()).collect(),
                });
            }
            self.previous = std::mem::take(&mut self.terms);
        }
    }

    fn sat(&mut self, spec: &ActionSpec, sigma: &Subst, scope: &VarTypes) -> R<Outcomes> {
        let key = (spec as *const ActionSpec as usize, sigma.clone());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        self.tick()?;
        let out = Rc::new(dedup(self.sat_uncached(spec, sigma, scope)?));
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn sat_uncached(&mut self, spec: &ActionSpec, sigma: &Subst, scope: &VarTypes) -> R<Vec<Outcome>> {
        let span = spec.span;
        let wrap = |kind: &'static str, o: &Outcome, choice: Option<usize>| {
            let mut n = Node::new(kind, span, sigma, o.union.clone()).with_children(vec![o.node()]);
            n.choice = choice;
            Outcome::single(o.union.clone(), o.labels.clone(), o.cover.clone(), n)
        };
        Ok(match &spec.kind {
            SpecKind::NoOp => (0..=self.k())
                .map(|i| {
                    let u = IntervalUnion::point(i);
                    Outcome::single(u.clone(), Labels::new(), BTreeSet::new(), Node::new("no-op", span, sigma, u))
                })
                .collect(),
            SpecKind::Action(t) => {
                let g = self.ground(t, sigma)?;
                self.term(&g)?
                    .iter()
                    .map(|o| {
                        let mut n = (*o.node()).clone();
                        n.at = at(span);
                        n.sigma = sigma.clone();
                        Outcome::single(o.union.clone(), Labels::new(), o.cover.clone(), n)
                    })
                    .collect()
            }
            SpecKind::Series(children) => self
                .combine(children, sigma, scope, true)?
                .into_iter()
                .map(|o| {
                    let n = Node::new("series", span, sigma, o.union.clone()).with_children(o.nodes.clone());
                    Outcome::single(o.union, o.labels, o.cover, n)
                })
                .collect(),
            SpecKind::Parallel(children) => self
                .combine(children, sigma, scope, false)?
                .into_iter()
                .map(|o| {
                    let n = Node::new("parallel", span, sigma, o.union.clone()).with_children(o.nodes.clone());
                    Outcome::single(o.union, o.labels, o.cover, n)
                })
                .collect(),
            SpecKind::Choice(children) => {
                let mut out = Vec::new();
                for (i, c) in children.iter().enumerate() {
                    for o in self.sat(c, sigma, scope)?.iter() {
                        out.push(wrap("choice", o, Some(i)));
                    }
                }
                out
            }
            SpecKind::InContext { body, conditions } => {
                let mut out = Vec::new();
                for o in self.sat(body, sigma, scope)?.iter() {
                    if self.conditions_hold(conditions, &o.union, sigma, scope)? {
                        out.push(wrap("in-context", o, None));
                    }
                }
                out
            }
            SpecKind::Forsome { vars, body } => {
                let (inner, inner_scope, names) = open(vars, sigma, scope);
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                let mut out = Vec::new();
                for s in self.evals[0].ground_vars(&names, &inner, &inner_scope)? {
                    for o in self.sat(body, &s, &inner_scope)?.iter() {
                        out.push(wrap("forsome", o, None));
                    }
                }
                out
            }
            SpecKind::Foreach { vars, condition, body } => self.foreach(spec, vars, condition, body, sigma, scope)?,
            SpecKind::Tag { before, body, after } => {
                let mut out = Vec::new();
                'outer: for o in self.sat(body, sigma, scope)?.iter() {
                    let mut o = wrap("tag", o, None);
                    if let Some((lo, hi)) = o.union.hull() {
                        for l in before.iter().chain(after) {
                            let v = match l.qualifier {
                                LabelQualifier::Begin => IntervalUnion::point(lo),
                                LabelQualifier::End => IntervalUnion::point(hi),
                                LabelQualifier::Whole => IntervalUnion::interval(lo, hi),
                            };
                            let key = (l.label.canonical.clone(), sigma.clone());
                            match o.labels.get(&key) {
                                Some(old) if *old != v => continue 'outer,
                                _ => {
                                    o.labels.insert(key, v);
                                }
                            }
                        }
                    }
                    out.push(o);
                }
                out
            }
            SpecKind::Constrained { specs, constraints } => {
                let mut out = Vec::new();
                'outer: for o in self.combine(specs, sigma, scope, false)? {
                    let mut nodes = o.nodes.clone();
                    for c in constraints {
                        match self.constraint(c, &o.labels, sigma, scope)? {
                            Some((u, n)) if u.is_subset_of(&o.union) => nodes.push(n),
                            _ => continue 'outer,
                        }
                    }
                    let n = Node::new("constrained", span, sigma, o.union.clone()).with_children(nodes);
                    out.push(Outcome::single(o.union, o.labels, o.cover, n));
                }
                out
            }
        })
    }

    fn ground(&self, t: &ActionTerm, sigma: &Subst) -> R<GroundAction> {
        let args = t
            .args
            .iter()
            .map(|a| self.anchored.world.ground_term(a, sigma))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroundAction::new(t.functor.as_str(), args))
    }

    /// Every child satisfied; with `ordered`, each child's points precede
    /// all later children's.
    fn combine(&mut self, children: &[ActionSpec], sigma: &Subst, scope: &VarTypes, ordered: bool) -> R<Vec<Outcome>> {
        let mut acc = vec![Outcome::empty()];
        for c in children {
            let outs = self.sat(c, sigma, scope)?;
            let mut next = Vec::new();
            for a in &acc {
                for b in outs.iter() {
                    self.tick()?;
                    if ordered && !a.union.precedes(&b.union) {
                        continue;
                    }
                    next.extend(a.merge(b));
                }
            }
            acc = dedup(next);
        }
        Ok(acc)
    }

    fn conditions_hold(&self, c: &ContextConditions, union: &IntervalUnion, sigma: &Subst, scope: &VarTypes) -> R<bool> {
        let Some((lo, hi)) = union.hull() else {
            return Ok(true);
        };
        if let Some(p) = &c.precondition {
            if !self.evals[lo].holds(p, sigma, scope)? {
                return Ok(false);
            }
        }
        if let Some(m) = &c.maintain {
            for s in lo..=hi {
                if !self.evals[s].holds(m, sigma, scope)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn foreach(
        &mut self,
        spec: &ActionSpec,
        vars: &TypedList<Name>,
        condition: &Gd,
        body: &ActionSpec,
        sigma: &Subst,
        scope: &VarTypes,
    ) -> R<Vec<Outcome>> {
        let (inner, inner_scope, names) = open(vars, sigma, scope);
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut out = Vec::new();
        let mut empty_seen = false;
        for anchor in 0..=self.k() {
            let ev = &self.evals[anchor];
            let mut instances = Vec::new();
            for s in ev.ground_vars(&names, &inner, &inner_scope)? {
                if ev.holds(condition, &s, &inner_scope)? {
                    instances.push(s);
                }
            }
            if instances.is_empty() {
                if !empty_seen {
                    empty_seen = true;
                    let n = Node::new("foreach", spec.span, sigma, IntervalUnion::empty()).with_choice(anchor);
                    out.push(Outcome::single(IntervalUnion::empty(), Labels::new(), BTreeSet::new(), n));
                }
                continue;
            }
            let mut acc = vec![Outcome::empty()];
            for s in &instances {
                let outs = self.sat(body, s, &inner_scope)?;
                let mut next = Vec::new();
                for a in &acc {
                    for b in outs.iter() {
                        self.tick()?;
                        next.extend(a.merge(b));
                    }
                }
                acc = dedup(next);
            }
            for o in acc {
                if o.union.first_point().is_none_or(|m| m == anchor) {
                    let n = Node::new("foreach", spec.span, sigma, o.union.clone())
                        .with_choice(anchor)
                        .with_children(o.nodes.clone());
                    out.push(Outcome::single(o.union, o.labels, o.cover, n));
                }
            }
        }
        Ok(out)
    }

    fn constraint(
        &self,
        c: &Constraint,
        labels: &Labels,
        sigma: &Subst,
        scope: &VarTypes,
    ) -> R<Option<(IntervalUnion, Rc<Node>)>> {
        let node = |kind, u: &IntervalUnion, children| {
            Rc::new(Node::new(kind, c.span, sigma, u.clone()).with_children(children))
        };
        Ok(match &c.kind {
            ConstraintKind::Label(l) => {
                let u = resolve_label(l, labels, sigma);
                Some((u.clone(), node("label", &u, vec![])))
            }
            ConstraintKind::Series(cs) | ConstraintKind::Parallel(cs) => {
                let ordered = matches!(c.kind, ConstraintKind::Series(_));
                let mut u = IntervalUnion::empty();
                let mut children = Vec::new();
                for c in cs {
                    let Some((v, n)) = self.constraint(c, labels, sigma, scope)? else {
                        return Ok(None);
                    };
                    if ordered && !u.precedes(&v) {
                        return Ok(None);
                    }
                    u = u.union(&v);
                    children.push(n);
                }
                let kind = if ordered { "series" } else { "parallel" };
                Some((u.clone(), node(kind, &u, children)))
            }
            ConstraintKind::InContext { body, conditions } => {
                let Some((u, n)) = self.constraint(body, labels, sigma, scope)? else {
                    return Ok(None);
                };
                if !self.conditions_hold(conditions, &u, sigma, scope)? {
                    return Ok(None);
                }
                Some((u.clone(), node("in-context", &u, vec![n])))
            }
        })
    }

    fn alternatives_of(&mut self, functor: &str) -> R<Rc<Vec<Alternative>>> {
        if let Some(a) = self.alternatives.get(functor) {
            return Ok(a.clone());
        }
        let schema = self
            .anchored
            .world
            .model
            .actions
            .get(functor)
            .ok_or_else(|| ExpansionError::UnknownAction(functor.to_string()))?;
        let alts = Rc::new(alternatives(schema));
        self.alternatives.insert(functor.to_string(), alts.clone());
        Ok(alts)
    }

    fn term(&mut self, g: &GroundAction) -> R<Outcomes> {
        let schema = self
            .anchored
            .world
            .model
            .actions
            .get(&g.functor)
            .ok_or_else(|| ExpansionError::UnknownAction(g.functor.clone()))?;
        if schema.is_primitive() {
            let out = self
                .anchored
                .steps
                .iter()
                .enumerate()
                .filter(|(_, q)| q.same_term(g))
                .map(|(i, _)| {
                    let u = IntervalUnion::interval(i, i + 1);
                    let mut n = Node::new("action", SourceSpan::default(), &Subst::new(), u.clone());
                    n.step = Some(i + 1);
                    n.term = Some(g.clone());
                    Outcome::single(u, Labels::new(), BTreeSet::from([i + 1]), n)
                })
                .collect();
            return Ok(Rc::new(out));
        }
        if let Some(v) = self.terms.get(g) {
            return Ok(v.clone());
        }
        if self.in_progress.contains(g) {
            self.recursed = true;
            return Ok(self.previous.get(g).cloned().unwrap_or_default());
        }
        self.tick()?;
        self.in_progress.insert(g.clone());
        let result = self.expand(g);
        self.in_progress.remove(g);
        let out = Rc::new(dedup(result?));
        self.terms.insert(g.clone(), out.clone());
        Ok(out)
    }

    fn expand(&mut self, g: &GroundAction) -> R<Vec<Outcome>> {
        let alts = self.alternatives_of(&g.functor)?;
        let mut out = Vec::new();
        for (j, alt) in alts.iter().enumerate() {
            let sigma = bind_parameters(self.anchored.world, &alt.params, g)?;
            let scope = scope_of(&alt.params);
            for o in self.sat(&alt.spec, &sigma, &scope)?.iter() {
                let mut n = Node::new("action", SourceSpan::default(), &Subst::new(), o.union.clone())
                    .with_choice(j)
                    .with_children(vec![o.node()]);
                n.term = Some(g.clone());
                // labels are local to the expansion's own realization
                out.push(Outcome::single(o.union.clone(), Labels::new(), o.cover.clone(), n));
            }
        }
        Ok(out)
    }
}

/// Enters the scope of quantified `vars`.
pub(crate) fn open(vars: &TypedList<Name>, sigma: &Subst, scope: &VarTypes) -> (Subst, VarTypes, Vec<String>) {
    let mut inner = sigma.clone();
    let mut inner_scope = scope.clone();
    let mut names = Vec::new();
    for (v, t) in vars.declared() {
        inner.remove(v.as_str());
        inner_scope.insert(v.canonical.clone(), t.cloned());
        names.push(v.canonical.clone());
    }
    (inner, inner_scope, names)
}

/// The union a constraint's label term denotes; unrealized labels are empty.
pub(crate) fn resolve_label(l: &LabelTerm, labels: &Labels, sigma: &Subst) -> IntervalUnion {
    let u = labels
        .get(&(l.label.canonical.clone(), sigma.clone()))
        .cloned()
        .unwrap_or_default();
    match (l.qualifier, u.hull()) {
        (LabelQualifier::Begin, Some((lo, _))) => IntervalUnion::point(lo),
        (LabelQualifier::End, Some((_, hi))) => IntervalUnion::point(hi),
        _ => u,
    }
}
