//! Random action specs over a two-object toggle domain, with a brute-force
//! enumerator of every realization outcome that shares nothing with the
//! library's search.
//!
//! A union of closed integer intervals over `[0, k]` is kept as the set of
//! integer points it contains plus the set of unit cells `(i, i+1)` it
//! covers; that representation is canonical, so no merging is needed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct U {
    pub points: u32,
    pub cells: u32,
}

impl U {
    pub fn span(lo: usize, hi: usize) -> U {
        let mut u = U::default();
        for i in lo..=hi {
            u.points |= 1 << i;
        }
        for i in lo..hi {
            u.cells |= 1 << i;
        }
        u
    }
    fn or(self, o: U) -> U {
        U {
            points: self.points | o.points,
            cells: self.cells | o.cells,
        }
    }
    fn empty(self) -> bool {
        self.points == 0
    }
    fn lo(self) -> usize {
        self.points.trailing_zeros() as usize
    }
    fn hi(self) -> usize {
        31 - self.points.leading_zeros() as usize
    }
    fn within(self, o: U) -> bool {
        self.points & !o.points == 0 && self.cells & !o.cells == 0
    }
    /// Every point of `self` is <= every point of `later`.
    fn before(self, later: U) -> bool {
        self.empty() || later.empty() || self.hi() <= later.lo()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arg {
    Obj(usize),
    Var(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qual {
    Whole,
    Begin,
    End,
}

/// `(p arg)` or its negation.
#[derive(Debug, Clone, Copy)]
pub struct Cond {
    pub positive: bool,
    pub arg: Arg,
}

#[derive(Debug, Clone)]
pub enum Spec {
    NoOp,
    /// Primitive `a0` (sets p) or `a1` (clears p).
    Act(usize, Arg),
    /// Nonprimitive `n`: `(choice (a0 ?x) (series (a1 ?x) (a0 ?x)))`.
    Compound(Arg),
    Series(Vec<Spec>),
    Parallel(Vec<Spec>),
    Choice(Vec<Spec>),
    Pre(Box<Spec>, Cond),
    Maintain(Box<Spec>, Cond),
    Tag(Vec<(usize, Qual)>, Box<Spec>, Vec<(usize, Qual)>),
    Forsome(usize, Box<Spec>),
    Foreach(usize, Cond, Box<Spec>),
    Constrained(Vec<Spec>, Vec<Con>),
}

#[derive(Debug, Clone)]
pub enum Con {
    Label(usize, Qual),
    Series(Vec<Con>),
    Parallel(Vec<Con>),
    Pre(Box<Con>, Cond),
}

pub const OBJECTS: [&str; 2] = ["o0", "o1"];

pub const DOMAIN: &str = "(define (domain toggles)
  (:requirements :strips :action-expansions :foreach-expansions :dag-expansions)
  (:constants o0 o1)
  (:predicates (p ?x))
  (:action a0 :parameters (?x) :effect (p ?x))
  (:action a1 :parameters (?x) :effect (not (p ?x)))
  (:action n :parameters (?x)
     :expansion (choice (a0 ?x) (series (a1 ?x) (a0 ?x)))))";

/// A plan over the toggle domain and the `p`-extension of each situation.
#[derive(Debug, Clone)]
pub struct Run {
    pub init: u8,
    pub steps: Vec<(usize, usize)>,
}

impl Run {
    pub fn random(rng: &mut ChaCha8Rng, max_k: usize) -> Run {
        let k = rng.gen_range(0..=max_k);
        Run {
            init: rng.gen_range(0..4),
            steps: (0..k).map(|_| (rng.gen_range(0..2), rng.gen_range(0..2))).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.steps.len()
    }

    pub fn states(&self) -> Vec<u8> {
        let mut s = vec![self.init];
        for &(a, o) in &self.steps {
            let last = *s.last().unwrap();
            s.push(if a == 0 { last | 1 << o } else { last & !(1 << o) });
        }
        s
    }

    pub fn plan_text(&self) -> String {
        let steps: Vec<_> = self.steps.iter().map(|(a, o)| format!("(a{a} {})", OBJECTS[*o])).collect();
        format!("({})", steps.join(" "))
    }

    pub fn problem_text(&self, name: &str, spec: &Spec) -> String {
        let init: Vec<_> = (0..2)
            .filter(|o| self.init & (1 << o) != 0)
            .map(|o| format!("(p {})", OBJECTS[o]))
            .collect();
        format!(
            "(define (problem {name}) (:domain toggles) (:init {}) (:expansion {}))",
            init.join(" "),
            spec_text(spec)
        )
    }
}

fn arg_text(a: Arg) -> String {
    match a {
        Arg::Obj(o) => OBJECTS[o].to_string(),
        Arg::Var(v) => format!("?v{v}"),
    }
}

fn cond_text(c: Cond) -> String {
    if c.positive {
        format!("(p {})", arg_text(c.arg))
    } else {
        format!("(not (p {}))", arg_text(c.arg))
    }
}

fn label_text((l, q): (usize, Qual)) -> String {
    match q {
        Qual::Whole => format!("l{l}"),
        Qual::Begin => format!("(< l{l})"),
        Qual::End => format!("(> l{l})"),
    }
}

fn join(items: impl IntoIterator<Item = String>) -> String {
    items.into_iter().collect::<Vec<_>>().join(" ")
}

pub fn spec_text(s: &Spec) -> String {
    match s {
        Spec::NoOp => "(--)".into(),
        Spec::Act(a, x) => format!("(a{a} {})", arg_text(*x)),
        Spec::Compound(x) => format!("(n {})", arg_text(*x)),
        Spec::Series(c) => format!("(series {})", join(c.iter().map(spec_text))),
        Spec::Parallel(c) => format!("(parallel {})", join(c.iter().map(spec_text))),
        Spec::Choice(c) => format!("(choice {})", join(c.iter().map(spec_text))),
        Spec::Pre(b, c) => format!("(in-context {} :precondition {})", spec_text(b), cond_text(*c)),
        Spec::Maintain(b, c) => format!("(in-context {} :maintain {})", spec_text(b), cond_text(*c)),
        Spec::Tag(before, b, after) => format!(
            "(tag {} {} {})",
            join(before.iter().copied().map(label_text)),
            spec_text(b),
            join(after.iter().copied().map(label_text))
        ),
        Spec::Forsome(v, b) => format!("(forsome (?v{v}) {})", spec_text(b)),
        Spec::Foreach(v, c, b) => format!("(foreach (?v{v}) {} {})", cond_text(*c), spec_text(b)),
        Spec::Constrained(specs, cons) => format!(
            "(constrained ({}) {})",
            join(specs.iter().map(spec_text)),
            join(cons.iter().map(con_text))
        ),
    }
}

pub fn con_text(c: &Con) -> String {
    match c {
        Con::Label(l, q) => label_text((*l, *q)),
        Con::Series(c) => format!("(series {})", join(c.iter().map(con_text))),
        Con::Parallel(c) => format!("(parallel {})", join(c.iter().map(con_text))),
        Con::Pre(b, c) => format!("(in-context {} :precondition {})", con_text(b), cond_text(*c)),
    }
}

// ---- generation

pub struct Gen<'r> {
    pub rng: &'r mut ChaCha8Rng,
    leaves: usize,
    next_var: usize,
}

impl<'r> Gen<'r> {
    pub fn new(rng: &'r mut ChaCha8Rng, leaves: usize) -> Gen<'r> {
        Gen {
            rng,
            leaves,
            next_var: 0,
        }
    }

    fn arg(&mut self, vars: &[usize]) -> Arg {
        if !vars.is_empty() && self.rng.gen_bool(0.6) {
            Arg::Var(*vars.choose(self.rng).unwrap())
        } else {
            Arg::Obj(self.rng.gen_range(0..2))
        }
    }

    fn cond(&mut self, vars: &[usize]) -> Cond {
        Cond {
            positive: self.rng.gen_bool(0.6),
            arg: self.arg(vars),
        }
    }

    fn qual(&mut self) -> Qual {
        *[Qual::Whole, Qual::Begin, Qual::End].choose(self.rng).unwrap()
    }

    fn tag(&mut self) -> (usize, Qual) {
        (self.rng.gen_range(0..4), self.qual())
    }

    fn leaf(&mut self, vars: &[usize]) -> Spec {
        self.leaves = self.leaves.saturating_sub(1);
        match self.rng.gen_range(0..10) {
            0 => Spec::NoOp,
            1 | 2 => Spec::Compound(self.arg(vars)),
            _ => Spec::Act(self.rng.gen_range(0..2), self.arg(vars)),
        }
    }

    fn children(&mut self, vars: &[usize], labels: &mut Vec<usize>) -> Vec<Spec> {
        let n = self.rng.gen_range(1..=3.min(self.leaves.max(1)));
        (0..n).map(|_| self.spec(vars, labels)).collect()
    }

    /// A spec using at most the remaining leaf budget. Labels it tags are
    /// appended to `labels`.
    pub fn spec(&mut self, vars: &[usize], labels: &mut Vec<usize>) -> Spec {
        if self.leaves <= 1 || self.rng.gen_bool(0.3) {
            return self.leaf(vars);
        }
        match self.rng.gen_range(0..11) {
            0 | 1 => Spec::Series(self.children(vars, labels)),
            2 => Spec::Parallel(self.children(vars, labels)),
            3 => Spec::Choice(self.children(vars, labels)),
            4 => {
                let c = self.cond(vars);
                Spec::Pre(Box::new(self.spec(vars, labels)), c)
            }
            5 => {
                let c = self.cond(vars);
                Spec::Maintain(Box::new(self.spec(vars, labels)), c)
            }
            6 => {
                let nb = self.rng.gen_range(0..2);
                let na = self.rng.gen_range(0..2);
                let before: Vec<_> = (0..nb).map(|_| self.tag()).collect();
                let mut after: Vec<_> = (0..na).map(|_| self.tag()).collect();
                if before.is_empty() && after.is_empty() {
                    after.push(self.tag());
                }
                labels.extend(before.iter().chain(&after).map(|t| t.0));
                Spec::Tag(before, Box::new(self.spec(vars, labels)), after)
            }
            7 | 8 => {
                let v = self.next_var;
                self.next_var += 1;
                let mut inner = vars.to_vec();
                inner.push(v);
                if self.rng.gen_bool(0.5) {
                    Spec::Forsome(v, Box::new(self.spec(&inner, labels)))
                } else {
                    let c = Cond {
                        positive: self.rng.gen_bool(0.6),
                        arg: Arg::Var(v),
                    };
                    Spec::Foreach(v, c, Box::new(self.spec(&inner, labels)))
                }
            }
            _ => {
                let mut own = Vec::new();
                let specs = self.children(vars, &mut own);
                let ncons = if own.is_empty() { 0 } else { self.rng.gen_range(1..=2) };
                let cons = (0..ncons).map(|_| self.con(vars, &own, 2)).collect();
                labels.extend(own);
                Spec::Constrained(specs, cons)
            }
        }
    }

    fn con(&mut self, vars: &[usize], labels: &[usize], depth: usize) -> Con {
        let label = |g: &mut Self| Con::Label(*labels.choose(g.rng).unwrap(), g.qual());
        if depth == 0 {
            return label(self);
        }
        match self.rng.gen_range(0..5) {
            0 | 1 => Con::Series((0..self.rng.gen_range(2..=3)).map(|_| self.con(vars, labels, depth - 1)).collect()),
            2 => Con::Parallel((0..2).map(|_| self.con(vars, labels, depth - 1)).collect()),
            3 => {
                let c = self.cond(vars);
                Con::Pre(Box::new(self.con(vars, labels, depth - 1)), c)
            }
            _ => label(self),
        }
    }
}

pub fn leaf_count(s: &Spec) -> usize {
    match s {
        Spec::NoOp | Spec::Act(..) | Spec::Compound(_) => 1,
        Spec::Series(c) | Spec::Parallel(c) | Spec::Choice(c) | Spec::Constrained(c, _) => c.iter().map(leaf_count).sum(),
        Spec::Pre(b, _) | Spec::Maintain(b, _) | Spec::Tag(_, b, _) | Spec::Forsome(_, b) | Spec::Foreach(_, _, b) => {
            leaf_count(b)
        }
    }
}

// ---- the oracle

type Sigma = BTreeMap<usize, usize>;
type Labels = BTreeMap<(usize, Sigma), U>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Outcome {
    pub union: U,
    pub labels: Labels,
    /// 1-based steps realizing primitive leaves.
    pub cover: BTreeSet<usize>,
}

fn merge(a: &Outcome, b: &Outcome) -> Option<Outcome> {
    let mut labels = a.labels.clone();
    for (k, v) in &b.labels {
        if labels.get(k).is_some_and(|old| old != v) {
            return None;
        }
        labels.insert(k.clone(), *v);
    }
    Some(Outcome {
        union: a.union.or(b.union),
        labels,
        cover: a.cover.union(&b.cover).copied().collect(),
    })
}

pub struct Oracle<'r> {
    pub run: &'r Run,
    states: Vec<u8>,
}

impl<'r> Oracle<'r> {
    pub fn new(run: &'r Run) -> Oracle<'r> {
        Oracle {
            run,
            states: run.states(),
        }
    }

    fn obj(a: Arg, sigma: &Sigma) -> usize {
        match a {
            Arg::Obj(o) => o,
            Arg::Var(v) => sigma[&v],
        }
    }

    fn holds(&self, c: Cond, sigma: &Sigma, at: usize) -> bool {
        let o = Self::obj(c.arg, sigma);
        (self.states[at] & (1 << o) != 0) == c.positive
    }

    /// Every product of one outcome per child.
    fn product(&self, children: &[Spec], sigma: &Sigma, ordered: bool) -> BTreeSet<Outcome> {
        let per_child: Vec<BTreeSet<Outcome>> = children.iter().map(|c| self.sat(c, sigma)).collect();
        let mut acc: Vec<Vec<&Outcome>> = vec![vec![]];
        for outs in &per_child {
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    outs.iter().map(move |o| {
                        let mut p = prefix.clone();
                        p.push(o);
                        p
                    })
                })
                .collect();
        }
        let mut result = BTreeSet::new();
        'tuples: for tuple in acc {
            if ordered {
                for i in 0..tuple.len() {
                    for j in i + 1..tuple.len() {
                        if !tuple[i].union.before(tuple[j].union) {
                            continue 'tuples;
                        }
                    }
                }
            }
            let mut o = Outcome {
                union: U::default(),
                labels: Labels::new(),
                cover: BTreeSet::new(),
            };
            for t in tuple {
                match merge(&o, t) {
                    Some(m) => o = m,
                    None => continue 'tuples,
                }
            }
            result.insert(o);
        }
        result
    }

    pub fn sat(&self, s: &Spec, sigma: &Sigma) -> BTreeSet<Outcome> {
        let k = self.run.k();
        let plain = |union: U, cover: BTreeSet<usize>| Outcome {
            union,
            labels: Labels::new(),
            cover,
        };
        match s {
            Spec::NoOp => (0..=k).map(|i| plain(U::span(i, i), BTreeSet::new())).collect(),
            Spec::Act(a, x) => {
                let o = Self::obj(*x, sigma);
                (1..=k)
                    .filter(|&i| self.run.steps[i - 1] == (*a, o))
                    .map(|i| plain(U::span(i - 1, i), BTreeSet::from([i])))
                    .collect()
            }
            Spec::Compound(x) => {
                let inner = Sigma::from([(usize::MAX, Self::obj(*x, sigma))]);
                let v = Arg::Var(usize::MAX);
                let body = Spec::Choice(vec![Spec::Act(0, v), Spec::Series(vec![Spec::Act(1, v), Spec::Act(0, v)])]);
                self.sat(&body, &inner).into_iter().map(|o| plain(o.union, o.cover)).collect()
            }
            Spec::Series(c) => self.product(c, sigma, true),
            Spec::Parallel(c) => self.product(c, sigma, false),
            Spec::Choice(c) => c.iter().flat_map(|c| self.sat(c, sigma)).collect(),
            Spec::Pre(b, c) => self
                .sat(b, sigma)
                .into_iter()
                .filter(|o| o.union.empty() || self.holds(*c, sigma, o.union.lo()))
                .collect(),
            Spec::Maintain(b, c) => self
                .sat(b, sigma)
                .into_iter()
                .filter(|o| o.union.empty() || (o.union.lo()..=o.union.hi()).all(|t| self.holds(*c, sigma, t)))
                .collect(),
            Spec::Tag(before, b, after) => self
                .sat(b, sigma)
                .into_iter()
                .filter_map(|mut o| {
                    if o.union.empty() {
                        return Some(o);
                    }
                    let (lo, hi) = (o.union.lo(), o.union.hi());
                    for &(l, q) in before.iter().chain(after) {
                        let v = match q {
                            Qual::Whole => U::span(lo, hi),
                            Qual::Begin => U::span(lo, lo),
                            Qual::End => U::span(hi, hi),
                        };
                        let key = (l, sigma.clone());
                        if o.labels.get(&key).is_some_and(|old| *old != v) {
                            return None;
                        }
                        o.labels.insert(key, v);
                    }
                    Some(o)
                })
                .collect(),
            Spec::Forsome(v, b) => (0..OBJECTS.len())
                .flat_map(|o| {
                    let mut inner = sigma.clone();
                    inner.insert(*v, o);
                    self.sat(b, &inner)
                })
                .collect(),
            Spec::Foreach(v, c, b) => {
                let mut out = BTreeSet::new();
                for anchor in 0..=k {
                    let instances: Vec<Sigma> = (0..OBJECTS.len())
                        .map(|o| {
                            let mut inner = sigma.clone();
                            inner.insert(*v, o);
                            inner
                        })
                        .filter(|inner| self.holds(*c, inner, anchor))
                        .collect();
                    if instances.is_empty() {
                        out.insert(plain(U::default(), BTreeSet::new()));
                        continue;
                    }
                    let mut acc = vec![plain(U::default(), BTreeSet::new())];
                    for inner in &instances {
                        let outs = self.sat(b, inner);
                        acc = acc.iter().flat_map(|a| outs.iter().filter_map(move |o| merge(a, o))).collect();
                    }
                    out.extend(acc.into_iter().filter(|o| o.union.empty() || o.union.lo() == anchor));
                }
                out
            }
            Spec::Constrained(specs, cons) => self
                .product(specs, sigma, false)
                .into_iter()
                .filter(|o| {
                    cons.iter()
                        .all(|c| self.con(c, &o.labels, sigma).is_some_and(|u| u.within(o.union)))
                })
                .collect(),
        }
    }

    fn con(&self, c: &Con, labels: &Labels, sigma: &Sigma) -> Option<U> {
        match c {
            Con::Label(l, q) => {
                let u = labels.get(&(*l, sigma.clone())).copied().unwrap_or_default();
                Some(match q {
                    _ if u.empty() => u,
                    Qual::Whole => u,
                    Qual::Begin => U::span(u.lo(), u.lo()),
                    Qual::End => U::span(u.hi(), u.hi()),
                })
            }
            Con::Series(cs) | Con::Parallel(cs) => {
                let us: Vec<U> = cs.iter().map(|c| self.con(c, labels, sigma)).collect::<Option<_>>()?;
                if matches!(c, Con::Series(_)) {
                    for i in 0..us.len() {
                        for j in i + 1..us.len() {
                            if !us[i].before(us[j]) {
                                return None;
                            }
                        }
                    }
                }
                Some(us.into_iter().fold(U::default(), U::or))
            }
            Con::Pre(b, cond) => {
                let u = self.con(b, labels, sigma)?;
                (u.empty() || self.holds(*cond, sigma, u.lo())).then_some(u)
            }
        }
    }

    pub fn top(&self, s: &Spec) -> BTreeSet<Outcome> {
        self.sat(s, &Sigma::new())
    }
}

/// A random spec with at most `max_leaves` leaves and a random plan of at
/// most `max_k` steps.
pub fn random_case(seed: u64, max_leaves: usize, max_k: usize) -> (Spec, Run) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let run = Run::random(&mut rng, max_k);
    loop {
        let leaves = rng.gen_range(1..=max_leaves);
        let spec = Gen::new(&mut rng, leaves).spec(&[], &mut Vec::new());
        if leaf_count(&spec) <= max_leaves {
            return (spec, run);
        }
    }
}
