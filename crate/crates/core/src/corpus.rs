//! Tiny random STRIPS domains for differential testing, with a
//! brute-force simulator that shares no code with the validator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StripsLimits {
    pub predicates: usize,
    pub objects: usize,
    pub actions: usize,
}

impl Default for StripsLimits {
    fn default() -> Self {
        StripsLimits {
            predicates: 3,
            objects: 3,
            actions: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arg {
    Param(usize),
    Object(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub predicate: usize,
    pub args: Vec<Arg>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripsAction {
    pub name: String,
    pub params: usize,
    pub pre_pos: Vec<Atom>,
    pub pre_neg: Vec<Atom>,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
}

/// A ground fact: predicate index and object indices.
pub type Fact = (usize, Vec<usize>);

/// A ground action: action index and object indices.
pub type Step = (usize, Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripsInstance {
    pub seed: u64,
    /// Name and arity.
    pub predicates: Vec<(String, usize)>,
    pub objects: Vec<String>,
    pub actions: Vec<StripsAction>,
    pub init: BTreeSet<Fact>,
    /// Ground literals; `true` for positive.
    pub goal: Vec<(Fact, bool)>,
}

fn random_atom(rng: &mut ChaCha8Rng, preds: &[(String, usize)], params: usize, objects: usize) -> Atom {
    let predicate = rng.gen_range(0..preds.len());
    let args = (0..preds[predicate].1)
        .map(|_| {
            if params > 0 && rng.gen_bool(0.75) {
                Arg::Param(rng.gen_range(0..params))
            } else {
                Arg::Object(rng.gen_range(0..objects))
            }
        })
        .collect();
    Atom { predicate, args }
}

fn all_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Deterministic in `seed`. Each limit is clamped to 1..=3; arities and
/// parameter counts are at most 2.
pub fn generate_random_strips(seed: u64, limits: StripsLimits) -> StripsInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clamp = |n: usize| n.clamp(1, 3);
    let np = rng.gen_range(1..=clamp(limits.predicates));
    let no = rng.gen_range(1..=clamp(limits.objects));
    let na = rng.gen_range(1..=clamp(limits.actions));
    let predicates: Vec<_> = (0..np).map(|i| (format!("p{i}"), rng.gen_range(0..=2))).collect();
    let objects: Vec<_> = (0..no).map(|i| format!("o{i}")).collect();
    let actions = (0..na)
        .map(|i| {
            let params = rng.gen_range(0..=2);
            let mut gen = |lo: usize, hi: usize| {
                let n = rng.gen_range(lo..=hi);
                (0..n).map(|_| random_atom(&mut rng, &predicates, params, no)).collect::<Vec<_>>()
            };
            StripsAction {
                name: format!("a{i}"),
                params,
                pre_pos: gen(0, 2),
                pre_neg: gen(0, 1),
                add: gen(1, 2),
                del: gen(0, 2),
            }
        })
        .collect();
    let mut facts: Vec<Fact> = predicates
        .iter()
        .enumerate()
        .flat_map(|(p, (_, arity))| all_tuples(no, *arity).into_iter().map(move |t| (p, t)))
        .collect();
    facts.shuffle(&mut rng);
    let init: BTreeSet<Fact> = facts.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
    let mut inst = StripsInstance {
        seed,
        predicates,
        objects,
        actions,
        init,
        goal: Vec::new(),
    };
    // Goals describe the end of a short random walk, preferring facts the
    // walk changed, so most instances are solvable but not trivially so.
    let ground = inst.ground_actions();
    let mut end = inst.init.clone();
    for _ in 0..rng.gen_range(1..=3) {
        let next: Vec<_> = ground.iter().filter_map(|g| inst.successor(&end, g)).collect();
        match next.choose(&mut rng) {
            Some(n) => end = n.clone(),
            None => break,
        }
    }
    let (mut changed, same): (Vec<Fact>, Vec<Fact>) =
        facts.into_iter().partition(|f| inst.init.contains(f) != end.contains(f));
    changed.extend(same);
    let ngoal = rng.gen_range(1..=changed.len().min(3));
    inst.goal = changed[..ngoal].iter().map(|f| (f.clone(), end.contains(f))).collect();
    inst
}

impl StripsInstance {
    pub fn domain_name(&self) -> String {
        format!("random-{}", self.seed)
    }

    pub fn problem_name(&self) -> String {
        format!("random-{}-problem", self.seed)
    }

    fn atom_text(&self, a: &Atom) -> String {
        let mut s = format!("({}", self.predicates[a.predicate].0);
        for arg in &a.args {
            match arg {
                Arg::Param(i) => write!(s, " ?x{i}").unwrap(),
                Arg::Object(i) => write!(s, " {}", self.objects[*i]).unwrap(),
            }
        }
        s.push(')');
        s
    }

    fn fact_text(&self, (p, args): &Fact) -> String {
        let mut s = format!("({}", self.predicates[*p].0);
        for o in args {
            write!(s, " {}", self.objects[*o]).unwrap();
        }
        s.push(')');
        s
    }

    pub fn domain_text(&self) -> String {
        let mut s = format!("(define (domain {})\n  (:requirements :strips)\n", self.domain_name());
        s.push_str("  (:constants");
        for o in &self.objects {
            write!(s, " {o}").unwrap();
        }
        s.push_str(")\n  (:predicates");
        for (name, arity) in &self.predicates {
            write!(s, " ({name}").unwrap();
            for i in 0..*arity {
                write!(s, " ?v{i}").unwrap();
            }
            s.push(')');
        }
        s.push_str(")\n");
        for a in &self.actions {
            write!(s, "  (:action {}\n     :parameters (", a.name).unwrap();
            let params: Vec<_> = (0..a.params).map(|i| format!("?x{i}")).collect();
            s.push_str(&params.join(" "));
            s.push_str(")\n     :precondition (and");
            for p in &a.pre_pos {
                write!(s, " {}", self.atom_text(p)).unwrap();
            }
            for p in &a.pre_neg {
                write!(s, " (not {})", self.atom_text(p)).unwrap();
            }
            s.push_str(")\n     :effect (and");
            for p in &a.add {
                write!(s, " {}", self.atom_text(p)).unwrap();
            }
            for p in &a.del {
                write!(s, " (not {})", self.atom_text(p)).unwrap();
            }
            s.push_str("))\n");
        }
        s.push_str(")\n");
        s
    }

    pub fn problem_text(&self) -> String {
        let mut s = format!(
            "(define (problem {})\n  (:domain {})\n  (:init",
            self.problem_name(),
            self.domain_name()
        );
        for f in &self.init {
            write!(s, " {}", self.fact_text(f)).unwrap();
        }
        s.push_str(")\n  (:goal (and");
        for (f, positive) in &self.goal {
            if *positive {
                write!(s, " {}", self.fact_text(f)).unwrap();
            } else {
                write!(s, " (not {})", self.fact_text(f)).unwrap();
            }
        }
        s.push_str(")))\n");
        s
    }

    pub fn step_text(&self, (a, args): &Step) -> String {
        let mut s = format!("({}", self.actions[*a].name);
        for o in args {
            write!(s, " {}", self.objects[*o]).unwrap();
        }
        s.push(')');
        s
    }

    pub fn plan_text(&self, plan: &[Step]) -> String {
        let steps: Vec<_> = plan.iter().map(|s| self.step_text(s)).collect();
        format!("({})", steps.join(" "))
    }

    /// Every well-formed ground action.
    pub fn ground_actions(&self) -> Vec<Step> {
        self.actions
            .iter()
            .enumerate()
            .flat_map(|(i, a)| all_tuples(self.objects.len(), a.params).into_iter().map(move |t| (i, t)))
            .collect()
    }

    fn ground(a: &Atom, binding: &[usize]) -> Fact {
        let args = a
            .args
            .iter()
            .map(|arg| match arg {
                Arg::Param(i) => binding[*i],
                Arg::Object(o) => *o,
            })
            .collect();
        (a.predicate, args)
    }

    /// The situation after `step`, or `None` when its precondition fails.
    /// Deletes are applied before adds.
    pub fn successor(&self, state: &BTreeSet<Fact>, (a, binding): &Step) -> Option<BTreeSet<Fact>> {
        let act = &self.actions[*a];
        if !act.pre_pos.iter().all(|p| state.contains(&Self::ground(p, binding)))
            || act.pre_neg.iter().any(|p| state.contains(&Self::ground(p, binding)))
        {
            return None;
        }
        let mut next = state.clone();
        for d in &act.del {
            next.remove(&Self::ground(d, binding));
        }
        for d in &act.add {
            next.insert(Self::ground(d, binding));
        }
        Some(next)
    }

    pub fn goal_holds(&self, state: &BTreeSet<Fact>) -> bool {
        self.goal.iter().all(|(f, positive)| state.contains(f) == *positive)
    }

    /// Whether executing `plan` from the initial situation reaches the goal.
    pub fn accepts(&self, plan: &[Step]) -> bool {
        let mut state = self.init.clone();
        for s in plan {
            match self.successor(&state, s) {
                Some(next) => state = next,
                None => return false,
            }
        }
        self.goal_holds(&state)
    }

    /// A shortest plan by breadth-first search, if any exists.
    pub fn bfs(&self) -> Option<Vec<Step>> {
        let ground = self.ground_actions();
        let mut parent: HashMap<BTreeSet<Fact>, Option<(BTreeSet<Fact>, Step)>> = HashMap::new();
        parent.insert(self.init.clone(), None);
        let mut queue = VecDeque::from([self.init.clone()]);
        while let Some(state) = queue.pop_front() {
            if self.goal_holds(&state) {
                let mut plan = Vec::new();
                let mut cur = state;
                while let Some(Some((prev, step))) = parent.get(&cur).cloned() {
                    plan.push(step);
                    cur = prev;
                }
                plan.reverse();
                return Some(plan);
            }
            for g in &ground {
                if let Some(next) = self.successor(&state, g) {
                    if !parent.contains_key(&next) {
                        parent.insert(next.clone(), Some((state.clone(), g.clone())));
                        queue.push_back(next);
                    }
                }
            }
        }
        None
    }
}
