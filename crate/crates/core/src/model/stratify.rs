//! Axiom stratification: derived predicates are ordered so that nothing
//! depends negatively on itself.

use crate::syntax::{Builtin, Expr, Gd, GdKind};
use std::collections::{BTreeMap, BTreeSet};

/// A predicate dependency read off an axiom: `head` depends on `on`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dependency {
    pub head: String,
    pub on: String,
    pub negative: bool,
}

/// Strata of derived predicates; anything absent is primitive (stratum 0).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stratification {
    pub strata: BTreeMap<String, usize>,
}

impl Stratification {
    pub fn stratum(&self, predicate: &str) -> usize {
        self.strata.get(predicate).copied().unwrap_or(0)
    }

    pub fn max_stratum(&self) -> usize {
        self.strata.values().copied().max().unwrap_or(0)
    }

    /// Derived predicates grouped by stratum, lowest first.
    pub fn layers(&self) -> Vec<BTreeSet<String>> {
        let mut layers = vec![BTreeSet::new(); self.max_stratum()];
        for (p, &s) in &self.strata {
            layers[s - 1].insert(p.clone());
        }
        layers
    }
}

/// Collects the predicates `gd` mentions, with the polarity of each
/// occurrence. Universal quantification and `imply` antecedents count as
/// negative, since they are evaluated through failure.
pub fn predicate_occurrences(gd: &Gd, out: &mut Vec<(String, bool)>) {
    fn go(gd: &Gd, negative: bool, out: &mut Vec<(String, bool)>) {
        match &gd.kind {
            GdKind::Atom(a) => out.push((a.predicate.canonical.clone(), negative)),
            GdKind::Equal(..) => {}
            GdKind::Not(g) => go(g, true, out),
            GdKind::And(gs) | GdKind::Or(gs) => gs.iter().for_each(|g| go(g, negative, out)),
            GdKind::Imply(a, b) => {
                go(a, true, out);
                go(b, negative, out);
            }
            GdKind::Exists(_, g) => go(g, negative, out),
            GdKind::Forall(_, g) => go(g, true, out),
            GdKind::Builtin(b) => builtin(b, out),
        }
    }
    fn builtin(b: &Builtin, out: &mut Vec<(String, bool)>) {
        let exprs: Vec<&Expr> = match b {
            Builtin::Eval { expr, value } | Builtin::FluentEval { expr, value } => vec![expr, value],
            Builtin::Test(e) | Builtin::FluentTest(e) => vec![e],
            Builtin::BoundedInt { var, low, high } => vec![var, low, high],
            Builtin::Equation { lhs, rhs } => vec![lhs, rhs],
            Builtin::CurrentValue { .. } => vec![],
        };
        exprs.into_iter().for_each(|e| expr(e, out));
    }
    fn expr(e: &Expr, out: &mut Vec<(String, bool)>) {
        match e {
            Expr::Arith { args, .. } => args.iter().for_each(|a| expr(a, out)),
            Expr::Compare { lhs, rhs, .. } => {
                expr(lhs, out);
                expr(rhs, out);
            }
            // An aggregate needs the complete extension of its condition.
            Expr::Sum {
                condition, body, ..
            } => {
                go(condition, true, out);
                expr(body, out);
            }
            _ => {}
        }
    }
    go(gd, false, out)
}

/// Minimal strata for `derived` predicates, or the predicates caught in a
/// cycle through negation.
pub fn stratify(
    derived: &BTreeSet<String>,
    deps: &[Dependency],
) -> Result<Stratification, BTreeSet<String>> {
    let mut strata: BTreeMap<String, usize> = derived.iter().map(|p| (p.clone(), 1)).collect();
    let limit = derived.len() + 1;
    loop {
        let mut changed = false;
        for d in deps {
            let base = strata.get(&d.on).copied().unwrap_or(0);
            let need = (base + usize::from(d.negative)).max(1);
            let cur = strata.get_mut(&d.head).expect("dependency head is derived");
            if *cur < need {
                *cur = need;
                changed = true;
            }
        }
        if !changed {
            return Ok(Stratification { strata });
        }
        if strata.values().any(|&s| s > limit) {
            let bad = strata
                .iter()
                .filter(|(_, &s)| s > limit)
                .map(|(p, _)| p.clone())
                .collect();
            return Err(bad);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dep(head: &str, on: &str, negative: bool) -> Dependency {
        Dependency {
            head: head.into(),
            on: on.into(),
            negative,
        }
    }

    fn set(ps: &[&str]) -> BTreeSet<String> {
        ps.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn blocks_world_strata() {
        let deps = [
            dep("above", "on", false),
            dep("above", "on", false),
            dep("above", "above", false),
            dep("clear", "on", true),
        ];
        let s = stratify(&set(&["above", "clear"]), &deps).unwrap();
        assert_eq!(s.stratum("above"), 1);
        assert_eq!(s.stratum("clear"), 1);
        assert_eq!(s.stratum("on"), 0);
    }

    #[test]
    fn negative_cycle_rejected() {
        let deps = [dep("p", "q", true), dep("q", "p", true)];
        assert!(stratify(&set(&["p", "q"]), &deps).is_err());
    }

    #[test]
    fn negation_over_derived_raises_stratum() {
        let deps = [dep("a", "b", true), dep("b", "c", false)];
        let s = stratify(&set(&["a", "b"]), &deps).unwrap();
        assert_eq!((s.stratum("b"), s.stratum("a")), (1, 2));
    }

    #[test]
    fn empty() {
        let s = stratify(&BTreeSet::new(), &[]).unwrap();
        assert!(s.strata.is_empty());
    }
}
