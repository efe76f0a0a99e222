//! The type hierarchy of a domain.

use crate::syntax::TypeExpr;
use std::collections::{BTreeMap, BTreeSet};

pub const OBJECT: &str = "object";
pub const NUMBER: &str = "number";

/// Atomic types and their declared supertypes. `object` and `number` are
/// built in; every type is a subtype of `object`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeHierarchy {
    parents: BTreeMap<String, BTreeSet<String>>,
}

impl Default for TypeHierarchy {
    fn default() -> Self {
        let mut parents = BTreeMap::new();
        parents.insert(OBJECT.to_string(), BTreeSet::new());
        parents.insert(NUMBER.to_string(), BTreeSet::new());
        TypeHierarchy { parents }
    }
}

impl TypeHierarchy {
    pub fn contains(&self, atom: &str) -> bool {
        self.parents.contains_key(atom)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.parents.keys().map(String::as_str)
    }

    pub fn is_builtin(atom: &str) -> bool {
        atom == OBJECT || atom == NUMBER
    }

    /// Declares `atom` (if new) with the given parents. Returns false if the
    /// addition would create a cycle, in which case nothing changes.
    pub fn declare(&mut self, atom: &str, parents: impl IntoIterator<Item = String>) -> bool {
        let parents: BTreeSet<String> = parents.into_iter().filter(|p| p != OBJECT).collect();
        if parents.iter().any(|p| p == atom || self.atom_le(p, atom)) {
            return false;
        }
        self.parents.entry(atom.to_string()).or_default().extend(parents);
        true
    }

    /// Adds every atom and edge of `other`, skipping edges that would close
    /// a cycle.
    pub fn merge(&mut self, other: &TypeHierarchy) {
        for a in other.parents.keys() {
            self.parents.entry(a.clone()).or_default();
        }
        for (a, ps) in &other.parents {
            self.declare(a, ps.iter().cloned());
        }
    }

    pub fn parents(&self, atom: &str) -> impl Iterator<Item = &str> {
        self.parents.get(atom).into_iter().flatten().map(String::as_str)
    }

    /// Reflexive, transitive subtype relation on atoms.
    pub fn atom_le(&self, a: &str, b: &str) -> bool {
        if a == b || b == OBJECT {
            return true;
        }
        let mut stack = vec![a];
        let mut seen = BTreeSet::new();
        while let Some(t) = stack.pop() {
            if !seen.insert(t) {
                continue;
            }
            for p in self.parents(t) {
                if p == b {
                    return true;
                }
                stack.push(p);
            }
        }
        false
    }

    /// Whether `atom` is `number` or one of its subtypes.
    pub fn is_numeric(&self, atom: &str) -> bool {
        self.atom_le(atom, NUMBER)
    }

    /// `t1 ≤ t2`, with `either` as union and `fluent` as a covariant wrapper
    /// incomparable with plain types.
    pub fn subtype_of(&self, t1: &TypeExpr, t2: &TypeExpr) -> bool {
        match (t1, t2) {
            (TypeExpr::Either(ms), _) => ms.iter().all(|m| self.subtype_of(m, t2)),
            (_, TypeExpr::Either(ms)) => ms.iter().any(|m| self.subtype_of(t1, m)),
            (TypeExpr::Fluent(u), TypeExpr::Fluent(v)) => self.subtype_of(u, v),
            (TypeExpr::Fluent(_), _) | (_, TypeExpr::Fluent(_)) => false,
            (TypeExpr::Atom(a), TypeExpr::Atom(b)) => self.atom_le(a.as_str(), b.as_str()),
        }
    }

    /// Whether some member of `t1` fits `t2` (used for "may not match").
    pub fn overlaps(&self, t1: &TypeExpr, t2: &TypeExpr) -> bool {
        match t1 {
            TypeExpr::Either(ms) => ms.iter().any(|m| self.overlaps(m, t2)),
            _ => self.subtype_of(t1, t2),
        }
    }

    /// Whether a numeric literal belongs to `t`. A type named `integer`
    /// admits only integral values.
    pub fn number_fits(&self, integral: bool, t: &TypeExpr) -> bool {
        match t {
            TypeExpr::Atom(a) => {
                let a = a.as_str();
                a == OBJECT || (self.is_numeric(a) && (integral || !self.atom_le(a, "integer")))
            }
            TypeExpr::Either(ms) => ms.iter().any(|m| self.number_fits(integral, m)),
            TypeExpr::Fluent(_) => false,
        }
    }

    /// Unknown atoms mentioned by `t`.
    pub fn unknown_atoms<'a>(&self, t: &'a TypeExpr) -> Vec<&'a crate::syntax::Name> {
        t.atoms().into_iter().filter(|a| !self.contains(a.as_str())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h() -> TypeHierarchy {
        let mut h = TypeHierarchy::default();
        assert!(h.declare("integer", ["number".to_string()]));
        assert!(h.declare("float", ["number".to_string()]));
        assert!(h.declare("physob", []));
        h
    }

    #[test]
    fn typed_list_hierarchy() {
        let h = h();
        assert!(h.subtype_of(&TypeExpr::named("integer"), &TypeExpr::number()));
        assert!(h.subtype_of(&TypeExpr::named("float"), &TypeExpr::number()));
        assert!(!h.subtype_of(&TypeExpr::named("physob"), &TypeExpr::number()));
        assert!(h.subtype_of(&TypeExpr::named("physob"), &TypeExpr::object()));
        let either = TypeExpr::Either(vec![TypeExpr::named("integer"), TypeExpr::named("float")]);
        assert!(h.subtype_of(&either, &TypeExpr::number()));
        assert!(h.subtype_of(&TypeExpr::named("integer"), &either));
    }

    #[test]
    fn fluent_types() {
        let h = h();
        let fi = TypeExpr::Fluent(Box::new(TypeExpr::named("integer")));
        let fnum = TypeExpr::Fluent(Box::new(TypeExpr::number()));
        assert!(h.subtype_of(&fi, &fnum));
        assert!(!h.subtype_of(&fnum, &fi));
        assert!(!h.subtype_of(&fi, &TypeExpr::number()));
        assert!(!h.subtype_of(&TypeExpr::number(), &fnum));
    }

    #[test]
    fn cycles_rejected() {
        let mut h = TypeHierarchy::default();
        assert!(h.declare("a", ["b".to_string()]));
        assert!(h.declare("b", ["c".to_string()]));
        assert!(!h.declare("c", ["a".to_string()]));
        assert!(!h.declare("d", ["d".to_string()]));
    }

    #[test]
    fn integer_literals() {
        let h = h();
        assert!(h.number_fits(true, &TypeExpr::named("integer")));
        assert!(!h.number_fits(false, &TypeExpr::named("integer")));
        assert!(h.number_fits(false, &TypeExpr::named("float")));
        assert!(!h.number_fits(true, &TypeExpr::named("physob")));
    }
}
