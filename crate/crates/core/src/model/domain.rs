//! The merged semantic model of a domain.

use super::requirements::RequirementSet;
use super::stratify::Stratification;
use super::types::TypeHierarchy;
use crate::syntax::{
    ActionBody, ActionDef, Effect, Expansion, Gd, Literal, MethodDef, Name, Term, TypeExpr,
    TypedList,
};
use std::collections::{BTreeMap, BTreeSet};

/// Where an entity came from: the domain itself (or an ancestor), or a
/// named addendum.
pub type Origin = Option<String>;

#[derive(Debug, Clone, PartialEq)]
pub struct Constant {
    pub name: Name,
    pub ty: TypeExpr,
    /// False when the declaration carried no `- type`.
    pub explicit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainVar {
    pub name: Name,
    pub ty: TypeExpr,
    pub initial: Option<Term>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateSig {
    pub name: Name,
    pub params: TypedList<Name>,
    /// Domain that declared it.
    pub origin: String,
    /// Mentioned by some timeless literal.
    pub timeless: bool,
    /// Concluded by some axiom.
    pub derived: bool,
}

impl PredicateSig {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn param_types(&self) -> Vec<&TypeExpr> {
        self.params.iter().map(|(_, t)| t).collect()
    }

    fn same_signature(&self, other: &PredicateSig) -> bool {
        self.param_types() == other.param_types()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Method {
    /// `None` for an unnamed method.
    pub name: Option<Name>,
    pub params: TypedList<Name>,
    pub body: ActionBody,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSchema {
    pub name: Name,
    pub params: TypedList<Name>,
    pub vars: TypedList<Name>,
    pub precondition: Option<Gd>,
    pub effect: Option<Effect>,
    pub expansion: Option<Expansion>,
    pub maintain: Option<Gd>,
    pub only_in_expansions: bool,
    pub methods: Vec<Method>,
    pub origin: Origin,
}

impl ActionSchema {
    pub fn from_def(def: &ActionDef, origin: Origin) -> ActionSchema {
        let b = &def.body;
        ActionSchema {
            name: def.name.clone(),
            params: def.params.clone(),
            vars: b.vars.clone().unwrap_or_default(),
            precondition: b.precondition.clone(),
            effect: b.effect.clone(),
            expansion: b.expansion.clone(),
            maintain: b.maintain.clone(),
            only_in_expansions: b.only_in_expansions.unwrap_or(false),
            methods: Vec::new(),
            origin,
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.expansion.is_none() && self.methods.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

impl Method {
    pub fn from_def(def: &MethodDef, origin: Origin) -> Method {
        Method {
            name: def.name.clone(),
            params: def.params.clone(),
            body: def.body.clone(),
            origin,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axiom {
    pub vars: TypedList<Name>,
    pub context: Gd,
    pub implies: Literal,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Safety {
    pub gd: Gd,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainModel {
    pub name: Name,
    /// Every ancestor, nearest first, without repeats.
    pub ancestors: Vec<String>,
    /// Flags declared here or by an ancestor, before closure.
    pub declared: RequirementSet,
    /// Closed requirement set.
    pub requirements: RequirementSet,
    pub types: TypeHierarchy,
    pub constants: BTreeMap<String, Constant>,
    pub domain_vars: BTreeMap<String, DomainVar>,
    pub predicates: BTreeMap<String, PredicateSig>,
    pub timeless: Vec<Literal>,
    pub actions: BTreeMap<String, ActionSchema>,
    pub axioms: Vec<Axiom>,
    pub safety: Vec<Safety>,
    /// Names of the addenda applied so far.
    pub addenda: BTreeSet<String>,
    pub strata: Stratification,
}

impl DomainModel {
    pub fn empty(name: Name) -> DomainModel {
        DomainModel {
            name,
            ancestors: Vec::new(),
            declared: RequirementSet::empty(),
            requirements: RequirementSet::empty().closure(),
            types: TypeHierarchy::default(),
            constants: BTreeMap::new(),
            domain_vars: BTreeMap::new(),
            predicates: BTreeMap::new(),
            timeless: Vec::new(),
            actions: BTreeMap::new(),
            axioms: Vec::new(),
            safety: Vec::new(),
            addenda: BTreeSet::new(),
            strata: Stratification::default(),
        }
    }

    pub fn is_derived(&self, predicate: &str) -> bool {
        self.predicates.get(predicate).is_some_and(|p| p.derived)
            || self.axioms.iter().any(|a| a.implies.atom.predicate.as_str() == predicate)
    }

    /// Whether `name` is usable as a one-place type predicate.
    pub fn is_type_predicate(&self, name: &str) -> bool {
        !self.predicates.contains_key(name) && self.types.contains(name)
    }

    /// Copies everything visible in `ancestor` into this model. Inherited
    /// entities lose their addendum origin: addenda are local to a domain.
    pub(crate) fn inherit(&mut self, ancestor: &DomainModel) {
        let name = ancestor.name.canonical.clone();
        for a in std::iter::once(&name).chain(&ancestor.ancestors) {
            if !self.ancestors.contains(a) {
                self.ancestors.push(a.clone());
            }
        }
        self.declared = self.declared.union(ancestor.declared);
        self.types.merge(&ancestor.types);
        self.constants.extend(ancestor.constants.clone());
        self.domain_vars.extend(ancestor.domain_vars.clone());
        self.predicates.extend(ancestor.predicates.clone());
        self.timeless.extend(ancestor.timeless.iter().cloned());
        for (k, a) in &ancestor.actions {
            let mut a = a.clone();
            a.origin = None;
            a.methods.iter_mut().for_each(|m| m.origin = None);
            self.actions.insert(k.clone(), a);
        }
        self.axioms.extend(ancestor.axioms.iter().map(|a| Axiom {
            origin: None,
            ..a.clone()
        }));
        self.safety.extend(ancestor.safety.iter().map(|s| Safety {
            origin: None,
            ..s.clone()
        }));
    }

    /// Drops everything contributed by addendum `name`.
    pub(crate) fn erase_addendum(&mut self, name: &str) {
        let from = |o: &Origin| o.as_deref() == Some(name);
        self.actions.retain(|_, a| !from(&a.origin));
        for a in self.actions.values_mut() {
            a.methods.retain(|m| !from(&m.origin));
        }
        self.axioms.retain(|a| !from(&a.origin));
        self.safety.retain(|s| !from(&s.origin));
        self.addenda.remove(name);
    }

    pub(crate) fn merge_predicate(&mut self, sig: PredicateSig) -> Result<(), ()> {
        match self.predicates.get(sig.name.as_str()) {
            Some(old) if !old.same_signature(&sig) => Err(()),
            Some(_) => Ok(()),
            None => {
                self.predicates.insert(sig.name.canonical.clone(), sig);
                Ok(())
            }
        }
    }
}
