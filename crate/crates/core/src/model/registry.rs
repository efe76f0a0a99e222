//! The symbol table of everything defined so far.

use super::build::{apply_addendum, build_domain};
use super::domain::{Constant, DomainModel};
use super::problem::{build_problem, build_situation, ProblemModel, SituationModel};
use crate::diagnostics::{DiagCode, Diagnostic};
use crate::syntax::{Definition, Literal, ParsedDef};
use std::collections::BTreeMap;

/// Domains and problems are global; situations belong to their domain and
/// are visible in its descendants. Registering a name again replaces the
/// earlier entry.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    domains: BTreeMap<String, DomainModel>,
    problems: BTreeMap<String, ProblemModel>,
    situations: BTreeMap<String, BTreeMap<String, SituationModel>>,
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    pub fn domain(&self, name: &str) -> Option<&DomainModel> {
        self.domains.get(name)
    }

    pub fn problem(&self, name: &str) -> Option<&ProblemModel> {
        self.problems.get(name)
    }

    pub fn domains(&self) -> impl Iterator<Item = &DomainModel> {
        self.domains.values()
    }

    pub fn problems(&self) -> impl Iterator<Item = &ProblemModel> {
        self.problems.values()
    }

    fn own_situation(&self, domain: &str, name: &str) -> Option<&SituationModel> {
        self.situations.get(domain)?.get(name)
    }

    /// Resolves an initial-situation name as seen from `domain`: a situation
    /// of the domain or an ancestor, or else a problem.
    pub fn situation(
        &self,
        domain: &DomainModel,
        name: &str,
    ) -> Option<(&BTreeMap<String, Constant>, &[Literal])> {
        let own = std::iter::once(domain.name.as_str())
            .chain(domain.ancestors.iter().map(String::as_str))
            .find_map(|d| self.own_situation(d, name));
        if let Some(s) = own {
            return Some((&s.objects, &s.initial));
        }
        self.problems
            .get(name)
            .map(|p| (&p.objects, p.initial.as_slice()))
    }

    /// Builds and registers one definition, returning its diagnostics.
    pub fn register(&mut self, parsed: &ParsedDef) -> Vec<Diagnostic> {
        let src = &parsed.source;
        let demands = &parsed.demands;
        match &parsed.def {
            Definition::Domain(d) => {
                let (m, diags) = build_domain(d, src, demands, self);
                self.domains.insert(m.name.canonical.clone(), m);
                diags
            }
            Definition::Addendum(a) => {
                let Some(target) = self.domains.get(a.domain.as_str()) else {
                    let at = src.find(&a.domain.span).unwrap_or(src);
                    return vec![Diagnostic::new(DiagCode::UnknownDomain, at)];
                };
                let (m, diags) = apply_addendum(a, src, demands, target);
                self.domains.insert(m.name.canonical.clone(), m);
                diags
            }
            Definition::Situation(s) => {
                let (sit, mut diags) = build_situation(s, src, demands, self);
                let redefined = self
                    .domains
                    .get(&sit.domain)
                    .is_some_and(|d| self.situation(d, sit.name.as_str()).is_some());
                if redefined {
                    let at = src.find(&s.name.span).unwrap_or(src);
                    diags.push(Diagnostic::new(DiagCode::SituationRedefined, at));
                }
                self.situations
                    .entry(sit.domain.clone())
                    .or_default()
                    .insert(sit.name.canonical.clone(), sit);
                diags
            }
            Definition::Problem(p) => {
                let (pm, diags) = build_problem(p, src, demands, self);
                self.problems.insert(pm.name.canonical.clone(), pm);
                diags
            }
        }
    }
}
