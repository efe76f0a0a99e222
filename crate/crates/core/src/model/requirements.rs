//! Requirement flags and their implication closure.

use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Requirement {
    Strips,
    Typing,
    DisjunctivePreconditions,
    Equality,
    ExistentialPreconditions,
    UniversalPreconditions,
    QuantifiedPreconditions,
    ConditionalEffects,
    ActionExpansions,
    ForeachExpansions,
    DagExpansions,
    DomainAxioms,
    SubgoalThroughAxioms,
    SafetyConstraints,
    ExpressionEvaluation,
    Fluents,
    OpenWorld,
    TrueNegation,
    Adl,
    Ucpop,
}

use Requirement::*;

impl Requirement {
    pub const ALL: [Requirement; 20] = [
        Strips,
        Typing,
        DisjunctivePreconditions,
        Equality,
        ExistentialPreconditions,
        UniversalPreconditions,
        QuantifiedPreconditions,
        ConditionalEffects,
        ActionExpansions,
        ForeachExpansions,
        DagExpansions,
        DomainAxioms,
        SubgoalThroughAxioms,
        SafetyConstraints,
        ExpressionEvaluation,
        Fluents,
        OpenWorld,
        TrueNegation,
        Adl,
        Ucpop,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Strips => ":strips",
            Typing => ":typing",
            DisjunctivePreconditions => ":disjunctive-preconditions",
            Equality => ":equality",
            ExistentialPreconditions => ":existential-preconditions",
            UniversalPreconditions => ":universal-preconditions",
            QuantifiedPreconditions => ":quantified-preconditions",
            ConditionalEffects => ":conditional-effects",
            ActionExpansions => ":action-expansions",
            ForeachExpansions => ":foreach-expansions",
            DagExpansions => ":dag-expansions",
            DomainAxioms => ":domain-axioms",
            SubgoalThroughAxioms => ":subgoal-through-axioms",
            SafetyConstraints => ":safety-constraints",
            ExpressionEvaluation => ":expression-evaluation",
            Fluents => ":fluents",
            OpenWorld => ":open-world",
            TrueNegation => ":true-negation",
            Adl => ":adl",
            Ucpop => ":ucpop",
        }
    }

    /// Looks up a flag by its keyword, case-insensitively.
    pub fn from_keyword(kw: &str) -> Option<Requirement> {
        let kw = kw.to_ascii_lowercase();
        Requirement::ALL.into_iter().find(|r| r.keyword() == kw)
    }

    /// Flags this one implies directly.
    pub fn implies(self) -> &'static [Requirement] {
        match self {
            QuantifiedPreconditions => &[ExistentialPreconditions, UniversalPreconditions],
            ForeachExpansions | DagExpansions => &[ActionExpansions],
            ExpressionEvaluation => &[DomainAxioms],
            Fluents => &[ExpressionEvaluation],
            TrueNegation => &[OpenWorld],
            Adl => &[
                Strips,
                Typing,
                DisjunctivePreconditions,
                Equality,
                QuantifiedPreconditions,
                ConditionalEffects,
            ],
            Ucpop => &[Adl, DomainAxioms, SafetyConstraints],
            _ => &[],
        }
    }

    fn bit(self) -> u32 {
        1 << (self as u32)
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A set of requirement flags.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RequirementSet(u32);

impl RequirementSet {
    pub const fn empty() -> Self {
        RequirementSet(0)
    }

    pub fn from_bits(bits: u32) -> Self {
        RequirementSet(bits & ((1 << Requirement::ALL.len()) - 1))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn insert(&mut self, r: Requirement) {
        self.0 |= r.bit();
    }

    pub fn contains(self, r: Requirement) -> bool {
        self.0 & r.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: RequirementSet) -> RequirementSet {
        RequirementSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: RequirementSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Requirement> {
        Requirement::ALL.into_iter().filter(move |r| self.contains(*r))
    }

    /// Least superset closed under implication; the empty set closes to
    /// `{:strips}`.
    pub fn closure(self) -> RequirementSet {
        if self.is_empty() {
            return [Strips].into_iter().collect();
        }
        let mut closed = self;
        loop {
            let mut next = closed;
            for r in closed.iter() {
                for &implied in r.implies() {
                    next.insert(implied);
                }
            }
            if next == closed {
                return closed;
            }
            closed = next;
        }
    }

    /// Keywords in lexicographic order.
    pub fn sorted_keywords(self) -> Vec<&'static str> {
        let mut kws: Vec<_> = self.iter().map(Requirement::keyword).collect();
        kws.sort_unstable();
        kws
    }
}

impl FromIterator<Requirement> for RequirementSet {
    fn from_iter<T: IntoIterator<Item = Requirement>>(iter: T) -> Self {
        let mut set = RequirementSet::empty();
        for r in iter {
            set.insert(r);
        }
        set
    }
}

impl Serialize for RequirementSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.sorted_keywords())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown requirement {0}")]
pub struct UnknownRequirement(pub String);

/// Parses and closes a list of flag keywords.
pub fn close_requirements<'a>(
    keywords: impl IntoIterator<Item = &'a str>,
) -> Result<RequirementSet, UnknownRequirement> {
    keywords
        .into_iter()
        .map(|k| Requirement::from_keyword(k).ok_or_else(|| UnknownRequirement(k.to_string())))
        .collect::<Result<RequirementSet, _>>()
        .map(RequirementSet::closure)
}
