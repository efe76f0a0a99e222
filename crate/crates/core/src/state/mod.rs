//! Ground states and the evaluation of goals, expressions, and axioms.

pub mod eval;
mod world;

pub use eval::Evaluator;
pub use world::World;

use crate::numeric::{ArithError, NumericValue};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// A ground term: an object constant or a number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Object(String),
    Number(NumericValue),
}

impl Value {
    pub fn object(name: &str) -> Value {
        Value::Object(name.to_ascii_lowercase())
    }

    pub fn as_object(&self) -> Option<&str> {
        match self {
            Value::Object(o) => Some(o),
            Value::Number(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Object(o) => f.write_str(o),
            Value::Number(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl From<NumericValue> for Value {
    fn from(n: NumericValue) -> Self {
        Value::Number(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<Value>,
}

impl GroundAtom {
    pub fn new(predicate: &str, args: impl IntoIterator<Item = Value>) -> GroundAtom {
        GroundAtom {
            predicate: predicate.to_ascii_lowercase(),
            args: args.into_iter().collect(),
        }
    }

    /// Shorthand for atoms over object constants: `GroundAtom::of("at", &["b", "home"])`.
    pub fn of(predicate: &str, args: &[&str]) -> GroundAtom {
        GroundAtom::new(predicate, args.iter().map(|a| Value::object(a)))
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for GroundAtom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The changing part of a situation: true primitive atoms and fluent
/// values. Derived atoms are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct State {
    pub atoms: BTreeSet<GroundAtom>,
    pub fluents: BTreeMap<String, NumericValue>,
}

impl State {
    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    /// A short, stable fingerprint of the state.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for a in &self.atoms {
            h.update(a.to_string().as_bytes());
            h.update(b"\n");
        }
        for (f, v) in &self.fluents {
            h.update(format!("{f}={v}\n").as_bytes());
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Variable bindings; keys keep the leading `?`.
pub type Subst = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("variable {0} appears in an eval expression")]
    VariableInEval(String),
    #[error("cannot enumerate the values of {0}")]
    Unenumerable(String),
    #[error("{0} is not a number")]
    NotNumeric(String),
    #[error("fluent {0} outside a fluent-evaluation context")]
    FluentOutsideFluentContext(String),
    #[error("fluent {0} has no value")]
    NoFluentValue(String),
    #[error("{0} is not a fluent")]
    NotAFluent(String),
    #[error("equation has more than one unknown")]
    EquationUnderdetermined,
    #[error("cannot solve equation for {0}")]
    EquationUnsolvable(String),
    #[error("equation over fluents is unsupported")]
    FluentEquation,
    #[error("{0} is derived both true and false")]
    DerivationConflict(String),
    #[error("{0}")]
    Arith(#[from] ArithError),
    #[error("undeclared name {0}")]
    UnknownName(String),
}
