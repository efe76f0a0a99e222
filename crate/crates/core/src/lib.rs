//! Parsing, semantic checking, and plan validation for PDDL 1.2.

pub mod corpus;
pub mod diagnostics;
pub mod expansion;
pub mod model;
pub mod numeric;
pub mod pipeline;
pub mod report;
pub mod state;
pub mod syntax;
pub mod validator;

pub use diagnostics::{DiagCode, Diagnostic, Severity};
pub use numeric::NumericValue;
pub use pipeline::Session;
