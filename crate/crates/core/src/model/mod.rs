//! The semantic model of domains, problems, and situations.

pub mod build;
pub(crate) mod check;
pub mod domain;
pub mod problem;
pub mod registry;
pub mod requirements;
pub mod stratify;
pub mod types;

pub use build::{apply_addendum, build_domain};
pub use domain::*;
pub use problem::{build_problem, build_situation, ProblemModel, SituationModel, CURRENT_VALUE};
pub use registry::Registry;
pub use requirements::{close_requirements, Requirement, RequirementSet, UnknownRequirement};
pub use stratify::{predicate_occurrences, stratify, Dependency, Stratification};
pub use types::TypeHierarchy;
