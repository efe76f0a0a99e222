//! Diagnostics and the fixed catalog of their descriptions.
//!
//! Every diagnostic carries a stable [`DiagCode`]; the English description is
//! derived from the code (plus an optional detail such as a requirement flag)
//! so that rendered `.chk` files stay byte-stable across releases.

use crate::syntax::{SExpr, SourceSpan};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

macro_rules! catalog {
    ($( $variant:ident = $id:literal, $sev:ident, $text:literal; )*) => {
        /// Stable identifiers for every diagnostic the toolkit can emit.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        pub enum DiagCode { $( $variant, )* }

        impl DiagCode {
            pub const ALL: &'static [DiagCode] = &[ $( DiagCode::$variant, )* ];

            pub fn id(self) -> &'static str {
                match self { $( DiagCode::$variant => $id, )* }
            }

            pub fn text(self) -> &'static str {
                match self { $( DiagCode::$variant => $text, )* }
            }

            pub fn severity(self) -> Severity {
                match self { $( DiagCode::$variant => Severity::$sev, )* }
            }
        }
    };
}

catalog! {
    // lexing and reading
    IllegalCharacter = "L001", Error, "illegal character";
    UnclosedList = "L002", Error, "missing close parenthesis";
    UnmatchedClose = "L003", Error, "unmatched close parenthesis";
    // definition structure
    NotADefinition = "P001", Error, "expected a define form";
    MalformedHeader = "P002", Error, "malformed definition header";
    UnknownDefinitionKind = "P003", Error, "unknown definition kind";
    UnknownField = "P004", Error, "unknown field";
    DuplicateField = "P005", Error, "duplicate field";
    FieldOutOfOrder = "P006", Error, "field out of order";
    UnexpectedElement = "P007", Error, "unexpected element";
    MalformedField = "P008", Error, "malformed field";
    MissingField = "P009", Error, "missing required field";
    ExpectedName = "P010", Error, "expected a name";
    ExpectedVariable = "P011", Error, "expected a variable";
    MalformedTypedList = "P012", Error, "malformed typed list";
    MalformedType = "P013", Error, "malformed type";
    NestedFluentType = "P014", Warning, "nested fluent type";
    WrongArgumentCount = "P015", Error, "wrong number of arguments";
    ExpectedLiteral = "P016", Error, "expected a literal";
    NotAllowedInEffect = "P017", Error, "not allowed in an effect";
    NoOpWithArguments = "P018", Error, "no-op takes no arguments";
    MalformedExpression = "P019", Error, "malformed expression";
    MalformedActionSpec = "P020", Error, "malformed action spec";
    MalformedTag = "P021", Error, "tag needs exactly one action spec";
    MalformedConstraint = "P022", Error, "malformed action constraint";
    ExpectedBoolean = "P023", Error, "expected t or nil";
    MultipleDefinitions = "P024", Error, "more than one definition per file";
    AddendumForbidden = "P025", Error, "addenda are forbidden in strict mode";
    UnknownRequirement = "P026", Error, "unknown requirement";
    MalformedGoal = "P027", Error, "malformed goal description";
    FieldNotAllowed = "P028", Error, "field not allowed here";
    // semantic model
    RequirementMissing = "M001", Error, "requires";
    VarsRequirement = "M002", Warning, "requires :existential-preconditions or :conditional-effects";
    UnknownDomain = "M003", Error, "unknown domain";
    UnknownType = "M004", Error, "undeclared type";
    TypeCycle = "M005", Error, "cyclic type declaration";
    DuplicateDeclaration = "M006", Error, "duplicate declaration";
    NameKindCollision = "M007", Error, "name already declared as";
    UnknownPredicate = "M008", Error, "undeclared predicate";
    UnknownConstant = "M009", Error, "undeclared constant";
    UnknownAction = "M010", Error, "undeclared action";
    ArgumentType = "M011", Error, "argument type mismatch";
    ArgumentTypeUncertain = "M012", Warning, "argument type may not match";
    UnboundVariable = "M013", Error, "unbound variable";
    ShadowedVariable = "M014", Warning, "variable shadows an outer binding";
    EffectAndExpansion = "M015", Error, "action has both an effect and an expansion";
    NoEffectOrExpansion = "M016", Error, "action has neither an effect nor an expansion";
    VarsNotInPrecondition = "M017", Error, "variable in the effect is not bound by the precondition";
    MethodFieldNotAllowed = "M018", Error, "field not allowed in a method";
    MethodForPrimitive = "M019", Error, "method for a primitive action";
    DuplicateMethodName = "M020", Error, "duplicate method name";
    NotStratifiable = "M021", Error, "axioms are not stratifiable";
    DerivedInEffect = "M022", Error, "effect mentions a derived predicate";
    UnknownSituation = "M023", Error, "unknown situation";
    SituationRedefined = "M024", Warning, "situation redefined";
    AmbiguousObjectType = "M025", Error, "object type is ambiguous";
    TypeNotAssertable = "M026", Error, "type predicates cannot be asserted";
    NoGoal = "M027", Error, "problem has neither a goal nor an expansion";
    UnknownName = "M028", Error, "undeclared name";
    FluentEquation = "M029", Error, "equation over fluents is unsupported";
    IncompatibleRedeclaration = "M030", Error, "incompatible predicate redeclaration";
    ProblemInit = "M031", Error, "problem needs a situation or an init list";
    HintNotNonprimitive = "M032", Error, "hint must be a nonprimitive action";
    InvalidSolution = "M033", Error, "malformed solution";
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A flagged problem in some input, anchored at the exact offending node.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub severity: Severity,
    pub description: String,
    #[serde(skip)]
    pub span: SourceSpan,
    #[serde(skip)]
    pub subject: SExpr,
    /// Set when the subject is not part of the read tree (a dropped `)`).
    #[serde(skip)]
    pub detached: bool,
}

impl Diagnostic {
    pub fn new(code: DiagCode, subject: &SExpr) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            description: code.text().to_string(),
            span: subject.span(),
            subject: subject.clone(),
            detached: false,
        }
    }

    /// Appends a detail word, e.g. the missing requirement flag.
    pub fn with_detail(mut self, detail: impl AsRef<str>) -> Self {
        let detail = detail.as_ref();
        debug_assert!(!detail.contains(": "), "detail would break the flag envelope");
        self.description.push(' ');
        self.description.push_str(detail);
        self
    }

    pub fn warning(mut self) -> Self {
        self.severity = Severity::Warning;
        self
    }

    pub fn detached(mut self) -> Self {
        self.detached = true;
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {}",
            self.span, self.code, self.description, self.subject
        )
    }
}

/// Count of (errors, warnings).
pub fn tally(diags: &[Diagnostic]) -> (usize, usize) {
    let errors = diags.iter().filter(|d| d.is_error()).count();
    (errors, diags.len() - errors)
}
