use super::GroundAction;
use crate::diagnostics::{DiagCode, Diagnostic};
use crate::model::DomainModel;
use crate::state::Value;
use crate::syntax::{read_str, AtomKind, FileId, SExpr};

/// A plan plus optional expansion hints.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Solution {
    pub steps: Vec<GroundAction>,
    pub hints: Vec<GroundAction>,
}

fn ground(e: &SExpr) -> Result<GroundAction, Diagnostic> {
    let bad = || Diagnostic::new(DiagCode::InvalidSolution, e);
    let items = e.as_list().ok_or_else(bad)?;
    let (head, rest) = items.split_first().ok_or_else(bad)?;
    let functor = head.atom_text(AtomKind::Name).ok_or_else(bad)?;
    let mut args = Vec::new();
    for a in rest {
        if let Some(n) = a.atom_text(AtomKind::Name) {
            args.push(Value::object(n));
        } else if let Some(n) = a.atom_text(AtomKind::Number) {
            let v = crate::numeric::NumericValue::parse(n).ok_or_else(|| Diagnostic::new(DiagCode::InvalidSolution, a))?;
            args.push(Value::Number(v));
        } else {
            return Err(Diagnostic::new(DiagCode::InvalidSolution, a));
        }
    }
    Ok(GroundAction {
        functor: functor.to_ascii_lowercase(),
        args,
        span: Some(e.span()),
    })
}

fn action_list(e: &SExpr, diags: &mut Vec<Diagnostic>) -> Vec<GroundAction> {
    let Some(items) = e.as_list() else {
        diags.push(Diagnostic::new(DiagCode::InvalidSolution, e));
        return Vec::new();
    };
    items
        .iter()
        .filter_map(|s| ground(s).map_err(|d| diags.push(d)).ok())
        .collect()
}

/// Reads `(step ...)` optionally followed by a list of hints.
pub fn parse_solution(text: &str, file: FileId) -> (Solution, Vec<Diagnostic>) {
    let (forms, mut diags) = read_str(text, file);
    let mut sol = Solution::default();
    match forms.as_slice() {
        [] => diags.push(Diagnostic::new(DiagCode::InvalidSolution, &SExpr::synthetic_atom("")).detached()),
        [steps, rest @ ..] => {
            sol.steps = action_list(steps, &mut diags);
            if let Some(hints) = rest.first() {
                sol.hints = action_list(hints, &mut diags);
            }
            for extra in rest.iter().skip(1) {
                diags.push(Diagnostic::new(DiagCode::InvalidSolution, extra));
            }
        }
    }
    (sol, diags)
}

/// Reads a separate hints file: one list of action terms.
pub fn parse_hints(text: &str, file: FileId) -> (Vec<GroundAction>, Vec<Diagnostic>) {
    let (forms, mut diags) = read_str(text, file);
    let mut hints = Vec::new();
    for (i, f) in forms.iter().enumerate() {
        if i == 0 {
            hints = action_list(f, &mut diags);
        } else {
            diags.push(Diagnostic::new(DiagCode::InvalidSolution, f));
        }
    }
    (hints, diags)
}

/// Hints must name nonprimitive actions of the domain. `text` is the file
/// the hints were read from.
pub fn check_hints(model: &DomainModel, hints: &[GroundAction], text: &str, file: FileId) -> Vec<Diagnostic> {
    let (forms, _) = read_str(text, file);
    let terms: Vec<&SExpr> = forms.iter().filter_map(SExpr::as_list).flatten().collect();
    hints
        .iter()
        .filter(|h| model.actions.get(&h.functor).is_none_or(|a| a.is_primitive()))
        .map(|h| {
            let at = terms
                .iter()
                .find(|f| h.span.is_some_and(|s| s.same_range(&f.span())))
                .map(|f| (*f).clone())
                .unwrap_or_else(|| SExpr::synthetic_atom(&h.to_string()));
            Diagnostic::new(DiagCode::HintNotNonprimitive, &at)
        })
        .collect()
}
