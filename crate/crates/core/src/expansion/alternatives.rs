use crate::model::{ActionSchema, Method};
use crate::syntax::{ActionBody, ActionSpec, ContextConditions, Expansion, Gd, Name, SpecKind, TypedList};

/// One way to expand a nonprimitive action: its own `:expansion` or one of
/// its methods, as a spec over `params`.
#[derive(Debug, Clone)]
pub struct Alternative {
    /// The method name; the action's own expansion is named after the action.
    pub name: String,
    pub params: TypedList<Name>,
    pub spec: ActionSpec,
}

/// `:vars` become a `forsome`; `:precondition` and `:maintain` become an
/// `in-context` around the expansion.
fn wrap(spec: &ActionSpec, vars: Option<&TypedList<Name>>, pre: Option<&Gd>, maintain: Option<&Gd>) -> ActionSpec {
    let mut s = spec.clone();
    if pre.is_some() || maintain.is_some() {
        s = ActionSpec::new(
            SpecKind::InContext {
                body: Box::new(s),
                conditions: ContextConditions {
                    precondition: pre.cloned(),
                    maintain: maintain.cloned(),
                    effect: None,
                },
            },
            spec.span,
        );
    }
    if let Some(vars) = vars.filter(|v| !v.is_empty()) {
        s = ActionSpec::new(
            SpecKind::Forsome {
                vars: vars.clone(),
                body: Box::new(s),
            },
            spec.span,
        );
    }
    s
}

fn from_body(name: String, params: &TypedList<Name>, body: &ActionBody) -> Option<Alternative> {
    let Some(Expansion::Spec(spec)) = &body.expansion else {
        return None;
    };
    Some(Alternative {
        name,
        params: params.clone(),
        spec: wrap(spec, body.vars.as_ref(), body.precondition.as_ref(), body.maintain.as_ref()),
    })
}

/// Every expansion of `action`, own expansion first, then methods in
/// declaration order.
pub fn alternatives(action: &ActionSchema) -> Vec<Alternative> {
    let mut out = Vec::new();
    if let Some(Expansion::Spec(spec)) = &action.expansion {
        out.push(Alternative {
            name: action.name.canonical.clone(),
            params: action.params.clone(),
            spec: wrap(
                spec,
                Some(&action.vars),
                action.precondition.as_ref(),
                action.maintain.as_ref(),
            ),
        });
    }
    for Method { name, params, body, .. } in &action.methods {
        let label = name
            .as_ref()
            .map_or_else(|| action.name.canonical.clone(), |n| n.canonical.clone());
        out.extend(from_body(label, params, body));
    }
    out
}
