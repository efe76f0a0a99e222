use super::{EvalError, GroundAtom, State, Subst, Value, World};
use crate::numeric::NumericValue;
use crate::syntax::*;
use std::collections::{BTreeMap, BTreeSet};

/// Declared types of the variables in scope; `None` for implicit types.
pub type VarTypes = BTreeMap<String, Option<TypeExpr>>;

/// Scope entries for a typed variable list.
pub fn scope_of(vars: &TypedList<Name>) -> VarTypes {
    vars.declared()
        .map(|(v, t)| (v.canonical.clone(), t.cloned()))
        .collect()
}

/// Evaluates goals and expressions in one situation. Derived atoms are
/// materialized on construction, stratum by stratum.
pub struct Evaluator<'a> {
    pub world: &'a World<'a>,
    pub state: &'a State,
    derived: BTreeSet<GroundAtom>,
}

type Sols = Result<Vec<Subst>, EvalError>;

fn dedup(mut v: Vec<Subst>) -> Vec<Subst> {
    v.sort();
    v.dedup();
    v
}

impl<'a> Evaluator<'a> {
    pub fn new(world: &'a World<'a>, state: &'a State) -> Result<Evaluator<'a>, EvalError> {
        let mut ev = Evaluator {
            world,
            state,
            derived: BTreeSet::new(),
        };
        ev.derive_all()?;
        Ok(ev)
    }

    /// All derived atoms true in this situation.
    pub fn derived(&self) -> &BTreeSet<GroundAtom> {
        &self.derived
    }

    fn derive_all(&mut self) -> Result<(), EvalError> {
        let model = self.world.model;
        let mut negative = BTreeSet::new();
        for layer in model.strata.layers() {
            let axioms: Vec<_> = model
                .axioms
                .iter()
                .filter(|a| layer.contains(a.implies.atom.predicate.as_str()))
                .collect();
            loop {
                let mut fresh = BTreeSet::new();
                for ax in &axioms {
                    let scope = scope_of(&ax.vars);
                    for s in self.solutions(&ax.context, &Subst::new(), &scope)? {
                        let free: Vec<&str> = ax
                            .implies
                            .atom
                            .args
                            .iter()
                            .filter_map(|t| match t {
                                Term::Var(v) => Some(v.as_str()),
                                _ => None,
                            })
                            .collect();
                        for s in self.ground_vars(&free, &s, &scope)? {
                            let a = self.world.ground_atom(
                                ax.implies.atom.predicate.as_str(),
                                &ax.implies.atom.args,
                                &s,
                            )?;
                            if !ax.implies.positive {
                                negative.insert(a);
                            } else if !self.derived.contains(&a) {
                                fresh.insert(a);
                            }
                        }
                    }
                }
                if fresh.is_empty() {
                    break;
                }
                self.derived.extend(fresh);
            }
        }
        if let Some(a) = negative.iter().find(|a| self.derived.contains(*a)) {
            return Err(EvalError::DerivationConflict(a.to_string()));
        }
        Ok(())
    }

    /// Truth of a ground atom under the closed-world assumption.
    pub fn holds_atom(&self, a: &GroundAtom) -> bool {
        let model = self.world.model;
        if let Some(sig) = model.predicates.get(&a.predicate) {
            if sig.derived {
                return self.derived.contains(a);
            }
            return self.state.contains(a) || self.world.timeless_true.contains(a);
        }
        if model.types.contains(&a.predicate) && a.args.len() == 1 {
            return self.world.has_type(&a.args[0], &TypeExpr::named(&a.predicate))
                || self.derived.contains(a);
        }
        self.derived.contains(a)
    }

    /// Whether `gd` holds under `sigma` (free variables the goal itself can
    /// bind are existential).
    pub fn holds(&self, gd: &Gd, sigma: &Subst, scope: &VarTypes) -> Result<bool, EvalError> {
        Ok(!self.solutions(gd, sigma, scope)?.is_empty())
    }

    /// Every extension of `sigma` that makes `gd` true, binding the free
    /// variables the goal can generate.
    pub fn solutions(&self, gd: &Gd, sigma: &Subst, scope: &VarTypes) -> Sols {
        match &gd.kind {
            GdKind::Atom(a) => self.match_atom(a, sigma, scope),
            GdKind::Equal(x, y) => self.equal(x, y, sigma, scope),
            GdKind::Not(g) => {
                let free = names(g.free_variables());
                let mut out = Vec::new();
                for s in self.ground_vars(&free, sigma, scope)? {
                    if self.solutions(g, &s, scope)?.is_empty() {
                        out.push(s);
                    }
                }
                Ok(out)
            }
            GdKind::And(gs) => {
                let gs: Vec<&Gd> = gs.iter().collect();
                Ok(dedup(self.conj(&gs, sigma, scope)?))
            }
            GdKind::Or(gs) => {
                let mut out = Vec::new();
                for g in gs {
                    out.extend(self.solutions(g, sigma, scope)?);
                }
                Ok(dedup(out))
            }
            GdKind::Imply(a, b) => {
                let free = names(a.free_variables());
                let mut out = Vec::new();
                for s in self.ground_vars(&free, sigma, scope)? {
                    if self.solutions(a, &s, scope)?.is_empty() {
                        out.push(s);
                    } else {
                        out.extend(self.solutions(b, &s, scope)?);
                    }
                }
                Ok(dedup(out))
            }
            GdKind::Exists(vars, body) => {
                let (inner, inner_scope) = self.enter(vars, sigma, scope);
                let out = self
                    .solutions(body, &inner, &inner_scope)?
                    .into_iter()
                    .map(|s| restore(s, vars, sigma))
                    .collect();
                Ok(dedup(out))
            }
            GdKind::Forall(vars, body) => {
                let quantified: Vec<&str> = vars.items().map(Name::as_str).collect();
                let free: Vec<&str> = names(body.free_variables())
                    .into_iter()
                    .filter(|v| !quantified.contains(v))
                    .collect();
                let mut out = Vec::new();
                'outer: for s in self.ground_vars(&free, sigma, scope)? {
                    let (inner, inner_scope) = self.enter(vars, &s, scope);
                    for t in self.ground_vars(&quantified, &inner, &inner_scope)? {
                        if self.solutions(body, &t, &inner_scope)?.is_empty() {
                            continue 'outer;
                        }
                    }
                    out.push(s);
                }
                Ok(out)
            }
            GdKind::Builtin(b) => self.builtin(b, sigma, scope),
        }
    }

    /// Opens a quantifier: hides outer bindings of `vars` and declares them.
    fn enter(&self, vars: &TypedList<Name>, sigma: &Subst, scope: &VarTypes) -> (Subst, VarTypes) {
        let mut inner = sigma.clone();
        let mut inner_scope = scope.clone();
        for (v, t) in vars.declared() {
            inner.remove(v.as_str());
            inner_scope.insert(v.canonical.clone(), t.cloned());
        }
        (inner, inner_scope)
    }

    /// Extends `sigma` in every way that binds the unbound `vars`.
    pub fn ground_vars(&self, vars: &[&str], sigma: &Subst, scope: &VarTypes) -> Sols {
        let mut acc = vec![sigma.clone()];
        for &v in vars {
            if sigma.contains_key(v) {
                continue;
            }
            let Some(t) = scope.get(v) else {
                return Err(EvalError::Unbound(v.to_string()));
            };
            let values = self.world.universe(v, t.as_ref())?;
            acc = acc
                .into_iter()
                .flat_map(|s| {
                    values.iter().map(move |x| {
                        let mut s = s.clone();
                        s.insert(v.to_string(), x.clone());
                        s
                    })
                })
                .collect();
        }
        Ok(acc)
    }

    fn bind(&self, sigma: &Subst, var: &str, v: Value, scope: &VarTypes) -> Option<Subst> {
        if let Some(Some(t)) = scope.get(var) {
            if !self.world.has_type(&v, t) {
                return None;
            }
        }
        let mut s = sigma.clone();
        s.insert(var.to_string(), v);
        Some(s)
    }

    fn conj(&self, gs: &[&Gd], sigma: &Subst, scope: &VarTypes) -> Sols {
        let Some((idx, ready)) = gs
            .iter()
            .position(|g| self.required(g, sigma).is_empty())
            .map(|i| (i, true))
            .or_else(|| (!gs.is_empty()).then_some((0, false)))
        else {
            return Ok(vec![sigma.clone()]);
        };
        let g = gs[idx];
        let rest: Vec<&Gd> = gs.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, g)| *g).collect();
        let starts = if ready || matches!(g.kind, GdKind::Builtin(_)) {
            vec![sigma.clone()]
        } else {
            let req = self.required(g, sigma);
            let req: Vec<&str> = req.iter().map(String::as_str).collect();
            self.ground_vars(&req, sigma, scope)?
        };
        let mut out = Vec::new();
        for s in starts {
            for t in self.solutions(g, &s, scope)? {
                out.extend(self.conj(&rest, &t, scope)?);
            }
        }
        Ok(out)
    }

    /// Unbound variables `g` needs before it can be evaluated.
    fn required(&self, g: &Gd, sigma: &Subst) -> Vec<String> {
        let unbound = |vs: Vec<&Name>| -> Vec<String> {
            vs.into_iter()
                .filter(|v| !sigma.contains_key(v.as_str()))
                .map(|v| v.canonical.clone())
                .collect()
        };
        match &g.kind {
            GdKind::Atom(_) | GdKind::And(_) | GdKind::Or(_) | GdKind::Exists(..) => vec![],
            GdKind::Equal(a, b) => {
                let free = |t: &Term| matches!(t, Term::Var(v) if !sigma.contains_key(v.as_str()));
                if free(a) && free(b) {
                    unbound(g.free_variables())
                } else {
                    vec![]
                }
            }
            GdKind::Not(_) | GdKind::Imply(..) | GdKind::Forall(..) => unbound(g.free_variables()),
            GdKind::Builtin(b) => {
                let bindable = |e: &Expr| matches!(e, Expr::Var(v) if !sigma.contains_key(v.as_str()));
                match b {
                    Builtin::Eval { expr, value } | Builtin::FluentEval { expr, value } => {
                        let mut r = unbound(expr.variables());
                        if !bindable(value) {
                            r.extend(unbound(value.variables()));
                        }
                        r
                    }
                    Builtin::Test(e) | Builtin::FluentTest(e) => unbound(e.variables()),
                    Builtin::BoundedInt { var, low, high } => {
                        let mut r = unbound(low.variables());
                        r.extend(unbound(high.variables()));
                        if !bindable(var) {
                            r.extend(unbound(var.variables()));
                        }
                        r
                    }
                    Builtin::Equation { .. } => {
                        let mut u = unbound(g.free_variables());
                        u.sort();
                        u.dedup();
                        if u.len() <= 1 {
                            vec![]
                        } else {
                            u
                        }
                    }
                    Builtin::CurrentValue { fluent, .. } => match fluent {
                        Term::Var(v) if !sigma.contains_key(v.as_str()) => vec![v.canonical.clone()],
                        _ => vec![],
                    },
                }
            }
        }
    }

    fn match_atom(&self, a: &AtomicFormula, sigma: &Subst, scope: &VarTypes) -> Sols {
        let pattern: Vec<Result<Value, &str>> = a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => sigma.get(v.as_str()).cloned().ok_or(v.as_str()),
                t => Ok(self.world.ground_term(t, sigma).expect("ground")),
            })
            .collect();
        let p = a.predicate.as_str();
        if pattern.iter().all(Result::is_ok) {
            let g = GroundAtom {
                predicate: p.to_string(),
                args: pattern.into_iter().map(Result::unwrap).collect(),
            };
            return Ok(if self.holds_atom(&g) {
                vec![sigma.clone()]
            } else {
                vec![]
            });
        }
        let mut out = Vec::new();
        for cand in self.candidates(p, a.args.len()) {
            let mut s = sigma.clone();
            let mut ok = true;
            for (pat, val) in pattern.iter().zip(&cand.args) {
                match pat {
                    Ok(v) => ok = v == val,
                    Err(var) => match s.get(*var) {
                        Some(bound) => ok = bound == val,
                        None => match self.bind(&s, var, val.clone(), scope) {
                            Some(t) => s = t,
                            None => ok = false,
                        },
                    },
                }
                if !ok {
                    break;
                }
            }
            if ok {
                out.push(s);
            }
        }
        Ok(dedup(out))
    }

    /// Every true ground atom over `predicate` with the given arity.
    fn candidates(&self, predicate: &str, arity: usize) -> Vec<GroundAtom> {
        let from = GroundAtom {
            predicate: predicate.to_string(),
            args: vec![],
        };
        let sets = [&self.state.atoms, &self.world.timeless_true, &self.derived];
        let mut out: BTreeSet<GroundAtom> = sets
            .iter()
            .flat_map(|set| set.range(from.clone()..).take_while(|a| a.predicate == predicate))
            .filter(|a| a.args.len() == arity)
            .filter(|a| self.holds_atom(a))
            .cloned()
            .collect();
        let model = self.world.model;
        if arity == 1 && !model.predicates.contains_key(predicate) && model.types.contains(predicate) {
            let t = TypeExpr::named(predicate);
            out.extend(
                self.world
                    .objects
                    .keys()
                    .map(|o| Value::Object(o.clone()))
                    .filter(|v| self.world.has_type(v, &t))
                    .map(|v| GroundAtom {
                        predicate: predicate.to_string(),
                        args: vec![v],
                    }),
            );
        }
        out.into_iter().collect()
    }

    fn equal(&self, x: &Term, y: &Term, sigma: &Subst, scope: &VarTypes) -> Sols {
        let value = |t: &Term| self.world.ground_term(t, sigma).ok();
        match (value(x), value(y)) {
            (Some(a), Some(b)) => Ok(if a == b { vec![sigma.clone()] } else { vec![] }),
            (Some(a), None) => Ok(self.bind(sigma, var_name(y), a, scope).into_iter().collect()),
            (None, Some(b)) => Ok(self.bind(sigma, var_name(x), b, scope).into_iter().collect()),
            (None, None) => {
                let mut out = Vec::new();
                for s in self.ground_vars(&[var_name(x)], sigma, scope)? {
                    out.extend(self.equal(x, y, &s, scope)?);
                }
                Ok(out)
            }
        }
    }

    // ----- built-in goals -----

    fn builtin(&self, b: &Builtin, sigma: &Subst, scope: &VarTypes) -> Sols {
        let keep = |ok: bool| if ok { vec![sigma.clone()] } else { vec![] };
        match b {
            Builtin::Eval { expr, value } | Builtin::FluentEval { expr, value } => {
                let fluents = matches!(b, Builtin::FluentEval { .. });
                if let Some(v) = expr.variables().into_iter().find(|v| !sigma.contains_key(v.as_str())) {
                    return Err(EvalError::VariableInEval(v.canonical.clone()));
                }
                let got = self.eval(expr, sigma, fluents)?;
                self.unify_value(value, got, sigma, scope, fluents)
            }
            Builtin::Test(e) | Builtin::FluentTest(e) => {
                let fluents = matches!(b, Builtin::FluentTest(_));
                Ok(keep(self.test(e, sigma, fluents)?))
            }
            Builtin::BoundedInt { var, low, high } => {
                let lo = self.eval(low, sigma, false)?.as_f64().ceil();
                let hi = self.eval(high, sigma, false)?.as_f64().floor();
                if let Expr::Var(v) = var {
                    if !sigma.contains_key(v.as_str()) {
                        if lo > hi {
                            return Ok(vec![]);
                        }
                        return Ok((lo as i64..=hi as i64)
                            .filter_map(|i| {
                                self.bind(sigma, v.as_str(), Value::Number(i.into()), scope)
                            })
                            .collect());
                    }
                }
                let x = self.eval(var, sigma, false)?;
                let integral = x.as_integer().is_some();
                Ok(keep(integral && x.as_f64() >= lo && x.as_f64() <= hi))
            }
            Builtin::Equation { lhs, rhs } => self.equation(lhs, rhs, sigma, scope),
            Builtin::CurrentValue { fluent, value } => {
                let f = self.world.ground_term(fluent, sigma)?;
                let Value::Object(f) = f else {
                    return Err(EvalError::NotAFluent(f.to_string()));
                };
                if !self.world.is_fluent(&f, self.state) {
                    return Err(EvalError::NotAFluent(f));
                }
                let current = self.world.fluent_value(&f, self.state)?;
                match value {
                    Term::Var(v) if !sigma.contains_key(v.as_str()) => {
                        Ok(self.bind(sigma, v.as_str(), Value::Number(current), scope).into_iter().collect())
                    }
                    t => Ok(keep(self.world.ground_term(t, sigma)? == Value::Number(current))),
                }
            }
        }
    }

    fn unify_value(
        &self,
        target: &Expr,
        got: NumericValue,
        sigma: &Subst,
        scope: &VarTypes,
        fluents: bool,
    ) -> Sols {
        if let Expr::Var(v) = target {
            if !sigma.contains_key(v.as_str()) {
                return Ok(self.bind(sigma, v.as_str(), Value::Number(got), scope).into_iter().collect());
            }
        }
        let want = self.eval(target, sigma, fluents)?;
        Ok(if want == got { vec![sigma.clone()] } else { vec![] })
    }

    fn equation(&self, lhs: &Expr, rhs: &Expr, sigma: &Subst, scope: &VarTypes) -> Sols {
        for e in [lhs, rhs] {
            for v in e.variables() {
                if let Some(Value::Object(o)) = sigma.get(v.as_str()) {
                    if self.world.is_fluent(o, self.state) {
                        return Err(EvalError::FluentEquation);
                    }
                }
            }
        }
        let mut unknown: Vec<&Name> = lhs
            .variables()
            .into_iter()
            .chain(rhs.variables())
            .filter(|v| !sigma.contains_key(v.as_str()))
            .collect();
        let occurrences = unknown.len();
        unknown.sort();
        unknown.dedup();
        match unknown.as_slice() {
            [] => Ok(if self.eval(lhs, sigma, false)? == self.eval(rhs, sigma, false)? {
                vec![sigma.clone()]
            } else {
                vec![]
            }),
            [x] => {
                if occurrences > 1 {
                    return Err(EvalError::EquationUnsolvable(x.canonical.clone()));
                }
                let (with, other) = if lhs.variables().contains(x) {
                    (lhs, rhs)
                } else {
                    (rhs, lhs)
                };
                let target = self.eval(other, sigma, false)?;
                let Some(v) = self.invert(with, target, x, sigma)? else {
                    return Ok(vec![]);
                };
                let Some(s) = self.bind(sigma, x.as_str(), Value::Number(v), scope) else {
                    return Ok(vec![]);
                };
                // Inversion through division can round; keep only exact roots.
                if self.eval(lhs, &s, false)? == self.eval(rhs, &s, false)? {
                    Ok(vec![s])
                } else {
                    Ok(vec![])
                }
            }
            _ => Err(EvalError::EquationUnderdetermined),
        }
    }

    /// Solves `e = target` for the single unknown `x`, which occurs once in
    /// `e`. `None` when no value works.
    fn invert(
        &self,
        e: &Expr,
        target: NumericValue,
        x: &Name,
        sigma: &Subst,
    ) -> Result<Option<NumericValue>, EvalError> {
        let Expr::Arith { op, args, .. } = e else {
            return match e {
                Expr::Var(v) if v == x => Ok(Some(target)),
                _ => Err(EvalError::EquationUnsolvable(x.canonical.clone())),
            };
        };
        let k = args
            .iter()
            .position(|a| a.variables().contains(&x))
            .expect("unknown occurs in expression");
        let mut others = Vec::new();
        for (i, a) in args.iter().enumerate() {
            if i != k {
                others.push(self.eval(a, sigma, false)?);
            }
        }
        let sum = |vs: &[NumericValue]| vs.iter().fold(NumericValue::Int(0), |a, b| a + *b);
        let product = |vs: &[NumericValue]| vs.iter().fold(NumericValue::Int(1), |a, b| a * *b);
        let inner = match op {
            ArithOp::Add => target - sum(&others),
            ArithOp::Sub if args.len() == 1 => -target,
            ArithOp::Sub if k == 0 => target + sum(&others),
            ArithOp::Sub => others[0] - target - sum(&others[1..]),
            ArithOp::Mul => {
                let p = product(&others);
                if p.is_zero() {
                    return Ok(None);
                }
                target.checked_div(p)?
            }
            ArithOp::Div if args.len() == 1 => {
                if target.is_zero() {
                    return Ok(None);
                }
                NumericValue::Int(1).checked_div(target)?
            }
            ArithOp::Div if k == 0 => target * product(&others),
            ArithOp::Div => {
                let d = target * product(&others[1..]);
                if d.is_zero() {
                    return Ok(None);
                }
                others[0].checked_div(d)?
            }
        };
        self.invert(&args[k], inner, x, sigma)
    }

    // ----- expressions -----

    /// Evaluates an expression. With `fluents`, fluent objects evaluate to
    /// their current values; otherwise mentioning one is an error.
    pub fn eval(&self, e: &Expr, sigma: &Subst, fluents: bool) -> Result<NumericValue, EvalError> {
        match e {
            Expr::Number(n) => Ok(n.value),
            Expr::Var(v) => match sigma.get(v.as_str()) {
                Some(Value::Number(n)) => Ok(*n),
                Some(Value::Object(o)) => self.object_value(o, fluents),
                None => Err(EvalError::Unbound(v.canonical.clone())),
            },
            Expr::Name(n) => match self.world.domain_vars.get(n.as_str()) {
                Some(Value::Number(x)) => Ok(*x),
                Some(Value::Object(o)) => self.object_value(o, fluents),
                None if self.world.objects.contains_key(n.as_str()) => {
                    self.object_value(n.as_str(), fluents)
                }
                None => Err(EvalError::UnknownName(n.canonical.clone())),
            },
            Expr::Arith { op, args, .. } => {
                let vals = args
                    .iter()
                    .map(|a| self.eval(a, sigma, fluents))
                    .collect::<Result<Vec<_>, _>>()?;
                let (first, rest) = vals.split_first().expect("arithmetic has arguments");
                Ok(match (op, rest.is_empty()) {
                    (ArithOp::Sub, true) => -*first,
                    (ArithOp::Div, true) => NumericValue::Int(1).checked_div(*first)?,
                    (ArithOp::Add, _) => rest.iter().fold(*first, |a, b| a + *b),
                    (ArithOp::Sub, _) => rest.iter().fold(*first, |a, b| a - *b),
                    (ArithOp::Mul, _) => rest.iter().fold(*first, |a, b| a * *b),
                    (ArithOp::Div, _) => {
                        let mut acc = *first;
                        for b in rest {
                            acc = acc.checked_div(*b)?;
                        }
                        acc
                    }
                })
            }
            Expr::Compare { .. } => Err(EvalError::NotNumeric(format!("{e:?}"))),
            Expr::Sum {
                vars,
                condition,
                body,
                ..
            } => self.sum(vars, condition, body, sigma),
        }
    }

    fn object_value(&self, o: &str, fluents: bool) -> Result<NumericValue, EvalError> {
        if !self.world.is_fluent(o, self.state) {
            return Err(EvalError::NotNumeric(o.to_string()));
        }
        if !fluents {
            return Err(EvalError::FluentOutsideFluentContext(o.to_string()));
        }
        self.world.fluent_value(o, self.state)
    }

    /// Evaluates a comparison.
    pub fn test(&self, e: &Expr, sigma: &Subst, fluents: bool) -> Result<bool, EvalError> {
        let Expr::Compare { op, lhs, rhs, .. } = e else {
            return Err(EvalError::NotNumeric(format!("{e:?}")));
        };
        let a = self.eval(lhs, sigma, fluents)?;
        let b = self.eval(rhs, sigma, fluents)?;
        Ok(match op {
            CmpOp::Eq => a == b,
            CmpOp::Lt => a < b,
            CmpOp::Gt => a > b,
            CmpOp::Le => a <= b,
            CmpOp::Ge => a >= b,
        })
    }

    /// `(sum vars p e)`: the total of `e` over every binding of `vars` that
    /// makes `p` true. `e` is a fluent-evaluation context.
    pub fn sum(
        &self,
        vars: &TypedList<Name>,
        condition: &Gd,
        body: &Expr,
        sigma: &Subst,
    ) -> Result<NumericValue, EvalError> {
        let scope = scope_of(vars);
        let (inner, inner_scope) = self.enter(vars, sigma, &scope);
        let own: Vec<&str> = vars.items().map(Name::as_str).collect();
        let mut total = NumericValue::Int(0);
        let mut seen = BTreeSet::new();
        for s in self.solutions(condition, &inner, &inner_scope)? {
            for s in self.ground_vars(&own, &s, &inner_scope)? {
                let key: Vec<Option<Value>> = own.iter().map(|v| s.get(*v).cloned()).collect();
                if seen.insert(key) {
                    total = total + self.eval(body, &s, true)?;
                }
            }
        }
        Ok(total)
    }
}

fn names(vs: Vec<&Name>) -> Vec<&str> {
    vs.into_iter().map(Name::as_str).collect()
}

fn var_name(t: &Term) -> &str {
    match t {
        Term::Var(v) => v.as_str(),
        _ => unreachable!("only variables can be unbound"),
    }
}

/// Drops the bindings of quantified `vars`, restoring any outer ones.
fn restore(mut s: Subst, vars: &TypedList<Name>, outer: &Subst) -> Subst {
    for v in vars.items() {
        match outer.get(v.as_str()) {
            Some(x) => s.insert(v.canonical.clone(), x.clone()),
            None => s.remove(v.as_str()),
        };
    }
    s
}
