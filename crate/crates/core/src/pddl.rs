//! A small PDDL subset: typed objects, predicates, an initial state with the
//! numeric fluents `t-elapsed` and `(ts <obj>)`, a conjunctive goal with an
//! elapsed-time bound, and STRIPS actions whose effect may increase
//! `t-elapsed` by `(ts ?x)` or `(max (ts ?x) (ts ?y) ...)`.
//!
//! Both the merged layout (one `(define (problem ...))` carrying predicates
//! and actions) and the usual split into domain and problem files are
//! accepted. The printer always writes the merged layout.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::expr::{Comparator, DurationExpr};
use crate::scalar::Scalar;
use crate::sexpr::{write_pretty, SExpr};
use crate::syntax;

pub const ELAPSED: &str = "t-elapsed";
pub const CROSSING_TIME: &str = "ts";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PddlError {
    #[error("missing section {0}")]
    MissingSection(String),
    #[error("section {0} appears more than once")]
    DuplicateSection(String),
    #[error("undeclared object `{0}`")]
    UndeclaredObject(String),
    #[error("object `{0}` declared twice")]
    DuplicateObject(String),
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("predicate `{pred}` takes {expected} arguments, found {found}")]
    ArityMismatch { pred: String, expected: usize, found: usize },
    #[error("action `{action}` uses undeclared variable `{var}`")]
    UndeclaredVariable { action: String, var: String },
    #[error("fluent `{0}` assigned more than once")]
    DuplicateFluent(String),
    #[error("object `{0}` has no crossing time")]
    MissingFluent(String),
    #[error("goal has no literals")]
    EmptyGoal,
    #[error("problem refers to domain `{problem}` but the domain is `{domain}`")]
    DomainMismatch { problem: String, domain: String },
    #[error("malformed {section}: {detail}")]
    Malformed { section: String, detail: String },
}

fn malformed(section: &str) -> impl Fn(String) -> PddlError + '_ {
    move |detail| PddlError::Malformed { section: section.to_string(), detail }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedObject {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedVar {
    pub name: String,
    pub ty: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredSig {
    pub name: String,
    pub params: Vec<TypedVar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(pred: &str, args: &[&str]) -> Self {
        Literal { positive: true, atom: Atom { pred: pred.into(), args: args.iter().map(|a| a.to_string()).collect() } }
    }

    pub fn neg(pred: &str, args: &[&str]) -> Self {
        Literal { positive: false, ..Self::pos(pred, args) }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", literal_sexpr(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InitState<T> {
    pub literals: Vec<Literal>,
    /// Initial value of `t-elapsed`.
    pub elapsed: T,
    /// `(ts obj)` crossing times, in source order.
    pub ts: Vec<(String, T)>,
}

impl<T: Scalar> InitState<T> {
    pub fn ts_of(&self, obj: &str) -> Option<T> {
        self.ts.iter().find(|(o, _)| o == obj).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeConstraint<T> {
    pub cmp: Comparator,
    pub bound: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GoalSpec<T> {
    pub literals: Vec<Literal>,
    pub time_constraint: Option<TimeConstraint<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PddlAction {
    pub name: String,
    pub params: Vec<TypedVar>,
    pub precondition: Vec<Literal>,
    pub effect: Vec<Literal>,
    /// Increment of `t-elapsed`, over `(ts ?var)` terms.
    pub time_effect: Option<DurationExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PddlModel<T> {
    pub problem_name: String,
    pub domain_name: String,
    pub objects: Vec<TypedObject>,
    pub predicates: Vec<PredSig>,
    pub init: InitState<T>,
    pub goal: GoalSpec<T>,
    pub actions: Vec<PddlAction>,
}

impl<T> PddlModel<T> {
    pub fn object(&self, name: &str) -> Option<&TypedObject> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&PddlAction> {
        self.actions.iter().find(|a| a.name == name)
    }
}

// ---------------------------------------------------------------- parsing

#[derive(Default)]
struct Sections<'a> {
    problem_name: Option<String>,
    domain_ref: Option<String>,
    domain_name: Option<String>,
    objects: Option<&'a [SExpr]>,
    predicates: Option<&'a [SExpr]>,
    init: Option<&'a [SExpr]>,
    goal: Option<&'a [SExpr]>,
    actions: Vec<&'a [SExpr]>,
}

fn set_once<'a>(slot: &mut Option<&'a [SExpr]>, name: &str, body: &'a [SExpr]) -> Result<(), PddlError> {
    if slot.replace(body).is_some() {
        return Err(PddlError::DuplicateSection(format!(":{name}")));
    }
    Ok(())
}

fn collect_sections(forms: &[SExpr]) -> Result<Sections<'_>, PddlError> {
    let mut s = Sections::default();
    for form in forms {
        let items = match form.as_list() {
            Some(items) if form.head() == Some("define") => &items[1..],
            _ => return Err(malformed("file")(format!("expected (define ...), found `{form}`"))),
        };
        let (header, body) = items.split_first().ok_or_else(|| malformed("define")("empty define".into()))?;
        match syntax::list(header).map_err(malformed("define"))? {
            [kind, name] if kind.as_symbol() == Some("problem") => {
                if s.problem_name.is_some() {
                    return Err(PddlError::DuplicateSection("problem".into()));
                }
                s.problem_name = Some(syntax::symbol(name).map_err(malformed("define"))?.to_string());
            }
            [kind, name] if kind.as_symbol() == Some("domain") => {
                if s.domain_name.is_some() {
                    return Err(PddlError::DuplicateSection("domain".into()));
                }
                s.domain_name = Some(syntax::symbol(name).map_err(malformed("define"))?.to_string());
            }
            _ => return Err(malformed("define")(format!("unknown header `{header}`"))),
        }
        for section in body {
            let parts = syntax::list(section).map_err(malformed("define"))?;
            let (key, rest) = parts.split_first().ok_or_else(|| malformed("define")("empty section".into()))?;
            let key = key
                .as_keyword()
                .ok_or_else(|| malformed("define")(format!("expected a :section, found `{section}`")))?;
            match key {
                "domain" => match rest {
                    [name] => s.domain_ref = Some(syntax::symbol(name).map_err(malformed(":domain"))?.to_string()),
                    _ => return Err(malformed(":domain")("expected one name".into())),
                },
                "objects" => set_once(&mut s.objects, key, rest)?,
                "predicates" => set_once(&mut s.predicates, key, rest)?,
                "init" => set_once(&mut s.init, key, rest)?,
                "goal" => set_once(&mut s.goal, key, rest)?,
                "action" => s.actions.push(rest),
                // declarations this subset does not need
                "requirements" | "types" | "functions" => {}
                other => return Err(malformed("define")(format!("unsupported section :{other}"))),
            }
        }
    }
    Ok(s)
}

struct Scope<'m> {
    objects: &'m HashMap<String, String>,
    predicates: &'m HashMap<String, usize>,
}

impl Scope<'_> {
    fn literal(&self, e: &SExpr, vars: Option<(&str, &HashSet<String>)>) -> Result<Literal, PddlError> {
        let (positive, atom) = match e.as_list() {
            Some([not, inner]) if not.as_symbol() == Some("not") => (false, inner),
            _ => (true, e),
        };
        let items = syntax::list(atom).map_err(malformed("literal"))?;
        let (pred, args) = items.split_first().ok_or_else(|| malformed("literal")("empty literal".into()))?;
        let pred = syntax::symbol(pred).map_err(malformed("literal"))?.to_string();
        let args = args
            .iter()
            .map(|a| syntax::symbol(a).map(str::to_string))
            .collect::<Result<Vec<_>, _>>()
            .map_err(malformed("literal"))?;
        let expected = *self.predicates.get(&pred).ok_or_else(|| PddlError::UndeclaredPredicate(pred.clone()))?;
        if expected != args.len() {
            return Err(PddlError::ArityMismatch { pred, expected, found: args.len() });
        }
        for a in &args {
            self.term(a, vars)?;
        }
        Ok(Literal { positive, atom: Atom { pred, args } })
    }

    fn term(&self, a: &str, vars: Option<(&str, &HashSet<String>)>) -> Result<(), PddlError> {
        match vars {
            Some((action, vars)) if syntax::is_var(a) => {
                if !vars.contains(a) {
                    return Err(PddlError::UndeclaredVariable { action: action.into(), var: a.into() });
                }
            }
            _ if !self.objects.contains_key(a) => return Err(PddlError::UndeclaredObject(a.into())),
            _ => {}
        }
        Ok(())
    }
}

/// Items of `(and a b ...)`, or the single item itself.
fn conjuncts(e: &SExpr) -> &[SExpr] {
    match e.as_list() {
        Some([head, rest @ ..]) if head.as_symbol() == Some("and") => rest,
        _ => std::slice::from_ref(e),
    }
}

fn is_elapsed(e: &SExpr) -> bool {
    match e {
        SExpr::Symbol(s) => s == ELAPSED,
        SExpr::List(items) => matches!(items.as_slice(), [s] if s.as_symbol() == Some(ELAPSED)),
        _ => false,
    }
}

/// `(<= (t-elapsed) N)`, `(<= t-elapsed N)` or `((<= t-elapsed) N)`.
fn time_constraint<T: Scalar>(e: &SExpr) -> Option<Result<TimeConstraint<T>, String>> {
    let items = e.as_list()?;
    let (cmp, bound) = match items {
        [cmp, subject, bound] if is_elapsed(subject) => (cmp.as_symbol()?, bound),
        [SExpr::List(inner), bound] => match inner.as_slice() {
            [cmp, subject] if is_elapsed(subject) => (cmp.as_symbol()?, bound),
            _ => return None,
        },
        _ => return None,
    };
    let cmp = Comparator::parse(cmp)?;
    Some(syntax::number(bound).map(|bound| TimeConstraint { cmp, bound }))
}

/// `(ts ?x)` or `(max (ts ?x) (ts ?y))`, returning the `?x` names.
fn time_term(e: &SExpr) -> Result<DurationExpr, String> {
    let ts_var = |e: &SExpr| -> Result<String, String> {
        match e.as_list() {
            Some([f, v]) if f.as_symbol() == Some(CROSSING_TIME) => Ok(syntax::symbol(v)?.to_string()),
            _ => Err(format!("expected ({CROSSING_TIME} ?var), found `{e}`")),
        }
    };
    match e.as_list() {
        Some([head, args @ ..]) if head.as_symbol() == Some("max") && !args.is_empty() => {
            Ok(DurationExpr::Max(args.iter().map(ts_var).collect::<Result<_, _>>()?))
        }
        _ => Ok(DurationExpr::Single(ts_var(e)?)),
    }
}

/// `(increase (t-elapsed) X)` or the shorthand `(+ (t-elapsed X))`.
fn time_effect(e: &SExpr) -> Option<Result<DurationExpr, String>> {
    match e.as_list()? {
        [head, target, amount] if head.as_symbol() == Some("increase") && is_elapsed(target) => Some(time_term(amount)),
        [head, inner] if head.as_symbol() == Some("+") => match inner.as_list()? {
            [target, amount] if target.as_symbol() == Some(ELAPSED) => Some(time_term(amount)),
            _ => None,
        },
        _ => None,
    }
}

/// Parses one merged file, or a domain file plus a problem file.
pub fn parse_pddl<T: Scalar>(forms: &[SExpr]) -> Result<PddlModel<T>, PddlError> {
    let s = collect_sections(forms)?;
    let problem_name = s.problem_name.ok_or_else(|| PddlError::MissingSection("problem".into()))?;
    let domain_name = match (s.domain_name, s.domain_ref) {
        (Some(d), Some(r)) if d != r => return Err(PddlError::DomainMismatch { problem: r, domain: d }),
        (Some(d), _) | (None, Some(d)) => d,
        (None, None) => return Err(PddlError::MissingSection(":domain".into())),
    };
    let objects_src = s.objects.ok_or_else(|| PddlError::MissingSection(":objects".into()))?;
    let init_src = s.init.ok_or_else(|| PddlError::MissingSection(":init".into()))?;
    let goal_src = s.goal.ok_or_else(|| PddlError::MissingSection(":goal".into()))?;

    let mut objects = Vec::new();
    let mut object_types = HashMap::new();
    for (name, ty) in syntax::typed_list(objects_src).map_err(malformed(":objects"))? {
        if syntax::is_var(&name) {
            return Err(malformed(":objects")(format!("`{name}` is a variable")));
        }
        let ty = ty.unwrap_or_else(|| "object".to_string());
        if object_types.insert(name.clone(), ty.clone()).is_some() {
            return Err(PddlError::DuplicateObject(name));
        }
        objects.push(TypedObject { name, ty });
    }

    let mut predicates = Vec::new();
    let mut arity = HashMap::new();
    for p in s.predicates.unwrap_or_default() {
        let items = syntax::list(p).map_err(malformed(":predicates"))?;
        let (name, params) = items.split_first().ok_or_else(|| malformed(":predicates")("empty predicate".into()))?;
        let name = syntax::symbol(name).map_err(malformed(":predicates"))?.to_string();
        let params: Vec<TypedVar> = syntax::typed_list(params)
            .map_err(malformed(":predicates"))?
            .into_iter()
            .map(|(name, ty)| TypedVar { name, ty })
            .collect();
        arity.insert(name.clone(), params.len());
        predicates.push(PredSig { name, params });
    }
    let scope = Scope { objects: &object_types, predicates: &arity };

    let init = parse_init(&scope, init_src)?;
    let goal = match goal_src {
        [g] => parse_goal(&scope, g)?,
        _ => return Err(malformed(":goal")("expected one goal formula".into())),
    };
    let actions = s.actions.iter().map(|a| parse_action(&scope, a)).collect::<Result<Vec<_>, _>>()?;

    // every object of a timed type needs exactly one crossing time
    let timed_types: HashSet<&str> =
        init.ts.iter().filter_map(|(o, _)| object_types.get(o).map(String::as_str)).collect();
    for o in &objects {
        if timed_types.contains(o.ty.as_str()) && init.ts_of(&o.name).is_none() {
            return Err(PddlError::MissingFluent(o.name.clone()));
        }
    }

    Ok(PddlModel { problem_name, domain_name, objects, predicates, init, goal, actions })
}

fn parse_init<T: Scalar>(scope: &Scope, items: &[SExpr]) -> Result<InitState<T>, PddlError> {
    let mut literals = Vec::new();
    let mut elapsed = None;
    let mut ts = Vec::new();
    let mut seen_ts = HashSet::new();
    for item in items {
        match item.as_list() {
            Some([eq, fluent, value]) if eq.as_symbol() == Some("=") => {
                let value: T = syntax::number(value).map_err(malformed(":init"))?;
                if is_elapsed(fluent) {
                    if elapsed.replace(value).is_some() {
                        return Err(PddlError::DuplicateFluent(ELAPSED.into()));
                    }
                    continue;
                }
                match fluent.as_list() {
                    Some([f, obj]) if f.as_symbol() == Some(CROSSING_TIME) => {
                        let obj = syntax::symbol(obj).map_err(malformed(":init"))?;
                        scope.term(obj, None)?;
                        if !seen_ts.insert(obj.to_string()) {
                            return Err(PddlError::DuplicateFluent(format!("({CROSSING_TIME} {obj})")));
                        }
                        ts.push((obj.to_string(), value));
                    }
                    _ => return Err(malformed(":init")(format!("unsupported fluent `{fluent}`"))),
                }
            }
            _ => literals.push(scope.literal(item, None)?),
        }
    }
    let elapsed = elapsed.ok_or_else(|| malformed(":init")(format!("({ELAPSED}) is not initialised")))?;
    Ok(InitState { literals, elapsed, ts })
}

fn parse_goal<T: Scalar>(scope: &Scope, goal: &SExpr) -> Result<GoalSpec<T>, PddlError> {
    let mut literals = Vec::new();
    let mut time = None;
    for item in conjuncts(goal) {
        match time_constraint::<T>(item) {
            Some(tc) => {
                if time.replace(tc.map_err(malformed(":goal"))?).is_some() {
                    return Err(malformed(":goal")("more than one time constraint".into()));
                }
            }
            None => literals.push(scope.literal(item, None)?),
        }
    }
    if literals.is_empty() {
        return Err(PddlError::EmptyGoal);
    }
    Ok(GoalSpec { literals, time_constraint: time })
}

fn parse_action(scope: &Scope, items: &[SExpr]) -> Result<PddlAction, PddlError> {
    let (name, rest) = items.split_first().ok_or_else(|| malformed(":action")("missing name".into()))?;
    let name = syntax::symbol(name).map_err(malformed(":action"))?.to_string();
    let section = format!(":action {name}");
    let err = malformed(&section);
    let mut params = Vec::new();
    let mut precondition = Vec::new();
    let mut effect = Vec::new();
    let mut time = None;
    let mut var_set = HashSet::new();
    let sections = syntax::keyword_sections(rest);
    // parameters first so that literals can be checked against them
    for (key, values) in &sections {
        if *key == "parameters" {
            let [list] = values else { return Err(err("expected one parameter list".into())) };
            let entries = syntax::typed_list(syntax::list(list).map_err(&err)?).map_err(&err)?;
            for (var, ty) in entries {
                if !syntax::is_var(&var) || !var_set.insert(var.clone()) {
                    return Err(err(format!("bad or repeated parameter `{var}`")));
                }
                params.push(TypedVar { name: var, ty });
            }
        }
    }
    let vars = Some((name.as_str(), &var_set));
    for (key, values) in &sections {
        match *key {
            "parameters" => {}
            "precondition" => {
                let [p] = values else { return Err(err("expected one precondition".into())) };
                for c in conjuncts(p) {
                    precondition.push(scope.literal(c, vars)?);
                }
            }
            "effect" => {
                let [e] = values else { return Err(err("expected one effect".into())) };
                for c in conjuncts(e) {
                    match time_effect(c) {
                        Some(t) => {
                            let t = t.map_err(&err)?;
                            if let Some(v) = t.vars().iter().find(|v| !var_set.contains(*v)) {
                                return Err(PddlError::UndeclaredVariable { action: name.clone(), var: v.clone() });
                            }
                            if time.replace(t).is_some() {
                                return Err(err("more than one time effect".into()));
                            }
                        }
                        None => effect.push(scope.literal(c, vars)?),
                    }
                }
            }
            other => return Err(err(format!("unsupported key :{other}"))),
        }
    }
    Ok(PddlAction { name, params, precondition, effect, time_effect: time })
}

// --------------------------------------------------------------- printing

fn sym(s: &str) -> SExpr {
    SExpr::sym(s)
}

fn literal_sexpr(l: &Literal) -> SExpr {
    let atom = SExpr::list(std::iter::once(sym(&l.atom.pred)).chain(l.atom.args.iter().map(|a| sym(a))));
    if l.positive {
        atom
    } else {
        SExpr::list([sym("not"), atom])
    }
}

fn elapsed_sexpr() -> SExpr {
    SExpr::list([sym(ELAPSED)])
}

fn ts_sexpr(v: &str) -> SExpr {
    SExpr::list([sym(CROSSING_TIME), sym(v)])
}

fn and(items: Vec<SExpr>) -> SExpr {
    SExpr::list(std::iter::once(sym("and")).chain(items))
}

fn typed_vars(vars: &[TypedVar]) -> Vec<SExpr> {
    let entries: Vec<_> = vars.iter().map(|v| (v.name.clone(), v.ty.clone())).collect();
    syntax::write_typed_list(&entries)
}

pub fn pddl_sexpr<T: Scalar>(m: &PddlModel<T>) -> SExpr {
    let section = |key: &str, items: Vec<SExpr>| SExpr::list(std::iter::once(SExpr::kw(key)).chain(items));
    let objects: Vec<_> = m.objects.iter().map(|o| (o.name.clone(), Some(o.ty.clone()))).collect();
    let predicates =
        m.predicates.iter().map(|p| SExpr::list(std::iter::once(sym(&p.name)).chain(typed_vars(&p.params)))).collect();
    let mut init = vec![SExpr::list([sym("="), elapsed_sexpr(), m.init.elapsed.to_sexpr()])];
    init.extend(m.init.literals.iter().map(literal_sexpr));
    init.extend(m.init.ts.iter().map(|(o, v)| SExpr::list([sym("="), ts_sexpr(o), v.to_sexpr()])));

    let mut goal: Vec<_> = m.goal.literals.iter().map(literal_sexpr).collect();
    if let Some(tc) = &m.goal.time_constraint {
        goal.push(SExpr::list([sym(tc.cmp.symbol()), elapsed_sexpr(), tc.bound.to_sexpr()]));
    }

    let mut forms = vec![
        sym("define"),
        SExpr::list([sym("problem"), sym(&m.problem_name)]),
        section("domain", vec![sym(&m.domain_name)]),
        section("objects", syntax::write_typed_list(&objects)),
        section("predicates", predicates),
        section("init", init),
        section("goal", vec![and(goal)]),
    ];
    for a in &m.actions {
        let mut effect: Vec<_> = a.effect.iter().map(literal_sexpr).collect();
        if let Some(t) = &a.time_effect {
            let amount = match t {
                DurationExpr::Single(v) => ts_sexpr(v),
                DurationExpr::Max(vs) => SExpr::list(std::iter::once(sym("max")).chain(vs.iter().map(|v| ts_sexpr(v)))),
            };
            effect.push(SExpr::list([sym("increase"), elapsed_sexpr(), amount]));
        }
        forms.push(SExpr::list([
            SExpr::kw("action"),
            sym(&a.name),
            SExpr::kw("parameters"),
            SExpr::list(typed_vars(&a.params)),
            SExpr::kw("precondition"),
            and(a.precondition.iter().map(literal_sexpr).collect()),
            SExpr::kw("effect"),
            and(effect),
        ]));
    }
    SExpr::List(forms)
}

/// Canonical merged-layout text (with trailing newline).
pub fn print_pddl<T: Scalar>(m: &PddlModel<T>) -> String {
    let mut text = write_pretty(&pddl_sexpr(m), crate::TEXT_WIDTH);
    text.push('\n');
    text
}

impl<T: Scalar> fmt::Display for PddlModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_pddl(self))
    }
}
