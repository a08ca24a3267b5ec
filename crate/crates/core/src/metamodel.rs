//! The declarative scheduling metamodel (`def-abstract-semantic-net`).
//!
//! A domain description lists parameters, entity sets, predicates, atomic
//! events with durations, traces, initial and goal conditions, and two
//! free-form sections (`operators`, `constraints`) that are kept verbatim.
//!
//! ```text
//! (def-abstract-semantic-net
//!   (problem-domain 4ws1tob)
//!   (parameters (n 4 int) (KS 2 int) (KU 1 int) (t0 5 real) ... (t-max 60 real))
//!   (entities (A (s0 s1 s2 s3)) (AS (Safe Unsafe)))
//!   (events (eS (Unsafe (?x ?y) Safe) (time (max (?tx ?ty))))
//!           (eU (Safe ?x Unsafe) (time (?tx))))
//!   (initial-conditions (A (atUnsafe atUnsafe atUnsafe atUnsafe)))
//!   (goal-conditions (A (atSafe atSafe atSafe atSafe)) (<= total-time t-max))
//!   ...)
//! ```
//!
//! Conventions the validator and the PDDL lowering rely on:
//! * the `i`-th value of the mover entity crosses in parameter `t<i>`;
//! * an event moving into place `P` is limited by parameter `K<first letter of P>`;
//! * parameter `n`, when present, is the size of the mover entity;
//! * duration variable `?tx` is the crossing time of event variable `?x`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::expr::{Comparator, DurationExpr};
use crate::scalar::Scalar;
use crate::sexpr::{write_pretty, SExpr};
use crate::syntax;

pub const ROOT_FORM: &str = "def-abstract-semantic-net";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("missing construct `{0}`")]
    MissingConstruct(String),
    #[error("construct `{0}` appears more than once")]
    DuplicateConstruct(String),
    #[error("unknown construct `{0}`")]
    UnknownConstruct(String),
    #[error("unknown entity value `{0}`")]
    UnknownEntityValue(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("entity `{entity}` lists value `{value}` twice")]
    DuplicateEntityValue { entity: String, value: String },
    #[error("malformed `{construct}`: {detail}")]
    Malformed { construct: String, detail: String },
}

fn malformed(construct: &str) -> impl FnOnce(String) -> ModelError + '_ {
    move |detail| ModelError::Malformed { construct: construct.to_string(), detail }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKind {
    Int,
    Real,
}

impl ParamKind {
    fn name(self) -> &'static str {
        match self {
            ParamKind::Int => "int",
            ParamKind::Real => "real",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param<T> {
    pub name: String,
    pub value: T,
    pub kind: ParamKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Entity {
    pub name: String,
    pub values: Vec<String>,
}

/// A predicate declaration such as `(atPlace ?A)`; kept as its term list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredDecl {
    pub terms: Vec<String>,
}

/// An atomic event: movers named by `vars` go from one place to another,
/// taking `duration`. Duration variables are written `?tx` for `?x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventDecl {
    pub name: String,
    pub from_place: String,
    pub vars: Vec<String>,
    pub to_place: String,
    pub duration: DurationExpr,
}

impl EventDecl {
    /// The event variable a duration variable refers to: `?tx` -> `?x`.
    pub fn var_for_time(&self, time_var: &str) -> Option<&str> {
        let stem = time_var.strip_prefix("?t")?;
        self.vars.iter().map(String::as_str).find(|v| &v[1..] == stem)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoundValue<T> {
    Param(String),
    Value(T),
}

/// `(<= total-time t-max)`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimeBound<T> {
    pub cmp: Comparator,
    pub subject: String,
    pub bound: BoundValue<T>,
}

/// Where each value of `entity` sits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionDecl<T> {
    pub entity: String,
    pub assignments: Vec<(String, String)>,
    pub time_bound: Option<TimeBound<T>>,
}

impl<T> ConditionDecl<T> {
    pub fn place_of(&self, value: &str) -> Option<&str> {
        self.assignments.iter().find(|(v, _)| v == value).map(|(_, p)| p.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DomainSpec<T> {
    pub problem_domain: String,
    pub parameters: Vec<Param<T>>,
    pub entities: Vec<Entity>,
    pub predicates: Vec<PredDecl>,
    pub events: Vec<EventDecl>,
    /// Stored for reference; the reachability search realizes traces.
    pub traces: Vec<SExpr>,
    pub initial_condition: ConditionDecl<T>,
    pub goal_condition: ConditionDecl<T>,
    pub operators: Vec<SExpr>,
    pub constraints: Vec<SExpr>,
}

impl<T: Scalar> DomainSpec<T> {
    pub fn param(&self, name: &str) -> Option<&Param<T>> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn entity(&self, name: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.name == name)
    }

    /// The entity whose values move between places (named by the initial
    /// condition).
    pub fn movers(&self) -> Option<&Entity> {
        self.entity(&self.initial_condition.entity)
    }

    /// Name of the parameter holding the crossing time of the `index`-th mover.
    pub fn time_param_name(index: usize) -> String {
        format!("t{index}")
    }

    /// Name of the capacity parameter for events moving into `place`.
    pub fn capacity_param_name(place: &str) -> Option<String> {
        place.chars().next().map(|c| format!("K{c}"))
    }

    /// The goal time bound resolved to a number.
    pub fn goal_time_bound(&self) -> Option<(Comparator, T)> {
        let tb = self.goal_condition.time_bound.as_ref()?;
        let value = match &tb.bound {
            BoundValue::Value(v) => *v,
            BoundValue::Param(name) => self.param(name)?.value,
        };
        Some((tb.cmp, value))
    }

    fn is_declared_value(&self, value: &str) -> bool {
        self.entities.iter().any(|e| e.values.iter().any(|v| v == value))
    }
}

// ---------------------------------------------------------------- parsing

const REQUIRED: [&str; 6] =
    ["problem-domain", "parameters", "entities", "events", "initial-conditions", "goal-conditions"];

/// Maps alternative spellings onto canonical construct names. Constructs that
/// may repeat (`entity`, `pred`) accumulate.
fn canonical_construct(head: &str) -> Option<(&'static str, bool)> {
    Some(match head {
        "problem-domain" => ("problem-domain", false),
        "parameters" | "def-parameters" => ("parameters", false),
        "entities" => ("entities", false),
        "entity" => ("entities", true),
        "predicates" => ("predicates", false),
        "pred" => ("predicates", true),
        "events" => ("events", false),
        "traces" => ("traces", false),
        "initial-conditions" | "initial-condition" => ("initial-conditions", false),
        "goal-conditions" | "goal-condition" => ("goal-conditions", false),
        "operators" => ("operators", false),
        "constraints" => ("constraints", false),
        _ => return None,
    })
}

/// Parses the single `def-abstract-semantic-net` form among `forms`.
pub fn parse_domain_spec<T: Scalar>(forms: &[SExpr]) -> Result<DomainSpec<T>, ModelError> {
    let mut roots = forms.iter().filter(|f| f.head() == Some(ROOT_FORM));
    let root = roots.next().ok_or_else(|| ModelError::MissingConstruct(ROOT_FORM.into()))?;
    if roots.next().is_some() {
        return Err(ModelError::DuplicateConstruct(ROOT_FORM.into()));
    }
    if let Some(other) = forms.iter().find(|f| f.head() != Some(ROOT_FORM)) {
        return Err(ModelError::UnknownConstruct(other.to_string()));
    }

    // construct name -> body items (everything after the head)
    let mut sections: Vec<(&'static str, Vec<&SExpr>)> = Vec::new();
    for item in &root.as_list().unwrap()[1..] {
        let head = item.head().ok_or_else(|| ModelError::UnknownConstruct(item.to_string()))?;
        let (name, repeats) =
            canonical_construct(head).ok_or_else(|| ModelError::UnknownConstruct(head.to_string()))?;
        let body = &item.as_list().unwrap()[1..];
        match sections.iter_mut().find(|(n, _)| *n == name) {
            Some((_, items)) if repeats => items.push(item),
            Some(_) => return Err(ModelError::DuplicateConstruct(name.to_string())),
            None if repeats => sections.push((name, vec![item])),
            None => sections.push((name, body.iter().collect())),
        }
    }
    for name in REQUIRED {
        if !sections.iter().any(|(n, _)| *n == name) {
            return Err(ModelError::MissingConstruct(name.to_string()));
        }
    }
    let section = |name: &str| -> Vec<&SExpr> {
        sections.iter().find(|(n, _)| *n == name).map(|(_, v)| v.clone()).unwrap_or_default()
    };
    // `(entity (A (...)))` and `(pred a b)` arrive as whole forms
    let unwrap_repeated = |items: Vec<&SExpr>| -> Vec<SExpr> {
        items
            .into_iter()
            .map(|it| match it.head() {
                Some("entity") => it.as_list().unwrap().get(1).cloned().unwrap_or(SExpr::List(vec![])),
                Some("pred") => SExpr::List(it.as_list().unwrap()[1..].to_vec()),
                _ => it.clone(),
            })
            .collect()
    };

    let problem_domain = match section("problem-domain").as_slice() {
        [name] => syntax::symbol(name).map_err(malformed("problem-domain"))?.to_string(),
        _ => return Err(malformed("problem-domain")("expected one name".into())),
    };
    let parameters = section("parameters").into_iter().map(parse_param::<T>).collect::<Result<Vec<_>, _>>()?;
    let entities = unwrap_repeated(section("entities")).iter().map(parse_entity).collect::<Result<Vec<_>, _>>()?;
    let predicates = unwrap_repeated(section("predicates"))
        .iter()
        .map(|p| {
            let terms = syntax::list(p)
                .and_then(|items| items.iter().map(|t| syntax::symbol(t).map(str::to_string)).collect())
                .map_err(malformed("predicates"))?;
            Ok(PredDecl { terms })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let events = section("events").into_iter().map(parse_event).collect::<Result<Vec<_>, _>>()?;
    let initial_condition = parse_condition::<T>("initial-conditions", &section("initial-conditions"), &entities)?;
    let goal_condition = parse_condition::<T>("goal-conditions", &section("goal-conditions"), &entities)?;

    Ok(DomainSpec {
        problem_domain,
        parameters,
        entities,
        predicates,
        events,
        traces: section("traces").into_iter().cloned().collect(),
        initial_condition,
        goal_condition,
        operators: section("operators").into_iter().cloned().collect(),
        constraints: section("constraints").into_iter().cloned().collect(),
    })
}

fn parse_param<T: Scalar>(e: &SExpr) -> Result<Param<T>, ModelError> {
    let bad = malformed("parameters");
    let items = syntax::list(e).map_err(malformed("parameters"))?;
    let [name, value, kind] = items else {
        return Err(bad(format!("expected (name value kind), found `{e}`")));
    };
    let name = syntax::symbol(name).map_err(malformed("parameters"))?.to_string();
    let kind = match syntax::symbol(kind).map_err(malformed("parameters"))? {
        "int" => ParamKind::Int,
        "real" => ParamKind::Real,
        other => return Err(malformed("parameters")(format!("unknown kind `{other}`"))),
    };
    if kind == ParamKind::Int && matches!(value, SExpr::Real(d) if d.as_integer().is_none()) {
        return Err(malformed("parameters")(format!("int parameter `{name}` has value {value}")));
    }
    let value = syntax::number::<T>(value).map_err(malformed("parameters"))?;
    Ok(Param { name, value, kind })
}

fn parse_entity(e: &SExpr) -> Result<Entity, ModelError> {
    let items = syntax::list(e).map_err(malformed("entities"))?;
    let [name, values] = items else {
        return Err(malformed("entities")(format!("expected (name (values...)), found `{e}`")));
    };
    let name = syntax::symbol(name).map_err(malformed("entities"))?.to_string();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in syntax::list(values).map_err(malformed("entities"))? {
        let v = syntax::symbol(v).map_err(malformed("entities"))?;
        if !seen.insert(v) {
            return Err(ModelError::DuplicateEntityValue { entity: name, value: v.to_string() });
        }
        out.push(v.to_string());
    }
    Ok(Entity { name, values: out })
}

/// `(eS (Unsafe (?x ?y) Safe) (time (max (?tx ?ty))))` or
/// `(eU (Safe ?x Unsafe) (time (?tx)))`.
fn parse_event(e: &SExpr) -> Result<EventDecl, ModelError> {
    let err = |d: String| ModelError::Malformed { construct: "events".into(), detail: d };
    let items = syntax::list(e).map_err(err)?;
    let [name, movement, time] = items else {
        return Err(err(format!("expected (name (from vars to) (time ...)), found `{e}`")));
    };
    let name = syntax::symbol(name).map_err(err)?.to_string();
    let [from, vars, to] = syntax::list(movement).map_err(err)? else {
        return Err(err(format!("event `{name}`: expected (from vars to)")));
    };
    let vars: Vec<String> = match vars {
        SExpr::List(vs) => vs.iter().map(|v| syntax::symbol(v).map(str::to_string)).collect::<Result<_, _>>(),
        v => syntax::symbol(v).map(|s| vec![s.to_string()]),
    }
    .map_err(err)?;
    if let Some(v) = vars.iter().find(|v| !syntax::is_var(v)) {
        return Err(err(format!("event `{name}`: `{v}` is not a ?variable")));
    }
    let duration = match syntax::list(time).map_err(err)? {
        [head, body] if head.as_symbol() == Some("time") => parse_time_expr(body).map_err(err)?,
        _ => return Err(err(format!("event `{name}`: expected (time ...)"))),
    };
    Ok(EventDecl {
        name,
        from_place: syntax::symbol(from).map_err(err)?.to_string(),
        vars,
        to_place: syntax::symbol(to).map_err(err)?.to_string(),
        duration,
    })
}

fn parse_time_expr(e: &SExpr) -> Result<DurationExpr, String> {
    let vars_of = |items: &[SExpr]| -> Result<Vec<String>, String> {
        items.iter().map(|v| syntax::symbol(v).map(str::to_string)).collect()
    };
    match e {
        SExpr::Symbol(v) => Ok(DurationExpr::Single(v.clone())),
        SExpr::List(items) => match items.as_slice() {
            [head, SExpr::List(args)] if head.as_symbol() == Some("max") => Ok(DurationExpr::Max(vars_of(args)?)),
            [head, rest @ ..] if head.as_symbol() == Some("max") => Ok(DurationExpr::Max(vars_of(rest)?)),
            [single] => Ok(DurationExpr::Single(syntax::symbol(single)?.to_string())),
            _ => Err(format!("unsupported time expression `{e}`")),
        },
        _ => Err(format!("unsupported time expression `{e}`")),
    }
}

/// `(A (atUnsafe atUnsafe ...))` (positional, in entity order) or
/// `(A ((s0 Unsafe) (s1 Unsafe)))`, optionally followed by a time bound.
fn parse_condition<T: Scalar>(
    construct: &str,
    body: &[&SExpr],
    entities: &[Entity],
) -> Result<ConditionDecl<T>, ModelError> {
    let err = |d: String| ModelError::Malformed { construct: construct.into(), detail: d };
    let (assign, rest) = body.split_first().ok_or_else(|| err("empty condition".into()))?;
    let [entity_name, places] = syntax::list(assign).map_err(err)? else {
        return Err(err(format!("expected (entity (places...)), found `{assign}`")));
    };
    let entity_name = syntax::symbol(entity_name).map_err(err)?;
    let entity = entities
        .iter()
        .find(|e| e.name == entity_name)
        .ok_or_else(|| ModelError::UnknownEntity(entity_name.to_string()))?;
    let places = syntax::list(places).map_err(err)?;
    let mut assignments = Vec::new();
    if places.iter().all(|p| p.as_list().is_some()) && !places.is_empty() {
        for pair in places {
            let [value, place] = pair.as_list().unwrap() else {
                return Err(err(format!("expected (value place), found `{pair}`")));
            };
            let value = syntax::symbol(value).map_err(err)?;
            if !entity.values.iter().any(|v| v == value) {
                return Err(ModelError::UnknownEntityValue(value.to_string()));
            }
            assignments.push((value.to_string(), syntax::symbol(place).map_err(err)?.to_string()));
        }
    } else {
        if places.len() != entity.values.len() {
            return Err(err(format!(
                "entity `{}` has {} values but {} places are given",
                entity.name,
                entity.values.len(),
                places.len()
            )));
        }
        for (value, place) in entity.values.iter().zip(places) {
            let place = syntax::symbol(place).map_err(err)?;
            let place = place.strip_prefix("at").filter(|p| !p.is_empty()).unwrap_or(place);
            assignments.push((value.clone(), place.to_string()));
        }
    }
    let time_bound = match rest {
        [] => None,
        [tb] => Some(parse_time_bound(tb).map_err(err)?),
        _ => return Err(err("unexpected trailing forms".into())),
    };
    Ok(ConditionDecl { entity: entity.name.clone(), assignments, time_bound })
}

fn parse_time_bound<T: Scalar>(e: &SExpr) -> Result<TimeBound<T>, String> {
    let [cmp, subject, bound] = syntax::list(e)? else {
        return Err(format!("expected (<= subject bound), found `{e}`"));
    };
    let cmp = Comparator::parse(syntax::symbol(cmp)?).ok_or_else(|| format!("unsupported comparator in `{e}`"))?;
    let bound = if bound.is_number() {
        BoundValue::Value(syntax::number(bound)?)
    } else {
        BoundValue::Param(syntax::symbol(bound)?.to_string())
    };
    Ok(TimeBound { cmp, subject: syntax::symbol(subject)?.to_string(), bound })
}

// --------------------------------------------------------------- printing

fn sym(s: &str) -> SExpr {
    SExpr::sym(s)
}

fn duration_sexpr(d: &DurationExpr) -> SExpr {
    match d {
        DurationExpr::Max(vars) => SExpr::list([sym("max"), SExpr::list(vars.iter().map(|v| sym(v)))]),
        DurationExpr::Single(v) => SExpr::list([sym(v)]),
    }
}

fn condition_sexpr<T: Scalar>(d: &DomainSpec<T>, c: &ConditionDecl<T>) -> Vec<SExpr> {
    let positional = d.entity(&c.entity).is_some_and(|e| {
        e.values.len() == c.assignments.len() && e.values.iter().zip(&c.assignments).all(|(v, a)| *v == a.0)
    });
    let places = if positional {
        SExpr::list(c.assignments.iter().map(|(_, p)| sym(&format!("at{p}"))))
    } else {
        SExpr::list(c.assignments.iter().map(|(v, p)| SExpr::list([sym(v), sym(p)])))
    };
    let mut out = vec![SExpr::list([sym(&c.entity), places])];
    if let Some(tb) = &c.time_bound {
        let bound = match &tb.bound {
            BoundValue::Param(p) => sym(p),
            BoundValue::Value(v) => v.to_sexpr(),
        };
        out.push(SExpr::list([sym(tb.cmp.symbol()), sym(&tb.subject), bound]));
    }
    out
}

pub fn domain_spec_sexpr<T: Scalar>(d: &DomainSpec<T>) -> SExpr {
    let section = |name: &str, items: Vec<SExpr>| SExpr::list(std::iter::once(sym(name)).chain(items));
    let params =
        d.parameters.iter().map(|p| SExpr::list([sym(&p.name), p.value.to_sexpr(), sym(p.kind.name())])).collect();
    let entities =
        d.entities.iter().map(|e| SExpr::list([sym(&e.name), SExpr::list(e.values.iter().map(|v| sym(v)))])).collect();
    let predicates = d.predicates.iter().map(|p| SExpr::list(p.terms.iter().map(|t| sym(t)))).collect();
    let events = d
        .events
        .iter()
        .map(|ev| {
            let vars = match ev.vars.as_slice() {
                [single] => sym(single),
                many => SExpr::list(many.iter().map(|v| sym(v))),
            };
            SExpr::list([
                sym(&ev.name),
                SExpr::list([sym(&ev.from_place), vars, sym(&ev.to_place)]),
                SExpr::list([sym("time"), duration_sexpr(&ev.duration)]),
            ])
        })
        .collect();
    SExpr::list([
        sym(ROOT_FORM),
        SExpr::list([sym("problem-domain"), sym(&d.problem_domain)]),
        section("parameters", params),
        section("entities", entities),
        section("predicates", predicates),
        section("events", events),
        section("traces", d.traces.clone()),
        section("initial-conditions", condition_sexpr(d, &d.initial_condition)),
        section("goal-conditions", condition_sexpr(d, &d.goal_condition)),
        section("operators", d.operators.clone()),
        section("constraints", d.constraints.clone()),
    ])
}

/// Canonical `.asn.sexp` text (with trailing newline).
pub fn print_domain_spec<T: Scalar>(d: &DomainSpec<T>) -> String {
    let mut text = write_pretty(&domain_spec_sexpr(d), crate::TEXT_WIDTH);
    text.push('\n');
    text
}

// ------------------------------------------------------------- validation

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DomainIssue {
    UnknownPlace(String),
    UnboundParameter(String),
    UnknownEntity(String),
    UnknownEntityValue(String),
    DuplicateEntityValue(String),
    DuplicateParameter(String),
    UnassignedValue(String),
    DuplicateAssignment(String),
    DuplicateVariable(String),
    NoVariables,
    UnboundDurationVariable(String),
    CapacityExceeded { vars: usize, capacity: i64 },
    PopulationMismatch { declared: i64, actual: usize },
    NonIntegralParameter(String),
}

impl fmt::Display for DomainIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainIssue::UnknownPlace(p) => write!(f, "unknown place `{p}`"),
            DomainIssue::UnboundParameter(p) => write!(f, "parameter `{p}` is not declared"),
            DomainIssue::UnknownEntity(e) => write!(f, "unknown entity `{e}`"),
            DomainIssue::UnknownEntityValue(v) => write!(f, "unknown entity value `{v}`"),
            DomainIssue::DuplicateEntityValue(v) => write!(f, "entity value `{v}` declared twice"),
            DomainIssue::DuplicateParameter(p) => write!(f, "parameter `{p}` declared twice"),
            DomainIssue::UnassignedValue(v) => write!(f, "`{v}` is not assigned a place"),
            DomainIssue::DuplicateAssignment(v) => write!(f, "`{v}` is assigned more than once"),
            DomainIssue::DuplicateVariable(v) => write!(f, "variable `{v}` repeated"),
            DomainIssue::NoVariables => write!(f, "event moves nothing"),
            DomainIssue::UnboundDurationVariable(v) => write!(f, "duration variable `{v}` names no event variable"),
            DomainIssue::CapacityExceeded { vars, capacity } => {
                write!(f, "event moves {vars} entities but capacity is {capacity}")
            }
            DomainIssue::PopulationMismatch { declared, actual } => {
                write!(f, "parameter n = {declared} but the mover entity has {actual} values")
            }
            DomainIssue::NonIntegralParameter(p) => write!(f, "int parameter `{p}` is not integral"),
        }
    }
}

/// A validation finding, located by a construct path such as `events/eS`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub path: String,
    pub issue: DomainIssue,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.issue)
    }
}

/// Checks every cross-reference in `d`; an empty result means well-formed.
pub fn validate_domain<T: Scalar>(d: &DomainSpec<T>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |path: String, issue: DomainIssue| out.push(Diagnostic { path, issue });

    let mut names = HashSet::new();
    for p in &d.parameters {
        if !names.insert(p.name.as_str()) {
            push(format!("parameters/{}", p.name), DomainIssue::DuplicateParameter(p.name.clone()));
        }
        if p.kind == ParamKind::Int && p.value.as_integer().is_none() {
            push(format!("parameters/{}", p.name), DomainIssue::NonIntegralParameter(p.name.clone()));
        }
    }
    for e in &d.entities {
        let mut seen = HashSet::new();
        for v in &e.values {
            if !seen.insert(v) {
                push(format!("entities/{}", e.name), DomainIssue::DuplicateEntityValue(v.clone()));
            }
        }
    }

    let place_ok = |p: &str| d.is_declared_value(p);
    for ev in &d.events {
        let path = format!("events/{}", ev.name);
        for place in [&ev.from_place, &ev.to_place] {
            if !place_ok(place) {
                push(path.clone(), DomainIssue::UnknownPlace(place.clone()));
            }
        }
        if ev.vars.is_empty() {
            push(path.clone(), DomainIssue::NoVariables);
        }
        let mut seen = HashSet::new();
        for v in &ev.vars {
            if !seen.insert(v) {
                push(path.clone(), DomainIssue::DuplicateVariable(v.clone()));
            }
        }
        for tv in ev.duration.vars() {
            if ev.var_for_time(tv).is_none() {
                push(path.clone(), DomainIssue::UnboundDurationVariable(tv.clone()));
            }
        }
        if let Some(cap) = DomainSpec::<T>::capacity_param_name(&ev.to_place).and_then(|n| d.param(&n)) {
            let capacity = cap.value.as_integer().unwrap_or(i64::MAX);
            if ev.vars.len() as i64 > capacity {
                push(path.clone(), DomainIssue::CapacityExceeded { vars: ev.vars.len(), capacity });
            }
        }
    }

    for (construct, cond) in [("initial-conditions", &d.initial_condition), ("goal-conditions", &d.goal_condition)] {
        let Some(entity) = d.entity(&cond.entity) else {
            push(construct.to_string(), DomainIssue::UnknownEntity(cond.entity.clone()));
            continue;
        };
        let mut assigned = BTreeSet::new();
        for (value, place) in &cond.assignments {
            if !entity.values.contains(value) {
                push(construct.to_string(), DomainIssue::UnknownEntityValue(value.clone()));
            }
            if !assigned.insert(value.as_str()) {
                push(construct.to_string(), DomainIssue::DuplicateAssignment(value.clone()));
            }
            if !place_ok(place) {
                push(construct.to_string(), DomainIssue::UnknownPlace(place.clone()));
            }
        }
        for v in &entity.values {
            if !assigned.contains(v.as_str()) {
                push(construct.to_string(), DomainIssue::UnassignedValue(v.clone()));
            }
        }
        if let Some(TimeBound { bound: BoundValue::Param(p), .. }) = &cond.time_bound {
            if d.param(p).is_none() {
                push(construct.to_string(), DomainIssue::UnboundParameter(p.clone()));
            }
        }
    }

    // crossing times referenced by `?tx` durations
    if let Some(movers) = d.movers() {
        if d.events.iter().any(|e| !e.duration.vars().is_empty()) {
            for i in 0..movers.values.len() {
                let name = DomainSpec::<T>::time_param_name(i);
                if d.param(&name).is_none() {
                    push(format!("entities/{}/{}", movers.name, movers.values[i]), DomainIssue::UnboundParameter(name));
                }
            }
        }
        if let Some(n) = d.param("n") {
            let declared = n.value.as_integer().unwrap_or(-1);
            if declared != movers.values.len() as i64 {
                push("parameters/n".into(), DomainIssue::PopulationMismatch { declared, actual: movers.values.len() });
            }
        }
    }
    out
}
