//! Predicate/transition nets: places with optional capacities, transitions
//! whose arcs carry variable patterns, an initial marking and an
//! `EventuallyOnSomeBranch` goal.
//!
//! Tokens are bare values. A side table names them and assigns sorts; it
//! labels output and restricts what typed variables may bind, but token
//! equality is by value. Arc weight is the length of the arc's pattern.
//!
//! Concrete syntax (`.lprod.sexp`):
//!
//! ```text
//! (define-net 4ws1tob
//!   (:tokens (s0 5 sold) (torch 1 torch))
//!   (:place Safe)
//!   (:place Unsafe :marking (1 5))
//!   (:trans toSafe
//!     :parameters (?x - sold ?torch - torch)
//!     :in (Unsafe ?x ?torch)
//!     :out (Safe ?x ?torch)
//!     :duration ?x)
//!   (:goal EventuallyOnSomeBranch (== Safe (1 5)) :time-bound (<= 60)))
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::expr::{Comparator, DurationExpr};
use crate::scalar::Scalar;
use crate::sexpr::{write_pretty, SExpr};
use crate::syntax;

pub const GOAL_MODE: &str = "EventuallyOnSomeBranch";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenDecl<T> {
    pub name: String,
    pub value: T,
    pub sort: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Place {
    pub name: String,
    /// `None` is unbounded.
    pub capacity: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternItem<T> {
    Var(String),
    Lit(T),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arc<T> {
    pub place: String,
    pub pattern: Vec<PatternItem<T>>,
}

impl<T> Arc<T> {
    pub fn weight(&self) -> usize {
        self.pattern.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.pattern.iter().filter_map(|p| match p {
            PatternItem::Var(v) => Some(v.as_str()),
            PatternItem::Lit(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetParam {
    pub name: String,
    pub sort: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetTransition<T> {
    pub name: String,
    pub params: Vec<NetParam>,
    pub inputs: Vec<Arc<T>>,
    pub outputs: Vec<Arc<T>>,
    pub duration: Option<DurationExpr>,
}

impl<T> NetTransition<T> {
    pub fn param(&self, name: &str) -> Option<&NetParam> {
        self.params.iter().find(|p| p.name == name)
    }

    fn input_vars(&self) -> HashSet<&str> {
        self.inputs.iter().flat_map(Arc::vars).collect()
    }
}

/// Token multiset per place, indexed like [`PrTNet::places`]. Each multiset
/// is kept sorted so that equal markings compare and hash equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking<T> {
    places: Vec<Vec<T>>,
}

impl<T: Scalar> Marking<T> {
    pub fn empty(place_count: usize) -> Self {
        Marking { places: vec![Vec::new(); place_count] }
    }

    pub fn from_places(mut places: Vec<Vec<T>>) -> Self {
        places.iter_mut().for_each(|p| p.sort());
        Marking { places }
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn tokens(&self, place: usize) -> &[T] {
        &self.places[place]
    }

    pub fn add(&mut self, place: usize, value: T) {
        let p = &mut self.places[place];
        let at = p.partition_point(|v| *v <= value);
        p.insert(at, value);
    }

    /// Removes one occurrence; false if absent.
    pub fn remove(&mut self, place: usize, value: T) -> bool {
        let p = &mut self.places[place];
        match p.binary_search(&value) {
            Ok(i) => {
                p.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn count(&self, place: usize, value: T) -> usize {
        let p = &self.places[place];
        p.partition_point(|v| *v <= value) - p.partition_point(|v| *v < value)
    }

    pub fn total(&self) -> usize {
        self.places.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GoalTarget<T> {
    /// The named place holds exactly this multiset (sorted).
    Exact { place: String, tokens: Vec<T> },
    /// Each value is in the named place.
    Contains(Vec<(String, T)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetGoal<T> {
    pub target: GoalTarget<T>,
    /// Upper bound on elapsed time; checked by the path filter, not the search.
    pub time_bound: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrTNet<T> {
    pub name: String,
    pub tokens: Vec<TokenDecl<T>>,
    pub places: Vec<Place>,
    pub transitions: Vec<NetTransition<T>>,
    pub initial_marking: Marking<T>,
    pub goal: Option<NetGoal<T>>,
}

impl<T: Scalar> PrTNet<T> {
    pub fn place_index(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p.name == name)
    }

    pub fn transition(&self, name: &str) -> Option<&NetTransition<T>> {
        self.transitions.iter().find(|t| t.name == name)
    }

    pub fn token_named(&self, name: &str) -> Option<&TokenDecl<T>> {
        self.tokens.iter().find(|t| t.name == name)
    }

    /// First declared token with this value.
    pub fn token_with_value(&self, value: T) -> Option<&TokenDecl<T>> {
        self.tokens.iter().find(|t| t.value == value)
    }

    /// Whether `var` of transition `t` may take `value`.
    ///
    /// A typed variable binds values of its sort. An untyped variable named
    /// after a token (`?torch`) binds that token's value only; any other
    /// untyped variable binds everything except values pinned that way in
    /// the same transition.
    pub fn binds(&self, t: &NetTransition<T>, var: &str, value: T) -> bool {
        let pinned = |name: &str| self.token_named(name.trim_start_matches('?')).map(|tok| tok.value);
        match t.param(var).and_then(|p| p.sort.as_deref()) {
            Some(sort) => self.tokens.iter().any(|k| k.sort == sort && k.value == value),
            None => match pinned(var) {
                Some(v) => v == value,
                None => !t
                    .params
                    .iter()
                    .filter(|p| p.sort.is_none() && p.name != var)
                    .any(|p| pinned(&p.name) == Some(value)),
            },
        }
    }

    /// Whether the marking satisfies the goal's target.
    pub fn goal_holds(&self, goal: &NetGoal<T>, m: &Marking<T>) -> bool {
        match &goal.target {
            GoalTarget::Exact { place, tokens } => {
                self.place_index(place).is_some_and(|i| m.tokens(i) == tokens.as_slice())
            }
            GoalTarget::Contains(items) => {
                let mut need: HashMap<(usize, T), usize> = HashMap::new();
                for (place, v) in items {
                    match self.place_index(place) {
                        Some(i) => *need.entry((i, *v)).or_default() += 1,
                        None => return false,
                    }
                }
                need.iter().all(|(&(i, v), &n)| m.count(i, v) >= n)
            }
        }
    }

    /// Display name of a value: its token name, or the number itself.
    pub fn value_label(&self, v: T) -> String {
        self.token_with_value(v).map_or_else(|| v.to_string(), |t| t.name.clone())
    }
}

// ---------------------------------------------------------------- checking

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetIssue {
    DuplicatePlace(String),
    DuplicateTransition(String),
    DuplicateToken(String),
    PlaceTransitionClash(String),
    UnknownPlace(String),
    NonPositiveCapacity(String),
    NonPositiveWeight { transition: String, place: String },
    CapacityExceeded { place: String, tokens: usize, capacity: u32 },
    UndeclaredVariable(String),
    UnboundOutputVar(String),
    UnboundDurationVar(String),
    NegativeDuration { var: String, value: String },
    UnknownSort { var: String, sort: String },
    ConflictingTokenSort(String),
    MarkingShape { expected: usize, found: usize },
}

impl fmt::Display for NetIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use NetIssue::*;
        match self {
            DuplicatePlace(p) => write!(f, "place `{p}` declared twice"),
            DuplicateTransition(t) => write!(f, "transition `{t}` declared twice"),
            DuplicateToken(t) => write!(f, "token `{t}` declared twice"),
            PlaceTransitionClash(n) => write!(f, "`{n}` names both a place and a transition"),
            UnknownPlace(p) => write!(f, "unknown place `{p}`"),
            NonPositiveCapacity(p) => write!(f, "place `{p}` has capacity 0"),
            NonPositiveWeight { transition, place } => {
                write!(f, "arc between `{transition}` and `{place}` has weight 0")
            }
            CapacityExceeded { place, tokens, capacity } => {
                write!(f, "place `{place}` holds {tokens} tokens, capacity {capacity}")
            }
            UndeclaredVariable(v) => write!(f, "variable `{v}` is not a parameter"),
            UnboundOutputVar(v) => write!(f, "output variable `{v}` is not bound by any input arc"),
            UnboundDurationVar(v) => write!(f, "duration variable `{v}` is not bound by any input arc"),
            NegativeDuration { var, value } => write!(f, "duration variable `{var}` can bind negative value {value}"),
            UnknownSort { var, sort } => write!(f, "variable `{var}` has sort `{sort}` with no tokens"),
            ConflictingTokenSort(v) => write!(f, "value {v} is declared with two different sorts"),
            MarkingShape { expected, found } => write!(f, "marking covers {found} places, net has {expected}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// `places/Safe`, `transitions/toSafe`, `tokens`, `goal`.
    pub path: String,
    pub issue: NetIssue,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.issue)
    }
}

/// Structural checks: `S ∩ T = ∅`, arcs name declared places, weights and
/// capacities positive, `M0 ≤ K`, variables bound, durations non-negative.
/// Empty means valid.
pub fn check_net<T: Scalar>(net: &PrTNet<T>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |path: String, issue| out.push(Diagnostic { path, issue });

    let mut seen = HashSet::new();
    for t in &net.tokens {
        if !seen.insert(&t.name) {
            push("tokens".into(), NetIssue::DuplicateToken(t.name.clone()));
        }
    }
    let mut sort_of: HashMap<T, &str> = HashMap::new();
    for t in &net.tokens {
        if let Some(prev) = sort_of.insert(t.value, &t.sort) {
            if prev != t.sort {
                push("tokens".into(), NetIssue::ConflictingTokenSort(t.value.to_string()));
            }
        }
    }

    let mut places = HashSet::new();
    for p in &net.places {
        let path = format!("places/{}", p.name);
        if !places.insert(p.name.as_str()) {
            push(path.clone(), NetIssue::DuplicatePlace(p.name.clone()));
        }
        if p.capacity == Some(0) {
            push(path, NetIssue::NonPositiveCapacity(p.name.clone()));
        }
    }
    if net.initial_marking.place_count() != net.places.len() {
        push(
            "marking".into(),
            NetIssue::MarkingShape { expected: net.places.len(), found: net.initial_marking.place_count() },
        );
    } else {
        for (i, p) in net.places.iter().enumerate() {
            let n = net.initial_marking.tokens(i).len();
            if let Some(k) = p.capacity.filter(|k| n > *k as usize) {
                push(
                    format!("places/{}", p.name),
                    NetIssue::CapacityExceeded { place: p.name.clone(), tokens: n, capacity: k },
                );
            }
        }
    }

    // every value a variable could ever bind: firings never invent values
    let mut candidates: Vec<T> = net.tokens.iter().map(|t| t.value).collect();
    candidates.extend((0..net.initial_marking.place_count()).flat_map(|i| net.initial_marking.tokens(i).to_vec()));
    candidates.extend(net.transitions.iter().flat_map(|t| &t.outputs).flat_map(|a| &a.pattern).filter_map(
        |p| match p {
            PatternItem::Lit(v) => Some(*v),
            PatternItem::Var(_) => None,
        },
    ));
    candidates.sort();
    candidates.dedup();

    let mut transitions = HashSet::new();
    for t in &net.transitions {
        let path = format!("transitions/{}", t.name);
        if !transitions.insert(t.name.as_str()) {
            push(path.clone(), NetIssue::DuplicateTransition(t.name.clone()));
        }
        if places.contains(t.name.as_str()) {
            push(path.clone(), NetIssue::PlaceTransitionClash(t.name.clone()));
        }
        for arc in t.inputs.iter().chain(&t.outputs) {
            if !places.contains(arc.place.as_str()) {
                push(path.clone(), NetIssue::UnknownPlace(arc.place.clone()));
            }
            if arc.weight() == 0 {
                push(
                    path.clone(),
                    NetIssue::NonPositiveWeight { transition: t.name.clone(), place: arc.place.clone() },
                );
            }
            for v in arc.vars() {
                if t.param(v).is_none() {
                    push(path.clone(), NetIssue::UndeclaredVariable(v.to_string()));
                }
            }
        }
        let bound = t.input_vars();
        let mut reported = HashSet::new();
        for v in t.outputs.iter().flat_map(Arc::vars) {
            if !bound.contains(v) && reported.insert(v) {
                push(path.clone(), NetIssue::UnboundOutputVar(v.to_string()));
            }
        }
        for v in t.duration.iter().flat_map(DurationExpr::vars) {
            if !bound.contains(v.as_str()) {
                push(path.clone(), NetIssue::UnboundDurationVar(v.clone()));
            }
        }
        for v in t.duration.iter().flat_map(DurationExpr::vars) {
            if let Some(value) = candidates.iter().find(|&&x| x < T::zero() && net.binds(t, v, x)) {
                push(path.clone(), NetIssue::NegativeDuration { var: v.clone(), value: value.to_string() });
            }
        }
        for p in &t.params {
            if let Some(sort) = &p.sort {
                if !net.tokens.iter().any(|k| &k.sort == sort) {
                    push(path.clone(), NetIssue::UnknownSort { var: p.name.clone(), sort: sort.clone() });
                }
            }
        }
    }

    if let Some(goal) = &net.goal {
        let goal_places: Vec<&String> = match &goal.target {
            GoalTarget::Exact { place, .. } => vec![place],
            GoalTarget::Contains(items) => items.iter().map(|(p, _)| p).collect(),
        };
        for p in goal_places {
            if !places.contains(p.as_str()) {
                push("goal".into(), NetIssue::UnknownPlace(p.clone()));
            }
        }
    }
    out
}

// ----------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("`{0}` names both a place and a transition")]
    PlaceTransitionClash(String),
    #[error("output variable `{0}` is not bound by any input arc")]
    UnboundOutputVar(String),
    #[error("malformed arc pattern `{0}`")]
    MalformedPattern(String),
    #[error("place `{0}` is not declared")]
    UnknownPlace(String),
    #[error("malformed {section}: {detail}")]
    Malformed { section: String, detail: String },
}

fn malformed(section: &str) -> impl Fn(String) -> NetError + '_ {
    move |detail| NetError::Malformed { section: section.to_string(), detail }
}

/// Place name, tolerating the `Safe:` spelling.
fn place_name(e: &SExpr) -> Option<&str> {
    let s = e.as_symbol()?;
    let s = s.strip_suffix(':').unwrap_or(s);
    (!s.is_empty()).then_some(s)
}

fn parse_arc<T: Scalar>(e: &SExpr) -> Result<Arc<T>, NetError> {
    let bad = || NetError::MalformedPattern(e.to_string());
    let items = e.as_list().ok_or_else(bad)?;
    let (place, rest) = items.split_first().ok_or_else(bad)?;
    let place = place_name(place).ok_or_else(bad)?.to_string();
    let pattern = rest
        .iter()
        .map(|item| match item {
            SExpr::Symbol(v) if syntax::is_var(v) => Ok(PatternItem::Var(v.clone())),
            e if e.is_number() => T::from_sexpr(e).map(PatternItem::Lit).ok_or_else(bad),
            _ => Err(bad()),
        })
        .collect::<Result<_, _>>()?;
    Ok(Arc { place, pattern })
}

fn parse_duration(values: &[SExpr]) -> Result<DurationExpr, String> {
    let var = |e: &SExpr| -> Result<String, String> {
        let v = syntax::symbol(e)?;
        if syntax::is_var(v) {
            Ok(v.to_string())
        } else {
            Err(format!("expected a variable, found `{v}`"))
        }
    };
    match values {
        [SExpr::List(items)] => match items.as_slice() {
            [head, args @ ..] if head.as_symbol() == Some("max") && !args.is_empty() => {
                Ok(DurationExpr::Max(args.iter().map(var).collect::<Result<_, _>>()?))
            }
            _ => Err(format!("expected (max ?v ...), found `{}`", values[0])),
        },
        [v] => Ok(DurationExpr::Single(var(v)?)),
        _ => Err("expected one duration expression".into()),
    }
}

fn parse_transition<T: Scalar>(items: &[SExpr]) -> Result<NetTransition<T>, NetError> {
    let (name, rest) = items.split_first().ok_or_else(|| malformed(":trans")("missing name".into()))?;
    let name = syntax::symbol(name).map_err(malformed(":trans"))?.to_string();
    let section = format!(":trans {name}");
    let err = malformed(&section);
    let mut t = NetTransition { name, params: Vec::new(), inputs: Vec::new(), outputs: Vec::new(), duration: None };
    for (key, values) in syntax::keyword_sections(rest) {
        match key {
            "parameters" => {
                let [list] = values else { return Err(err("expected one parameter list".into())) };
                for (name, sort) in syntax::typed_list(syntax::list(list).map_err(&err)?).map_err(&err)? {
                    if !syntax::is_var(&name) || t.param(&name).is_some() {
                        return Err(err(format!("bad or repeated parameter `{name}`")));
                    }
                    t.params.push(NetParam { name, sort });
                }
            }
            "in" => t.inputs.extend(values.iter().map(parse_arc).collect::<Result<Vec<_>, _>>()?),
            "out" => t.outputs.extend(values.iter().map(parse_arc).collect::<Result<Vec<_>, _>>()?),
            "duration" => t.duration = Some(parse_duration(values).map_err(&err)?),
            other => return Err(err(format!("unsupported key :{other}"))),
        }
    }
    Ok(t)
}

fn parse_goal<T: Scalar>(items: &[SExpr]) -> Result<NetGoal<T>, NetError> {
    let err = malformed(":goal");
    let mut sections = syntax::keyword_sections(items).into_iter();
    let target = match sections.next() {
        Some(("", [mode, target])) if mode.as_symbol() == Some(GOAL_MODE) => target,
        _ => return Err(err(format!("expected {GOAL_MODE} followed by a target"))),
    };
    let target = match target.as_list() {
        Some([op, place, SExpr::List(tokens)]) if op.as_symbol() == Some("==") => {
            let place = place_name(place).ok_or_else(|| err(format!("bad place `{place}`")))?.to_string();
            let mut tokens = tokens.iter().map(syntax::number).collect::<Result<Vec<T>, _>>().map_err(&err)?;
            tokens.sort();
            GoalTarget::Exact { place, tokens }
        }
        Some([op, pairs @ ..]) if op.as_symbol() == Some("contains") => GoalTarget::Contains(
            pairs
                .iter()
                .map(|p| match p.as_list() {
                    Some([place, v]) => Ok((syntax::symbol(place)?.to_string(), syntax::number(v)?)),
                    _ => Err(format!("expected (place value), found `{p}`")),
                })
                .collect::<Result<_, _>>()
                .map_err(&err)?,
        ),
        _ => return Err(err(format!("unsupported target `{target}`"))),
    };
    let mut time_bound = None;
    for (key, values) in sections {
        match (key, values) {
            ("time-bound", [bound]) => match bound.as_list() {
                Some([cmp, v]) if cmp.as_symbol().and_then(Comparator::parse).is_some() => {
                    time_bound = Some(syntax::number(v).map_err(&err)?);
                }
                _ => return Err(err(format!("expected (<= bound), found `{bound}`"))),
            },
            _ => return Err(err(format!("unsupported key :{key}"))),
        }
    }
    Ok(NetGoal { target, time_bound })
}

/// Reads one `(define-net name ...)` form, or a bare sequence of
/// `(:tokens ...)`, `(:place ...)`, `(:trans ...)` and `(:goal ...)` forms.
pub fn parse_lprod<T: Scalar>(forms: &[SExpr]) -> Result<PrTNet<T>, NetError> {
    let (name, body) = match forms {
        [SExpr::List(items)] if forms[0].head() == Some("define-net") => match items.as_slice() {
            [_, name, body @ ..] => (syntax::symbol(name).map_err(malformed("define-net"))?.to_string(), body),
            _ => return Err(malformed("define-net")("missing name".into())),
        },
        _ => ("net".to_string(), forms),
    };
    let mut tokens = Vec::new();
    let mut places = Vec::new();
    let mut marking_src = Vec::new();
    let mut transitions = Vec::new();
    let mut goal = None;
    for form in body {
        let items = syntax::list(form).map_err(malformed("net"))?;
        let (key, rest) = items.split_first().ok_or_else(|| malformed("net")("empty form".into()))?;
        match key.as_keyword() {
            Some("tokens") => {
                for t in rest {
                    match t.as_list() {
                        Some([name, value, sort]) => tokens.push(TokenDecl {
                            name: syntax::symbol(name).map_err(malformed(":tokens"))?.to_string(),
                            value: syntax::number(value).map_err(malformed(":tokens"))?,
                            sort: syntax::symbol(sort).map_err(malformed(":tokens"))?.to_string(),
                        }),
                        _ => return Err(malformed(":tokens")(format!("expected (name value sort), found `{t}`"))),
                    }
                }
            }
            Some("place") => {
                let err = malformed(":place");
                let (name, opts) = rest.split_first().ok_or_else(|| err("missing name".into()))?;
                let name = place_name(name).ok_or_else(|| err(format!("bad name `{name}`")))?.to_string();
                let mut capacity = None;
                let mut initial = Vec::new();
                for (key, values) in syntax::keyword_sections(opts) {
                    match (key, values) {
                        ("capacity", [k]) => {
                            let k = match k {
                                SExpr::Int(k) => u32::try_from(*k).ok(),
                                _ => None,
                            };
                            capacity = Some(k.ok_or_else(|| err(format!("bad capacity for `{name}`")))?);
                        }
                        ("marking", [SExpr::List(vs)]) => {
                            initial = vs.iter().map(syntax::number).collect::<Result<Vec<T>, _>>().map_err(&err)?;
                        }
                        _ => return Err(err(format!("unsupported key :{key} on `{name}`"))),
                    }
                }
                places.push(Place { name, capacity });
                marking_src.push(initial);
            }
            Some("trans") => transitions.push(parse_transition(rest)?),
            Some("goal") => {
                if goal.replace(parse_goal(rest)?).is_some() {
                    return Err(malformed(":goal")("more than one goal".into()));
                }
            }
            _ => return Err(malformed("net")(format!("unsupported form `{key}`"))),
        }
    }
    let net = PrTNet { name, tokens, places, transitions, initial_marking: Marking::from_places(marking_src), goal };
    for d in check_net(&net) {
        match d.issue {
            NetIssue::PlaceTransitionClash(n) => return Err(NetError::PlaceTransitionClash(n)),
            NetIssue::UnboundOutputVar(v) => return Err(NetError::UnboundOutputVar(v)),
            _ => {}
        }
    }
    Ok(net)
}

// ---------------------------------------------------------------- printing

fn sym(s: &str) -> SExpr {
    SExpr::sym(s)
}

fn values_sexpr<T: Scalar>(vs: &[T]) -> SExpr {
    SExpr::list(vs.iter().map(|v| v.to_sexpr()))
}

fn arc_sexpr<T: Scalar>(a: &Arc<T>) -> SExpr {
    SExpr::list(std::iter::once(sym(&a.place)).chain(a.pattern.iter().map(|p| match p {
        PatternItem::Var(v) => sym(v),
        PatternItem::Lit(v) => v.to_sexpr(),
    })))
}

pub fn lprod_sexpr<T: Scalar>(net: &PrTNet<T>) -> SExpr {
    let mut forms = vec![sym("define-net"), sym(&net.name)];
    if !net.tokens.is_empty() {
        forms.push(SExpr::list(
            std::iter::once(SExpr::kw("tokens"))
                .chain(net.tokens.iter().map(|t| SExpr::list([sym(&t.name), t.value.to_sexpr(), sym(&t.sort)]))),
        ));
    }
    for (i, p) in net.places.iter().enumerate() {
        let mut items = vec![SExpr::kw("place"), sym(&p.name)];
        if let Some(k) = p.capacity {
            items.extend([SExpr::kw("capacity"), SExpr::Int(k.into())]);
        }
        let m = net.initial_marking.tokens(i);
        if !m.is_empty() {
            items.extend([SExpr::kw("marking"), values_sexpr(m)]);
        }
        forms.push(SExpr::List(items));
    }
    for t in &net.transitions {
        let params: Vec<_> = t.params.iter().map(|p| (p.name.clone(), p.sort.clone())).collect();
        let mut items = vec![
            SExpr::kw("trans"),
            sym(&t.name),
            SExpr::kw("parameters"),
            SExpr::list(syntax::write_typed_list(&params)),
        ];
        for (key, arcs) in [("in", &t.inputs), ("out", &t.outputs)] {
            if !arcs.is_empty() {
                items.push(SExpr::kw(key));
                items.extend(arcs.iter().map(arc_sexpr));
            }
        }
        match &t.duration {
            Some(DurationExpr::Single(v)) => items.extend([SExpr::kw("duration"), sym(v)]),
            Some(DurationExpr::Max(vs)) => items.extend([
                SExpr::kw("duration"),
                SExpr::list(std::iter::once(sym("max")).chain(vs.iter().map(|v| sym(v)))),
            ]),
            None => {}
        }
        forms.push(SExpr::List(items));
    }
    if let Some(g) = &net.goal {
        let target = match &g.target {
            GoalTarget::Exact { place, tokens } => SExpr::list([sym("=="), sym(place), values_sexpr(tokens)]),
            GoalTarget::Contains(items) => SExpr::list(
                std::iter::once(sym("contains")).chain(items.iter().map(|(p, v)| SExpr::list([sym(p), v.to_sexpr()]))),
            ),
        };
        let mut items = vec![SExpr::kw("goal"), sym(GOAL_MODE), target];
        if let Some(b) = g.time_bound {
            items.extend([SExpr::kw("time-bound"), SExpr::list([sym(Comparator::Le.symbol()), b.to_sexpr()])]);
        }
        forms.push(SExpr::List(items));
    }
    SExpr::List(forms)
}

/// Canonical `.lprod.sexp` text (with trailing newline).
pub fn print_lprod<T: Scalar>(net: &PrTNet<T>) -> String {
    let mut text = write_pretty(&lprod_sexpr(net), crate::TEXT_WIDTH);
    text.push('\n');
    text
}

/// Multiset in PROD notation: `<.5.>+<.10.>`, token-table order first.
fn prod_multiset<T: Scalar>(net: &PrTNet<T>, values: &[T]) -> String {
    let mut rest = values.to_vec();
    let mut ordered = Vec::new();
    for t in &net.tokens {
        while let Some(i) = rest.iter().position(|v| *v == t.value) {
            ordered.push(rest.remove(i));
        }
    }
    ordered.extend(rest);
    ordered.iter().map(|v| format!("<.{v}.>")).collect::<Vec<_>>().join("+")
}

fn prod_arcs<T: Scalar>(arcs: &[Arc<T>]) -> String {
    let body: Vec<String> = arcs
        .iter()
        .map(|a| {
            let items: Vec<String> = a
                .pattern
                .iter()
                .map(|p| match p {
                    PatternItem::Var(v) => format!("<.{}.>", v.trim_start_matches('?')),
                    PatternItem::Lit(v) => format!("<.{v}.>"),
                })
                .collect();
            format!("{}: {};", a.place, items.join("+"))
        })
        .collect();
    format!("{{{}}}", body.join(" "))
}

/// PROD's C-like surface, for reading alongside other PROD material. Not
/// meant to be parsed back.
pub fn print_prod<T: Scalar>(net: &PrTNet<T>) -> String {
    let mut out = String::new();
    for t in &net.tokens {
        let _ = writeln!(out, "#define {} {}", t.name, t.value);
    }
    if !net.tokens.is_empty() {
        out.push('\n');
    }
    for (i, p) in net.places.iter().enumerate() {
        let _ = write!(out, "#place {} mk({})", p.name, prod_multiset(net, net.initial_marking.tokens(i)));
        if let Some(k) = p.capacity {
            let _ = write!(out, " capacity({k})");
        }
        out.push('\n');
    }
    for t in &net.transitions {
        let _ = writeln!(out, "\n#trans {}", t.name);
        let _ = writeln!(out, "in {}", prod_arcs(&t.inputs));
        let _ = writeln!(out, "out {}", prod_arcs(&t.outputs));
        let _ = writeln!(out, "#endtr");
    }
    if let Some(g) = &net.goal {
        let target = match &g.target {
            GoalTarget::Exact { place, tokens } => format!("{place} == {}", prod_multiset(net, tokens)),
            GoalTarget::Contains(items) => {
                items.iter().map(|(p, v)| format!("{p} >= <.{v}.>")).collect::<Vec<_>>().join(" && ")
            }
        };
        let _ = writeln!(out, "\n#define goal {GOAL_MODE}({target})");
    }
    out
}

impl<T: Scalar> fmt::Display for PrTNet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_lprod(self))
    }
}
