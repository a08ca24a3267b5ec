//! Model-to-model lowering: domain description to PDDL (`tr_j`), PDDL to
//! Pr/T net (`tr_k`), and the inverse net to PDDL mapping.
//!
//! PDDL constructs and net constructs correspond one to one through
//! [`MAPPINGS`]. Negated location facts carry no net content: a token sits
//! in exactly one place, so `tr_k` drops them and `net_to_pddl` regenerates
//! them.

use std::collections::HashSet;

use thiserror::Error;

use crate::expr::DurationExpr;
use crate::metamodel::{DomainSpec, EventDecl};
use crate::pddl::{
    GoalSpec, InitState, Literal, PddlAction, PddlModel, PredSig, TimeConstraint, TypedObject, TypedVar,
};
use crate::prtnet::{
    Arc, GoalTarget, Marking, NetGoal, NetParam, NetTransition, PatternItem, Place, PrTNet, TokenDecl,
};
use crate::scalar::Scalar;

/// PDDL construct and the net construct it becomes.
pub const MAPPINGS: [(&str, &str); 4] =
    [(":init", "initial-marking"), (":goal", "final-marking"), (":action", "trans"), (":objects", "tokens")];

pub fn net_construct_for(pddl: &str) -> Option<&'static str> {
    MAPPINGS.iter().find(|(p, _)| *p == pddl).map(|(_, n)| *n)
}

pub fn pddl_construct_for(net: &str) -> Option<&'static str> {
    MAPPINGS.iter().find(|(_, n)| *n == net).map(|(p, _)| *p)
}

pub const LOCATION_PREDICATE: &str = "pl";
pub const MOVER_TYPE: &str = "sold";
pub const PLACE_TYPE: &str = "place";
pub const TORCH: &str = "torch";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("goal has no time bound")]
    NoGoalTimeBound,
    #[error("event `{0}` moves a number of entities other than one or two")]
    UnsupportedEventShape(String),
    #[error("parameter `{0}` is missing")]
    MissingParameter(String),
    #[error("entity `{0}` is not declared")]
    UnknownEntity(String),
    #[error("action `{0}` moves an object it does not take from a place")]
    NonLocalEffect(String),
    #[error("object `{0}` has no crossing time")]
    MissingTsFluent(String),
    #[error("literal `{0}` is not a location fact")]
    UnsupportedLiteral(String),
    #[error("token value {0} cannot be mapped back to one object name")]
    AmbiguousTokenNaming(String),
    #[error("transition `{0}` creates tokens")]
    TokenCreation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformWarning {
    /// The action needs more distinct movers than exist.
    StaticallyUnsatisfiable { action: String, arity: usize, movers: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrjOptions {
    /// Synthesize the torch object that travels with every crossing.
    pub torch: bool,
}

impl Default for TrjOptions {
    fn default() -> Self {
        TrjOptions { torch: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrjOutput<T> {
    pub model: PddlModel<T>,
    pub warnings: Vec<TransformWarning>,
}

fn location(positive: bool, obj: &str, place: &str) -> Literal {
    let l = Literal::pos(LOCATION_PREDICATE, &[obj, place]);
    Literal { positive, ..l }
}

/// `(pl o P)` followed by `(not (pl o Q))` for every other place `Q`.
fn located(obj: &str, place: &str, places: &[String]) -> Vec<Literal> {
    std::iter::once(location(true, obj, place))
        .chain(places.iter().filter(|q| *q != place).map(|q| location(false, obj, q)))
        .collect()
}

/// Places in declaration order: the values of the entity holding the first
/// event's source place, or the places events mention if none does.
fn domain_places<T: Scalar>(d: &DomainSpec<T>) -> Vec<String> {
    let mut mentioned: Vec<String> = Vec::new();
    for e in &d.events {
        for p in [&e.from_place, &e.to_place] {
            if !mentioned.contains(p) {
                mentioned.push(p.clone());
            }
        }
    }
    let movers = d.movers().map(|m| m.name.as_str());
    d.entities
        .iter()
        .filter(|e| Some(e.name.as_str()) != movers)
        .find(|e| mentioned.iter().all(|p| e.values.contains(p)) && !mentioned.is_empty())
        .map_or(mentioned, |e| e.values.clone())
}

fn event_action(e: &EventDecl, places: &[String], torch: bool) -> Result<PddlAction, TransformError> {
    if !(1..=2).contains(&e.vars.len()) {
        return Err(TransformError::UnsupportedEventShape(e.name.clone()));
    }
    let movers = e.vars.iter().map(String::as_str).chain(torch.then_some(TORCH));
    let mut precondition = Vec::new();
    let mut effect = Vec::new();
    for m in movers {
        precondition.extend(located(m, &e.from_place, places));
        effect.push(location(true, m, &e.to_place));
        effect.push(location(false, m, &e.from_place));
    }
    let bad_shape = || TransformError::UnsupportedEventShape(e.name.clone());
    let mut unmapped = false;
    let time = e.duration.map_vars(|tv| {
        e.var_for_time(tv).map(str::to_string).unwrap_or_else(|| {
            unmapped = true;
            tv.to_string()
        })
    });
    if unmapped {
        return Err(bad_shape());
    }
    Ok(PddlAction {
        name: format!("to{}", e.to_place),
        params: e.vars.iter().map(|v| TypedVar { name: v.clone(), ty: Some(MOVER_TYPE.into()) }).collect(),
        precondition,
        effect,
        time_effect: Some(time),
    })
}

/// Lowers a domain description to PDDL. Movers become `sold` objects with
/// crossing times `t0`, `t1`, ...; each event becomes an action named after
/// its destination. The torch, when synthesized, starts and ends with the
/// first mover and accompanies every crossing.
pub fn tr_j<T: Scalar>(d: &DomainSpec<T>, opts: TrjOptions) -> Result<TrjOutput<T>, TransformError> {
    let movers = d.movers().ok_or_else(|| TransformError::UnknownEntity(d.initial_condition.entity.clone()))?;
    let places = domain_places(d);
    let (cmp, bound) = d.goal_time_bound().ok_or(TransformError::NoGoalTimeBound)?;

    let mut objects: Vec<TypedObject> =
        movers.values.iter().map(|v| TypedObject { name: v.clone(), ty: MOVER_TYPE.into() }).collect();
    if opts.torch {
        objects.push(TypedObject { name: TORCH.into(), ty: TORCH.into() });
    }
    objects.extend(places.iter().map(|p| TypedObject { name: p.clone(), ty: PLACE_TYPE.into() }));

    let place_in = |cond: &crate::metamodel::ConditionDecl<T>, v: &str| {
        cond.place_of(v).map(str::to_string).ok_or_else(|| TransformError::UnknownEntity(v.to_string()))
    };
    let mut init_literals = Vec::new();
    let mut goal_literals = Vec::new();
    let mut ts = Vec::new();
    for (i, v) in movers.values.iter().enumerate() {
        init_literals.extend(located(v, &place_in(&d.initial_condition, v)?, &places));
        goal_literals.extend(located(v, &place_in(&d.goal_condition, v)?, &places));
        let name = DomainSpec::<T>::time_param_name(i);
        let t = d.param(&name).ok_or(TransformError::MissingParameter(name))?;
        ts.push((v.clone(), t.value));
    }
    if opts.torch {
        if let Some(first) = movers.values.first() {
            init_literals.extend(located(TORCH, &place_in(&d.initial_condition, first)?, &places));
            goal_literals.extend(located(TORCH, &place_in(&d.goal_condition, first)?, &places));
        }
    }

    let actions = d.events.iter().map(|e| event_action(e, &places, opts.torch)).collect::<Result<Vec<_>, _>>()?;
    let warnings = actions
        .iter()
        .filter(|a| a.params.len() > movers.values.len())
        .map(|a| TransformWarning::StaticallyUnsatisfiable {
            action: a.name.clone(),
            arity: a.params.len(),
            movers: movers.values.len(),
        })
        .collect();

    let model = PddlModel {
        problem_name: format!("{}01", d.problem_domain),
        domain_name: d.problem_domain.clone(),
        objects,
        predicates: vec![location_signature()],
        init: InitState { literals: init_literals, elapsed: T::zero(), ts },
        goal: GoalSpec { literals: goal_literals, time_constraint: Some(TimeConstraint { cmp, bound }) },
        actions,
    };
    Ok(TrjOutput { model, warnings })
}

fn location_signature() -> PredSig {
    PredSig {
        name: LOCATION_PREDICATE.into(),
        params: vec![TypedVar { name: "?sold".into(), ty: None }, TypedVar { name: "?place".into(), ty: None }],
    }
}

// ------------------------------------------------------------------ tr_k

struct Lowering<'m, T> {
    model: &'m PddlModel<T>,
    places: Vec<String>,
    tokens: Vec<TokenDecl<T>>,
}

impl<T: Scalar> Lowering<'_, T> {
    /// `(pl term place)` as a pair; other literal shapes are rejected.
    fn fact<'l>(&self, l: &'l Literal) -> Result<(&'l str, &'l str), TransformError> {
        match l.atom.args.as_slice() {
            [obj, place] if self.places.contains(place) => Ok((obj, place)),
            _ => Err(TransformError::UnsupportedLiteral(l.to_string())),
        }
    }

    fn value_of(&self, obj: &str) -> Option<T> {
        self.tokens.iter().find(|t| t.name == obj).map(|t| t.value)
    }

    fn transition(&self, a: &PddlAction) -> Result<NetTransition<T>, TransformError> {
        let nonlocal = || TransformError::NonLocalEffect(a.name.clone());
        let mut params: Vec<NetParam> =
            a.params.iter().map(|p| NetParam { name: p.name.clone(), sort: p.ty.clone() }).collect();
        let mut term_var = |term: &str| -> String {
            if term.starts_with('?') {
                return term.to_string();
            }
            let var = format!("?{term}");
            if !params.iter().any(|p| p.name == var) {
                let sort = self.model.object(term).map(|o| o.ty.clone());
                params.push(NetParam { name: var.clone(), sort });
            }
            var
        };

        let mut taken: Vec<(String, String)> = Vec::new();
        for l in a.precondition.iter().filter(|l| l.positive) {
            let (obj, place) = self.fact(l)?;
            taken.push((term_var(obj), place.to_string()));
        }
        let mut deleted = HashSet::new();
        let mut added: Vec<(String, String)> = Vec::new();
        for l in &a.effect {
            let (obj, place) = self.fact(l)?;
            let var = term_var(obj);
            if !taken.iter().any(|(v, _)| *v == var) {
                return Err(nonlocal());
            }
            if l.positive {
                added.push((var, place.to_string()));
            } else if taken.contains(&(var.clone(), place.to_string())) {
                deleted.insert(var);
            } else {
                return Err(nonlocal());
            }
        }
        // a taken token either moves to exactly one new place or stays put
        let mut produced: Vec<(String, String)> = Vec::new();
        for (var, place) in &added {
            let from = taken.iter().find(|(v, _)| v == var).map(|(_, p)| p).expect("checked above");
            let moves = deleted.contains(var);
            if (moves && produced.iter().any(|(v, _)| v == var)) || (!moves && from != place) {
                return Err(nonlocal());
            }
            if !produced.contains(&(var.clone(), place.clone())) {
                produced.push((var.clone(), place.clone()));
            }
        }
        for (var, place) in &taken {
            if !deleted.contains(var) && !produced.iter().any(|(v, _)| v == var) {
                produced.push((var.clone(), place.clone()));
            }
        }

        Ok(NetTransition {
            name: a.name.clone(),
            params,
            inputs: group_arcs(&taken),
            outputs: group_arcs(&produced),
            duration: a.time_effect.clone(),
        })
    }
}

/// Groups `(var, place)` pairs into one arc per place, in first-seen order.
fn group_arcs<T>(pairs: &[(String, String)]) -> Vec<Arc<T>> {
    let mut arcs: Vec<Arc<T>> = Vec::new();
    for (var, place) in pairs {
        match arcs.iter_mut().find(|a| &a.place == place) {
            Some(a) => a.pattern.push(PatternItem::Var(var.clone())),
            None => arcs.push(Arc { place: place.clone(), pattern: vec![PatternItem::Var(var.clone())] }),
        }
    }
    arcs
}

/// Lowers PDDL to a net. Place-typed objects become places; every other
/// object becomes a token whose value is its crossing time. Objects of
/// untimed types get the smallest positive integers no crossing time uses.
pub fn tr_k<T: Scalar>(m: &PddlModel<T>) -> Result<PrTNet<T>, TransformError> {
    let places: Vec<String> = m.objects.iter().filter(|o| o.ty == PLACE_TYPE).map(|o| o.name.clone()).collect();
    let timed: HashSet<&str> = m.init.ts.iter().filter_map(|(o, _)| m.object(o)).map(|o| o.ty.as_str()).collect();
    let used: HashSet<T> = m.init.ts.iter().map(|(_, v)| *v).collect();
    let mut next_free = T::one();
    let mut tokens = Vec::new();
    for o in m.objects.iter().filter(|o| o.ty != PLACE_TYPE) {
        let value = match m.init.ts_of(&o.name) {
            Some(v) => v,
            None if timed.contains(o.ty.as_str()) => return Err(TransformError::MissingTsFluent(o.name.clone())),
            None => {
                while used.contains(&next_free) {
                    next_free = next_free + T::one();
                }
                let v = next_free;
                next_free = next_free + T::one();
                v
            }
        };
        tokens.push(TokenDecl { name: o.name.clone(), value, sort: o.ty.clone() });
    }
    let low = Lowering { model: m, places, tokens };

    let mut marking = Marking::empty(low.places.len());
    for l in m.init.literals.iter().filter(|l| l.positive) {
        let (obj, place) = low.fact(l)?;
        let v = low.value_of(obj).ok_or_else(|| TransformError::UnsupportedLiteral(l.to_string()))?;
        marking.add(low.places.iter().position(|p| p == place).expect("fact checks place"), v);
    }

    let mut goal_facts = Vec::new();
    for l in m.goal.literals.iter().filter(|l| l.positive) {
        let (obj, place) = low.fact(l)?;
        let v = low.value_of(obj).ok_or_else(|| TransformError::UnsupportedLiteral(l.to_string()))?;
        goal_facts.push((place.to_string(), v));
    }
    let single_place = goal_facts.first().map(|(p, _)| p.clone()).filter(|p| goal_facts.iter().all(|(q, _)| q == p));
    let target = match single_place {
        Some(place) if goal_facts.len() == low.tokens.len() => {
            let mut tokens: Vec<T> = goal_facts.iter().map(|(_, v)| *v).collect();
            tokens.sort();
            GoalTarget::Exact { place, tokens }
        }
        _ => GoalTarget::Contains(goal_facts),
    };
    let goal = NetGoal { target, time_bound: m.goal.time_constraint.map(|tc| tc.bound) };

    let transitions = m.actions.iter().map(|a| low.transition(a)).collect::<Result<Vec<_>, _>>()?;
    Ok(PrTNet {
        name: m.domain_name.clone(),
        tokens: low.tokens,
        places: low.places.into_iter().map(|name| Place { name, capacity: None }).collect(),
        transitions,
        initial_marking: marking,
        goal: Some(goal),
    })
}

// --------------------------------------------------------- net_to_pddl

/// Inverse of [`tr_k`]: tokens named through the net's token table become
/// objects, places become `place` objects, transitions become actions with
/// the complement facts regenerated.
pub fn net_to_pddl<T: Scalar>(net: &PrTNet<T>) -> Result<PddlModel<T>, TransformError> {
    let places: Vec<String> = net.places.iter().map(|p| p.name.clone()).collect();
    let ambiguous = |v: T| TransformError::AmbiguousTokenNaming(v.to_string());
    let name_of = |v: T| -> Result<&str, TransformError> {
        let mut named = net.tokens.iter().filter(|t| t.value == v);
        match (named.next(), named.next()) {
            (Some(t), None) => Ok(t.name.as_str()),
            _ => Err(ambiguous(v)),
        }
    };

    // sorts whose tokens carry crossing times: those of duration variables
    let mut timed_sorts: HashSet<&str> = HashSet::new();
    let mut untyped_duration = false;
    for t in &net.transitions {
        for v in t.duration.iter().flat_map(DurationExpr::vars) {
            match t.param(v).and_then(|p| p.sort.as_deref()) {
                Some(s) => {
                    timed_sorts.insert(s);
                }
                None => untyped_duration = true,
            }
        }
    }
    let timed = |sort: &str| untyped_duration || timed_sorts.contains(sort);

    let mut objects: Vec<TypedObject> =
        net.tokens.iter().map(|t| TypedObject { name: t.name.clone(), ty: t.sort.clone() }).collect();
    objects.extend(places.iter().map(|p| TypedObject { name: p.clone(), ty: PLACE_TYPE.into() }));

    let mut placed: Vec<(String, &str)> = Vec::new();
    for (i, p) in places.iter().enumerate() {
        for v in net.initial_marking.tokens(i) {
            let name = name_of(*v)?;
            if placed.iter().any(|(n, _)| n == name) {
                return Err(ambiguous(*v));
            }
            placed.push((name.to_string(), p));
        }
    }
    let mut init_literals = Vec::new();
    for t in &net.tokens {
        if let Some((_, p)) = placed.iter().find(|(n, _)| *n == t.name) {
            init_literals.extend(located(&t.name, p, &places));
        }
    }
    let ts = net.tokens.iter().filter(|t| timed(&t.sort)).map(|t| (t.name.clone(), t.value)).collect();

    let mut goal_literals = Vec::new();
    let mut time_constraint = None;
    if let Some(g) = &net.goal {
        match &g.target {
            GoalTarget::Exact { place, tokens } => {
                for t in net.tokens.iter().filter(|t| tokens.contains(&t.value)) {
                    goal_literals.extend(located(&t.name, place, &places));
                }
                for v in tokens {
                    name_of(*v)?;
                }
            }
            GoalTarget::Contains(items) => {
                for (place, v) in items {
                    goal_literals.extend(located(name_of(*v)?, place, &places));
                }
            }
        }
        time_constraint = g.time_bound.map(|bound| TimeConstraint { cmp: Default::default(), bound });
    }

    let actions = net.transitions.iter().map(|t| transition_action(net, t, &places)).collect::<Result<Vec<_>, _>>()?;
    Ok(PddlModel {
        problem_name: format!("{}01", net.name),
        domain_name: net.name.clone(),
        objects,
        predicates: vec![location_signature()],
        init: InitState { literals: init_literals, elapsed: T::zero(), ts },
        goal: GoalSpec { literals: goal_literals, time_constraint },
        actions,
    })
}

fn transition_action<T: Scalar>(
    net: &PrTNet<T>,
    t: &NetTransition<T>,
    places: &[String],
) -> Result<PddlAction, TransformError> {
    // `?torch - torch` stands for the object `torch`
    let constant = |p: &NetParam| -> Option<String> {
        let name = p.name.strip_prefix('?')?;
        let tok = net.token_named(name)?;
        (p.sort.as_deref().is_none_or(|s| s == tok.sort)).then(|| name.to_string())
    };
    let term = |item: &PatternItem<T>| -> Result<String, TransformError> {
        match item {
            PatternItem::Var(v) => Ok(t.param(v).and_then(constant).unwrap_or_else(|| v.clone())),
            PatternItem::Lit(v) => net
                .token_with_value(*v)
                .map(|tok| tok.name.clone())
                .ok_or_else(|| TransformError::AmbiguousTokenNaming(v.to_string())),
        }
    };
    let params = t
        .params
        .iter()
        .filter(|p| constant(p).is_none())
        .map(|p| TypedVar { name: p.name.clone(), ty: p.sort.clone() })
        .collect();

    let mut precondition = Vec::new();
    let mut from: Vec<(String, &str)> = Vec::new();
    for arc in &t.inputs {
        for item in &arc.pattern {
            let term = term(item)?;
            precondition.extend(located(&term, &arc.place, places));
            from.push((term, &arc.place));
        }
    }
    let mut effect = Vec::new();
    let mut produced: HashSet<String> = HashSet::new();
    for arc in &t.outputs {
        for item in &arc.pattern {
            let term = term(item)?;
            let src = from
                .iter()
                .find(|(n, _)| *n == term)
                .map(|(_, p)| *p)
                .ok_or_else(|| TransformError::TokenCreation(t.name.clone()))?;
            effect.push(location(true, &term, &arc.place));
            if src != arc.place {
                effect.push(location(false, &term, src));
            }
            produced.insert(term);
        }
    }
    // consumed without being produced
    for (term, src) in &from {
        if !produced.contains(term) {
            effect.push(location(false, term, src));
        }
    }
    Ok(PddlAction { name: t.name.clone(), params, precondition, effect, time_effect: t.duration.clone() })
}
