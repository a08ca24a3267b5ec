//! Test support: an independent brute-force net explorer, a direct model of
//! the bridge puzzle, a minimal DOT reader and random model generators.
//!
//! Nothing here calls into `bridgenet::reach`; the oracle works from the
//! net's public fields only.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use bridgenet::expr::DurationExpr;
use bridgenet::metamodel::parse_domain_spec;
use bridgenet::prtnet::{GoalTarget, NetGoal, NetTransition, PatternItem, PrTNet};
use bridgenet::sexpr::read_sexprs;
use bridgenet::transform::{tr_j, tr_k, TrjOptions};
use bridgenet::Scalar;
use proptest::prelude::*;

pub const ASN: &str = include_str!("../../fixtures/4ws1tob.asn.sexp");
pub const PDDL: &str = include_str!("../../fixtures/4ws1tob.pddl");
pub const LPROD: &str = include_str!("../../fixtures/4ws1tob.lprod.sexp");

/// The fixture net lowered from the domain description.
pub fn pipeline_net(asn: &str, torch: bool) -> PrTNet<i64> {
    let d = parse_domain_spec(&read_sexprs(asn).unwrap()).unwrap();
    tr_k(&tr_j(&d, TrjOptions { torch }).unwrap().model).unwrap()
}

pub fn lprod_net() -> PrTNet<i64> {
    bridgenet::prtnet::parse_lprod(&read_sexprs(LPROD).unwrap()).unwrap()
}

// ------------------------------------------------------------ net oracle

/// One step of an oracle path: transition, bound parameters in parameter
/// order, duration.
pub type Step<T> = (String, Vec<(String, T)>, T);

type OMarking<T> = Vec<Vec<T>>;

fn count<T: PartialEq>(xs: &[T], x: &T) -> usize {
    xs.iter().filter(|y| *y == x).count()
}

fn allowed<T: Scalar>(net: &PrTNet<T>, t: &NetTransition<T>, var: &str, v: T) -> bool {
    let pinned = |name: &str| {
        let bare = name.strip_prefix('?').unwrap_or(name);
        net.tokens.iter().find(|k| k.name == bare).map(|k| k.value)
    };
    let param = t.params.iter().find(|p| p.name == var);
    match param.and_then(|p| p.sort.clone()) {
        Some(sort) => net.tokens.iter().any(|k| k.sort == sort && k.value == v),
        None => match pinned(var) {
            Some(p) => p == v,
            None => t.params.iter().filter(|p| p.sort.is_none() && p.name != var).all(|p| pinned(&p.name) != Some(v)),
        },
    }
}

fn oracle_duration<T: Scalar>(d: &Option<DurationExpr>, b: &[(String, T)]) -> T {
    let get = |v: &String| b.iter().find(|(n, _)| n == v).map(|(_, x)| *x).unwrap();
    match d {
        None => T::zero(),
        Some(DurationExpr::Single(v)) => get(v),
        Some(DurationExpr::Max(vs)) => vs.iter().map(get).max().unwrap(),
    }
}

/// Every enabled step from `m` with its successor marking, by brute force
/// over all assignments of present values to input variables.
pub fn oracle_successors<T: Scalar>(net: &PrTNet<T>, m: &OMarking<T>) -> Vec<(Step<T>, OMarking<T>)> {
    let place = |name: &str| net.places.iter().position(|p| p.name == name).unwrap();
    let mut values: Vec<T> = m.iter().flatten().copied().collect();
    values.sort();
    values.dedup();
    let mut out = Vec::new();
    for t in &net.transitions {
        let vars: Vec<String> = t
            .params
            .iter()
            .map(|p| p.name.clone())
            .filter(|p| t.inputs.iter().any(|a| a.pattern.contains(&PatternItem::Var(p.clone()))))
            .collect();
        let mut assignment = vec![0usize; vars.len()];
        loop {
            if values.is_empty() && !vars.is_empty() {
                break;
            }
            let b: Vec<(String, T)> = vars.iter().cloned().zip(assignment.iter().map(|&i| values[i])).collect();
            let value = |item: &PatternItem<T>| match item {
                PatternItem::Lit(v) => *v,
                PatternItem::Var(v) => b.iter().find(|(n, _)| n == v).unwrap().1,
            };
            let sorts_ok = b.iter().all(|(v, x)| allowed(net, t, v, *x));
            let mut need: Vec<Vec<T>> = vec![Vec::new(); net.places.len()];
            for a in &t.inputs {
                for item in &a.pattern {
                    need[place(&a.place)].push(value(item));
                }
            }
            let present = need.iter().enumerate().all(|(i, n)| n.iter().all(|v| count(n, v) <= count(&m[i], v)));
            if sorts_ok && present {
                let mut next = m.clone();
                for (i, n) in need.iter().enumerate() {
                    for v in n {
                        let at = next[i].iter().position(|x| x == v).unwrap();
                        next[i].remove(at);
                    }
                }
                for a in &t.outputs {
                    for item in &a.pattern {
                        next[place(&a.place)].push(value(item));
                    }
                }
                next.iter_mut().for_each(|p| p.sort());
                let fits =
                    net.places.iter().zip(&next).all(|(p, toks)| p.capacity.is_none_or(|k| toks.len() <= k as usize));
                if fits {
                    let d = oracle_duration(&t.duration, &b);
                    out.push(((t.name.clone(), b.clone(), d), next));
                }
            }
            // next assignment, odometer style
            let mut i = 0;
            while i < assignment.len() {
                assignment[i] += 1;
                if assignment[i] < values.len() {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
            if i == assignment.len() {
                break;
            }
        }
    }
    out
}

pub fn oracle_initial<T: Scalar>(net: &PrTNet<T>) -> OMarking<T> {
    (0..net.places.len()).map(|i| net.initial_marking.tokens(i).to_vec()).collect()
}

pub fn oracle_goal<T: Scalar>(net: &PrTNet<T>, goal: &NetGoal<T>, m: &OMarking<T>) -> bool {
    let place = |name: &str| net.places.iter().position(|p| p.name == name);
    match &goal.target {
        GoalTarget::Exact { place: p, tokens } => {
            let mut want = tokens.clone();
            want.sort();
            place(p).is_some_and(|i| m[i] == want)
        }
        GoalTarget::Contains(items) => items.iter().all(|(p, v)| {
            let wanted = items.iter().filter(|(q, w)| q == p && w == v).count();
            place(p).is_some_and(|i| count(&m[i], v) >= wanted)
        }),
    }
}

/// Reachable marking count and total edge count.
pub fn oracle_graph_size<T: Scalar>(net: &PrTNet<T>) -> (usize, usize) {
    let start = oracle_initial(net);
    let mut seen: HashSet<OMarking<T>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut edges = 0;
    while let Some(m) = queue.pop_front() {
        for (_, next) in oracle_successors(net, &m) {
            edges += 1;
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    (seen.len(), edges)
}

/// All paths from the initial marking that repeat no marking and stop at
/// the first goal marking.
pub fn oracle_paths<T: Scalar>(net: &PrTNet<T>, goal: &NetGoal<T>) -> Vec<Vec<Step<T>>> {
    fn dfs<T: Scalar>(
        net: &PrTNet<T>,
        goal: &NetGoal<T>,
        m: OMarking<T>,
        on_path: &mut Vec<OMarking<T>>,
        path: &mut Vec<Step<T>>,
        out: &mut Vec<Vec<Step<T>>>,
    ) {
        if oracle_goal(net, goal, &m) {
            out.push(path.clone());
            return;
        }
        on_path.push(m.clone());
        for (step, next) in oracle_successors(net, &m) {
            if on_path.contains(&next) {
                continue;
            }
            path.push(step);
            dfs(net, goal, next, on_path, path, out);
            path.pop();
        }
        on_path.pop();
    }
    let mut out = Vec::new();
    dfs(net, goal, oracle_initial(net), &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

pub fn elapsed<T: Scalar>(p: &[Step<T>]) -> T {
    p.iter().fold(T::zero(), |a, s| a + s.2)
}

/// Engine paths in the oracle's step form.
pub fn as_steps<T: Scalar>(paths: &[bridgenet::reach::SolutionPath<T>]) -> Vec<Vec<Step<T>>> {
    paths.iter().map(|p| p.firings.iter().map(|f| (f.name.clone(), f.binding.clone(), f.duration)).collect()).collect()
}

pub fn sorted<T: Ord + Clone>(mut xs: Vec<T>) -> Vec<T> {
    xs.sort();
    xs
}

// ---------------------------------------------------------- bridge model

/// The puzzle stated directly: soldiers with crossing times, a torch, at
/// most two crossing forward and one returning. Crossing pairs are ordered.
pub struct Bridge {
    pub times: Vec<i64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Side {
    safe: u32,
    torch_safe: bool,
}

/// One crossing: soldiers in the order they were picked, and its duration.
pub type Crossing = (Vec<i64>, i64);

impl Bridge {
    fn moves(&self, s: Side) -> Vec<(Crossing, Side)> {
        let n = self.times.len();
        let mut out = Vec::new();
        if !s.torch_safe {
            for i in 0..n {
                for j in 0..n {
                    let free = |k: usize| s.safe & (1 << k) == 0;
                    if i != j && free(i) && free(j) {
                        let next = Side { safe: s.safe | (1 << i) | (1 << j), torch_safe: true };
                        out.push(((vec![self.times[i], self.times[j]], self.times[i].max(self.times[j])), next));
                    }
                }
            }
        } else {
            for i in 0..n {
                if s.safe & (1 << i) != 0 {
                    let next = Side { safe: s.safe & !(1 << i), torch_safe: false };
                    out.push(((vec![self.times[i]], self.times[i]), next));
                }
            }
        }
        out
    }

    /// Reachable states and transitions between them.
    pub fn size(&self) -> (usize, usize) {
        let start = Side { safe: 0, torch_safe: false };
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        let mut edges = 0;
        while let Some(s) = queue.pop_front() {
            for (_, next) in self.moves(s) {
                edges += 1;
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        (seen.len(), edges)
    }

    /// Every state-simple sequence of crossings ending with everyone safe.
    pub fn plans(&self) -> Vec<Vec<Crossing>> {
        let all = (1u32 << self.times.len()) - 1;
        let mut out = Vec::new();
        let mut path = Vec::new();
        let mut on_path = Vec::new();
        self.search(Side { safe: 0, torch_safe: false }, all, &mut on_path, &mut path, &mut out);
        out
    }

    fn search(
        &self,
        s: Side,
        all: u32,
        on_path: &mut Vec<Side>,
        path: &mut Vec<Crossing>,
        out: &mut Vec<Vec<Crossing>>,
    ) {
        if s.safe == all && s.torch_safe {
            out.push(path.clone());
            return;
        }
        on_path.push(s);
        for (c, next) in self.moves(s) {
            if !on_path.contains(&next) {
                path.push(c);
                self.search(next, all, on_path, path, out);
                path.pop();
            }
        }
        on_path.pop();
    }
}

// ------------------------------------------------------------ DOT reader

#[derive(Debug, Default)]
pub struct DotGraph {
    pub name: Option<String>,
    pub directed: bool,
    pub nodes: BTreeMap<String, BTreeMap<String, String>>,
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Punct(&'static str),
}

fn dot_tokens(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        match chars.get(i + 1) {
                            Some('n') => s.push('\n'),
                            Some(&e) => s.push(e),
                            None => return Err("dangling escape".into()),
                        }
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Tok::Punct("->"));
            i += 2;
        } else if let Some(p) = ["{", "}", "[", "]", ";", ",", "="].into_iter().find(|p| p.starts_with(c)) {
            out.push(Tok::Punct(p));
            i += 1;
        } else if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                i += 1;
            }
            if i == start {
                return Err(format!("unexpected `{c}`"));
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else {
            return Err(format!("unexpected `{c}`"));
        }
    }
    Ok(out)
}

/// Parses `digraph name { stmt* }` with node, edge, attribute and
/// `key=value` statements.
pub fn parse_dot(text: &str) -> Result<DotGraph, String> {
    let toks = dot_tokens(text)?;
    let mut i = 0;
    let mut g = DotGraph::default();
    let id = |i: usize| match toks.get(i) {
        Some(Tok::Id(s)) => Some(s.clone()),
        _ => None,
    };
    let punct = |i: usize, p: &str| {
        toks.get(i)
            == Some(&Tok::Punct(match p {
                "{" => "{",
                "}" => "}",
                "[" => "[",
                "]" => "]",
                ";" => ";",
                "," => ",",
                "=" => "=",
                _ => "->",
            }))
    };
    match id(i).as_deref() {
        Some("digraph") => g.directed = true,
        Some("graph") => {}
        _ => return Err("expected graph or digraph".into()),
    }
    i += 1;
    if let Some(name) = id(i) {
        g.name = Some(name);
        i += 1;
    }
    if !punct(i, "{") {
        return Err("expected `{`".into());
    }
    i += 1;
    let attrs = |i: &mut usize| -> Result<BTreeMap<String, String>, String> {
        let mut out = BTreeMap::new();
        while punct(*i, "[") {
            *i += 1;
            while !punct(*i, "]") {
                let k = id(*i).ok_or("expected attribute name")?;
                if !punct(*i + 1, "=") {
                    return Err("expected `=`".into());
                }
                let v = id(*i + 2).ok_or("expected attribute value")?;
                out.insert(k, v);
                *i += 3;
                if punct(*i, ",") || punct(*i, ";") {
                    *i += 1;
                }
            }
            *i += 1;
        }
        Ok(out)
    };
    loop {
        if punct(i, "}") {
            i += 1;
            break;
        }
        let first = id(i).ok_or_else(|| format!("expected a statement at token {i}"))?;
        i += 1;
        if punct(i, "=") {
            id(i + 1).ok_or("expected a value")?;
            i += 2;
        } else if ["graph", "node", "edge"].contains(&first.as_str()) && punct(i, "[") {
            attrs(&mut i)?;
        } else if punct(i, "->") {
            let mut chain = vec![first];
            while punct(i, "->") {
                chain.push(id(i + 1).ok_or("expected an edge target")?);
                i += 2;
            }
            let a = attrs(&mut i)?;
            for n in &chain {
                g.nodes.entry(n.clone()).or_default();
            }
            for w in chain.windows(2) {
                g.edges.push((w[0].clone(), w[1].clone(), a.clone()));
            }
        } else {
            let a = attrs(&mut i)?;
            g.nodes.entry(first).or_default().extend(a);
        }
        if punct(i, ";") {
            i += 1;
        }
    }
    if i != toks.len() {
        return Err("trailing input after `}`".into());
    }
    Ok(g)
}

// ------------------------------------------------------------ generators

/// A random bridge instance as domain-description text: `n` soldiers with
/// distinct times in 1..30, forward capacity `ks`, one returning.
pub fn random_asn(times: &[i64], ks: usize, t_max: i64) -> String {
    let n = times.len();
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let params: Vec<String> = times.iter().enumerate().map(|(i, t)| format!("(t{i} {t} real)")).collect();
    let forward = if ks == 2 {
        "(eS (Unsafe (?x ?y) Safe) (time (max (?tx ?ty))))"
    } else {
        "(eS (Unsafe ?x Safe) (time (?tx)))"
    };
    format!(
        "(def-abstract-semantic-net
           (problem-domain rnd)
           (parameters (n {n} int) (KS {ks} int) (KU 1 int) {} (t-max {t_max} real))
           (entities (A ({})) (AS (Safe Unsafe)))
           (events {forward} (eU (Safe ?x Unsafe) (time (?tx))))
           (initial-conditions (A ({})))
           (goal-conditions (A ({})) (<= total-time t-max)))",
        params.join(" "),
        names.join(" "),
        vec!["atUnsafe"; n].join(" "),
        vec!["atSafe"; n].join(" "),
    )
}

/// Soldier count 1..=4, distinct times, forward capacity, time bound and
/// whether the torch is modelled.
pub fn arb_bridge() -> impl Strategy<Value = (Vec<i64>, usize, i64, bool)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            proptest::sample::subsequence((1i64..30).collect::<Vec<_>>(), n).prop_shuffle(),
            prop_oneof![Just(1usize), Just(2usize)],
            0i64..=150,
            prop_oneof![3 => Just(true), 1 => Just(false)],
        )
    })
}

pub fn distinct_names(prefix: &'static str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Value sets small enough for exhaustive comparison.
pub fn small_values() -> impl Strategy<Value = BTreeSet<i64>> {
    proptest::collection::btree_set(1i64..20, 1..=4)
}

/// Draws choices from a fixed byte stream so dependent structure can be
/// built without nested strategies.
pub struct Picker<T> {
    bytes: Vec<u8>,
    values: Vec<T>,
    at: usize,
    vat: usize,
}

impl<T: Copy> Picker<T> {
    pub fn new(bytes: Vec<u8>, values: Vec<T>) -> Self {
        Picker { bytes, values, at: 0, vat: 0 }
    }

    /// A number in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        let b = self.bytes[self.at % self.bytes.len()];
        self.at += 1;
        b as usize % n
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn coin(&mut self) -> bool {
        self.below(2) == 0
    }

    pub fn value(&mut self) -> T {
        let v = self.values[self.vat % self.values.len()];
        self.vat += 1;
        v
    }

    pub fn pick<'a, U>(&mut self, xs: &'a [U]) -> &'a U {
        &xs[self.below(xs.len())]
    }
}

fn choices<T: Scalar>(value: impl Strategy<Value = T>) -> impl Strategy<Value = (Vec<u8>, Vec<T>)> {
    (proptest::collection::vec(any::<u8>(), 512), proptest::collection::vec(value, 64))
}

pub fn arb_pddl<T: Scalar>(value: impl Strategy<Value = T>) -> impl Strategy<Value = bridgenet::pddl::PddlModel<T>> {
    choices(value).prop_map(|(b, v)| build_pddl(&mut Picker::new(b, v)))
}

pub fn arb_net<T: Scalar>(value: impl Strategy<Value = T>) -> impl Strategy<Value = PrTNet<T>> {
    choices(value).prop_map(|(b, v)| build_net(&mut Picker::new(b, v)))
}

/// Typed entries first: an untyped entry ahead of a typed one would read
/// back with that type.
fn typed_then_untyped(
    p: &mut Picker<impl Copy>,
    prefix: &str,
    n: usize,
    types: &[&str],
) -> Vec<(String, Option<String>)> {
    let mut tys: Vec<Option<String>> = (0..n).map(|_| p.coin().then(|| p.pick(types).to_string())).collect();
    tys.sort_by_key(Option::is_none);
    tys.into_iter().enumerate().map(|(i, t)| (format!("{prefix}{i}"), t)).collect()
}

fn random_duration(p: &mut Picker<impl Copy>, vars: &[String]) -> Option<DurationExpr> {
    if vars.is_empty() || p.coin() {
        return None;
    }
    if p.coin() {
        return Some(DurationExpr::Single(p.pick(vars).clone()));
    }
    let n = p.range(1, vars.len());
    Some(DurationExpr::Max((0..n).map(|_| p.pick(vars).clone()).collect()))
}

pub fn build_pddl<T: Scalar>(p: &mut Picker<T>) -> bridgenet::pddl::PddlModel<T> {
    use bridgenet::pddl::*;
    const TYPES: [&str; 4] = ["sold", "torch", "place", "item"];
    let objects: Vec<TypedObject> =
        (0..p.range(1, 6)).map(|i| TypedObject { name: format!("o{i}"), ty: p.pick(&TYPES).to_string() }).collect();
    let predicates: Vec<PredSig> = (0..p.range(1, 3))
        .map(|i| {
            let n = p.range(0, 2);
            let params =
                typed_then_untyped(p, "?v", n, &TYPES).into_iter().map(|(name, ty)| TypedVar { name, ty }).collect();
            PredSig { name: format!("p{i}"), params }
        })
        .collect();
    let names: Vec<String> = objects.iter().map(|o| o.name.clone()).collect();
    let literal = |p: &mut Picker<T>, terms: &[String]| {
        let sig = p.pick(&predicates).clone();
        let args = sig.params.iter().map(|_| p.pick(terms).clone()).collect();
        Literal { positive: p.coin(), atom: Atom { pred: sig.name, args } }
    };
    let literals = (0..p.range(0, 6)).map(|_| literal(p, &names)).collect();
    let timed: Vec<&str> = TYPES.iter().copied().filter(|_| p.coin()).collect();
    let ts = objects.iter().filter(|o| timed.contains(&o.ty.as_str())).map(|o| (o.name.clone(), p.value())).collect();
    let init = InitState { literals, elapsed: p.value(), ts };
    let goal_literals = (0..p.range(1, 4)).map(|_| literal(p, &names)).collect();
    let time_constraint = p.coin().then(|| TimeConstraint { cmp: bridgenet::expr::Comparator::Le, bound: p.value() });
    let goal = GoalSpec { literals: goal_literals, time_constraint };
    let actions = (0..p.range(0, 3))
        .map(|i| {
            let n = p.range(0, 3);
            let params: Vec<TypedVar> =
                typed_then_untyped(p, "?a", n, &TYPES).into_iter().map(|(name, ty)| TypedVar { name, ty }).collect();
            let vars: Vec<String> = params.iter().map(|v| v.name.clone()).collect();
            let terms: Vec<String> = vars.iter().chain(&names).cloned().collect();
            let precondition = (0..p.range(0, 3)).map(|_| literal(p, &terms)).collect();
            let effect = (0..p.range(0, 3)).map(|_| literal(p, &terms)).collect();
            PddlAction { name: format!("a{i}"), params, precondition, effect, time_effect: random_duration(p, &vars) }
        })
        .collect();
    PddlModel {
        problem_name: format!("prob{}", p.below(100)),
        domain_name: format!("dom{}", p.below(100)),
        objects,
        predicates,
        init,
        goal,
        actions,
    }
}

pub fn build_net<T: Scalar>(p: &mut Picker<T>) -> PrTNet<T> {
    use bridgenet::prtnet::*;
    const SORTS: [&str; 3] = ["a", "b", "c"];
    let tokens = (0..p.range(0, 5))
        .map(|i| TokenDecl { name: format!("k{i}"), value: p.value(), sort: p.pick(&SORTS).to_string() })
        .collect();
    let places: Vec<Place> = (0..p.range(1, 4))
        .map(|i| Place { name: format!("P{i}"), capacity: p.coin().then(|| p.below(7) as u32) })
        .collect();
    let marking = places.iter().map(|_| (0..p.range(0, 4)).map(|_| p.value()).collect()).collect();
    let place_names: Vec<String> = places.iter().map(|q| q.name.clone()).collect();
    let transitions = (0..p.range(0, 3))
        .map(|i| {
            let n = p.range(0, 4);
            let params: Vec<NetParam> = typed_then_untyped(p, "?v", n, &SORTS)
                .into_iter()
                .map(|(name, sort)| NetParam { name, sort })
                .collect();
            let vars: Vec<String> = params.iter().map(|q| q.name.clone()).collect();
            let arcs = |p: &mut Picker<T>, usable: &[String]| -> Vec<Arc<T>> {
                (0..p.range(0, 3))
                    .map(|_| {
                        let place = p.pick(&place_names).clone();
                        let pattern = (0..p.range(0, 3))
                            .map(|_| {
                                if !usable.is_empty() && p.coin() {
                                    PatternItem::Var(p.pick(usable).clone())
                                } else {
                                    PatternItem::Lit(p.value())
                                }
                            })
                            .collect();
                        Arc { place, pattern }
                    })
                    .collect()
            };
            let inputs = arcs(p, &vars);
            let bound: Vec<String> =
                vars.iter().filter(|v| inputs.iter().any(|a| a.vars().any(|x| x == *v))).cloned().collect();
            let outputs = arcs(p, &bound);
            NetTransition { name: format!("T{i}"), params, inputs, outputs, duration: random_duration(p, &vars) }
        })
        .collect();
    let goal = p.coin().then(|| {
        let target = if p.coin() {
            let mut tokens: Vec<T> = (0..p.range(0, 4)).map(|_| p.value()).collect();
            tokens.sort();
            GoalTarget::Exact { place: p.pick(&place_names).clone(), tokens }
        } else {
            GoalTarget::Contains((0..p.range(0, 3)).map(|_| (p.pick(&place_names).clone(), p.value())).collect())
        };
        NetGoal { target, time_bound: p.coin().then(|| p.value()) }
    });
    PrTNet {
        name: format!("n{}", p.below(100)),
        tokens,
        places,
        transitions,
        initial_marking: bridgenet::prtnet::Marking::from_places(marking),
        goal,
    }
}

/// Nets that move declared tokens between places: each transition consumes
/// its variables (plus an occasional literal) and puts some of them back.
/// Firings never add tokens, so the marking space is finite.
pub fn build_flow_net(p: &mut Picker<i64>) -> PrTNet<i64> {
    use bridgenet::prtnet::*;
    const SORTS: [&str; 2] = ["a", "b"];
    let mut values: Vec<i64> = (0..p.range(2, 5)).map(|_| p.range(1, 9) as i64).collect();
    values.sort();
    values.dedup();
    let tokens: Vec<TokenDecl<i64>> = values
        .iter()
        .enumerate()
        .map(|(i, &value)| TokenDecl { name: format!("k{i}"), value, sort: p.pick(&SORTS).to_string() })
        .collect();
    let places: Vec<Place> = (0..p.range(2, 3))
        .map(|i| Place { name: format!("P{i}"), capacity: (p.below(4) == 0).then(|| p.range(1, 4) as u32) })
        .collect();
    let mut marking = vec![Vec::new(); places.len()];
    for t in &tokens {
        marking[p.below(places.len())].push(t.value);
        if p.below(5) == 0 {
            marking[p.below(places.len())].push(t.value);
        }
    }
    let place_names: Vec<String> = places.iter().map(|q| q.name.clone()).collect();
    let transitions = (0..p.range(1, 3))
        .map(|i| {
            let mut params: Vec<NetParam> = Vec::new();
            for j in 0..p.range(1, 3) {
                let param = match p.below(5) {
                    0 | 1 => NetParam { name: format!("?v{j}"), sort: Some(p.pick(&SORTS).to_string()) },
                    2 => NetParam { name: format!("?{}", p.pick(&tokens).name), sort: None },
                    _ => NetParam { name: format!("?v{j}"), sort: None },
                };
                if params.iter().all(|q| q.name != param.name) {
                    params.push(param);
                }
            }
            params.sort_by_key(|q| q.sort.is_none());
            let mut inputs: Vec<Arc<i64>> = (0..1 + usize::from(p.below(3) == 0))
                .map(|_| Arc { place: p.pick(&place_names).clone(), pattern: Vec::new() })
                .collect();
            let mut items: Vec<PatternItem<i64>> = params.iter().map(|q| PatternItem::Var(q.name.clone())).collect();
            if p.below(4) == 0 {
                items.push(PatternItem::Lit(p.pick(&values).to_owned()));
            }
            for item in &items {
                let k = p.below(inputs.len());
                inputs[k].pattern.push(item.clone());
            }
            inputs.retain(|a| !a.pattern.is_empty());
            if p.below(4) == 0 {
                items.remove(p.below(items.len()));
            }
            let mut outputs: Vec<Arc<i64>> = Vec::new();
            for item in items {
                let place = p.pick(&place_names).clone();
                match outputs.iter_mut().find(|a| a.place == place) {
                    Some(a) => a.pattern.push(item),
                    None => outputs.push(Arc { place, pattern: vec![item] }),
                }
            }
            let vars: Vec<String> = params.iter().map(|q| q.name.clone()).collect();
            NetTransition { name: format!("T{i}"), params, inputs, outputs, duration: random_duration(p, &vars) }
        })
        .collect();
    let target = if p.coin() {
        GoalTarget::Contains((0..p.range(1, 2)).map(|_| (p.pick(&place_names).clone(), *p.pick(&values))).collect())
    } else {
        let mut tokens: Vec<i64> = values.iter().copied().filter(|_| p.coin()).collect();
        tokens.sort();
        GoalTarget::Exact { place: p.pick(&place_names).clone(), tokens }
    };
    let goal = Some(NetGoal { target, time_bound: p.coin().then(|| p.range(0, 20) as i64) });
    PrTNet { name: "flow".into(), tokens, places, transitions, initial_marking: Marking::from_places(marking), goal }
}

pub fn arb_flow_net() -> impl Strategy<Value = PrTNet<i64>> {
    choices(0i64..10).prop_map(|(b, v)| build_flow_net(&mut Picker::new(b, v)))
}
