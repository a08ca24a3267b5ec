//! Net execution: enabled firings, the reachability graph, the
//! `EventuallyOnSomeBranch` check and goal-path enumeration.
//!
//! Everything here is deterministic. Transitions are tried in declaration
//! order, bindings in ascending order of their value tuples, nodes are
//! numbered in breadth-first discovery order, and paths come out in
//! depth-first edge order.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::prtnet::{Marking, NetGoal, NetTransition, PatternItem, PrTNet};
use crate::scalar::Scalar;

/// One transition instance. `binding` lists the bound parameters in
/// parameter order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Firing<T> {
    pub transition: usize,
    pub name: String,
    pub binding: Vec<(String, T)>,
    /// The transition's duration under `binding`; zero when it has none.
    pub duration: T,
}

impl<T: Scalar> Firing<T> {
    pub fn value(&self, var: &str) -> Option<T> {
        self.binding.iter().find(|(v, _)| v == var).map(|(_, x)| *x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FireError {
    #[error("firing of `{0}` is not enabled")]
    NotEnabled(String),
    #[error("place `{0}` would exceed its capacity")]
    CapacityExceeded(String),
}

/// Values bound to `t`'s input patterns, one entry per parameter that
/// occurs in an input arc.
fn bindings<T: Scalar>(net: &PrTNet<T>, t: &NetTransition<T>, m: &Marking<T>) -> Vec<Vec<(String, T)>> {
    let items: Vec<(usize, &PatternItem<T>)> = t
        .inputs
        .iter()
        .filter_map(|a| net.place_index(&a.place).map(|i| (i, a)))
        .flat_map(|(i, a)| a.pattern.iter().map(move |p| (i, p)))
        .collect();
    let mut out = Vec::new();
    let mut bound: Vec<(String, T)> = Vec::new();
    let mut left = m.clone();
    search(net, t, &items, &mut left, &mut bound, &mut out);

    let mut ordered: Vec<Vec<(String, T)>> = out
        .into_iter()
        .map(|b| t.params.iter().filter_map(|p| b.iter().find(|(v, _)| *v == p.name).cloned()).collect())
        .collect();
    ordered.sort_by(|a, b| a.iter().map(|(_, v)| v).cmp(b.iter().map(|(_, v)| v)));
    ordered.dedup();
    ordered
}

fn search<T: Scalar>(
    net: &PrTNet<T>,
    t: &NetTransition<T>,
    items: &[(usize, &PatternItem<T>)],
    left: &mut Marking<T>,
    bound: &mut Vec<(String, T)>,
    out: &mut Vec<Vec<(String, T)>>,
) {
    let Some(((place, item), rest)) = items.split_first() else {
        out.push(bound.clone());
        return;
    };
    let fixed = match item {
        PatternItem::Lit(v) => Some(*v),
        PatternItem::Var(var) => bound.iter().find(|(b, _)| b == var).map(|(_, v)| *v),
    };
    if let Some(v) = fixed {
        if left.remove(*place, v) {
            search(net, t, rest, left, bound, out);
            left.add(*place, v);
        }
        return;
    }
    let PatternItem::Var(var) = item else { unreachable!() };
    let mut candidates: Vec<T> = left.tokens(*place).to_vec();
    candidates.dedup();
    for v in candidates {
        if !net.binds(t, var, v) {
            continue;
        }
        left.remove(*place, v);
        bound.push((var.clone(), v));
        search(net, t, rest, left, bound, out);
        bound.pop();
        left.add(*place, v);
    }
}

fn duration_of<T: Scalar>(t: &NetTransition<T>, binding: &[(String, T)]) -> Option<T> {
    match &t.duration {
        None => Some(T::zero()),
        Some(d) => d.eval(|v| binding.iter().find(|(b, _)| b == v).map(|(_, x)| *x)),
    }
}

/// Result of firing without the enabledness checks on the binding.
fn apply<T: Scalar>(
    net: &PrTNet<T>,
    t: &NetTransition<T>,
    m: &Marking<T>,
    binding: &[(String, T)],
) -> Result<Marking<T>, FireError> {
    let not_enabled = || FireError::NotEnabled(t.name.clone());
    let value = |item: &PatternItem<T>| match item {
        PatternItem::Lit(v) => Some(*v),
        PatternItem::Var(var) => binding.iter().find(|(b, _)| b == var).map(|(_, v)| *v),
    };
    let mut next = m.clone();
    for arc in &t.inputs {
        let place = net.place_index(&arc.place).ok_or_else(not_enabled)?;
        for item in &arc.pattern {
            if !next.remove(place, value(item).ok_or_else(not_enabled)?) {
                return Err(not_enabled());
            }
        }
    }
    for arc in &t.outputs {
        let place = net.place_index(&arc.place).ok_or_else(not_enabled)?;
        for item in &arc.pattern {
            next.add(place, value(item).ok_or_else(not_enabled)?);
        }
    }
    for (i, p) in net.places.iter().enumerate() {
        if p.capacity.is_some_and(|k| next.tokens(i).len() > k as usize) {
            return Err(FireError::CapacityExceeded(p.name.clone()));
        }
    }
    Ok(next)
}

/// Every firing enabled at `m`. Firings whose result would exceed a
/// capacity are not enabled.
pub fn enabled_firings<T: Scalar>(net: &PrTNet<T>, m: &Marking<T>) -> Vec<Firing<T>> {
    let mut out = Vec::new();
    for (i, t) in net.transitions.iter().enumerate() {
        for binding in bindings(net, t, m) {
            if apply(net, t, m, &binding).is_err() {
                continue;
            }
            if let Some(duration) = duration_of(t, &binding) {
                out.push(Firing { transition: i, name: t.name.clone(), binding, duration });
            }
        }
    }
    out
}

/// Consumes the input-pattern tokens of `f` and produces its outputs.
pub fn fire<T: Scalar>(net: &PrTNet<T>, m: &Marking<T>, f: &Firing<T>) -> Result<Marking<T>, FireError> {
    let not_enabled = || FireError::NotEnabled(f.name.clone());
    let t = net.transitions.get(f.transition).filter(|t| t.name == f.name).ok_or_else(not_enabled)?;
    let sorts_ok = f.binding.iter().all(|(var, v)| t.param(var).is_some() && net.binds(t, var, *v));
    if !sorts_ok || duration_of(t, &f.binding) != Some(f.duration) {
        return Err(not_enabled());
    }
    apply(net, t, m, &f.binding)
}

/// Fires `firings` in order from the initial marking.
pub fn replay<T: Scalar>(net: &PrTNet<T>, firings: &[Firing<T>]) -> Result<Marking<T>, FireError> {
    firings.iter().try_fold(net.initial_marking.clone(), |m, f| fire(net, &m, f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 100_000, max_depth: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge<T> {
    pub src: usize,
    pub dst: usize,
    pub firing: Firing<T>,
}

/// Reachable markings, each stored once. Node 0 is the initial marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachGraph<T> {
    pub nodes: Vec<Marking<T>>,
    pub edges: Vec<Edge<T>>,
    /// Outgoing edge indices per node, in firing order.
    pub out: Vec<Vec<usize>>,
    /// Breadth-first depth per node.
    pub depth: Vec<usize>,
    /// Exploration stopped at a limit; some successors are missing.
    pub truncated: bool,
}

impl<T: Scalar> ReachGraph<T> {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = &Edge<T>> {
        self.out[node].iter().map(|&e| &self.edges[e])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReachError<T: Scalar> {
    #[error("exploration limit reached after {} nodes", .0.nodes.len())]
    LimitExceeded(Box<ReachGraph<T>>),
    #[error("the reachability graph is truncated")]
    Truncated,
}

/// Breadth-first exploration from the initial marking. Hitting either limit
/// returns the partial graph inside [`ReachError::LimitExceeded`].
pub fn build_reach_graph<T: Scalar>(net: &PrTNet<T>, limits: Limits) -> Result<ReachGraph<T>, ReachError<T>> {
    let mut g = ReachGraph {
        nodes: vec![net.initial_marking.clone()],
        edges: Vec::new(),
        out: vec![Vec::new()],
        depth: vec![0],
        truncated: false,
    };
    let mut index: HashMap<Marking<T>, usize> = HashMap::from([(net.initial_marking.clone(), 0)]);
    let mut queue = VecDeque::from([0usize]);
    'explore: while let Some(src) = queue.pop_front() {
        let firings = enabled_firings(net, &g.nodes[src]);
        if firings.is_empty() {
            continue;
        }
        if g.depth[src] >= limits.max_depth {
            g.truncated = true;
            continue;
        }
        for firing in firings {
            let next = apply(net, &net.transitions[firing.transition], &g.nodes[src], &firing.binding)
                .expect("enabled firings apply");
            let dst = match index.get(&next) {
                Some(&dst) => dst,
                None => {
                    if g.nodes.len() >= limits.max_nodes {
                        g.truncated = true;
                        break 'explore;
                    }
                    let dst = g.nodes.len();
                    index.insert(next.clone(), dst);
                    g.nodes.push(next);
                    g.out.push(Vec::new());
                    g.depth.push(g.depth[src] + 1);
                    queue.push_back(dst);
                    dst
                }
            };
            g.out[src].push(g.edges.len());
            g.edges.push(Edge { src, dst, firing });
        }
    }
    if g.truncated {
        Err(ReachError::LimitExceeded(Box::new(g)))
    } else {
        Ok(g)
    }
}

/// Untimed `EventuallyOnSomeBranch`: some node satisfies the target.
pub fn eval_ef_goal<T: Scalar>(net: &PrTNet<T>, g: &ReachGraph<T>, goal: &NetGoal<T>) -> bool {
    g.nodes.iter().any(|m| net.goal_holds(goal, m))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolutionPath<T> {
    pub firings: Vec<Firing<T>>,
    /// Visited nodes, starting with 0; one longer than `firings`.
    pub node_ids: Vec<usize>,
    pub elapsed: T,
}

impl<T: Scalar> SolutionPath<T> {
    pub fn len(&self) -> usize {
        self.firings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.firings.is_empty()
    }
}

/// How paths through the graph are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathMode {
    /// No node repeats within a path.
    #[default]
    SimpleGraph,
    /// Nodes may repeat; paths have at most this many firings.
    DepthBoundedTree(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnumerateOptions<T> {
    pub mode: PathMode,
    /// Drop partial paths whose elapsed time already exceeds this bound.
    /// Only applied when no edge has a negative duration, where it cannot
    /// change which paths end within the bound.
    pub prune: Option<T>,
}

/// Depth-first enumeration from node 0. A path ends at the first goal node
/// it reaches.
pub fn enumerate_goal_paths<T: Scalar>(
    net: &PrTNet<T>,
    g: &ReachGraph<T>,
    goal: &NetGoal<T>,
    opts: EnumerateOptions<T>,
) -> Result<Vec<SolutionPath<T>>, ReachError<T>> {
    if g.truncated {
        return Err(ReachError::Truncated);
    }
    let is_goal: Vec<bool> = g.nodes.iter().map(|m| net.goal_holds(goal, m)).collect();
    let prune = opts.prune.filter(|_| g.edges.iter().all(|e| e.firing.duration >= T::zero()));
    let mut walk = Walk {
        g,
        is_goal: &is_goal,
        mode: opts.mode,
        prune,
        on_path: vec![false; g.nodes.len()],
        nodes: vec![0],
        edges: Vec::new(),
        out: Vec::new(),
    };
    walk.visit(0, T::zero());
    Ok(walk.out)
}

struct Walk<'g, T> {
    g: &'g ReachGraph<T>,
    is_goal: &'g [bool],
    mode: PathMode,
    prune: Option<T>,
    on_path: Vec<bool>,
    nodes: Vec<usize>,
    edges: Vec<usize>,
    out: Vec<SolutionPath<T>>,
}

impl<T: Scalar> Walk<'_, T> {
    fn visit(&mut self, node: usize, elapsed: T) {
        if self.is_goal[node] {
            self.out.push(SolutionPath {
                firings: self.edges.iter().map(|&e| self.g.edges[e].firing.clone()).collect(),
                node_ids: self.nodes.clone(),
                elapsed,
            });
            return;
        }
        if let PathMode::DepthBoundedTree(max) = self.mode {
            if self.edges.len() >= max {
                return;
            }
        }
        self.on_path[node] = true;
        for &e in &self.g.out[node] {
            let edge = &self.g.edges[e];
            if self.mode == PathMode::SimpleGraph && self.on_path[edge.dst] {
                continue;
            }
            let next = elapsed + edge.firing.duration;
            if self.prune.is_some_and(|b| next > b) {
                continue;
            }
            self.nodes.push(edge.dst);
            self.edges.push(e);
            self.visit(edge.dst, next);
            self.edges.pop();
            self.nodes.pop();
        }
        self.on_path[node] = false;
    }
}

/// Variables shown for a firing: the duration variables, or every bound
/// variable when the transition has no duration.
fn shown_vars<'f, T: Scalar>(net: &PrTNet<T>, f: &'f Firing<T>) -> Vec<&'f (String, T)> {
    match net.transitions.get(f.transition).and_then(|t| t.duration.as_ref()) {
        Some(d) => f.binding.iter().filter(|(v, _)| d.vars().contains(v)).collect(),
        None => f.binding.iter().collect(),
    }
}

/// `PATH <n>` block: one `Node <id>: transition <name>` line per step with
/// its variable values, then the final node.
pub fn format_path<T: Scalar>(net: &PrTNet<T>, number: usize, p: &SolutionPath<T>) -> String {
    let mut out = format!("PATH {number}\n");
    for (f, node) in p.firings.iter().zip(&p.node_ids) {
        let _ = writeln!(out, "Node {node}: transition {}", f.name);
        let vars: Vec<String> =
            shown_vars(net, f).iter().map(|(v, x)| format!("{} = {x}", v.trim_start_matches('?'))).collect();
        if !vars.is_empty() {
            let _ = writeln!(out, "  {}", vars.join("  "));
        }
    }
    if let Some(last) = p.node_ids.last() {
        let _ = writeln!(out, "Node {last}");
    }
    out
}

/// `toSafe(5,10)`: the transition with its shown variable values.
pub fn firing_label<T: Scalar>(net: &PrTNet<T>, f: &Firing<T>) -> String {
    let values: Vec<String> = shown_vars(net, f).iter().map(|(_, x)| x.to_string()).collect();
    format!("{}({})", f.name, values.join(","))
}
