//! Text renderings of solution paths: an extended state machine in DOT and
//! a textual message sequence chart.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::prtnet::PrTNet;
use crate::reach::{firing_label, Firing, SolutionPath};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("no paths to export")]
    EmptyInput,
}

fn dot_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// `toSafe(5,10)/t=10`
pub fn edge_label<T: Scalar>(net: &PrTNet<T>, f: &Firing<T>) -> String {
    format!("{}/t={}", firing_label(net, f), f.duration)
}

/// One state per node id used by the paths, labelled with the id and the
/// elapsed time on arrival (all distinct values, joined by `|`). Node 0 is
/// drawn bold; path ends are double circles. Edges are deduplicated.
pub fn to_efsm_dot<T: Scalar>(net: &PrTNet<T>, paths: &[SolutionPath<T>]) -> Result<String, ExportError> {
    if paths.is_empty() {
        return Err(ExportError::EmptyInput);
    }
    let mut nodes: Vec<(usize, BTreeSet<T>)> = Vec::new();
    let mut accepting = BTreeSet::new();
    let mut edges: Vec<(usize, usize, String)> = Vec::new();
    for p in paths {
        let mut elapsed = T::zero();
        for (step, &id) in p.node_ids.iter().enumerate() {
            if step > 0 {
                let f = &p.firings[step - 1];
                elapsed = elapsed + f.duration;
                let edge = (p.node_ids[step - 1], id, edge_label(net, f));
                if !edges.contains(&edge) {
                    edges.push(edge);
                }
            }
            match nodes.iter_mut().find(|(n, _)| *n == id) {
                Some((_, times)) => {
                    times.insert(elapsed);
                }
                None => nodes.push((id, BTreeSet::from([elapsed]))),
            }
        }
        accepting.extend(p.node_ids.last().copied());
    }

    let mut out = format!("digraph {} {{\n", dot_string(&net.name));
    out.push_str("  rankdir=LR;\n  node [shape=circle];\n");
    for (id, times) in &nodes {
        let times: Vec<String> = times.iter().map(T::to_string).collect();
        let label = format!("{id}\nt={}", times.join("|"));
        let mut attrs = vec![format!("label={}", dot_string(&label))];
        if *id == 0 {
            attrs.push("style=bold".into());
        }
        if accepting.contains(id) {
            attrs.push("shape=doublecircle".into());
        }
        let _ = writeln!(out, "  n{id} [{}];", attrs.join(", "));
    }
    for (src, dst, label) in &edges {
        let _ = writeln!(out, "  n{src} -> n{dst} [label={}];", dot_string(label));
    }
    out.push_str("}\n");
    Ok(out)
}

/// Source and destination place of a firing: its first input and output
/// arcs.
fn direction<'n, T: Scalar>(net: &'n PrTNet<T>, f: &Firing<T>) -> (&'n str, &'n str) {
    let t = &net.transitions[f.transition];
    let from = t.inputs.first().map_or("env", |a| a.place.as_str());
    let to = t.outputs.first().map_or("env", |a| a.place.as_str());
    (from, to)
}

/// Event name of a firing: `e` plus the destination's initial, as in `eS`.
pub fn event_name<T: Scalar>(net: &PrTNet<T>, f: &Firing<T>) -> String {
    let (_, to) = direction(net, f);
    format!("e{}", to.chars().next().unwrap_or('_'))
}

/// Message lines of the chart, `Unsafe->Safe: eS toSafe(5,10)`, one per
/// firing.
pub fn msc_messages<T: Scalar>(net: &PrTNet<T>, p: &SolutionPath<T>) -> Vec<String> {
    p.firings
        .iter()
        .map(|f| {
            let (from, to) = direction(net, f);
            format!("{from}->{to}: {} {}", event_name(net, f), firing_label(net, f))
        })
        .collect()
}

/// Textual chart: `msc <net>;`, one instance per place, one message per
/// firing, `endmsc;`.
pub fn to_msc<T: Scalar>(net: &PrTNet<T>, p: &SolutionPath<T>) -> String {
    let mut out = format!("msc {};\n", net.name);
    for place in &net.places {
        let _ = writeln!(out, "  instance {};", place.name);
    }
    for m in msc_messages(net, p) {
        let _ = writeln!(out, "  {m};");
    }
    out.push_str("endmsc;\n");
    out
}
