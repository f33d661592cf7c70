//! Graphviz export. Nodes are circles labelled by colour, hyperedges are
//! boxes labelled by operation, and tentacles are arrows labelled `s<i>`
//! (into the box) or `t<i>` (out of the box). Interfaces are drawn as small
//! numbered points joined to their nodes by dashed arrows.

use std::fmt::Write as _;

use crate::cospan::Cospan;
use crate::hypergraph::Hypergraph;
use crate::signature::Signature;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders `g` with any number of named interface listings. A listing
/// named `left` points into the graph; every other listing points out.
pub fn hypergraph_to_dot(sig: &Signature, g: &Hypergraph, legs: &[(&str, &[usize])]) -> String {
    let mut out = String::from("digraph hypergraph {\n  rankdir=LR;\n");
    for (i, &c) in g.nodes().iter().enumerate() {
        let _ = writeln!(
            out,
            "  n{i} [shape=circle, label=\"{}\", xlabel=\"n{i}\"];",
            escape(sig.colour_name(c))
        );
    }
    for (i, e) in g.edges().iter().enumerate() {
        let name = escape(&sig.operation(e.label).name);
        let _ = writeln!(out, "  e{i} [shape=box, label=\"{name}\"];");
        for (k, &n) in e.sources.iter().enumerate() {
            let _ = writeln!(out, "  n{n} -> e{i} [label=\"s{k}\"];");
        }
        for (k, &n) in e.targets.iter().enumerate() {
            let _ = writeln!(out, "  e{i} -> n{n} [label=\"t{k}\"];");
        }
    }
    for (name, listing) in legs {
        for (k, &n) in listing.iter().enumerate() {
            let port = format!("{}_{k}", escape(name));
            let _ = writeln!(out, "  \"{port}\" [shape=point, xlabel=\"{}{k}\"];", escape(name));
            if *name == "left" {
                let _ = writeln!(out, "  \"{port}\" -> n{n} [style=dashed, arrowhead=none];");
            } else {
                let _ = writeln!(out, "  n{n} -> \"{port}\" [style=dashed, arrowhead=none];");
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn cospan_to_dot(sig: &Signature, f: &Cospan) -> String {
    hypergraph_to_dot(sig, f.carrier(), &[("left", f.left()), ("right", f.right())])
}
