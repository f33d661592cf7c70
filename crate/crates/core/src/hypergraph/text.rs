//! Line-oriented text format for hypergraphs and cospans.
//!
//! ```text
//! node n0 : c
//! node n1 : d
//! edge e0 : f (n0) -> (n1)
//! left: n0
//! right: n1
//! ```
//!
//! The `left:`/`right:` lines are only meaningful for cospans. Node lists may
//! be separated by spaces or commas; `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{GraphError, Hypergraph};
use crate::signature::{is_identifier, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown colour `{name}`")]
    UnknownColour { line: usize, name: String },
    #[error("line {line}: unknown operation `{name}`")]
    UnknownOperation { line: usize, name: String },
    #[error("line {line}: unknown node `{name}`")]
    UnknownNode { line: usize, name: String },
    #[error("line {line}: `{name}` declared twice")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("unexpected interface line in a plain hypergraph")]
    UnexpectedLeg,
}

/// Parsed graph plus optional left/right node listings.
pub(crate) struct Parsed {
    pub graph: Hypergraph,
    pub left: Option<Vec<usize>>,
    pub right: Option<Vec<usize>>,
}

fn syntax(line: usize, message: impl Into<String>) -> TextError {
    TextError::Syntax { line, message: message.into() }
}

fn node_list(
    text: &str,
    line: usize,
    ids: &HashMap<String, usize>,
) -> Result<Vec<usize>, TextError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|name| {
            ids.get(name)
                .copied()
                .ok_or_else(|| TextError::UnknownNode { line, name: name.to_string() })
        })
        .collect()
}

fn parenthesised(s: &str) -> Option<&str> {
    s.trim().strip_prefix('(').and_then(|s| s.strip_suffix(')'))
}

/// Splits `"(a b) -> (c)"` into the two parenthesised lists.
fn edge_ends(text: &str, line: usize) -> Result<(&str, &str), TextError> {
    let (lhs, rhs) = text.split_once("->").ok_or_else(|| syntax(line, "expected `->`"))?;
    match (parenthesised(lhs), parenthesised(rhs)) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(syntax(line, "node lists must be parenthesised")),
    }
}

pub(crate) fn parse_with_legs(sig: &Signature, text: &str) -> Result<Parsed, TextError> {
    let mut graph = Hypergraph::new();
    let mut node_ids: HashMap<String, usize> = HashMap::new();
    let mut edge_ids: HashMap<String, usize> = HashMap::new();
    let mut left = None;
    let mut right = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("left:") {
            left = Some(node_list(rest, line, &node_ids)?);
            continue;
        }
        if let Some(rest) = content.strip_prefix("right:") {
            right = Some(node_list(rest, line, &node_ids)?);
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .ok_or_else(|| syntax(line, "expected a declaration"))?;
        let (id, body) =
            rest.split_once(':').ok_or_else(|| syntax(line, "expected `:` after the id"))?;
        let id = id.trim();
        if !is_identifier(id) {
            return Err(syntax(line, format!("invalid id `{id}`")));
        }
        match keyword {
            "node" => {
                let name = body.trim();
                let c = sig
                    .colour(name)
                    .ok_or_else(|| TextError::UnknownColour { line, name: name.to_string() })?;
                if node_ids.insert(id.to_string(), graph.add_node(c)).is_some() {
                    return Err(TextError::Duplicate { line, name: id.to_string() });
                }
            }
            "edge" => {
                let body = body.trim();
                let (op_name, ends) = body
                    .split_once(|c: char| c.is_whitespace() || c == '(')
                    .map(|(a, _)| (a, &body[a.len()..]))
                    .ok_or_else(|| syntax(line, "expected an operation and node lists"))?;
                let op = sig
                    .op(op_name)
                    .ok_or_else(|| TextError::UnknownOperation { line, name: op_name.to_string() })?;
                let (src, tgt) = edge_ends(ends, line)?;
                let sources = node_list(src, line, &node_ids)?;
                let targets = node_list(tgt, line, &node_ids)?;
                let e = graph
                    .add_edge(sig, op, sources, targets)
                    .map_err(|source| TextError::Graph { line, source })?;
                if edge_ids.insert(id.to_string(), e).is_some() {
                    return Err(TextError::Duplicate { line, name: id.to_string() });
                }
            }
            other => return Err(syntax(line, format!("unknown declaration `{other}`"))),
        }
    }
    Ok(Parsed { graph, left, right })
}

/// Parses the hypergraph text format. Ids are arbitrary identifiers; nodes
/// and edges are numbered in order of declaration.
pub fn parse_hypergraph(sig: &Signature, text: &str) -> Result<Hypergraph, TextError> {
    let parsed = parse_with_legs(sig, text)?;
    if parsed.left.is_some() || parsed.right.is_some() {
        return Err(TextError::UnexpectedLeg);
    }
    Ok(parsed.graph)
}

fn ids(nodes: &[usize]) -> String {
    nodes.iter().map(|n| format!("n{n}")).collect::<Vec<_>>().join(" ")
}

pub(crate) fn print_with_legs(
    sig: &Signature,
    g: &Hypergraph,
    legs: Option<(&[usize], &[usize])>,
) -> String {
    let mut out = String::new();
    for (i, &c) in g.nodes().iter().enumerate() {
        let _ = writeln!(out, "node n{i} : {}", sig.colour_name(c));
    }
    for (i, e) in g.edges().iter().enumerate() {
        let _ = writeln!(
            out,
            "edge e{i} : {} ({}) -> ({})",
            sig.operation(e.label).name,
            ids(&e.sources),
            ids(&e.targets)
        );
    }
    if let Some((left, right)) = legs {
        let _ = writeln!(out, "left: {}", ids(left));
        let _ = writeln!(out, "right: {}", ids(right));
    }
    out
}

/// Prints nodes as `n<i>` and edges as `e<i>` in index order.
pub fn print_hypergraph(sig: &Signature, g: &Hypergraph) -> String {
    print_with_legs(sig, g, None)
}
