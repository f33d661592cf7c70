//! Finite directed hypergraphs with colour-labelled nodes and
//! operation-labelled hyperedges with ordered tentacles.
//!
//! Nodes and edges are identified by their index inside one graph. Relations
//! between graphs are always explicit [`Homomorphism`] values.

mod search;
pub(crate) mod text;

use thiserror::Error;

use crate::signature::{Colour, OpId, Signature, Word};

pub use search::{
    find_homomorphisms, for_each_homomorphism, invariant_key, is_isomorphic, isomorphism_with,
};
pub use text::{parse_hypergraph, print_hypergraph, TextError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("edge {edge}: tentacle colours do not match the type of its operation")]
    IllTyped { edge: usize },
    #[error("partition of size {got} does not cover {expected} elements")]
    PartitionSize { expected: usize, got: usize },
    #[error("block {block:?} mixes node colours")]
    ColourClash { block: Vec<usize> },
    #[error("block {block:?} mixes edge labels")]
    LabelClash { block: Vec<usize> },
    #[error("edge block {block:?} is not congruent with the node partition")]
    NotCongruent { block: Vec<usize> },
    #[error("pushout apex must be discrete")]
    ApexNotDiscrete,
    #[error("map is not a homomorphism")]
    NotAHomomorphism,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub label: OpId,
    pub sources: Vec<usize>,
    pub targets: Vec<usize>,
}

impl Edge {
    /// Sources followed by targets.
    pub fn tentacles(&self) -> impl Iterator<Item = usize> + '_ {
        self.sources.iter().chain(self.targets.iter()).copied()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    nodes: Vec<Colour>,
    edges: Vec<Edge>,
}

impl Hypergraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Discrete hypergraph with one node per letter of `w`.
    pub fn discrete(w: &Word) -> Self {
        Hypergraph { nodes: w.colours().to_vec(), edges: Vec::new() }
    }

    pub fn add_node(&mut self, c: Colour) -> usize {
        self.nodes.push(c);
        self.nodes.len() - 1
    }

    /// Adds an edge, checking that tentacle colours spell the operation's type.
    pub fn add_edge(
        &mut self,
        sig: &Signature,
        label: OpId,
        sources: Vec<usize>,
        targets: Vec<usize>,
    ) -> Result<usize, GraphError> {
        let edge = Edge { label, sources, targets };
        if let Some(n) = edge.tentacles().find(|&n| n >= self.nodes.len()) {
            return Err(GraphError::NodeOutOfRange(n));
        }
        if &self.word_of(&edge.sources) != sig.arity(label)
            || &self.word_of(&edge.targets) != sig.coarity(label)
        {
            return Err(GraphError::IllTyped { edge: self.edges.len() });
        }
        self.edges.push(edge);
        Ok(self.edges.len() - 1)
    }

    /// Adds an edge whose typing is guaranteed by construction.
    pub(crate) fn push_edge(&mut self, edge: Edge) -> usize {
        debug_assert!(edge.tentacles().all(|n| n < self.nodes.len()));
        self.edges.push(edge);
        self.edges.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn colour(&self, n: usize) -> Colour {
        self.nodes[n]
    }

    pub fn nodes(&self) -> &[Colour] {
        &self.nodes
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_discrete(&self) -> bool {
        self.edges.is_empty()
    }

    /// Colour word spelled by a list of nodes.
    pub fn word_of(&self, nodes: &[usize]) -> Word {
        nodes.iter().map(|&n| self.nodes[n]).collect()
    }

    /// Checks range and typing of every edge against `sig`.
    pub fn validate(&self, sig: &Signature) -> Result<(), GraphError> {
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(n) = e.tentacles().find(|&n| n >= self.nodes.len()) {
                return Err(GraphError::NodeOutOfRange(n));
            }
            if &self.word_of(&e.sources) != sig.arity(e.label)
                || &self.word_of(&e.targets) != sig.coarity(e.label)
            {
                return Err(GraphError::IllTyped { edge: i });
            }
        }
        Ok(())
    }

    /// Number of edge tentacles attached to each node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            for n in e.tentacles() {
                deg[n] += 1;
            }
        }
        deg
    }
}

/// A pair of maps on nodes and edges. Whether it is a homomorphism between
/// two particular graphs is checked by [`Homomorphism::is_valid`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Homomorphism {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Homomorphism {
    pub fn new(nodes: Vec<usize>, edges: Vec<usize>) -> Self {
        Homomorphism { nodes, edges }
    }

    pub fn identity(g: &Hypergraph) -> Self {
        Homomorphism { nodes: (0..g.node_count()).collect(), edges: (0..g.edge_count()).collect() }
    }

    /// Diagrammatic composite: first `self`, then `next`.
    pub fn then(&self, next: &Homomorphism) -> Homomorphism {
        Homomorphism {
            nodes: self.nodes.iter().map(|&n| next.nodes[n]).collect(),
            edges: self.edges.iter().map(|&e| next.edges[e]).collect(),
        }
    }

    /// Label preservation and positionwise commutation with tentacles.
    pub fn is_valid(&self, src: &Hypergraph, tgt: &Hypergraph) -> bool {
        if self.nodes.len() != src.node_count() || self.edges.len() != src.edge_count() {
            return false;
        }
        let nodes_ok = self
            .nodes
            .iter()
            .enumerate()
            .all(|(n, &m)| m < tgt.node_count() && src.colour(n) == tgt.colour(m));
        nodes_ok
            && self.edges.iter().enumerate().all(|(e, &f)| {
                if f >= tgt.edge_count() {
                    return false;
                }
                let (a, b) = (src.edge(e), tgt.edge(f));
                a.label == b.label
                    && a.sources.len() == b.sources.len()
                    && a.targets.len() == b.targets.len()
                    && a.tentacles().zip(b.tentacles()).all(|(x, y)| self.nodes[x] == y)
            })
    }

    pub fn is_injective(&self) -> bool {
        all_distinct(&self.nodes) && all_distinct(&self.edges)
    }

    /// Every node and edge of `tgt` has a preimage.
    pub fn is_surjective(&self, tgt: &Hypergraph) -> bool {
        covers(&self.nodes, tgt.node_count()) && covers(&self.edges, tgt.edge_count())
    }
}

fn all_distinct(v: &[usize]) -> bool {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.windows(2).all(|w| w[0] != w[1])
}

fn covers(v: &[usize], n: usize) -> bool {
    let mut hit = vec![false; n];
    for &x in v {
        if x < n {
            hit[x] = true;
        }
    }
    hit.into_iter().all(|b| b)
}

/// A partition of `0..n`, stored as canonical block numbers: blocks are
/// numbered in order of their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    class: Vec<usize>,
    blocks: usize,
}

impl Partition {
    pub fn discrete(n: usize) -> Self {
        Partition { class: (0..n).collect(), blocks: n }
    }

    /// Elements with equal labels share a block.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut renumber = std::collections::HashMap::new();
        let class = labels
            .iter()
            .map(|l| {
                let next = renumber.len();
                *renumber.entry(*l).or_insert(next)
            })
            .collect();
        Partition { class, blocks: renumber.len() }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Self {
        let mut labels: Vec<usize> = (0..n).map(|i| n + i).collect();
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                labels[x] = b;
            }
        }
        Self::from_labels(&labels)
    }

    pub fn len(&self) -> usize {
        self.class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class[i]
    }

    pub fn classes(&self) -> &[usize] {
        &self.class
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.blocks];
        for (i, &c) in self.class.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

/// Union-find over `0..n`.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn partition(&mut self) -> Partition {
        let labels: Vec<usize> = (0..self.parent.len()).map(|i| self.find(i)).collect();
        Partition::from_labels(&labels)
    }
}

/// Disjoint union `A + B` with its injections; `A` comes first.
pub fn coproduct(a: &Hypergraph, b: &Hypergraph) -> (Hypergraph, Homomorphism, Homomorphism) {
    let (na, ea) = (a.node_count(), a.edge_count());
    let mut g = a.clone();
    g.nodes.extend_from_slice(&b.nodes);
    for e in &b.edges {
        g.edges.push(Edge {
            label: e.label,
            sources: e.sources.iter().map(|&n| n + na).collect(),
            targets: e.targets.iter().map(|&n| n + na).collect(),
        });
    }
    let inj_a = Homomorphism::identity(a);
    let inj_b = Homomorphism {
        nodes: (na..na + b.node_count()).collect(),
        edges: (ea..ea + b.edge_count()).collect(),
    };
    (g, inj_a, inj_b)
}

/// Quotient of `g` by a node partition and an edge partition.
///
/// Node blocks must be colour-homogeneous; edge blocks must be
/// label-homogeneous with tentacle lists that agree after merging nodes.
pub fn quotient(
    g: &Hypergraph,
    node_blocks: &Partition,
    edge_blocks: &Partition,
) -> Result<(Hypergraph, Homomorphism), GraphError> {
    if node_blocks.len() != g.node_count() {
        return Err(GraphError::PartitionSize { expected: g.node_count(), got: node_blocks.len() });
    }
    if edge_blocks.len() != g.edge_count() {
        return Err(GraphError::PartitionSize { expected: g.edge_count(), got: edge_blocks.len() });
    }
    let mut nodes: Vec<Option<Colour>> = vec![None; node_blocks.block_count()];
    for (n, &c) in g.nodes.iter().enumerate() {
        let b = node_blocks.class_of(n);
        match nodes[b] {
            Some(existing) if existing != c => {
                return Err(GraphError::ColourClash { block: node_blocks.blocks()[b].clone() })
            }
            _ => nodes[b] = Some(c),
        }
    }
    let remap = |v: &[usize]| v.iter().map(|&n| node_blocks.class_of(n)).collect::<Vec<_>>();
    let mut edges: Vec<Option<Edge>> = vec![None; edge_blocks.block_count()];
    for (i, e) in g.edges.iter().enumerate() {
        let b = edge_blocks.class_of(i);
        let image = Edge { label: e.label, sources: remap(&e.sources), targets: remap(&e.targets) };
        match &edges[b] {
            Some(existing) if existing.label != image.label => {
                return Err(GraphError::LabelClash { block: edge_blocks.blocks()[b].clone() })
            }
            Some(existing) if *existing != image => {
                return Err(GraphError::NotCongruent { block: edge_blocks.blocks()[b].clone() })
            }
            Some(_) => {}
            None => edges[b] = Some(image),
        }
    }
    let q = Hypergraph {
        nodes: nodes.into_iter().map(|c| c.expect("non-empty block")).collect(),
        edges: edges.into_iter().map(|e| e.expect("non-empty block")).collect(),
    };
    let proj = Homomorphism {
        nodes: node_blocks.classes().to_vec(),
        edges: edge_blocks.classes().to_vec(),
    };
    Ok((q, proj))
}

/// Pushout of `A <-a- J -b-> B` for a discrete apex `J`: the coproduct with
/// `a(j)` and `b(j)` identified for every node `j`.
pub fn pushout_discrete(
    j: &Hypergraph,
    a_graph: &Hypergraph,
    a: &Homomorphism,
    b_graph: &Hypergraph,
    b: &Homomorphism,
) -> Result<(Hypergraph, Homomorphism, Homomorphism), GraphError> {
    if !j.is_discrete() {
        return Err(GraphError::ApexNotDiscrete);
    }
    let (sum, inj_a, inj_b) = coproduct(a_graph, b_graph);
    let mut uf = UnionFind::new(sum.node_count());
    for x in 0..j.node_count() {
        uf.union(inj_a.nodes[a.nodes[x]], inj_b.nodes[b.nodes[x]]);
    }
    let (p, proj) = quotient(&sum, &uf.partition(), &Partition::discrete(sum.edge_count()))?;
    Ok((p, inj_a.then(&proj), inj_b.then(&proj)))
}

/// Pushout of two node listings out of a discrete graph: the common case in
/// which the apex is an interface given by node lists into `A` and `B`.
pub(crate) fn glue(
    a_graph: &Hypergraph,
    a_iface: &[usize],
    b_graph: &Hypergraph,
    b_iface: &[usize],
) -> (Hypergraph, Homomorphism, Homomorphism) {
    debug_assert_eq!(a_iface.len(), b_iface.len());
    let apex = Hypergraph::discrete(&a_graph.word_of(a_iface));
    let a = Homomorphism::new(a_iface.to_vec(), Vec::new());
    let b = Homomorphism::new(b_iface.to_vec(), Vec::new());
    pushout_discrete(&apex, a_graph, &a, b_graph, &b).expect("discrete apex")
}

/// Pullback of `A -f-> S <-g- B`, computed componentwise on nodes and edges.
/// Node `(x, y)` pairs are listed lexicographically, likewise edges.
pub fn pullback(
    a_graph: &Hypergraph,
    f: &Homomorphism,
    b_graph: &Hypergraph,
    g: &Homomorphism,
) -> (Hypergraph, Homomorphism, Homomorphism) {
    let mut p = Hypergraph::new();
    let mut pa = Homomorphism::new(Vec::new(), Vec::new());
    let mut pb = Homomorphism::new(Vec::new(), Vec::new());
    let mut index = std::collections::HashMap::new();
    for x in 0..a_graph.node_count() {
        for y in 0..b_graph.node_count() {
            if f.nodes[x] == g.nodes[y] {
                index.insert((x, y), p.add_node(a_graph.colour(x)));
                pa.nodes.push(x);
                pb.nodes.push(y);
            }
        }
    }
    for (i, ea) in a_graph.edges().iter().enumerate() {
        for (k, eb) in b_graph.edges().iter().enumerate() {
            if f.edges[i] == g.edges[k] {
                let pair = |xs: &[usize], ys: &[usize]| -> Vec<usize> {
                    xs.iter().zip(ys).map(|(&x, &y)| index[&(x, y)]).collect()
                };
                p.push_edge(Edge {
                    label: ea.label,
                    sources: pair(&ea.sources, &eb.sources),
                    targets: pair(&ea.targets, &eb.targets),
                });
                pa.edges.push(i);
                pb.edges.push(k);
            }
        }
    }
    (p, pa, pb)
}
