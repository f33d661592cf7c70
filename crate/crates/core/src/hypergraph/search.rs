//! Backtracking homomorphism search and isomorphism testing.
//!
//! Edges are placed first (labels and tentacle lists prune hardest), then
//! the nodes that no edge touches.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::ops::ControlFlow;

use super::{Homomorphism, Hypergraph};
use crate::signature::{Colour, OpId};

const UNSET: usize = usize::MAX;

struct Search<'a, F> {
    pattern: &'a Hypergraph,
    host: &'a Hypergraph,
    injective: bool,
    classes: Option<(&'a [u64], &'a [u64])>,
    node_map: Vec<usize>,
    edge_map: Vec<usize>,
    node_used: Vec<bool>,
    edge_used: Vec<bool>,
    edge_order: Vec<usize>,
    free_nodes: Vec<usize>,
    host_edges: HashMap<OpId, Vec<usize>>,
    host_nodes: HashMap<Colour, Vec<usize>>,
    visit: F,
}

impl<'a, F> Search<'a, F>
where
    F: FnMut(&Homomorphism) -> ControlFlow<()>,
{
    fn new(
        pattern: &'a Hypergraph,
        host: &'a Hypergraph,
        injective: bool,
        classes: Option<(&'a [u64], &'a [u64])>,
        edge_order: Vec<usize>,
        visit: F,
    ) -> Self {
        let mut host_edges: HashMap<OpId, Vec<usize>> = HashMap::new();
        for (i, e) in host.edges().iter().enumerate() {
            host_edges.entry(e.label).or_default().push(i);
        }
        let mut host_nodes: HashMap<Colour, Vec<usize>> = HashMap::new();
        for (i, &c) in host.nodes().iter().enumerate() {
            host_nodes.entry(c).or_default().push(i);
        }
        Search {
            pattern,
            host,
            injective,
            classes,
            node_map: vec![UNSET; pattern.node_count()],
            edge_map: vec![UNSET; pattern.edge_count()],
            node_used: vec![false; host.node_count()],
            edge_used: vec![false; host.edge_count()],
            edge_order,
            free_nodes: Vec::new(),
            host_edges,
            host_nodes,
            visit,
        }
    }

    /// Pins pattern node `p` to host node `h`; false if inconsistent.
    fn fix(&mut self, p: usize, h: usize) -> bool {
        let mut trail = Vec::new();
        self.assign(p, h, &mut trail)
    }

    fn finish_setup(&mut self) {
        let mut touched = vec![false; self.pattern.node_count()];
        for e in self.pattern.edges() {
            for n in e.tentacles() {
                touched[n] = true;
            }
        }
        self.free_nodes = (0..self.pattern.node_count())
            .filter(|&n| !touched[n] && self.node_map[n] == UNSET)
            .collect();
    }

    fn assign(&mut self, p: usize, h: usize, trail: &mut Vec<usize>) -> bool {
        let current = self.node_map[p];
        if current != UNSET {
            return current == h;
        }
        if self.pattern.colour(p) != self.host.colour(h) {
            return false;
        }
        if let Some((pc, hc)) = self.classes {
            if pc[p] != hc[h] {
                return false;
            }
        }
        if self.injective && self.node_used[h] {
            return false;
        }
        self.node_map[p] = h;
        self.node_used[h] = true;
        trail.push(p);
        true
    }

    fn undo(&mut self, trail: &[usize]) {
        for &p in trail {
            let h = self.node_map[p];
            self.node_used[h] = false;
            self.node_map[p] = UNSET;
        }
    }

    fn edges_phase(&mut self, k: usize) -> ControlFlow<()> {
        if k == self.edge_order.len() {
            return self.nodes_phase(0);
        }
        let e = self.edge_order[k];
        let pe = self.pattern.edge(e);
        let candidates = match self.host_edges.get(&pe.label) {
            Some(c) => c.clone(),
            None => return ControlFlow::Continue(()),
        };
        for f in candidates {
            if self.injective && self.edge_used[f] {
                continue;
            }
            let he = self.host.edge(f);
            if he.sources.len() != pe.sources.len() || he.targets.len() != pe.targets.len() {
                continue;
            }
            let mut trail = Vec::new();
            let pairs: Vec<(usize, usize)> = pe.tentacles().zip(he.tentacles()).collect();
            let ok = pairs.into_iter().all(|(p, h)| self.assign(p, h, &mut trail));
            if ok {
                self.edge_map[e] = f;
                self.edge_used[f] = true;
                let flow = self.edges_phase(k + 1);
                self.edge_used[f] = false;
                self.edge_map[e] = UNSET;
                if flow.is_break() {
                    self.undo(&trail);
                    return flow;
                }
            }
            self.undo(&trail);
        }
        ControlFlow::Continue(())
    }

    fn nodes_phase(&mut self, i: usize) -> ControlFlow<()> {
        if i == self.free_nodes.len() {
            let h = Homomorphism::new(self.node_map.clone(), self.edge_map.clone());
            return (self.visit)(&h);
        }
        let p = self.free_nodes[i];
        let candidates = match self.host_nodes.get(&self.pattern.colour(p)) {
            Some(c) => c.clone(),
            None => return ControlFlow::Continue(()),
        };
        for h in candidates {
            let mut trail = Vec::new();
            if self.assign(p, h, &mut trail) {
                let flow = self.nodes_phase(i + 1);
                self.undo(&trail);
                flow?;
            }
        }
        ControlFlow::Continue(())
    }
}

/// Calls `visit` on every homomorphism `pattern -> host`, in the order of
/// [`find_homomorphisms`], until it breaks.
pub fn for_each_homomorphism<F>(pattern: &Hypergraph, host: &Hypergraph, visit: F)
where
    F: FnMut(&Homomorphism) -> ControlFlow<()>,
{
    let order = (0..pattern.edge_count()).collect();
    let mut s = Search::new(pattern, host, false, None, order, visit);
    s.finish_setup();
    let _ = s.edges_phase(0);
}

/// All homomorphisms `pattern -> host` (not necessarily injective), ordered
/// lexicographically by the images of edges in index order, then by the
/// images of edge-free nodes.
pub fn find_homomorphisms(pattern: &Hypergraph, host: &Hypergraph) -> Vec<Homomorphism> {
    let mut out = Vec::new();
    for_each_homomorphism(pattern, host, |h| {
        out.push(h.clone());
        ControlFlow::Continue(())
    });
    out
}

fn hash_of<T: Hash>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

/// Iteratively refined node and edge invariants. Interface membership
/// (which listing, which position) is part of the initial colouring.
fn refine(g: &Hypergraph, ifaces: &[&[usize]]) -> (Vec<u64>, Vec<u64>) {
    let mut marks: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.node_count()];
    for (k, iface) in ifaces.iter().enumerate() {
        for (pos, &n) in iface.iter().enumerate() {
            marks[n].push((k, pos));
        }
    }
    let mut node: Vec<u64> =
        (0..g.node_count()).map(|n| hash_of(&(g.colour(n), &marks[n]))).collect();
    let mut edge: Vec<u64> = Vec::new();
    for _ in 0..3 {
        edge = g
            .edges()
            .iter()
            .map(|e| {
                let ts: Vec<u64> = e.tentacles().map(|n| node[n]).collect();
                hash_of(&(e.label, e.sources.len(), ts))
            })
            .collect();
        let mut incident: Vec<Vec<(u64, usize)>> = vec![Vec::new(); g.node_count()];
        for (i, e) in g.edges().iter().enumerate() {
            for (pos, n) in e.tentacles().enumerate() {
                incident[n].push((edge[i], pos));
            }
        }
        node = (0..g.node_count())
            .map(|n| {
                incident[n].sort_unstable();
                hash_of(&(node[n], &incident[n]))
            })
            .collect();
    }
    (node, edge)
}

/// Isomorphism-invariant hash of a graph together with ordered node
/// listings (interfaces). Isomorphic inputs always collide.
pub fn invariant_key(g: &Hypergraph, ifaces: &[&[usize]]) -> u64 {
    let (mut nodes, mut edges) = refine(g, ifaces);
    nodes.sort_unstable();
    edges.sort_unstable();
    let lens: Vec<usize> = ifaces.iter().map(|i| i.len()).collect();
    hash_of(&(nodes, edges, lens))
}

fn sorted(v: &[u64]) -> Vec<u64> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// Edge order in which each edge touches as many already-placed nodes as
/// possible; improves pruning for bijective search.
fn connected_order(g: &Hypergraph, seeded: &[bool]) -> Vec<usize> {
    let mut placed_nodes = seeded.to_vec();
    let mut done = vec![false; g.edge_count()];
    let mut order = Vec::with_capacity(g.edge_count());
    for _ in 0..g.edge_count() {
        let best = (0..g.edge_count())
            .filter(|&e| !done[e])
            .max_by_key(|&e| {
                let hits = g.edge(e).tentacles().filter(|&n| placed_nodes[n]).count();
                (hits, std::cmp::Reverse(e))
            })
            .expect("edge remaining");
        done[best] = true;
        for n in g.edge(best).tentacles() {
            placed_nodes[n] = true;
        }
        order.push(best);
    }
    order
}

/// An isomorphism `g -> h` mapping the `k`-th listing of `g` positionwise
/// onto the `k`-th listing of `h`, if one exists.
pub fn isomorphism_with(
    g: &Hypergraph,
    g_ifaces: &[&[usize]],
    h: &Hypergraph,
    h_ifaces: &[&[usize]],
) -> Option<Homomorphism> {
    if g.node_count() != h.node_count()
        || g.edge_count() != h.edge_count()
        || g_ifaces.len() != h_ifaces.len()
        || g_ifaces.iter().zip(h_ifaces).any(|(a, b)| a.len() != b.len())
    {
        return None;
    }
    let (gn, ge) = refine(g, g_ifaces);
    let (hn, he) = refine(h, h_ifaces);
    if sorted(&gn) != sorted(&hn) || sorted(&ge) != sorted(&he) {
        return None;
    }
    let mut seeded = vec![false; g.node_count()];
    for iface in g_ifaces {
        for &n in iface.iter() {
            seeded[n] = true;
        }
    }
    let order = connected_order(g, &seeded);
    let mut found = None;
    let mut s = Search::new(g, h, true, Some((&gn, &hn)), order, |m: &Homomorphism| {
        found = Some(m.clone());
        ControlFlow::Break(())
    });
    for (gi, hi) in g_ifaces.iter().zip(h_ifaces) {
        for (&p, &q) in gi.iter().zip(hi.iter()) {
            if !s.fix(p, q) {
                return None;
            }
        }
    }
    s.finish_setup();
    let _ = s.edges_phase(0);
    drop(s);
    found
}

/// A bijective homomorphism `g -> h`, if one exists.
pub fn is_isomorphic(g: &Hypergraph, h: &Hypergraph) -> Option<Homomorphism> {
    isomorphism_with(g, &[], h, &[])
}
