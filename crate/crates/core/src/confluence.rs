//! Critical pairs and the Knuth-Bendix check for DPOI rewriting systems.
//!
//! A critical pair of rules `ρ1`, `ρ2` is a graph `S` covered jointly by
//! matches of `L1` and `L2`, together with a step of each rule at its
//! match. The two results share the interface `J`, the pullback of the two
//! contexts over `S`. A terminating system is confluent iff every critical
//! pair is joinable.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::dpoi::{remember, steps_at_match, successors, DpoRule, GraphWithInterface};
use crate::hypergraph::{coproduct, pullback, quotient, Homomorphism, Hypergraph, Partition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfluenceError {
    #[error("critical pair of `{rule1}` and `{rule2}` has a non-discrete interface")]
    ApexNotDiscrete { rule1: String, rule2: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPair {
    /// Indices into the rule list.
    pub rule1: usize,
    pub rule2: usize,
    pub overlap: Hypergraph,
    pub match1: Homomorphism,
    pub match2: Homomorphism,
    pub context1: Hypergraph,
    pub context2: Hypergraph,
    pub context1_to_overlap: Homomorphism,
    pub context2_to_overlap: Homomorphism,
    /// The pullback of the two contexts.
    pub apex: Hypergraph,
    pub apex_to_context1: Homomorphism,
    pub apex_to_context2: Homomorphism,
    /// `(H1 <- J)`, the apex listed in node order.
    pub result1: GraphWithInterface,
    pub result2: GraphWithInterface,
    /// Whether the two matches have disjoint images.
    pub disjoint: bool,
}

/// How a quotient of `L1 + L2` may merge nodes without certainly violating
/// the identification condition: a node deleted by its rule may share its
/// image with no other node of the same left-hand side.
struct NodeSide {
    /// 0 for `L1`, 1 for `L2`.
    side: usize,
    deleted: bool,
}

fn node_sides(r1: &DpoRule, r2: &DpoRule) -> Vec<NodeSide> {
    let mut out = Vec::new();
    for (side, r) in [r1, r2].into_iter().enumerate() {
        let mut kept = vec![false; r.lhs.node_count()];
        for &y in &r.k_lhs {
            kept[y] = true;
        }
        out.extend(kept.into_iter().map(|k| NodeSide { side, deleted: !k }));
    }
    out
}

/// Node partitions of `L1 + L2`: colour-homogeneous, respecting the
/// deletion constraint above. Block labels in restricted growth form.
fn overlap_node_partitions(sum: &Hypergraph, sides: &[NodeSide]) -> Vec<Vec<usize>> {
    struct Block {
        colour: crate::signature::Colour,
        members: [usize; 2],
        deleted: [bool; 2],
    }
    fn go(
        i: usize,
        sum: &Hypergraph,
        sides: &[NodeSide],
        blocks: &mut Vec<Block>,
        labels: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == sum.node_count() {
            out.push(labels.clone());
            return;
        }
        let NodeSide { side, deleted } = sides[i];
        for b in 0..blocks.len() {
            let blk = &blocks[b];
            if blk.colour != sum.colour(i)
                || (blk.members[side] > 0 && (deleted || blk.deleted[side]))
            {
                continue;
            }
            let was = blocks[b].deleted[side];
            blocks[b].members[side] += 1;
            blocks[b].deleted[side] |= deleted;
            labels.push(b);
            go(i + 1, sum, sides, blocks, labels, out);
            labels.pop();
            blocks[b].members[side] -= 1;
            blocks[b].deleted[side] = was;
        }
        let mut members = [0; 2];
        let mut dels = [false; 2];
        members[side] = 1;
        dels[side] = deleted;
        blocks.push(Block { colour: sum.colour(i), members, deleted: dels });
        labels.push(blocks.len() - 1);
        go(i + 1, sum, sides, blocks, labels, out);
        labels.pop();
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, sum, sides, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// Edge partitions merging `L1`-edges with `L2`-edges of equal label whose
/// endpoints already coincide, each edge at most once.
fn overlap_edge_partitions(sum: &Hypergraph, split: usize, nodes: &[usize]) -> Vec<Vec<usize>> {
    let e = sum.edge_count();
    let image = |i: usize| {
        let edge = sum.edge(i);
        (
            edge.label,
            edge.sources.iter().map(|&n| nodes[n]).collect::<Vec<_>>(),
            edge.targets.iter().map(|&n| nodes[n]).collect::<Vec<_>>(),
        )
    };
    let images: Vec<_> = (0..e).map(image).collect();
    let mut out = Vec::new();
    let mut partner = vec![usize::MAX; split];
    let mut used = vec![false; e];
    fn go(
        i: usize,
        split: usize,
        images: &[(crate::signature::OpId, Vec<usize>, Vec<usize>)],
        partner: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == split {
            let mut labels: Vec<usize> = (0..images.len()).collect();
            for (a, &b) in partner.iter().enumerate() {
                if b != usize::MAX {
                    labels[b] = a;
                }
            }
            out.push(labels);
            return;
        }
        go(i + 1, split, images, partner, used, out);
        for j in split..images.len() {
            if !used[j] && images[i] == images[j] {
                used[j] = true;
                partner[i] = j;
                go(i + 1, split, images, partner, used, out);
                partner[i] = usize::MAX;
                used[j] = false;
            }
        }
    }
    go(0, split, &images, &mut partner, &mut used, &mut out);
    out
}

fn share_material(m1: &Homomorphism, m2: &Homomorphism) -> bool {
    m1.nodes.iter().any(|n| m2.nodes.contains(n)) || m1.edges.iter().any(|e| m2.edges.contains(e))
}

/// Critical pairs of `rules[i]` with `rules[j]`, in generation order.
fn pairs_of(
    rules: &[DpoRule],
    i: usize,
    j: usize,
    keep_disjoint: bool,
) -> Result<Vec<CriticalPair>, ConfluenceError> {
    let (r1, r2) = (&rules[i], &rules[j]);
    let (sum, in1, in2) = coproduct(&r1.lhs, &r2.lhs);
    let sides = node_sides(r1, r2);
    let split = r1.lhs.edge_count();
    let mut out = Vec::new();
    for nodes in overlap_node_partitions(&sum, &sides) {
        for edges in overlap_edge_partitions(&sum, split, &nodes) {
            let node_part = Partition::from_labels(&nodes);
            let edge_part = Partition::from_labels(&edges);
            let Ok((s, proj)) = quotient(&sum, &node_part, &edge_part) else {
                continue;
            };
            let m1 = in1.then(&proj);
            let m2 = in2.then(&proj);
            let disjoint = !share_material(&m1, &m2);
            if disjoint && !keep_disjoint {
                continue;
            }
            let host = GraphWithInterface { graph: s.clone(), interface: Vec::new() };
            let steps1 = steps_at_match(r1, &host, &m1);
            if steps1.is_empty() {
                continue;
            }
            let steps2 = steps_at_match(r2, &host, &m2);
            for a in &steps1 {
                for b in &steps2 {
                    let (apex, j1, j2) =
                        pullback(&a.context, &a.context_to_graph, &b.context, &b.context_to_graph);
                    if !apex.is_discrete() {
                        return Err(ConfluenceError::ApexNotDiscrete {
                            rule1: r1.name.clone(),
                            rule2: r2.name.clone(),
                        });
                    }
                    let listing = |h: &Homomorphism, into: &Homomorphism| -> Vec<usize> {
                        h.nodes.iter().map(|&z| into.nodes[z]).collect()
                    };
                    let result1 = GraphWithInterface {
                        graph: a.result.clone(),
                        interface: listing(&j1, &a.context_to_result),
                    };
                    let result2 = GraphWithInterface {
                        graph: b.result.clone(),
                        interface: listing(&j2, &b.context_to_result),
                    };
                    out.push(CriticalPair {
                        rule1: i,
                        rule2: j,
                        overlap: s.clone(),
                        match1: m1.clone(),
                        match2: m2.clone(),
                        context1: a.context.clone(),
                        context2: b.context.clone(),
                        context1_to_overlap: a.context_to_graph.clone(),
                        context2_to_overlap: b.context_to_graph.clone(),
                        apex,
                        apex_to_context1: j1,
                        apex_to_context2: j2,
                        result1,
                        result2,
                        disjoint,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Pairs whose two results are isomorphic to those of an earlier pair
/// (each side separately, over the same apex listing) are dropped.
fn dedup_pairs(pairs: Vec<CriticalPair>) -> Vec<CriticalPair> {
    let mut seen: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    let mut out: Vec<CriticalPair> = Vec::new();
    for p in pairs {
        let key = (p.result1.key(), p.result2.key());
        let bucket = seen.entry(key).or_default();
        let dup = bucket.iter().any(|&k| {
            let q = &out[k];
            q.result1.interface.len() == p.result1.interface.len()
                && q.result1.isomorphic(&p.result1)
                && q.result2.isomorphic(&p.result2)
        });
        if !dup {
            bucket.push(out.len());
            out.push(p);
        }
    }
    out
}

/// All critical pairs of the system, for each pair of rules `i <= j`.
///
/// Overlaps are quotients of `L1 + L2`; within one pair of rules they are
/// listed with fewer overlap edges first, then more overlap nodes, so the
/// most spread-out overlaps come first. Pairs whose matches have disjoint
/// images are skipped unless `keep_disjoint` is set.
pub fn enumerate_critical_pairs(
    rules: &[DpoRule],
    keep_disjoint: bool,
) -> Result<Vec<CriticalPair>, ConfluenceError> {
    let mut all = Vec::new();
    for i in 0..rules.len() {
        for j in i..rules.len() {
            let mut pairs = pairs_of(rules, i, j, keep_disjoint)?;
            pairs.sort_by_key(|p| {
                (p.overlap.edge_count(), std::cmp::Reverse(p.overlap.node_count()))
            });
            all.extend(dedup_pairs(pairs));
        }
    }
    Ok(all)
}

/// Either an assertion that the system terminates (searches run to
/// exhaustion) or a bound on the number of steps explored from each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Asserted,
    Bounded(usize),
}

impl Termination {
    fn limit(self) -> Option<usize> {
        match self {
            Termination::Asserted => None,
            Termination::Bounded(n) => Some(n),
        }
    }
}

/// A rewrite sequence: the states visited, starting state first, and the
/// rule used for each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub states: Vec<GraphWithInterface>,
    pub rules: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinabilityCertificate {
    pub common: GraphWithInterface,
    pub left: Path,
    pub right: Path,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Joinability {
    Joinable(JoinabilityCertificate),
    /// Both reachable sets were explored completely without meeting.
    NotJoinable,
    /// The bound was hit before a decision.
    Unknown,
}

/// Breadth-first exploration from one side with parent pointers.
struct Frontier {
    states: Vec<GraphWithInterface>,
    parent: Vec<Option<(usize, usize)>>,
    index: HashMap<u64, Vec<usize>>,
    layer: Vec<usize>,
    depth: usize,
}

impl Frontier {
    fn new(start: GraphWithInterface) -> Self {
        let mut index = HashMap::new();
        index.insert(start.key(), vec![0]);
        Frontier { states: vec![start], parent: vec![None], index, layer: vec![0], depth: 0 }
    }

    fn find(&self, g: &GraphWithInterface) -> Option<usize> {
        self.index.get(&g.key())?.iter().copied().find(|&k| self.states[k].isomorphic(g))
    }

    fn path_to(&self, mut k: usize) -> Path {
        let mut states = vec![self.states[k].clone()];
        let mut rules = Vec::new();
        while let Some((p, r)) = self.parent[k] {
            states.push(self.states[p].clone());
            rules.push(r);
            k = p;
        }
        states.reverse();
        rules.reverse();
        Path { states, rules }
    }

    /// Expands one layer; returns the indices of new states.
    fn expand(&mut self, rules: &[DpoRule]) -> Vec<usize> {
        let mut fresh = Vec::new();
        for &k in &std::mem::take(&mut self.layer) {
            for (r, h) in successors(rules, &self.states[k]) {
                if self.find(&h).is_none() {
                    let id = self.states.len();
                    self.index.entry(h.key()).or_default().push(id);
                    self.states.push(h);
                    self.parent.push(Some((k, r)));
                    fresh.push(id);
                }
            }
        }
        self.depth += 1;
        self.layer = fresh.clone();
        fresh
    }

    fn exhausted(&self) -> bool {
        self.layer.is_empty()
    }
}

/// Searches for a common reduct of `a` and `b`. Each side explores at most
/// `termination`'s bound many steps.
pub fn join(
    a: &GraphWithInterface,
    b: &GraphWithInterface,
    rules: &[DpoRule],
    termination: Termination,
) -> Joinability {
    let mut sides = [Frontier::new(a.clone()), Frontier::new(b.clone())];
    if let Some(k) = sides[1].find(a) {
        return Joinability::Joinable(JoinabilityCertificate {
            common: a.clone(),
            left: sides[0].path_to(0),
            right: sides[1].path_to(k),
        });
    }
    let limit = termination.limit();
    loop {
        let mut progressed = false;
        for s in 0..2 {
            if sides[s].exhausted() || limit.is_some_and(|l| sides[s].depth >= l) {
                continue;
            }
            progressed = true;
            for id in sides[s].expand(rules) {
                let other = &sides[1 - s];
                if let Some(k) = other.find(&sides[s].states[id]) {
                    let (left, right) = if s == 0 {
                        (sides[0].path_to(id), sides[1].path_to(k))
                    } else {
                        (sides[0].path_to(k), sides[1].path_to(id))
                    };
                    return Joinability::Joinable(JoinabilityCertificate {
                        common: left.states.last().expect("non-empty path").clone(),
                        left,
                        right,
                    });
                }
            }
        }
        if !progressed {
            break;
        }
    }
    if sides.iter().all(Frontier::exhausted) {
        Joinability::NotJoinable
    } else {
        Joinability::Unknown
    }
}

/// Joinability of the two results of a critical pair.
pub fn is_joinable(pair: &CriticalPair, rules: &[DpoRule], termination: Termination) -> Joinability {
    join(&pair.result1, &pair.result2, rules, termination)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Confluent,
    NotConfluent,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Confluent => "CONFLUENT",
            Verdict::NotConfluent => "NOT_CONFLUENT",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ConfluenceReport {
    pub verdict: Verdict,
    pub pairs: Vec<(CriticalPair, Joinability)>,
}

impl ConfluenceReport {
    /// The first pair shown not to be joinable.
    pub fn counterexample(&self) -> Option<&CriticalPair> {
        self.pairs.iter().find(|(_, j)| *j == Joinability::NotJoinable).map(|(p, _)| p)
    }
}

/// Decides whether every critical pair is joinable. Under
/// [`Termination::Asserted`] this decides confluence. A pair whose
/// reachable sets are exhausted without meeting refutes confluence whatever
/// the termination status; a bound that runs out yields `Inconclusive`.
pub fn check_confluence(
    rules: &[DpoRule],
    termination: Termination,
    keep_disjoint: bool,
) -> Result<ConfluenceReport, ConfluenceError> {
    let pairs = enumerate_critical_pairs(rules, keep_disjoint)?;
    let mut verdict = Verdict::Confluent;
    let mut out = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let j = is_joinable(&pair, rules, termination);
        match j {
            Joinability::NotJoinable => verdict = Verdict::NotConfluent,
            Joinability::Unknown if verdict == Verdict::Confluent => verdict = Verdict::Inconclusive,
            _ => {}
        }
        out.push((pair, j));
    }
    Ok(ConfluenceReport { verdict, pairs: out })
}

#[derive(Debug, Clone)]
pub struct NormalForms {
    pub forms: Vec<GraphWithInterface>,
    /// `false` if the bound stopped the search with states still unexplored.
    pub complete: bool,
}

/// Irreducible graphs reachable from `g`, deduplicated up to isomorphism.
pub fn normal_forms(
    g: &GraphWithInterface,
    rules: &[DpoRule],
    termination: Termination,
) -> NormalForms {
    let mut seen = HashMap::new();
    remember(&mut seen, g.clone());
    let mut queue = VecDeque::from([(g.clone(), 0usize)]);
    let mut forms = Vec::new();
    let mut complete = true;
    while let Some((state, depth)) = queue.pop_front() {
        let next = successors(rules, &state);
        if next.is_empty() {
            forms.push(state);
            continue;
        }
        if termination.limit().is_some_and(|l| depth >= l) {
            complete = false;
            continue;
        }
        for (_, h) in next {
            if remember(&mut seen, h.clone()) {
                queue.push_back((h, depth + 1));
            }
        }
    }
    NormalForms { forms, complete }
}
