//! Double-pushout rewriting with interfaces.
//!
//! A rule is a span `L <- K -> R` with `K` discrete, given as two node
//! listings. Matches are arbitrary homomorphisms `L -> G`; since `K -> L`
//! need not be injective, a match can have several pushout complements and
//! all of them are enumerated.
//!
//! Let `M` be the image of the match on nodes. A complement `C` has as nodes
//! the nodes of `G` outside `M`, plus a quotient of `K` that refines the
//! kernel of `K -> L -> G`. Over each node `n` of `M`, the `L`-nodes and the
//! `K`-blocks above `n` must form a single class once glued along `K`,
//! otherwise the recomputed pushout would split `n`. Edges of `G` outside
//! the match are kept, and every tentacle landing in `M` picks one block
//! above its node. The interface of `G` factors through `C` the same way.

use std::collections::HashMap;

use thiserror::Error;

use crate::cospan::{fold_cospan, Cospan};
use crate::diagram::{fold_term, Diagram, Rule};
use crate::functor::translate;
use crate::hypergraph::{
    find_homomorphisms, invariant_key, isomorphism_with, pushout_discrete, Edge, Homomorphism,
    Hypergraph, UnionFind,
};
use crate::signature::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("interface listings spell different words: {left:?} vs {right:?}")]
    InterfaceMismatch { left: Word, right: Word },
    #[error("interface refers to node {0}, which is out of range")]
    NodeOutOfRange(usize),
}

/// A DPOI rule `L <- K -> R` with discrete `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpoRule {
    pub name: String,
    pub lhs: Hypergraph,
    pub rhs: Hypergraph,
    /// Image in `L` of each node of `K`.
    pub k_lhs: Vec<usize>,
    /// Image in `R` of each node of `K`.
    pub k_rhs: Vec<usize>,
}

impl DpoRule {
    pub fn new(
        name: impl Into<String>,
        lhs: Hypergraph,
        k_lhs: Vec<usize>,
        rhs: Hypergraph,
        k_rhs: Vec<usize>,
    ) -> Result<Self, RuleError> {
        if let Some(&n) = k_lhs.iter().find(|&&n| n >= lhs.node_count()) {
            return Err(RuleError::NodeOutOfRange(n));
        }
        if let Some(&n) = k_rhs.iter().find(|&&n| n >= rhs.node_count()) {
            return Err(RuleError::NodeOutOfRange(n));
        }
        let (left, right) = (lhs.word_of(&k_lhs), rhs.word_of(&k_rhs));
        if left != right {
            return Err(RuleError::InterfaceMismatch { left, right });
        }
        Ok(DpoRule { name: name.into(), lhs, rhs, k_lhs, k_rhs })
    }

    pub fn interface_word(&self) -> Word {
        self.lhs.word_of(&self.k_lhs)
    }

    /// `K` as a discrete hypergraph.
    pub fn interface(&self) -> Hypergraph {
        Hypergraph::discrete(&self.interface_word())
    }

    /// The same rule read right to left.
    pub fn reversed(&self) -> DpoRule {
        DpoRule {
            name: self.name.clone(),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            k_lhs: self.k_rhs.clone(),
            k_rhs: self.k_lhs.clone(),
        }
    }
}

/// `L = ⟦⌊lhs⌋⟧`, `R = ⟦⌊rhs⌋⟧`, with `K` the shared folded boundary.
pub fn rule_from_diagrams(rule: &Rule) -> DpoRule {
    let l = translate(&fold_term(&rule.lhs));
    let r = translate(&fold_term(&rule.rhs));
    let (lhs, _, k_lhs) = l.into_parts();
    let (rhs, _, k_rhs) = r.into_parts();
    DpoRule { name: rule.name.clone(), lhs, rhs, k_lhs, k_rhs }
}

/// A hypergraph with an ordered discrete interface `I -> G`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphWithInterface {
    pub graph: Hypergraph,
    pub interface: Vec<usize>,
}

impl GraphWithInterface {
    pub fn new(graph: Hypergraph, interface: Vec<usize>) -> Result<Self, RuleError> {
        if let Some(&n) = interface.iter().find(|&&n| n >= graph.node_count()) {
            return Err(RuleError::NodeOutOfRange(n));
        }
        Ok(GraphWithInterface { graph, interface })
    }

    /// `⟦⌊a⌋⟧` for a term `a`.
    pub fn from_diagram(a: &Diagram) -> Self {
        Self::from_cospan(&translate(a))
    }

    /// Folds both legs into one interface, left leg first.
    pub fn from_cospan(f: &Cospan) -> Self {
        let (graph, _, interface) = fold_cospan(f).into_parts();
        GraphWithInterface { graph, interface }
    }

    pub fn word(&self) -> Word {
        self.graph.word_of(&self.interface)
    }

    /// The cospan `ε -> G <- I`.
    pub fn as_cospan(&self) -> Cospan {
        Cospan::new(self.graph.clone(), Vec::new(), self.interface.clone()).expect("valid interface")
    }

    /// Reads the first `left` interface positions as the left boundary.
    pub fn unfold(&self, left: usize) -> Cospan {
        let (l, r) = self.interface.split_at(left);
        Cospan::new(self.graph.clone(), l.to_vec(), r.to_vec()).expect("valid interface")
    }

    pub fn key(&self) -> u64 {
        invariant_key(&self.graph, &[&self.interface])
    }

    pub fn isomorphic(&self, other: &GraphWithInterface) -> bool {
        isomorphism_with(&self.graph, &[&self.interface], &other.graph, &[&other.interface])
            .is_some()
    }
}

/// One validated double-pushout diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub rule: String,
    pub matching: Homomorphism,
    pub context: Hypergraph,
    /// `K -> C` on nodes.
    pub k_context: Vec<usize>,
    pub context_to_graph: Homomorphism,
    /// `I -> C` on nodes.
    pub interface_context: Vec<usize>,
    pub result: Hypergraph,
    pub rhs_to_result: Homomorphism,
    pub context_to_result: Homomorphism,
}

impl RewriteStep {
    /// The interface listing into the result, through the context.
    pub fn result_interface(&self) -> Vec<usize> {
        self.interface_context.iter().map(|&n| self.context_to_result.nodes[n]).collect()
    }
}

/// `(G <- I) => (H <- I)`.
pub fn apply_step(step: &RewriteStep) -> GraphWithInterface {
    GraphWithInterface { graph: step.result.clone(), interface: step.result_interface() }
}

/// Why a match admits no pushout complement, if it does not.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GluingReport {
    /// Edges of `G` outside the match touching a node that is deleted.
    pub dangling_edges: Vec<usize>,
    /// Interface positions landing on a deleted node.
    pub orphaned_interface: Vec<usize>,
    /// Nodes of `G` hit by several `L`-nodes not all preserved by `K`.
    pub bad_identifications: Vec<usize>,
    /// Whether the match maps two `L`-edges to one `G`-edge.
    pub merges_edges: bool,
    pub complements: usize,
}

impl GluingReport {
    pub fn holds(&self) -> bool {
        self.complements > 0
    }
}

/// All set partitions of `0..n` as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0; n];
    fn go(i: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == current.len() {
            out.push(current.clone());
            return;
        }
        for b in 0..=max {
            current[i] = b;
            go(i + 1, max.max(b + 1), current, out);
        }
    }
    if n == 0 {
        out.push(Vec::new());
    } else {
        go(0, 0, &mut current, &mut out);
    }
    out
}

/// Cartesian product of choice lists, first list varying slowest.
fn product(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for &o in options {
                let mut p = prefix.clone();
                p.push(o);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Data shared by every complement of one match.
struct MatchShape {
    /// `K -> G` on nodes.
    k_graph: Vec<usize>,
    /// Whether each node of `G` is in the image of the match.
    matched: Vec<bool>,
    /// `K`-nodes above each node of `G`.
    k_over: Vec<Vec<usize>>,
    /// `L`-nodes above each node of `G`.
    l_over: Vec<Vec<usize>>,
    /// Edges of `G` outside the match.
    context_edges: Vec<usize>,
}

impl MatchShape {
    fn new(rule: &DpoRule, g: &Hypergraph, m: &Homomorphism) -> Self {
        let n = g.node_count();
        let k_graph: Vec<usize> = rule.k_lhs.iter().map(|&y| m.nodes[y]).collect();
        let mut matched = vec![false; n];
        let mut l_over = vec![Vec::new(); n];
        for (y, &t) in m.nodes.iter().enumerate() {
            matched[t] = true;
            l_over[t].push(y);
        }
        let mut k_over = vec![Vec::new(); n];
        for (x, &t) in k_graph.iter().enumerate() {
            k_over[t].push(x);
        }
        let mut in_match = vec![false; g.edge_count()];
        for &f in &m.edges {
            in_match[f] = true;
        }
        let context_edges = (0..g.edge_count()).filter(|&f| !in_match[f]).collect();
        MatchShape { k_graph, matched, k_over, l_over, context_edges }
    }
}

/// A quotient of `K` (block of each `K`-node, blocks numbered by smallest
/// member) that glues every fibre into one class.
fn valid_block_assignments(rule: &DpoRule, shape: &MatchShape) -> Vec<Vec<usize>> {
    let groups: Vec<&Vec<usize>> = shape.k_over.iter().filter(|ks| !ks.is_empty()).collect();
    let per_group: Vec<Vec<Vec<usize>>> = groups.iter().map(|ks| set_partitions(ks.len())).collect();
    let sizes: Vec<Vec<usize>> = per_group.iter().map(|ps| (0..ps.len()).collect()).collect();
    let mut out = Vec::new();
    'combo: for pick in product(&sizes) {
        let mut labels = vec![(0usize, 0usize); rule.k_lhs.len()];
        for (gi, ks) in groups.iter().enumerate() {
            let rgs = &per_group[gi][pick[gi]];
            for (j, &x) in ks.iter().enumerate() {
                labels[x] = (gi, rgs[j]);
            }
        }
        let mut numbering: HashMap<(usize, usize), usize> = HashMap::new();
        let blocks: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = numbering.len();
                *numbering.entry(*l).or_insert(next)
            })
            .collect();
        // Fibre connectivity: L-nodes and blocks glued along K.
        let nl = rule.lhs.node_count();
        let mut uf = UnionFind::new(nl + numbering.len());
        for (x, &b) in blocks.iter().enumerate() {
            uf.union(rule.k_lhs[x], nl + b);
        }
        for (t, ls) in shape.l_over.iter().enumerate() {
            if !shape.matched[t] {
                continue;
            }
            let root = uf.find(ls[0]);
            if ls.iter().any(|&y| uf.find(y) != root) {
                continue 'combo;
            }
            if shape.k_over[t].iter().any(|&x| uf.find(nl + blocks[x]) != root) {
                continue 'combo;
            }
        }
        out.push(blocks);
    }
    out
}

/// Checks the gluing conditions for `m` and counts pushout complements,
/// interface factorizations included.
pub fn gluing_report(rule: &DpoRule, g: &GraphWithInterface, m: &Homomorphism) -> GluingReport {
    let graph = &g.graph;
    let shape = MatchShape::new(rule, graph, m);
    let deleted = |t: usize| shape.matched[t] && shape.k_over[t].is_empty();
    let mut report = GluingReport {
        merges_edges: !crate::hypergraph::Homomorphism::new(Vec::new(), m.edges.clone())
            .is_injective(),
        ..GluingReport::default()
    };
    report.dangling_edges = shape
        .context_edges
        .iter()
        .copied()
        .filter(|&f| graph.edge(f).tentacles().any(deleted))
        .collect();
    report.orphaned_interface =
        (0..g.interface.len()).filter(|&i| deleted(g.interface[i])).collect();
    let preserved: Vec<bool> = {
        let mut p = vec![false; rule.lhs.node_count()];
        for &y in &rule.k_lhs {
            p[y] = true;
        }
        p
    };
    report.bad_identifications = (0..graph.node_count())
        .filter(|&t| shape.l_over[t].len() >= 2 && shape.l_over[t].iter().any(|&y| !preserved[y]))
        .collect();
    report.complements = complements(rule, g, m).len();
    report
}

/// `true` iff at least one pushout complement (with interface) exists.
pub fn dangling_and_identification_check(
    rule: &DpoRule,
    g: &GraphWithInterface,
    m: &Homomorphism,
) -> bool {
    gluing_report(rule, g, m).holds()
}

struct Complement {
    context: Hypergraph,
    k_context: Vec<usize>,
    context_to_graph: Homomorphism,
    interface_context: Vec<usize>,
}

fn complements(rule: &DpoRule, g: &GraphWithInterface, m: &Homomorphism) -> Vec<Complement> {
    let graph = &g.graph;
    if !Homomorphism::new(Vec::new(), m.edges.clone()).is_injective() {
        return Vec::new();
    }
    let shape = MatchShape::new(rule, graph, m);
    let outside: Vec<usize> = (0..graph.node_count()).filter(|&t| !shape.matched[t]).collect();
    let mut out = Vec::new();
    for blocks in valid_block_assignments(rule, &shape) {
        let block_count = blocks.iter().copied().max().map_or(0, |b| b + 1);
        // representative K-node of each block, and blocks above each G-node
        let mut rep = vec![usize::MAX; block_count];
        for (x, &b) in blocks.iter().enumerate() {
            if rep[b] == usize::MAX {
                rep[b] = x;
            }
        }
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); graph.node_count()];
        for b in 0..block_count {
            above[shape.k_graph[rep[b]]].push(b);
        }
        let mut context_node = vec![usize::MAX; graph.node_count()];
        for (i, &t) in outside.iter().enumerate() {
            context_node[t] = block_count + i;
        }
        let options = |t: usize| -> Vec<usize> {
            if shape.matched[t] {
                above[t].clone()
            } else {
                vec![context_node[t]]
            }
        };
        let mut choices: Vec<Vec<usize>> = Vec::new();
        for &f in &shape.context_edges {
            choices.extend(graph.edge(f).tentacles().map(options));
        }
        choices.extend(g.interface.iter().map(|&t| options(t)));
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut base = Hypergraph::new();
        let mut to_graph = Vec::with_capacity(block_count + outside.len());
        for b in 0..block_count {
            let t = shape.k_graph[rep[b]];
            base.add_node(graph.colour(t));
            to_graph.push(t);
        }
        for &t in &outside {
            base.add_node(graph.colour(t));
            to_graph.push(t);
        }
        for pick in product(&choices) {
            let mut context = base.clone();
            let mut it = pick.iter().copied();
            for &f in &shape.context_edges {
                let e = graph.edge(f);
                let sources = it.by_ref().take(e.sources.len()).collect();
                let targets = it.by_ref().take(e.targets.len()).collect();
                context.push_edge(Edge { label: e.label, sources, targets });
            }
            let interface_context: Vec<usize> = it.collect();
            out.push(Complement {
                context,
                k_context: blocks.clone(),
                context_to_graph: Homomorphism::new(to_graph.clone(), shape.context_edges.clone()),
                interface_context,
            });
        }
    }
    out
}

/// Checks that `L +_K C` is `G` via the match and `C -> G`, and that the
/// interface factors through `C`.
fn left_square_is_pushout(
    rule: &DpoRule,
    g: &GraphWithInterface,
    m: &Homomorphism,
    c: &Complement,
) -> bool {
    let graph = &g.graph;
    let k = rule.interface();
    if !m.is_valid(&rule.lhs, graph) || !c.context_to_graph.is_valid(&c.context, graph) {
        return false;
    }
    // commutation on K
    if (0..k.node_count())
        .any(|x| m.nodes[rule.k_lhs[x]] != c.context_to_graph.nodes[c.k_context[x]])
    {
        return false;
    }
    let kl = Homomorphism::new(rule.k_lhs.clone(), Vec::new());
    let kc = Homomorphism::new(c.k_context.clone(), Vec::new());
    let Ok((p, pl, pc)) = pushout_discrete(&k, &rule.lhs, &kl, &c.context, &kc) else {
        return false;
    };
    // comparison P -> G, required to be a well-defined bijective homomorphism
    let mut nodes = vec![usize::MAX; p.node_count()];
    let mut edges = vec![usize::MAX; p.edge_count()];
    let pairs = [(&pl, m), (&pc, &c.context_to_graph)];
    for (into_p, into_g) in pairs {
        for (a, &b) in into_p.nodes.iter().enumerate() {
            let target = into_g.nodes[a];
            if nodes[b] != usize::MAX && nodes[b] != target {
                return false;
            }
            nodes[b] = target;
        }
        for (a, &b) in into_p.edges.iter().enumerate() {
            edges[b] = into_g.edges[a];
        }
    }
    let phi = Homomorphism::new(nodes, edges);
    if !phi.is_valid(&p, graph) || !phi.is_injective() || !phi.is_surjective(graph) {
        return false;
    }
    g.interface
        .iter()
        .zip(&c.interface_context)
        .all(|(&t, &z)| c.context_to_graph.nodes[z] == t)
        && g.interface.len() == c.interface_context.len()
}

/// Re-validates both squares of a step of `rule` on `g`.
pub fn validate_step(rule: &DpoRule, g: &GraphWithInterface, step: &RewriteStep) -> bool {
    let c = Complement {
        context: step.context.clone(),
        k_context: step.k_context.clone(),
        context_to_graph: step.context_to_graph.clone(),
        interface_context: step.interface_context.clone(),
    };
    if !left_square_is_pushout(rule, g, &step.matching, &c) {
        return false;
    }
    let k = rule.interface();
    let kr = Homomorphism::new(rule.k_rhs.clone(), Vec::new());
    let kc = Homomorphism::new(step.k_context.clone(), Vec::new());
    let Ok((h, rh, ch)) = pushout_discrete(&k, &rule.rhs, &kr, &step.context, &kc) else {
        return false;
    };
    let expected_iface: Vec<usize> = step.interface_context.iter().map(|&z| ch.nodes[z]).collect();
    let result_iface = step.result_interface();
    match isomorphism_with(&h, &[&expected_iface], &step.result, &[&result_iface]) {
        Some(iso) => rh.then(&iso) == step.rhs_to_result && ch.then(&iso) == step.context_to_result,
        None => false,
    }
}

fn build_step(rule: &DpoRule, m: &Homomorphism, c: Complement) -> RewriteStep {
    let k = rule.interface();
    let kr = Homomorphism::new(rule.k_rhs.clone(), Vec::new());
    let kc = Homomorphism::new(c.k_context.clone(), Vec::new());
    let (result, rhs_to_result, context_to_result) =
        pushout_discrete(&k, &rule.rhs, &kr, &c.context, &kc).expect("discrete interface");
    RewriteStep {
        rule: rule.name.clone(),
        matching: m.clone(),
        context: c.context,
        k_context: c.k_context,
        context_to_graph: c.context_to_graph,
        interface_context: c.interface_context,
        result,
        rhs_to_result,
        context_to_result,
    }
}

/// Every validated step of `rule` at one given match, one per pushout
/// complement and interface factorization, without deduplication.
pub fn steps_at_match(rule: &DpoRule, g: &GraphWithInterface, m: &Homomorphism) -> Vec<RewriteStep> {
    complements(rule, g, m)
        .into_iter()
        .filter(|c| left_square_is_pushout(rule, g, m, c))
        .map(|c| build_step(rule, m, c))
        .collect()
}

/// Records `x` unless an isomorphic value is already present.
pub(crate) fn remember(seen: &mut HashMap<u64, Vec<GraphWithInterface>>, x: GraphWithInterface) -> bool {
    let bucket = seen.entry(x.key()).or_default();
    if bucket.iter().any(|y| y.isomorphic(&x)) {
        return false;
    }
    bucket.push(x);
    true
}

/// Every rewrite step of `rule` on `g`, over all matches, pushout
/// complements and interface factorizations, deduplicated up to
/// isomorphism of the result `(H <- I)`.
pub fn find_rewrite_steps(rule: &DpoRule, g: &GraphWithInterface) -> Vec<RewriteStep> {
    let mut seen: HashMap<u64, Vec<GraphWithInterface>> = HashMap::new();
    let mut out = Vec::new();
    for m in find_homomorphisms(&rule.lhs, &g.graph) {
        for step in steps_at_match(rule, g, &m) {
            if remember(&mut seen, apply_step(&step)) {
                out.push(step);
            }
        }
    }
    out
}

/// All one-step successors of `g` under `rules`, deduplicated up to
/// isomorphism, in rule order.
pub fn successors(rules: &[DpoRule], g: &GraphWithInterface) -> Vec<(usize, GraphWithInterface)> {
    let mut seen: HashMap<u64, Vec<GraphWithInterface>> = HashMap::new();
    let mut out = Vec::new();
    for (i, rule) in rules.iter().enumerate() {
        for step in find_rewrite_steps(rule, g) {
            let h = apply_step(&step);
            if remember(&mut seen, h.clone()) {
                out.push((i, h));
            }
        }
    }
    out
}

/// Rewrites the folded translation of `a` with each rule: the results are
/// the folded translations of the one-step syntactic successors of `a`.
pub fn syntactic_step(rules: &[Rule], a: &Diagram) -> Vec<GraphWithInterface> {
    let dpo: Vec<DpoRule> = rules.iter().map(rule_from_diagrams).collect();
    let g = GraphWithInterface::from_diagram(a);
    successors(&dpo, &g).into_iter().map(|(_, h)| h).collect()
}
