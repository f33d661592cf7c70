//! Generators and brute-force reference implementations shared by the
//! integration tests. Nothing here calls into the search, gluing or
//! complement code of the library; it only uses the plain data types.

#![allow(dead_code)]

use std::collections::HashMap;

use hyprewrite::cospan::Cospan;
use hyprewrite::diagram::{Diagram, DiagramKind};
use hyprewrite::dpoi::{DpoRule, GraphWithInterface};
use hyprewrite::hypergraph::{Homomorphism, Hypergraph};
use hyprewrite::signature::{parse_signature, Colour, OpId, Signature, Word};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const THREE_COLOURS: &str = "\
colour a
colour b
colour c
op f : a -> b
op g : a b -> c
op h : c -> a a
op k : -> b
op z : c ->
";

pub const EXAMPLE: &str = "colour c\ncolour d\nop o1 : c -> c d\nop o2 : d d -> c\n";

pub const SWITCH: &str = "colour r\ncolour g\nop gr : g -> r\nop rg : r -> g\n";

pub fn sig(text: &str) -> Signature {
    parse_signature(text).expect("test signature parses")
}

pub fn colours(sig: &Signature) -> Vec<Colour> {
    sig.colours().collect()
}

pub fn ops(sig: &Signature) -> Vec<OpId> {
    sig.operations().map(|(o, _)| o).collect()
}

pub fn random_word(rng: &mut StdRng, sig: &Signature, max_len: usize) -> Word {
    let cs = colours(sig);
    let n = rng.gen_range(0..=max_len);
    Word::new((0..n).map(|_| *cs.choose(rng).unwrap()).collect())
}

/// Picks a node of colour `c`, adding one while below `cap` or when none
/// exists yet.
fn node_of(rng: &mut StdRng, g: &mut Hypergraph, c: Colour, cap: usize) -> usize {
    let existing: Vec<usize> = (0..g.node_count()).filter(|&n| g.colour(n) == c).collect();
    if existing.is_empty() || (g.node_count() < cap && rng.gen_bool(0.3)) {
        return g.add_node(c);
    }
    *existing.choose(rng).unwrap()
}

/// Adds up to `edges` random edges to `g`, growing it up to `cap` nodes.
pub fn add_random_edges(rng: &mut StdRng, sig: &Signature, g: &mut Hypergraph, edges: usize, cap: usize) {
    let all = ops(sig);
    for _ in 0..edges {
        let op = *all.choose(rng).unwrap();
        let sources = sig.arity(op).iter().map(|c| node_of(rng, g, c, cap)).collect();
        let targets = sig.coarity(op).iter().map(|c| node_of(rng, g, c, cap)).collect();
        g.add_edge(sig, op, sources, targets).expect("typed by construction");
    }
}

pub fn random_graph(rng: &mut StdRng, sig: &Signature, max_nodes: usize, max_edges: usize) -> Hypergraph {
    let cs = colours(sig);
    let mut g = Hypergraph::new();
    for _ in 0..rng.gen_range(0..=max_nodes.min(3)) {
        g.add_node(*cs.choose(rng).unwrap());
    }
    let e = rng.gen_range(0..=max_edges);
    add_random_edges(rng, sig, &mut g, e, max_nodes);
    g
}

/// A cospan `dom -> G <- cod` whose carrier has at most `max_nodes` nodes
/// beyond what the interfaces force.
pub fn random_typed_cospan(
    rng: &mut StdRng,
    sig: &Signature,
    dom: &Word,
    cod: &Word,
    max_nodes: usize,
    max_edges: usize,
) -> Cospan {
    let mut g = Hypergraph::new();
    let cap = max_nodes.max(1);
    let leg = |rng: &mut StdRng, g: &mut Hypergraph, w: &Word| -> Vec<usize> {
        w.iter().map(|c| node_of(rng, g, c, cap)).collect()
    };
    let left = leg(rng, &mut g, dom);
    let right = leg(rng, &mut g, cod);
    let e = rng.gen_range(0..=max_edges);
    add_random_edges(rng, sig, &mut g, e, cap + 2);
    Cospan::new(g, left, right).unwrap()
}

pub fn random_cospan(rng: &mut StdRng, sig: &Signature, max_nodes: usize, max_edges: usize) -> Cospan {
    let g = random_graph(rng, sig, max_nodes, max_edges);
    if g.node_count() == 0 {
        return Cospan::new(g, vec![], vec![]).unwrap();
    }
    let n = g.node_count();
    let left = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..n)).collect();
    let right = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..n)).collect();
    Cospan::new(g, left, right).unwrap()
}

/// One layer of a structural term over `dom`: wires are consumed left to
/// right by identities, symmetries, Frobenius generators or operations, with
/// occasional nullary pieces slotted in. Width is kept near `max_width`.
fn random_layer(rng: &mut StdRng, sig: &Signature, dom: &Word, max_width: usize) -> Diagram {
    let w = dom.colours();
    let cs = colours(sig);
    let nullary: Vec<OpId> = ops(sig).into_iter().filter(|&o| sig.arity(o).is_empty()).collect();
    let wide = w.len() >= max_width;
    let mut pieces: Vec<Diagram> = Vec::new();
    let mut i = 0;
    loop {
        if !wide && rng.gen_bool(0.08) {
            let c = *cs.choose(rng).unwrap();
            pieces.push(match nullary.choose(rng) {
                Some(&o) if rng.gen_bool(0.5) => Diagram::gen(sig, o),
                _ => Diagram::unit(c),
            });
        }
        if i >= w.len() {
            break;
        }
        let c = w[i];
        let mut options: Vec<Diagram> = vec![Diagram::id(c), Diagram::id(c)];
        if i + 1 < w.len() {
            options.push(Diagram::sym(c, w[i + 1]));
            if w[i + 1] == c {
                options.push(Diagram::mult(c));
            }
        }
        if wide {
            options.push(Diagram::counit(c));
        } else {
            options.push(Diagram::comult(c));
            if rng.gen_bool(0.3) {
                options.push(Diagram::counit(c));
            }
        }
        for (o, _) in sig.operations() {
            let a = sig.arity(o);
            if !a.is_empty() && w[i..].starts_with(a.colours()) {
                options.push(Diagram::gen(sig, o));
                options.push(Diagram::gen(sig, o));
            }
        }
        let piece = options.choose(rng).unwrap().clone();
        i += piece.dom().len();
        pieces.push(piece);
    }
    pieces
        .into_iter()
        .reduce(|a, b| Diagram::par(&a, &b))
        .unwrap_or_else(Diagram::empty)
}

/// A layered term with the given domain.
pub fn random_term(rng: &mut StdRng, sig: &Signature, dom: &Word, layers: usize) -> Diagram {
    let mut d = random_layer(rng, sig, dom, 5);
    for _ in 1..layers {
        let next = random_layer(rng, sig, d.cod(), 5);
        d = Diagram::seq(&d, &next).expect("layer fits");
    }
    d
}

/// Layers of identities, symmetries and operations only.
pub fn random_pure_term(rng: &mut StdRng, sig: &Signature, dom: &Word, layers: usize) -> Diagram {
    let mut d: Option<Diagram> = None;
    let mut cur = dom.clone();
    for _ in 0..layers {
        let w = cur.colours().to_vec();
        let mut pieces = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut options = vec![Diagram::id(w[i])];
            if i + 1 < w.len() {
                options.push(Diagram::sym(w[i], w[i + 1]));
            }
            for (o, _) in sig.operations() {
                let a = sig.arity(o);
                if !a.is_empty() && w[i..].starts_with(a.colours()) && sig.coarity(o).len() + w.len() <= 7 {
                    options.push(Diagram::gen(sig, o));
                }
            }
            let p = options.choose(rng).unwrap().clone();
            i += p.dom().len();
            pieces.push(p);
        }
        let layer = pieces.into_iter().reduce(|a, b| Diagram::par(&a, &b)).unwrap_or_else(Diagram::empty);
        cur = layer.cod().clone();
        d = Some(match d {
            None => layer,
            Some(prev) => Diagram::seq(&prev, &layer).unwrap(),
        });
    }
    d.unwrap_or_else(Diagram::empty)
}

// Reference semantics. These follow the definitions directly and favour
// exhaustive enumeration over cleverness.

struct Uf(Vec<usize>);

impl Uf {
    fn new(n: usize) -> Self {
        Uf((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a.max(b)] = a.min(b);
    }

    /// Dense class numbers in order of first occurrence, and their count.
    fn classes(&mut self) -> (Vec<usize>, usize) {
        let mut names = HashMap::new();
        let mut out = Vec::new();
        for x in 0..self.0.len() {
            let r = self.find(x);
            let next = names.len();
            out.push(*names.entry(r).or_insert(next));
        }
        (out, names.len())
    }
}

/// `A + B` with the listed node pairs identified, and the two node maps.
pub fn oracle_glue(
    sig: &Signature,
    a: &Hypergraph,
    b: &Hypergraph,
    pairs: &[(usize, usize)],
) -> (Hypergraph, Vec<usize>, Vec<usize>) {
    let na = a.node_count();
    let mut uf = Uf::new(na + b.node_count());
    for &(x, y) in pairs {
        uf.union(x, na + y);
    }
    let (class, count) = uf.classes();
    let mut node_colour = vec![None; count];
    for (x, &k) in class.iter().enumerate() {
        let c = if x < na { a.colour(x) } else { b.colour(x - na) };
        assert!(node_colour[k].is_none_or(|d| d == c), "colour clash while gluing");
        node_colour[k] = Some(c);
    }
    let mut g = Hypergraph::new();
    for c in node_colour {
        g.add_node(c.unwrap());
    }
    let (ma, mb) = (class[..na].to_vec(), class[na..].to_vec());
    for (map, src) in [(&ma, a), (&mb, b)] {
        for e in src.edges() {
            let s = e.sources.iter().map(|&n| map[n]).collect();
            let t = e.targets.iter().map(|&n| map[n]).collect();
            g.add_edge(sig, e.label, s, t).unwrap();
        }
    }
    (g, ma, mb)
}

pub fn oracle_compose(sig: &Signature, f: &Cospan, g: &Cospan) -> Cospan {
    assert_eq!(f.right().len(), g.left().len());
    let pairs: Vec<(usize, usize)> = f.right().iter().copied().zip(g.left().iter().copied()).collect();
    let (h, mf, mg) = oracle_glue(sig, f.carrier(), g.carrier(), &pairs);
    let left = f.left().iter().map(|&n| mf[n]).collect();
    let right = g.right().iter().map(|&n| mg[n]).collect();
    Cospan::new(h, left, right).unwrap()
}

pub fn oracle_tensor(sig: &Signature, f: &Cospan, g: &Cospan) -> Cospan {
    let (h, mf, mg) = oracle_glue(sig, f.carrier(), g.carrier(), &[]);
    let map = |m: &[usize], xs: &[usize]| xs.iter().map(|&n| m[n]).collect::<Vec<_>>();
    let mut left = map(&mf, f.left());
    left.extend(map(&mg, g.left()));
    let mut right = map(&mf, f.right());
    right.extend(map(&mg, g.right()));
    Cospan::new(h, left, right).unwrap()
}

/// Every pair of maps on nodes and edges that preserves colours, labels and
/// tentacles, found by trying all node maps first.
pub fn brute_homomorphisms(l: &Hypergraph, g: &Hypergraph) -> Vec<Homomorphism> {
    let mut out = Vec::new();
    let mut nodes = vec![0; l.node_count()];
    all_node_maps(l, g, 0, &mut nodes, &mut out);
    out.sort();
    out
}

fn all_node_maps(l: &Hypergraph, g: &Hypergraph, i: usize, nodes: &mut Vec<usize>, out: &mut Vec<Homomorphism>) {
    if i == l.node_count() {
        let mut edges = vec![0; l.edge_count()];
        all_edge_maps(l, g, nodes, 0, &mut edges, out);
        return;
    }
    for y in 0..g.node_count() {
        if g.colour(y) == l.colour(i) {
            nodes[i] = y;
            all_node_maps(l, g, i + 1, nodes, out);
        }
    }
}

fn all_edge_maps(
    l: &Hypergraph,
    g: &Hypergraph,
    nodes: &[usize],
    i: usize,
    edges: &mut Vec<usize>,
    out: &mut Vec<Homomorphism>,
) {
    if i == l.edge_count() {
        out.push(Homomorphism::new(nodes.to_vec(), edges.clone()));
        return;
    }
    let e = l.edge(i);
    for (j, f) in g.edges().iter().enumerate() {
        let fits = f.label == e.label
            && f.sources.len() == e.sources.len()
            && f.targets.len() == e.targets.len()
            && e.tentacles().zip(f.tentacles()).all(|(x, y)| nodes[x] == y);
        if fits {
            edges[i] = j;
            all_edge_maps(l, g, nodes, i + 1, edges, out);
        }
    }
}

/// Isomorphism test by backtracking over node bijections. Listed nodes must
/// correspond positionwise, and optional tags on nodes and edges must agree.
pub fn brute_iso(
    g: &Hypergraph,
    g_lists: &[&[usize]],
    g_tags: Option<(&[usize], &[usize])>,
    h: &Hypergraph,
    h_lists: &[&[usize]],
    h_tags: Option<(&[usize], &[usize])>,
) -> bool {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return false;
    }
    let n = g.node_count();
    let node_tag = |t: Option<(&[usize], &[usize])>, x: usize| t.map_or(0, |(ns, _)| ns[x]);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (gl, hl) in g_lists.iter().zip(h_lists) {
        if gl.len() != hl.len() {
            return false;
        }
        for (&x, &y) in gl.iter().zip(hl.iter()) {
            if map[x] == usize::MAX && !used[y] {
                map[x] = y;
                used[y] = true;
            } else if map[x] != y {
                return false;
            }
        }
    }
    for x in 0..n {
        if map[x] != usize::MAX && (g.colour(x) != h.colour(map[x]) || node_tag(g_tags, x) != node_tag(h_tags, map[x])) {
            return false;
        }
    }
    let mut target: Vec<(OpId, Vec<usize>, Vec<usize>, usize)> = h
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.label, e.sources.clone(), e.targets.clone(), h_tags.map_or(0, |(_, es)| es[i])))
        .collect();
    target.sort();
    let check = |map: &[usize]| {
        let mut image: Vec<_> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let s = e.sources.iter().map(|&x| map[x]).collect();
                let t = e.targets.iter().map(|&x| map[x]).collect();
                (e.label, s, t, g_tags.map_or(0, |(_, es)| es[i]))
            })
            .collect();
        image.sort();
        image == target
    };
    // A partial map is abandoned as soon as a fully mapped edge has no
    // counterpart at all; the final multiset comparison decides the rest.
    let partial = |map: &[usize]| {
        g.edges().iter().enumerate().all(|(i, e)| {
            if e.tentacles().any(|x| map[x] == usize::MAX) {
                return true;
            }
            let s: Vec<usize> = e.sources.iter().map(|&x| map[x]).collect();
            let t: Vec<usize> = e.targets.iter().map(|&x| map[x]).collect();
            let tag = g_tags.map_or(0, |(_, es)| es[i]);
            target.iter().any(|(l, ts, tt, tg)| *l == e.label && *ts == s && *tt == t && *tg == tag)
        })
    };
    if !partial(&map) {
        return false;
    }
    fn go(
        x: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        ok: &dyn Fn(usize, usize) -> bool,
        partial: &dyn Fn(&[usize]) -> bool,
        check: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        if x == map.len() {
            return check(map);
        }
        if map[x] != usize::MAX {
            return go(x + 1, map, used, ok, partial, check);
        }
        for y in 0..used.len() {
            if !used[y] && ok(x, y) {
                map[x] = y;
                used[y] = true;
                if partial(map) && go(x + 1, map, used, ok, partial, check) {
                    return true;
                }
                used[y] = false;
            }
        }
        map[x] = usize::MAX;
        false
    }
    let ok = |x: usize, y: usize| g.colour(x) == h.colour(y) && node_tag(g_tags, x) == node_tag(h_tags, y);
    go(0, &mut map, &mut used, &ok, &partial, &check)
}

pub fn brute_iso_with_interface(a: &GraphWithInterface, b: &GraphWithInterface) -> bool {
    brute_iso(&a.graph, &[&a.interface], None, &b.graph, &[&b.interface], None)
}

pub fn brute_cospan_equal(f: &Cospan, g: &Cospan) -> bool {
    f.dom() == g.dom()
        && f.cod() == g.cod()
        && brute_iso(f.carrier(), &[f.left(), f.right()], None, g.carrier(), &[g.left(), g.right()], None)
}

/// A pushout complement `K -> C -> G` together with `I -> C`.
#[derive(Debug, Clone)]
pub struct OracleComplement {
    pub context: Hypergraph,
    pub k_context: Vec<usize>,
    /// `C -> G` on nodes and edges.
    pub to_graph: Homomorphism,
    pub interface_context: Vec<usize>,
}

impl OracleComplement {
    pub fn same_as(&self, other: &OracleComplement) -> bool {
        brute_iso(
            &self.context,
            &[&self.k_context, &self.interface_context],
            Some((&self.to_graph.nodes, &self.to_graph.edges)),
            &other.context,
            &[&other.k_context, &other.interface_context],
            Some((&other.to_graph.nodes, &other.to_graph.edges)),
        )
    }
}

fn product_of(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// All pushout complements of `K -> L -m-> G` with the interface of `G`
/// factored through them, up to isomorphism over `G`, `K` and `I`.
///
/// Every node of `G` gets between zero and one more than the number of
/// `K`-nodes above it copies in `C`, every unmatched edge one copy, and every
/// tentacle, `K`-node and interface position any copy of its node. A
/// candidate is kept when `L +_K C -> G` is a bijection.
pub fn brute_complements(
    sig: &Signature,
    rule: &DpoRule,
    g: &GraphWithInterface,
    m: &Homomorphism,
) -> Vec<OracleComplement> {
    let gr = &g.graph;
    let k_image: Vec<usize> = rule.k_lhs.iter().map(|&y| m.nodes[y]).collect();
    let mut edge_hits = vec![0; gr.edge_count()];
    for &e in &m.edges {
        edge_hits[e] += 1;
    }
    if edge_hits.iter().any(|&h| h > 1) {
        return Vec::new();
    }
    let kept_edges: Vec<usize> = (0..gr.edge_count()).filter(|&e| edge_hits[e] == 0).collect();
    let fibre_ranges: Vec<Vec<usize>> = (0..gr.node_count())
        .map(|n| (0..=k_image.iter().filter(|&&x| x == n).count() + 1).collect())
        .collect();
    let mut found: Vec<OracleComplement> = Vec::new();
    for sizes in product_of(&fibre_ranges) {
        let mut context = Hypergraph::new();
        let mut fibre: Vec<Vec<usize>> = vec![Vec::new(); gr.node_count()];
        let mut over = Vec::new();
        for (n, &s) in sizes.iter().enumerate() {
            for _ in 0..s {
                fibre[n].push(context.add_node(gr.colour(n)));
                over.push(n);
            }
        }
        let k_choices: Vec<Vec<usize>> = k_image.iter().map(|&n| fibre[n].clone()).collect();
        let i_choices: Vec<Vec<usize>> = g.interface.iter().map(|&n| fibre[n].clone()).collect();
        let t_choices: Vec<Vec<usize>> =
            kept_edges.iter().flat_map(|&e| gr.edge(e).tentacles().map(|n| fibre[n].clone()).collect::<Vec<_>>()).collect();
        if k_choices.iter().chain(&i_choices).chain(&t_choices).any(|c| c.is_empty()) {
            continue;
        }
        for tentacles in product_of(&t_choices) {
            let mut c = context.clone();
            let mut it = tentacles.iter().copied();
            for &e in &kept_edges {
                let edge = gr.edge(e);
                let s: Vec<usize> = it.by_ref().take(edge.sources.len()).collect();
                let t: Vec<usize> = it.by_ref().take(edge.targets.len()).collect();
                c.add_edge(sig, edge.label, s, t).unwrap();
            }
            let to_graph = Homomorphism::new(over.clone(), kept_edges.clone());
            for k_context in product_of(&k_choices) {
                if !is_pushout(rule, gr, m, &c, &k_context, &to_graph) {
                    continue;
                }
                for interface_context in product_of(&i_choices) {
                    let cand = OracleComplement {
                        context: c.clone(),
                        k_context: k_context.clone(),
                        to_graph: to_graph.clone(),
                        interface_context,
                    };
                    if !found.iter().any(|f| f.same_as(&cand)) {
                        found.push(cand);
                    }
                }
            }
        }
    }
    found
}

/// `[m, c] : L + C -> G` identifies exactly what `K` glues, and is onto.
fn is_pushout(
    rule: &DpoRule,
    g: &Hypergraph,
    m: &Homomorphism,
    c: &Hypergraph,
    k_context: &[usize],
    to_graph: &Homomorphism,
) -> bool {
    let nl = rule.lhs.node_count();
    let mut uf = Uf::new(nl + c.node_count());
    for (x, &y) in rule.k_lhs.iter().enumerate() {
        uf.union(y, nl + k_context[x]);
    }
    let (class, count) = uf.classes();
    let mut image = vec![usize::MAX; count];
    let to_g = |x: usize| if x < nl { m.nodes[x] } else { to_graph.nodes[x - nl] };
    for (x, &k) in class.iter().enumerate() {
        if image[k] == usize::MAX {
            image[k] = to_g(x);
        } else if image[k] != to_g(x) {
            return false;
        }
    }
    let mut hit = vec![false; g.node_count()];
    for &y in &image {
        if std::mem::replace(&mut hit[y], true) {
            return false;
        }
    }
    if !hit.into_iter().all(|b| b) {
        return false;
    }
    let mut edge_hit = vec![0; g.edge_count()];
    for &e in m.edges.iter().chain(&to_graph.edges) {
        edge_hit[e] += 1;
    }
    edge_hit.into_iter().all(|h| h == 1)
}

/// `R +_K C` with the interface carried over.
pub fn oracle_apply(sig: &Signature, rule: &DpoRule, c: &OracleComplement) -> GraphWithInterface {
    let pairs: Vec<(usize, usize)> = rule.k_rhs.iter().copied().zip(c.k_context.iter().copied()).collect();
    let (h, _, from_c) = oracle_glue(sig, &rule.rhs, &c.context, &pairs);
    let interface = c.interface_context.iter().map(|&z| from_c[z]).collect();
    GraphWithInterface::new(h, interface).unwrap()
}

fn remember(seen: &mut Vec<GraphWithInterface>, x: GraphWithInterface) -> bool {
    if seen.iter().any(|y| brute_iso_with_interface(y, &x)) {
        return false;
    }
    seen.push(x);
    true
}

/// One-step successors by exhaustive matching and complement search.
pub fn brute_successors(sig: &Signature, rules: &[DpoRule], g: &GraphWithInterface) -> Vec<GraphWithInterface> {
    let mut out = Vec::new();
    for rule in rules {
        for m in brute_homomorphisms(&rule.lhs, &g.graph) {
            for c in brute_complements(sig, rule, g, &m) {
                remember(&mut out, oracle_apply(sig, rule, &c));
            }
        }
    }
    out
}

/// Cheap isomorphism invariant used to bucket states.
type Shape = (usize, usize, Vec<Colour>, Vec<OpId>, Vec<usize>);

fn shape(g: &GraphWithInterface) -> Shape {
    let mut colours = g.graph.nodes().to_vec();
    colours.sort();
    let mut labels: Vec<OpId> = g.graph.edges().iter().map(|e| e.label).collect();
    labels.sort();
    let iface = g.interface.iter().map(|&n| g.graph.colour(n).index()).collect();
    (g.graph.node_count(), g.graph.edge_count(), colours, labels, iface)
}

/// States seen so far, bucketed by [`shape`]; returns the index of the
/// class of `x`, and whether it is new.
#[derive(Default)]
struct Classes {
    buckets: HashMap<Shape, Vec<usize>>,
    states: Vec<GraphWithInterface>,
}

impl Classes {
    fn insert(&mut self, x: GraphWithInterface) -> (usize, bool) {
        let bucket = self.buckets.entry(shape(&x)).or_default();
        if let Some(&i) = bucket.iter().find(|&&i| brute_iso_with_interface(&self.states[i], &x)) {
            return (i, false);
        }
        bucket.push(self.states.len());
        self.states.push(x);
        (self.states.len() - 1, true)
    }
}

/// Exhaustive rewriting with the successor relation memoised across calls.
pub struct JoinOracle<'a> {
    sig: &'a Signature,
    rules: &'a [DpoRule],
    classes: Classes,
    successors: HashMap<usize, Vec<usize>>,
    limit: usize,
}

impl<'a> JoinOracle<'a> {
    pub fn new(sig: &'a Signature, rules: &'a [DpoRule], limit: usize) -> Self {
        JoinOracle { sig, rules, classes: Classes::default(), successors: HashMap::new(), limit }
    }

    fn next(&mut self, i: usize) -> Vec<usize> {
        if let Some(n) = self.successors.get(&i) {
            return n.clone();
        }
        let state = self.classes.states[i].clone();
        let n: Vec<usize> = brute_successors(self.sig, self.rules, &state)
            .into_iter()
            .map(|h| self.classes.insert(h).0)
            .collect();
        self.successors.insert(i, n.clone());
        n
    }

    /// Classes reachable from `start`, or `None` past the state limit.
    pub fn reachable(&mut self, start: &GraphWithInterface) -> Option<Vec<usize>> {
        let (s, _) = self.classes.insert(start.clone());
        let mut seen = vec![s];
        let mut k = 0;
        while k < seen.len() {
            for n in self.next(seen[k]) {
                if !seen.contains(&n) {
                    seen.push(n);
                    if seen.len() > self.limit {
                        return None;
                    }
                }
            }
            k += 1;
        }
        Some(seen)
    }

    pub fn normal_forms(&mut self, start: &GraphWithInterface) -> Option<Vec<GraphWithInterface>> {
        let all = self.reachable(start)?;
        let forms: Vec<usize> = all.into_iter().filter(|&i| self.next(i).is_empty()).collect();
        Some(forms.into_iter().map(|i| self.classes.states[i].clone()).collect())
    }

    /// Whether the two graphs rewrite to a common one, by rewriting both to
    /// a fixpoint. `None` when either side exceeds the limit.
    pub fn joinable(&mut self, a: &GraphWithInterface, b: &GraphWithInterface) -> Option<bool> {
        let ra = self.reachable(a)?;
        let rb = self.reachable(b)?;
        Some(ra.iter().any(|x| rb.contains(x)))
    }
}

/// One-off form of [`JoinOracle::joinable`].
pub fn brute_joinable(
    sig: &Signature,
    rules: &[DpoRule],
    a: &GraphWithInterface,
    b: &GraphWithInterface,
    limit: usize,
) -> Option<bool> {
    JoinOracle::new(sig, rules, limit).joinable(a, b)
}

/// Whether every edge joins nodes of different colours.
pub fn is_bipartite(g: &Hypergraph) -> bool {
    g.edges().iter().all(|e| {
        let cs: Vec<Colour> = e.tentacles().map(|n| g.colour(n)).collect();
        cs.len() != 2 || cs[0] != cs[1]
    })
}

pub fn is_frobenius_shaped(d: &Diagram) -> bool {
    match d.kind() {
        DiagramKind::Gen(_) => false,
        DiagramKind::Seq(a, b) | DiagramKind::Par(a, b) => is_frobenius_shaped(a) && is_frobenius_shaped(b),
        _ => true,
    }
}

/// A host graph with `l` glued into some random context.
pub fn host_for(rng: &mut StdRng, sig: &Signature, l: &Hypergraph, max_nodes: usize) -> Hypergraph {
    let extra = random_graph(rng, sig, 3, 2);
    let mut pairs = Vec::new();
    for x in 0..l.node_count() {
        let same: Vec<usize> = (0..extra.node_count()).filter(|&y| extra.colour(y) == l.colour(x)).collect();
        if !same.is_empty() && rng.gen_bool(0.4) {
            pairs.push((x, same[rng.gen_range(0..same.len())]));
        }
    }
    let (g, _, _) = oracle_glue(sig, l, &extra, &pairs);
    if g.node_count() > max_nodes {
        return random_graph(rng, sig, max_nodes, 3);
    }
    g
}

pub fn random_dpo_rule(rng: &mut StdRng, sig: &Signature) -> DpoRule {
    loop {
        let lhs = random_graph(rng, sig, 3, 2);
        if lhs.node_count() == 0 {
            continue;
        }
        let k_lhs: Vec<usize> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..lhs.node_count())).collect();
        let word = lhs.word_of(&k_lhs);
        let mut rhs = Hypergraph::discrete(&word);
        let k_rhs: Vec<usize> = (0..word.len()).collect();
        if rng.gen_bool(0.5) {
            add_random_edges(rng, sig, &mut rhs, 1, word.len() + 1);
        }
        return DpoRule::new("r", lhs, k_lhs, rhs, k_rhs).expect("interface words agree");
    }
}
