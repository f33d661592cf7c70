//! The interpretation of terms as cospans of hypergraphs, and extraction of
//! a term back out of any cospan.

use thiserror::Error;

use crate::cospan::{compose, cospan_equal, identity_cospan, permutation_cospan, tensor, Cospan};
use crate::diagram::{id_word, par_all, permutation, seq_compact, Diagram, DiagramKind};
use crate::hypergraph::{Edge, Hypergraph};
use crate::signature::{Colour, Signature, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctorError {
    #[error("carrier has {0} edges; a discrete cospan was expected")]
    NotDiscrete(usize),
    #[error("terms have different types: {left:?} vs {right:?}")]
    TypeMismatch { left: (Word, Word), right: (Word, Word) },
    #[error("term uses Frobenius generators")]
    NotFrobeniusFree,
}

/// A function `{0..dom} -> {0..cod}` given by its table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteFunction {
    cod: usize,
    table: Vec<usize>,
}

impl FiniteFunction {
    /// `None` if some value is out of range.
    pub fn new(table: Vec<usize>, cod: usize) -> Option<Self> {
        table.iter().all(|&x| x < cod).then_some(FiniteFunction { cod, table })
    }

    pub fn dom(&self) -> usize {
        self.table.len()
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Size of the preimage of each point of the codomain.
    pub fn fibre_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.cod];
        for &x in &self.table {
            sizes[x] += 1;
        }
        sizes
    }

    /// The domain listed fibre by fibre, following `order` on the codomain;
    /// within a fibre, ascending.
    pub fn grouped_by(&self, order: &[usize]) -> Vec<usize> {
        let mut fibres = vec![Vec::new(); self.cod];
        for (i, &x) in self.table.iter().enumerate() {
            fibres[x].push(i);
        }
        order.iter().flat_map(|&y| fibres[y].iter().copied()).collect()
    }
}

fn gen_cospan(dom: &Word, cod: &Word, label: crate::signature::OpId) -> Cospan {
    let mut g = Hypergraph::discrete(&dom.concat(cod));
    let m = dom.len();
    let n = cod.len();
    g.push_edge(Edge { label, sources: (0..m).collect(), targets: (m..m + n).collect() });
    Cospan::from_parts(g, (0..m).collect(), (m..m + n).collect())
}

fn point(c: Colour, left: usize, right: usize) -> Cospan {
    Cospan::from_parts(Hypergraph::discrete(&Word::singleton(c)), vec![0; left], vec![0; right])
}

/// `⟦d⟧` by structural recursion.
pub fn translate(d: &Diagram) -> Cospan {
    match d.kind() {
        DiagramKind::Empty => Cospan::empty(),
        DiagramKind::Gen(op) => gen_cospan(d.dom(), d.cod(), *op),
        DiagramKind::Id(c) => identity_cospan(&Word::singleton(*c)),
        DiagramKind::Sym(c, e) => {
            permutation_cospan(&Word::new(vec![*c, *e]), &[1, 0]).expect("swap is a permutation")
        }
        DiagramKind::Mult(c) => point(*c, 2, 1),
        DiagramKind::Unit(c) => point(*c, 0, 1),
        DiagramKind::Comult(c) => point(*c, 1, 2),
        DiagramKind::Counit(c) => point(*c, 1, 0),
        DiagramKind::Seq(a, b) => compose(&translate(a), &translate(b)).expect("well-typed term"),
        DiagramKind::Par(a, b) => tensor(&translate(a), &translate(b)),
    }
}

/// Right-combed merge tree `c^p -> c`.
fn merge(c: Colour, p: usize) -> Diagram {
    match p {
        0 => Diagram::unit(c),
        1 => Diagram::id(c),
        _ => {
            let upper = Diagram::par(&merge(c, p - 1), &Diagram::id(c));
            seq_compact(vec![upper, Diagram::mult(c)]).expect("typed")
        }
    }
}

/// Copy tree `c -> c^q`, dual to [`merge`].
fn copy(c: Colour, q: usize) -> Diagram {
    match q {
        0 => Diagram::counit(c),
        1 => Diagram::id(c),
        _ => {
            let lower = Diagram::par(&copy(c, q - 1), &Diagram::id(c));
            seq_compact(vec![Diagram::comult(c), lower]).expect("typed")
        }
    }
}

fn node_term(c: Colour, p: usize, q: usize) -> Diagram {
    if p == 0 && q == 0 {
        return Diagram::seq(&Diagram::unit(c), &Diagram::counit(c)).expect("typed");
    }
    seq_compact(vec![merge(c, p), copy(c, q)]).expect("typed")
}

/// Renders a cospan with discrete carrier as a term over the Frobenius
/// generators, identities and symmetries only.
///
/// Interface positions are sorted into fibres (nodes ordered by colour,
/// then index), each node becomes a merge tree followed by a copy tree, and
/// the outputs are permuted back into place.
pub fn discrete_to_frobenius(f: &Cospan) -> Result<Diagram, FunctorError> {
    let g = f.carrier();
    if !g.is_discrete() {
        return Err(FunctorError::NotDiscrete(g.edge_count()));
    }
    let n = g.node_count();
    let left = FiniteFunction::new(f.left().to_vec(), n).expect("legs in range");
    let right = FiniteFunction::new(f.right().to_vec(), n).expect("legs in range");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| (g.colour(x), x));

    let inputs = left.grouped_by(&order);
    let before = permutation(&f.dom(), &inputs).expect("grouping is a permutation");

    let (p, q) = (left.fibre_sizes(), right.fibre_sizes());
    let middle = par_all(order.iter().map(|&x| node_term(g.colour(x), p[x], q[x])).collect());

    let outputs = right.grouped_by(&order);
    let mut back = vec![0; outputs.len()];
    for (wire, &pos) in outputs.iter().enumerate() {
        back[pos] = wire;
    }
    let after = permutation(middle.cod(), &back).expect("inverse grouping is a permutation");

    Ok(seq_compact(vec![before, middle, after]).expect("typed"))
}

/// A term whose translation is isomorphic to `f`: a discrete cospan that
/// wires the interfaces to all nodes and edge inputs, the edges in parallel
/// with an identity on every node, and a discrete cospan collecting edge
/// outputs back onto the nodes.
pub fn extract(sig: &Signature, f: &Cospan) -> Diagram {
    let g = f.carrier();
    let k = g.node_count();
    let nodes = Hypergraph::discrete(&g.word_of(&(0..k).collect::<Vec<_>>()));
    let mut ins: Vec<usize> = (0..k).collect();
    let mut outs: Vec<usize> = (0..k).collect();
    let mut boxes = vec![id_word(&nodes.word_of(&(0..k).collect::<Vec<_>>()))];
    for e in g.edges() {
        ins.extend_from_slice(&e.sources);
        outs.extend_from_slice(&e.targets);
        boxes.push(Diagram::gen(sig, e.label));
    }
    let first = Cospan::from_parts(nodes.clone(), f.left().to_vec(), ins);
    let last = Cospan::from_parts(nodes, outs, f.right().to_vec());
    let first = discrete_to_frobenius(&first).expect("discrete");
    let last = discrete_to_frobenius(&last).expect("discrete");
    seq_compact(vec![first, par_all(boxes), last]).expect("extraction is well typed")
}

/// Whether `a` and `b` denote the same arrow of the free hypergraph
/// category. With `pure_sigma` both terms must avoid the Frobenius
/// generators, and the answer is then also equality modulo the symmetric
/// monoidal laws alone.
pub fn faithfulness_probe(a: &Diagram, b: &Diagram, pure_sigma: bool) -> Result<bool, FunctorError> {
    if a.type_of() != b.type_of() {
        return Err(FunctorError::TypeMismatch { left: a.type_of(), right: b.type_of() });
    }
    if pure_sigma && (a.uses_frobenius() || b.uses_frobenius()) {
        return Err(FunctorError::NotFrobeniusFree);
    }
    let eq = cospan_equal(&translate(a), &translate(b)).expect("types checked");
    Ok(eq.is_some())
}
