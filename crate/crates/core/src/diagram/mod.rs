//! Terms of the free hypergraph category on a signature: Σ-generators,
//! identities, symmetries and the separable Frobenius generators on each
//! colour, combined by sequential (`;`) and parallel (`+`) composition.
//!
//! Terms are syntax only. Two terms denote the same arrow exactly when their
//! translations into cospans of hypergraphs are isomorphic; see
//! [`crate::functor`].

mod syntax;

use std::sync::Arc;

use thiserror::Error;

use crate::signature::{Colour, OpId, Signature, Word};

pub use syntax::{parse_diagram, parse_rules, print_diagram, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("cannot compose: codomain {left:?} does not match domain {right:?}")]
    Mismatch { left: Word, right: Word },
    #[error("rule sides have different types: {lhs:?} vs {rhs:?}")]
    RuleMismatch { lhs: (Word, Word), rhs: (Word, Word) },
    #[error("not a permutation of {len} positions: {perm:?}")]
    InvalidPermutation { len: usize, perm: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DiagramKind {
    /// The identity on the empty word.
    Empty,
    Gen(OpId),
    Id(Colour),
    Sym(Colour, Colour),
    Mult(Colour),
    Unit(Colour),
    Comult(Colour),
    Counit(Colour),
    Seq(Diagram, Diagram),
    Par(Diagram, Diagram),
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Node {
    kind: DiagramKind,
    dom: Word,
    cod: Word,
}

/// A well-typed term with cached domain and codomain.
///
/// Cloning is cheap (shared tree); values are immutable and `Send + Sync`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram(Arc<Node>);

impl Diagram {
    fn leaf(kind: DiagramKind, dom: Word, cod: Word) -> Self {
        Diagram(Arc::new(Node { kind, dom, cod }))
    }

    pub fn empty() -> Self {
        Self::leaf(DiagramKind::Empty, Word::empty(), Word::empty())
    }

    pub fn gen(sig: &Signature, op: OpId) -> Self {
        Self::leaf(DiagramKind::Gen(op), sig.arity(op).clone(), sig.coarity(op).clone())
    }

    pub fn id(c: Colour) -> Self {
        Self::leaf(DiagramKind::Id(c), Word::singleton(c), Word::singleton(c))
    }

    pub fn sym(c: Colour, d: Colour) -> Self {
        Self::leaf(DiagramKind::Sym(c, d), Word::new(vec![c, d]), Word::new(vec![d, c]))
    }

    pub fn mult(c: Colour) -> Self {
        Self::leaf(DiagramKind::Mult(c), Word::new(vec![c, c]), Word::singleton(c))
    }

    pub fn unit(c: Colour) -> Self {
        Self::leaf(DiagramKind::Unit(c), Word::empty(), Word::singleton(c))
    }

    pub fn comult(c: Colour) -> Self {
        Self::leaf(DiagramKind::Comult(c), Word::singleton(c), Word::new(vec![c, c]))
    }

    pub fn counit(c: Colour) -> Self {
        Self::leaf(DiagramKind::Counit(c), Word::singleton(c), Word::empty())
    }

    /// Sequential composition `a ; b`.
    pub fn seq(a: &Diagram, b: &Diagram) -> Result<Diagram, TypeError> {
        if a.cod() != b.dom() {
            return Err(TypeError::Mismatch { left: a.cod().clone(), right: b.dom().clone() });
        }
        Ok(Diagram(Arc::new(Node {
            dom: a.dom().clone(),
            cod: b.cod().clone(),
            kind: DiagramKind::Seq(a.clone(), b.clone()),
        })))
    }

    /// Parallel composition `a + b`, with `a` on top (first in the words).
    pub fn par(a: &Diagram, b: &Diagram) -> Diagram {
        Diagram(Arc::new(Node {
            dom: a.dom().concat(b.dom()),
            cod: a.cod().concat(b.cod()),
            kind: DiagramKind::Par(a.clone(), b.clone()),
        }))
    }

    pub fn kind(&self) -> &DiagramKind {
        &self.0.kind
    }

    pub fn dom(&self) -> &Word {
        &self.0.dom
    }

    pub fn cod(&self) -> &Word {
        &self.0.cod
    }

    pub fn type_of(&self) -> (Word, Word) {
        (self.dom().clone(), self.cod().clone())
    }

    /// Number of constructor nodes in the term tree.
    pub fn size(&self) -> usize {
        match self.kind() {
            DiagramKind::Seq(a, b) | DiagramKind::Par(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// `true` for terms built from `Id`, `Empty` and `+` only.
    pub fn is_identity_shaped(&self) -> bool {
        match self.kind() {
            DiagramKind::Empty | DiagramKind::Id(_) => true,
            DiagramKind::Par(a, b) => a.is_identity_shaped() && b.is_identity_shaped(),
            _ => false,
        }
    }

    /// Whether any Frobenius generator occurs in the term.
    pub fn uses_frobenius(&self) -> bool {
        match self.kind() {
            DiagramKind::Mult(_)
            | DiagramKind::Unit(_)
            | DiagramKind::Comult(_)
            | DiagramKind::Counit(_) => true,
            DiagramKind::Seq(a, b) | DiagramKind::Par(a, b) => {
                a.uses_frobenius() || b.uses_frobenius()
            }
            _ => false,
        }
    }
}

/// Left-nested sequential composite; `Empty`-typed identity when the list is
/// empty is not representable, so callers pass at least one diagram.
pub(crate) fn seq_all(parts: Vec<Diagram>) -> Result<Diagram, TypeError> {
    let mut iter = parts.into_iter();
    let first = iter.next().expect("seq_all needs at least one diagram");
    iter.try_fold(first, |acc, d| Diagram::seq(&acc, &d))
}

/// Sequential composite that drops identity-shaped factors.
pub(crate) fn seq_compact(parts: Vec<Diagram>) -> Result<Diagram, TypeError> {
    let dom = parts.first().map(|d| d.dom().clone()).unwrap_or_default();
    let kept: Vec<Diagram> = parts.into_iter().filter(|d| !d.is_identity_shaped()).collect();
    if kept.is_empty() {
        return Ok(id_word(&dom));
    }
    seq_all(kept)
}

/// Left-nested parallel composite skipping `Empty` factors.
pub(crate) fn par_all(parts: Vec<Diagram>) -> Diagram {
    parts
        .into_iter()
        .filter(|d| !matches!(d.kind(), DiagramKind::Empty))
        .reduce(|acc, d| Diagram::par(&acc, &d))
        .unwrap_or_else(Diagram::empty)
}

/// `id_w`: the parallel composite of `Id(c)` over the colours of `w`.
pub fn id_word(w: &Word) -> Diagram {
    par_all(w.iter().map(Diagram::id).collect())
}

/// The permutation `w -> w'` whose output position `j` carries input wire
/// `perm[j]`, built from adjacent `Sym` leaves (bubble-sort layers).
pub fn permutation(w: &Word, perm: &[usize]) -> Result<Diagram, TypeError> {
    let n = w.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(TypeError::InvalidPermutation { len: n, perm: perm.to_vec() });
    }
    // `current[pos]` is the input wire sitting at position `pos`.
    let mut current: Vec<usize> = (0..n).collect();
    let mut layers = Vec::new();
    for i in 0..n {
        let k = current.iter().position(|&x| x == perm[i]).expect("wire present");
        for pos in (i..k).rev() {
            let colours: Vec<Colour> = current.iter().map(|&x| w[x]).collect();
            let before = Word::new(colours[..pos].to_vec());
            let after = Word::new(colours[pos + 2..].to_vec());
            layers.push(par_all(vec![
                id_word(&before),
                Diagram::sym(colours[pos], colours[pos + 1]),
                id_word(&after),
            ]));
            current.swap(pos, pos + 1);
        }
    }
    if layers.is_empty() {
        return Ok(id_word(w));
    }
    seq_all(layers)
}

/// `σ_{w,u} : wu -> uw`.
pub fn sym_word(w: &Word, u: &Word) -> Diagram {
    let n = w.len();
    let m = u.len();
    let perm: Vec<usize> = (n..n + m).chain(0..n).collect();
    permutation(&w.concat(u), &perm).expect("block swap is a permutation")
}

/// Interleaving `c1 c1 c2 c2 ... -> c1 c2 ... c1 c2 ...` as a right listing.
fn doubled_to_concat(n: usize) -> Vec<usize> {
    (0..n).map(|i| 2 * i).chain((0..n).map(|i| 2 * i + 1)).collect()
}

fn doubled(w: &Word) -> Word {
    w.iter().flat_map(|c| [c, c]).collect()
}

/// Compact-closed unit `ε -> w·w`: per-colour `Unit ; Comult` followed by the
/// permutation that brings the two copies of `w` side by side.
pub fn cup(w: &Word) -> Diagram {
    let cups = par_all(
        w.iter()
            .map(|c| Diagram::seq(&Diagram::unit(c), &Diagram::comult(c)).expect("typed"))
            .collect(),
    );
    if w.len() <= 1 {
        return cups;
    }
    let perm = permutation(&doubled(w), &doubled_to_concat(w.len())).expect("valid permutation");
    Diagram::seq(&cups, &perm).expect("typed")
}

/// Compact-closed counit `w·w -> ε`, dual to [`cup`].
pub fn cap(w: &Word) -> Diagram {
    let caps = par_all(
        w.iter()
            .map(|c| Diagram::seq(&Diagram::mult(c), &Diagram::counit(c)).expect("typed"))
            .collect(),
    );
    if w.len() <= 1 {
        return caps;
    }
    let n = w.len();
    // inverse of doubled_to_concat: output 2i <- i, output 2i+1 <- n+i
    let inverse: Vec<usize> = (0..n).flat_map(|i| [i, n + i]).collect();
    let perm = permutation(&w.concat(w), &inverse).expect("valid permutation");
    Diagram::seq(&perm, &caps).expect("typed")
}

/// Multiplication on a word, `w·w -> w`, from the per-colour monoids.
pub fn mult_word(w: &Word) -> Diagram {
    let n = w.len();
    let mults = par_all(w.iter().map(Diagram::mult).collect());
    if n <= 1 {
        return mults;
    }
    let inverse: Vec<usize> = (0..n).flat_map(|i| [i, n + i]).collect();
    let perm = permutation(&w.concat(w), &inverse).expect("valid permutation");
    Diagram::seq(&perm, &mults).expect("typed")
}

pub fn unit_word(w: &Word) -> Diagram {
    par_all(w.iter().map(Diagram::unit).collect())
}

/// Comultiplication on a word, `w -> w·w`.
pub fn comult_word(w: &Word) -> Diagram {
    let n = w.len();
    let comults = par_all(w.iter().map(Diagram::comult).collect());
    if n <= 1 {
        return comults;
    }
    let perm = permutation(&doubled(w), &doubled_to_concat(n)).expect("valid permutation");
    Diagram::seq(&comults, &perm).expect("typed")
}

pub fn counit_word(w: &Word) -> Diagram {
    par_all(w.iter().map(Diagram::counit).collect())
}

/// Folds `a : w1 -> w2` into `ε -> w1·w2` by bending the input wires to the
/// right with a cup: `cup(w1) ; (id_{w1} + a)`.
pub fn fold_term(a: &Diagram) -> Diagram {
    let w1 = a.dom();
    let body = Diagram::par(&id_word(w1), a);
    Diagram::seq(&cup(w1), &body).expect("fold is well typed")
}

/// A rewrite rule `lhs => rhs` between parallel arrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub lhs: Diagram,
    pub rhs: Diagram,
}

impl Rule {
    pub fn new(name: impl Into<String>, lhs: Diagram, rhs: Diagram) -> Result<Rule, TypeError> {
        if lhs.type_of() != rhs.type_of() {
            return Err(TypeError::RuleMismatch { lhs: lhs.type_of(), rhs: rhs.type_of() });
        }
        Ok(Rule { name: name.into(), lhs, rhs })
    }
}
