//! Cospans `w -> G <- v` of hypergraphs with ordered discrete interfaces.
//!
//! Legs are node listings, so they may repeat nodes (the left leg of the
//! multiplication lists its single node twice).

use thiserror::Error;

use crate::hypergraph::text::{parse_with_legs, print_with_legs};
use crate::hypergraph::{coproduct, glue, isomorphism_with, Homomorphism, Hypergraph, TextError};
use crate::signature::{Signature, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CospanError {
    #[error("interface mismatch: {left:?} vs {right:?}")]
    WordMismatch { left: Word, right: Word },
    #[error("leg refers to node {0}, which is not in the carrier")]
    NodeOutOfRange(usize),
    #[error("{perm:?} is not a permutation of {len} positions")]
    InvalidPermutation { len: usize, perm: Vec<usize> },
    #[error("cospan text needs both `left:` and `right:` lines")]
    MissingLeg,
    #[error(transparent)]
    Text(#[from] TextError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cospan {
    carrier: Hypergraph,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Cospan {
    pub fn new(carrier: Hypergraph, left: Vec<usize>, right: Vec<usize>) -> Result<Self, CospanError> {
        let n = carrier.node_count();
        if let Some(&bad) = left.iter().chain(&right).find(|&&x| x >= n) {
            return Err(CospanError::NodeOutOfRange(bad));
        }
        Ok(Cospan { carrier, left, right })
    }

    pub(crate) fn from_parts(carrier: Hypergraph, left: Vec<usize>, right: Vec<usize>) -> Self {
        debug_assert!(left.iter().chain(&right).all(|&x| x < carrier.node_count()));
        Cospan { carrier, left, right }
    }

    /// `ε -> ∅ <- ε`.
    pub fn empty() -> Self {
        Cospan { carrier: Hypergraph::new(), left: Vec::new(), right: Vec::new() }
    }

    pub fn carrier(&self) -> &Hypergraph {
        &self.carrier
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn dom(&self) -> Word {
        self.carrier.word_of(&self.left)
    }

    pub fn cod(&self) -> Word {
        self.carrier.word_of(&self.right)
    }

    pub fn into_parts(self) -> (Hypergraph, Vec<usize>, Vec<usize>) {
        (self.carrier, self.left, self.right)
    }
}

/// Discrete carrier with one node per letter, both legs the identity listing.
pub fn identity_cospan(w: &Word) -> Cospan {
    let all: Vec<usize> = (0..w.len()).collect();
    Cospan::from_parts(Hypergraph::discrete(w), all.clone(), all)
}

/// The permutation whose output position `j` carries input wire `perm[j]`.
pub fn permutation_cospan(w: &Word, perm: &[usize]) -> Result<Cospan, CospanError> {
    let n = w.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(CospanError::InvalidPermutation { len: n, perm: perm.to_vec() });
    }
    Ok(Cospan::from_parts(Hypergraph::discrete(w), (0..n).collect(), perm.to_vec()))
}

/// `f ; g`, gluing the carriers along the shared interface.
pub fn compose(f: &Cospan, g: &Cospan) -> Result<Cospan, CospanError> {
    let (cod, dom) = (f.cod(), g.dom());
    if cod != dom {
        return Err(CospanError::WordMismatch { left: cod, right: dom });
    }
    let (carrier, pf, pg) = glue(&f.carrier, &f.right, &g.carrier, &g.left);
    let left = f.left.iter().map(|&n| pf.nodes[n]).collect();
    let right = g.right.iter().map(|&n| pg.nodes[n]).collect();
    Ok(Cospan::from_parts(carrier, left, right))
}

/// `f ⊕ g`: disjoint carriers, interfaces concatenated with `f` first.
pub fn tensor(f: &Cospan, g: &Cospan) -> Cospan {
    let (carrier, inf, ing) = coproduct(&f.carrier, &g.carrier);
    let map = |h: &Homomorphism, xs: &[usize]| xs.iter().map(|&n| h.nodes[n]).collect::<Vec<_>>();
    let mut left = map(&inf, &f.left);
    left.extend(map(&ing, &g.left));
    let mut right = map(&inf, &f.right);
    right.extend(map(&ing, &g.right));
    Cospan::from_parts(carrier, left, right)
}

/// `w1 -> G <- w2` becomes `ε -> G <- w1·w2`.
pub fn fold_cospan(f: &Cospan) -> Cospan {
    let mut right = f.left.clone();
    right.extend_from_slice(&f.right);
    Cospan::from_parts(f.carrier.clone(), Vec::new(), right)
}

/// Carrier isomorphism commuting with both legs, if any.
pub fn cospan_equal(f: &Cospan, g: &Cospan) -> Result<Option<Homomorphism>, CospanError> {
    if f.dom() != g.dom() {
        return Err(CospanError::WordMismatch { left: f.dom(), right: g.dom() });
    }
    if f.cod() != g.cod() {
        return Err(CospanError::WordMismatch { left: f.cod(), right: g.cod() });
    }
    Ok(isomorphism_with(&f.carrier, &[&f.left, &f.right], &g.carrier, &[&g.left, &g.right]))
}

/// Hypergraph text format followed by `left:` and `right:` lines.
pub fn print_cospan(sig: &Signature, f: &Cospan) -> String {
    print_with_legs(sig, &f.carrier, Some((&f.left, &f.right)))
}

pub fn parse_cospan(sig: &Signature, text: &str) -> Result<Cospan, CospanError> {
    let parsed = parse_with_legs(sig, text)?;
    match (parsed.left, parsed.right) {
        (Some(left), Some(right)) => Cospan::new(parsed.graph, left, right),
        _ => Err(CospanError::MissingLeg),
    }
}
