//! Rewriting modulo Frobenius structure for multi-sorted string diagrams.

pub mod confluence;
pub mod cospan;
pub mod diagram;
pub mod dot;
pub mod dpoi;
pub mod functor;
pub mod hypergraph;
pub mod signature;
