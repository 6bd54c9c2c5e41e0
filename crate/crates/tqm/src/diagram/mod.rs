//! Braid words, non-crossing matchings, PD tangles and the Temperley-Lieb
//! diagram algebra.

mod braid;
mod matching;
mod tangle;
mod tl;

use thiserror::Error;

pub use braid::BraidWord;
pub use matching::{catalan, count_cycles, enumerate_matchings, Pairing, PlanarMatching};
pub use tangle::{connectome_of, BraidClosure, Component, Edge, Orientation, TangleDiagram};
pub use tl::{
    braid_to_tl, cap_adjacent, jones_wenzl, letter_image, markov_closure, plat_closure, tl_generator,
    tl_multiply, Closure, Coeff, Side, TLElement,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("strand count mismatch: {0} vs {1}")]
    StrandMismatch(usize, usize),
    #[error("odd strand count {0} cannot be plat-closed")]
    OddStrands(usize),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("matching is not planar: {0}")]
    NotPlanar(String),
    #[error("coefficients are not Laurent polynomials")]
    NonPolynomial,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("inconsistent PD code: {0}")]
    InconsistentPd(String),
    #[error("orientation required: {0}")]
    Unoriented(String),
}
