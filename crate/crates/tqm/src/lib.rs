//! Exact knot-theoretic quantum mechanics.
//!
//! Kauffman bracket and Jones invariants by skein resolution and by a braid
//! matrix representation, the Temperley-Lieb state calculus of a
//! one-dimensional TQFT, and the entanglement and protocol machinery built on
//! top of it.

pub mod bracket;
pub mod diagram;
pub mod entangle;
pub mod hilbert;
pub mod poly;
pub mod protocols;
pub mod rmatrix;

pub use poly::{LaurentPoly, NumericParams, QForm, RationalFunc};
