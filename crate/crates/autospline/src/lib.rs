//! Hierarchical dyadic meshes and splines presented by synchronous
//! multitape automata.
//!
//! Points of `Z[1/b]^d` are encoded as convolutions of two-row digit strings
//! ([`numeration`]); sets of cells and coefficient relations become regular
//! languages ([`automata`]) built from first-order formulas ([`logic`]). On top
//! of that sit the mesh checks ([`mesh`]), Kraft basis selection ([`kraft`]),
//! exact spline evaluation ([`spline`]) and refinement ([`refine`]). The
//! [`oracle`] module re-derives every geometric fact by direct enumeration.

pub mod automata;
pub mod cli;
pub mod error;
pub mod kraft;
pub mod logic;
pub mod mesh;
pub mod numeration;
pub mod oracle;
pub mod refine;
pub mod spline;

pub use error::{Error, Result};

/// Exact rational numbers.
pub type Q = num_rational::BigRational;
