//! Entanglement detection for bipartite quantum states.
//!
//! The crate provides, bottom to top:
//!
//! * [`matcore`]: dense complex linear algebra for small Hilbert spaces
//!   (Hermitian eigensolver, SVD, tensor products, partial transpose,
//!   realignment, Hilbert-Schmidt geometry);
//! * [`bloch`]: operator-basis machinery (Weyl bases, Bloch decompositions,
//!   the singular-value-optimized form, the product-expectation quantity S,
//!   and the sufficient singular-value witness test);
//! * [`witness`]: geometric operators, witness certification by see-saw
//!   minimization over pure product states, and shift families for moving
//!   a witness hyperplane along a line of states;
//! * [`criteria`]: PPT and realignment checks plus the combined
//!   classification verdict;
//! * [`simplex3`]: a fully worked two-qutrit three-parameter Bell-state
//!   family with closed-form constraint surfaces, tangent witnesses, and
//!   region geometry.

pub mod bloch;
pub mod criteria;
pub mod error;
pub mod matcore;
pub mod simplex3;
pub mod witness;

pub use error::{GewError, Result};
