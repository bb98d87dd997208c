//! Exact cohomology of `Z_p[G]`-lattices for cyclic `p`-groups `G`.
//!
//! Modules are integer lattices with a generator action; Tate cohomology
//! orders reduce to lattice indices, computed with Smith normal forms over
//! `Z`. On top of that sit the structural invariants of a module (rank
//! sequence, pure filtration, representation multiplicities) and the
//! lambda-invariant tower identities checked on synthetic towers.

pub mod cohomology;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod modules;
pub mod serde_util;
pub mod towers;

pub use error::{Error, Result};
pub use linalg::{IntMatrix, Rational};
pub use modules::{BlockSpec, CyclicPGroup, FiniteBlock, FiniteSpec, GModule};
