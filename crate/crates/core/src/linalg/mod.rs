//! Exact integer linear algebra: the carrier matrix, Smith and Hermite
//! forms, lattice kernels and indices, and elimination over `Z/p^k`.

mod lattice;
mod local;
mod matrix;
mod smith;
mod unimodular;

pub use lattice::{
    coordinates, hermite_form, is_p_power, kernel_basis, p_valuation, saturate,
    sublattice_index, sublattice_index_valuation,
};
pub use local::{local_divisor_valuations, local_image_order, local_kernel_order};
pub use matrix::IntMatrix;
pub use smith::{elementary_divisors, snf, SmithDecomposition};
pub use unimodular::{default_op_count, unimodular_random, unimodular_random_with_inverse};

/// Exact rationals, reduced with positive denominator.
pub type Rational = num_rational::BigRational;
