//! Linear algebra over finite fields: sampling strictly upper-triangular
//! matrices, ranks, Jordan types and exhaustive enumeration.

mod field;
mod jordan;
mod matrix;

pub use field::{prime_power, FiniteField};
pub use jordan::{column_lengths, jordan_type, jordan_type_incremental, power_ranks, JordanBasis, JordanBasisF2};
pub use matrix::{enumerate_strict_upper, sample_strict_upper, MatrixGFq, ENUMERATION_GUARD};
