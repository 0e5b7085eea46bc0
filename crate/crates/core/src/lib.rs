//! Jordan-block column statistics of random strictly upper-triangular
//! matrices over finite fields: exact finite-n laws, Monte Carlo samplers,
//! the limiting law and the integral formulas relating them.

pub mod chain;
pub mod error;
pub mod gfq;
pub mod harness;
pub mod limit;
pub mod partition;
pub mod pmf;
pub mod prelimit;
pub mod qseries;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod symfunc;

pub use error::{Error, Result};
pub use partition::{Partition, Signature};
pub use pmf::{dinf, Pmf};
pub use scalar::ExactScalar;
