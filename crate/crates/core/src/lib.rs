//! Exact-arithmetic solvability criteria and spectral-curve witnesses for the
//! multiplicative Deligne-Simpson problem.

pub mod criteria;
pub mod error;
pub mod lattice;
pub mod linsys;
pub mod matrix;
pub mod parabolic;
pub mod partition;
pub mod poly;
pub mod scalar;

pub use error::{Error, Result};
pub use matrix::Mat;
pub use partition::{partition_multisets, partitions_of, Partition};
pub use poly::{BiPoly, UniPoly};
pub use scalar::Scalar;

/// Library version embedded in generated reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
