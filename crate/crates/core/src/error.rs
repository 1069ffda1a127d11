//! Library-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("the zero polynomial has no monomial cofactor")]
    ZeroPolynomial,

    #[error("zero eigenvalue: multiplicative genericity is undefined for singular classes")]
    ZeroEigenvalue,

    #[error("repeated eigenvalues at point index {point}: the pivot block is singular")]
    RepeatedEigenvalues { point: usize },

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("column {mu} needs {needed} interpolation conditions but the coefficient space has dimension {available}")]
    TargetsExceedDegree {
        mu: usize,
        needed: usize,
        available: usize,
    },

    #[error("interpolation targets for column {mu} are inconsistent")]
    InconsistentTargets { mu: usize },

    #[error("residue compatibility failed: weighted eigenvalue residues sum to {defect}, not zero")]
    ResidueCompatibility { defect: String },

    #[error("degenerate chart {chart} at center {center}: {reason}; re-run with a different seed to move the free values")]
    DegenerateChart {
        center: String,
        chart: usize,
        reason: String,
    },

    #[error("operator is not nilpotent")]
    NotNilpotent,

    #[error("equivalent routes disagree (internal error): {0}")]
    InternalDisagreement(String),

    #[error("witness construction failed after {attempts} attempt(s): {reason}")]
    WitnessConstruction { attempts: usize, reason: String },
}
