use thiserror::Error;

/// Errors surfaced by the selection library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a structural precondition (shape, symmetry, index range).
    #[error("model error: {0}")]
    Model(String),
    /// A numeric routine left its supported regime (non-convergence, indefinite input).
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Rank-one inverse update denominator at machine zero.
    #[error("singular update: |1 - c u^H inv u| = {denominator:e} is below 1e-12")]
    SingularUpdate { denominator: f64 },
    /// Row/column removal pivot at machine zero.
    #[error("singular pivot: |inv[{index},{index}]| = {pivot:e} is below 1e-12")]
    SingularPivot { index: usize, pivot: f64 },
    /// A combinatorial enumeration exceeds the configured cap.
    #[error("capacity exceeded: {needed} combinations exceed the cap of {cap}")]
    Capacity { needed: u128, cap: u128 },
}

impl Error {
    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
