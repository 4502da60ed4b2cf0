use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant to an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A stated hypothesis of a lemma or theorem does not hold for the inputs.
    #[error("precondition `{name}` violated: {detail}")]
    Precondition { name: &'static str, detail: String },

    #[error("construction impossible: {0}")]
    ConstructionImpossible(String),

    #[error("support overflow: {detail}; minimum grid size is {required_grid}")]
    SupportOverflow { detail: String, required_grid: usize },

    #[error("integration failure at t = {t}: {detail}")]
    Integration { t: f64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
