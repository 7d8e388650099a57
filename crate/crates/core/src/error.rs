use thiserror::Error;

/// Errors raised by the solver pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("bracket error: {0}")]
    Bracket(String),

    #[error("positivity violated at sites ({i}, {j}): min eigenvalue {min_eigenvalue:e}")]
    Positivity { i: usize, j: usize, min_eigenvalue: f64 },

    #[error("system too large for exact diagonalization: N = {n} > {max}")]
    Size { n: usize, max: usize },

    #[error("ground state is (quasi-)degenerate: gap = {gap:e}")]
    Degeneracy { gap: f64 },

    #[error("no coordination number Z <= {max_z} reproduces the target profile")]
    NoMatch { max_z: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    /// The innermost error, with any context layers stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
