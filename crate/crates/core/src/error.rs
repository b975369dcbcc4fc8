use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("unknown vertex label `{0}`")]
    UnknownVertex(String),

    #[error("vertex `{0}` is already present")]
    DuplicateVertex(String),

    #[error("not a subcomplex: {0}")]
    NotSubcomplex(String),

    #[error("{what} budget exceeded: {actual} > {limit}")]
    Budget {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("invalid ordering: {0}")]
    Ordering(String),

    #[error("invalid construction: {0}")]
    Construction(String),

    #[error("complex is disconnected ({0} components)")]
    Disconnected(usize),

    #[error("invalid simplicial poset at face {id}: {reason}")]
    Poset { id: u64, reason: String },

    #[error("invalid field: {0}")]
    Field(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
