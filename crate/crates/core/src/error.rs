use thiserror::Error;

/// Errors raised by the density engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("graph is not {d}-sparse: contains K_{{{a},{b}}} with {a}+{b} > {d}")]
    NotSparse { d: usize, a: usize, b: usize },

    #[error("singular constraint set (smallest orthogonalization factor {factor:e})")]
    SingularConstraints { factor: f64 },

    #[error("sampler gave up after {retries} redraws of numerically singular constraints")]
    RetriesExhausted { retries: u32 },

    #[error("graph is not a forest")]
    NotForest,

    #[error("graph is not chordal")]
    NotChordal,

    #[error("graph is not bipartite")]
    NotBipartite,

    #[error("invalid anchor configuration: {0}")]
    InvalidAnchor(String),

    #[error("invalid node ordering: {0}")]
    InvalidOrdering(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("refused: {0}")]
    Refused(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Stable snake-case identifier of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::NotSparse { .. } => "not_sparse",
            Error::SingularConstraints { .. } => "singular_constraints",
            Error::RetriesExhausted { .. } => "retries_exhausted",
            Error::NotForest => "not_forest",
            Error::NotChordal => "not_chordal",
            Error::NotBipartite => "not_bipartite",
            Error::InvalidAnchor(_) => "invalid_anchor",
            Error::InvalidOrdering(_) => "invalid_ordering",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::Parse { .. } => "parse",
            Error::Refused(_) => "refused",
            Error::Io(_) => "io",
        }
    }
}
