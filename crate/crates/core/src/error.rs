use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vertex {0} is unreachable")]
    Unreachable(usize),

    #[error("pair ({0}, {1}) is not supported by this oracle")]
    Unsupported(usize, usize),

    #[error("pair ({0}, {1}) is disconnected")]
    Disconnected(usize, usize),

    #[error("root set is empty")]
    EmptyRoots,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("hop path for ({u}, {v}) has weight {weight} > {stretch} * d_G = {dist} (hops {hops})")]
    HopsetViolation {
        u: usize,
        v: usize,
        weight: u64,
        dist: u64,
        hops: usize,
        stretch: String,
    },

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("base graph rejected: {0}")]
    BaseGraph(String),

    #[error("instance would have {n} vertices, cap is {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("girth {girth} must exceed k = {k}")]
    GirthTooSmall { girth: String, k: usize },

    #[error("internal invariant broken: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("oracle blob: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

impl Error {
    /// Short stable tag for reports.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::VertexOutOfRange { .. } => "vertex_out_of_range",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Unreachable(_) => "unreachable",
            Error::Unsupported(..) => "unsupported",
            Error::Disconnected(..) => "disconnected",
            Error::EmptyRoots => "empty_roots",
            Error::Parse { .. } => "parse",
            Error::HopsetViolation { .. } => "hopset_violation",
            Error::Generation(_) => "generation",
            Error::BaseGraph(_) => "base_graph",
            Error::SizeCap { .. } => "size_cap",
            Error::GirthTooSmall { .. } => "girth_too_small",
            Error::Invariant(_) => "invariant",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
