use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("face {face} references vertex {index} but the mesh has {vertex_count} vertices")]
    FaceIndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },

    #[error("degenerate mesh: total face area is zero")]
    DegenerateMesh,

    #[error("unequal cardinality: {left} vs {right} points")]
    UnequalCardinality { left: usize, right: usize },

    #[error(
        "EMD approximation did not reach the requested tolerance: \
         best primal {upper}, best dual {lower}"
    )]
    ApproximationFailure { upper: f64, lower: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("insufficient data: {components} components requested for {rows} rows")]
    InsufficientData { components: usize, rows: usize },

    #[error("degenerate fit: covariance of component {component} collapsed")]
    DegenerateFit { component: usize },

    #[error("decoder failure: {0}")]
    DecoderFailure(String),

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("IoU undefined: both grids are empty")]
    UndefinedIou,

    #[error("malformed {format} data: {message}")]
    Format {
        format: &'static str,
        message: String,
    },

    #[error("checkpoint {label}: {source}")]
    Checkpoint {
        label: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    RawIo(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(format: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            format,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the failure came from the filesystem rather than from the
    /// content of the inputs.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } | Error::RawIo(_) => true,
            Error::Checkpoint { source, .. } => source.is_io(),
            _ => false,
        }
    }
}
