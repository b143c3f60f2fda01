use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("sample out of range at index {index}: {value}")]
    Range { index: usize, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular matrix (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("ill-conditioned fit for {what}")]
    IllConditioned { what: String },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error(transparent)]
    Raw16(#[from] Raw16Error),

    #[error(transparent)]
    Metadata(#[from] MetadataError),

    #[error("rgb codec: {0}")]
    Rgb(String),

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Parse failures of the raw16 container.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Raw16Error {
    #[error("bad magic {0:02x?}, expected \"RAW2\"")]
    BadMagic([u8; 4]),
    #[error("truncated: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("channel count {0}, expected 4")]
    Channels(u32),
    #[error("code {code} at sample {index} exceeds 4095")]
    CodeRange { index: usize, code: u16 },
    #[error("zero-sized image {height}x{width}")]
    Empty { height: u32, width: u32 },
    #[error("{0} unexpected bytes after the payload")]
    TrailingBytes(usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum MetadataError {
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("key `{key}` expects {expected} numbers, got {actual}")]
    Arity {
        key: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("key `{key}` has a non-numeric or invalid value")]
    BadValue { key: &'static str },
    #[error("white balance gains must be strictly positive")]
    NonPositiveGain,
    #[error("singular color correction matrix (|det| = {0:e})")]
    SingularCcm(f64),
    #[error("black level {black} must be below white level {white} <= 4095")]
    Levels { black: u32, white: u32 },
    #[error("not a structured metadata document: {0}")]
    Syntax(String),
}
