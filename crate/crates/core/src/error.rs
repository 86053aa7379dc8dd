//! Error type shared by all pipeline stages.

use std::path::PathBuf;

/// Errors produced while loading inputs or running extraction stages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// I/O failure, annotated with the path that caused it. The cause is
    /// part of the message rather than a `source()` link so that callers
    /// printing full error chains do not repeat it.
    #[error("io error on {path}: {cause}")]
    Io {
        path: PathBuf,
        cause: std::io::Error,
    },

    /// A line of an input file failed to parse or violated a record
    /// invariant. `line` is 1-based.
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    /// An embedding lookup failed.
    #[error("missing embedding key {key:?}")]
    MissingEmbedding { key: String },

    /// A region covered no pixel centers of the depth raster.
    #[error("empty region sample: region covers no pixel centers")]
    EmptyRegionSample,

    /// A polygon with zero area was used where a centroid is required.
    #[error("zero-area polygon")]
    ZeroAreaPolygon,

    /// A region extends past the raster it is being sampled against.
    #[error("region out of raster bounds")]
    RegionOutOfBounds,

    /// An object's mean depth was zero, so perceived size is undefined.
    #[error("object at zero depth")]
    ZeroDepth,

    /// Spatial extraction requires a scene type.
    #[error("scene {image_id}: scene_type required for spatial extraction")]
    MissingSceneType { image_id: String },

    /// A caller-supplied parameter or record set violated a precondition.
    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    /// Convenience constructor for [`Error::Malformed`].
    pub fn malformed(line: usize, message: impl Into<String>) -> Self {
        Error::Malformed {
            line,
            message: message.into(),
        }
    }

    /// Convenience constructor for [`Error::InvalidInput`].
    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    /// Convenience constructor for [`Error::Io`].
    pub fn io(path: impl Into<PathBuf>, cause: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            cause,
        }
    }
}
