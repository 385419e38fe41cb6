use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bounding box: width {w} and height {h} must both be positive and finite")]
    InvalidBox { w: f64, h: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("frame {got} out of sequence, expected frame {expected}")]
    FrameOutOfOrder { expected: u64, got: u64 },

    #[error("ground truth contains no boxes")]
    EmptyGroundTruth,

    #[error("occlusion rate {0} cannot be reached (must be in [0, 0.95] and below the duration-limited maximum)")]
    OcclusionUnreachable(f64),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("motion sidecar line {line}: duplicate entry for frame {frame}, detection {index}")]
    DuplicateMotion { line: usize, frame: u64, index: usize },

    #[error("motion sidecar references frame {frame}, detection {index}, which does not exist")]
    MissingDetection { frame: u64, index: usize },

    #[error("malformed heatmap data: {0}")]
    Heatmap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
