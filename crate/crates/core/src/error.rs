use thiserror::Error;

pub type Result<T, E = FcgError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FcgError {
    #[error("empty input")]
    EmptyInput,

    #[error("constraint violation: two detections share frame {frame}")]
    DuplicateFrame { frame: u32 },

    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate (zero-norm or non-finite) feature{}", row_suffix(*.source_row))]
    DegenerateFeature { source_row: Option<usize> },

    #[error("invalid bounding box at row {row}: {reason}")]
    InvalidBox { row: usize, reason: String },

    #[error("invalid detection at row {row}: {reason}")]
    InvalidDetection { row: usize, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("row count mismatch: {csv_rows} CSV rows but feature file declares {blob_rows}")]
    RowCountMismatch { csv_rows: usize, blob_rows: usize },

    #[error("bad feature file: {0}")]
    BadFeatureFile(String),

    #[error("duplicate entry for frame {frame}, id {id}")]
    DuplicateTrackEntry { frame: u32, id: u32 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn row_suffix(row: Option<usize>) -> String {
    match row {
        Some(r) => format!(" at row {r}"),
        None => String::new(),
    }
}

impl FcgError {
    /// Attaches a source row to a degenerate-feature error that lacks one.
    pub(crate) fn at_row(self, row: usize) -> Self {
        match self {
            FcgError::DegenerateFeature { source_row: None } => {
                FcgError::DegenerateFeature { source_row: Some(row) }
            }
            other => other,
        }
    }
}
