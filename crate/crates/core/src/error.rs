//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Wraps an error from a named pipeline stage so batch runs can report
    /// where a failure happened.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("missing column {0}")]
    MissingColumn(String),

    #[error("row {row}: non-numeric value {value:?} in column {column}")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("duplicate (id, frame) = ({id}, {frame})")]
    DuplicateFrame { id: i64, frame: u64 },

    #[error("tracks file contains no data rows")]
    EmptyTracks,

    #[error("lane id {0} does not match the lane markings in the metadata")]
    UnknownLane(i64),

    #[error("tracks overlap for {overlap} frames; at least 2 are required")]
    InsufficientOverlap { overlap: usize },

    #[error("jerk estimation needs at least 2 samples, got {0}")]
    SeriesTooShort(usize),

    #[error("empty probability series")]
    EmptyProbabilitySeries,

    #[error("no ramp endpoint in the metadata and no lead vehicle to bound the forward gap")]
    NoForwardReference,

    #[error("interaction window shorter than 2 frames")]
    WindowTooShort,

    #[error("{samples} training samples for {bins} bins; reduce the bin count")]
    NotEnoughTrainingSamples { samples: usize, bins: usize },

    #[error("unsupported mapping model version {0}")]
    UnsupportedModelVersion(u32),

    #[error("no decision records to evaluate")]
    NoRecords,

    #[error("no sequences after calibration")]
    NoSequences,

    #[error("sequence {0} is incomplete; replay requires a calibrated endpoint")]
    IncompleteSequence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Tags an error with the pipeline stage it came from.
    pub fn stage(stage: &'static str, source: Error) -> Self {
        Error::Stage {
            stage,
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
