use crate::relations::SystemKind;

/// Errors produced by the segmentation library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unrecognized chord label {text:?} (offset {position})")]
    ChordParse { text: String, position: usize },

    #[error("sequence contains no chords")]
    EmptyContent,

    #[error("relation belongs to the {found} system, expected {expected}")]
    SystemMismatch {
        expected: SystemKind,
        found: SystemKind,
    },

    #[error("invalid polytope shape: {0}")]
    InvalidShape(String),

    #[error("cannot parse polytope {text:?}: {reason}")]
    ShapeParse { text: String, reason: String },

    #[error("passage has {got} chords but the polytope carries {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no partition of {length} beats into segments of {min}..={max} beats")]
    InfeasiblePartition {
        length: usize,
        min: usize,
        max: usize,
    },

    #[error("frontier list must be strictly increasing")]
    UnsortedFrontiers,

    #[error("{estimated} estimated songs but {references} reference songs")]
    SongCountMismatch {
        estimated: usize,
        references: usize,
    },
}
