//! Compression-driven structural segmentation of beat-synchronous chord
//! sequences.
//!
//! A song is a sequence of major/minor triads, one per beat. Candidate
//! segments are laid onto polytopes (hypercubes with at most one added and
//! one deleted face), scored by a redundancy-aware complexity cost, and the
//! globally cheapest partition is found by dynamic programming. Estimated
//! frontiers can then be scored against reference annotations with tolerance
//! windows.

pub mod chord;
pub mod cost;
pub mod error;
pub mod evaluation;
pub mod relations;
pub mod segmentation;
pub mod shapes;

pub use chord::{parse_chord_label, preprocess_sequence, BeatSequence, Chord, ChordToken, Mode};
pub use cost::{polytope_cost, square_cost, CostBreakdown, CostConfig, Engine, PassageCost};
pub use error::Error;
pub use evaluation::{evaluate_corpus, match_frontiers, score, EvalReport, MatchCounts, Scores};
pub use relations::{Relation, RelationSystem, SystemKind};
pub use segmentation::{
    corpus_run, segment_song, Segment, SegmentationConfig, SegmentationResult,
};
pub use shapes::{
    build_vertex_graph, enumerate_shapes, enumerate_shapes_bounded, CompiledShape, DimSet, Edge,
    PolytopeShape, ShapeCatalog, VertexGraph, VertexInfo, VertexKind, DIM_LIMIT,
};
