//! Value-bias auditing of generated text against a circumplex value theory:
//! probe construction, response collection, lexicon scoring, count matrices,
//! validity metrics and structural analysis.

pub mod baseline;
pub mod generator;
pub mod lexicon;
pub mod matrix;
pub mod metrics;
pub mod mock;
pub mod probes;
pub mod report;
pub mod stats;
pub mod structure;
pub mod text;

pub use generator::{run_probes, CorpusSummary, GenerationConfig, ResponseRecord};
pub use lexicon::{parse_lexicon, score_document, CategoryCounts, Lexicon, LexiconError};
pub use matrix::{aggregate_matrix, build_count_matrix, CountMatrix, MatrixError};
pub use metrics::{compute_metrics, Metric, MetricTable};
pub use probes::{build_probes, clean_response, ProbeKind, ValueSpec};
pub use structure::{structure_report, StructureOptions, StructureReport};
