//! Corpus ingestion, per-piece analysis, filtering and group statistics.

pub mod analysis;
pub mod filters;
pub mod midi;
pub mod report;
pub mod run;
pub mod stats;
pub mod table;

use std::collections::BTreeMap;

use crate::key_estimation::TonalCenter;
use crate::pitch_space::NoteEvent;

pub use analysis::{analyze_piece, AnalysisOptions, PieceAnalysis};
pub use filters::{apply_filters, FilterInputs, FilterRule, FilterRules, FilterVerdict};
pub use midi::{ingest_midi, parse_midi};
pub use run::{
    load_piece, run_corpus, run_manifest, run_records, CorpusOptions, CorpusReport, FailureKind, PieceFailure,
    PieceOutcome,
};
pub use stats::{classify_archetypes, corpus_stats, Archetype, CorpusStats};
pub use table::{ingest_notes_table, read_manifest, ManifestEntry};

/// One piece as ingested from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceRecord {
    pub id: String,
    pub group: String,
    pub metadata: BTreeMap<String, String>,
    pub notes: Vec<NoteEvent>,
    pub annotated_key: Option<TonalCenter>,
    /// Events dropped during ingest (unmatched note-offs, unterminated or
    /// zero-length notes).
    pub ingest_warnings: usize,
}

impl PieceRecord {
    pub fn new(id: impl Into<String>, notes: Vec<NoteEvent>) -> Self {
        PieceRecord {
            id: id.into(),
            group: String::new(),
            metadata: BTreeMap::new(),
            notes,
            annotated_key: None,
            ingest_warnings: 0,
        }
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = group.into();
        self
    }

    pub fn with_key(mut self, key: TonalCenter) -> Self {
        self.annotated_key = Some(key);
        self
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }
}
