//! End-to-end corpus runs: ingest, per-piece analysis (optionally in
//! parallel), archetype labelling and statistics.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::Serialize;

use crate::error::{Result, TonalError};
use crate::par::{self, Execution};

use super::analysis::{analyze_piece, AnalysisOptions, PieceAnalysis};
use super::stats::{classify_archetypes, corpus_stats, CorpusStats, Medians};
use super::table::{ingest_notes_table, read_manifest, ManifestEntry};
use super::{midi, PieceRecord};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusOptions {
    pub analysis: AnalysisOptions,
    /// Metadata field for aggregate positions (`composer`, `era`, ...).
    pub group_by: Option<String>,
    pub execution: Execution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    IngestFailed,
    EmptyPiece,
    AnalysisFailed,
}

impl FailureKind {
    pub fn tag(self) -> &'static str {
        match self {
            FailureKind::IngestFailed => "ingest_failed",
            FailureKind::EmptyPiece => "empty_piece",
            FailureKind::AnalysisFailed => "analysis_failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceFailure {
    pub id: String,
    pub group: String,
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PieceOutcome {
    Analyzed(Box<PieceAnalysis>),
    Failed(PieceFailure),
}

impl PieceOutcome {
    pub fn id(&self) -> &str {
        match self {
            PieceOutcome::Analyzed(a) => &a.id,
            PieceOutcome::Failed(f) => &f.id,
        }
    }

    pub fn analysis(&self) -> Option<&PieceAnalysis> {
        match self {
            PieceOutcome::Analyzed(a) => Some(a),
            PieceOutcome::Failed(_) => None,
        }
    }
}

/// Ingest warning count for one piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestWarning {
    pub id: String,
    pub dropped_events: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusReport {
    /// One entry per manifest row, in manifest order.
    pub outcomes: Vec<PieceOutcome>,
    pub warnings: Vec<IngestWarning>,
    pub medians: Option<Medians>,
    pub stats: CorpusStats,
    pub k_range: (usize, usize),
    pub group_by: Option<String>,
}

impl CorpusReport {
    pub fn analyses(&self) -> impl Iterator<Item = &PieceAnalysis> {
        self.outcomes.iter().filter_map(PieceOutcome::analysis)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PieceFailure> {
        self.outcomes.iter().filter_map(|o| match o {
            PieceOutcome::Failed(f) => Some(f),
            PieceOutcome::Analyzed(_) => None,
        })
    }

    pub fn all_failed(&self) -> bool {
        self.analyses().next().is_none()
    }
}

/// Reads one manifest entry. Relative paths resolve against `base_dir`;
/// `.mid`/`.midi` files go through the MIDI reader, `.tsv`/`.txt` through the
/// note-table reader. A manifest key overrides any key found in the file.
pub fn load_piece(entry: &ManifestEntry, base_dir: &Path) -> Result<PieceRecord> {
    let path = if entry.path.is_absolute() {
        entry.path.clone()
    } else {
        base_dir.join(&entry.path)
    };
    let shown = entry.path.display();
    let ext = entry
        .path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let io_err = |e: std::io::Error| TonalError::Io(format!("cannot read {shown}: {}", e.kind()));
    let mut record = match ext.as_str() {
        "mid" | "midi" => {
            let bytes = std::fs::read(&path).map_err(io_err)?;
            midi::ingest_midi(&bytes, &entry.id, BTreeMap::new())?
        }
        "tsv" | "txt" => ingest_notes_table(BufReader::new(File::open(&path).map_err(io_err)?))?,
        _ => {
            return Err(TonalError::Io(format!(
                "cannot read {shown}: unsupported extension {ext:?}"
            )))
        }
    };
    record.id = entry.id.clone();
    record.group = entry.group.clone();
    record.metadata = entry.metadata.clone();
    if entry.key.is_some() {
        record.annotated_key = entry.key;
    }
    Ok(record)
}

/// Reads the manifest at `path` and runs the corpus it lists.
pub fn run_manifest(path: &Path, opts: &CorpusOptions) -> Result<CorpusReport> {
    let file = File::open(path).map_err(|e| TonalError::Io(format!("{}: {e}", path.display())))?;
    let entries = read_manifest(BufReader::new(file))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(run_corpus(&entries, &base, opts))
}

pub fn run_corpus(entries: &[ManifestEntry], base_dir: &Path, opts: &CorpusOptions) -> CorpusReport {
    let loaded: Vec<(String, String, Result<PieceRecord>)> = entries
        .iter()
        .map(|e| (e.id.clone(), e.group.clone(), load_piece(e, base_dir)))
        .collect();
    analyze_loaded(loaded, opts)
}

/// Runs already-ingested pieces.
pub fn run_records(pieces: Vec<PieceRecord>, opts: &CorpusOptions) -> CorpusReport {
    let loaded = pieces
        .into_iter()
        .map(|p| (p.id.clone(), p.group.clone(), Ok(p)))
        .collect();
    analyze_loaded(loaded, opts)
}

fn analyze_loaded(loaded: Vec<(String, String, Result<PieceRecord>)>, opts: &CorpusOptions) -> CorpusReport {
    let warnings = loaded
        .iter()
        .filter_map(|(id, _, r)| match r {
            Ok(p) if p.ingest_warnings > 0 => Some(IngestWarning {
                id: id.clone(),
                dropped_events: p.ingest_warnings,
            }),
            _ => None,
        })
        .collect();

    let results: Vec<std::result::Result<PieceAnalysis, PieceFailure>> =
        par::map(&loaded, opts.execution, |(id, group, record)| {
            let fail = |kind, message: String| PieceFailure {
                id: id.clone(),
                group: group.clone(),
                kind,
                message,
            };
            let record = record
                .as_ref()
                .map_err(|e| fail(FailureKind::IngestFailed, e.to_string()))?;
            analyze_piece(record, &opts.analysis).map_err(|e| match e {
                TonalError::EmptyInput => fail(FailureKind::EmptyPiece, "no pitched notes".into()),
                other => fail(FailureKind::AnalysisFailed, other.to_string()),
            })
        });

    let mut analyses = Vec::new();
    let mut slots = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(a) => {
                slots.push(None);
                analyses.push(a);
            }
            Err(f) => slots.push(Some(f)),
        }
    }
    let medians = classify_archetypes(&mut analyses).ok();
    let stats = corpus_stats(&analyses, opts.group_by.as_deref());

    let mut analyses = analyses.into_iter();
    let outcomes = slots
        .into_iter()
        .map(|slot| match slot {
            Some(f) => PieceOutcome::Failed(f),
            None => PieceOutcome::Analyzed(Box::new(analyses.next().expect("one analysis per slot"))),
        })
        .collect();

    CorpusReport {
        outcomes,
        warnings,
        medians,
        stats,
        k_range: (*opts.analysis.k_range.start(), *opts.analysis.k_range.end()),
        group_by: opts.group_by.clone(),
    }
}
