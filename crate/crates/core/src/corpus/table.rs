//! Tab-separated note tables and corpus manifests.
//!
//! A note table has a one-line header naming its columns:
//!
//! ```text
//! piece_id    tpc    duration    global_key
//! bwv846      17     0.5         C
//! ```
//!
//! `tpc` holds absolute line-of-fifths indices (0..=34, C = 17). A header
//! column named `tpc_rel` instead holds fifths above C (-17..=17).
//! `global_key` is optional; its first non-empty value becomes the annotated
//! key.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::PathBuf;

use crate::error::{Result, TonalError};
use crate::key_estimation::TonalCenter;
use crate::pitch_space::{LofIndex, NoteEvent};

use super::PieceRecord;

fn row_err(line: usize, message: impl Into<String>) -> TonalError {
    TonalError::TableRow {
        line,
        message: message.into(),
    }
}

struct Header {
    columns: Vec<String>,
}

impl Header {
    fn parse(line: &str) -> Self {
        Header {
            columns: line.split('\t').map(|c| c.trim().to_ascii_lowercase()).collect(),
        }
    }

    fn find(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn lines(reader: impl BufRead) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.map(|s| s.trim_end_matches('\r').to_string())))
}

/// Reads a single-piece note table. Every row must share one `piece_id`.
pub fn ingest_notes_table(reader: impl BufRead) -> Result<PieceRecord> {
    let mut rows = lines(reader);
    let header = match rows.next() {
        Some((_, line)) => Header::parse(&line?),
        None => return Err(row_err(1, "missing header")),
    };
    let id_col = header
        .find("piece_id")
        .ok_or_else(|| row_err(1, "header lacks a piece_id column"))?;
    let (tpc_col, relative) = match (header.find("tpc"), header.find("tpc_rel")) {
        (Some(c), None) => (c, false),
        (None, Some(c)) => (c, true),
        (Some(_), Some(_)) => return Err(row_err(1, "header has both tpc and tpc_rel")),
        (None, None) => return Err(row_err(1, "header lacks a tpc or tpc_rel column")),
    };
    let dur_col = header
        .find("duration")
        .ok_or_else(|| row_err(1, "header lacks a duration column"))?;
    let key_col = header.find("global_key");

    let mut piece_id: Option<String> = None;
    let mut key: Option<TonalCenter> = None;
    let mut notes = Vec::new();
    for (line_no, line) in rows {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let field = |col: usize, name: &str| {
            fields
                .get(col)
                .copied()
                .filter(|f| !f.is_empty())
                .ok_or_else(|| row_err(line_no, format!("missing {name}")))
        };

        let id = field(id_col, "piece_id")?;
        match &piece_id {
            None => piece_id = Some(id.to_string()),
            Some(existing) if existing != id => {
                return Err(row_err(
                    line_no,
                    format!("piece_id {id:?} differs from {existing:?}"),
                ))
            }
            Some(_) => {}
        }

        let raw_tpc = field(tpc_col, "tpc")?;
        let tpc: i64 = raw_tpc
            .parse()
            .map_err(|_| row_err(line_no, format!("tpc {raw_tpc:?} is not an integer")))?;
        let lof = if relative {
            LofIndex::from_fifths(tpc)
        } else {
            LofIndex::new(tpc)
        }
        .map_err(|e| row_err(line_no, e.to_string()))?;

        let raw_dur = field(dur_col, "duration")?;
        let duration: f64 = raw_dur
            .parse()
            .map_err(|_| row_err(line_no, format!("duration {raw_dur:?} is not a number")))?;
        notes.push(NoteEvent::spelled(lof, duration).map_err(|e| row_err(line_no, e.to_string()))?);

        if key.is_none() {
            if let Some(k) = key_col.and_then(|c| fields.get(c)).filter(|k| !k.is_empty()) {
                key = Some(TonalCenter::parse_annotated(k).map_err(|e| row_err(line_no, e.to_string()))?);
            }
        }
    }

    let mut record = PieceRecord::new(piece_id.unwrap_or_default(), notes);
    record.annotated_key = key;
    Ok(record)
}

/// One manifest row.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub path: PathBuf,
    pub group: String,
    pub key: Option<TonalCenter>,
    pub metadata: BTreeMap<String, String>,
}

/// Reads a manifest with required `id`, `path` and `group` columns, an
/// optional `key` column, and any number of metadata columns (composer, era,
/// genre, ...). Relative paths are kept as written.
pub fn read_manifest(reader: impl BufRead) -> Result<Vec<ManifestEntry>> {
    let mut rows = lines(reader);
    let header = match rows.next() {
        Some((_, line)) => Header::parse(&line?),
        None => return Err(row_err(1, "missing header")),
    };
    let need = |name: &str| {
        header
            .find(name)
            .ok_or_else(|| row_err(1, format!("header lacks a {name} column")))
    };
    let (id_col, path_col, group_col) = (need("id")?, need("path")?, need("group")?);
    let key_col = header.find("key");

    let mut entries: Vec<ManifestEntry> = Vec::new();
    for (line_no, line) in rows {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != header.columns.len() {
            return Err(row_err(
                line_no,
                format!("expected {} fields, found {}", header.columns.len(), fields.len()),
            ));
        }
        let id = fields[id_col].to_string();
        if id.is_empty() {
            return Err(row_err(line_no, "empty id"));
        }
        if entries.iter().any(|e| e.id == id) {
            return Err(row_err(line_no, format!("duplicate id {id:?}")));
        }
        let key = match key_col.map(|c| fields[c]).filter(|k| !k.is_empty()) {
            Some(k) => Some(TonalCenter::parse_annotated(k).map_err(|e| row_err(line_no, e.to_string()))?),
            None => None,
        };
        let metadata = header
            .columns
            .iter()
            .zip(&fields)
            .enumerate()
            .filter(|(i, _)| ![id_col, path_col, group_col].contains(i) && Some(*i) != key_col)
            .filter(|(_, (_, v))| !v.is_empty())
            .map(|(_, (k, v))| (k.clone(), v.to_string()))
            .collect();
        entries.push(ManifestEntry {
            id,
            path: PathBuf::from(fields[path_col]),
            group: fields[group_col].to_string(),
            key,
            metadata,
        });
    }
    Ok(entries)
}

/// Writes a note table that [`ingest_notes_table`] reads back.
pub fn write_notes_table(
    out: &mut impl std::io::Write,
    piece_id: &str,
    notes: &[(LofIndex, f64)],
    key: Option<&TonalCenter>,
) -> std::io::Result<()> {
    writeln!(out, "piece_id\ttpc\tduration\tglobal_key")?;
    let key_name = key
        .map(|k| match k.mode {
            crate::key_estimation::Mode::Major => k.name(),
            crate::key_estimation::Mode::Minor => format!("{}m", k.name()),
        })
        .unwrap_or_default();
    for (i, (lof, dur)) in notes.iter().enumerate() {
        let key_field = if i == 0 { key_name.as_str() } else { "" };
        writeln!(out, "{piece_id}\t{}\t{dur}\t{key_field}", lof.value())?;
    }
    Ok(())
}
