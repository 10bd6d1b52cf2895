//! Byte-reproducible report files.
//!
//! Numbers in tables are printed with six decimals, `NA` marks a missing or
//! non-finite value. Floats in the JSON summary are rounded to six
//! significant digits.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::tdm::STEP_OFFSETS;

use super::run::{CorpusReport, PieceOutcome};

pub const PIECES_FILE: &str = "pieces.tsv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const FOCUS_RIDGE_FILE: &str = "focus_ridge.tsv";
pub const WEIGHT_PROFILES_FILE: &str = "weight_profiles.tsv";
pub const AGGREGATES_FILE: &str = "aggregates.tsv";

pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return "NA".to_string();
    }
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), fmt_num)
}

/// Rounds to six significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.5e}").parse().unwrap_or(v)
}

/// Applies [`round_sig`] to every float in a JSON tree.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(0.0));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn pieces_header(k_range: (usize, usize)) -> String {
    let mut cols = vec!["id".to_string(), "group".into(), "key".into(), "mode".into()];
    cols.extend((k_range.0..=k_range.1).map(|k| format!("focus_k{k}")));
    cols.extend(
        [
            "lambda",
            "fifth_dominance",
            "weight_entropy",
            "weight_kurtosis",
            "loglik",
            "renormalized_mass",
            "filter_verdict",
            "archetype",
        ]
        .map(String::from),
    );
    cols.join("\t")
}

/// One row per manifest entry, failures included.
pub fn pieces_tsv(report: &CorpusReport) -> String {
    let (lo, hi) = report.k_range;
    let mut out = pieces_header(report.k_range);
    out.push('\n');
    for outcome in &report.outcomes {
        let mut row: Vec<String> = Vec::new();
        match outcome {
            PieceOutcome::Analyzed(a) => {
                row.push(a.id.clone());
                row.push(a.group.clone());
                row.push(a.center.name());
                row.push(a.center.mode.as_str().to_string());
                row.extend((lo..=hi).map(|k| fmt_opt(a.focus_profile.get(k))));
                row.push(fmt_num(a.connection));
                row.push(fmt_num(a.weight_stats.fifth_dominance));
                row.push(fmt_num(a.weight_stats.weight_entropy));
                row.push(fmt_opt(a.weight_stats.weight_kurtosis));
                row.push(fmt_num(a.fit.log_likelihood));
                row.push(fmt_num(a.fit.renormalized_mass));
                row.push(a.filter_verdict.label());
                row.push(a.archetype.map_or("NA", |x| x.label()).to_string());
            }
            PieceOutcome::Failed(f) => {
                row.push(f.id.clone());
                row.push(f.group.clone());
                row.extend(std::iter::repeat_n("NA".to_string(), 2 + (hi + 1 - lo) + 6));
                row.push(f.kind.tag().to_string());
                row.push("NA".to_string());
            }
        }
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

pub fn summary_value(report: &CorpusReport) -> Value {
    let n_analyzed = report.analyses().count();
    let n_passing = report.analyses().filter(|a| a.passes()).count();
    let mut v = json!({
        "n_pieces": report.outcomes.len(),
        "n_analyzed": n_analyzed,
        "n_passing": n_passing,
        "n_failed": report.outcomes.len() - n_analyzed,
        "k_range": [report.k_range.0, report.k_range.1],
        "group_by": report.group_by,
        "medians": report.medians,
        "groups": report.stats.groups,
        "effect_sizes": report.stats.effect_sizes,
        "aggregates": report.stats.aggregates,
        "failures": report.failures().collect::<Vec<_>>(),
        "ingest_warnings": report.warnings,
    });
    round_floats(&mut v);
    v
}

pub fn summary_json(report: &CorpusReport) -> String {
    let mut s = serde_json::to_string_pretty(&summary_value(report)).expect("summary serializes");
    s.push('\n');
    s
}

/// Focus per k for every passing piece, sorted by id.
pub fn focus_ridge_tsv(report: &CorpusReport) -> String {
    let mut rows: Vec<_> = report.analyses().filter(|a| a.passes()).collect();
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = String::from("id\tgroup\tk\tfocus\n");
    for a in rows {
        for (k, f) in &a.focus_profile.values {
            let _ = writeln!(out, "{}\t{}\t{k}\t{}", a.id, a.group, fmt_num(*f));
        }
    }
    out
}

/// Mean fitted weight per step and group, ± sample SD.
pub fn weight_profiles_tsv(report: &CorpusReport) -> String {
    let mut out = String::from("group\tstep\tmean\tsd\n");
    for g in &report.stats.groups {
        for (s, step) in g.weight_profile.iter().zip(STEP_OFFSETS) {
            let _ = writeln!(out, "{}\t{step:+}\t{}\t{}", g.group, fmt_opt(s.mean), fmt_opt(s.sd));
        }
    }
    out
}

pub fn aggregates_tsv(report: &CorpusReport) -> String {
    let mut out = String::from("field\tvalue\tgroup\tn\tmean_focus_k3\tmean_connection\n");
    for a in &report.stats.aggregates {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            a.field,
            a.value,
            a.group,
            a.n,
            fmt_num(a.mean_focus_k3),
            fmt_num(a.mean_connection)
        );
    }
    out
}

/// Writes all report files into `dir`, creating it if needed, and returns
/// their paths.
pub fn write_report(dir: &Path, report: &CorpusReport) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = [
        (PIECES_FILE, pieces_tsv(report)),
        (SUMMARY_FILE, summary_json(report)),
        (FOCUS_RIDGE_FILE, focus_ridge_tsv(report)),
        (WEIGHT_PROFILES_FILE, weight_profiles_tsv(report)),
        (AGGREGATES_FILE, aggregates_tsv(report)),
    ];
    files
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(5.0 / 7.0), "0.714286");
        assert_eq!(fmt_num(1.0), "1.000000");
        assert_eq!(fmt_num(-1e-9), "0.000000");
        assert_eq!(fmt_num(f64::NAN), "NA");
        assert_eq!(fmt_opt(None), "NA");
    }

    #[test]
    fn significant_digit_rounding() {
        assert_eq!(round_sig(0.123456789), 0.123457);
        assert_eq!(round_sig(-12345.6789), -12345.7);
        assert_eq!(round_sig(1.5e-7), 1.5e-7);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn header_follows_k_range() {
        assert_eq!(
            pieces_header((2, 4)),
            "id\tgroup\tkey\tmode\tfocus_k2\tfocus_k3\tfocus_k4\tlambda\tfifth_dominance\t\
             weight_entropy\tweight_kurtosis\tloglik\trenormalized_mass\tfilter_verdict\tarchetype"
        );
    }
}
