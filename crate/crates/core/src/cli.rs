//! The `tonal` command line.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input (including empty
//! pieces), 3 analysis failure, 64 usage error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::corpus::report::{fmt_num, fmt_opt, round_floats, write_report};
use crate::corpus::table::write_notes_table;
use crate::corpus::{self, analyze_piece, AnalysisOptions, CorpusOptions, FilterRules, PieceRecord};
use crate::error::TonalError;
use crate::key_estimation::{estimate_key, Mode, TonalCenter};
use crate::metrics::{self, MAX_FOCUS_K};
use crate::par::Execution;
use crate::pitch_space::{build_lof_distribution, ChromaticDistribution, LofIndex, LOF_SIZE};
use crate::tdm::{self, TdmParams, FIFTH_HEAVY_WEIGHTS, STEP_OFFSETS, UNIFORM_WEIGHTS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "tonal", version, about = "Tonal focus and tonal connection of symbolic music")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one piece (.mid, .midi, .tsv or .txt).
    Analyze(AnalyzeArgs),
    /// Analyze every piece of a manifest and write report files.
    Corpus(CorpusArgs),
    /// Sample a synthetic piece from the diffusion model as a note table.
    Sample(SampleArgs),
    /// Estimate the key of one piece.
    EstimateKey(PieceArgs),
    /// Fit the diffusion model to one piece.
    Fit(FitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    #[value(alias = "structured")]
    Json,
}

#[derive(Debug, Args)]
pub struct PieceArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub piece: PieceArgs,
    /// Tonal center, e.g. C, F#m, "Bb minor". Estimated when omitted.
    #[arg(long)]
    pub key: Option<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub piece: PieceArgs,
    #[arg(long)]
    pub key: Option<String>,
    /// Focus window half-width reported in the `focus` column.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(0..=MAX_FOCUS_K as u64))]
    pub k: u64,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Tab-separated manifest with id, path and group columns.
    pub manifest: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
    /// Metadata field for aggregate positions (composer, era, genre, ...).
    #[arg(long)]
    pub group_by: Option<String>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
}

#[derive(Debug, Args)]
pub struct AnalysisArgs {
    /// Focus profile range, e.g. 2..7.
    #[arg(long, default_value = "2..7", value_parser = parse_k_range)]
    pub k_range: RangeInclusive<usize>,
    #[arg(long)]
    pub min_unique_pcs: Option<usize>,
    #[arg(long)]
    pub min_pitch_entropy_bits: Option<f64>,
    #[arg(long)]
    pub max_pitch_entropy_bits: Option<f64>,
    #[arg(long)]
    pub max_single_pc_share: Option<f64>,
    #[arg(long)]
    pub min_focus_k3: Option<f64>,
    /// Comma-separated genres; an empty string excludes none.
    #[arg(long)]
    pub excluded_genres: Option<String>,
}

impl AnalysisArgs {
    pub fn options(&self) -> AnalysisOptions {
        let d = FilterRules::default();
        let rules = FilterRules {
            min_unique_pcs: self.min_unique_pcs.unwrap_or(d.min_unique_pcs),
            min_pitch_entropy_bits: self.min_pitch_entropy_bits.unwrap_or(d.min_pitch_entropy_bits),
            max_pitch_entropy_bits: self.max_pitch_entropy_bits.unwrap_or(d.max_pitch_entropy_bits),
            max_single_pc_share: self.max_single_pc_share.unwrap_or(d.max_single_pc_share),
            min_focus_k3: self.min_focus_k3.unwrap_or(d.min_focus_k3),
            excluded_genres: match &self.excluded_genres {
                Some(list) => list
                    .split(',')
                    .map(|g| g.trim().to_ascii_lowercase())
                    .filter(|g| !g.is_empty())
                    .collect::<BTreeSet<_>>(),
                None => d.excluded_genres,
            },
        };
        AnalysisOptions {
            k_range: self.k_range.clone(),
            rules,
        }
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub lambda: f64,
    /// `uniform`, `fifth-heavy`, or six comma-separated weights ordered
    /// -4,-3,-1,+1,+3,+4.
    #[arg(long, default_value = "fifth-heavy", value_parser = parse_weights)]
    pub weights: [f64; 6],
    /// Tonal center; a trailing `m` marks minor.
    #[arg(long, default_value = "C")]
    pub center: String,
    #[arg(long, default_value_t = 1000)]
    pub n_tokens: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "sample")]
    pub id: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_k_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once('-'))
        .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("{x:?} is not a non-negative integer"));
    let (lo, hi) = (parse(a)?, parse(b)?);
    if lo > hi || hi > MAX_FOCUS_K {
        return Err(format!("need LO <= HI <= {MAX_FOCUS_K}, got {lo}..{hi}"));
    }
    Ok(lo..=hi)
}

pub fn parse_weights(s: &str) -> Result<[f64; 6], String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "uniform" => return Ok(UNIFORM_WEIGHTS),
        "fifth-heavy" => return Ok(FIFTH_HEAVY_WEIGHTS),
        _ => {}
    }
    let values = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("{x:?} is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    <[f64; 6]>::try_from(values).map_err(|v| format!("expected 6 weights, got {}", v.len()))
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<TonalError> for CliError {
    fn from(e: TonalError) -> Self {
        let code = match e {
            TonalError::EmptyInput
            | TonalError::InvalidNote(_)
            | TonalError::MidiParse { .. }
            | TonalError::TableRow { .. }
            | TonalError::KeyName(_)
            | TonalError::OutOfRange { .. }
            | TonalError::Io(_) => EXIT_INPUT,
            TonalError::InvalidParams(_) | TonalError::DegenerateWeights => EXIT_USAGE,
            TonalError::DegenerateProfile(_)
            | TonalError::DiffusionOverflow { .. }
            | TonalError::FitFailure
            | TonalError::InsufficientData(_) => EXIT_ANALYSIS,
        };
        let message = match e {
            TonalError::EmptyInput => format!("empty piece: {e}"),
            e => e.to_string(),
        };
        CliError { code, message }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Errors go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Analyze(a) => cmd_analyze(&a, stdout),
        Command::Corpus(a) => cmd_corpus(&a, stdout, stderr),
        Command::Sample(a) => cmd_sample(&a, stdout),
        Command::EstimateKey(a) => cmd_estimate_key(&a, stdout),
        Command::Fit(a) => cmd_fit(&a, stdout),
    }
}

fn parse_key(key: Option<&str>) -> CliResult<Option<TonalCenter>> {
    key.map(TonalCenter::parse_annotated)
        .transpose()
        .map_err(|e| CliError::usage(e.to_string()))
}

/// Reads a single piece, choosing the reader by extension.
pub fn load_file(path: &Path) -> CliResult<PieceRecord> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("piece")
        .to_string();
    let open_err = |e: std::io::Error| CliError {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    };
    match ext.as_str() {
        "mid" | "midi" => {
            let bytes = std::fs::read(path).map_err(open_err)?;
            Ok(corpus::ingest_midi(&bytes, &id, Default::default())?)
        }
        "tsv" | "txt" => {
            let file = File::open(path).map_err(open_err)?;
            Ok(corpus::ingest_notes_table(BufReader::new(file))?)
        }
        _ => Err(CliError::usage(format!(
            "{}: unsupported extension {ext:?} (expected .mid, .midi, .tsv or .txt)",
            path.display()
        ))),
    }
}

fn center_json(c: &TonalCenter) -> serde_json::Value {
    json!({
        "key": c.name(),
        "lof_index": c.lof_index.value(),
        "mode": c.mode.as_str(),
        "source": match c.source {
            crate::key_estimation::KeySource::Annotated => "annotated",
            crate::key_estimation::KeySource::Estimated => "estimated",
        },
    })
}

fn emit_json(stdout: &mut dyn Write, mut v: serde_json::Value) -> CliResult<()> {
    round_floats(&mut v);
    let text = serde_json::to_string_pretty(&v).expect("json serializes");
    writeln!(stdout, "{text}")?;
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let mut piece = load_file(&args.piece.file)?;
    if let Some(k) = parse_key(args.key.as_deref())? {
        piece.annotated_key = Some(k);
    }
    let opts = args.analysis.options();
    let a = analyze_piece(&piece, &opts)?;
    let k = args.k as usize;
    let focus = metrics::tonal_focus(&a.distribution, &a.center, k)?;
    let source = center_json(&a.center)["source"].as_str().unwrap_or_default().to_string();

    match args.piece.format {
        Format::Tsv => {
            let mut out = String::new();
            let mut header = vec!["id".to_string(), "key".into(), "mode".into(), "key_source".into(), "k".into(), "focus".into()];
            header.extend(a.focus_profile.values.keys().map(|k| format!("focus_k{k}")));
            header.extend(
                [
                    "lambda",
                    "fifth_dominance",
                    "weight_entropy",
                    "weight_kurtosis",
                    "loglik",
                    "renormalized_mass",
                    "converged",
                    "filter_verdict",
                ]
                .map(String::from),
            );
            let mut row = vec![
                a.id.clone(),
                a.center.name(),
                a.center.mode.as_str().to_string(),
                source,
                k.to_string(),
                fmt_num(focus),
            ];
            row.extend(a.focus_profile.values.values().map(|f| fmt_num(*f)));
            row.extend([
                fmt_num(a.connection),
                fmt_num(a.weight_stats.fifth_dominance),
                fmt_num(a.weight_stats.weight_entropy),
                fmt_opt(a.weight_stats.weight_kurtosis),
                fmt_num(a.fit.log_likelihood),
                fmt_num(a.fit.renormalized_mass),
                a.fit.converged.to_string(),
                a.filter_verdict.label(),
            ]);
            let _ = writeln!(out, "{}\n{}\n", header.join("\t"), row.join("\t"));
            out.push_str("lof\tname\tmass\n");
            for i in 0..LOF_SIZE {
                let l = LofIndex::new(i as i64).expect("in range");
                let _ = writeln!(out, "{i}\t{}\t{}", l.name(), fmt_num(a.distribution.weights()[i]));
            }
            out.push_str("\nstep\tweight\n");
            for (step, w) in STEP_OFFSETS.iter().zip(a.fit.params.weights) {
                let _ = writeln!(out, "{step:+}\t{}", fmt_num(w));
            }
            stdout.write_all(out.as_bytes())?;
            Ok(())
        }
        Format::Json => emit_json(
            stdout,
            json!({
                "id": a.id,
                "center": center_json(&a.center),
                "key_correlation": a.key_correlation,
                "k": k,
                "focus": focus,
                "focus_profile": a.focus_profile.values.iter().map(|(k, v)| (format!("k{k}"), *v)).collect::<std::collections::BTreeMap<_, _>>(),
                "fit": a.fit,
                "weight_stats": a.weight_stats,
                "filter_inputs": a.filter_inputs,
                "filter_verdict": a.filter_verdict.label(),
                "distribution": a.distribution.weights().to_vec(),
            }),
        ),
    }
}

fn cmd_corpus(args: &CorpusArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let opts = CorpusOptions {
        analysis: args.analysis.options(),
        group_by: args.group_by.clone(),
        execution: Execution::from_jobs(args.jobs),
    };
    let report = corpus::run_manifest(&args.manifest, &opts)?;
    for f in report.failures() {
        writeln!(stderr, "warning: {}: {}: {}", f.id, f.kind.tag(), f.message)?;
    }
    for w in &report.warnings {
        writeln!(stderr, "warning: {}: dropped {} malformed note events", w.id, w.dropped_events)?;
    }
    let files = write_report(&args.out, &report).map_err(|e| CliError {
        code: EXIT_INPUT,
        message: format!("{}: {e}", args.out.display()),
    })?;
    let analyzed = report.analyses().count();
    let passing = report.analyses().filter(|a| a.passes()).count();
    writeln!(
        stdout,
        "{} pieces: {analyzed} analyzed, {passing} passing, {} failed; wrote {} files to {}",
        report.outcomes.len(),
        report.outcomes.len() - analyzed,
        files.len(),
        args.out.display()
    )?;
    if report.all_failed() {
        return Err(CliError {
            code: EXIT_ANALYSIS,
            message: "every piece failed".into(),
        });
    }
    Ok(())
}

fn cmd_sample(args: &SampleArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let center = TonalCenter::parse_annotated(&args.center).map_err(|e| CliError::usage(e.to_string()))?;
    let params = TdmParams::normalized(args.lambda, args.weights)?;
    let tokens = tdm::sample_tokens(&params, &center, args.n_tokens, args.seed)?;
    let notes: Vec<(LofIndex, f64)> = tokens.into_iter().map(|t| (t, 1.0)).collect();
    let mut buf = Vec::new();
    write_notes_table(&mut buf, &args.id, &notes, Some(&center))?;
    match &args.out {
        Some(path) => std::fs::write(path, buf).map_err(|e| CliError {
            code: EXIT_INPUT,
            message: format!("{}: {e}", path.display()),
        })?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

fn cmd_estimate_key(args: &PieceArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let piece = load_file(&args.file)?;
    let est = estimate_key(&ChromaticDistribution::from_notes(&piece.notes)?)?;
    let key_name = |pc: u8, mode: Mode| crate::key_estimation::tonic_pc_to_lof(pc, mode).name();
    match args.format {
        Format::Tsv => {
            let mut out = format!(
                "key\tmode\tr\n{}\t{}\t{}\n\nscores\nkey\tmode\tr\n",
                est.center.name(),
                est.center.mode.as_str(),
                fmt_num(est.correlation)
            );
            for s in &est.all_scores {
                let _ = writeln!(out, "{}\t{}\t{}", key_name(s.tonic_pc, s.mode), s.mode.as_str(), fmt_num(s.r));
            }
            stdout.write_all(out.as_bytes())?;
            Ok(())
        }
        Format::Json => emit_json(
            stdout,
            json!({
                "center": center_json(&est.center),
                "correlation": est.correlation,
                "scores": est.all_scores.iter().map(|s| json!({
                    "key": key_name(s.tonic_pc, s.mode),
                    "mode": s.mode.as_str(),
                    "r": s.r,
                })).collect::<Vec<_>>(),
            }),
        ),
    }
}

fn cmd_fit(args: &FitArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let piece = load_file(&args.piece.file)?;
    let center = match parse_key(args.key.as_deref())?.or(piece.annotated_key) {
        Some(c) => c,
        None => estimate_key(&ChromaticDistribution::from_notes(&piece.notes)?)?.center,
    };
    let d = build_lof_distribution(&piece.notes, center.lof_index)?;
    let fit = tdm::fit(&d, &center)?;
    match args.piece.format {
        Format::Tsv => {
            let mut out = String::from(
                "key\tmode\tlambda\tloglik\tconverged\trestarts\trenormalized_mass\tweights_identifiable\n",
            );
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n\nstep\tweight",
                center.name(),
                center.mode.as_str(),
                fmt_num(fit.params.lambda),
                fmt_num(fit.log_likelihood),
                fit.converged,
                fit.n_restarts_used,
                fmt_num(fit.renormalized_mass),
                fit.weights_identifiable
            );
            for (step, w) in STEP_OFFSETS.iter().zip(fit.params.weights) {
                let _ = writeln!(out, "{step:+}\t{}", fmt_num(w));
            }
            stdout.write_all(out.as_bytes())?;
            Ok(())
        }
        Format::Json => emit_json(stdout, json!({ "center": center_json(&center), "fit": fit })),
    }
}
