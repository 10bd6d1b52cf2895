use thiserror::Error;

/// Errors raised across the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TonalError {
    #[error("value {value} out of range {min}..={max} for {what}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("invalid note event: {0}")]
    InvalidNote(String),

    #[error("no usable (non-percussion, positive-duration) notes")]
    EmptyInput,

    #[error("degenerate pitch-class profile: {0}")]
    DegenerateProfile(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("diffusion overflow: only {in_window_mass:.3e} of the walk mass stays inside the 35-position window")]
    DiffusionOverflow { in_window_mass: f64 },

    #[error("fit failed: every restart hit a diffusion overflow")]
    FitFailure,

    #[error("degenerate interval weights: all weights are zero")]
    DegenerateWeights,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("MIDI parse error at byte {offset}: {message}")]
    MidiParse { offset: usize, message: String },

    #[error("table error on line {line}: {message}")]
    TableRow { line: usize, message: String },

    #[error("invalid key name {0:?}")]
    KeyName(String),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for TonalError {
    fn from(e: std::io::Error) -> Self {
        TonalError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, TonalError>;
