//! Global key estimation by Krumhansl-Schmuckler profile correlation.

use serde::Serialize;

use crate::error::{Result, TonalError};
use crate::pitch_space::{ChromaticDistribution, LofIndex, LOF_CENTER};

/// Krumhansl & Kessler (1982) probe-tone ratings for C major, as reprinted in
/// Krumhansl, *Cognitive Foundations of Musical Pitch* (1990), table 2.1.
pub const MAJOR_PROFILE: [f64; 12] = [
    6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88,
];

/// Probe-tone ratings for C minor, same source.
pub const MINOR_PROFILE: [f64; 12] = [
    6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17,
];

/// Lowest line-of-fifths index an estimated tonic may take (Gb).
pub const TONIC_BAND_LOW: usize = 11;
/// Highest line-of-fifths index an estimated tonic may take (B).
pub const TONIC_BAND_HIGH: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Major,
    Minor,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Major => "major",
            Mode::Minor => "minor",
        }
    }

    fn profile(self) -> &'static [f64; 12] {
        match self {
            Mode::Major => &MAJOR_PROFILE,
            Mode::Minor => &MINOR_PROFILE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KeySource {
    Annotated,
    Estimated,
}

/// Tonic position on the line of fifths plus mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TonalCenter {
    pub lof_index: LofIndex,
    pub mode: Mode,
    pub source: KeySource,
}

impl TonalCenter {
    pub fn annotated(lof_index: LofIndex, mode: Mode) -> Self {
        TonalCenter {
            lof_index,
            mode,
            source: KeySource::Annotated,
        }
    }

    /// Parses key names such as `C`, `F#m`, `Bb minor`, `Eb:maj`.
    pub fn parse_annotated(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let split = trimmed
            .char_indices()
            .skip(1)
            .find(|&(_, c)| !matches!(c, '#' | 'b' | 'x' | '♯' | '♭'))
            .map(|(i, _)| i)
            .unwrap_or(trimmed.len());
        let (tonic, rest) = trimmed.split_at(split);
        let rest = rest.trim_start_matches([' ', ':', '_', '-']);
        let mode = match rest {
            "" | "M" => Mode::Major,
            "m" => Mode::Minor,
            other => match other.to_ascii_lowercase().as_str() {
                "maj" | "major" => Mode::Major,
                "min" | "minor" => Mode::Minor,
                _ => return Err(TonalError::KeyName(s.to_string())),
            },
        };
        let lof = LofIndex::parse_name(tonic).map_err(|_| TonalError::KeyName(s.to_string()))?;
        Ok(TonalCenter::annotated(lof, mode))
    }

    pub fn name(&self) -> String {
        self.lof_index.name()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyScore {
    pub tonic_pc: u8,
    pub mode: Mode,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyEstimate {
    pub center: TonalCenter,
    pub correlation: f64,
    /// Major keys by tonic pc 0..11, then minor keys.
    pub all_scores: Vec<KeyScore>,
}

fn pearson(x: &[f64; 12], y: &[f64; 12]) -> Option<f64> {
    let mx = x.iter().sum::<f64>() / 12.0;
    let my = y.iter().sum::<f64>() / 12.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Reference profile of `mode` transposed to `tonic_pc`.
pub fn rotated_profile(mode: Mode, tonic_pc: u8) -> [f64; 12] {
    let base = mode.profile();
    std::array::from_fn(|pc| base[(pc + 12 - tonic_pc as usize) % 12])
}

/// Correlates the profile with all 24 rotated reference profiles and returns
/// the best key. Ties go to major, then to the lower tonic pitch class.
pub fn estimate_key(profile: &ChromaticDistribution) -> Result<KeyEstimate> {
    let w = profile.weights();
    let first = w[0];
    if w.iter().all(|&v| v == first) {
        return Err(TonalError::DegenerateProfile(
            "all 12 pitch-class weights are equal".into(),
        ));
    }
    let mut all_scores = Vec::with_capacity(24);
    for mode in [Mode::Major, Mode::Minor] {
        for tonic_pc in 0..12u8 {
            let r = pearson(w, &rotated_profile(mode, tonic_pc)).ok_or_else(|| {
                TonalError::DegenerateProfile("zero variance in profile".into())
            })?;
            all_scores.push(KeyScore { tonic_pc, mode, r });
        }
    }
    let mut best = all_scores[0];
    for s in &all_scores[1..] {
        if s.r > best.r {
            best = *s;
        }
    }
    Ok(KeyEstimate {
        center: TonalCenter {
            lof_index: tonic_pc_to_lof(best.tonic_pc, best.mode),
            mode: best.mode,
            source: KeySource::Estimated,
        },
        correlation: best.r,
        all_scores,
    })
}

/// The unique spelling of `pc` inside the tonic band 11..=22 (Gb..B).
pub fn tonic_pc_to_lof(pc: u8, _mode: Mode) -> LofIndex {
    debug_assert!(pc < 12);
    // fifths from C of pc is pc * 7 mod 12, folded into -6..=5
    let mut fifths = (pc as i64 * 7).rem_euclid(12);
    if fifths > 5 {
        fifths -= 12;
    }
    LofIndex::new(LOF_CENTER as i64 + fifths).expect("band lies inside the window")
}
