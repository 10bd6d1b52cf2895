//! Line-of-fifths pitch representation.
//!
//! Spelled pitch classes live on a 35-position segment of the line of fifths,
//! centred on C at index 17 (F at 16, G at 18). Chromatic pitch classes use
//! the usual 0 = C, 1 = C#/Db, ... convention.

use crate::error::{Result, TonalError};

pub const LOF_SIZE: usize = 35;
pub const LOF_CENTER: usize = 17;
pub const CHROMA_SIZE: usize = 12;

/// Tolerance for "sums to one" checks on distributions.
pub const MASS_TOLERANCE: f64 = 1e-9;

const LETTERS: [char; 7] = ['F', 'C', 'G', 'D', 'A', 'E', 'B'];

/// Position on the line of fifths, `0..=34`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LofIndex(u8);

impl LofIndex {
    pub const C: LofIndex = LofIndex(LOF_CENTER as u8);

    pub fn new(value: i64) -> Result<Self> {
        if (0..LOF_SIZE as i64).contains(&value) {
            Ok(LofIndex(value as u8))
        } else {
            Err(TonalError::OutOfRange {
                what: "line-of-fifths index",
                value,
                min: 0,
                max: LOF_SIZE as i64 - 1,
            })
        }
    }

    /// Position given as fifths above C (`-17..=17`).
    pub fn from_fifths(fifths: i64) -> Result<Self> {
        LofIndex::new(fifths + LOF_CENTER as i64).map_err(|_| TonalError::OutOfRange {
            what: "fifths from C",
            value: fifths,
            min: -(LOF_CENTER as i64),
            max: LOF_CENTER as i64,
        })
    }

    #[inline]
    pub fn value(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn fifths_from_c(self) -> i64 {
        self.0 as i64 - LOF_CENTER as i64
    }

    pub fn chromatic(self) -> u8 {
        lof_to_chromatic(self)
    }

    /// Spelled name such as `C`, `F#`, `Bb`, `Ebbb`.
    pub fn name(self) -> String {
        let shifted = self.fifths_from_c() + 1;
        let letter = LETTERS[shifted.rem_euclid(7) as usize];
        let accidentals = shifted.div_euclid(7);
        let mut s = String::with_capacity(4);
        s.push(letter);
        let mark = if accidentals > 0 { '#' } else { 'b' };
        for _ in 0..accidentals.unsigned_abs() {
            s.push(mark);
        }
        s
    }

    /// Parse a spelled name (`C`, `F#`, `Bb`, `Gx`, `C##`).
    pub fn parse_name(name: &str) -> Result<Self> {
        let err = || TonalError::KeyName(name.to_string());
        let mut chars = name.chars();
        let letter = chars.next().ok_or_else(err)?.to_ascii_uppercase();
        let pos = LETTERS.iter().position(|&l| l == letter).ok_or_else(err)? as i64;
        let mut fifths = pos - 1;
        for c in chars {
            fifths += match c {
                '#' | '♯' => 7,
                'x' | '𝄪' => 14,
                'b' | '♭' => -7,
                _ => return Err(err()),
            };
        }
        LofIndex::from_fifths(fifths).map_err(|_| err())
    }
}

impl std::fmt::Display for LofIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

/// Chromatic pitch class of a line-of-fifths position: `((i - 17) * 7) mod 12`.
pub fn lof_to_chromatic(i: LofIndex) -> u8 {
    (i.fifths_from_c() * 7).rem_euclid(12) as u8
}

/// Nearest spelling of `pc` to `center` on the line of fifths; exact ties go
/// to the sharp side.
pub fn spell_chromatic(pc: u8, center: LofIndex) -> LofIndex {
    debug_assert!(pc < 12);
    let c = center.value() as i64;
    let mut best: Option<(i64, i64)> = None;
    for i in 0..LOF_SIZE as i64 {
        if (((i - LOF_CENTER as i64) * 7).rem_euclid(12)) as u8 != pc {
            continue;
        }
        let dist = (i - c).abs();
        // ascending scan: `<=` keeps the larger index on ties
        if best.is_none_or(|(d, _)| dist <= d) {
            best = Some((dist, i));
        }
    }
    // 35 consecutive positions cover every residue mod 12
    LofIndex(best.expect("every pitch class has a spelling").1 as u8)
}

/// A single sounding note as seen by the distribution builder.
#[derive(Debug, Clone, PartialEq)]
pub struct NoteEvent {
    pub chromatic_pc: u8,
    pub spelled_lof: Option<LofIndex>,
    pub duration: f64,
    pub is_percussion: bool,
}

impl NoteEvent {
    pub fn new(chromatic_pc: u8, duration: f64, is_percussion: bool) -> Result<Self> {
        if chromatic_pc >= 12 {
            return Err(TonalError::InvalidNote(format!(
                "pitch class {chromatic_pc} outside 0..=11"
            )));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(TonalError::InvalidNote(format!(
                "duration must be positive, got {duration}"
            )));
        }
        Ok(NoteEvent {
            chromatic_pc,
            spelled_lof: None,
            duration,
            is_percussion,
        })
    }

    pub fn spelled(lof: LofIndex, duration: f64) -> Result<Self> {
        let mut ev = NoteEvent::new(lof.chromatic(), duration, false)?;
        ev.spelled_lof = Some(lof);
        Ok(ev)
    }
}

/// Duration-weighted distribution over the 35 line-of-fifths positions.
#[derive(Debug, Clone, PartialEq)]
pub struct LofDistribution {
    weights: [f64; LOF_SIZE],
}

impl LofDistribution {
    /// Normalises non-negative masses into a distribution. All-zero input is
    /// rejected.
    pub fn from_masses(masses: [f64; LOF_SIZE]) -> Result<Self> {
        let weights = normalize(&masses)?;
        Ok(LofDistribution {
            weights: weights.try_into().expect("length preserved"),
        })
    }

    pub fn point_mass(i: LofIndex) -> Self {
        let mut weights = [0.0; LOF_SIZE];
        weights[i.value()] = 1.0;
        LofDistribution { weights }
    }

    pub fn uniform() -> Self {
        LofDistribution {
            weights: [1.0 / LOF_SIZE as f64; LOF_SIZE],
        }
    }

    pub fn weights(&self) -> &[f64; LOF_SIZE] {
        &self.weights
    }

    pub fn get(&self, i: LofIndex) -> f64 {
        self.weights[i.value()]
    }
}

/// Duration-weighted distribution over the 12 chromatic pitch classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChromaticDistribution {
    weights: [f64; CHROMA_SIZE],
}

impl ChromaticDistribution {
    pub fn from_masses(masses: [f64; CHROMA_SIZE]) -> Result<Self> {
        let weights = normalize(&masses)?;
        Ok(ChromaticDistribution {
            weights: weights.try_into().expect("length preserved"),
        })
    }

    /// Builds the chromatic profile straight from note events (percussion
    /// excluded). Spelled notes contribute through their chromatic class.
    pub fn from_notes(notes: &[NoteEvent]) -> Result<Self> {
        let mut masses = [0.0; CHROMA_SIZE];
        for n in notes.iter().filter(|n| !n.is_percussion) {
            masses[n.chromatic_pc as usize] += n.duration;
        }
        ChromaticDistribution::from_masses(masses)
    }

    pub fn weights(&self) -> &[f64; CHROMA_SIZE] {
        &self.weights
    }
}

fn normalize(masses: &[f64]) -> Result<Vec<f64>> {
    if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(TonalError::InvalidNote(
            "distribution masses must be finite and non-negative".into(),
        ));
    }
    let total: f64 = masses.iter().sum();
    if total <= 0.0 {
        return Err(TonalError::EmptyInput);
    }
    Ok(masses.iter().map(|m| m / total).collect())
}

/// Proportion of total sounding duration at each line-of-fifths position.
/// Percussion is dropped; unspelled notes are spelled relative to `center`.
pub fn build_lof_distribution(notes: &[NoteEvent], center: LofIndex) -> Result<LofDistribution> {
    let mut masses = [0.0; LOF_SIZE];
    for n in notes.iter().filter(|n| !n.is_percussion) {
        let i = n
            .spelled_lof
            .unwrap_or_else(|| spell_chromatic(n.chromatic_pc, center));
        masses[i.value()] += n.duration;
    }
    LofDistribution::from_masses(masses)
}

/// Merges enharmonic spellings into chromatic pitch classes.
pub fn collapse_to_chromatic(d: &LofDistribution) -> ChromaticDistribution {
    let mut weights = [0.0; CHROMA_SIZE];
    for (i, w) in d.weights.iter().enumerate() {
        weights[lof_to_chromatic(LofIndex(i as u8)) as usize] += w;
    }
    ChromaticDistribution { weights }
}
