//! Corpus inclusion rules.
//!
//! Boundary convention: a piece passes at exactly 5 unique pitch classes,
//! at pitch entropy exactly 1.5 or 3.2 bits, at a largest pitch-class share
//! of exactly 0.5, and at focus exactly 0.3. Only strictly worse values fail.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::pitch_space::ChromaticDistribution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterRules {
    pub min_unique_pcs: usize,
    pub min_pitch_entropy_bits: f64,
    pub max_pitch_entropy_bits: f64,
    pub max_single_pc_share: f64,
    pub min_focus_k3: f64,
    /// Lower-case genre names; matched case-insensitively against the
    /// `genre` metadata field.
    pub excluded_genres: BTreeSet<String>,
}

impl Default for FilterRules {
    fn default() -> Self {
        FilterRules {
            min_unique_pcs: 5,
            min_pitch_entropy_bits: 1.5,
            max_pitch_entropy_bits: 3.2,
            max_single_pc_share: 0.5,
            min_focus_k3: 0.3,
            excluded_genres: ["classical", "jazz", "blues", "new age"]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterRule {
    MinUniquePcs,
    PitchEntropy,
    MaxSinglePcShare,
    MinFocus,
    ExcludedGenre,
}

impl FilterRule {
    pub fn tag(self) -> &'static str {
        match self {
            FilterRule::MinUniquePcs => "min_unique_pcs",
            FilterRule::PitchEntropy => "pitch_entropy",
            FilterRule::MaxSinglePcShare => "max_single_pc_share",
            FilterRule::MinFocus => "min_focus",
            FilterRule::ExcludedGenre => "excluded_genre",
        }
    }
}

/// Quantities the rules are evaluated on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterInputs {
    pub unique_pcs: usize,
    pub pitch_entropy_bits: f64,
    pub max_pc_share: f64,
    pub focus_k3: f64,
    pub genre: Option<String>,
}

impl FilterInputs {
    pub fn new(profile: &ChromaticDistribution, focus_k3: f64, metadata: &BTreeMap<String, String>) -> Self {
        let w = profile.weights();
        FilterInputs {
            unique_pcs: w.iter().filter(|&&v| v > 0.0).count(),
            pitch_entropy_bits: pitch_entropy_bits(profile),
            max_pc_share: w.iter().cloned().fold(0.0, f64::max),
            focus_k3,
            genre: metadata.get("genre").cloned(),
        }
    }
}

/// Shannon entropy of the chromatic distribution, in bits.
pub fn pitch_entropy_bits(profile: &ChromaticDistribution) -> f64 {
    -profile
        .weights()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|p| p * p.log2())
        .sum::<f64>()
}

/// Failed rules, in [`FilterRule`] order. Empty means the piece passes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FilterVerdict {
    pub failed: Vec<FilterRule>,
}

impl FilterVerdict {
    pub fn passes(&self) -> bool {
        self.failed.is_empty()
    }

    /// `pass` or the failed tags joined with `+`.
    pub fn label(&self) -> String {
        if self.passes() {
            "pass".to_string()
        } else {
            self.failed.iter().map(|r| r.tag()).collect::<Vec<_>>().join("+")
        }
    }
}

/// Evaluates every rule; nothing short-circuits.
pub fn apply_filters(inputs: &FilterInputs, rules: &FilterRules) -> FilterVerdict {
    let checks = [
        (FilterRule::MinUniquePcs, inputs.unique_pcs < rules.min_unique_pcs),
        (
            FilterRule::PitchEntropy,
            inputs.pitch_entropy_bits < rules.min_pitch_entropy_bits
                || inputs.pitch_entropy_bits > rules.max_pitch_entropy_bits,
        ),
        (FilterRule::MaxSinglePcShare, inputs.max_pc_share > rules.max_single_pc_share),
        (FilterRule::MinFocus, inputs.focus_k3 < rules.min_focus_k3),
        (
            FilterRule::ExcludedGenre,
            inputs.genre.as_ref().is_some_and(|g| {
                rules.excluded_genres.iter().any(|x| x.eq_ignore_ascii_case(g.trim()))
            }),
        ),
    ];
    FilterVerdict {
        failed: checks
            .into_iter()
            .filter(|(_, failed)| *failed)
            .map(|(rule, _)| rule)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn passing() -> FilterInputs {
        FilterInputs {
            unique_pcs: 7,
            pitch_entropy_bits: 2.5,
            max_pc_share: 0.3,
            focus_k3: 0.8,
            genre: Some("Rock".into()),
        }
    }

    fn fails(inputs: FilterInputs) -> Vec<FilterRule> {
        apply_filters(&inputs, &FilterRules::default()).failed
    }

    #[test]
    fn defaults_pass_a_typical_piece() {
        assert!(fails(passing()).is_empty());
    }

    #[test]
    fn boundaries_are_inclusive() {
        let r = FilterRules::default();
        for (inputs, expect_fail) in [
            (FilterInputs { unique_pcs: 5, ..passing() }, vec![]),
            (FilterInputs { unique_pcs: 4, ..passing() }, vec![FilterRule::MinUniquePcs]),
            (FilterInputs { pitch_entropy_bits: 1.5, ..passing() }, vec![]),
            (FilterInputs { pitch_entropy_bits: 3.2, ..passing() }, vec![]),
            (
                FilterInputs { pitch_entropy_bits: 1.5 - 1e-12, ..passing() },
                vec![FilterRule::PitchEntropy],
            ),
            (
                FilterInputs { pitch_entropy_bits: 3.2 + 1e-12, ..passing() },
                vec![FilterRule::PitchEntropy],
            ),
            (FilterInputs { max_pc_share: 0.5, ..passing() }, vec![]),
            (
                FilterInputs { max_pc_share: 0.5 + 1e-12, ..passing() },
                vec![FilterRule::MaxSinglePcShare],
            ),
            (FilterInputs { focus_k3: 0.3, ..passing() }, vec![]),
            (FilterInputs { focus_k3: 0.3 - 1e-12, ..passing() }, vec![FilterRule::MinFocus]),
        ] {
            assert_eq!(apply_filters(&inputs, &r).failed, expect_fail, "{inputs:?}");
        }
    }

    #[test]
    fn genre_exclusion_is_case_insensitive() {
        for g in ["Jazz", "NEW AGE", "classical", " blues "] {
            assert_eq!(
                fails(FilterInputs { genre: Some(g.into()), ..passing() }),
                vec![FilterRule::ExcludedGenre]
            );
        }
        assert!(fails(FilterInputs { genre: None, ..passing() }).is_empty());
    }

    #[test]
    fn all_failures_are_reported() {
        let inputs = FilterInputs {
            unique_pcs: 1,
            pitch_entropy_bits: 0.0,
            max_pc_share: 1.0,
            focus_k3: 0.1,
            genre: Some("jazz".into()),
        };
        let v = apply_filters(&inputs, &FilterRules::default());
        assert_eq!(v.failed.len(), 5);
        assert_eq!(
            v.label(),
            "min_unique_pcs+pitch_entropy+max_single_pc_share+min_focus+excluded_genre"
        );
    }

    #[test]
    fn profile_derived_inputs() {
        let uniform = ChromaticDistribution::from_masses([1.0; 12]).unwrap();
        let inputs = FilterInputs::new(&uniform, 0.5, &BTreeMap::new());
        assert!((inputs.pitch_entropy_bits - 12f64.log2()).abs() < 1e-12);
        assert_eq!(fails(inputs), vec![FilterRule::PitchEntropy]);

        // entropy of (1/2, 1/4, 1/4) is exactly 1.5 bits
        let mut m = [0.0; 12];
        m[0] = 2.0;
        m[7] = 1.0;
        m[5] = 1.0;
        let p = ChromaticDistribution::from_masses(m).unwrap();
        let inputs = FilterInputs::new(&p, 1.0, &BTreeMap::new());
        assert_eq!(inputs.pitch_entropy_bits, 1.5);
        assert_eq!(inputs.unique_pcs, 3);
        assert_eq!(inputs.max_pc_share, 0.5);
        assert_eq!(fails(inputs), vec![FilterRule::MinUniquePcs]);

        let mut m = [0.0; 12];
        m[0] = 0.6;
        for pc in [2, 4, 5, 7] {
            m[pc] = 0.1;
        }
        let p = ChromaticDistribution::from_masses(m).unwrap();
        let inputs = FilterInputs::new(&p, 1.0, &BTreeMap::new());
        assert!(fails(inputs).contains(&FilterRule::MaxSinglePcShare));
    }
}
