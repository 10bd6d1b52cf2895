use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use crate::error::Result;
use crate::key_estimation::{estimate_key, TonalCenter};
use crate::metrics::{self, FocusProfile, WeightStats, PRIMARY_FOCUS_K};
use crate::pitch_space::{build_lof_distribution, ChromaticDistribution, LofDistribution};
use crate::tdm::{self, TdmFit};

use super::filters::{apply_filters, FilterInputs, FilterRules, FilterVerdict};
use super::stats::Archetype;
use super::PieceRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub k_range: RangeInclusive<usize>,
    pub rules: FilterRules,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            k_range: 2..=7,
            rules: FilterRules::default(),
        }
    }
}

/// Everything computed for one piece.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceAnalysis {
    pub id: String,
    pub group: String,
    pub metadata: BTreeMap<String, String>,
    pub center: TonalCenter,
    /// Krumhansl-Schmuckler correlation when the key was estimated.
    pub key_correlation: Option<f64>,
    pub distribution: LofDistribution,
    pub chromatic: ChromaticDistribution,
    pub focus_k3: f64,
    pub focus_profile: FocusProfile,
    pub connection: f64,
    pub fit: TdmFit,
    pub weight_stats: WeightStats,
    pub filter_inputs: FilterInputs,
    pub filter_verdict: FilterVerdict,
    pub archetype: Option<Archetype>,
}

impl PieceAnalysis {
    pub fn passes(&self) -> bool {
        self.filter_verdict.passes()
    }
}

/// Key (annotated, or estimated from the chromatic profile), line-of-fifths
/// distribution, focus profile, model fit, weight statistics and filter
/// verdict for one piece.
pub fn analyze_piece(piece: &PieceRecord, opts: &AnalysisOptions) -> Result<PieceAnalysis> {
    let chromatic = ChromaticDistribution::from_notes(&piece.notes)?;
    let (center, key_correlation) = match piece.annotated_key {
        Some(k) => (k, None),
        None => {
            let est = estimate_key(&chromatic)?;
            (est.center, Some(est.correlation))
        }
    };
    let distribution = build_lof_distribution(&piece.notes, center.lof_index)?;
    let focus_k3 = metrics::tonal_focus(&distribution, &center, PRIMARY_FOCUS_K)?;
    let focus_profile = FocusProfile::compute(&distribution, &center, opts.k_range.clone())?;
    let filter_inputs = FilterInputs::new(&chromatic, focus_k3, &piece.metadata);
    let filter_verdict = apply_filters(&filter_inputs, &opts.rules);
    let fit = tdm::fit(&distribution, &center)?;
    let weight_stats = metrics::weight_stats(&fit.params.weights)?;
    Ok(PieceAnalysis {
        id: piece.id.clone(),
        group: piece.group.clone(),
        metadata: piece.metadata.clone(),
        center,
        key_correlation,
        distribution,
        chromatic,
        focus_k3,
        focus_profile,
        connection: metrics::tonal_connection(&fit).value,
        fit,
        weight_stats,
        filter_inputs,
        filter_verdict,
        archetype: None,
    })
}
