//! Archetype quadrants and group-level statistics over passing pieces.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Result, TonalError};
use crate::tdm::STEP_OFFSETS;

use super::analysis::PieceAnalysis;

/// Quadrants of the (focus, connection) plane split at the pooled medians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Archetype {
    /// High connection, low focus.
    #[serde(rename = "chromatic exploration")]
    ChromaticExploration,
    /// Low connection, high focus.
    #[serde(rename = "textural diatonicism")]
    TexturalDiatonicism,
    /// High connection, high focus.
    #[serde(rename = "systematic diatonicism")]
    SystematicDiatonicism,
    /// Low connection, low focus.
    #[serde(rename = "edge of tonality")]
    EdgeOfTonality,
}

impl Archetype {
    pub const ALL: [Archetype; 4] = [
        Archetype::ChromaticExploration,
        Archetype::TexturalDiatonicism,
        Archetype::SystematicDiatonicism,
        Archetype::EdgeOfTonality,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Archetype::ChromaticExploration => "chromatic exploration",
            Archetype::TexturalDiatonicism => "textural diatonicism",
            Archetype::SystematicDiatonicism => "systematic diatonicism",
            Archetype::EdgeOfTonality => "edge of tonality",
        }
    }

    /// Values equal to a median count as high.
    pub fn classify(focus: f64, connection: f64, medians: &Medians) -> Self {
        match (connection >= medians.connection, focus >= medians.focus_k3) {
            (true, false) => Archetype::ChromaticExploration,
            (false, true) => Archetype::TexturalDiatonicism,
            (true, true) => Archetype::SystematicDiatonicism,
            (false, false) => Archetype::EdgeOfTonality,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Medians {
    pub focus_k3: f64,
    pub connection: f64,
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_sd(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// `(mean_a - mean_b) / pooled SD`; `None` when either group has fewer than
/// two values or the pooled SD is zero up to rounding.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Option<f64> {
    let (n1, n2) = (a.len(), b.len());
    let (s1, s2) = (sample_sd(a)?, sample_sd(b)?);
    let pooled = (((n1 - 1) as f64 * s1 * s1 + (n2 - 1) as f64 * s2 * s2) / (n1 + n2 - 2) as f64).sqrt();
    let (m1, m2) = (mean(a)?, mean(b)?);
    // constant groups can leave a few ulps of spread from the mean
    if pooled <= 1e-12 * m1.abs().max(m2.abs()).max(1.0) {
        return None;
    }
    Some((m1 - m2) / pooled)
}

pub fn pearson_r(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x)?, mean(y)?);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Labels every passing piece by quadrant of the pooled medians; failing
/// pieces get no label.
pub fn classify_archetypes(analyses: &mut [PieceAnalysis]) -> Result<Medians> {
    let medians = pooled_medians(analyses)?;
    for a in analyses.iter_mut() {
        a.archetype = a
            .passes()
            .then(|| Archetype::classify(a.focus_k3, a.connection, &medians));
    }
    Ok(medians)
}

pub fn pooled_medians(analyses: &[PieceAnalysis]) -> Result<Medians> {
    let passing: Vec<&PieceAnalysis> = analyses.iter().filter(|a| a.passes()).collect();
    if passing.len() < 2 {
        return Err(TonalError::InsufficientData(format!(
            "{} passing pieces, at least 2 needed for medians",
            passing.len()
        )));
    }
    let focus: Vec<f64> = passing.iter().map(|a| a.focus_k3).collect();
    let connection: Vec<f64> = passing.iter().map(|a| a.connection).collect();
    Ok(Medians {
        focus_k3: median(&focus).expect("non-empty"),
        connection: median(&connection).expect("non-empty"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    FocusK3,
    Connection,
    FifthDominance,
    WeightEntropy,
    WeightKurtosis,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::FocusK3,
        Metric::Connection,
        Metric::FifthDominance,
        Metric::WeightEntropy,
        Metric::WeightKurtosis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::FocusK3 => "focus_k3",
            Metric::Connection => "connection",
            Metric::FifthDominance => "fifth_dominance",
            Metric::WeightEntropy => "weight_entropy",
            Metric::WeightKurtosis => "weight_kurtosis",
        }
    }

    pub fn value(self, a: &PieceAnalysis) -> Option<f64> {
        match self {
            Metric::FocusK3 => Some(a.focus_k3),
            Metric::Connection => Some(a.connection),
            Metric::FifthDominance => Some(a.weight_stats.fifth_dominance),
            Metric::WeightEntropy => Some(a.weight_stats.weight_entropy),
            Metric::WeightKurtosis => a.weight_stats.weight_kurtosis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub median: Option<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        Summary {
            n: values.len(),
            mean: mean(values),
            sd: sample_sd(values),
            median: median(values),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepSummary {
    pub step: i64,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupStats {
    pub group: String,
    pub n_analyzed: usize,
    pub n_passing: usize,
    pub metrics: BTreeMap<Metric, Summary>,
    /// Pearson r between focus_k3 and connection.
    pub focus_connection_r: Option<f64>,
    pub archetype_counts: BTreeMap<Archetype, usize>,
    pub archetype_shares: BTreeMap<Archetype, f64>,
    /// Mean fitted weight per step, ± SD.
    pub weight_profile: Vec<StepSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectSize {
    pub metric: Metric,
    pub group_a: String,
    pub group_b: String,
    /// Cohen's d of a over b.
    pub d: Option<f64>,
}

/// Mean position of all passing pieces sharing one metadata value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatePoint {
    pub field: String,
    pub value: String,
    pub group: String,
    pub n: usize,
    pub mean_focus_k3: f64,
    pub mean_connection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub medians: Option<Medians>,
    pub groups: Vec<GroupStats>,
    pub effect_sizes: Vec<EffectSize>,
    pub aggregates: Vec<AggregatePoint>,
}

/// Group summaries, pairwise effect sizes, focus/connection correlation and
/// metadata aggregates, computed over passing pieces in id order.
pub fn corpus_stats(analyses: &[PieceAnalysis], group_by: Option<&str>) -> CorpusStats {
    let mut sorted: Vec<&PieceAnalysis> = analyses.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));

    let mut by_group: BTreeMap<&str, Vec<&PieceAnalysis>> = BTreeMap::new();
    for a in &sorted {
        by_group.entry(a.group.as_str()).or_default().push(a);
    }

    let values = |pieces: &[&PieceAnalysis], m: Metric| -> Vec<f64> {
        pieces.iter().filter(|a| a.passes()).filter_map(|a| m.value(a)).collect()
    };

    let groups: Vec<GroupStats> = by_group
        .iter()
        .map(|(name, pieces)| {
            let passing: Vec<&PieceAnalysis> = pieces.iter().copied().filter(|a| a.passes()).collect();
            let metrics = Metric::ALL
                .iter()
                .map(|&m| (m, Summary::of(&values(pieces, m))))
                .collect();
            let focus: Vec<f64> = passing.iter().map(|a| a.focus_k3).collect();
            let connection: Vec<f64> = passing.iter().map(|a| a.connection).collect();

            let mut archetype_counts: BTreeMap<Archetype, usize> =
                Archetype::ALL.iter().map(|&a| (a, 0)).collect();
            for a in passing.iter().filter_map(|a| a.archetype) {
                *archetype_counts.entry(a).or_default() += 1;
            }
            let labelled: usize = archetype_counts.values().sum();
            let archetype_shares = archetype_counts
                .iter()
                .filter(|_| labelled > 0)
                .map(|(&k, &c)| (k, c as f64 / labelled as f64))
                .collect();

            let weight_profile = STEP_OFFSETS
                .iter()
                .enumerate()
                .map(|(j, &step)| {
                    let w: Vec<f64> = passing.iter().map(|a| a.fit.params.weights[j]).collect();
                    StepSummary {
                        step,
                        mean: mean(&w),
                        sd: sample_sd(&w),
                    }
                })
                .collect();

            GroupStats {
                group: name.to_string(),
                n_analyzed: pieces.len(),
                n_passing: passing.len(),
                metrics,
                focus_connection_r: pearson_r(&focus, &connection),
                archetype_counts,
                archetype_shares,
                weight_profile,
            }
        })
        .collect();

    let names: Vec<&str> = by_group.keys().copied().collect();
    let mut effect_sizes = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            for m in Metric::ALL {
                effect_sizes.push(EffectSize {
                    metric: m,
                    group_a: a.to_string(),
                    group_b: b.to_string(),
                    d: cohens_d(&values(&by_group[a], m), &values(&by_group[b], m)),
                });
            }
        }
    }

    let aggregates = group_by
        .map(|field| aggregate_by(&sorted, field))
        .unwrap_or_default();

    CorpusStats {
        medians: pooled_medians(analyses).ok(),
        groups,
        effect_sizes,
        aggregates,
    }
}

fn aggregate_by(sorted: &[&PieceAnalysis], field: &str) -> Vec<AggregatePoint> {
    let mut cells: BTreeMap<(&str, &str), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for a in sorted.iter().filter(|a| a.passes()) {
        let value = if field == "group" {
            Some(a.group.as_str())
        } else {
            a.metadata.get(field).map(String::as_str)
        };
        if let Some(v) = value {
            let cell = cells.entry((v, a.group.as_str())).or_default();
            cell.0.push(a.focus_k3);
            cell.1.push(a.connection);
        }
    }
    cells
        .into_iter()
        .map(|((value, group), (focus, connection))| AggregatePoint {
            field: field.to_string(),
            value: value.to_string(),
            group: group.to_string(),
            n: focus.len(),
            mean_focus_k3: mean(&focus).expect("non-empty cell"),
            mean_connection: mean(&connection).expect("non-empty cell"),
        })
        .collect()
}
