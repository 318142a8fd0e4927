//! Serializable report payloads and their CSV layouts.
//!
//! Every number goes through [`Real`], so JSON carries 9 significant
//! digits. Field order is fixed by declaration order. Nothing here holds
//! timestamps; run metadata goes to a separate sidecar.

use embias::association::BatteryResult;
use embias::debias::{CandidateStatus, Selection};
use embias::{Category, CorrelationResult, EmbeddingStore, LoadSummary};
use serde::Serialize;

use crate::io::{fmt_num, Real};

pub const SCHEMA_VERSION: &str = "1";
pub const GAP_SPACE: &str = "association";
pub const SELECTION_METRIC: &str =
    "mean euclidean distance between renormalized projected test-pair vectors";

pub const BATTERY_CSV_HEADER: [&str; 3] = ["word", "score_a", "score_b"];
pub const ASSOC_CSV_HEADER: [&str; 3] = ["word", "category", "score"];
pub const OCCUPATION_CSV_HEADER: [&str; 5] = [
    "occupation",
    "score_male",
    "score_female",
    "gender_score",
    "ratio",
];
pub const SELECTION_CSV_HEADER: [&str; 5] = ["left", "right", "status", "score", "selected"];

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingInfo {
    pub path: String,
    pub dimension: usize,
    pub vocab_size: usize,
    pub duplicates_dropped: usize,
}

impl EmbeddingInfo {
    pub fn new(path: &str, store: &EmbeddingStore, summary: &LoadSummary) -> Self {
        Self {
            path: path.to_owned(),
            dimension: store.dim(),
            vocab_size: store.len(),
            duplicates_dropped: summary.duplicates,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CategoryInfo {
    pub name: String,
    pub patterns: usize,
    pub resolved: usize,
    pub missing: Vec<String>,
}

impl From<&Category> for CategoryInfo {
    fn from(c: &Category) -> Self {
        Self {
            name: c.name.clone(),
            patterns: c.patterns.len(),
            resolved: c.resolved.len(),
            missing: c.missing.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetSummary {
    pub label: String,
    pub words: usize,
    pub found: usize,
    pub coverage: Real,
    pub missing: Vec<String>,
    /// Target words that are also attribute words.
    pub overlaps: Vec<String>,
    pub centroid: [Real; 2],
}

impl From<&BatteryResult> for TargetSummary {
    fn from(r: &BatteryResult) -> Self {
        let (x, y) = r.centroid();
        Self {
            label: r.target_label.clone(),
            words: r.points.len() + r.missing.len(),
            found: r.points.len(),
            coverage: Real(r.coverage),
            missing: r.missing.clone(),
            overlaps: r.overlaps.clone(),
            centroid: [Real(x), Real(y)],
        }
    }
}

pub fn battery_rows(r: &BatteryResult) -> Vec<Vec<String>> {
    r.points
        .iter()
        .map(|p| vec![p.word.clone(), fmt_num(p.score_a), fmt_num(p.score_b)])
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GapEntry {
    pub a: String,
    pub b: String,
    pub space: &'static str,
    pub gap_before: Real,
    pub gap_after: Option<Real>,
    pub reduction_percent: Option<Real>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub name: String,
    pub attribute_a: String,
    pub attribute_b: String,
    pub gender_related: bool,
    pub before: Vec<TargetSummary>,
    pub after: Option<Vec<TargetSummary>>,
    pub gaps: Vec<GapEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupationRow {
    pub occupation: String,
    pub score_male: f64,
    pub score_female: f64,
    pub gender_score: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OccupationRowOut {
    pub occupation: String,
    pub score_male: Real,
    pub score_female: Real,
    pub gender_score: Real,
    pub ratio: Real,
}

impl From<&OccupationRow> for OccupationRowOut {
    fn from(r: &OccupationRow) -> Self {
        Self {
            occupation: r.occupation.clone(),
            score_male: Real(r.score_male),
            score_female: Real(r.score_female),
            gender_score: Real(r.gender_score),
            ratio: Real(r.ratio),
        }
    }
}

pub fn occupation_rows(rows: &[OccupationRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.occupation.clone(),
                fmt_num(r.score_male),
                fmt_num(r.score_female),
                fmt_num(r.gender_score),
                fmt_num(r.ratio),
            ]
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Correlation {
    pub pairing: &'static str,
    pub rho: Real,
    pub p_value: Real,
    pub n: usize,
}

impl Correlation {
    pub fn new(pairing: &'static str, c: &CorrelationResult) -> Self {
        Self {
            pairing,
            rho: Real(c.rho),
            p_value: Real(c.p_value),
            n: c.n,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OccupationReport {
    pub male_category: String,
    pub female_category: String,
    pub occupations: usize,
    pub used: usize,
    pub missing: Vec<String>,
    pub table: Vec<OccupationRowOut>,
    pub correlations: Vec<Correlation>,
    pub top_male: Vec<String>,
    pub top_female: Vec<String>,
}

impl OccupationReport {
    pub fn correlation(&self, pairing: &str) -> Option<&Correlation> {
        self.correlations.iter().find(|c| c.pairing == pairing)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateRow {
    pub left: String,
    pub right: String,
    pub status: &'static str,
    pub score: Option<Real>,
    pub detail: Option<String>,
    pub selected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairOut {
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DebiasReport {
    pub metric: &'static str,
    pub candidates: Vec<CandidateRow>,
    pub selected: PairOut,
    pub selection_score: Real,
    pub test_pairs_used: usize,
    pub test_pairs_skipped: Vec<String>,
    pub annihilated: Vec<String>,
}

impl DebiasReport {
    pub fn new(sel: &Selection, annihilated: Vec<String>) -> Self {
        let candidates = sel
            .table
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let (status, score, detail) = match &c.status {
                    CandidateStatus::Scored(s) => ("scored", Some(Real(*s)), None),
                    CandidateStatus::OutOfVocabulary => ("out_of_vocabulary", None, None),
                    CandidateStatus::Degenerate(why) => ("degenerate", None, Some(why.clone())),
                };
                CandidateRow {
                    left: c.pair.left.clone(),
                    right: c.pair.right.clone(),
                    status,
                    score,
                    detail,
                    selected: i == sel.chosen_index,
                }
            })
            .collect();
        Self {
            metric: SELECTION_METRIC,
            candidates,
            selected: PairOut {
                left: sel.chosen.source_pair.left.clone(),
                right: sel.chosen.source_pair.right.clone(),
            },
            selection_score: Real(sel.chosen.selection_score.unwrap_or(f64::NAN)),
            test_pairs_used: sel.test_pairs_used,
            test_pairs_skipped: sel
                .test_pairs_skipped
                .iter()
                .map(|p| p.to_string())
                .collect(),
            annihilated,
        }
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.candidates
            .iter()
            .map(|c| {
                vec![
                    c.left.clone(),
                    c.right.clone(),
                    c.status.to_owned(),
                    c.score.map(|s| fmt_num(s.0)).unwrap_or_default(),
                    c.selected.to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub schema_version: &'static str,
    pub embedding: EmbeddingInfo,
    pub categories: Vec<CategoryInfo>,
    pub batteries: Vec<BatteryReport>,
    pub occupations_before: Option<OccupationReport>,
    pub occupations_after: Option<OccupationReport>,
    pub debias: DebiasReport,
}
