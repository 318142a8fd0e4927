//! Word-to-word and word-to-set association scores.
//!
//! A word's association with a set is the cosine between the word's unit
//! vector and the unit-normalized mean of the set's vectors. A battery runs
//! that against two attribute sets for every word of one or more target
//! lists, giving each word a point `(score_a, score_b)` in the plane.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lexicon::Category;
use crate::store::{l2_norm, EmbeddingStore, WordVector};

const DEGENERATE_NORM: f64 = 1e-10;

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a, b)?;
    Ok(dot(a, b))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::VectorDimension {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Mean of `vectors`, scaled to unit length.
pub fn centroid<'a, I>(vectors: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut iter = vectors.into_iter();
    let first = iter.next().ok_or(Error::EmptySet)?;
    let mut sum = first.to_vec();
    let mut count = 1usize;
    for v in iter {
        check_dims(&sum, v)?;
        sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
        count += 1;
    }
    sum.iter_mut().for_each(|s| *s /= count as f64);
    let norm = l2_norm(&sum);
    if norm < DEGENERATE_NORM {
        return Err(Error::DegenerateSet { norm });
    }
    sum.iter_mut().for_each(|s| *s /= norm);
    Ok(sum)
}

/// A category reduced to its unit centroid in one store.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSet {
    pub name: String,
    pub centroid: Vec<f64>,
}

impl AttributeSet {
    /// Rows are summed in store order, so the centroid does not depend on
    /// the order words were listed in the category file.
    pub fn new(category: &Category, store: &EmbeddingStore) -> Result<Self> {
        let mut rows: Vec<usize> = category
            .resolved
            .iter()
            .filter_map(|w| store.index_of(w))
            .collect();
        rows.sort_unstable();
        rows.dedup();
        let centroid = centroid(rows.iter().map(|&i| store.row(i).components))?;
        Ok(Self {
            name: category.name.clone(),
            centroid,
        })
    }

    pub fn score(&self, word: &[f64]) -> Result<f64> {
        cosine(word, &self.centroid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRecord {
    pub word: String,
    pub category: String,
    pub score: f64,
}

pub fn assoc_word_set(
    word: WordVector<'_>,
    category: &Category,
    store: &EmbeddingStore,
) -> Result<AssociationRecord> {
    let set = AttributeSet::new(category, store)?;
    Ok(AssociationRecord {
        word: word.word.to_owned(),
        category: category.name.clone(),
        score: set.score(word.components)?,
    })
}

/// A labelled list of words to be measured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetList {
    pub label: String,
    pub words: Vec<String>,
}

impl TargetList {
    pub fn new(label: impl Into<String>, words: Vec<String>) -> Self {
        Self {
            label: label.into(),
            words,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryPoint {
    /// The word as written in the target list.
    pub word: String,
    /// The vocabulary token it resolved to.
    pub token: String,
    pub score_a: f64,
    pub score_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryResult {
    pub target_label: String,
    pub points: Vec<BatteryPoint>,
    /// Target words not in the vocabulary, in input order.
    pub missing: Vec<String>,
    /// Fraction of target words found in the vocabulary.
    pub coverage: f64,
    /// Target tokens that are also members of an attribute category.
    pub overlaps: Vec<String>,
}

impl BatteryResult {
    pub fn coordinates(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.score_a, p.score_b)).collect()
    }

    /// Arithmetic mean of the points.
    pub fn centroid(&self) -> (f64, f64) {
        mean_point(&self.coordinates()).unwrap_or((f64::NAN, f64::NAN))
    }
}

/// Scores every in-vocabulary target word against both attribute sets.
pub fn run_battery(
    targets: &[TargetList],
    attribute_a: &Category,
    attribute_b: &Category,
    store: &EmbeddingStore,
) -> Result<Vec<BatteryResult>> {
    let set_a = AttributeSet::new(attribute_a, store)?;
    let set_b = AttributeSet::new(attribute_b, store)?;
    targets
        .iter()
        .map(|list| score_list(list, &set_a, &set_b, attribute_a, attribute_b, store))
        .collect()
}

fn score_list(
    list: &TargetList,
    set_a: &AttributeSet,
    set_b: &AttributeSet,
    cat_a: &Category,
    cat_b: &Category,
    store: &EmbeddingStore,
) -> Result<BatteryResult> {
    let scored: Vec<std::result::Result<BatteryPoint, String>> = list
        .words
        .par_iter()
        .map(|word| match store.lookup(word) {
            Some(v) => Ok(BatteryPoint {
                word: word.clone(),
                token: v.word.to_owned(),
                score_a: dot(v.components, &set_a.centroid),
                score_b: dot(v.components, &set_b.centroid),
            }),
            None => Err(word.clone()),
        })
        .collect();

    check_dims(store.row(0).components, &set_a.centroid)?;
    check_dims(store.row(0).components, &set_b.centroid)?;

    let mut points = Vec::new();
    let mut missing = Vec::new();
    for s in scored {
        match s {
            Ok(p) => points.push(p),
            Err(w) => missing.push(w),
        }
    }
    if points.is_empty() {
        return Err(Error::NoTargetsInVocabulary {
            list: list.label.clone(),
        });
    }
    let mut seen = std::collections::HashSet::new();
    let overlaps: Vec<String> = points
        .iter()
        .filter(|p| cat_a.contains(&p.token) || cat_b.contains(&p.token))
        .filter(|p| seen.insert(p.token.as_str()))
        .map(|p| p.token.clone())
        .collect();

    Ok(BatteryResult {
        target_label: list.label.clone(),
        coverage: points.len() as f64 / list.words.len() as f64,
        points,
        missing,
        overlaps,
    })
}

fn mean_point(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x, sy + y));
    Ok((sx / n, sy / n))
}

/// Euclidean distance between the mean points of two sets.
pub fn centroid_gap(points_a: &[(f64, f64)], points_b: &[(f64, f64)]) -> Result<f64> {
    let (ax, ay) = mean_point(points_a)?;
    let (bx, by) = mean_point(points_b)?;
    Ok((ax - bx).hypot(ay - by))
}
