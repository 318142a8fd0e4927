//! Bias directions from word pairs and removal by orthogonal projection.

use rayon::prelude::*;

use crate::association::{check_dims, dot};
use crate::error::{Error, Result};
use crate::lexicon::WordPair;
use crate::store::{l2_norm, EmbeddingStore};

const ZERO_RESIDUAL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BiasDirection {
    /// Unit vector.
    pub direction: Vec<f64>,
    pub source_pair: WordPair,
    /// Mean projected test-pair distance, when chosen by [`select_projection`].
    pub selection_score: Option<f64>,
}

impl BiasDirection {
    pub fn dim(&self) -> usize {
        self.direction.len()
    }
}

/// Unit vector along `w1 - w2`.
pub fn bias_direction(pair: &WordPair, w1: &[f64], w2: &[f64]) -> Result<BiasDirection> {
    check_dims(w1, w2)?;
    let mut diff: Vec<f64> = w1.iter().zip(w2).map(|(a, b)| a - b).collect();
    let norm = l2_norm(&diff);
    if norm < ZERO_RESIDUAL {
        return Err(Error::IdenticalWords {
            left: pair.left.clone(),
            right: pair.right.clone(),
        });
    }
    diff.iter_mut().for_each(|x| *x /= norm);
    Ok(BiasDirection {
        direction: diff,
        source_pair: pair.clone(),
        selection_score: None,
    })
}

/// Builds the direction for `pair` from the words' rows in `store`.
/// Returns `Ok(None)` when either word is out of vocabulary.
pub fn pair_direction(pair: &WordPair, store: &EmbeddingStore) -> Result<Option<BiasDirection>> {
    match (store.lookup(&pair.left), store.lookup(&pair.right)) {
        (Some(l), Some(r)) => bias_direction(pair, l.components, r.components).map(Some),
        _ => Ok(None),
    }
}

/// Removes the component of `w` along `b` and rescales to unit length.
pub fn project_out(word: &str, w: &[f64], b: &BiasDirection) -> Result<Vec<f64>> {
    let mut out = w.to_vec();
    project_into(word, &mut out, &b.direction)?;
    Ok(out)
}

fn project_into(word: &str, w: &mut [f64], b: &[f64]) -> Result<()> {
    check_dims(w, b)?;
    let along = dot(w, b);
    w.iter_mut().zip(b).for_each(|(x, bi)| *x -= along * bi);
    let norm = l2_norm(w);
    if norm < ZERO_RESIDUAL {
        return Err(Error::Annihilated {
            tokens: vec![word.to_owned()],
        });
    }
    w.iter_mut().for_each(|x| *x /= norm);
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DebiasOutcome {
    pub store: EmbeddingStore,
    /// Words whose vectors were parallel to the direction. Only non-empty
    /// when `skip_annihilated` was set; those rows are dropped.
    pub annihilated: Vec<String>,
}

/// Projects every row of a normalized store off `b`.
pub fn debias_store(
    store: &EmbeddingStore,
    b: &BiasDirection,
    skip_annihilated: bool,
) -> Result<DebiasOutcome> {
    if store.dim() != b.dim() {
        return Err(Error::VectorDimension {
            left: store.dim(),
            right: b.dim(),
        });
    }
    let dim = store.dim();
    let mut data = store.raw().to_vec();
    let dead: Vec<bool> = data
        .par_chunks_mut(dim)
        .zip(store.words().par_iter())
        .map(|(row, word)| project_into(word, row, &b.direction).is_err())
        .collect();

    let annihilated: Vec<String> = store
        .words()
        .iter()
        .zip(&dead)
        .filter(|(_, &d)| d)
        .map(|(w, _)| w.clone())
        .collect();
    if annihilated.is_empty() {
        let words = store.words().to_vec();
        return Ok(DebiasOutcome {
            store: store.with_rows(words, data, true),
            annihilated,
        });
    }
    if !skip_annihilated {
        return Err(Error::Annihilated {
            tokens: annihilated,
        });
    }

    let mut words = Vec::with_capacity(store.len() - annihilated.len());
    let mut kept = Vec::with_capacity(words.capacity() * dim);
    for ((word, row), d) in store.words().iter().zip(data.chunks(dim)).zip(&dead) {
        if !d {
            words.push(word.clone());
            kept.extend_from_slice(row);
        }
    }
    if words.is_empty() {
        return Err(Error::Annihilated {
            tokens: annihilated,
        });
    }
    Ok(DebiasOutcome {
        store: store.with_rows(words, kept, true),
        annihilated,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum CandidateStatus {
    Scored(f64),
    OutOfVocabulary,
    Degenerate(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScore {
    pub pair: WordPair,
    pub status: CandidateStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub chosen: BiasDirection,
    pub chosen_index: usize,
    /// One entry per candidate, in input order.
    pub table: Vec<CandidateScore>,
    pub test_pairs_used: usize,
    /// Test pairs with a word outside the vocabulary.
    pub test_pairs_skipped: Vec<WordPair>,
}

/// Picks the candidate direction that brings the test pairs closest
/// together once projected out.
///
/// A candidate's score is the mean Euclidean distance between the
/// renormalized projections of each resolvable test pair. The lowest score
/// wins; ties go to the earlier candidate.
pub fn select_projection(
    candidates: &[WordPair],
    test_pairs: &[WordPair],
    store: &EmbeddingStore,
) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::NoUsableCandidates);
    }
    if let Some(c) = candidates
        .iter()
        .find(|c| test_pairs.iter().any(|t| t.same_words(c)))
    {
        return Err(Error::OverlappingPairs {
            left: c.left.clone(),
            right: c.right.clone(),
        });
    }

    let mut resolved = Vec::new();
    let mut skipped = Vec::new();
    for pair in test_pairs {
        match (store.lookup(&pair.left), store.lookup(&pair.right)) {
            (Some(l), Some(r)) => resolved.push((pair, l.components, r.components)),
            _ => skipped.push(pair.clone()),
        }
    }
    if resolved.is_empty() {
        return Err(Error::NoResolvableTestPairs);
    }

    let scored: Vec<(CandidateStatus, Option<BiasDirection>)> = candidates
        .par_iter()
        .map(|cand| {
            let dir = match pair_direction(cand, store) {
                Ok(Some(d)) => d,
                Ok(None) => return (CandidateStatus::OutOfVocabulary, None),
                Err(e) => return (CandidateStatus::Degenerate(e.to_string()), None),
            };
            match mean_pair_distance(&resolved, &dir) {
                Ok(score) => (CandidateStatus::Scored(score), Some(dir)),
                Err(e) => (CandidateStatus::Degenerate(e.to_string()), None),
            }
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (i, (status, _)) in scored.iter().enumerate() {
        if let CandidateStatus::Scored(s) = *status {
            if best.is_none_or(|(_, b)| s < b) {
                best = Some((i, s));
            }
        }
    }
    let (chosen_index, score) = best.ok_or(Error::NoUsableCandidates)?;

    let mut table = Vec::with_capacity(candidates.len());
    let mut chosen = None;
    for (i, (cand, (status, dir))) in candidates.iter().zip(scored).enumerate() {
        if i == chosen_index {
            chosen = dir;
        }
        table.push(CandidateScore {
            pair: cand.clone(),
            status,
        });
    }
    let mut chosen = chosen.expect("scored candidate carries its direction");
    chosen.selection_score = Some(score);

    Ok(Selection {
        chosen,
        chosen_index,
        table,
        test_pairs_used: resolved.len(),
        test_pairs_skipped: skipped,
    })
}

fn mean_pair_distance(pairs: &[(&WordPair, &[f64], &[f64])], b: &BiasDirection) -> Result<f64> {
    let mut distances = Vec::with_capacity(pairs.len());
    for (pair, l, r) in pairs {
        let pl = project_out(&pair.left, l, b)?;
        let pr = project_out(&pair.right, r, b)?;
        let d = pl
            .iter()
            .zip(&pr)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        distances.push(d);
    }
    // summing in sorted order makes the mean independent of test-pair order
    distances.sort_by(f64::total_cmp);
    Ok(distances.iter().sum::<f64>() / distances.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn pair(l: &str, r: &str) -> WordPair {
        WordPair::new(l, r)
    }

    #[test]
    fn direction_examples() {
        let b = bias_direction(&pair("a", "b"), &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((b.direction[0] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((b.direction[1] + FRAC_1_SQRT_2).abs() < 1e-15);

        let flipped = bias_direction(&pair("b", "a"), &[0.0, 1.0], &[1.0, 0.0]).unwrap();
        let negated: Vec<f64> = b.direction.iter().map(|x| -x).collect();
        assert_eq!(flipped.direction, negated);

        assert!(matches!(
            bias_direction(&pair("a", "b"), &[0.6, 0.8], &[0.6, 0.8]),
            Err(Error::IdenticalWords { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let b = BiasDirection {
            direction: vec![1.0, 0.0],
            source_pair: pair("x", "y"),
            selection_score: None,
        };
        assert_eq!(project_out("w", &[0.0, 1.0], &b).unwrap(), [0.0, 1.0]);
        assert_eq!(project_out("w", &[0.6, 0.8], &b).unwrap(), [0.0, 1.0]);
        match project_out("same", &[1.0, 0.0], &b) {
            Err(Error::Annihilated { tokens }) => assert_eq!(tokens, ["same"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn store(rows: &[(&str, &[f64])]) -> EmbeddingStore {
        let dim = rows[0].1.len();
        EmbeddingStore::from_rows(dim, rows.iter().map(|(w, v)| (*w, v.to_vec())))
            .unwrap()
            .0
            .normalize_all()
            .unwrap()
    }

    #[test]
    fn annihilated_rows_error_unless_skipped() {
        let s = store(&[("x", &[1.0, 0.0]), ("y", &[0.5, 0.5])]);
        let b = BiasDirection {
            direction: vec![1.0, 0.0],
            source_pair: pair("x", "z"),
            selection_score: None,
        };
        assert!(matches!(
            debias_store(&s, &b, false),
            Err(Error::Annihilated { tokens }) if tokens == ["x"]
        ));
        let out = debias_store(&s, &b, true).unwrap();
        assert_eq!(out.annihilated, ["x"]);
        assert_eq!(out.store.words(), ["y"]);
        assert_eq!(out.store.lookup("y").unwrap().components, &[0.0, 1.0]);
        assert!(out.store.lookup("x").is_none());
    }

    #[test]
    fn single_candidate_wins() {
        let s = store(&[
            ("he", &[1.0, 0.0, 1.0]),
            ("she", &[-1.0, 0.0, 1.0]),
            ("king", &[0.5, 1.0, 0.0]),
            ("queen", &[-0.5, 1.0, 0.0]),
        ]);
        let sel = select_projection(&[pair("he", "she")], &[pair("king", "queen")], &s).unwrap();
        assert_eq!(sel.chosen_index, 0);
        assert_eq!(sel.table.len(), 1);
        assert!(sel.chosen.selection_score.unwrap() < 1e-12);
    }

    #[test]
    fn selection_errors() {
        let s = store(&[("he", &[1.0, 0.0]), ("she", &[0.0, 1.0])]);
        assert!(matches!(
            select_projection(&[pair("he", "she")], &[pair("zz", "qq")], &s),
            Err(Error::NoResolvableTestPairs)
        ));
        assert!(matches!(
            select_projection(&[pair("he", "she")], &[pair("she", "he")], &s),
            Err(Error::OverlappingPairs { .. })
        ));
        let s = store(&[
            ("he", &[1.0, 0.0]),
            ("she", &[0.0, 1.0]),
            ("a", &[1.0, 1.0]),
            ("b", &[1.0, -1.0]),
        ]);
        assert!(matches!(
            select_projection(&[pair("zz", "she")], &[pair("a", "b")], &s),
            Err(Error::NoUsableCandidates)
        ));
    }

    #[test]
    fn tie_goes_to_first_candidate() {
        // axes 0 and 1 play symmetric roles for the single test pair
        let s = store(&[
            ("p", &[1.0, 0.0, 0.0]),
            ("q", &[-1.0, 0.0, 0.0]),
            ("r", &[0.0, 1.0, 0.0]),
            ("t", &[0.0, -1.0, 0.0]),
            ("u", &[1.0, 1.0, 1.0]),
            ("v", &[1.0, 1.0, -1.0]),
        ]);
        let sel =
            select_projection(&[pair("r", "t"), pair("p", "q")], &[pair("u", "v")], &s).unwrap();
        match (&sel.table[0].status, &sel.table[1].status) {
            (CandidateStatus::Scored(a), CandidateStatus::Scored(b)) => assert_eq!(a, b),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(sel.chosen_index, 0);
        assert_eq!(sel.chosen.source_pair, pair("r", "t"));
    }
}
