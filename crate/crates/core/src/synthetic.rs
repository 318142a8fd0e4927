//! Synthetic stores with known geometry, for tests and demos.
//!
//! [`PlantedFixture`] lays its vocabulary out on named axes:
//!
//! | axis | role |
//! |------|------|
//! | 0 | planted gender contrast (`he`/`she`, every test pair, male/female terms) |
//! | 1 | decoy contrast (`up`/`down`) |
//! | 2, 3, 4 | shared offsets for `he`/`she`, `up`/`down`, test pairs |
//! | 5 | weak secondary signal, uncorrelated with the occupation ratios |
//! | 6, 7 | work / family |
//! | 8.. | random content |
//!
//! Occupation vectors have axis-0 component exactly linear in their
//! male ratio, and axis-5 component orthogonal (as a sample) to it, so the
//! gender score tracks the ratio before debiasing and is uncorrelated with
//! it afterwards.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lexicon::{OccupationRecord, WordPair};
use crate::store::EmbeddingStore;

pub const GENDER_AXIS: usize = 0;
pub const DECOY_AXIS: usize = 1;
const SECONDARY_AXIS: usize = 5;
const WORK_AXIS: usize = 6;
const FAMILY_AXIS: usize = 7;
const CONTENT_START: usize = 8;

/// `n_words` random unit vectors named `w0000`, `w0001`, ...
pub fn random_store(n_words: usize, dim: usize, seed: u64) -> EmbeddingStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n_words).map(|i| {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        (format!("w{i:04}"), v)
    });
    EmbeddingStore::from_rows(dim, rows)
        .expect("rows have the declared dimension")
        .0
        .normalize_all()
        .expect("random rows are non-zero")
}

#[derive(Debug, Clone)]
pub struct PlantedFixture {
    /// Raw (unnormalized) rows in store order.
    pub rows: Vec<(String, Vec<f64>)>,
    pub dim: usize,
    /// `he/she` (axis 0) first, then `up/down` (axis 1).
    pub candidates: Vec<WordPair>,
    pub test_pairs: Vec<WordPair>,
    pub male_terms: Vec<String>,
    pub female_terms: Vec<String>,
    pub work_terms: Vec<String>,
    pub family_terms: Vec<String>,
    pub male_names: Vec<String>,
    pub female_names: Vec<String>,
    pub occupations: Vec<OccupationRecord>,
}

const TEST_PAIRS: [(&str, &str); 6] = [
    ("king", "queen"),
    ("father", "mother"),
    ("son", "daughter"),
    ("uncle", "aunt"),
    ("boy", "girl"),
    ("brother", "sister"),
];
const MALE_TERMS: [&str; 4] = ["man", "male", "men", "masculine"];
const FEMALE_TERMS: [&str; 4] = ["woman", "female", "women", "feminine"];
const WORK_TERMS: [&str; 4] = ["work", "career", "office", "salary"];
const FAMILY_TERMS: [&str; 4] = ["family", "home", "parents", "children"];
const MALE_NAMES: [&str; 4] = ["john", "paul", "mike", "kevin"];
const FEMALE_NAMES: [&str; 4] = ["amy", "joan", "lisa", "sarah"];
const OCCUPATIONS: [&str; 20] = [
    "engineer",
    "nurse",
    "pilot",
    "teacher",
    "plumber",
    "librarian",
    "surgeon",
    "dancer",
    "mechanic",
    "secretary",
    "farmer",
    "midwife",
    "electrician",
    "receptionist",
    "carpenter",
    "hairdresser",
    "chef",
    "cleaner",
    "architect",
    "designer",
];

impl PlantedFixture {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(
            dim >= CONTENT_START + 4,
            "planted fixture needs at least 12 dimensions"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
        let axis = |i: usize, x: f64, v: &mut Vec<f64>| v[i] += x;
        let content = |scale: f64, rng: &mut ChaCha8Rng| -> Vec<f64> {
            let mut v = vec![0.0; dim];
            for x in &mut v[CONTENT_START..] {
                *x = scale * rng.gen_range(-1.0..1.0);
            }
            v
        };

        let push = |rows: &mut Vec<(String, Vec<f64>)>, w: &str, v: Vec<f64>| {
            rows.push((w.to_owned(), v));
        };

        for (word, sign, offset_axis, contrast_axis) in [
            ("he", 1.0, 2, GENDER_AXIS),
            ("she", -1.0, 2, GENDER_AXIS),
            ("up", 1.0, 3, DECOY_AXIS),
            ("down", -1.0, 3, DECOY_AXIS),
        ] {
            let mut v = vec![0.0; dim];
            axis(contrast_axis, sign, &mut v);
            axis(offset_axis, 1.0, &mut v);
            push(&mut rows, word, v);
        }

        for (m, f) in TEST_PAIRS {
            let shared = content(0.3, &mut rng);
            for (w, sign) in [(m, 1.0), (f, -1.0)] {
                let mut v = shared.clone();
                axis(GENDER_AXIS, 0.6 * sign, &mut v);
                axis(4, 1.0, &mut v);
                push(&mut rows, w, v);
            }
        }

        let gamma = 0.2;
        for (m, f) in MALE_TERMS.iter().zip(FEMALE_TERMS) {
            let shared = content(0.4, &mut rng);
            for (w, sign) in [(*m, 1.0), (f, -1.0)] {
                let mut v = shared.clone();
                axis(GENDER_AXIS, sign, &mut v);
                axis(SECONDARY_AXIS, gamma * sign, &mut v);
                push(&mut rows, w, v);
            }
        }

        for (words, main, gender) in [
            (&WORK_TERMS, WORK_AXIS, 0.3),
            (&FAMILY_TERMS, FAMILY_AXIS, -0.3),
        ] {
            for w in words.iter() {
                let mut v = content(0.2, &mut rng);
                axis(main, 1.0, &mut v);
                axis(GENDER_AXIS, gender, &mut v);
                push(&mut rows, w, v);
            }
        }

        for (words, gender, work, family) in [
            (&MALE_NAMES, 0.5, 0.4, 0.2),
            (&FEMALE_NAMES, -0.5, 0.2, 0.4),
        ] {
            for w in words.iter() {
                let mut v = content(0.2, &mut rng);
                axis(GENDER_AXIS, gender, &mut v);
                axis(WORK_AXIS, work, &mut v);
                axis(FAMILY_AXIS, family, &mut v);
                push(&mut rows, w, v);
            }
        }

        let n = OCCUPATIONS.len();
        // ratios spread over (0, 1) in a scrambled order
        let ratios: Vec<f64> = (0..n)
            .map(|j| (((j * 7) % n) as f64 + 0.5) / n as f64)
            .collect();
        let secondary = orthogonal_pattern(&ratios, 0.1);
        let mut occupations = Vec::with_capacity(n);
        for (j, name) in OCCUPATIONS.iter().enumerate() {
            let tau = 0.6 * (ratios[j] - 0.5);
            let t = tau / (1.0 - tau * tau).sqrt();
            let z = secondary[j];
            let mut v = content(1.0, &mut rng);
            let rest_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let scale = (1.0 - z * z).sqrt() / rest_norm;
            v.iter_mut().for_each(|x| *x *= scale);
            v[GENDER_AXIS] = t;
            v[SECONDARY_AXIS] = z;
            push(&mut rows, name, v);

            // integer head counts whose male share is exactly ratios[j]
            let total = 2.0 * n as f64 * 100.0;
            let male = ratios[j] * total;
            occupations
                .push(OccupationRecord::new(*name, male, total - male).expect("positive totals"));
        }

        for i in 0..8 {
            push(&mut rows, &format!("filler{i}"), content(1.0, &mut rng));
        }

        Self {
            rows,
            dim,
            candidates: vec![WordPair::new("he", "she"), WordPair::new("up", "down")],
            test_pairs: TEST_PAIRS
                .iter()
                .map(|(m, f)| WordPair::new(*m, *f))
                .collect(),
            male_terms: strings(&MALE_TERMS),
            female_terms: strings(&FEMALE_TERMS),
            work_terms: strings(&WORK_TERMS),
            family_terms: strings(&FAMILY_TERMS),
            male_names: strings(&MALE_NAMES),
            female_names: strings(&FEMALE_NAMES),
            occupations,
        }
    }

    /// Normalized store over [`Self::rows`].
    pub fn store(&self) -> EmbeddingStore {
        EmbeddingStore::from_rows(self.dim, self.rows.iter().cloned())
            .expect("fixture rows have the declared dimension")
            .0
            .normalize_all()
            .expect("fixture rows are non-zero")
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.occupations.iter().map(|o| o.ratio).collect()
    }
}

fn strings(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| (*w).to_owned()).collect()
}

/// A vector with zero mean and zero sample covariance with `xs`, scaled so
/// its largest magnitude is `amplitude`.
fn orthogonal_pattern(xs: &[f64], amplitude: f64) -> Vec<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let xc: Vec<f64> = xs.iter().map(|x| x - mx).collect();
    let raw: Vec<f64> = (0..xs.len()).map(|j| ((j as f64) * 1.7).sin()).collect();
    let mr = raw.iter().sum::<f64>() / n;
    let rc: Vec<f64> = raw.iter().map(|r| r - mr).collect();
    let coef =
        rc.iter().zip(&xc).map(|(a, b)| a * b).sum::<f64>() / xc.iter().map(|b| b * b).sum::<f64>();
    let z: Vec<f64> = rc.iter().zip(&xc).map(|(a, b)| a - coef * b).collect();
    let max = z.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    z.iter().map(|x| amplitude * x / max).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_store_is_deterministic_and_unit() {
        let a = random_store(20, 5, 7);
        let b = random_store(20, 5, 7);
        assert_eq!(a, b);
        for v in a.iter() {
            let n: f64 = v.components.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pattern_is_uncorrelated() {
        let xs: Vec<f64> = (0..10).map(|i| (i * 3 % 10) as f64).collect();
        let z = orthogonal_pattern(&xs, 0.1);
        let mx = xs.iter().sum::<f64>() / 10.0;
        let cov: f64 = z.iter().zip(&xs).map(|(a, b)| a * (b - mx)).sum();
        assert!(cov.abs() < 1e-12);
        assert!(z.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn fixture_vocabulary_is_unique() {
        let f = PlantedFixture::new(16, 1);
        let store = f.store();
        assert_eq!(store.len(), f.rows.len());
    }
}
