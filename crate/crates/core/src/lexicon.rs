//! Word lists: attribute categories, word pairs and occupation statistics.
//!
//! Category files hold one pattern per line. A pattern ending in `*` is a
//! prefix wildcard (`work*` matches `work`, `worker`, `working`, ...);
//! anything else is a literal word. Resolution is always against a
//! particular store's vocabulary.

use std::collections::HashSet;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::store::EmbeddingStore;

pub const DEFAULT_WILDCARD_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Literal(String),
    Prefix(String),
}

impl Pattern {
    pub fn parse(s: &str) -> Self {
        match s.strip_suffix('*') {
            Some(prefix) => Pattern::Prefix(prefix.to_owned()),
            None => Pattern::Literal(s.to_owned()),
        }
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pattern::Literal(w) => f.write_str(w),
            Pattern::Prefix(p) => write!(f, "{p}*"),
        }
    }
}

/// A named attribute word set resolved against a vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    pub patterns: Vec<Pattern>,
    /// In-vocabulary tokens, deduplicated, in order of first appearance.
    pub resolved: Vec<String>,
    /// Patterns that matched nothing.
    pub missing: Vec<String>,
}

impl Category {
    /// Resolves `patterns` against `store`. Literals use exact-then-lowercase
    /// lookup; a wildcard that matches nothing verbatim is retried lowercased.
    pub fn resolve(
        name: &str,
        patterns: Vec<Pattern>,
        store: &EmbeddingStore,
        wildcard_cap: usize,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut resolved = Vec::new();
        let mut missing = Vec::new();

        for pattern in &patterns {
            let hits = match pattern {
                Pattern::Literal(word) => store.index_of(word).into_iter().collect(),
                Pattern::Prefix(prefix) => {
                    let mut hits = store.prefix_matches(prefix);
                    if hits.is_empty() {
                        let lower = prefix.to_lowercase();
                        if lower != *prefix {
                            hits = store.prefix_matches(&lower);
                        }
                    }
                    if hits.len() > wildcard_cap {
                        return Err(Error::WildcardOverflow {
                            pattern: pattern.to_string(),
                            count: hits.len(),
                            cap: wildcard_cap,
                        });
                    }
                    hits
                }
            };
            if hits.is_empty() {
                missing.push(pattern.to_string());
            }
            for idx in hits {
                if seen.insert(idx) {
                    resolved.push(store.words()[idx].clone());
                }
            }
        }

        if resolved.is_empty() {
            return Err(Error::EmptyCategory {
                name: name.to_owned(),
                missing,
            });
        }
        Ok(Self {
            name: name.to_owned(),
            patterns,
            resolved,
            missing,
        })
    }

    pub fn contains(&self, token: &str) -> bool {
        self.resolved.iter().any(|w| w == token)
    }
}

/// Reads non-empty, non-`#` lines, trimmed.
pub fn read_word_list<R: BufRead>(source: R) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for line in source.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(line.to_owned());
    }
    Ok(out)
}

pub fn load_category<R: BufRead>(
    name: &str,
    source: R,
    store: &EmbeddingStore,
) -> Result<Category> {
    load_category_with_cap(name, source, store, DEFAULT_WILDCARD_CAP)
}

pub fn load_category_with_cap<R: BufRead>(
    name: &str,
    source: R,
    store: &EmbeddingStore,
    wildcard_cap: usize,
) -> Result<Category> {
    let patterns = read_word_list(source)?
        .iter()
        .map(|s| Pattern::parse(s))
        .collect();
    Category::resolve(name, patterns, store, wildcard_cap)
}

/// Two words at opposite ends of a semantic contrast.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WordPair {
    pub left: String,
    pub right: String,
}

impl WordPair {
    pub fn new(left: impl Into<String>, right: impl Into<String>) -> Self {
        Self {
            left: left.into(),
            right: right.into(),
        }
    }

    /// Same two words, in either orientation.
    pub fn same_words(&self, other: &WordPair) -> bool {
        (self.left == other.left && self.right == other.right)
            || (self.left == other.right && self.right == other.left)
    }
}

impl std::fmt::Display for WordPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.left, self.right)
    }
}

/// Reads `left,right` lines. Blank lines and `#` comments are skipped.
pub fn load_pairs<R: BufRead>(source: R) -> Result<Vec<WordPair>> {
    let mut pairs = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [left, right] = fields[..] else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `left,right`, got `{line}`"),
            });
        };
        if left.is_empty() || right.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("empty word in `{line}`"),
            });
        }
        if left == right {
            return Err(Error::ReflexivePair {
                line: line_no,
                word: left.to_owned(),
            });
        }
        pairs.push(WordPair::new(left, right));
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupationRecord {
    pub occupation: String,
    pub male_count: f64,
    pub female_count: f64,
    /// `male / (male + female)`: 1 means only men, 0 only women.
    pub ratio: f64,
}

impl OccupationRecord {
    pub fn new(occupation: impl Into<String>, male_count: f64, female_count: f64) -> Result<Self> {
        let occupation = occupation.into();
        let total = male_count + female_count;
        if total <= 0.0 {
            return Err(Error::ZeroTotal { occupation });
        }
        Ok(Self {
            occupation,
            male_count,
            female_count,
            ratio: male_count / total,
        })
    }
}

pub const OCCUPATION_HEADER: &str = "occupation,male_count,female_count";

/// Reads the occupation CSV. The first line must be exactly
/// `occupation,male_count,female_count`.
pub fn load_occupation_stats<R: BufRead>(source: R) -> Result<Vec<OccupationRecord>> {
    let mut lines = source.lines();
    let header = lines.next().transpose()?.ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    if header.trim_end_matches('\r').trim_start_matches('\u{feff}') != OCCUPATION_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{OCCUPATION_HEADER}`"),
        });
    }

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [occupation, male, female] = fields[..] else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        };
        if occupation.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty occupation".into(),
            });
        }
        let male = parse_count(male, line_no)?;
        let female = parse_count(female, line_no)?;
        if male < 0.0 || female < 0.0 {
            return Err(Error::NegativeCount {
                line: line_no,
                occupation: occupation.to_owned(),
            });
        }
        if !seen.insert(occupation.to_owned()) {
            return Err(Error::DuplicateOccupation {
                line: line_no,
                occupation: occupation.to_owned(),
            });
        }
        records.push(OccupationRecord::new(occupation, male, female)?);
    }
    Ok(records)
}

fn parse_count(field: &str, line: usize) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Parse {
            line,
            message: format!("count `{field}` is not a number"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::parse_embedding;

    fn store(words: &[&str]) -> EmbeddingStore {
        let text: String = words
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{w} 1 {i}\n"))
            .collect();
        parse_embedding(text.as_bytes(), None).unwrap().0
    }

    #[test]
    fn literal_patterns() {
        let s = store(&["work", "works", "working", "play"]);
        let cat = load_category("work", "work\nworks\nworking\n".as_bytes(), &s).unwrap();
        assert_eq!(cat.resolved, ["work", "works", "working"]);
        assert!(cat.missing.is_empty());
    }

    #[test]
    fn wildcard_is_a_prefix_rule() {
        let s = store(&["work", "worker", "world"]);
        let cat = load_category("work", "# career\nwork*\n".as_bytes(), &s).unwrap();
        assert_eq!(cat.resolved, ["work", "worker"]);
    }

    #[test]
    fn duplicates_and_case() {
        let s = store(&["family", "families", "mom"]);
        let cat = load_category("family", "Mom\nfamil*\nfamily\nzzqx\n".as_bytes(), &s).unwrap();
        assert_eq!(cat.resolved, ["mom", "family", "families"]);
        assert_eq!(cat.missing, ["zzqx"]);
    }

    #[test]
    fn empty_category() {
        let s = store(&["a", "b"]);
        match load_category("none", "zzqx\n".as_bytes(), &s) {
            Err(Error::EmptyCategory { name, missing }) => {
                assert_eq!(name, "none");
                assert_eq!(missing, ["zzqx"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wildcard_cap() {
        let s = store(&["aa", "ab", "ac"]);
        let err = load_category_with_cap("a", "a*\n".as_bytes(), &s, 2).unwrap_err();
        assert!(matches!(
            err,
            Error::WildcardOverflow {
                count: 3,
                cap: 2,
                ..
            }
        ));
        assert!(load_category_with_cap("a", "a*\n".as_bytes(), &s, 3).is_ok());
    }

    #[test]
    fn pairs() {
        assert_eq!(
            load_pairs("he,she\n".as_bytes()).unwrap(),
            [WordPair::new("he", "she")]
        );
        let five = "he,she\nhim,her\nhis,hers\nhimself,herself\nhe's,she's\n";
        let pairs = load_pairs(five.as_bytes()).unwrap();
        assert_eq!(pairs.len(), 5);
        assert_eq!(pairs[3], WordPair::new("himself", "herself"));
        assert!(matches!(
            load_pairs("himself,himself\n".as_bytes()),
            Err(Error::ReflexivePair { line: 1, .. })
        ));
        assert!(matches!(
            load_pairs("he,she\nthree,fields,here\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_pairs("lonely\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn occupations() {
        let csv = "occupation,male_count,female_count\nnurse,100,900\npilot,500,500\n";
        let recs = load_occupation_stats(csv.as_bytes()).unwrap();
        assert_eq!(recs[0].ratio, 0.1);
        assert_eq!(recs[1].ratio, 0.5);

        let ghost = "occupation,male_count,female_count\nghost,0,0\n";
        assert!(matches!(
            load_occupation_stats(ghost.as_bytes()),
            Err(Error::ZeroTotal { .. })
        ));
        let neg = "occupation,male_count,female_count\nx,-1,5\n";
        assert!(matches!(
            load_occupation_stats(neg.as_bytes()),
            Err(Error::NegativeCount { line: 2, .. })
        ));
        let dup = "occupation,male_count,female_count\nx,1,5\nx,2,2\n";
        assert!(matches!(
            load_occupation_stats(dup.as_bytes()),
            Err(Error::DuplicateOccupation { line: 3, .. })
        ));
        let bad_header = "job,men,women\nx,1,1\n";
        assert!(matches!(
            load_occupation_stats(bad_header.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
