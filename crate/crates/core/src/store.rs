//! Dense word-vector storage and the GloVe text format.
//!
//! An [`EmbeddingStore`] is a row-major `vocab × dim` matrix with a token
//! index. Stores are never mutated in place: normalization and debiasing
//! consume a store and hand back a new one.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Borrowed view of one row of a store.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordVector<'a> {
    pub word: &'a str,
    pub components: &'a [f64],
}

impl<'a> WordVector<'a> {
    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

/// What the parser noticed while reading a file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadSummary {
    /// Number of rows dropped because their token had already been seen.
    pub duplicates: usize,
    /// `(vocab_size, dimension)` from a word2vec-style header, if present.
    pub header: Option<(usize, usize)>,
}

#[derive(Debug)]
pub struct EmbeddingStore {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    normalized: bool,
    sorted: OnceLock<Vec<u32>>,
}

impl Clone for EmbeddingStore {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            words: self.words.clone(),
            index: self.index.clone(),
            data: self.data.clone(),
            normalized: self.normalized,
            sorted: OnceLock::new(),
        }
    }
}

impl PartialEq for EmbeddingStore {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.normalized == other.normalized
            && self.words == other.words
            && self.data == other.data
    }
}

impl EmbeddingStore {
    /// Builds a store from `(token, vector)` rows. Later duplicates of a
    /// token are dropped; the number dropped is returned alongside.
    pub fn from_rows<I, S>(dim: usize, rows: I) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut builder = Builder::new(dim);
        for (word, vector) in rows {
            if vector.len() != dim {
                return Err(Error::VectorDimension {
                    left: dim,
                    right: vector.len(),
                });
            }
            builder.push(word.into(), &vector);
        }
        let duplicates = builder.duplicates;
        Ok((builder.finish()?, duplicates))
    }

    pub(crate) fn with_rows(&self, words: Vec<String>, data: Vec<f64>, normalized: bool) -> Self {
        debug_assert_eq!(words.len() * self.dim, data.len());
        let index = if words.len() == self.words.len() {
            self.index.clone()
        } else {
            words
                .iter()
                .enumerate()
                .map(|(i, w)| (w.clone(), i))
                .collect()
        };
        Self {
            dim: self.dim,
            words,
            index,
            data,
            normalized,
            sorted: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Tokens in row order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn row(&self, idx: usize) -> WordVector<'_> {
        let start = idx * self.dim;
        WordVector {
            word: &self.words[idx],
            components: &self.data[start..start + self.dim],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = WordVector<'_>> + '_ {
        (0..self.len()).map(move |i| self.row(i))
    }

    pub(crate) fn raw(&self) -> &[f64] {
        &self.data
    }

    /// Row index of `word`: exact match first, then its lowercase form.
    pub fn index_of(&self, word: &str) -> Option<usize> {
        if let Some(&idx) = self.index.get(word) {
            return Some(idx);
        }
        let lower = word.to_lowercase();
        if lower != word {
            self.index.get(&lower).copied()
        } else {
            None
        }
    }

    pub fn lookup(&self, word: &str) -> Option<WordVector<'_>> {
        self.index_of(word).map(|i| self.row(i))
    }

    /// Row indices of every token starting with `prefix`, ascending.
    pub fn prefix_matches(&self, prefix: &str) -> Vec<usize> {
        let sorted = self.sorted.get_or_init(|| {
            let mut order: Vec<u32> = (0..self.words.len() as u32).collect();
            order.sort_by(|&a, &b| self.words[a as usize].cmp(&self.words[b as usize]));
            order
        });
        let start = sorted.partition_point(|&i| self.words[i as usize].as_str() < prefix);
        let mut hits: Vec<usize> = sorted[start..]
            .iter()
            .map(|&i| i as usize)
            .take_while(|&i| self.words[i].starts_with(prefix))
            .collect();
        hits.sort_unstable();
        hits
    }

    /// Divides every row by its Euclidean norm.
    pub fn normalize_all(self) -> Result<Self> {
        let mut data = self.data;
        for (row, word) in data.chunks_mut(self.dim).zip(&self.words) {
            let norm = l2_norm(row);
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::ZeroNorm {
                    token: word.clone(),
                });
            }
            row.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(Self {
            data,
            normalized: true,
            ..self
        })
    }

    /// Writes the store as GloVe text: one `token v1 … vn` line per row, no
    /// header. Values use the shortest decimal form that parses back to the
    /// same `f64`.
    pub fn write_glove<W: Write>(&self, mut out: W) -> Result<()> {
        for v in self.iter() {
            out.write_all(v.word.as_bytes())?;
            for x in v.components {
                write!(out, " {x}")?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Builder {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    duplicates: usize,
}

impl Builder {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            words: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            duplicates: 0,
        }
    }

    fn push(&mut self, word: String, vector: &[f64]) {
        if self.index.contains_key(&word) {
            self.duplicates += 1;
            return;
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend_from_slice(vector);
    }

    fn finish(self) -> Result<EmbeddingStore> {
        if self.words.is_empty() {
            return Err(Error::EmptySource);
        }
        Ok(EmbeddingStore {
            dim: self.dim,
            words: self.words,
            index: self.index,
            data: self.data,
            normalized: false,
            sorted: OnceLock::new(),
        })
    }
}

/// Parses GloVe text (optionally with a `vocab_size dimension` header).
///
/// The dimension comes from the header, else the first vector line, and
/// must agree with `expected_dim` when one is given. Rows keep file order.
pub fn parse_embedding<R: BufRead>(
    mut source: R,
    expected_dim: Option<usize>,
) -> Result<(EmbeddingStore, LoadSummary)> {
    let mut summary = LoadSummary::default();
    let mut builder: Option<Builder> = None;
    let mut buf = Vec::new();
    let mut values = Vec::new();
    let mut line_no = 0usize;

    loop {
        buf.clear();
        if source.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = std::str::from_utf8(&buf).map_err(|_| Error::Parse {
            line: line_no,
            message: "invalid UTF-8".into(),
        })?;
        let line = line.trim_end_matches(['\n', '\r']).trim_end();
        if line.is_empty() {
            continue;
        }

        let mut fields = line.split(' ');
        let token = fields.next().unwrap_or_default();
        if token.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "line starts with a separator".into(),
            });
        }

        if builder.is_none() && summary.header.is_none() {
            if let Some(header) = parse_header(line) {
                let (_, dim) = header;
                check_expected(dim, expected_dim, line_no)?;
                summary.header = Some(header);
                builder = Some(Builder::new(dim));
                continue;
            }
        }

        values.clear();
        for field in fields {
            let x: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("component `{field}` of `{token}` is not a number"),
            })?;
            if !x.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("component `{field}` of `{token}` is not finite"),
                });
            }
            values.push(x);
        }

        let b = match builder.as_mut() {
            Some(b) => b,
            None => {
                if values.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("`{token}` has no components"),
                    });
                }
                check_expected(values.len(), expected_dim, line_no)?;
                builder.insert(Builder::new(values.len()))
            }
        };
        if values.len() != b.dim {
            return Err(Error::DimensionMismatch {
                line: line_no,
                expected: b.dim,
                found: values.len(),
            });
        }
        b.push(token.to_owned(), &values);
    }

    let builder = builder.ok_or(Error::EmptySource)?;
    summary.duplicates = builder.duplicates;
    Ok((builder.finish()?, summary))
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split(' ');
    let (a, b) = (it.next()?, it.next()?);
    if it.next().is_some() {
        return None;
    }
    let vocab = a.parse::<usize>().ok()?;
    let dim = b.parse::<usize>().ok()?;
    (dim > 0).then_some((vocab, dim))
}

fn check_expected(found: usize, expected: Option<usize>, line: usize) -> Result<()> {
    match expected {
        Some(expected) if expected != found => Err(Error::DimensionMismatch {
            line,
            expected,
            found,
        }),
        _ => Ok(()),
    }
}
