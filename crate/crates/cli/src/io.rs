//! File loading, atomic output and number formatting.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use embias::{EmbeddingStore, LoadSummary};
use serde::{Serialize, Serializer};
use tempfile::NamedTempFile;

use crate::error::{CliError, DataContext, Result};

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(|f| BufReader::with_capacity(1 << 20, f))
        .map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })
}

/// Parses and normalizes an embedding file.
pub fn load_store(path: &Path, dims: Option<usize>) -> Result<(EmbeddingStore, LoadSummary)> {
    let (store, summary) = embias::parse_embedding(open(path)?, dims).in_file(path)?;
    let store = store.normalize_all().in_file(path)?;
    Ok((store, summary))
}

/// Writes `contents` next to `path` under a temporary name, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    write_atomic_with(path, |w| w.write_all(contents))
}

/// Streams output into a temporary file beside `path`, then renames it
/// into place. Nothing appears at `path` if `fill` fails.
pub fn write_atomic_with<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let fail = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(fail)?;
    let tmp = NamedTempFile::new_in(dir).map_err(fail)?;
    let mut w = BufWriter::with_capacity(1 << 20, tmp);
    fill(&mut w).map_err(fail)?;
    let tmp = w.into_inner().map_err(|e| fail(e.into_error()))?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// A batch of outputs that are all rendered before any is written.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, path: PathBuf, contents: Vec<u8>) {
        self.files.push((path, contents));
    }

    pub fn add_json<T: Serialize>(&mut self, path: PathBuf, value: &T) -> Result<()> {
        let mut bytes =
            serde_json::to_vec_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
        bytes.push(b'\n');
        self.add(path, bytes);
        Ok(())
    }

    pub fn add_csv(
        &mut self,
        path: PathBuf,
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let internal = |e: csv::Error| CliError::Internal(e.to_string());
        w.write_record(header).map_err(internal)?;
        for row in rows {
            w.write_record(&row).map_err(internal)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        self.add(path, bytes);
        Ok(())
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.files.len());
        for (path, bytes) in self.files {
            write_atomic(&path, &bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Rounds to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// 9-significant-digit text; exponent form below 1e-4 in magnitude.
pub fn fmt_num(x: f64) -> String {
    let r = sig9(x);
    if r == 0.0 {
        // drop the sign of negative zero
        return "0".into();
    }
    if r.abs() < 1e-4 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// A report number, serialized with 9 significant digits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = sig9(self.0);
        if !r.is_finite() {
            return s.serialize_none();
        }
        if r == 0.0 {
            return s.serialize_f64(0.0);
        }
        s.serialize_f64(r)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(fmt_num(0.123456789123), "0.123456789");
        assert_eq!(fmt_num(-1.0 / 3.0), "-0.333333333");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.5e-20), "1.5e-20");
        assert_eq!(fmt_num(0.000123456789123), "0.000123456789");
        assert_eq!(fmt_num(-2.0e-7 / 3.0), "-6.66666667e-8");
        assert_eq!(
            serde_json::to_string(&Real(2.0 / 3.0)).unwrap(),
            "0.666666667"
        );
        assert_eq!(serde_json::to_string(&Real(f64::NAN)).unwrap(), "null");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nested/out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
