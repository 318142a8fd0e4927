//! Flat `key = value` files used by `full-audit` and as target manifests.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! ignored. Keys may not repeat. Relative paths are resolved against the
//! directory holding the file.
//!
//! Audit configuration keys:
//!
//! ```text
//! embedding = glove.6B.300d.txt          # required
//! dims = 300                             # optional dimension check
//! out = audit-out                        # output directory
//! skip_annihilated = false
//! top_k = 10
//! wildcard_cap = 10000
//! debiased_embedding = debiased.txt      # optional, written under `out`
//!
//! category.<name> = path                 # attribute category files
//! targets.<name> = path                  # target word lists
//!
//! battery.<name>.targets = list, list    # target list names
//! battery.<name>.attributes = catA, catB # two category names
//! battery.<name>.gender = true           # rerun after debiasing
//! battery.<name>.gaps = a:b, c:d         # optional; default every pair
//!
//! occupations = occupations.csv
//! occupations.male = <category name>
//! occupations.female = <category name>
//! candidates = pronoun_pairs.csv
//! test_pairs = gender_pairs.csv
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct KeyValues {
    pub path: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| CliError::Config {
                path: path.to_path_buf(),
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(err("empty key".into()));
            }
            if entries
                .insert(key.to_owned(), (line_no, value.to_owned()))
                .is_some()
            {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    fn base_dir(&self) -> &Path {
        self.path.parent().unwrap_or(Path::new(""))
    }

    pub fn resolve(&self, value: &str) -> PathBuf {
        let p = Path::new(value);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir().join(p)
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| CliError::Config {
            path: self.path.clone(),
            line: 0,
            message: format!("missing required key `{key}`"),
        })
    }

    fn error(&self, key: &str, message: String) -> CliError {
        CliError::Config {
            path: self.path.clone(),
            line: self.entries.get(key).map_or(0, |(l, _)| *l),
            message,
        }
    }

    pub fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| self.error(key, format!("invalid value `{v}` for `{key}`"))),
        }
    }

    /// `(key, value)` in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .map(|(k, (_, v))| (k.as_str(), v.as_str()))
    }
}

/// A label usable as a file-name component.
pub fn check_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatterySpec {
    pub name: String,
    pub targets: Vec<String>,
    pub attribute_a: String,
    pub attribute_b: String,
    pub gender: bool,
    pub gaps: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupationSpec {
    pub path: PathBuf,
    pub male: String,
    pub female: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    /// As written in the file.
    pub embedding_label: String,
    pub embedding: PathBuf,
    pub dims: Option<usize>,
    pub out: PathBuf,
    pub skip_annihilated: bool,
    pub top_k: usize,
    pub wildcard_cap: usize,
    pub debiased_embedding: Option<PathBuf>,
    /// `name -> path`, ordered by name.
    pub categories: BTreeMap<String, PathBuf>,
    pub targets: BTreeMap<String, PathBuf>,
    pub batteries: Vec<BatterySpec>,
    pub occupations: Option<OccupationSpec>,
    pub candidates: PathBuf,
    pub test_pairs: PathBuf,
}

const SCALAR_KEYS: [&str; 12] = [
    "embedding",
    "dims",
    "out",
    "skip_annihilated",
    "top_k",
    "wildcard_cap",
    "debiased_embedding",
    "occupations",
    "occupations.male",
    "occupations.female",
    "candidates",
    "test_pairs",
];

impl AuditConfig {
    pub fn read(path: &Path) -> Result<Self> {
        Self::from_kv(&KeyValues::read(path)?)
    }

    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        let mut categories = BTreeMap::new();
        let mut targets = BTreeMap::new();
        let mut battery_keys: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();

        for (key, value) in kv.iter() {
            if SCALAR_KEYS.contains(&key) {
                continue;
            }
            if let Some(name) = key.strip_prefix("category.") {
                categories.insert(name.to_owned(), kv.resolve(value));
            } else if let Some(name) = key.strip_prefix("targets.") {
                if !check_label(name) {
                    return Err(kv.error(
                        key,
                        format!("target list name `{name}` must be [A-Za-z0-9_-]+"),
                    ));
                }
                targets.insert(name.to_owned(), kv.resolve(value));
            } else if let Some(rest) = key.strip_prefix("battery.") {
                let (name, field) = rest.rsplit_once('.').ok_or_else(|| {
                    kv.error(
                        key,
                        format!("expected `battery.<name>.<field>`, got `{key}`"),
                    )
                })?;
                if !check_label(name) {
                    return Err(
                        kv.error(key, format!("battery name `{name}` must be [A-Za-z0-9_-]+"))
                    );
                }
                battery_keys
                    .entry(name.to_owned())
                    .or_default()
                    .insert(field.to_owned(), value.to_owned());
            } else {
                return Err(kv.error(key, format!("unknown key `{key}`")));
            }
        }

        let mut batteries = Vec::new();
        for (name, fields) in battery_keys {
            let key = |f: &str| format!("battery.{name}.{f}");
            for field in fields.keys() {
                if !["targets", "attributes", "gender", "gaps"].contains(&field.as_str()) {
                    return Err(kv.error(&key(field), format!("unknown battery field `{field}`")));
                }
            }
            let list = |s: &str| -> Vec<String> {
                s.split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(String::from)
                    .collect()
            };
            let target_names = list(fields.get("targets").ok_or_else(|| {
                kv.error(&key("targets"), format!("battery `{name}` needs `targets`"))
            })?);
            for t in &target_names {
                if !targets.contains_key(t) {
                    return Err(kv.error(&key("targets"), format!("unknown target list `{t}`")));
                }
            }
            if target_names.is_empty() {
                return Err(kv.error(
                    &key("targets"),
                    format!("battery `{name}` has no target lists"),
                ));
            }
            let attrs = list(fields.get("attributes").ok_or_else(|| {
                kv.error(
                    &key("attributes"),
                    format!("battery `{name}` needs `attributes`"),
                )
            })?);
            let [a, b] = &attrs[..] else {
                return Err(kv.error(&key("attributes"), "expected exactly two categories".into()));
            };
            for c in [a, b] {
                if !categories.contains_key(c) {
                    return Err(kv.error(&key("attributes"), format!("unknown category `{c}`")));
                }
            }
            let gender = match fields.get("gender").map(String::as_str) {
                None | Some("false") => false,
                Some("true") => true,
                Some(v) => {
                    return Err(
                        kv.error(&key("gender"), format!("expected true or false, got `{v}`"))
                    )
                }
            };
            let gaps = match fields.get("gaps") {
                None => {
                    let mut all = Vec::new();
                    for i in 0..target_names.len() {
                        for j in i + 1..target_names.len() {
                            all.push((target_names[i].clone(), target_names[j].clone()));
                        }
                    }
                    all
                }
                Some(spec) => {
                    let mut out = Vec::new();
                    for item in list(spec) {
                        let (x, y) = item
                            .split_once(':')
                            .map(|(x, y)| (x.trim().to_owned(), y.trim().to_owned()))
                            .ok_or_else(|| {
                                kv.error(&key("gaps"), format!("expected `a:b`, got `{item}`"))
                            })?;
                        if !target_names.contains(&x) || !target_names.contains(&y) || x == y {
                            return Err(kv.error(
                                &key("gaps"),
                                format!(
                                    "gap `{item}` must name two of this battery's target lists"
                                ),
                            ));
                        }
                        out.push((x, y));
                    }
                    out
                }
            };
            batteries.push(BatterySpec {
                name,
                targets: target_names,
                attribute_a: a.clone(),
                attribute_b: b.clone(),
                gender,
                gaps,
            });
        }

        let occupations = match kv.get("occupations") {
            None => None,
            Some(path) => {
                let male = kv.require("occupations.male")?.to_owned();
                let female = kv.require("occupations.female")?.to_owned();
                for c in [&male, &female] {
                    if !categories.contains_key(c) {
                        return Err(kv.error("occupations.male", format!("unknown category `{c}`")));
                    }
                }
                Some(OccupationSpec {
                    path: kv.resolve(path),
                    male,
                    female,
                })
            }
        };

        let embedding_label = kv.require("embedding")?.to_owned();
        let out = kv.resolve(kv.get("out").unwrap_or("audit-out"));
        Ok(Self {
            embedding: kv.resolve(&embedding_label),
            embedding_label,
            dims: kv.parse_value("dims")?,
            skip_annihilated: kv.parse_value("skip_annihilated")?.unwrap_or(false),
            top_k: kv.parse_value("top_k")?.unwrap_or(10),
            wildcard_cap: kv
                .parse_value("wildcard_cap")?
                .unwrap_or(embias::lexicon::DEFAULT_WILDCARD_CAP),
            debiased_embedding: kv.get("debiased_embedding").map(|p| out.join(p)),
            out,
            categories,
            targets,
            batteries,
            occupations,
            candidates: kv.resolve(kv.require("candidates")?),
            test_pairs: kv.resolve(kv.require("test_pairs")?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sample
embedding = vectors.txt
top_k = 5
category.male = lex/male.txt
category.female = lex/female.txt
category.work = lex/work.txt
category.family = lex/family.txt
targets.men = t/men.txt
targets.women = t/women.txt
battery.career.targets = men, women
battery.career.attributes = work, family
battery.career.gender = true
occupations = occ.csv
occupations.male = male
occupations.female = female
candidates = pronouns.csv
test_pairs = wordnet.csv
";

    #[test]
    fn parses_sample() {
        let kv = KeyValues::parse(Path::new("/cfg/audit.conf"), SAMPLE).unwrap();
        let cfg = AuditConfig::from_kv(&kv).unwrap();
        assert_eq!(cfg.embedding, PathBuf::from("/cfg/vectors.txt"));
        assert_eq!(cfg.top_k, 5);
        assert_eq!(cfg.out, PathBuf::from("/cfg/audit-out"));
        assert_eq!(cfg.batteries.len(), 1);
        let b = &cfg.batteries[0];
        assert!(b.gender);
        assert_eq!(b.gaps, [("men".to_owned(), "women".to_owned())]);
        assert_eq!(cfg.occupations.unwrap().male, "male");
    }

    #[test]
    fn rejects_duplicates_and_unknown_keys() {
        let dup = "embedding = a\nembedding = b\n";
        match KeyValues::parse(Path::new("c"), dup) {
            Err(CliError::Config { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let kv = KeyValues::parse(Path::new("c"), &format!("{SAMPLE}embeding = typo\n")).unwrap();
        assert!(matches!(
            AuditConfig::from_kv(&kv),
            Err(CliError::Config { .. })
        ));
        let kv = KeyValues::parse(Path::new("c"), &SAMPLE.replace("work, family", "work")).unwrap();
        assert!(matches!(
            AuditConfig::from_kv(&kv),
            Err(CliError::Config { .. })
        ));
    }
}
