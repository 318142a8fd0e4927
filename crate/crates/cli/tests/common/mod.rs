#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use embias::synthetic::PlantedFixture;
use embias::{EmbeddingStore, WordPair};

pub const DIM: usize = 16;
pub const SEED: u64 = 7;

/// Files for a planted-bias fixture laid out in one directory.
pub struct FixtureFiles {
    pub fixture: PlantedFixture,
    pub dir: PathBuf,
    pub embedding: PathBuf,
    pub config: PathBuf,
    pub male: PathBuf,
    pub female: PathBuf,
    pub work: PathBuf,
    pub family: PathBuf,
    pub occupations: PathBuf,
    pub candidates: PathBuf,
    pub test_pairs: PathBuf,
    pub targets_manifest: PathBuf,
    pub out: PathBuf,
}

pub fn write_lines(path: &Path, lines: &[String]) {
    let mut text = lines.join("\n");
    text.push('\n');
    fs::write(path, text).unwrap();
}

pub fn write_pairs(path: &Path, pairs: &[WordPair]) {
    let lines: Vec<String> = pairs
        .iter()
        .map(|p| format!("{},{}", p.left, p.right))
        .collect();
    write_lines(path, &lines);
}

pub fn write_store(path: &Path, store: &EmbeddingStore) {
    let mut buf = Vec::new();
    store.write_glove(&mut buf).unwrap();
    fs::write(path, buf).unwrap();
}

pub fn write_fixture(dir: &Path) -> FixtureFiles {
    write_fixture_with(dir, PlantedFixture::new(DIM, SEED), |_| {})
}

/// Writes the fixture files and a `full-audit` config. `edit` may replace
/// fixture files before the config is written.
pub fn write_fixture_with(
    dir: &Path,
    fixture: PlantedFixture,
    edit: impl FnOnce(&FixtureFiles),
) -> FixtureFiles {
    fs::create_dir_all(dir).unwrap();
    let p = |n: &str| dir.join(n);
    let files = FixtureFiles {
        dir: dir.to_path_buf(),
        embedding: p("embedding.txt"),
        config: p("audit.conf"),
        male: p("male.txt"),
        female: p("female.txt"),
        work: p("work.txt"),
        family: p("family.txt"),
        occupations: p("occupations.csv"),
        candidates: p("candidates.csv"),
        test_pairs: p("test_pairs.csv"),
        targets_manifest: p("targets.conf"),
        out: p("out"),
        fixture,
    };
    let f = &files.fixture;

    let (raw, _) = EmbeddingStore::from_rows(f.dim, f.rows.iter().cloned()).unwrap();
    write_store(&files.embedding, &raw);
    write_lines(&files.male, &f.male_terms);
    write_lines(&files.female, &f.female_terms);
    write_lines(&files.work, &f.work_terms);
    write_lines(&files.family, &f.family_terms);
    write_lines(&p("male_names.txt"), &f.male_names);
    write_lines(&p("female_names.txt"), &f.female_names);
    write_pairs(&files.candidates, &f.candidates);
    write_pairs(&files.test_pairs, &f.test_pairs);

    let mut occ = String::from("occupation,male_count,female_count\n");
    for o in &f.occupations {
        writeln!(occ, "{},{},{}", o.occupation, o.male_count, o.female_count).unwrap();
    }
    fs::write(&files.occupations, occ).unwrap();

    fs::write(
        &files.targets_manifest,
        "male_names = male_names.txt\nfemale_names = female_names.txt\n",
    )
    .unwrap();

    let config = format!(
        "# planted-bias fixture\n\
         embedding = embedding.txt\n\
         dims = {dim}\n\
         out = out\n\
         debiased_embedding = debiased.txt\n\
         category.male = male.txt\n\
         category.female = female.txt\n\
         category.work = work.txt\n\
         category.family = family.txt\n\
         targets.male_names = male_names.txt\n\
         targets.female_names = female_names.txt\n\
         battery.career.targets = male_names, female_names\n\
         battery.career.attributes = work, family\n\
         battery.career.gender = true\n\
         battery.names.targets = male_names, female_names\n\
         battery.names.attributes = male, female\n\
         battery.names.gender = true\n\
         battery.plain.targets = male_names, female_names\n\
         battery.plain.attributes = work, family\n\
         occupations = occupations.csv\n\
         occupations.male = male\n\
         occupations.female = female\n\
         candidates = candidates.csv\n\
         test_pairs = test_pairs.csv\n",
        dim = f.dim
    );
    fs::write(&files.config, config).unwrap();
    edit(&files);
    files
}

pub fn embias(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embias"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Every regular file under `dir` with its bytes, sorted by name.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}
