//! The five subcommands, callable as library functions.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use embias::association::{centroid_gap, AttributeSet, BatteryResult, TargetList};
use embias::lexicon::{load_category_with_cap, read_word_list, DEFAULT_WILDCARD_CAP};
use embias::{
    debias_store, gap_reduction, load_occupation_stats, load_pairs, pearson, run_battery,
    select_projection, AssociationRecord, Category, EmbeddingStore, OccupationRecord,
};
use serde::Serialize;

use crate::config::{check_label, AuditConfig, KeyValues};
use crate::error::{CliError, DataContext, Result};
use crate::io::{load_store, open, write_atomic_with, Outputs, Real};
use crate::report::*;

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "category".into())
}

pub fn load_category_file(
    name: &str,
    path: &Path,
    store: &EmbeddingStore,
    cap: usize,
) -> Result<Category> {
    load_category_with_cap(name, open(path)?, store, cap).in_file(path)
}

fn load_words(path: &Path) -> Result<Vec<String>> {
    read_word_list(open(path)?).in_file(path)
}

// ---------------------------------------------------------------- assoc

#[derive(Debug, Clone)]
pub struct AssocArgs {
    pub embedding: PathBuf,
    pub dims: Option<usize>,
    pub category: PathBuf,
    pub words: Vec<String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct AssocOutput {
    pub records: Vec<AssociationRecord>,
    /// Words not in the vocabulary, input order.
    pub missing: Vec<String>,
}

impl AssocOutput {
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.records
            .iter()
            .map(|r| {
                vec![
                    r.word.clone(),
                    r.category.clone(),
                    crate::io::fmt_num(r.score),
                ]
            })
            .collect()
    }
}

pub fn cmd_assoc(args: &AssocArgs) -> Result<AssocOutput> {
    let (store, _) = load_store(&args.embedding, args.dims)?;
    let name = file_stem(&args.category);
    let category = load_category_file(&name, &args.category, &store, DEFAULT_WILDCARD_CAP)?;
    let set = AttributeSet::new(&category, &store)?;

    let mut records = Vec::new();
    let mut missing = Vec::new();
    for word in &args.words {
        match store.lookup(word) {
            Some(v) => records.push(AssociationRecord {
                word: word.clone(),
                category: name.clone(),
                score: set.score(v.components)?,
            }),
            None => missing.push(word.clone()),
        }
    }
    if records.is_empty() {
        return Err(CliError::Input(format!(
            "none of the words are in the vocabulary: {}",
            missing.join(", ")
        )));
    }
    let output = AssocOutput { records, missing };
    if let Some(dir) = &args.out {
        let mut outs = Outputs::default();
        outs.add_csv(dir.join("assoc.csv"), &ASSOC_CSV_HEADER, output.csv_rows())?;
        outs.commit()?;
    }
    Ok(output)
}

// ---------------------------------------------------------------- battery

#[derive(Debug, Clone)]
pub struct BatteryArgs {
    pub embedding: PathBuf,
    pub dims: Option<usize>,
    /// `label = path` lines.
    pub targets_manifest: PathBuf,
    pub attribute_a: PathBuf,
    pub attribute_b: PathBuf,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatterySummary {
    pub embedding: EmbeddingInfo,
    pub attribute_a: CategoryInfo,
    pub attribute_b: CategoryInfo,
    pub targets: Vec<TargetSummary>,
    pub gaps: Vec<GapEntry>,
}

pub fn read_target_manifest(path: &Path) -> Result<Vec<TargetList>> {
    let kv = KeyValues::read(path)?;
    let mut lists = Vec::new();
    for (label, file) in kv.iter() {
        if !check_label(label) {
            return Err(CliError::Input(format!(
                "{}: target label `{label}` must be [A-Za-z0-9_-]+",
                path.display()
            )));
        }
        lists.push(TargetList::new(label, load_words(&kv.resolve(file))?));
    }
    if lists.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no target lists",
            path.display()
        )));
    }
    Ok(lists)
}

fn pairwise_gaps(
    results: &[BatteryResult],
    pairs: &[(String, String)],
) -> Result<Vec<(String, String, f64)>> {
    let by_label: BTreeMap<&str, &BatteryResult> = results
        .iter()
        .map(|r| (r.target_label.as_str(), r))
        .collect();
    pairs
        .iter()
        .map(|(a, b)| {
            let gap = centroid_gap(
                &by_label[a.as_str()].coordinates(),
                &by_label[b.as_str()].coordinates(),
            )?;
            Ok((a.clone(), b.clone(), gap))
        })
        .collect()
}

fn all_pairs(labels: &[String]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            out.push((labels[i].clone(), labels[j].clone()));
        }
    }
    out
}

pub fn cmd_battery(args: &BatteryArgs) -> Result<(Vec<BatteryResult>, BatterySummary)> {
    let (store, load) = load_store(&args.embedding, args.dims)?;
    let targets = read_target_manifest(&args.targets_manifest)?;
    let a = load_category_file(
        &file_stem(&args.attribute_a),
        &args.attribute_a,
        &store,
        DEFAULT_WILDCARD_CAP,
    )?;
    let b = load_category_file(
        &file_stem(&args.attribute_b),
        &args.attribute_b,
        &store,
        DEFAULT_WILDCARD_CAP,
    )?;
    let results = run_battery(&targets, &a, &b, &store)?;

    let labels: Vec<String> = targets.iter().map(|t| t.label.clone()).collect();
    let gaps = pairwise_gaps(&results, &all_pairs(&labels))?
        .into_iter()
        .map(|(a, b, g)| GapEntry {
            a,
            b,
            space: GAP_SPACE,
            gap_before: Real(g),
            gap_after: None,
            reduction_percent: None,
        })
        .collect();
    let summary = BatterySummary {
        embedding: EmbeddingInfo::new(&args.embedding.display().to_string(), &store, &load),
        attribute_a: (&a).into(),
        attribute_b: (&b).into(),
        targets: results.iter().map(TargetSummary::from).collect(),
        gaps,
    };

    let mut outs = Outputs::default();
    for r in &results {
        outs.add_csv(
            args.out.join(format!("{}.csv", r.target_label)),
            &BATTERY_CSV_HEADER,
            battery_rows(r),
        )?;
    }
    outs.add_json(args.out.join("battery.json"), &summary)?;
    outs.commit()?;
    Ok((results, summary))
}

// ---------------------------------------------------------------- occupations

pub const GENDER_VS_RATIO: &str = "gender_score_vs_ratio";
pub const MALE_VS_FEMALE: &str = "score_male_vs_score_female";
pub const MALE_VS_RATIO: &str = "score_male_vs_ratio";
pub const FEMALE_VS_RATIO: &str = "score_female_vs_ratio";

/// Scores each in-vocabulary occupation against both gender categories and
/// correlates the scores with the employment ratios.
pub fn occupation_analysis(
    store: &EmbeddingStore,
    records: &[OccupationRecord],
    male: &Category,
    female: &Category,
    top_k: usize,
) -> Result<(OccupationReport, Vec<OccupationRow>)> {
    let male_set = AttributeSet::new(male, store)?;
    let female_set = AttributeSet::new(female, store)?;
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for rec in records {
        match store.lookup(&rec.occupation) {
            Some(v) => {
                let score_male = male_set.score(v.components)?;
                let score_female = female_set.score(v.components)?;
                rows.push(OccupationRow {
                    occupation: rec.occupation.clone(),
                    score_male,
                    score_female,
                    gender_score: score_male - score_female,
                    ratio: rec.ratio,
                });
            }
            None => missing.push(rec.occupation.clone()),
        }
    }
    if rows.len() < 3 {
        return Err(CliError::Input(format!(
            "need at least 3 in-vocabulary occupations, found {}",
            rows.len()
        )));
    }

    let col = |f: fn(&OccupationRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let (gender, sm, sf, ratio) = (
        col(|r| r.gender_score),
        col(|r| r.score_male),
        col(|r| r.score_female),
        col(|r| r.ratio),
    );
    let correlations = vec![
        Correlation::new(GENDER_VS_RATIO, &pearson(&gender, &ratio)?),
        Correlation::new(MALE_VS_FEMALE, &pearson(&sm, &sf)?),
        Correlation::new(MALE_VS_RATIO, &pearson(&sm, &ratio)?),
        Correlation::new(FEMALE_VS_RATIO, &pearson(&sf, &ratio)?),
    ];

    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&i, &j| rows[j].gender_score.total_cmp(&rows[i].gender_score));
    let top_male = order
        .iter()
        .take(top_k)
        .map(|&i| rows[i].occupation.clone())
        .collect();
    order.sort_by(|&i, &j| rows[i].gender_score.total_cmp(&rows[j].gender_score));
    let top_female = order
        .iter()
        .take(top_k)
        .map(|&i| rows[i].occupation.clone())
        .collect();

    let report = OccupationReport {
        male_category: male.name.clone(),
        female_category: female.name.clone(),
        occupations: records.len(),
        used: rows.len(),
        missing,
        table: rows.iter().map(OccupationRowOut::from).collect(),
        correlations,
        top_male,
        top_female,
    };
    Ok((report, rows))
}

#[derive(Debug, Clone)]
pub struct OccupationArgs {
    pub embedding: PathBuf,
    pub dims: Option<usize>,
    pub occupations: PathBuf,
    pub male: PathBuf,
    pub female: PathBuf,
    pub top_k: usize,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct OccupationSummary {
    pub embedding: EmbeddingInfo,
    pub report: OccupationReport,
}

pub fn cmd_occupations(args: &OccupationArgs) -> Result<OccupationSummary> {
    let (store, load) = load_store(&args.embedding, args.dims)?;
    let records = load_occupation_stats(open(&args.occupations)?).in_file(&args.occupations)?;
    let male = load_category_file(
        &file_stem(&args.male),
        &args.male,
        &store,
        DEFAULT_WILDCARD_CAP,
    )?;
    let female = load_category_file(
        &file_stem(&args.female),
        &args.female,
        &store,
        DEFAULT_WILDCARD_CAP,
    )?;
    let (report, rows) = occupation_analysis(&store, &records, &male, &female, args.top_k)?;
    let summary = OccupationSummary {
        embedding: EmbeddingInfo::new(&args.embedding.display().to_string(), &store, &load),
        report,
    };
    let mut outs = Outputs::default();
    outs.add_csv(
        args.out.join("occupations.csv"),
        &OCCUPATION_CSV_HEADER,
        occupation_rows(&rows),
    )?;
    outs.add_json(args.out.join("occupations.json"), &summary)?;
    outs.commit()?;
    Ok(summary)
}

// ---------------------------------------------------------------- debias

#[derive(Debug, Clone)]
pub struct DebiasArgs {
    pub embedding: PathBuf,
    pub dims: Option<usize>,
    pub candidates: PathBuf,
    pub test_pairs: PathBuf,
    pub output: PathBuf,
    pub skip_annihilated: bool,
    /// Where `selection.csv` and `debias.json` go; defaults to the
    /// directory of `output`.
    pub out: Option<PathBuf>,
}

/// Selects a projection and returns the debiased store with its report.
pub fn debias_with_selection(
    store: &EmbeddingStore,
    candidates: &Path,
    test_pairs: &Path,
    skip_annihilated: bool,
) -> Result<(EmbeddingStore, DebiasReport)> {
    let cands = load_pairs(open(candidates)?).in_file(candidates)?;
    let tests = load_pairs(open(test_pairs)?).in_file(test_pairs)?;
    let selection = select_projection(&cands, &tests, store)?;
    let outcome = debias_store(store, &selection.chosen, skip_annihilated)?;
    let report = DebiasReport::new(&selection, outcome.annihilated);
    Ok((outcome.store, report))
}

pub fn write_embedding(path: &Path, store: &EmbeddingStore) -> Result<()> {
    write_atomic_with(path, |w| {
        store.write_glove(w).map_err(|e| match e {
            embias::Error::Io(io) => io,
            other => std::io::Error::other(other.to_string()),
        })
    })
}

pub fn cmd_debias(args: &DebiasArgs) -> Result<DebiasReport> {
    let (store, _) = load_store(&args.embedding, args.dims)?;
    let (debiased, report) = debias_with_selection(
        &store,
        &args.candidates,
        &args.test_pairs,
        args.skip_annihilated,
    )?;
    let dir = args.out.clone().unwrap_or_else(|| {
        args.output
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default()
    });
    let mut outs = Outputs::default();
    outs.add_csv(
        dir.join("selection.csv"),
        &SELECTION_CSV_HEADER,
        report.csv_rows(),
    )?;
    outs.add_json(dir.join("debias.json"), &report)?;
    write_embedding(&args.output, &debiased)?;
    outs.commit()?;
    Ok(report)
}

// ---------------------------------------------------------------- full audit

#[derive(Debug, Clone, Serialize)]
struct RunMeta {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: String,
    started_unix_ms: u128,
    elapsed_ms: u128,
    outputs: Vec<String>,
}

pub const REPORT_FILE: &str = "audit_report.json";
pub const RUN_META_FILE: &str = "run_meta.json";

struct BatteryRun {
    results: Vec<BatteryResult>,
}

fn run_config_battery(
    spec: &crate::config::BatterySpec,
    lists: &BTreeMap<String, TargetList>,
    cats: &BTreeMap<String, Category>,
    store: &EmbeddingStore,
) -> Result<BatteryRun> {
    let targets: Vec<TargetList> = spec.targets.iter().map(|t| lists[t].clone()).collect();
    let results = run_battery(
        &targets,
        &cats[&spec.attribute_a],
        &cats[&spec.attribute_b],
        store,
    )?;
    Ok(BatteryRun { results })
}

fn resolve_categories(
    source: &BTreeMap<String, Category>,
    store: &EmbeddingStore,
    cap: usize,
) -> Result<BTreeMap<String, Category>> {
    source
        .iter()
        .map(|(name, c)| {
            Ok((
                name.clone(),
                Category::resolve(name, c.patterns.clone(), store, cap)?,
            ))
        })
        .collect()
}

/// Runs every configured analysis, debiases, reruns the gender-related
/// ones and writes the report plus CSV tables under `cfg.out`.
pub fn cmd_full_audit(cfg: &AuditConfig, config_path: &Path) -> Result<AuditReport> {
    let started = SystemTime::now();
    let clock = Instant::now();

    let (store, load) = load_store(&cfg.embedding, cfg.dims)?;
    let mut cats = BTreeMap::new();
    for (name, path) in &cfg.categories {
        cats.insert(
            name.clone(),
            load_category_file(name, path, &store, cfg.wildcard_cap)?,
        );
    }
    let mut lists = BTreeMap::new();
    for (name, path) in &cfg.targets {
        lists.insert(
            name.clone(),
            TargetList::new(name.clone(), load_words(path)?),
        );
    }
    let occupation_records = match &cfg.occupations {
        Some(spec) => Some(load_occupation_stats(open(&spec.path)?).in_file(&spec.path)?),
        None => None,
    };

    let mut outs = Outputs::default();

    let before: Vec<BatteryRun> = cfg
        .batteries
        .iter()
        .map(|b| run_config_battery(b, &lists, &cats, &store))
        .collect::<Result<_>>()?;
    let occ_before = match (&cfg.occupations, &occupation_records) {
        (Some(spec), Some(recs)) => Some(occupation_analysis(
            &store,
            recs,
            &cats[&spec.male],
            &cats[&spec.female],
            cfg.top_k,
        )?),
        _ => None,
    };

    let (debiased, debias_report) = debias_with_selection(
        &store,
        &cfg.candidates,
        &cfg.test_pairs,
        cfg.skip_annihilated,
    )?;
    let cats_after = resolve_categories(&cats, &debiased, cfg.wildcard_cap)?;

    let mut batteries = Vec::new();
    for (spec, run) in cfg.batteries.iter().zip(&before) {
        let after = if spec.gender {
            Some(run_config_battery(spec, &lists, &cats_after, &debiased)?)
        } else {
            None
        };
        let gaps_before = pairwise_gaps(&run.results, &spec.gaps)?;
        let gaps_after = match &after {
            Some(a) => Some(pairwise_gaps(&a.results, &spec.gaps)?),
            None => None,
        };
        let mut gaps = Vec::new();
        for (i, (a, b, g0)) in gaps_before.into_iter().enumerate() {
            let (gap_after, reduction) = match &gaps_after {
                Some(ga) => {
                    let g1 = ga[i].2;
                    let rep = gap_reduction(g0, g1)?;
                    (Some(Real(g1)), Some(Real(rep.reduction_percent)))
                }
                None => (None, None),
            };
            gaps.push(GapEntry {
                a,
                b,
                space: GAP_SPACE,
                gap_before: Real(g0),
                gap_after,
                reduction_percent: reduction,
            });
        }

        for r in &run.results {
            outs.add_csv(
                cfg.out.join(format!(
                    "battery-{}-{}-before.csv",
                    spec.name, r.target_label
                )),
                &BATTERY_CSV_HEADER,
                battery_rows(r),
            )?;
        }
        if let Some(a) = &after {
            for r in &a.results {
                outs.add_csv(
                    cfg.out.join(format!(
                        "battery-{}-{}-after.csv",
                        spec.name, r.target_label
                    )),
                    &BATTERY_CSV_HEADER,
                    battery_rows(r),
                )?;
            }
        }
        batteries.push(BatteryReport {
            name: spec.name.clone(),
            attribute_a: spec.attribute_a.clone(),
            attribute_b: spec.attribute_b.clone(),
            gender_related: spec.gender,
            before: run.results.iter().map(TargetSummary::from).collect(),
            after: after.map(|a| a.results.iter().map(TargetSummary::from).collect()),
            gaps,
        });
    }

    let occ_after = match (&cfg.occupations, &occupation_records) {
        (Some(spec), Some(recs)) => Some(occupation_analysis(
            &debiased,
            recs,
            &cats_after[&spec.male],
            &cats_after[&spec.female],
            cfg.top_k,
        )?),
        _ => None,
    };
    if let Some((_, rows)) = &occ_before {
        outs.add_csv(
            cfg.out.join("occupations-before.csv"),
            &OCCUPATION_CSV_HEADER,
            occupation_rows(rows),
        )?;
    }
    if let Some((_, rows)) = &occ_after {
        outs.add_csv(
            cfg.out.join("occupations-after.csv"),
            &OCCUPATION_CSV_HEADER,
            occupation_rows(rows),
        )?;
    }
    outs.add_csv(
        cfg.out.join("selection.csv"),
        &SELECTION_CSV_HEADER,
        debias_report.csv_rows(),
    )?;

    let report = AuditReport {
        schema_version: SCHEMA_VERSION,
        embedding: EmbeddingInfo::new(&cfg.embedding_label, &store, &load),
        categories: cats.values().map(CategoryInfo::from).collect(),
        batteries,
        occupations_before: occ_before.map(|(r, _)| r),
        occupations_after: occ_after.map(|(r, _)| r),
        debias: debias_report,
    };
    outs.add_json(cfg.out.join(REPORT_FILE), &report)?;

    if let Some(path) = &cfg.debiased_embedding {
        write_embedding(path, &debiased)?;
    }
    let mut written: Vec<String> = outs
        .paths()
        .filter_map(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    if let Some(p) = cfg.debiased_embedding.as_ref().and_then(|p| p.file_name()) {
        written.push(p.to_string_lossy().into_owned());
    }
    outs.commit()?;

    let meta = RunMeta {
        tool: "embias",
        version: env!("CARGO_PKG_VERSION"),
        command: "full-audit",
        config: config_path.display().to_string(),
        started_unix_ms: started
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or_default(),
        elapsed_ms: clock.elapsed().as_millis(),
        outputs: written,
    };
    let mut sidecar = Outputs::default();
    sidecar.add_json(cfg.out.join(RUN_META_FILE), &meta)?;
    sidecar.commit()?;
    Ok(report)
}
