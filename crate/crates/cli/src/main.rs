use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use embias_cli::commands::{
    self, AssocArgs, BatteryArgs, DebiasArgs, OccupationArgs, GENDER_VS_RATIO,
};
use embias_cli::config::AuditConfig;
use embias_cli::io::fmt_num;
use embias_cli::Result;

/// Measure and remove gender associations in word embeddings.
#[derive(Debug, Parser)]
#[command(name = "embias", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct EmbeddingOpts {
    /// GloVe or word2vec text embedding file.
    #[arg(long)]
    embedding: PathBuf,
    /// Expected vector dimension; a mismatch is an error.
    #[arg(long)]
    dims: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score words against one category.
    Assoc {
        #[command(flatten)]
        emb: EmbeddingOpts,
        /// Category word list (`word` or `prefix*` per line).
        #[arg(long)]
        category: PathBuf,
        /// Optional directory for `assoc.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Words to score.
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Place target lists on a two-category plane.
    Battery {
        #[command(flatten)]
        emb: EmbeddingOpts,
        /// File of `label = word-list-path` lines.
        #[arg(long)]
        targets: PathBuf,
        #[arg(long)]
        attribute_a: PathBuf,
        #[arg(long)]
        attribute_b: PathBuf,
        #[arg(long, default_value = "battery-out")]
        out: PathBuf,
    },
    /// Correlate occupation gender scores with employment ratios.
    Occupations {
        #[command(flatten)]
        emb: EmbeddingOpts,
        /// CSV with header `occupation,male_count,female_count`.
        #[arg(long)]
        occupations: PathBuf,
        #[arg(long)]
        male: PathBuf,
        #[arg(long)]
        female: PathBuf,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long, default_value = "occupations-out")]
        out: PathBuf,
    },
    /// Pick a gender direction and project it out of every vector.
    Debias {
        #[command(flatten)]
        emb: EmbeddingOpts,
        /// Candidate pairs, `left,right` per line.
        #[arg(long)]
        candidates: PathBuf,
        /// Held-out gendered pairs used to score candidates.
        #[arg(long)]
        test_pairs: PathBuf,
        /// Where to write the debiased embedding.
        #[arg(long)]
        output: PathBuf,
        /// Drop words left with no component off the direction instead of failing.
        #[arg(long)]
        skip_annihilated: bool,
        /// Directory for `selection.csv` and `debias.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every analysis before and after debiasing, from a config file.
    FullAudit {
        /// `key = value` audit configuration.
        config: PathBuf,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override `skip_annihilated`.
        #[arg(long)]
        skip_annihilated: bool,
        /// Override `top_k`.
        #[arg(long)]
        top_k: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Assoc {
            emb,
            category,
            out,
            words,
        } => {
            let result = commands::cmd_assoc(&AssocArgs {
                embedding: emb.embedding,
                dims: emb.dims,
                category,
                words,
                out,
            })?;
            println!("word,category,score");
            for row in result.csv_rows() {
                println!("{}", row.join(","));
            }
            for w in &result.missing {
                eprintln!("not in vocabulary: {w}");
            }
        }
        Command::Battery {
            emb,
            targets,
            attribute_a,
            attribute_b,
            out,
        } => {
            let (_, summary) = commands::cmd_battery(&BatteryArgs {
                embedding: emb.embedding,
                dims: emb.dims,
                targets_manifest: targets,
                attribute_a,
                attribute_b,
                out: out.clone(),
            })?;
            for t in &summary.targets {
                println!(
                    "{}: {}/{} words, centroid ({}, {})",
                    t.label,
                    t.found,
                    t.words,
                    fmt_num(t.centroid[0].0),
                    fmt_num(t.centroid[1].0)
                );
            }
            for g in &summary.gaps {
                println!("gap {}-{}: {}", g.a, g.b, fmt_num(g.gap_before.0));
            }
            println!("wrote {}", out.display());
        }
        Command::Occupations {
            emb,
            occupations,
            male,
            female,
            top_k,
            out,
        } => {
            let summary = commands::cmd_occupations(&OccupationArgs {
                embedding: emb.embedding,
                dims: emb.dims,
                occupations,
                male,
                female,
                top_k,
                out: out.clone(),
            })?;
            let r = &summary.report;
            println!("{} of {} occupations in vocabulary", r.used, r.occupations);
            for c in &r.correlations {
                println!(
                    "{}: rho={} p={} n={}",
                    c.pairing,
                    fmt_num(c.rho.0),
                    fmt_num(c.p_value.0),
                    c.n
                );
            }
            println!("most male-associated: {}", r.top_male.join(", "));
            println!("most female-associated: {}", r.top_female.join(", "));
            println!("wrote {}", out.display());
        }
        Command::Debias {
            emb,
            candidates,
            test_pairs,
            output,
            skip_annihilated,
            out,
        } => {
            let report = commands::cmd_debias(&DebiasArgs {
                embedding: emb.embedding,
                dims: emb.dims,
                candidates,
                test_pairs,
                output: output.clone(),
                skip_annihilated,
                out,
            })?;
            println!("left,right,status,score,selected");
            for row in report.csv_rows() {
                println!("{}", row.join(","));
            }
            if !report.annihilated.is_empty() {
                eprintln!("dropped {} annihilated words", report.annihilated.len());
            }
            println!("wrote {}", output.display());
        }
        Command::FullAudit {
            config,
            out,
            skip_annihilated,
            top_k,
        } => {
            let mut cfg = AuditConfig::read(&config)?;
            if let Some(dir) = out {
                cfg.debiased_embedding = cfg
                    .debiased_embedding
                    .as_ref()
                    .and_then(|p| p.file_name())
                    .map(|n| dir.join(n));
                cfg.out = dir;
            }
            cfg.skip_annihilated |= skip_annihilated;
            if let Some(k) = top_k {
                cfg.top_k = k;
            }
            let report = commands::cmd_full_audit(&cfg, &config)?;
            println!(
                "selected {}/{} (score {})",
                report.debias.selected.left,
                report.debias.selected.right,
                fmt_num(report.debias.selection_score.0)
            );
            for (stage, occ) in [
                ("before", &report.occupations_before),
                ("after", &report.occupations_after),
            ] {
                if let Some(c) = occ.as_ref().and_then(|o| o.correlation(GENDER_VS_RATIO)) {
                    println!(
                        "occupations {stage}: rho={} p={}",
                        fmt_num(c.rho.0),
                        fmt_num(c.p_value.0)
                    );
                }
            }
            for b in &report.batteries {
                for g in &b.gaps {
                    match g.reduction_percent {
                        Some(r) => {
                            println!("{} gap {}-{}: reduced {}%", b.name, g.a, g.b, fmt_num(r.0))
                        }
                        None => println!(
                            "{} gap {}-{}: {}",
                            b.name,
                            g.a,
                            g.b,
                            fmt_num(g.gap_before.0)
                        ),
                    }
                }
            }
            println!("wrote {}", cfg.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("embias: {e}");
            e.exit_code()
        }
    }
}
