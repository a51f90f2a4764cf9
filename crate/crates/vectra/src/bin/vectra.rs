//! Command-line front end: wires the library's evaluation pipelines onto
//! JSONL manifests and CSV reports. Data goes to files or stdout,
//! diagnostics to stderr; exit code 0 on success, 1 on input errors, 2 on
//! usage errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use vectra::annotation::majority_ranking;
use vectra::balance::{
    balance, BalanceOptions, BuiltinHooks, ExternalCommandHooks, ScoredSample, SynthesisHooks,
};
use vectra::calibration::{bin_votes, find_threshold};
use vectra::manifest::{
    read_features, read_jsonl, read_manifest, read_scoring_config, write_jsonl, write_manifest,
    write_report_csv, Manifest, ManifestRow, RankingRow, ReportTable, ResponseRow, RewardOutputRow,
    RewardRow, TallyRow, VoteRow,
};
use vectra::metaeval::instance_correlation;
use vectra::parser::parse_response;
use vectra::reward::total_reward;
use vectra::scoring::{uniform_average_score, vectra_score, ScoringConfig};
use vectra::types::{Assessment, DimensionAssessment, DimensionId, SampleRecord};

#[derive(Parser)]
#[command(
    name = "vectra",
    version = concat!(env!("CARGO_PKG_VERSION"), " (schema ", "1", ")"),
    about = "Visual quality evaluation toolkit for in-image machine translation"
)]
struct Cli {
    /// Seed for every stochastic step (k-means init, built-in synthesis).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Path to a scoring config JSON file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the DAR threshold tau.
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Override the "DAR is negligible" tolerance.
    #[arg(long, global = true)]
    epsilon_zero: Option<f64>,
    /// Suppress progress diagnostics on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Aggregation {
    Multiplicative,
    Uniform,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HookKind {
    BuiltIn,
    ExternalCommand,
}

#[derive(Subcommand)]
enum Command {
    /// Parse judge responses into an assessments manifest.
    Parse {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Annotator id recorded for rows that do not carry one.
        #[arg(long, default_value = "model")]
        annotator: String,
    },
    /// Compute aggregate scores for every manifest row.
    Score {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "multiplicative")]
        aggregation: Aggregation,
    },
    /// Score responses against gold assessments.
    Reward {
        #[arg(long = "in")]
        input: PathBuf,
        /// Gold manifest joined by sample id; rows may instead carry gold
        /// scores inline.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate multi-annotator manifests and/or pairwise tallies.
    Aggregate {
        #[arg(long = "in", requires = "out")]
        input: Option<PathBuf>,
        #[arg(long, requires = "input")]
        out: Option<PathBuf>,
        #[arg(long, requires = "rankings")]
        tallies: Option<PathBuf>,
        #[arg(long, requires = "tallies")]
        rankings: Option<PathBuf>,
    },
    /// Balance the marginal score distribution of a manifest.
    Balance {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_attempts: u64,
        #[arg(long, value_enum, default_value = "built-in")]
        hooks: HookKind,
        /// Command implementing the external hook protocol.
        #[arg(long, required_if_eq("hooks", "external-command"))]
        hook_cmd: Option<String>,
    },
    /// Select diverse sample ids from a feature file.
    Sample {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        k: usize,
        /// Output file; ids go to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bin expert votes by DAR and locate the rejection inflection.
    Calibrate {
        #[arg(long)]
        votes: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long, default_value_t = 0.9)]
        cutoff: f64,
    },
    /// Per-dimension correlation table between two manifests.
    Metaeval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli)?;
    match cli.command {
        Command::Parse {
            input,
            out,
            annotator,
        } => cmd_parse(&input, &out, &annotator, cli.quiet),
        Command::Score {
            input,
            out,
            aggregation,
        } => cmd_score(&input, &out, aggregation, &config, cli.quiet),
        Command::Reward { input, gold, out } => cmd_reward(&input, gold.as_deref(), &out),
        Command::Aggregate {
            input,
            out,
            tallies,
            rankings,
        } => cmd_aggregate(
            input.as_deref(),
            out.as_deref(),
            tallies.as_deref(),
            rankings.as_deref(),
        ),
        Command::Balance {
            input,
            out,
            report,
            max_attempts,
            hooks,
            hook_cmd,
        } => cmd_balance(
            &input,
            &out,
            &report,
            max_attempts,
            hooks,
            hook_cmd,
            cli.seed,
            cli.quiet,
        ),
        Command::Sample { features, k, out } => cmd_sample(&features, k, out.as_deref(), cli.seed),
        Command::Calibrate {
            votes,
            out,
            bins,
            cutoff,
        } => cmd_calibrate(&votes, &out, bins, cutoff),
        Command::Metaeval { pred, gold, out } => cmd_metaeval(&pred, &gold, &out, &config),
    }
}

fn load_config(cli: &Cli) -> Result<ScoringConfig> {
    let mut config = match &cli.config {
        Some(path) => read_scoring_config(path)?,
        None => ScoringConfig::default(),
    };
    if let Some(tau) = cli.tau {
        config.tau = tau;
    }
    if let Some(eps) = cli.epsilon_zero {
        config.epsilon_zero = eps;
    }
    config.validate()?;
    Ok(config)
}

fn cmd_parse(input: &Path, out: &Path, annotator: &str, quiet: bool) -> Result<()> {
    let responses: Vec<ResponseRow> = read_jsonl(input)?;
    let parsed: Vec<(ResponseRow, Option<Assessment>)> = responses
        .into_par_iter()
        .map(|row| {
            let assessment = parse_response(&row.response_text).complete_assessment();
            (row, assessment)
        })
        .collect();

    let mut rows = Vec::new();
    let mut skipped = 0usize;
    for (response, assessment) in parsed {
        let Some(assessment) = assessment else {
            skipped += 1;
            if !quiet {
                eprintln!(
                    "warning: response {} did not parse into 14 dimensions, skipped",
                    response.sample_id
                );
            }
            continue;
        };
        let annotator_id = response
            .annotator_id
            .clone()
            .unwrap_or_else(|| annotator.to_string());
        let mut assessments = BTreeMap::new();
        assessments.insert(annotator_id, assessment);
        rows.push(ManifestRow::new(SampleRecord {
            sample_id: response.sample_id,
            source_image: response.source_image,
            trans_image: response.trans_image,
            lang_pair: response.lang_pair,
            system_id: response.system_id,
            assessments,
        }));
    }
    write_manifest(&Manifest { rows }, out)?;
    if !quiet && skipped > 0 {
        eprintln!("parse: skipped {skipped} responses");
    }
    Ok(())
}

fn cmd_score(
    input: &Path,
    out: &Path,
    aggregation: Aggregation,
    config: &ScoringConfig,
    quiet: bool,
) -> Result<()> {
    let mut manifest = read_manifest(input)?;
    let values: Vec<Result<f64>> = manifest
        .rows
        .par_iter()
        .map(|row| {
            let assessment = row
                .consensus()
                .with_context(|| format!("sample {}", row.record.sample_id))?;
            Ok(match aggregation {
                Aggregation::Multiplicative => vectra_score(&assessment, config).value,
                Aggregation::Uniform => uniform_average_score(&assessment, config),
            })
        })
        .collect();
    let mut sum = 0.0;
    for (row, value) in manifest.rows.iter_mut().zip(values) {
        let value = value?;
        sum += value;
        row.vectra_score = Some(value);
    }
    if !quiet && !manifest.rows.is_empty() {
        eprintln!(
            "score: {} samples, corpus mean {:.4}",
            manifest.rows.len(),
            sum / manifest.rows.len() as f64
        );
    }
    write_manifest(&manifest, out)?;
    Ok(())
}

fn gold_from_inline(row: &RewardRow) -> Result<Assessment> {
    let map = row
        .gold
        .as_ref()
        .ok_or_else(|| anyhow!("row has no inline gold and no --gold manifest was given"))?;
    let entries = map
        .iter()
        .map(|(&d, &s)| DimensionAssessment::new(d, s, ""));
    Assessment::from_entries(entries).map_err(|e| anyhow!("inline gold: {e}"))
}

fn cmd_reward(input: &Path, gold: Option<&Path>, out: &Path) -> Result<()> {
    let rows: Vec<RewardRow> = read_jsonl(input)?;
    let gold_by_id: BTreeMap<String, Assessment> = match gold {
        Some(path) => read_manifest(path)?
            .rows
            .iter()
            .map(|row| {
                let a = row
                    .consensus()
                    .with_context(|| format!("gold sample {}", row.record.sample_id))?;
                Ok((row.record.sample_id.clone(), a))
            })
            .collect::<Result<_>>()?,
        None => BTreeMap::new(),
    };

    let outputs: Vec<Result<RewardOutputRow>> = rows
        .par_iter()
        .map(|row| {
            let gold_assessment = match (&row.gold, &row.sample_id) {
                (Some(_), _) => gold_from_inline(row)?,
                (None, Some(id)) => gold_by_id
                    .get(id)
                    .cloned()
                    .ok_or_else(|| anyhow!("sample {id} not found in gold manifest"))?,
                (None, None) => bail!("row carries neither inline gold nor a sample_id"),
            };
            Ok(RewardOutputRow {
                sample_id: row.sample_id.clone(),
                breakdown: total_reward(&row.response_text, &gold_assessment),
            })
        })
        .collect();
    let outputs: Vec<RewardOutputRow> = outputs.into_iter().collect::<Result<_>>()?;
    write_jsonl(&outputs, out)?;
    Ok(())
}

fn cmd_aggregate(
    input: Option<&Path>,
    out: Option<&Path>,
    tallies: Option<&Path>,
    rankings: Option<&Path>,
) -> Result<()> {
    if input.is_none() && tallies.is_none() {
        bail!("nothing to do: pass --in/--out and/or --tallies/--rankings");
    }
    if let (Some(input), Some(out)) = (input, out) {
        let mut manifest = read_manifest(input)?;
        for row in &mut manifest.rows {
            let consensus = row
                .consensus()
                .with_context(|| format!("sample {}", row.record.sample_id))?;
            row.record.assessments = BTreeMap::from([("consensus".to_string(), consensus)]);
        }
        write_manifest(&manifest, out)?;
    }
    if let (Some(tallies), Some(rankings)) = (tallies, rankings) {
        let rows: Vec<TallyRow> = read_jsonl(tallies)?;
        let ranked: Vec<RankingRow> = rows
            .iter()
            .map(|row| {
                let ranking = majority_ranking(&row.tally)
                    .with_context(|| format!("sample {}", row.sample_id))?;
                Ok(RankingRow {
                    sample_id: row.sample_id.clone(),
                    ranking,
                })
            })
            .collect::<Result<_>>()?;
        write_jsonl(&ranked, rankings)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_balance(
    input: &Path,
    out: &Path,
    report_path: &Path,
    max_attempts: u64,
    hooks: HookKind,
    hook_cmd: Option<String>,
    seed: u64,
    quiet: bool,
) -> Result<()> {
    let manifest = read_manifest(input)?;
    let originals: BTreeMap<String, ManifestRow> = manifest
        .rows
        .iter()
        .map(|r| (r.record.sample_id.clone(), r.clone()))
        .collect();
    let dataset: Vec<ScoredSample> = manifest
        .rows
        .iter()
        .map(|row| ScoredSample::from_record(&row.record))
        .collect::<Result<_, _>>()?;

    let mut builtin;
    let mut external;
    let hook: &mut dyn SynthesisHooks = match hooks {
        HookKind::BuiltIn => {
            builtin = BuiltinHooks::seeded(seed);
            &mut builtin
        }
        HookKind::ExternalCommand => {
            external = ExternalCommandHooks::new(hook_cmd.expect("required by clap"));
            &mut external
        }
    };

    let (balanced, report) = balance(dataset, hook, &BalanceOptions { max_attempts })?;

    let rows: Vec<ManifestRow> = balanced
        .into_iter()
        .map(|sample| match originals.get(&sample.sample_id) {
            Some(row) => row.clone(),
            None => synthetic_row(&sample),
        })
        .collect();
    write_manifest(&Manifest { rows }, out)?;

    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(report_path, json + "\n")
        .with_context(|| format!("writing {}", report_path.display()))?;

    if !quiet {
        for warning in &report.warnings {
            eprintln!("warning: {warning}");
        }
        eprintln!(
            "balance: {} augmented, {} removed",
            report
                .augmentations
                .iter()
                .map(|a| a.added.len())
                .sum::<usize>(),
            report.removals.len()
        );
    }
    Ok(())
}

fn synthetic_row(sample: &ScoredSample) -> ManifestRow {
    let assessment = Assessment::from_score_fn(|d| sample.scores.get(d));
    ManifestRow::new(SampleRecord {
        sample_id: sample.sample_id.clone(),
        source_image: String::new(),
        trans_image: String::new(),
        lang_pair: String::new(),
        system_id: "synthetic".to_string(),
        assessments: BTreeMap::from([("synthetic".to_string(), assessment)]),
    })
}

fn cmd_sample(features: &Path, k: usize, out: Option<&Path>, seed: u64) -> Result<()> {
    let matrix = read_features(features)?;
    let ids = vectra::sampling::diversity_sample(&matrix, k, seed)?;
    let text: String = ids.iter().map(|id| format!("{id}\n")).collect();
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_calibrate(votes: &Path, out: &Path, bins: usize, cutoff: f64) -> Result<()> {
    let rows: Vec<VoteRow> = read_jsonl(votes)?;
    let votes: Vec<_> = rows.iter().map(VoteRow::vote).collect();
    let curve = bin_votes(&votes, bins)?;

    let table = ReportTable {
        header: ["bin_lower", "bin_upper", "n", "rate"]
            .map(String::from)
            .to_vec(),
        rows: curve
            .bins
            .iter()
            .map(|bin| {
                vec![
                    format!("{}", bin.lower.value()),
                    format!("{}", bin.upper.value()),
                    format!("{}", bin.accepts + bin.rejects),
                    bin.rate().map(|r| format!("{r}")).unwrap_or_default(),
                ]
            })
            .collect(),
    };
    write_report_csv(&table, out)?;

    let tau = find_threshold(&curve, cutoff)?;
    println!("{}", tau.value());
    Ok(())
}

fn cmd_metaeval(pred: &Path, gold: &Path, out: &Path, config: &ScoringConfig) -> Result<()> {
    let pred_manifest = read_manifest(pred)?;
    let gold_manifest = read_manifest(gold)?;
    if pred_manifest.rows.is_empty() {
        bail!("prediction manifest is empty");
    }

    let mut pred_assessments = Vec::new();
    let mut gold_assessments = Vec::new();
    for row in &pred_manifest.rows {
        let gold_row = gold_manifest
            .get(&row.record.sample_id)
            .ok_or_else(|| anyhow!("sample {} missing from gold manifest", row.record.sample_id))?;
        pred_assessments.push(row.consensus()?);
        gold_assessments.push(gold_row.consensus()?);
    }

    let mut rows = Vec::new();
    for d in DimensionId::ALL {
        let p: Vec<f64> = pred_assessments
            .iter()
            .map(|a| a.score(d).as_f64())
            .collect();
        let g: Vec<f64> = gold_assessments
            .iter()
            .map(|a| a.score(d).as_f64())
            .collect();
        rows.push(correlation_row(d.tag(), &p, &g));
    }
    let p: Vec<f64> = pred_assessments
        .iter()
        .map(|a| vectra_score(a, config).value)
        .collect();
    let g: Vec<f64> = gold_assessments
        .iter()
        .map(|a| vectra_score(a, config).value)
        .collect();
    rows.push(correlation_row("Vectra Score", &p, &g));

    write_report_csv(
        &ReportTable {
            header: ["dimension", "pearson", "kendall"]
                .map(String::from)
                .to_vec(),
            rows,
        },
        out,
    )?;
    Ok(())
}

fn correlation_row(name: &str, pred: &[f64], gold: &[f64]) -> Vec<String> {
    match instance_correlation(pred, gold) {
        Ok(c) => vec![
            name.to_string(),
            format!("{}", c.pearson),
            format!("{}", c.kendall),
        ],
        Err(_) => vec![name.to_string(), "NA".to_string(), "NA".to_string()],
    }
}
