use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use deepdefect::config::{resolve_config, ModelChoice, Overrides};
use deepdefect::labels::{parse_class_tag, read_label_file};
use deepdefect::report::{emit_report, read_rank_table};
use deepdefect::runner::run_experiment;
use deepdefect_core::data::Label;
use deepdefect_core::eval::{confusion, metrics, weighted_rank};

#[derive(Parser)]
#[command(
    name = "deepdefect",
    version,
    about = "Defect prediction with deep generative models: train, cross-validate and report"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config-driven experiment and write reports to the output dir
    Run {
        /// Experiment config file (TOML)
        #[arg(long)]
        config: PathBuf,
        /// Dataset file, overriding the config
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Model to train, overriding the config
        #[arg(long, value_enum)]
        model: Option<ModelChoice>,
        /// Hidden layer sizes, comma separated (e.g. 20,15,10)
        #[arg(long, value_delimiter = ',')]
        layers: Option<Vec<usize>>,
        /// Fold count, overriding the config
        #[arg(long)]
        folds: Option<usize>,
        /// Master seed, overriding the config
        #[arg(long)]
        seed: Option<u64>,
        /// Fit normalization on each training fold instead of the whole dataset
        #[arg(long = "leak-free-norm")]
        leak_free_norm: bool,
        /// Output directory, overriding the config
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the five metrics from prediction and label files (one tag per line)
    Metrics {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Class treated as positive (default: non-defective)
        #[arg(long = "positive-class")]
        positive_class: Option<String>,
    },
    /// Weighted-rank the methods of a methods x datasets accuracy table
    Rank {
        #[arg(long)]
        table: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run {
            config,
            dataset,
            model,
            layers,
            folds,
            seed,
            leak_free_norm,
            out,
        } => {
            let overrides = Overrides {
                dataset,
                model,
                layers,
                folds,
                seed,
                leak_free_norm,
                out,
            };
            let resolved = resolve_config(&config, &overrides)?;
            let bundle = run_experiment(&resolved)?;
            let files = emit_report(&bundle, &resolved.output_dir)?;
            println!(
                "dataset {}: {} samples, {} features, {:.1}% defective",
                bundle.dataset_name,
                bundle.sample_count,
                bundle.feature_count,
                bundle.defective_ratio * 100.0
            );
            if let Some(note) = &bundle.sample_count_note {
                println!("note: {note}");
            }
            match (bundle.summary.accuracy.mean, bundle.summary.accuracy.std) {
                (Some(mean), Some(std)) => println!(
                    "{} accuracy {:.2} +/- {:.2} over {} folds",
                    resolved.model,
                    mean * 100.0,
                    std * 100.0,
                    bundle.summary.k()
                ),
                _ => println!("accuracy undefined on every fold"),
            }
            println!("wrote {}", files.manifest.parent().unwrap_or(&resolved.output_dir).display());
        }
        Command::Metrics {
            predictions,
            labels,
            positive_class,
        } => {
            let predicted = read_label_file(&predictions)?;
            let actual = read_label_file(&labels)?;
            let positive = match positive_class {
                Some(tag) => parse_class_tag(&tag)?,
                None => Label::NonDefective,
            };
            let report = metrics(&confusion(&predicted, &actual, positive)?);
            let cell = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
            println!("accuracy,precision,recall,lr_plus,lr_minus");
            println!(
                "{},{},{},{},{}",
                cell(report.accuracy),
                cell(report.precision),
                cell(report.recall),
                cell(report.lr_plus),
                cell(report.lr_minus)
            );
        }
        Command::Rank { table } => {
            let parsed = read_rank_table(&table)?;
            let ranked = weighted_rank(&parsed)?;
            println!("method,score,rank");
            for row in ranked {
                println!("{},{:.4},{}", row.method, row.score, row.rank);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
