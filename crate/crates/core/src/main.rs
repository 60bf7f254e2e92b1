use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use multiaspect::cli::*;
use multiaspect::{Error, Result};

#[derive(Parser)]
#[command(name = "multiaspect", version, about = "Multi-aspect SAR target recognition")]
struct Args {
    /// Pipeline configuration (TOML); defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic multi-aspect dataset.
    Synth {
        out_dir: PathBuf,
        /// Synthetic spec (TOML).
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Extract descriptors of every image into a feature archive.
    Extract { dataset: PathBuf, out: PathBuf },
    /// Train the reducer and sequence classifier.
    Train {
        /// Dataset directory or feature archive; defaults to data.train_dir.
        input: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
        /// Fraction of each class's training images to use.
        #[arg(long)]
        train_fraction: Option<f64>,
    },
    /// Evaluate a model on a dataset.
    Eval {
        model: PathBuf,
        /// Defaults to data.test_dir.
        dataset: Option<PathBuf>,
        /// Fraction of test pixels replaced by uniform noise.
        #[arg(long)]
        noise: Option<f64>,
        /// Keep test aspects in LO:HI degrees.
        #[arg(long, value_parser = parse_range)]
        aspect_range: Option<(f64, f64)>,
        /// Minimum spacing of kept test aspects, degrees.
        #[arg(long)]
        aspect_interval: Option<f64>,
        /// Print key=value lines instead of the table.
        #[arg(long)]
        machine: bool,
    },
    /// Print a model's shapes and configuration.
    InspectModel { model: PathBuf },
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}"));
    Ok((p(lo)?, p(hi)?))
}

fn need(path: Option<PathBuf>, what: &str) -> Result<PathBuf> {
    path.ok_or_else(|| Error::Config(format!("no {what} given on the command line or in the config")))
}

fn run(args: Args) -> Result<()> {
    let mut config = match &args.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = args.seed {
        config.set_seed(s);
    }
    match args.cmd {
        Cmd::Synth { out_dir, spec } => {
            let n = cmd_synth(spec.as_deref(), &out_dir, args.seed)?;
            println!("wrote {n} images to {}", out_dir.display());
        }
        Cmd::Extract { dataset, out } => {
            let n = cmd_extract(&dataset, &out, &config)?;
            println!("wrote {n} feature records to {}", out.display());
        }
        Cmd::Train { input, out, train_fraction } => {
            if let Some(f) = train_fraction {
                config.experiment.train_fraction = f;
            }
            let input = need(input.or(config.data.train_dir.clone()), "training data")?;
            cmd_train(&input, &config, &out, |line| println!("{line}"))?;
            println!("saved model to {}", out.display());
        }
        Cmd::Eval { model, dataset, noise, aspect_range, aspect_interval, machine } => {
            let mut exp = config.experiment.clone();
            if let Some(n) = noise {
                exp.noise = n;
            }
            if let Some((lo, hi)) = aspect_range {
                exp.aspect_range = Some([lo, hi]);
            }
            if aspect_interval.is_some() {
                exp.aspect_interval = aspect_interval;
            }
            let dataset = need(dataset.or(config.data.test_dir.clone()), "test dataset")?;
            let report = cmd_eval(&model, &dataset, &exp)?;
            if machine {
                print!("{}", report.to_key_value());
            } else {
                print!("{}", report.to_text());
            }
        }
        Cmd::InspectModel { model } => print!("{}", cmd_inspect(&model)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
