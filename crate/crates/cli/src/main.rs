//! Batch command-line surface for the garment patch pipeline.
//!
//! Subcommands: decompose | retarget | masks | edit | batch | inspect.
//! Diagnostics are single-line JSON on standard error; exit status 2 marks
//! validation failures and 1 a batch run with failed jobs.

mod commands;
mod config;
mod diag;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CategoryArg;
use config::{parse_canvas, RunConfig};

#[derive(Parser)]
#[command(name = "patchwarp", version, about = "Pose-guided garment patch warping pipeline")]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Base RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Random-erase application probability.
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Output canvas as WxH (overrides the target person's canvas).
    #[arg(long, global = true, value_parser = parse_canvas)]
    canvas: Option<(u32, u32)>,

    /// Worker parallelism for batch runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a person's garment into a normalized patch archive.
    Decompose {
        person_dir: PathBuf,
        out_archive: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        category: CategoryArg,
    },
    /// Retarget an archive onto another person's pose and stitch.
    Retarget {
        archive: PathBuf,
        target_person_dir: PathBuf,
        out_dir: PathBuf,
        /// Seed for the random erase (defaults to --seed).
        #[arg(long)]
        erase_seed: Option<u64>,
    },
    /// Compute garment / aligned / misaligned masks from a warp and parsing.
    Masks {
        warped_png: PathBuf,
        warp_mask_png: PathBuf,
        parsing_png: PathBuf,
        labels_json: PathBuf,
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        category: CategoryArg,
    },
    /// Apply a JSON edit script to a try-on bundle.
    Edit {
        script: PathBuf,
        out_dir: PathBuf,
        #[arg(long)]
        upper: Option<PathBuf>,
        #[arg(long)]
        lower: Option<PathBuf>,
        #[arg(long)]
        target: PathBuf,
    },
    /// Run a JSON-lines job manifest with configured parallelism.
    Batch {
        manifest: PathBuf,
        out_root: PathBuf,
    },
    /// Summarize an artifact (person dir, archive, mask/image PNG, feature map).
    Inspect { path: PathBuf },
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(alpha) = cli.alpha {
        config.alpha = alpha;
    }
    if let Some(canvas) = cli.canvas {
        config.canvas = canvas;
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = jobs;
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            // Usage text is human-facing; the diagnostic line is for
            // machines.
            println!("{err}");
            diag::emit_error("InvalidArguments", &err.kind().to_string());
            return ExitCode::from(2);
        }
    };
    let config = match load_config(&cli) {
        Ok(config) => config,
        Err(err) => return diag::report_anyhow(&err),
    };

    let result: anyhow::Result<ExitCode> = match &cli.command {
        Command::Decompose {
            person_dir,
            out_archive,
            category,
        } => commands::decompose::run(person_dir, out_archive, *category, &config)
            .map(|()| ExitCode::SUCCESS),
        Command::Retarget {
            archive,
            target_person_dir,
            out_dir,
            erase_seed,
        } => commands::retarget::run(
            archive,
            target_person_dir,
            out_dir,
            &config,
            cli.canvas,
            erase_seed.or(cli.seed),
            cli.alpha,
        )
        .map(|()| ExitCode::SUCCESS),
        Command::Masks {
            warped_png,
            warp_mask_png,
            parsing_png,
            labels_json,
            out_dir,
            category,
        } => commands::masks::run(
            warped_png,
            warp_mask_png,
            parsing_png,
            labels_json,
            out_dir,
            *category,
        )
        .map(|()| ExitCode::SUCCESS),
        Command::Edit {
            script,
            out_dir,
            upper,
            lower,
            target,
        } => commands::edit::run(
            upper.as_deref(),
            lower.as_deref(),
            target,
            script,
            out_dir,
            &config,
        )
        .map(|()| ExitCode::SUCCESS),
        Command::Batch { manifest, out_root } => {
            commands::batch::run(manifest, out_root, &config, cli.jobs).map(|all_ok| {
                if all_ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            })
        }
        Command::Inspect { path } => commands::inspect::run(path).map(|()| ExitCode::SUCCESS),
    };

    match result {
        Ok(code) => code,
        Err(err) => diag::report_anyhow(&err),
    }
}
