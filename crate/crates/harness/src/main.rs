//! Command-line front end for the selection experiments.

use clap::{Parser, Subcommand};
use isac_harness::config::{ExperimentConfig, Sweep};
use isac_harness::oracle::oracle_check;
use isac_harness::runner::run_experiment;
use isac_harness::seed::{derive_seed, SCENE_STREAM};
use isac_harness::{output, HarnessError};
use isac_select::scene::generate_scene;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "isac-sim", version, about = "Greedy chain-selection experiment runner")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the master seed from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for CSV, manifest and plot data.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker thread count (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Also emit per-figure whitespace-delimited plot files.
    #[arg(long, global = true)]
    plot_data: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run an SNR or subset-size sweep and write aggregated results.
    Sweep,
    /// Trace the communication/sensing trade-off over a weight grid.
    Pareto,
    /// Sweep the selected chain count and report energy efficiency.
    Ee,
    /// Cross-check greedy scores, updates and identities on small scenes.
    Oracle,
    /// Generate the seed-derived scene and dump it as JSON.
    SceneDump,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| HarnessError::config("--config <path> is required"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn check_verb_matches_sweep(cmd: &Cmd, cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    let ok = match cmd {
        Cmd::Sweep => matches!(cfg.sweep, Sweep::Snr(_) | Sweep::K(_)),
        Cmd::Pareto => matches!(cfg.sweep, Sweep::Pareto(_)),
        Cmd::Ee => matches!(cfg.sweep, Sweep::Ee(_)),
        Cmd::Oracle | Cmd::SceneDump => true,
    };
    if ok {
        Ok(())
    } else {
        Err(HarnessError::config(format!(
            "configuration sweep kind '{}' does not match this subcommand",
            cfg.sweep.kind()
        )))
    }
}

fn run(cli: &Cli) -> Result<ExitCode, HarnessError> {
    let cfg = load_config(cli)?;
    check_verb_matches_sweep(&cli.cmd, &cfg)?;

    let pool = match cli.threads {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::config(format!("thread pool: {e}")))?,
        ),
        None => None,
    };
    match cli.cmd {
        Cmd::Sweep | Cmd::Pareto | Cmd::Ee => {
            let records = match &pool {
                Some(p) => p.install(|| run_experiment(&cfg)),
                None => run_experiment(&cfg),
            }?;
            let paths = output::persist(&cli.out, &cfg, &records, cli.plot_data)?;
            println!(
                "{} points x {} methods x {} trials -> {} rows",
                cfg.sweep.len(),
                cfg.methods.len(),
                cfg.trials,
                records.len()
            );
            for p in paths {
                println!("wrote {}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Oracle => {
            let report = match &pool {
                Some(p) => p.install(|| oracle_check(&cfg, None)),
                None => oracle_check(&cfg, None),
            }?;
            println!("{report}");
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        Cmd::SceneDump => {
            let seed = derive_seed(cfg.seed, &[0, 0, SCENE_STREAM]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scene = generate_scene(&cfg.geometry, &mut rng)?;
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("scene.json");
            std::fs::write(&path, serde_json::to_string_pretty(&scene)?)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
