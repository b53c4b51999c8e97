use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use delve::bench::{run_rollout_report, run_speed_sweep, sweep_csv, PolicyKind, RolloutOptions, SweepOptions};
use delve::obs::ObsMode;
use delve::Tier;

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sweep,
    Rollout,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Throughput sweeps and achievement reports for the delve environment.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[arg(long, value_enum, default_value = "sweep")]
    mode: Mode,
    /// classic or extended.
    #[arg(long, default_value = "extended")]
    tier: String,
    /// Comma-separated environment counts for a sweep; the first is used for a rollout.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,256,512,1024")]
    workers: Vec<u32>,
    /// Environment steps per sweep row, or total steps for a rollout.
    #[arg(long, default_value_t = 100_000)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// random or scripted.
    #[arg(long, default_value = "random")]
    policy: String,
    /// none, symbolic or tiles.
    #[arg(long, default_value = "none")]
    obs: String,
    /// Rayon threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: u32,
    /// Episode length cap for rollouts.
    #[arg(long)]
    max_episode_length: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn run(args: Args) -> delve::Result<String> {
    let tier = Tier::parse(&args.tier)?;
    let policy = PolicyKind::parse(&args.policy)?;
    let obs = ObsMode::parse(&args.obs)?;
    match args.mode {
        Mode::Sweep => {
            let mut opts = SweepOptions::new(tier);
            opts.policy = policy;
            opts.obs = obs;
            opts.seed = args.seed;
            opts.threads = args.threads;
            let rows = run_speed_sweep(&opts, &args.workers, args.steps)?;
            Ok(match args.format {
                Format::Csv => sweep_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows).unwrap(),
            })
        }
        Mode::Rollout => {
            let n = args.workers.first().copied().unwrap_or(1);
            let mut opts = RolloutOptions::new(tier, n, args.steps, policy, args.seed);
            opts.threads = args.threads;
            if let Some(m) = args.max_episode_length {
                opts.max_episode_length = m;
            }
            let report = run_rollout_report(&opts)?;
            Ok(match args.format {
                Format::Csv => report.to_csv(),
                Format::Json => serde_json::to_string_pretty(&report).unwrap(),
            })
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let out = args.out.clone();
    let text = match run(args) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("delve-bench: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match out {
        Some(path) => std::fs::write(&path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("delve-bench: {e}");
            ExitCode::FAILURE
        }
    }
}
