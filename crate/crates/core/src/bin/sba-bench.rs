use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sublinear_ba::bench::{self, CsvRow, ExperimentConfig, VerifyConfig, OUTPUT_DIR_ENV};
use sublinear_ba::{run_trial, CommitteeProfile, InputSpec, Mode, StrategyKind};

#[derive(Parser)]
#[command(name = "sba-bench", version, about = "Run, sweep and verify the committee agreement simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One trial; writes the JSON report. Exit code 0 iff every property holds.
    Run(RunArgs),
    /// Many trials over several sizes; writes trials.csv and summary.json.
    Sweep(SweepArgs),
    /// Committee honest-majority, referee coverage and leader honesty suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Corrupt nodes; defaults to floor((1/2 - eps) n).
    #[arg(long)]
    f: Option<usize>,
    /// `paper`, `desk` or a committee constant.
    #[arg(long, default_value = "desk")]
    profile: CommitteeProfile,
    #[arg(long, default_value = "implicit")]
    mode: Mode,
    #[arg(long, default_value = "silent")]
    adversary: StrategyKind,
    #[arg(long, default_value_t = 0)]
    adversary_seed: u64,
    /// Trial seed (base seed for sweeps).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `unanimous:V`, `random:D` or `fixed:V1,V2,...`.
    #[arg(long, default_value = "random:4")]
    inputs: InputSpec,
    #[arg(long, default_value_t = 8)]
    word_factor: u64,
    /// TOML experiment file; its keys override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[command(flatten)]
    common: Common,
    /// Include every fragment in the report.
    #[arg(long)]
    trace: bool,
    /// Report path; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "256,1024,4096")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[command(flatten)]
    common: Common,
    /// Output directory.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    trials: u64,
    #[arg(long, default_value_t = 10_000)]
    leader_trials: u64,
    #[arg(long, default_value_t = 1024)]
    majority_n: usize,
    #[arg(long, value_delimiter = ',', default_value = "256,1024")]
    coverage_n: Vec<usize>,
    #[arg(long, default_value_t = 1024)]
    leader_n: usize,
    /// Also write the verdict table as JSON here.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn experiment(n: Vec<usize>, trials: u64, c: &Common, output: Option<PathBuf>, trace: bool) -> Result<ExperimentConfig, String> {
    let flags = ExperimentConfig {
        n,
        epsilon: c.eps,
        faults: c.f,
        profile: c.profile,
        mode: c.mode,
        adversary: c.adversary,
        adversary_seed: c.adversary_seed,
        trials,
        seed: c.seed,
        inputs: c.inputs.clone(),
        word_factor: c.word_factor,
        output,
        trace,
    };
    let cfg = match &c.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            flags.overlay_toml(&text).map_err(|e| e.to_string())?
        }
        None => flags,
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<bool, String> {
    let cfg = experiment(vec![args.n], 1, &args.common, args.output, args.trace)?;
    let report = run_trial(&cfg.trial(cfg.n[0], 0)).map_err(|e| e.to_string())?;
    let json = report.to_json();
    match &cfg.output {
        Some(path) => fs::write(path, json + "\n").map_err(|e| format!("{}: {e}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(report.verdict.passed())
}

fn sweep(args: SweepArgs) -> Result<bool, String> {
    let cfg = experiment(args.n, args.trials, &args.common, args.output, false)?;
    let reports = bench::run_sweep(&cfg).map_err(|e| e.to_string())?;
    let rows: Vec<CsvRow> = reports.iter().map(|r| CsvRow::from_report(r, cfg.adversary)).collect();
    let mut csv = Vec::new();
    bench::write_csv(&mut csv, &rows).map_err(|e| e.to_string())?;
    let summary = bench::summarize(&rows, &csv);
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    fs::write(dir.join("trials.csv"), &csv).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&summary).map_err(|e| e.to_string())?;
    fs::write(dir.join("summary.json"), json + "\n").map_err(|e| e.to_string())?;
    for s in &summary.sizes {
        println!(
            "n={:<5} trials={:<4} mean_messages={:.1} mean_rounds={:.1} rounds/log2^2={:.3} violations(c/v/t)={}/{}/{}",
            s.n,
            s.trials,
            s.mean_messages,
            s.mean_rounds,
            s.rounds_per_log2_sq,
            s.consistency_violations,
            s.validity_violations,
            s.termination_failures
        );
    }
    if let Some(b) = summary.beta {
        println!("beta={b:.3} message_ratio={:.2}", summary.message_ratio.unwrap_or(f64::NAN));
    }
    for note in &summary.notices {
        eprintln!("notice: {note}");
    }
    println!("wrote {}", dir.display());
    Ok(true)
}

fn verify(args: VerifyArgs) -> Result<bool, String> {
    let cfg = VerifyConfig {
        epsilon: args.eps,
        seed: args.seed,
        majority_n: args.majority_n,
        majority_trials: args.trials,
        coverage_n: args.coverage_n,
        coverage_trials: args.trials,
        leader_n: args.leader_n,
        leader_trials: args.leader_trials,
    };
    let lines = bench::run_verify(&cfg).map_err(|e| e.to_string())?;
    for line in &lines {
        println!("{line}");
    }
    if let Some(path) = &args.output {
        let json = serde_json::to_string_pretty(&lines).map_err(|e| e.to_string())?;
        fs::write(path, json + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(lines.iter().all(|l| l.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
