//! A small sweep and the fitted message exponent.

use sublinear_ba::bench::{run_sweep, summarize, write_csv, CsvRow, ExperimentConfig};
use sublinear_ba::{InputSpec, StrategyKind};

fn main() {
    let cfg = ExperimentConfig {
        n: vec![64, 256, 1024],
        trials: 4,
        adversary: StrategyKind::RandomNoise,
        inputs: InputSpec::Random { domain: 4 },
        ..ExperimentConfig::default()
    };
    let reports = run_sweep(&cfg).expect("valid sweep");
    let rows: Vec<CsvRow> = reports.iter().map(|r| CsvRow::from_report(r, cfg.adversary)).collect();
    let mut csv = Vec::new();
    write_csv(&mut csv, &rows).expect("in-memory write");
    let summary = summarize(&rows, &csv);

    for s in &summary.sizes {
        println!(
            "n={:<5} mean messages {:>10.1}  per n {:>7.2}  rounds/log2^2 {:.2}",
            s.n,
            s.mean_messages,
            s.mean_messages / s.n as f64,
            s.rounds_per_log2_sq
        );
    }
    println!("beta = {:.3}", summary.beta.unwrap_or(f64::NAN));
    for note in &summary.notices {
        println!("notice: {note}");
    }
}
