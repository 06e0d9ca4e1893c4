//! Records every fragment of a trial and writes it as JSON lines.
//!
//! Pass a path to keep the file; by default it goes to the temp directory.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use sublinear_ba::sim::trace::{read_jsonl, write_jsonl};
use sublinear_ba::{run_trial, StrategyKind, TrialConfig};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sba-trace.jsonl"));
    let cfg = TrialConfig {
        n: 64,
        strategy: StrategyKind::DelayChain,
        trace: true,
        ..TrialConfig::default()
    };
    let report = run_trial(&cfg).expect("valid configuration");
    write_jsonl(BufWriter::new(File::create(&path).expect("writable path")), &report.trace).expect("write trace");

    let records = read_jsonl(BufReader::new(File::open(&path).expect("just written"))).expect("read trace");
    let mut by_kind: BTreeMap<(bool, String), (u64, u64)> = BTreeMap::new();
    for r in &records {
        let e = by_kind.entry((r.honest, format!("{:?}", r.kind))).or_default();
        e.0 += 1;
        e.1 += r.bits;
    }
    println!("{} fragments written to {}", records.len(), path.display());
    for ((honest, kind), (count, bits)) in by_kind {
        let who = if honest { "honest" } else { "corrupt" };
        println!("{who:<8} {kind:<6} fragments {count:>7} bits {bits:>9}");
    }
    println!("report counts {} honest fragments", report.honest_messages);
}
