//! One CSV row per trial. The column set is fixed:
//! `n, eps, f, c, mode, adversary, seed, messages, bits, rounds, iterations,
//! decided_value, consistency, validity, termination, committee_corrupt_frac,
//! referee_coverage_ok`. `decided_value` is empty when honest nodes decided
//! nothing or disagreed; `validity` is empty when honest inputs differ.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::adversary::StrategyKind;
use crate::error::ConfigError;
use crate::sim::{Mode, TrialReport};

pub const CSV_COLUMNS: [&str; 17] = [
    "n",
    "eps",
    "f",
    "c",
    "mode",
    "adversary",
    "seed",
    "messages",
    "bits",
    "rounds",
    "iterations",
    "decided_value",
    "consistency",
    "validity",
    "termination",
    "committee_corrupt_frac",
    "referee_coverage_ok",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub n: usize,
    pub eps: f64,
    pub f: usize,
    pub c: f64,
    pub mode: Mode,
    pub adversary: StrategyKind,
    pub seed: u64,
    pub messages: u64,
    pub bits: u64,
    pub rounds: u64,
    pub iterations: usize,
    pub decided_value: Option<u64>,
    pub consistency: bool,
    pub validity: Option<bool>,
    pub termination: bool,
    pub committee_corrupt_frac: f64,
    pub referee_coverage_ok: bool,
}

impl CsvRow {
    pub fn from_report(r: &TrialReport, adversary: StrategyKind) -> Self {
        CsvRow {
            n: r.n,
            eps: r.epsilon,
            f: r.f,
            c: r.c,
            mode: r.mode,
            adversary,
            seed: r.trial_seed,
            messages: r.honest_messages,
            bits: r.honest_bits,
            rounds: r.rounds,
            iterations: r.iterations,
            decided_value: r.decided_value(),
            consistency: r.verdict.consistency,
            validity: r.verdict.validity,
            termination: r.verdict.termination,
            committee_corrupt_frac: r.committee_corrupt_frac,
            referee_coverage_ok: r.verdict.referee_coverage,
        }
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> Result<(), ConfigError> {
    let mut w = ::csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| ConfigError::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| ConfigError::Parse(e.to_string()))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>, ConfigError> {
    let mut r = ::csv::Reader::from_reader(input);
    let headers = r.headers().map_err(|e| ConfigError::Parse(e.to_string()))?;
    if headers.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(ConfigError::Parse(format!("unexpected CSV header: {headers:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| ConfigError::Parse(e.to_string())))
        .collect()
}
