//! Per-fragment trace records, one JSON object per line.
//!
//! Schema (stable): `round` (u64, round the fragment occupies the edge),
//! `sender` and `receiver` (global node indices), `kind` (`vote`, `chain`,
//! `final` or `noise`), `bits` (bits carried by this fragment) and `honest`
//! (whether the sender is honest).

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::protocol::PayloadKind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub round: u64,
    pub sender: usize,
    pub receiver: usize,
    pub kind: PayloadKind,
    pub bits: u64,
    pub honest: bool,
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[TraceRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_jsonl<R: BufRead>(input: R) -> io::Result<Vec<TraceRecord>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| serde_json::from_str(&l?).map_err(io::Error::other))
        .collect()
}
