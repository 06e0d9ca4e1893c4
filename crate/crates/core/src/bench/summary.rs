use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::committee::word_bits;

use super::csv::CsvRow;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeAggregate {
    pub n: usize,
    pub trials: usize,
    pub mean_messages: f64,
    pub max_messages: u64,
    pub mean_bits: f64,
    pub mean_rounds: f64,
    pub max_rounds: u64,
    /// `mean_rounds / ceil(log2 n)^2`.
    pub rounds_per_log2_sq: f64,
    pub consistency_violations: usize,
    pub validity_violations: usize,
    pub termination_failures: usize,
    pub mean_corrupt_frac: f64,
    /// Fraction of trials where fewer than half of the candidates were corrupt.
    pub honest_majority_rate: f64,
    pub referee_coverage_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub sizes: Vec<SizeAggregate>,
    /// Least-squares slope of `log2 mean_messages` against `log2 n`.
    pub beta: Option<f64>,
    /// Least-squares slope of `log2 mean_rounds` against `log2 log2 n`.
    pub beta_rounds: Option<f64>,
    /// Mean messages at the largest size over mean messages at the smallest.
    pub message_ratio: Option<f64>,
    /// Largest over smallest `rounds_per_log2_sq`.
    pub round_ratio_spread: Option<f64>,
    pub notices: Vec<String>,
    /// SHA-256 of the CSV bytes the aggregates were computed from.
    pub csv_sha256: String,
}

/// Ordinary least-squares slope. `None` with fewer than two distinct `x`.
pub fn ols_slope(points: &[(f64, f64)]) -> Option<f64> {
    let k = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        0.0
    } else {
        s / c as f64
    }
}

/// Aggregates CSV rows per size and fits the scaling exponents.
pub fn summarize(rows: &[CsvRow], csv_bytes: &[u8]) -> SweepSummary {
    let mut by_n: BTreeMap<usize, Vec<&CsvRow>> = BTreeMap::new();
    for r in rows {
        by_n.entry(r.n).or_default().push(r);
    }
    let sizes: Vec<SizeAggregate> = by_n
        .iter()
        .map(|(&n, rs)| {
            let mean_rounds = mean(rs.iter().map(|r| r.rounds as f64));
            let log_sq = (word_bits(n) * word_bits(n)) as f64;
            SizeAggregate {
                n,
                trials: rs.len(),
                mean_messages: mean(rs.iter().map(|r| r.messages as f64)),
                max_messages: rs.iter().map(|r| r.messages).max().unwrap_or(0),
                mean_bits: mean(rs.iter().map(|r| r.bits as f64)),
                mean_rounds,
                max_rounds: rs.iter().map(|r| r.rounds).max().unwrap_or(0),
                rounds_per_log2_sq: mean_rounds / log_sq,
                consistency_violations: rs.iter().filter(|r| !r.consistency).count(),
                validity_violations: rs.iter().filter(|r| r.validity == Some(false)).count(),
                termination_failures: rs.iter().filter(|r| !r.termination).count(),
                mean_corrupt_frac: mean(rs.iter().map(|r| r.committee_corrupt_frac)),
                honest_majority_rate: mean(
                    rs.iter().map(|r| f64::from(u8::from(r.committee_corrupt_frac < 0.5))),
                ),
                referee_coverage_rate: mean(rs.iter().map(|r| f64::from(u8::from(r.referee_coverage_ok)))),
            }
        })
        .collect();

    let mut notices = Vec::new();
    let (beta, beta_rounds, message_ratio, round_ratio_spread) = if sizes.len() < 2 {
        notices.push("single network size: scaling fit skipped".to_string());
        (None, None, None, None)
    } else {
        let msg: Vec<(f64, f64)> = sizes
            .iter()
            .map(|s| ((s.n as f64).log2(), s.mean_messages.max(1.0).log2()))
            .collect();
        let rnd: Vec<(f64, f64)> = sizes
            .iter()
            .map(|s| ((s.n as f64).log2().log2(), s.mean_rounds.max(1.0).log2()))
            .collect();
        let first = &sizes[0];
        let last = &sizes[sizes.len() - 1];
        let per: Vec<f64> = sizes.iter().map(|s| s.rounds_per_log2_sq).collect();
        let spread = per.iter().cloned().fold(f64::MIN, f64::max) / per.iter().cloned().fold(f64::MAX, f64::min);
        (
            ols_slope(&msg),
            ols_slope(&rnd),
            Some(last.mean_messages / first.mean_messages.max(1.0)),
            Some(spread),
        )
    };
    if let Some(b) = beta {
        if b >= 0.8 {
            notices.push(format!("message exponent {b:.3} >= 0.8: growth is not clearly sublinear"));
        }
    }
    let (lo, hi) = (
        sizes.first().map_or(0, |s| s.n),
        sizes.last().map_or(0, |s| s.n),
    );
    if sizes.len() >= 2 && (sizes.len() < 3 || hi < 16 * lo) {
        notices.push("fewer than 3 sizes or a span under 16x: the fit is weak".to_string());
    }

    SweepSummary {
        sizes,
        beta,
        beta_rounds,
        message_ratio,
        round_ratio_spread,
        notices,
        csv_sha256: hex::encode(Sha256::digest(csv_bytes)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let pts = [(1.0, 3.0), (2.0, 5.0), (4.0, 9.0)];
        assert!((ols_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(ols_slope(&[(1.0, 1.0)]), None);
        assert_eq!(ols_slope(&[(1.0, 1.0), (1.0, 2.0)]), None);
    }
}
