//! Result records with CSV and JSON round-trip serialization.
//!
//! Times are canonicalized to 9 significant digits at record creation so the
//! CSV text (which mandates exactly that precision) and JSON agree with the
//! in-memory values bit for bit.

use crate::code::CodeKind;
use crate::thermal::FailureKind;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Render a float with 9 significant digits.
pub fn format_sig9(x: f64) -> String {
    format!("{:.8e}", x)
}

/// Canonicalize to the value the 9-significant-digit text parses back to.
pub fn round_sig9(x: f64) -> f64 {
    format_sig9(x).parse().expect("formatted float parses")
}

/// One memory-time sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryTimeRecord {
    pub code: CodeKind,
    pub size: usize,
    pub beta: f64,
    pub seed: u64,
    pub sample: u64,
    pub t_fail: f64,
    pub kind: FailureKind,
}

impl MemoryTimeRecord {
    pub fn new(
        code: CodeKind,
        size: usize,
        beta: f64,
        seed: u64,
        sample: u64,
        t_fail: f64,
        kind: FailureKind,
    ) -> Self {
        MemoryTimeRecord {
            code,
            size,
            beta: round_sig9(beta),
            seed,
            sample,
            t_fail: round_sig9(t_fail),
            kind,
        }
    }

    pub const CSV_HEADER: &'static str = "code,L,beta,seed,sample,t_fail,kind";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.code,
            self.size,
            format_sig9(self.beta),
            self.seed,
            self.sample,
            format_sig9(self.t_fail),
            self.kind
        )
    }

    pub fn from_csv_row(row: &str) -> Result<Self> {
        let f: Vec<&str> = row.trim().split(',').collect();
        if f.len() != 7 {
            return Err(Error::MalformedRecord(format!("expected 7 fields, got {}", f.len())));
        }
        let parse_err = |what: &str| Error::MalformedRecord(format!("bad {what}: {row}"));
        Ok(MemoryTimeRecord {
            code: f[0].parse().map_err(|_| parse_err("code"))?,
            size: f[1].parse().map_err(|_| parse_err("L"))?,
            beta: f[2].parse().map_err(|_| parse_err("beta"))?,
            seed: f[3].parse().map_err(|_| parse_err("seed"))?,
            sample: f[4].parse().map_err(|_| parse_err("sample"))?,
            t_fail: f[5].parse().map_err(|_| parse_err("t_fail"))?,
            kind: f[6].parse().map_err(|_| parse_err("kind"))?,
        })
    }
}

/// One aggregated threshold point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub code: CodeKind,
    pub size: usize,
    pub rate: f64,
    pub seed: u64,
    pub trials: u64,
    pub failures: u64,
}

impl ThresholdRecord {
    pub const CSV_HEADER: &'static str = "code,L,p,seed,trials,failures";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.code,
            self.size,
            format_sig9(self.rate),
            self.seed,
            self.trials,
            self.failures
        )
    }

    pub fn from_csv_row(row: &str) -> Result<Self> {
        let f: Vec<&str> = row.trim().split(',').collect();
        if f.len() != 6 {
            return Err(Error::MalformedRecord(format!("expected 6 fields, got {}", f.len())));
        }
        let parse_err = |what: &str| Error::MalformedRecord(format!("bad {what}: {row}"));
        Ok(ThresholdRecord {
            code: f[0].parse().map_err(|_| parse_err("code"))?,
            size: f[1].parse().map_err(|_| parse_err("L"))?,
            rate: f[2].parse().map_err(|_| parse_err("p"))?,
            seed: f[3].parse().map_err(|_| parse_err("seed"))?,
            trials: f[4].parse().map_err(|_| parse_err("trials"))?,
            failures: f[5].parse().map_err(|_| parse_err("failures"))?,
        })
    }

    pub fn failure_fraction(&self) -> f64 {
        self.failures as f64 / self.trials.max(1) as f64
    }
}

/// Write records as CSV with the mandatory header.
pub fn to_csv<R, F: Fn(&R) -> String>(records: &[R], header: &str, row: F) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in records {
        out.push_str(&row(r));
        out.push('\n');
    }
    out
}

pub fn memory_csv(records: &[MemoryTimeRecord]) -> String {
    to_csv(records, MemoryTimeRecord::CSV_HEADER, MemoryTimeRecord::to_csv_row)
}

pub fn parse_memory_csv(text: &str) -> Result<Vec<MemoryTimeRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == MemoryTimeRecord::CSV_HEADER => {}
        other => return Err(Error::MalformedRecord(format!("bad header {other:?}"))),
    }
    lines.filter(|l| !l.trim().is_empty()).map(MemoryTimeRecord::from_csv_row).collect()
}

pub fn threshold_csv(records: &[ThresholdRecord]) -> String {
    to_csv(records, ThresholdRecord::CSV_HEADER, ThresholdRecord::to_csv_row)
}

pub fn parse_threshold_csv(text: &str) -> Result<Vec<ThresholdRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == ThresholdRecord::CSV_HEADER => {}
        other => return Err(Error::MalformedRecord(format!("bad header {other:?}"))),
    }
    lines.filter(|l| !l.trim().is_empty()).map(ThresholdRecord::from_csv_row).collect()
}
