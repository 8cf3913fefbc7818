//! Per-iteration records and their CSV form.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};

/// How a line step ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepStatus {
    /// The scalar discrete-gradient equation was solved with an implied time
    /// step inside `[tau_min, tau_max]`.
    Accepted,
    /// Neither side of the direction decreased the objective at probe scale.
    StationaryAlongDirection,
    /// A decrease was found but the time-step band could not be met within
    /// the inner caps.
    BestEffort,
}

impl StepStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            StepStatus::Accepted => "accepted",
            StepStatus::StationaryAlongDirection => "stationary",
            StepStatus::BestEffort => "best_effort",
        }
    }
}

impl fmt::Display for StepStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StepStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accepted" => Ok(StepStatus::Accepted),
            "stationary" => Ok(StepStatus::StationaryAlongDirection),
            "best_effort" => Ok(StepStatus::BestEffort),
            _ => Err(Error::config("status", format!("unknown step status `{s}`"))),
        }
    }
}

/// One outer iteration. `f_value` is the objective after the step of
/// iteration `iter`; the value before the first step is kept on the run result.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub cumulative_evals: u64,
    pub f_value: f64,
    pub step_norm: f64,
    /// `|dx|^2 / (f_old - f_new)`; `None` when the step did not decrease.
    pub tau_implied: Option<f64>,
    pub status: StepStatus,
    pub direction_index: usize,
}

pub const CSV_HEADER: &str = "iter,cum_evals,f,step_norm,tau_implied,status,dir_index";

/// Writes `records` as CSV with a header row. Floats use Rust's shortest
/// round-trip formatting, so the output is locale independent and exact.
pub fn write_csv<W: Write>(records: &[TraceRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let tau = r.tau_implied.map(|t| format!("{t:e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{:e},{:e},{},{},{}",
            r.iter, r.cumulative_evals, r.f_value, r.step_norm, tau, r.status, r.direction_index
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Parses the output of [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<TraceRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(Error::config("trace", "missing or unexpected header")),
    }
    let bad = |line: &str| Error::config("trace", format!("malformed row `{line}`"));
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(bad(line));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
            Ok(TraceRecord {
                iter: cols[0].parse().map_err(|_| bad(line))?,
                cumulative_evals: cols[1].parse().map_err(|_| bad(line))?,
                f_value: num(cols[2])?,
                step_norm: num(cols[3])?,
                tau_implied: if cols[4].is_empty() { None } else { Some(num(cols[4])?) },
                status: cols[5].parse()?,
                direction_index: cols[6].parse().map_err(|_| bad(line))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn status() -> impl Strategy<Value = StepStatus> {
        prop_oneof![
            Just(StepStatus::Accepted),
            Just(StepStatus::StationaryAlongDirection),
            Just(StepStatus::BestEffort),
        ]
    }

    proptest! {
        #[test]
        fn csv_round_trips_exactly(
            rows in prop::collection::vec(
                (0usize..1000, 0u64..10_000, -1e300f64..1e300, 0f64..1e10,
                 prop::option::of(1e-8f64..1e8), status(), 0usize..10),
                0..20)
        ) {
            let records: Vec<TraceRecord> = rows
                .into_iter()
                .map(|(iter, cumulative_evals, f_value, step_norm, tau_implied, status, direction_index)| {
                    TraceRecord { iter, cumulative_evals, f_value, step_norm, tau_implied, status, direction_index }
                })
                .collect();
            let mut buf = Vec::new();
            write_csv(&records, &mut buf).unwrap();
            let text = String::from_utf8(buf).unwrap();
            prop_assert!(text.starts_with(CSV_HEADER));
            prop_assert!(!text.contains('\r'));
            prop_assert_eq!(read_csv(&text).unwrap(), records);
        }
    }

    #[test]
    fn header_present_for_empty_trace() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }
}
