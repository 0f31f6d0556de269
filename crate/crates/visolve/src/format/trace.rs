//! Per-iteration CSV traces.

use std::io::{Read, Write};

use visolve_core::IterationRecord;

use crate::error::Result;

pub const HEADER: [&str; 6] = ["n", "E_n", "lambda_n", "dist_to_pstar", "step_norm", "elapsed_ms"];

/// One CSV row. Optional columns are empty when unknown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub residual: f64,
    pub lambda: f64,
    pub dist_to_solution: Option<f64>,
    pub step_norm: f64,
    pub elapsed_ms: Option<f64>,
}

impl TraceRow {
    /// Timings are dropped unless asked for, so reruns write identical files.
    pub fn from_record(rec: &IterationRecord, timings: bool) -> Self {
        Self {
            n: rec.n,
            residual: rec.residual,
            lambda: rec.lambda,
            dist_to_solution: rec.dist_to_solution,
            step_norm: rec.step_norm,
            elapsed_ms: timings.then_some(rec.elapsed_ms),
        }
    }
}

/// 17 significant digits.
pub(crate) fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

pub fn write_trace<W: Write>(out: W, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            real(r.residual),
            real(r.lambda),
            opt(r.dist_to_solution),
            real(r.step_norm),
            opt(r.elapsed_ms),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let bad = |m: String| crate::error::Error::Invalid(format!("trace: {m}"));
    if rd.headers()?.iter().ne(HEADER) {
        return Err(bad(String::from("unexpected header")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number")));
    let maybe = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != HEADER.len() {
            return Err(bad(format!("row with {} fields", rec.len())));
        }
        rows.push(TraceRow {
            n: rec[0].parse().map_err(|_| bad(format!("`{}` is not an index", &rec[0])))?,
            residual: num(&rec[1])?,
            lambda: num(&rec[2])?,
            dist_to_solution: maybe(&rec[3])?,
            step_norm: num(&rec[4])?,
            elapsed_ms: maybe(&rec[5])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(58.0), "5.8000000000000000e1");
    }

    #[test]
    fn empty_optional_columns() {
        let rows = [TraceRow { n: 1, residual: 0.5, lambda: 0.6, dist_to_solution: None, step_norm: 0.25, elapsed_ms: None }];
        let mut buf = Vec::new();
        write_trace(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), "n,E_n,lambda_n,dist_to_pstar,step_norm,elapsed_ms");
        assert!(text.lines().nth(1).unwrap().contains(",,"));
        assert_eq!(read_trace(buf.as_slice()).unwrap(), rows);
    }
}
