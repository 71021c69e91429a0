//! CSV output shared by every experiment.

use std::io::Write;

use powertalk_core::metrics::ESNR_CAP_DB;
use powertalk_core::ScalarGainQuantizer;

use crate::error::AppError;

pub const HEADER: [&str; 7] = ["sweep_var", "sweep_value", "method", "metric", "value", "n_trials", "seed"];

/// One aggregated value of one method at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_var: &'static str,
    pub sweep_value: f64,
    pub method: String,
    pub metric: String,
    pub value: f64,
    pub n_trials: usize,
    pub seed: u64,
}

/// Shortest round-trip text of `x`; infinities are capped so plots stay finite.
pub fn format_value(x: f64) -> String {
    if x == f64::INFINITY {
        format!("{ESNR_CAP_DB}")
    } else if x == f64::NEG_INFINITY {
        format!("{}", -ESNR_CAP_DB)
    } else {
        format!("{x}")
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.sweep_var.to_string(),
            format_value(r.sweep_value),
            r.method.clone(),
            r.metric.clone(),
            format_value(r.value),
            r.n_trials.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `index,lower_bound,upper_bound,representative` for every cell.
pub fn write_codebook<W: Write>(out: W, q: &ScalarGainQuantizer) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "lower_bound", "upper_bound", "representative"])?;
    for (r, v) in q.reps().iter().enumerate() {
        let b = q.bounds();
        w.write_record([r.to_string(), format!("{}", b[r]), format!("{}", b[r + 1]), format!("{v}")])?;
    }
    w.flush()?;
    Ok(())
}
