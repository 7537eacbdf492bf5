//! Per-round trace CSV.
//!
//! Columns: `t, x_0, …, x_{d-1}, loss_value, reg_std, reg_cht, reg_alt,
//! diag_commutator`. Regrets are cumulative up to round `t` against the
//! run's final comparator. Floats are printed with 17 significant digits;
//! `diag_commutator` is empty when the learner has none.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use altreg_core::losses::LossFn;
use altreg_core::math::CompensatedSum;

use crate::error::{HarnessError, Result};

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rows of one player's trace.
pub struct TraceRows<'a> {
    /// `x_1, …, x_{T+1}`
    pub xs: &'a [Vec<f64>],
    pub losses: &'a [LossFn],
    pub commutators: &'a [Option<f64>],
    pub comparator: &'a [f64],
}

pub fn write_trace_to<W: Write>(out: W, rows: &TraceRows<'_>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let dim = rows.comparator.len();
    let mut header = vec!["t".to_string()];
    header.extend((0..dim).map(|i| format!("x_{i}")));
    header.extend(["loss_value", "reg_std", "reg_cht", "reg_alt", "diag_commutator"].map(String::from));
    w.write_record(&header)?;

    let mut std = CompensatedSum::new();
    let mut cht = CompensatedSum::new();
    let mut record = Vec::with_capacity(header.len());
    for (i, f) in rows.losses.iter().enumerate() {
        let (x, next) = (&rows.xs[i], &rows.xs[i + 1]);
        let value = f.eval(x)?;
        let at_u = f.eval(rows.comparator)?;
        std.add(value);
        std.add(-at_u);
        cht.add(f.eval(next)?);
        cht.add(-at_u);
        record.clear();
        record.push((i + 1).to_string());
        record.extend(x.iter().map(|v| fmt_float(*v)));
        record.push(fmt_float(value));
        record.push(fmt_float(std.value()));
        record.push(fmt_float(cht.value()));
        record.push(fmt_float(std.value() + cht.value()));
        record.push(rows.commutators.get(i).copied().flatten().map(fmt_float).unwrap_or_default());
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| HarnessError::io("trace", e))?;
    Ok(())
}

pub fn write_trace(path: &Path, rows: &TraceRows<'_>) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_trace_to(BufWriter::new(file), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_rows_accumulate() {
        let xs = vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]];
        let losses = vec![LossFn::linear(vec![1.0, 0.0]), LossFn::linear(vec![0.0, 1.0])];
        let comm = vec![Some(0.25), None];
        let mut buf = Vec::new();
        write_trace_to(
            &mut buf,
            &TraceRows {
                xs: &xs,
                losses: &losses,
                commutators: &comm,
                comparator: &[0.5, 0.5],
            },
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x_0,x_1,loss_value,reg_std,reg_cht,reg_alt,diag_commutator");
        // round 1: f(x1)=1, f(x2)=0.5, f(u)=0.5
        let r1: Vec<f64> = lines[1].split(',').skip(1).take(6).map(|s| s.parse().unwrap()).collect();
        assert_eq!(r1, vec![1.0, 0.0, 1.0, 0.5, 0.0, 0.5]);
        assert!(lines[1].ends_with(",2.5000000000000000e-1"));
        // round 2: f(x2)=0.5, f(x3)=1, f(u)=0.5
        assert!(lines[2].ends_with(",5.0000000000000000e-1,5.0000000000000000e-1,1.0000000000000000e0,"));
    }
}
