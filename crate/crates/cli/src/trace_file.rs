//! Per-frame trace export: a header line, then one tab-separated row per
//! frame with `frame_index time_s v argmin_index energy v_normalized`.

use std::fmt::Write as _;
use std::path::Path;

use mhfseg::{Segmentation, VariationTrace};

use crate::CliError;

pub const HEADER: &str = "frame_index\ttime_s\tv\targmin_index\tenergy\tv_normalized";

pub fn render(seg: &Segmentation) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    let trace = &seg.trace;
    for t in 0..trace.len() {
        let _ = writeln!(
            out,
            "{t}\t{:.6}\t{}\t{}\t{}\t{}",
            seg.frame_time_s(t),
            trace.values[t],
            trace.argmin_index[t],
            trace.energy[t],
            seg.normalized[t]
        );
    }
    out
}

/// A trace read back from disk.
#[derive(Debug)]
pub struct TraceFile {
    pub trace: VariationTrace,
    pub normalized: Vec<f64>,
}

pub fn parse(text: &str, context: usize) -> Result<TraceFile, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or("empty trace file")?
        .split('\t')
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or(format!("trace header lacks column {name:?}"))
    };
    let (v_col, idx_col, e_col, n_col) = (
        col("v")?,
        col("argmin_index")?,
        col("energy")?,
        col("v_normalized")?,
    );

    let (mut values, mut argmin, mut energy, mut normalized) = (vec![], vec![], vec![], vec![]);
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        let get = |c: usize| {
            fields
                .get(c)
                .map(|s| s.trim())
                .ok_or(format!("row {}: missing column {c}", n + 1))
        };
        let real = |c: usize| -> Result<f64, String> {
            get(c)?
                .parse()
                .map_err(|_| format!("row {}: bad number in column {c}", n + 1))
        };
        values.push(real(v_col)?);
        energy.push(real(e_col)?);
        normalized.push(real(n_col)?);
        argmin.push(
            get(idx_col)?
                .parse()
                .map_err(|_| format!("row {}: bad window index", n + 1))?,
        );
    }
    let trace =
        VariationTrace::from_parts(values, argmin, energy, context).map_err(|e| e.to_string())?;
    Ok(TraceFile { trace, normalized })
}

pub fn read(path: &Path, context: usize) -> Result<TraceFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text, context).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
