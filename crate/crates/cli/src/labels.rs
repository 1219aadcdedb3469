//! Tab-separated label files: `start_s<TAB>end_s<TAB>label`, one record per
//! line, times with six decimals. Point events have `start_s == end_s`.

use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct LabelRecord {
    pub start_s: f64,
    pub end_s: f64,
    pub label: String,
}

impl LabelRecord {
    pub fn span(start_s: f64, end_s: f64, label: impl Into<String>) -> Self {
        Self {
            start_s,
            end_s,
            label: label.into(),
        }
    }

    pub fn point(at_s: f64, label: impl Into<String>) -> Self {
        Self::span(at_s, at_s, label)
    }

    pub fn is_point(&self) -> bool {
        self.start_s == self.end_s
    }
}

/// Consecutive segments `[0, b1], [b1, b2], ..., [bn, duration]`.
pub fn segments(boundary_times: &[f64], duration_s: f64, label: &str) -> Vec<LabelRecord> {
    let mut edges = Vec::with_capacity(boundary_times.len() + 2);
    edges.push(0.0);
    edges.extend(
        boundary_times
            .iter()
            .copied()
            .filter(|&t| t > 0.0 && t < duration_s),
    );
    edges.push(duration_s);
    edges
        .windows(2)
        .map(|w| LabelRecord::span(w[0], w[1], label))
        .collect()
}

/// Records sorted by start time (stable, so ties keep insertion order).
pub fn render(records: &[LabelRecord]) -> String {
    let mut sorted: Vec<&LabelRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
    let mut out = String::new();
    for r in sorted {
        let _ = writeln!(out, "{:.6}\t{:.6}\t{}", r.start_s, r.end_s, r.label);
    }
    out
}

pub fn parse(text: &str) -> Result<Vec<LabelRecord>, String> {
    let mut records = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.splitn(3, '\t').collect();
        if fields.len() != 3 {
            return Err(format!("line {}: expected start<TAB>end<TAB>label", n + 1));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("line {}: bad time {s:?}", n + 1))
        };
        let (start_s, end_s) = (num(fields[0])?, num(fields[1])?);
        if end_s < start_s {
            return Err(format!("line {}: end before start", n + 1));
        }
        records.push(LabelRecord::span(start_s, end_s, fields[2].trim()));
    }
    Ok(records)
}

pub fn read(path: &Path) -> Result<Vec<LabelRecord>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, records: &[LabelRecord]) -> Result<(), CliError> {
    std::fs::write(path, render(records))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Distinct labels in order of first appearance.
pub fn tags(records: &[LabelRecord]) -> Vec<&str> {
    let mut seen: Vec<&str> = Vec::new();
    for r in records {
        if !seen.contains(&r.label.as_str()) {
            seen.push(&r.label);
        }
    }
    seen
}

/// Boundary times carried by records labelled `tag`: interior segment starts
/// and point events.
pub fn boundary_times(records: &[LabelRecord], tag: &str) -> Vec<f64> {
    let mut times: Vec<f64> = records
        .iter()
        .filter(|r| r.label == tag && (r.is_point() || r.start_s > 0.0))
        .map(|r| r.start_s)
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}
