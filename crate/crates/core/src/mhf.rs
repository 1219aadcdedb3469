//! Multilevel hybrid filter.
//!
//! For the frame under test `t` and context half-width `K`, stage one
//! averages nested context windows on each side:
//!
//! ```text
//! left_i  = filter(rows t-i ..= t)      i = 1..=K
//! right_i = filter(rows t   ..= t+i)
//! ```
//!
//! The widest window on each side is compared against every narrower window
//! on the other side, giving `2K - 1` differences
//!
//! ```text
//! D[i]     = err(right_K, left_i)       i = 1..=K
//! D[K + i] = err(left_K,  right_i)      i = 1..K
//! ```
//!
//! and stage two reduces `D` to one transition level (min by default). A
//! transition is reported only when every difference agrees, which keeps the
//! output peaks narrow and suppresses isolated outliers.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measures::{dist, MeasureKind};
use crate::spectral::SpectralSequence;

pub const DEFAULT_CONTEXT: usize = 4;

/// Energy value assigned where no energy comparison is possible.
pub const ENERGY_BASELINE: f64 = 2.0;

macro_rules! named_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $name {
            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(Error::InvalidConfig(format!(
                        concat!("unknown ", stringify!($name), " {:?}"), other
                    ))),
                }
            }
        }
    };
}

/// First-level (linear or rank) filter over a context window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stage1 {
    #[default]
    Mean,
    Median,
}

named_enum!(Stage1 { Mean => "mean", Median => "median" });

/// Second-level reduction of the difference vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stage2 {
    #[default]
    Min,
    Max,
    Median,
    Mean,
}

named_enum!(Stage2 { Min => "min", Max => "max", Median => "median", Mean => "mean" });

impl Stage2 {
    pub const ALL: [Stage2; 4] = [Stage2::Min, Stage2::Max, Stage2::Median, Stage2::Mean];
}

/// Whether the frame under test belongs to the context windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CenterRule {
    /// `left_i = t-i ..= t`, `right_i = t ..= t+i`.
    #[default]
    Include,
    /// `left_i = t-i .. t`, `right_i = t+1 ..= t+i`.
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MhfConfig {
    pub context: usize,
    pub stage1: Stage1,
    pub stage2: Stage2,
    pub measure: MeasureKind,
    pub center: CenterRule,
}

impl Default for MhfConfig {
    /// Nine-frame window, mean then min, Euclidean error.
    fn default() -> Self {
        Self {
            context: DEFAULT_CONTEXT,
            stage1: Stage1::Mean,
            stage2: Stage2::Min,
            measure: MeasureKind::L2,
            center: CenterRule::Include,
        }
    }
}

impl MhfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.context == 0 {
            return Err(Error::InvalidConfig(
                "context half-width must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Length of the difference vector, `2K - 1`.
    pub fn num_differences(&self) -> usize {
        2 * self.context - 1
    }

    /// Minimum number of frames for one valid analysis window.
    pub fn min_frames(&self) -> usize {
        2 * self.context + 1
    }
}

/// Stage-one outputs; `left[i - 1]` and `right[i - 1]` are the averages
/// over `i` context steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextAverages {
    pub left: Vec<Vec<f64>>,
    pub right: Vec<Vec<f64>>,
}

fn filter_rows<'a>(rows: impl Iterator<Item = &'a [f64]>, dim: usize, stage1: Stage1) -> Vec<f64> {
    let rows: Vec<&[f64]> = rows.collect();
    let n = rows.len() as f64;
    match stage1 {
        Stage1::Mean => {
            let mut acc = vec![0.0; dim];
            for row in &rows {
                for (a, v) in acc.iter_mut().zip(row.iter()) {
                    *a += v;
                }
            }
            acc.iter_mut().for_each(|a| *a /= n);
            acc
        }
        Stage1::Median => (0..dim)
            .map(|m| median(rows.iter().map(|r| r[m]).collect()))
            .collect(),
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn valid_range(len: usize, context: usize) -> Option<(usize, usize)> {
    (len > 2 * context).then(|| (context, len - 1 - context))
}

pub fn context_averages(
    seq: &SpectralSequence,
    t: usize,
    context: usize,
    stage1: Stage1,
    center: CenterRule,
) -> Result<ContextAverages> {
    if context == 0 {
        return Err(Error::InvalidConfig(
            "context half-width must be >= 1".into(),
        ));
    }
    match valid_range(seq.len(), context) {
        Some((lo, hi)) if (lo..=hi).contains(&t) => {}
        _ => {
            return Err(Error::IndexOutOfValidRange {
                t,
                lo: context,
                hi: seq.len() as isize - 1 - context as isize,
            })
        }
    }
    let dim = seq.dim();
    let rows = seq.rows();
    let (left, right) = (1..=context)
        .map(|i| {
            let (l, r) = match center {
                CenterRule::Include => (t - i..=t, t..=t + i),
                CenterRule::Exclude => (t - i..=t - 1, t + 1..=t + i),
            };
            (
                filter_rows(rows[l].iter().map(Vec::as_slice), dim, stage1),
                filter_rows(rows[r].iter().map(Vec::as_slice), dim, stage1),
            )
        })
        .unzip();
    Ok(ContextAverages { left, right })
}

/// The `2K - 1` cross-context errors.
pub fn difference_vector(avg: &ContextAverages, measure: MeasureKind) -> Result<Vec<f64>> {
    let k = avg.left.len();
    if k == 0 || avg.right.len() != k {
        return Err(Error::LengthMismatch(avg.left.len(), avg.right.len()));
    }
    let widest_right = &avg.right[k - 1];
    let widest_left = &avg.left[k - 1];
    avg.left
        .iter()
        .map(|l| dist(widest_right, l, measure))
        .chain(
            avg.right[..k - 1]
                .iter()
                .map(|r| dist(widest_left, r, measure)),
        )
        .collect()
}

/// Reduces `d`; the index is 1-based for min/max (lowest on ties) and 0 for
/// median/mean.
pub fn stage2(d: &[f64], kind: Stage2) -> Result<(f64, usize)> {
    if d.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pick = |better: fn(f64, f64) -> bool| {
        let mut best = 0;
        for (i, &v) in d.iter().enumerate().skip(1) {
            if better(v, d[best]) {
                best = i;
            }
        }
        (d[best], best + 1)
    };
    Ok(match kind {
        Stage2::Min => pick(|a, b| a < b),
        Stage2::Max => pick(|a, b| a > b),
        Stage2::Median => (median(d.to_vec()), 0),
        Stage2::Mean => (d.iter().sum::<f64>() / d.len() as f64, 0),
    })
}

/// Per-frame filter outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationTrace {
    /// Transition level, zero outside the valid range.
    pub values: Vec<f64>,
    /// Winning difference index (1-based) for min/max, else 0; 0 outside the
    /// valid range.
    pub argmin_index: Vec<usize>,
    /// Pseudoinverse energy trace, [`ENERGY_BASELINE`] outside the valid
    /// range and where a context is silent.
    pub energy: Vec<f64>,
    pub context: usize,
}

impl VariationTrace {
    /// Assembles a trace from stored columns, e.g. when reading an exported
    /// trace back.
    pub fn from_parts(
        values: Vec<f64>,
        argmin_index: Vec<usize>,
        energy: Vec<f64>,
        context: usize,
    ) -> Result<Self> {
        if argmin_index.len() != values.len() {
            return Err(Error::LengthMismatch(argmin_index.len(), values.len()));
        }
        if energy.len() != values.len() {
            return Err(Error::LengthMismatch(energy.len(), values.len()));
        }
        if context == 0 {
            return Err(Error::InvalidConfig(
                "context half-width must be >= 1".into(),
            ));
        }
        if let Some(&bad) = argmin_index.iter().find(|&&i| i > 2 * context - 1) {
            return Err(Error::InvalidConfig(format!(
                "window index {bad} exceeds {} for context {context}",
                2 * context - 1
            )));
        }
        Ok(Self {
            values,
            argmin_index,
            energy,
            context,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Inclusive range of frames with full context.
    pub fn valid_range(&self) -> Option<(usize, usize)> {
        valid_range(self.values.len(), self.context)
    }
}

fn check_frames(seq: &SpectralSequence, config: &MhfConfig) -> Result<(usize, usize)> {
    config.validate()?;
    valid_range(seq.len(), config.context).ok_or(Error::TooFewFrames {
        frames: seq.len(),
        context: config.context,
        needed: config.min_frames(),
    })
}

/// Pseudoinverse-energy output of the filter.
///
/// Uses the exclude-centre context rule whatever `config.center` says: the
/// energy ratio across a change is then compared between two contexts that
/// each lie entirely on one side of it, so an amplitude step by `c` peaks at
/// exactly `c + 1/c`. Frames whose contexts contain a zero vector get the
/// baseline value 2.
pub fn energy_trace(seq: &SpectralSequence, config: &MhfConfig) -> Result<Vec<f64>> {
    let (lo, hi) = check_frames(seq, config)?;
    let mut energy = vec![ENERGY_BASELINE; seq.len()];
    for (t, e) in energy.iter_mut().enumerate().take(hi + 1).skip(lo) {
        let avg = context_averages(seq, t, config.context, config.stage1, CenterRule::Exclude)?;
        match difference_vector(&avg, MeasureKind::PinvEnergy) {
            Ok(d) => *e = stage2(&d, config.stage2)?.0,
            Err(Error::ZeroVector) => {}
            Err(err) => return Err(err),
        }
    }
    Ok(energy)
}

/// Runs the filter over every frame with full context.
pub fn variation_function(seq: &SpectralSequence, config: &MhfConfig) -> Result<VariationTrace> {
    let (lo, hi) = check_frames(seq, config)?;
    let mut values = vec![0.0; seq.len()];
    let mut argmin_index = vec![0; seq.len()];
    for t in lo..=hi {
        let avg = context_averages(seq, t, config.context, config.stage1, config.center)?;
        let d = difference_vector(&avg, config.measure)?;
        let (v, idx) = stage2(&d, config.stage2)?;
        values[t] = v;
        argmin_index[t] = idx;
    }
    let energy = energy_trace(seq, config)?;
    Ok(VariationTrace {
        values,
        argmin_index,
        energy,
        context: config.context,
    })
}

/// Counts of the winning difference index over frames whose value reaches
/// `min_value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowUsage {
    /// `counts[i - 1]` is the number of frames won by difference `i`.
    pub counts: Vec<usize>,
}

impl WindowUsage {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Percentages per index, or `None` when no frame qualified.
    pub fn percentages(&self) -> Option<Vec<f64>> {
        let total = self.total();
        (total > 0).then(|| {
            self.counts
                .iter()
                .map(|&c| 100.0 * c as f64 / total as f64)
                .collect()
        })
    }
}

pub fn window_usage(trace: &VariationTrace, min_value: f64) -> WindowUsage {
    let mut counts = vec![0; 2 * trace.context - 1];
    if let Some((lo, hi)) = trace.valid_range() {
        for t in lo..=hi {
            let idx = trace.argmin_index[t];
            if idx > 0 && trace.values[t] >= min_value {
                counts[idx - 1] += 1;
            }
        }
    }
    WindowUsage { counts }
}
