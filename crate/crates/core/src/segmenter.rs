//! From traces to boundaries.
//!
//! Peaks of the energy trace mark energy changes. Those marks split the
//! spectral trace into stretches that are each scaled to a maximum of one,
//! so a single fixed threshold works across loud and soft passages. Peaks of
//! the normalized trace above each threshold of a descending ladder give
//! nested boundary sets.

use crate::error::{Error, Result};
use crate::mhf::{energy_trace, variation_function, MhfConfig, VariationTrace};
use crate::signal_io::AudioBuffer;
use crate::spectral::{analyze, AnalysisKind, FrameParams};

/// Segment maxima at or below this are left unscaled.
pub const NORMALIZE_EPS: f64 = 1e-9;

/// Rounding allowance on the energy threshold: a step by exactly the ratio
/// the threshold encodes (2.5 = 2 + 1/2) evaluates to a hair below it.
pub const ENERGY_THRESHOLD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SegmenterConfig {
    /// Energy marks need a peak pseudoinverse energy of at least this; must
    /// exceed the stationary value 2.
    pub energy_threshold: f64,
    pub spectral_threshold: f64,
    /// Strictly descending, each in (0, 1].
    pub level_thresholds: Vec<f64>,
    pub min_separation_frames: usize,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            energy_threshold: 2.5,
            spectral_threshold: 0.5,
            level_thresholds: vec![0.7, 0.5, 0.3],
            min_separation_frames: 4,
        }
    }
}

impl SegmenterConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.energy_threshold.is_finite() || self.energy_threshold <= 2.0 {
            return Err(Error::InvalidConfig(format!(
                "energy threshold must exceed 2, got {}",
                self.energy_threshold
            )));
        }
        if !(self.spectral_threshold > 0.0 && self.spectral_threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "spectral threshold must lie in (0, 1], got {}",
                self.spectral_threshold
            )));
        }
        check_ladder(&self.level_thresholds)?;
        if self.min_separation_frames == 0 {
            return Err(Error::InvalidConfig(
                "minimum separation must be >= 1 frame".into(),
            ));
        }
        Ok(())
    }

    /// The level ladder with the spectral threshold merged in.
    pub fn ladder(&self) -> Vec<f64> {
        let mut ladder = self.level_thresholds.clone();
        if !ladder.contains(&self.spectral_threshold) {
            ladder.push(self.spectral_threshold);
        }
        ladder.sort_by(|a, b| b.total_cmp(a));
        ladder
    }
}

fn check_ladder(thresholds: &[f64]) -> Result<()> {
    let in_range = thresholds.iter().all(|&t| t > 0.0 && t <= 1.0);
    let descending = thresholds.windows(2).all(|w| w[0] > w[1]);
    if in_range && descending {
        Ok(())
    } else {
        Err(Error::NonDescendingThresholds(thresholds.to_vec()))
    }
}

/// Local maxima, with a run of equal values reported at its first frame.
/// Frames outside the trace count as lower than any value.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let v = values[start];
        let mut end = start;
        while end + 1 < values.len() && values[end + 1] == v {
            end += 1;
        }
        let rises = start == 0 || values[start - 1] < v;
        let falls = end + 1 == values.len() || values[end + 1] < v;
        if rises && falls {
            peaks.push(start);
        }
        start = end + 1;
    }
    peaks
}

/// Greedy suppression: larger values first (earlier frame on ties), each
/// accepted frame blocks every frame closer than `min_sep`.
fn suppress(values: &[f64], mut candidates: Vec<usize>, min_sep: usize) -> Vec<usize> {
    candidates.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::with_capacity(candidates.len());
    for c in candidates {
        if kept.iter().all(|&k| k.abs_diff(c) >= min_sep) {
            kept.push(c);
        }
    }
    kept.sort_unstable();
    kept
}

pub fn energy_marks(energy: &[f64], threshold: f64, min_sep: usize) -> Vec<usize> {
    let candidates = local_maxima(energy)
        .into_iter()
        .filter(|&t| energy[t] >= threshold - ENERGY_THRESHOLD_SLACK)
        .collect();
    suppress(energy, candidates, min_sep)
}

/// Scales each stretch between consecutive marks (and the trace ends) so
/// its maximum becomes one.
pub fn local_normalize(values: &[f64], marks: &[usize]) -> Vec<f64> {
    let mut edges: Vec<usize> = std::iter::once(0)
        .chain(marks.iter().copied().filter(|&m| m > 0 && m < values.len()))
        .chain(std::iter::once(values.len()))
        .collect();
    edges.dedup();

    let mut out = values.to_vec();
    for w in edges.windows(2) {
        let seg = &mut out[w[0]..w[1]];
        let max = seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max > NORMALIZE_EPS {
            seg.iter_mut().for_each(|v| *v /= max);
        }
    }
    out
}

pub fn pick_peaks(norm_values: &[f64], threshold: f64, min_sep: usize) -> Result<Vec<usize>> {
    Ok(multilevel(norm_values, &[threshold], min_sep)?
        .pop()
        .map(|l| l.boundaries)
        .unwrap_or_default())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub threshold: f64,
    pub boundaries: Vec<usize>,
}

/// Peaks at every threshold of a descending ladder. Separation is enforced
/// once on the lowest level's candidates, so each level is a subset of the
/// next lower one.
pub fn multilevel(norm_values: &[f64], thresholds: &[f64], min_sep: usize) -> Result<Vec<Level>> {
    check_ladder(thresholds)?;
    let Some(&lowest) = thresholds.last() else {
        return Ok(Vec::new());
    };
    let candidates = local_maxima(norm_values)
        .into_iter()
        .filter(|&t| norm_values[t] >= lowest)
        .collect();
    let survivors = suppress(norm_values, candidates, min_sep.max(1));
    Ok(thresholds
        .iter()
        .map(|&threshold| Level {
            threshold,
            boundaries: survivors
                .iter()
                .copied()
                .filter(|&t| norm_values[t] >= threshold)
                .collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    /// Highest threshold first.
    pub levels: Vec<Level>,
    pub energy_marks: Vec<usize>,
    pub frame_params: FrameParams,
    pub sample_rate_hz: u32,
    pub num_samples: usize,
    pub trace: VariationTrace,
    pub normalized: Vec<f64>,
}

impl Segmentation {
    pub fn boundaries_at(&self, threshold: f64) -> Option<&[usize]> {
        self.levels
            .iter()
            .find(|l| l.threshold == threshold)
            .map(|l| l.boundaries.as_slice())
    }

    /// Boundary timestamp: the centre of frame `t`.
    pub fn frame_time_s(&self, t: usize) -> f64 {
        self.frame_params.frame_center_s(t, self.sample_rate_hz)
    }

    pub fn duration_s(&self) -> f64 {
        self.num_samples as f64 / self.sample_rate_hz as f64
    }
}

/// Full pipeline: analysis, filtering, energy marks, normalization and the
/// threshold ladder. With LPC analysis the energy trace is still taken from
/// FFT magnitudes, since LPC vectors carry no energy.
pub fn segment(
    buf: &AudioBuffer,
    frame_params: &FrameParams,
    analysis: AnalysisKind,
    mhf_config: &MhfConfig,
    seg_config: &SegmenterConfig,
) -> Result<Segmentation> {
    seg_config.validate()?;
    let seq = analyze(buf, frame_params, analysis)?;
    let mut trace = variation_function(&seq, mhf_config)?;
    if matches!(analysis, AnalysisKind::Lpc { .. }) {
        let spectra = analyze(buf, frame_params, AnalysisKind::FftMagnitude)?;
        trace.energy = energy_trace(&spectra, mhf_config)?;
    }

    let min_sep = seg_config.min_separation_frames;
    let marks = energy_marks(&trace.energy, seg_config.energy_threshold, min_sep);
    let normalized = local_normalize(&trace.values, &marks);
    let levels = multilevel(&normalized, &seg_config.ladder(), min_sep)?;

    Ok(Segmentation {
        levels,
        energy_marks: marks,
        frame_params: *frame_params,
        sample_rate_hz: buf.sample_rate_hz(),
        num_samples: buf.len(),
        trace,
        normalized,
    })
}
