//! Synthetic test signals with known section boundaries.
//!
//! A [`SynthSpec`] is usually read from a small TOML file:
//!
//! ```toml
//! seed = 7
//! sample_rate_hz = 8000      # optional, default 8000
//!
//! [[section]]
//! kind = "tone"              # tone | two-tone | filtered-noise | silence
//! duration_ms = 256
//! amplitude = 0.5
//! frequency_hz = 500
//!
//! [[section]]
//! kind = "two-tone"
//! duration_ms = 128
//! amplitude = 0.5
//! frequencies_hz = [700, 1800]
//!
//! [[section]]
//! kind = "filtered-noise"
//! duration_ms = 128
//! amplitude = 0.4
//! ar = [0.9, -0.5]           # x[n] = 0.9 x[n-1] - 0.5 x[n-2] + w[n]
//!
//! [[section]]
//! kind = "silence"
//! duration_ms = 64
//! ```

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;

use super::{AudioBuffer, DEFAULT_SAMPLE_RATE_HZ};
use crate::error::{Error, Result};

/// Samples discarded at the start of each filtered-noise section so the AR
/// filter reaches steady state.
const AR_WARMUP: usize = 512;

/// Minimum length of a synthesized signal, in hops.
pub const MIN_HOPS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Tone {
        frequency_hz: f64,
    },
    TwoTone {
        frequencies_hz: [f64; 2],
    },
    /// White Gaussian noise through an all-pole filter with predictor
    /// coefficients `ar`: `x[n] = sum_k ar[k-1] x[n-k] + w[n]`.
    FilteredNoise {
        ar: Vec<f64>,
    },
    Silence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub source: Source,
    pub duration_ms: f64,
    /// Peak amplitude. Ignored for silence.
    pub amplitude: f64,
}

impl Section {
    pub fn tone(frequency_hz: f64, duration_ms: f64, amplitude: f64) -> Self {
        Self {
            source: Source::Tone { frequency_hz },
            duration_ms,
            amplitude,
        }
    }

    pub fn silence(duration_ms: f64) -> Self {
        Self {
            source: Source::Silence,
            duration_ms,
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub sections: Vec<Section>,
    pub sample_rate_hz: u32,
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    seed: Option<u64>,
    sample_rate_hz: Option<u32>,
    #[serde(default)]
    section: Vec<RawSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    kind: Option<String>,
    duration_ms: Option<f64>,
    amplitude: Option<f64>,
    frequency_hz: Option<f64>,
    frequencies_hz: Option<Vec<f64>>,
    ar: Option<Vec<f64>>,
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidSpec {
        field: field.into(),
        reason: reason.into(),
    }
}

impl SynthSpec {
    pub fn new(sections: Vec<Section>, seed: u64) -> Self {
        Self {
            sections,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            seed,
        }
    }

    /// Parses the TOML schema shown in the module docs.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            // toml reports the unknown/missing key inside backticks.
            let field = msg
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "spec".into());
            invalid(field, msg)
        })?;

        let mut sections = Vec::with_capacity(raw.section.len());
        for (i, s) in raw.section.into_iter().enumerate() {
            let name = |f: &str| format!("section[{i}].{f}");
            let kind = s.kind.ok_or_else(|| invalid(name("kind"), "missing"))?;
            let duration_ms = s
                .duration_ms
                .ok_or_else(|| invalid(name("duration_ms"), "missing"))?;
            let source = match kind.as_str() {
                "tone" => Source::Tone {
                    frequency_hz: s
                        .frequency_hz
                        .ok_or_else(|| invalid(name("frequency_hz"), "missing"))?,
                },
                "two-tone" => {
                    let f = s
                        .frequencies_hz
                        .ok_or_else(|| invalid(name("frequencies_hz"), "missing"))?;
                    let pair: [f64; 2] = f
                        .try_into()
                        .map_err(|_| invalid(name("frequencies_hz"), "expected two values"))?;
                    Source::TwoTone {
                        frequencies_hz: pair,
                    }
                }
                "filtered-noise" => Source::FilteredNoise {
                    ar: s.ar.ok_or_else(|| invalid(name("ar"), "missing"))?,
                },
                "silence" => Source::Silence,
                other => return Err(invalid(name("kind"), format!("unknown kind {other:?}"))),
            };
            let amplitude = match (&source, s.amplitude) {
                (Source::Silence, a) => a.unwrap_or(1.0),
                (_, Some(a)) => a,
                (_, None) => return Err(invalid(name("amplitude"), "missing")),
            };
            sections.push(Section {
                source,
                duration_ms,
                amplitude,
            });
        }

        Ok(Self {
            sections,
            sample_rate_hz: raw.sample_rate_hz.unwrap_or(DEFAULT_SAMPLE_RATE_HZ),
            seed: raw.seed.unwrap_or(0),
        })
    }

    fn section_samples(&self, section: &Section) -> usize {
        (section.duration_ms * self.sample_rate_hz as f64 / 1000.0).round() as usize
    }

    /// Checks every field; `hop_samples` sets the minimum total length.
    pub fn validate(&self, hop_samples: usize) -> Result<()> {
        if self.sections.is_empty() {
            return Err(invalid("section", "at least one section is required"));
        }
        if self.sample_rate_hz == 0 {
            return Err(invalid("sample_rate_hz", "must be positive"));
        }
        let nyquist = self.sample_rate_hz as f64 / 2.0;
        let mut total = 0usize;
        for (i, s) in self.sections.iter().enumerate() {
            let name = |f: &str| format!("section[{i}].{f}");
            if !(s.duration_ms.is_finite() && s.duration_ms > 0.0) {
                return Err(invalid(name("duration_ms"), "must be positive"));
            }
            let n = self.section_samples(s);
            if n == 0 {
                return Err(invalid(name("duration_ms"), "shorter than one sample"));
            }
            total += n;
            if !matches!(s.source, Source::Silence) && !(s.amplitude > 0.0 && s.amplitude <= 1.0) {
                return Err(invalid(name("amplitude"), "must lie in (0, 1]"));
            }
            let freq_ok = |f: f64| f.is_finite() && f > 0.0 && f < nyquist;
            match &s.source {
                Source::Tone { frequency_hz } if !freq_ok(*frequency_hz) => {
                    return Err(invalid(name("frequency_hz"), "must lie in (0, fs/2)"));
                }
                Source::TwoTone { frequencies_hz }
                    if !frequencies_hz.iter().all(|&f| freq_ok(f)) =>
                {
                    return Err(invalid(name("frequencies_hz"), "must lie in (0, fs/2)"));
                }
                Source::FilteredNoise { ar } => {
                    if ar.is_empty() || ar.iter().any(|a| !a.is_finite()) {
                        return Err(invalid(name("ar"), "need at least one finite coefficient"));
                    }
                    if !is_stable_predictor(ar) {
                        return Err(invalid(name("ar"), "all-pole filter is unstable"));
                    }
                }
                _ => {}
            }
        }
        if hop_samples == 0 {
            return Err(invalid("hop_samples", "must be positive"));
        }
        if total < MIN_HOPS * hop_samples {
            return Err(invalid(
                "duration_ms",
                format!(
                    "total length {total} samples is shorter than {MIN_HOPS} hops of {hop_samples}"
                ),
            ));
        }
        Ok(())
    }
}

/// Step-down recursion: the predictor is stable iff every reflection
/// coefficient has magnitude below one.
fn is_stable_predictor(ar: &[f64]) -> bool {
    // A(z) = 1 - sum a_k z^-k, stored without the leading one.
    let mut poly: Vec<f64> = ar.iter().map(|a| -a).collect();
    for m in (1..=poly.len()).rev() {
        let k = poly[m - 1];
        if k.abs() >= 1.0 {
            return false;
        }
        let denom = 1.0 - k * k;
        let prev: Vec<f64> = (1..m)
            .map(|i| (poly[i - 1] - k * poly[m - i - 1]) / denom)
            .collect();
        poly = prev;
    }
    true
}

/// Renders `spec` and returns the buffer together with the ground-truth
/// boundary frames `floor(junction_sample / hop)` of every interior junction.
pub fn synthesize(spec: &SynthSpec, hop_samples: usize) -> Result<(AudioBuffer, Vec<usize>)> {
    spec.validate(hop_samples)?;

    let fs = spec.sample_rate_hz as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut samples = Vec::new();
    let mut boundaries = Vec::with_capacity(spec.sections.len() - 1);

    for (i, section) in spec.sections.iter().enumerate() {
        if i > 0 {
            boundaries.push(samples.len() / hop_samples);
        }
        let n = spec.section_samples(section);
        let amp = section.amplitude;
        match &section.source {
            Source::Tone { frequency_hz } => {
                let w = 2.0 * PI * frequency_hz / fs;
                samples.extend((0..n).map(|k| amp * (w * k as f64).sin()));
            }
            Source::TwoTone {
                frequencies_hz: [f1, f2],
            } => {
                let (w1, w2) = (2.0 * PI * f1 / fs, 2.0 * PI * f2 / fs);
                samples.extend(
                    (0..n).map(|k| 0.5 * amp * ((w1 * k as f64).sin() + (w2 * k as f64).sin())),
                );
            }
            Source::FilteredNoise { ar } => {
                let mut y = vec![0.0; AR_WARMUP + n];
                for t in 0..y.len() {
                    let w: f64 = StandardNormal.sample(&mut rng);
                    let pred: f64 = ar
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| t > *k)
                        .map(|(k, a)| a * y[t - k - 1])
                        .sum();
                    y[t] = pred + w;
                }
                let body = &y[AR_WARMUP..];
                let peak = body.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let gain = if peak > 0.0 { amp / peak } else { 0.0 };
                samples.extend(body.iter().map(|v| v * gain));
            }
            Source::Silence => samples.extend(std::iter::repeat_n(0.0, n)),
        }
    }

    Ok((AudioBuffer::new(samples, spec.sample_rate_hz)?, boundaries))
}
