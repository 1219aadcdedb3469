//! Framing and per-frame spectral parameter vectors.
//!
//! Each frame is either reduced to its linear DFT magnitude spectrum or to
//! the predictor coefficients `a[1..p]` of an autocorrelation-method LPC
//! fit. The LPC vector carries no gain term, so it does not depend on frame
//! energy.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::signal_io::AudioBuffer;

pub const DEFAULT_FRAME_LEN: usize = 128;
pub const DEFAULT_HOP: usize = 64;
pub const DEFAULT_LPC_ORDER: usize = 10;

/// Frames whose zero-lag autocorrelation falls below this are silent.
pub const SILENCE_ENERGY: f64 = 1e-12;

/// Reflection coefficients beyond `1 + REFLECTION_SLACK` abort the recursion.
const REFLECTION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Taper {
    Rectangular,
    #[default]
    Hamming,
}

impl Taper {
    /// Window coefficients of length `len`. Hamming is the symmetric form
    /// `0.54 - 0.46 cos(2 pi n / (len - 1))`.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Taper::Rectangular => vec![1.0; len],
            Taper::Hamming if len == 1 => vec![1.0],
            Taper::Hamming => (0..len)
                .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameParams {
    pub frame_len: usize,
    pub hop: usize,
    pub taper: Taper,
}

impl Default for FrameParams {
    /// 16 ms frames with 50% overlap at 8 kHz.
    fn default() -> Self {
        Self {
            frame_len: DEFAULT_FRAME_LEN,
            hop: DEFAULT_HOP,
            taper: Taper::Hamming,
        }
    }
}

impl FrameParams {
    pub fn new(frame_len: usize, hop: usize, taper: Taper) -> Result<Self> {
        let p = Self {
            frame_len,
            hop,
            taper,
        };
        p.validate()?;
        Ok(p)
    }

    /// Frame length and hop from a duration and an overlap fraction.
    pub fn from_ms(frame_ms: f64, overlap: f64, sample_rate_hz: u32, taper: Taper) -> Result<Self> {
        if !frame_ms.is_finite() || frame_ms <= 0.0 || !(0.0..1.0).contains(&overlap) {
            return Err(Error::InvalidFrameParams(format!(
                "frame_ms={frame_ms}, overlap={overlap}"
            )));
        }
        let frame_len = (frame_ms * sample_rate_hz as f64 / 1000.0).round() as usize;
        let hop = (frame_len as f64 * (1.0 - overlap)).round() as usize;
        Self::new(frame_len, hop, taper)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frame_len == 0 || self.hop == 0 || self.hop > self.frame_len {
            return Err(Error::InvalidFrameParams(format!(
                "need 0 < hop ({}) <= frame_len ({})",
                self.hop, self.frame_len
            )));
        }
        Ok(())
    }

    /// `floor((n - len) / hop) + 1`, or zero when not even one frame fits.
    pub fn frame_count(&self, num_samples: usize) -> usize {
        if num_samples < self.frame_len {
            0
        } else {
            (num_samples - self.frame_len) / self.hop + 1
        }
    }

    /// Time of the centre of frame `t`, in seconds.
    pub fn frame_center_s(&self, t: usize, sample_rate_hz: u32) -> f64 {
        (t * self.hop) as f64 / sample_rate_hz as f64
            + self.frame_len as f64 / 2.0 / sample_rate_hz as f64
    }
}

/// Slices `buf` into tapered frames; a trailing partial frame is dropped.
pub fn frame_signal(buf: &AudioBuffer, params: &FrameParams) -> Result<Vec<Vec<f64>>> {
    params.validate()?;
    let count = params.frame_count(buf.len());
    if count == 0 {
        return Err(Error::SignalTooShort {
            samples: buf.len(),
            needed: params.frame_len,
        });
    }
    let window = params.taper.coefficients(params.frame_len);
    let samples = buf.samples();
    Ok((0..count)
        .map(|t| {
            let start = t * params.hop;
            samples[start..start + params.frame_len]
                .iter()
                .zip(&window)
                .map(|(s, w)| s * w)
                .collect()
        })
        .collect())
}

/// Reusable FFT plan for magnitude spectra of one frame length.
pub struct SpectrumAnalyzer {
    len: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl SpectrumAnalyzer {
    pub fn new(len: usize) -> Result<Self> {
        if !len.is_power_of_two() {
            return Err(Error::NonPowerOfTwoLength(len));
        }
        let fft = FftPlanner::new().plan_fft_forward(len);
        Ok(Self { len, fft })
    }

    /// `|DFT(frame)[m]|` for `m = 0..=len/2`, unnormalized.
    pub fn magnitudes(&self, frame: &[f64]) -> Result<Vec<f64>> {
        if frame.len() != self.len {
            return Err(Error::LengthMismatch(frame.len(), self.len));
        }
        let mut buf: Vec<Complex<f64>> = frame.iter().map(|&x| Complex::new(x, 0.0)).collect();
        self.fft.process(&mut buf);
        Ok(buf[..=self.len / 2].iter().map(|c| c.norm()).collect())
    }
}

pub fn magnitude_spectrum(frame: &[f64]) -> Result<Vec<f64>> {
    SpectrumAnalyzer::new(frame.len())?.magnitudes(frame)
}

/// `r[k] = sum_n frame[n] frame[n + k]` for `k = 0..=order`.
pub fn autocorrelation(frame: &[f64], order: usize) -> Result<Vec<f64>> {
    if order >= frame.len() {
        return Err(Error::OrderTooLarge {
            order,
            len: frame.len(),
        });
    }
    Ok((0..=order)
        .map(|k| frame.iter().zip(&frame[k..]).map(|(a, b)| a * b).sum())
        .collect())
}

/// Predictor coefficients for `x[n] ~ sum_k a[k] x[n-k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lpc {
    pub coefficients: Vec<f64>,
    /// Set when the frame energy was below [`SILENCE_ENERGY`]; the
    /// coefficients are then all zero.
    pub silent: bool,
}

/// Levinson-Durbin recursion on the frame autocorrelation.
pub fn lpc_coefficients(frame: &[f64], order: usize) -> Result<Lpc> {
    let r = autocorrelation(frame, order)?;
    if r[0] < SILENCE_ENERGY {
        return Ok(Lpc {
            coefficients: vec![0.0; order],
            silent: true,
        });
    }

    let mut a = vec![0.0; order];
    let mut scratch = vec![0.0; order];
    let mut err = r[0];
    for i in 0..order {
        let acc = r[i + 1] - (0..i).map(|j| a[j] * r[i - j]).sum::<f64>();
        let k = acc / err;
        if !k.is_finite() || k.abs() >= 1.0 + REFLECTION_SLACK {
            return Err(Error::NumericalBreakdown {
                step: i + 1,
                reflection: k.abs(),
            });
        }
        scratch[..i].copy_from_slice(&a[..i]);
        for j in 0..i {
            a[j] = scratch[j] - k * scratch[i - 1 - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
    }
    Ok(Lpc {
        coefficients: a,
        silent: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisKind {
    FftMagnitude,
    Lpc { order: usize },
}

/// What a [`SpectralSequence`]'s rows hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    FftMagnitude,
    Lpc {
        order: usize,
    },
    /// Vectors supplied directly by the caller.
    External,
}

/// Per-frame parameter vectors, one row per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSequence {
    rows: Vec<Vec<f64>>,
    kind: SequenceKind,
    frame_params: FrameParams,
}

impl SpectralSequence {
    /// Wraps caller-provided vectors. All rows must share one nonzero
    /// dimension and be finite.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::EmptyInput);
        }
        for row in &rows {
            if row.len() != dim {
                return Err(Error::LengthMismatch(row.len(), dim));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig("non-finite parameter value".into()));
            }
        }
        Ok(Self {
            rows,
            kind: SequenceKind::External,
            frame_params: FrameParams::default(),
        })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.rows[t]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn frame_params(&self) -> &FrameParams {
        &self.frame_params
    }
}

/// Frames `buf` and reduces every frame to its parameter vector. LPC frames
/// whose recursion breaks down are replaced by the zero vector.
pub fn analyze(
    buf: &AudioBuffer,
    params: &FrameParams,
    kind: AnalysisKind,
) -> Result<SpectralSequence> {
    let frames = frame_signal(buf, params)?;
    let (rows, kind) = match kind {
        AnalysisKind::FftMagnitude => {
            let analyzer = SpectrumAnalyzer::new(params.frame_len)?;
            let rows = frames
                .iter()
                .map(|f| analyzer.magnitudes(f))
                .collect::<Result<Vec<_>>>()?;
            (rows, SequenceKind::FftMagnitude)
        }
        AnalysisKind::Lpc { order } => {
            if order == 0 {
                return Err(Error::InvalidConfig("LPC order must be positive".into()));
            }
            let rows = frames
                .iter()
                .map(|f| match lpc_coefficients(f, order) {
                    Ok(lpc) => Ok(lpc.coefficients),
                    Err(Error::NumericalBreakdown { .. }) => Ok(vec![0.0; order]),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()?;
            (rows, SequenceKind::Lpc { order })
        }
    };
    Ok(SpectralSequence {
        rows,
        kind,
        frame_params: *params,
    })
}
