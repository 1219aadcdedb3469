//! Audio buffers, 16-bit PCM WAV I/O, synthetic test corpora and noise
//! injection.

mod noise;
mod synth;

use std::io;
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};

pub use noise::{add_gaussian_noise, add_impulse_noise, Noisy};
pub use synth::{synthesize, Section, Source, SynthSpec};

pub const DEFAULT_SAMPLE_RATE_HZ: u32 = 8000;

/// Largest value representable after int16 quantization, 1 - 2^-15.
pub const MAX_PCM_VALUE: f64 = 1.0 - 1.0 / 32768.0;

/// A mono sampled signal.
///
/// Samples are always finite. Buffers produced by loading, synthesis or
/// noise injection additionally stay within [-1, 1]; buffers built by hand
/// (or with [`AudioBuffer::scaled`]) may exceed that range and are clipped
/// when written.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidAudio("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidAudio(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Mean squared sample value.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64
    }

    /// Multiplies every sample by `gain`. The result is not clipped.
    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}

/// Reads a mono 16-bit PCM WAV file, scaling samples by 1/32768.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let reader = WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(err) if err.kind() == io::ErrorKind::NotFound => {
            Error::NotFound(path.to_path_buf())
        }
        hound::Error::IoError(err) => Error::Io(err),
        other => Error::UnsupportedFormat(other.to_string()),
    })?;

    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "channels={}",
            spec.channels
        )));
    }
    if spec.sample_format != SampleFormat::Int {
        return Err(Error::UnsupportedFormat("format=float".into()));
    }
    if spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedFormat(format!(
            "bits={}",
            spec.bits_per_sample
        )));
    }

    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| f64::from(v) / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| match e {
            hound::Error::IoError(err) => Error::Io(err),
            other => Error::UnsupportedFormat(other.to_string()),
        })?;

    AudioBuffer::new(samples, spec.sample_rate)
}

/// Quantizes one sample to int16: clip to [-1, 1 - 2^-15], scale by 32768,
/// round to nearest.
pub fn quantize_sample(x: f64) -> i16 {
    let clipped = x.clamp(-1.0, MAX_PCM_VALUE);
    (clipped * 32768.0).round() as i16
}

/// Writes `buf` as mono 16-bit PCM.
pub fn save_wav(buf: &AudioBuffer, path: impl AsRef<Path>) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: buf.sample_rate_hz,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::create(path, spec).map_err(hound_to_io)?;
    for &s in &buf.samples {
        writer
            .write_sample(quantize_sample(s))
            .map_err(hound_to_io)?;
    }
    writer.finalize().map_err(hound_to_io)
}

fn hound_to_io(e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(err) => Error::Io(err),
        other => Error::Io(io::Error::other(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_raw(path: &Path, channels: u16, bits: u16, values: &[i32]) {
        let spec = WavSpec {
            channels,
            sample_rate: 8000,
            bits_per_sample: bits,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(path, spec).unwrap();
        for &v in values {
            w.write_sample(v).unwrap();
        }
        w.finalize().unwrap();
    }

    #[test]
    fn load_scales_by_inverse_32768() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("three.wav");
        write_raw(&path, 1, 16, &[0, 16384, -32768]);
        let buf = load_wav(&path).unwrap();
        assert_eq!(buf.samples(), &[0.0, 0.5, -1.0]);
        assert_eq!(buf.sample_rate_hz(), 8000);
    }

    #[test]
    fn load_rejects_stereo_and_other_depths() {
        let dir = tempfile::tempdir().unwrap();
        let stereo = dir.path().join("stereo.wav");
        write_raw(&stereo, 2, 16, &[0, 0, 1, 1]);
        match load_wav(&stereo) {
            Err(Error::UnsupportedFormat(msg)) => assert_eq!(msg, "channels=2"),
            other => panic!("unexpected {other:?}"),
        }

        let deep = dir.path().join("24bit.wav");
        write_raw(&deep, 1, 24, &[0, 1, 2]);
        match load_wav(&deep) {
            Err(Error::UnsupportedFormat(msg)) => assert_eq!(msg, "bits=24"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn load_missing_file_is_not_found() {
        let err = load_wav("/definitely/not/here.wav").unwrap_err();
        assert!(matches!(err, Error::NotFound(p) if p.ends_with("here.wav")));
    }

    #[test]
    fn save_quantizes_and_clips() {
        assert_eq!(quantize_sample(0.0), 0);
        assert_eq!(quantize_sample(2.0), 32767);
        assert_eq!(quantize_sample(-3.0), -32768);
        assert_eq!(quantize_sample(0.5), 16384);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clip.wav");
        let buf = AudioBuffer::new(vec![0.0, 2.0], 8000).unwrap();
        save_wav(&buf, &path).unwrap();
        let ints: Vec<i16> = WavReader::open(&path)
            .unwrap()
            .into_samples::<i16>()
            .map(|s| s.unwrap())
            .collect();
        assert_eq!(ints, vec![0, 32767]);
    }

    #[test]
    fn rejects_non_finite_and_zero_rate() {
        assert!(AudioBuffer::new(vec![f64::NAN], 8000).is_err());
        assert!(AudioBuffer::new(vec![0.0], 0).is_err());
    }
}
