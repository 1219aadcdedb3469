//! Additive Gaussian and impulsive noise for robustness experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::AudioBuffer;
use crate::error::{Error, Result};

/// A noisy buffer and the number of samples clipped back into [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Noisy {
    pub audio: AudioBuffer,
    pub clipped: usize,
}

/// Adds zero-mean white Gaussian noise at `snr_db` relative to the buffer's
/// mean power.
pub fn add_gaussian_noise(buf: &AudioBuffer, snr_db: f64, seed: u64) -> Result<Noisy> {
    let signal_power = buf.power();
    if signal_power <= 0.0 {
        return Err(Error::ZeroSignal);
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "SNR must be finite, got {snr_db}"
        )));
    }
    let noise_power = signal_power / 10f64.powf(snr_db / 10.0);
    let normal =
        Normal::new(0.0, noise_power.sqrt()).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut clipped = 0;
    let samples = buf
        .samples()
        .iter()
        .map(|&s| {
            let y = s + normal.sample(&mut rng);
            if y.abs() > 1.0 {
                clipped += 1;
            }
            y.clamp(-1.0, 1.0)
        })
        .collect();
    Ok(Noisy {
        audio: AudioBuffer::new(samples, buf.sample_rate_hz())?,
        clipped,
    })
}

/// Replaces each sample, with probability `probability`, by `±amplitude`
/// with a random sign.
pub fn add_impulse_noise(
    buf: &AudioBuffer,
    probability: f64,
    amplitude: f64,
    seed: u64,
) -> Result<AudioBuffer> {
    if !(0.0..=1.0).contains(&probability) {
        return Err(Error::InvalidConfig(format!(
            "impulse probability {probability} outside [0, 1]"
        )));
    }
    if !(amplitude > 0.0 && amplitude <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "impulse amplitude {amplitude} outside (0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = buf
        .samples()
        .iter()
        .map(|&s| {
            let hit = rng.random::<f64>() < probability;
            let positive = rng.random::<bool>();
            match (hit, positive) {
                (false, _) => s,
                (true, true) => amplitude,
                (true, false) => -amplitude,
            }
        })
        .collect();
    AudioBuffer::new(samples, buf.sample_rate_hz())
}
