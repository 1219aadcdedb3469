//! Test-only support: an independent transcription of the filter and the
//! synthetic corpora shared by the integration suites.

#![allow(dead_code, clippy::needless_range_loop)]

use mhfseg::{synthesize, AudioBuffer, MeasureKind, Section, Stage1, Stage2, SynthSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Transition level and winning index for every frame, computed with plain
/// index loops straight from the filter definition (centre frame included in
/// both contexts). Frames without full context get (0, 0).
pub fn naive_trace(
    rows: &[Vec<f64>],
    k: usize,
    stage1: Stage1,
    stage2: Stage2,
    measure: MeasureKind,
) -> Vec<(f64, usize)> {
    let t_len = rows.len();
    let m = rows[0].len();
    let mut out = vec![(0.0, 0); t_len];
    if t_len < 2 * k + 1 {
        return out;
    }
    for t in k..t_len - k {
        // Stage one over frames [a, b].
        let average = |a: usize, b: usize| -> Vec<f64> {
            let mut res = vec![0.0; m];
            for j in 0..m {
                let mut col = Vec::new();
                for r in a..=b {
                    col.push(rows[r][j]);
                }
                res[j] = match stage1 {
                    Stage1::Mean => {
                        let mut s = 0.0;
                        for c in &col {
                            s += c;
                        }
                        s / col.len() as f64
                    }
                    Stage1::Median => {
                        col.sort_by(|x, y| x.partial_cmp(y).unwrap());
                        let n = col.len();
                        if n % 2 == 1 {
                            col[n / 2]
                        } else {
                            (col[n / 2 - 1] + col[n / 2]) / 2.0
                        }
                    }
                };
            }
            res
        };
        let mut phi_l = Vec::new();
        let mut phi_r = Vec::new();
        for i in 1..=k {
            phi_l.push(average(t - i, t));
            phi_r.push(average(t, t + i));
        }
        let mut d = Vec::new();
        for i in 0..k {
            d.push(naive_error(&phi_r[k - 1], &phi_l[i], measure));
        }
        for i in 0..k - 1 {
            d.push(naive_error(&phi_l[k - 1], &phi_r[i], measure));
        }
        out[t] = match stage2 {
            Stage2::Min => {
                let mut best = 0;
                for i in 1..d.len() {
                    if d[i] < d[best] {
                        best = i;
                    }
                }
                (d[best], best + 1)
            }
            Stage2::Max => {
                let mut best = 0;
                for i in 1..d.len() {
                    if d[i] > d[best] {
                        best = i;
                    }
                }
                (d[best], best + 1)
            }
            Stage2::Median => {
                let mut s = d.clone();
                s.sort_by(|x, y| x.partial_cmp(y).unwrap());
                (s[s.len() / 2], 0)
            }
            Stage2::Mean => {
                let mut s = 0.0;
                for x in &d {
                    s += x;
                }
                (s / d.len() as f64, 0)
            }
        };
    }
    out
}

fn naive_error(u: &[f64], v: &[f64], kind: MeasureKind) -> f64 {
    let n = u.len();
    let (mut uv, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for i in 0..n {
        uv += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    match kind {
        MeasureKind::L1 => (0..n).map(|i| (u[i] - v[i]).abs()).sum(),
        MeasureKind::L2 => (0..n).map(|i| (u[i] - v[i]).powi(2)).sum::<f64>().sqrt(),
        MeasureKind::LInf => (0..n).map(|i| (u[i] - v[i]).abs()).fold(0.0, f64::max),
        MeasureKind::Cosine => {
            if uu == 0.0 || vv == 0.0 {
                0.0
            } else {
                1.0 - uv / (uu.sqrt() * vv.sqrt())
            }
        }
        MeasureKind::Canberra => (0..n)
            .map(|i| {
                let den = u[i].abs() + v[i].abs();
                if den == 0.0 {
                    0.0
                } else {
                    (u[i] - v[i]).abs() / den
                }
            })
            .sum(),
        MeasureKind::Tanimoto => {
            if uu == 0.0 && vv == 0.0 {
                0.0
            } else {
                1.0 - uv / (uu + vv - uv)
            }
        }
        MeasureKind::PinvEnergy => uv / vv + uv / uu,
    }
}

/// Rows `a` before `t0`, `b` from `t0` on.
pub fn step_rows(len: usize, t0: usize, a: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    (0..len)
        .map(|t| if t < t0 { a.to_vec() } else { b.to_vec() })
        .collect()
}

pub struct Utterance {
    pub audio: AudioBuffer,
    pub truth: Vec<usize>,
    pub freqs: (f64, f64),
}

pub const TONE_MS: f64 = 256.0;
pub const TONE_AMPLITUDE: f64 = 0.5;

/// Two equal-amplitude tones of 256 ms each, frequencies drawn from
/// [200, 3600] Hz at least 500 Hz apart.
pub fn two_tone_corpus(n: usize, seed: u64) -> Vec<Utterance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let (f1, f2) = loop {
                let f1: f64 = rng.random_range(200.0..3600.0);
                let f2: f64 = rng.random_range(200.0..3600.0);
                if (f1 - f2).abs() >= 500.0 {
                    break (f1.round(), f2.round());
                }
            };
            let spec = SynthSpec::new(
                vec![
                    Section::tone(f1, TONE_MS, TONE_AMPLITUDE),
                    Section::tone(f2, TONE_MS, TONE_AMPLITUDE),
                ],
                seed.wrapping_add(i as u64),
            );
            let (audio, truth) = synthesize(&spec, 64).unwrap();
            Utterance {
                audio,
                truth,
                freqs: (f1, f2),
            }
        })
        .collect()
}

/// Fixed 1 kHz tone whose amplitude doubles halfway.
pub fn amplitude_step() -> (AudioBuffer, Vec<usize>) {
    let spec = SynthSpec::new(
        vec![
            Section::tone(1000.0, TONE_MS, 0.25),
            Section::tone(1000.0, TONE_MS, 0.5),
        ],
        0,
    );
    synthesize(&spec, 64).unwrap()
}

pub fn within(boundaries: &[usize], target: usize, tol: usize) -> bool {
    boundaries.iter().any(|&b| b.abs_diff(target) <= tol)
}

pub fn spurious(boundaries: &[usize], truth: &[usize], tol: usize) -> usize {
    boundaries
        .iter()
        .filter(|&&b| !truth.iter().any(|&t| t.abs_diff(b) <= tol))
        .count()
}
