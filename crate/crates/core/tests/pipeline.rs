mod common;

use common::*;
use mhfseg::*;
use proptest::prelude::*;

fn config(stage2: Stage2, measure: MeasureKind) -> MhfConfig {
    MhfConfig {
        stage2,
        measure,
        ..MhfConfig::default()
    }
}

fn rows_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (9usize..20, 1usize..5)
        .prop_flat_map(|(t, m)| prop::collection::vec(prop::collection::vec(0.1f64..2.0, m), t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trace_matches_naive_filter(
        rows in rows_strategy(),
        s2 in 0usize..4,
        mi in 0usize..6,
        median_first in any::<bool>(),
    ) {
        let stage1 = if median_first { Stage1::Median } else { Stage1::Mean };
        let cfg = MhfConfig { stage1, ..config(Stage2::ALL[s2], MeasureKind::DISTANCES[mi]) };
        let seq = SpectralSequence::from_rows(rows.clone()).unwrap();
        let trace = variation_function(&seq, &cfg).unwrap();
        let naive = naive_trace(&rows, 4, stage1, cfg.stage2, cfg.measure);
        for (t, &(v, idx)) in naive.iter().enumerate() {
            prop_assert!((trace.values[t] - v).abs() <= 1e-12, "t={} {} vs {}", t, trace.values[t], v);
            prop_assert_eq!(trace.argmin_index[t], idx);
        }
    }

    #[test]
    fn trace_is_shift_equivariant(rows in rows_strategy(), pad in 1usize..6, s2 in 0usize..4) {
        let cfg = config(Stage2::ALL[s2], MeasureKind::L2);
        let mut padded = vec![vec![0.7; rows[0].len()]; pad];
        padded.extend(rows.iter().cloned());
        let a = variation_function(&SpectralSequence::from_rows(rows.clone()).unwrap(), &cfg).unwrap();
        let b = variation_function(&SpectralSequence::from_rows(padded).unwrap(), &cfg).unwrap();
        let (lo, hi) = a.valid_range().unwrap();
        for t in lo..=hi {
            prop_assert_eq!(a.values[t], b.values[t + pad]);
            prop_assert_eq!(a.argmin_index[t], b.argmin_index[t + pad]);
        }
    }

    #[test]
    fn wav_round_trip_within_one_step(samples in prop::collection::vec(-1.0f64..=1.0, 1..400)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let buf = AudioBuffer::new(samples.clone(), 8000).unwrap();
        save_wav(&buf, &path).unwrap();
        let back = load_wav(&path).unwrap();
        prop_assert_eq!(back.sample_rate_hz(), 8000);
        prop_assert_eq!(back.len(), samples.len());
        for (x, y) in samples.iter().zip(back.samples()) {
            prop_assert!((x - y).abs() <= 1.0 / 32768.0 + 1e-15, "{} -> {}", x, y);
        }
        // A second pass through the file is lossless.
        save_wav(&back, &path).unwrap();
        let again = load_wav(&path).unwrap();
        prop_assert_eq!(again.samples(), back.samples());
    }
}

#[test]
fn fft_trace_scales_with_amplitude() {
    let utt = &two_tone_corpus(1, 77)[0];
    let fp = FrameParams::default();
    let cfg = MhfConfig::default();
    let seg_cfg = SegmenterConfig::default();
    let base = segment(&utt.audio, &fp, AnalysisKind::FftMagnitude, &cfg, &seg_cfg).unwrap();
    for c in [0.25, 1.5] {
        let scaled = segment(
            &utt.audio.scaled(c),
            &fp,
            AnalysisKind::FftMagnitude,
            &cfg,
            &seg_cfg,
        )
        .unwrap();
        let peak = base.trace.values.iter().cloned().fold(0.0, f64::max);
        for (a, b) in base.trace.values.iter().zip(&scaled.trace.values) {
            assert!((c * a - b).abs() <= 1e-9 * peak.max(1.0), "{c}: {a} -> {b}");
        }
        for (a, b) in base.trace.energy.iter().zip(&scaled.trace.energy) {
            assert!((a - b).abs() <= 1e-9);
        }
        assert_eq!(base.levels, scaled.levels);
    }
}

#[test]
fn levels_nest_and_find_the_tone_change() {
    let fp = FrameParams::default();
    let seg_cfg = SegmenterConfig::default();
    for utt in two_tone_corpus(6, 5) {
        for analysis in [AnalysisKind::FftMagnitude, AnalysisKind::Lpc { order: 10 }] {
            let seg = segment(&utt.audio, &fp, analysis, &MhfConfig::default(), &seg_cfg).unwrap();
            let thresholds: Vec<f64> = seg.levels.iter().map(|l| l.threshold).collect();
            assert_eq!(thresholds, vec![0.7, 0.5, 0.3]);
            for w in seg.levels.windows(2) {
                assert!(w[0].boundaries.iter().all(|b| w[1].boundaries.contains(b)));
            }
            let found = seg.boundaries_at(0.5).unwrap();
            assert!(
                within(found, utt.truth[0], 1),
                "{:?} {analysis:?}: {found:?}",
                utt.freqs
            );
            assert_eq!(spurious(found, &utt.truth, 1), 0);
        }
    }
}

#[test]
fn boundary_times_are_frame_centres() {
    let utt = &two_tone_corpus(1, 3)[0];
    let seg = segment(
        &utt.audio,
        &FrameParams::default(),
        AnalysisKind::FftMagnitude,
        &MhfConfig::default(),
        &SegmenterConfig::default(),
    )
    .unwrap();
    // Frame t covers samples [64 t, 64 t + 128).
    for t in [0, 1, 31] {
        let expected = (64 * t + 64) as f64 / 8000.0;
        assert!((seg.frame_time_s(t) - expected).abs() < 1e-15);
    }
    assert!((seg.duration_s() - 0.512).abs() < 1e-12);
}
