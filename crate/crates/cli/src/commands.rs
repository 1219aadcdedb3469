use std::path::{Path, PathBuf};

use mhfseg::{
    add_gaussian_noise, add_impulse_noise, load_wav, match_boundaries, save_wav,
    segment as run_segment, synthesize, window_usage, AnalysisKind, AudioBuffer, FrameParams,
    MeasureKind, MhfConfig, Segmentation, SegmenterConfig, SynthSpec, VariationTrace,
};
use rayon::prelude::*;

use crate::labels::{self, LabelRecord};
use crate::trace_file;
use crate::{CliError, EvalArgs, GlobalOpts, NoiseArgs, SegmentArgs, StatsArgs, SynthArgs};

const MARK_LABEL: &str = "mark";
const TRUTH_LABEL: &str = "truth";

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn with_path(path: &Path, e: mhfseg::Error) -> CliError {
    match CliError::from(e) {
        CliError::Io(m) if m.contains(&path.display().to_string()) => CliError::Io(m),
        CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
        other => other,
    }
}

struct Pipeline {
    frame: FrameParams,
    analysis: AnalysisKind,
    mhf: MhfConfig,
    seg: SegmenterConfig,
}

fn frame_params(opts: &GlobalOpts, sample_rate_hz: u32) -> CliResult<FrameParams> {
    FrameParams::from_ms(opts.frame_ms, opts.overlap, sample_rate_hz, opts.taper)
        .map_err(|e| usage(format!("--frame-ms/--overlap: {e}")))
}

fn pipeline(opts: &GlobalOpts, sample_rate_hz: u32) -> CliResult<Pipeline> {
    let frame = frame_params(opts, sample_rate_hz)?;
    let analysis = match opts.analysis.as_str() {
        "lpc" => AnalysisKind::Lpc {
            order: opts.lpc_order,
        },
        _ => AnalysisKind::FftMagnitude,
    };
    if opts.measure == MeasureKind::PinvEnergy {
        return Err(usage("--measure: pinv is reserved for the energy detector"));
    }
    let mhf = MhfConfig {
        context: opts.context,
        stage1: opts.stage1,
        stage2: opts.stage2,
        measure: opts.measure,
        center: opts.center(),
    };
    mhf.validate()?;
    if !(opts.min_sep_ms > 0.0 && opts.min_sep_ms.is_finite()) {
        return Err(usage(format!(
            "--min-sep-ms must be positive, got {}",
            opts.min_sep_ms
        )));
    }
    let hop_ms = frame.hop as f64 * 1000.0 / sample_rate_hz as f64;
    let seg = SegmenterConfig {
        energy_threshold: opts.energy_threshold,
        spectral_threshold: opts.threshold,
        level_thresholds: opts.levels.clone(),
        min_separation_frames: ((opts.min_sep_ms / hop_ms).round() as usize).max(1),
    };
    seg.validate()?;
    Ok(Pipeline {
        frame,
        analysis,
        mhf,
        seg,
    })
}

pub fn level_tag(threshold: f64) -> String {
    format!("L{threshold}")
}

fn label_records(seg: &Segmentation, marks_as_boundaries: bool) -> Vec<LabelRecord> {
    let duration = seg.duration_s();
    let mut records = Vec::new();
    for level in &seg.levels {
        let mut frames = level.boundaries.clone();
        if marks_as_boundaries {
            frames.extend(&seg.energy_marks);
            frames.sort_unstable();
            frames.dedup();
        }
        let times: Vec<f64> = frames.iter().map(|&t| seg.frame_time_s(t)).collect();
        records.extend(labels::segments(
            &times,
            duration,
            &level_tag(level.threshold),
        ));
    }
    records.extend(
        seg.energy_marks
            .iter()
            .map(|&t| LabelRecord::point(seg.frame_time_s(t), MARK_LABEL)),
    );
    records
}

fn default_labels_path(input: &Path) -> PathBuf {
    input.with_extension("labels.txt")
}

fn segment_one(
    opts: &GlobalOpts,
    args: &SegmentArgs,
    input: &Path,
    output: &Path,
) -> CliResult<String> {
    let audio = load_wav(input).map_err(|e| with_path(input, e))?;
    let p = pipeline(opts, audio.sample_rate_hz())?;
    let seg = run_segment(&audio, &p.frame, p.analysis, &p.mhf, &p.seg)
        .map_err(|e| with_path(input, e))?;

    labels::write(output, &label_records(&seg, args.marks_as_boundaries))?;
    if let Some(trace_path) = &args.trace {
        std::fs::write(trace_path, trace_file::render(&seg))
            .map_err(|e| CliError::Io(format!("{}: {e}", trace_path.display())))?;
    }

    let counts: Vec<String> = seg
        .levels
        .iter()
        .map(|l| format!("{}={}", level_tag(l.threshold), l.boundaries.len()))
        .collect();
    Ok(format!(
        "{}: {} frames, boundaries {}, {} marks -> {}",
        input.display(),
        seg.trace.len(),
        counts.join(" "),
        seg.energy_marks.len(),
        output.display()
    ))
}

pub fn segment(opts: &GlobalOpts, args: &SegmentArgs) -> CliResult<()> {
    if args.inputs.len() > 1 && (args.output.is_some() || args.trace.is_some()) {
        return Err(usage("--output and --trace take a single input file"));
    }
    // Reject bad flags before touching any file.
    pipeline(opts, mhfseg::signal_io::DEFAULT_SAMPLE_RATE_HZ)?;

    let mut inputs = args.inputs.clone();
    inputs.sort();
    inputs.dedup();
    let results: Vec<CliResult<String>> = inputs
        .par_iter()
        .map(|input| {
            let output = args
                .output
                .clone()
                .unwrap_or_else(|| default_labels_path(input));
            segment_one(opts, args, input, &output)
        })
        .collect();

    let mut failure: Option<CliError> = None;
    let mut failed = 0;
    for r in results {
        match r {
            Ok(summary) => println!("{summary}"),
            Err(e) => {
                failed += 1;
                if failure.is_some() || inputs.len() > 1 {
                    eprintln!("mhfseg: {e}");
                }
                if failure.as_ref().is_none_or(|f| e.code() > f.code()) {
                    failure = Some(e);
                }
            }
        }
    }
    match failure {
        None => Ok(()),
        Some(e) if inputs.len() == 1 => Err(e),
        Some(e) => {
            let msg = format!("{failed} of {} inputs failed", inputs.len());
            Err(match e {
                CliError::Usage(_) => CliError::Usage(msg),
                CliError::Io(_) => CliError::Io(msg),
            })
        }
    }
}

pub fn synth(opts: &GlobalOpts, args: &SynthArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.spec.display())))?;
    let mut spec = SynthSpec::from_toml_str(&text)
        .map_err(|e| usage(format!("{}: {e}", args.spec.display())))?;
    if let Some(seed) = opts.seed {
        spec.seed = seed;
    }
    let fp = frame_params(opts, spec.sample_rate_hz)?;
    let (audio, truth) =
        synthesize(&spec, fp.hop).map_err(|e| usage(format!("{}: {e}", args.spec.display())))?;

    save_wav(&audio, &args.output).map_err(|e| with_path(&args.output, e))?;
    let truth_path = args
        .truth
        .clone()
        .unwrap_or_else(|| args.output.with_extension("truth.txt"));
    let times: Vec<f64> = truth
        .iter()
        .map(|&t| fp.frame_center_s(t, spec.sample_rate_hz))
        .collect();
    labels::write(
        &truth_path,
        &labels::segments(&times, audio.duration_s(), TRUTH_LABEL),
    )?;
    println!(
        "{}: {} samples at {} Hz, {} boundaries -> {}",
        args.output.display(),
        audio.len(),
        audio.sample_rate_hz(),
        truth.len(),
        truth_path.display()
    );
    Ok(())
}

pub fn noise(opts: &GlobalOpts, args: &NoiseArgs) -> CliResult<()> {
    let seed = opts.seed.unwrap_or(0);
    let audio = load_wav(&args.input).map_err(|e| with_path(&args.input, e))?;
    let noisy: AudioBuffer = match (args.snr_db, args.impulse_prob) {
        (Some(snr), None) => {
            let n = add_gaussian_noise(&audio, snr, seed).map_err(|e| with_path(&args.input, e))?;
            println!("{}: {} samples clipped", args.output.display(), n.clipped);
            n.audio
        }
        (None, Some(p)) => {
            let out = add_impulse_noise(&audio, p, args.impulse_amp, seed)?;
            println!("{}: impulses with probability {p}", args.output.display());
            out
        }
        _ => return Err(usage("give exactly one of --snr-db or --impulse-prob")),
    };
    save_wav(&noisy, &args.output).map_err(|e| with_path(&args.output, e))
}

fn pick_tag(
    records: &[LabelRecord],
    wanted: Option<&str>,
    path: &Path,
    flag: &str,
) -> CliResult<String> {
    let tags = labels::tags(records);
    if let Some(w) = wanted {
        return if tags.contains(&w) {
            Ok(w.to_string())
        } else {
            Err(usage(format!(
                "{}: no records labelled {w:?} (found {tags:?})",
                path.display()
            )))
        };
    }
    let segment_tags: Vec<&str> = tags.iter().copied().filter(|t| *t != MARK_LABEL).collect();
    match segment_tags.as_slice() {
        [only] => Ok(only.to_string()),
        [] if tags == [MARK_LABEL] => Ok(MARK_LABEL.to_string()),
        _ => Err(usage(format!(
            "{}: labels {tags:?} are ambiguous, choose one with {flag}",
            path.display()
        ))),
    }
}

/// Inverts the frame-centre timestamp convention.
fn time_to_frame(time_s: f64, fp: &FrameParams, sample_rate_hz: u32) -> usize {
    let f = (time_s * sample_rate_hz as f64 - fp.frame_len as f64 / 2.0) / fp.hop as f64;
    f.round().max(0.0) as usize
}

pub fn eval(opts: &GlobalOpts, args: &EvalArgs) -> CliResult<()> {
    if !(args.tol_ms >= 0.0 && args.tol_ms.is_finite()) {
        return Err(usage(format!(
            "--tol-ms must be non-negative, got {}",
            args.tol_ms
        )));
    }
    if args.sample_rate == 0 {
        return Err(usage("--sample-rate must be positive"));
    }
    let fp = frame_params(opts, args.sample_rate)?;
    let reference = labels::read(&args.reference)?;
    let hypothesis = labels::read(&args.hyp)?;
    let ref_tag = pick_tag(
        &reference,
        args.ref_label.as_deref(),
        &args.reference,
        "--ref-label",
    )?;
    let hyp_tag = pick_tag(
        &hypothesis,
        args.hyp_label.as_deref(),
        &args.hyp,
        "--hyp-label",
    )?;

    let frames = |recs: &[LabelRecord], tag: &str| -> Vec<usize> {
        labels::boundary_times(recs, tag)
            .into_iter()
            .map(|t| time_to_frame(t, &fp, args.sample_rate))
            .collect()
    };
    let hop_ms = fp.hop as f64 * 1000.0 / args.sample_rate as f64;
    let tol_frames = (args.tol_ms / hop_ms + 1e-9).floor() as usize;
    let r = match_boundaries(
        &frames(&reference, &ref_tag),
        &frames(&hypothesis, &hyp_tag),
        tol_frames,
    );

    println!("reference      {} [{ref_tag}]", args.reference.display());
    println!("hypothesis     {} [{hyp_tag}]", args.hyp.display());
    println!("tolerance      {tol_frames} frames ({} ms)", args.tol_ms);
    println!("hits           {}", r.hits);
    println!("misses         {}", r.misses);
    println!("false alarms   {}", r.false_alarms);
    println!("precision      {:.4}", r.precision);
    println!("recall         {:.4}", r.recall);
    println!("f1             {:.4}", r.f1);
    println!("mean |offset|  {:.4} frames", r.mean_absolute_offset_frames);
    println!();
    println!("hits\tmisses\tfalse_alarms\tprecision\trecall\tf1\tmean_abs_offset_frames");
    println!(
        "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
        r.hits,
        r.misses,
        r.false_alarms,
        r.precision,
        r.recall,
        r.f1,
        r.mean_absolute_offset_frames
    );
    Ok(())
}

pub fn stats(opts: &GlobalOpts, args: &StatsArgs) -> CliResult<()> {
    if !args.min_value.is_finite() {
        return Err(usage("--min-value must be finite"));
    }
    if opts.context == 0 {
        return Err(usage("--context must be at least 1"));
    }
    let tf = trace_file::read(&args.trace, opts.context)?;
    let screened = if args.raw {
        tf.trace
    } else {
        VariationTrace::from_parts(
            tf.normalized,
            tf.trace.argmin_index,
            tf.trace.energy,
            opts.context,
        )?
    };
    let usage_counts = window_usage(&screened, args.min_value);
    let Some(pct) = usage_counts.percentages() else {
        println!("no frames at or above {}", args.min_value);
        return Ok(());
    };
    println!("index\tcount\tpercent");
    for (i, (c, p)) in usage_counts.counts.iter().zip(&pct).enumerate() {
        println!("{}\t{c}\t{p:.2}", i + 1);
    }
    println!("total\t{}\t100.00", usage_counts.total());
    Ok(())
}
