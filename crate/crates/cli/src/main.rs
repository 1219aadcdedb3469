//! `mhfseg`: segment WAV files, synthesize test signals, add noise, score
//! boundaries and summarize filter window usage.

mod commands;
mod labels;
mod trace_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mhfseg::{CenterRule, MeasureKind, Stage1, Stage2, Taper};

#[derive(Debug, Parser)]
#[command(
    name = "mhfseg",
    version,
    about = "Speech segmentation with multilevel hybrid filters"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Frame length in milliseconds.
    #[arg(long, global = true, default_value_t = 16.0)]
    pub frame_ms: f64,
    /// Fraction of each frame shared with the next one.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub overlap: f64,
    #[arg(long, global = true, value_parser = parse_taper, default_value = "hamming")]
    pub taper: Taper,
    /// Spectral parameters per frame: fft or lpc.
    #[arg(long, global = true, value_parser = ["fft", "lpc"], default_value = "fft")]
    pub analysis: String,
    #[arg(long, global = true, default_value_t = 10)]
    pub lpc_order: usize,
    /// l1, l2, linf, cosine, canberra or tanimoto.
    #[arg(long, global = true, default_value = "l2")]
    pub measure: MeasureKind,
    /// Measure for the energy detector; only the pseudoinverse energy is supported.
    #[arg(long, global = true, value_parser = ["pinv"], default_value = "pinv")]
    pub energy_measure: String,
    /// mean or median.
    #[arg(long, global = true, default_value = "mean")]
    pub stage1: Stage1,
    /// min, max, median or mean.
    #[arg(long, global = true, default_value = "min")]
    pub stage2: Stage2,
    /// Frames on each side of the current one.
    #[arg(long, global = true, default_value_t = 4)]
    pub context: usize,
    /// Leave the current frame out of both context averages.
    #[arg(long, global = true)]
    pub exclude_center: bool,
    /// Boundary threshold on the normalized trace.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub threshold: f64,
    /// Comma-separated, strictly descending level thresholds.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        default_value = "0.7,0.5,0.3"
    )]
    pub levels: Vec<f64>,
    #[arg(long, global = true, default_value_t = 2.5)]
    pub energy_threshold: f64,
    /// Minimum distance between two boundaries or two energy marks.
    #[arg(long, global = true, default_value_t = 32.0)]
    pub min_sep_ms: f64,
    /// Random seed; overrides the seed in a synthesis spec.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl GlobalOpts {
    pub fn center(&self) -> CenterRule {
        if self.exclude_center {
            CenterRule::Exclude
        } else {
            CenterRule::Include
        }
    }
}

fn parse_taper(s: &str) -> Result<Taper, String> {
    match s.to_ascii_lowercase().as_str() {
        "hamming" => Ok(Taper::Hamming),
        "rectangular" | "rect" | "none" => Ok(Taper::Rectangular),
        _ => Err(format!("unknown taper {s:?} (hamming or rectangular)")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment one or more WAV files into labelled regions.
    Segment(SegmentArgs),
    /// Render a synthesis spec to WAV plus ground-truth labels.
    Synth(SynthArgs),
    /// Add Gaussian or impulsive noise to a WAV file.
    Noise(NoiseArgs),
    /// Score hypothesis boundaries against reference boundaries.
    Eval(EvalArgs),
    /// Report how often each filter window supplied the output.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Label file (single input only). Defaults to `<stem>.labels.txt`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the per-frame trace here (single input only).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Add energy marks to every level's boundaries.
    #[arg(long)]
    pub marks_as_boundaries: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub spec: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Ground-truth labels. Defaults to `<stem>.truth.txt`.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Add white Gaussian noise at this signal-to-noise ratio.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Replace samples by impulses with this probability.
    #[arg(long)]
    pub impulse_prob: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub impulse_amp: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub hyp: PathBuf,
    /// Matching tolerance.
    #[arg(long, default_value_t = 16.0)]
    pub tol_ms: f64,
    /// Label tag to read from the reference file.
    #[arg(long)]
    pub ref_label: Option<String>,
    /// Label tag to read from the hypothesis file, e.g. L0.5.
    #[arg(long)]
    pub hyp_label: Option<String>,
    /// Sample rate used to convert label times to frames.
    #[arg(long, default_value_t = mhfseg::signal_io::DEFAULT_SAMPLE_RATE_HZ)]
    pub sample_rate: u32,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub trace: PathBuf,
    /// Frames whose normalized value is below this are left out.
    #[arg(long, default_value_t = 0.1)]
    pub min_value: f64,
    /// Screen on the raw trace value instead of the normalized one.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an invalid spec; exit status 2.
    Usage(String),
    /// Unreadable input or failed write; exit status 1.
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<mhfseg::Error> for CliError {
    fn from(e: mhfseg::Error) -> Self {
        use mhfseg::Error as E;
        match e {
            E::InvalidSpec { .. }
            | E::InvalidConfig(_)
            | E::InvalidFrameParams(_)
            | E::NonDescendingThresholds(_)
            | E::OrderTooLarge { .. }
            | E::NonPowerOfTwoLength(_) => CliError::Usage(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Segment(a) => commands::segment(&cli.opts, a),
        Command::Synth(a) => commands::synth(&cli.opts, a),
        Command::Noise(a) => commands::noise(&cli.opts, a),
        Command::Eval(a) => commands::eval(&cli.opts, a),
        Command::Stats(a) => commands::stats(&cli.opts, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mhfseg: {e}");
            ExitCode::from(e.code())
        }
    }
}
