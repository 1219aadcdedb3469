//! Speech segmentation with multilevel hybrid filters.
//!
//! The pipeline frames a signal, turns each frame into a spectral parameter
//! vector (FFT magnitudes or LPC coefficients), runs a two-stage mean/min
//! filter over a nine-frame context to obtain a transition level per frame,
//! and picks boundaries from that trace after normalizing it between
//! energy-change marks.

pub mod error;
pub mod evaluate;
pub mod measures;
pub mod mhf;
pub mod segmenter;
pub mod signal_io;
pub mod spectral;

pub use error::{Error, Result};
pub use evaluate::{match_boundaries, peak_widths, MatchReport, PeakWidth};
pub use measures::{dist, pinv_energy, MeasureKind};
pub use mhf::{
    context_averages, difference_vector, energy_trace, stage2, variation_function, window_usage,
    CenterRule, ContextAverages, MhfConfig, Stage1, Stage2, VariationTrace, WindowUsage,
};
pub use segmenter::{
    energy_marks, local_normalize, multilevel, pick_peaks, segment, Level, Segmentation,
    SegmenterConfig,
};
pub use signal_io::{
    add_gaussian_noise, add_impulse_noise, load_wav, save_wav, synthesize, AudioBuffer, Noisy,
    Section, Source, SynthSpec,
};
pub use spectral::{
    analyze, autocorrelation, frame_signal, lpc_coefficients, magnitude_spectrum, AnalysisKind,
    FrameParams, Lpc, SequenceKind, SpectralSequence, Taper,
};
