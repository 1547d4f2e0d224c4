//! Brute-force reference for the photon-added Mach–Zehnder interferometer.
//!
//! Everything here is done the slow, obvious way in a truncated two-mode Fock
//! space: input states are built amplitude by amplitude, beam splitters are
//! exact unitaries on each total-photon-number block, photon addition is a
//! literal `a†^m`, and loss is a Kraus channel. The results serve as ground
//! truth for the generating-function engine in `mzi-core`.

mod cutoff;
mod density;
mod detection;
mod moments;
mod pipeline;
mod qfi;
mod single_mode;
mod splitter;
mod state;

pub use cutoff::{choose_cutoff, CutoffPolicy};
pub use density::{loss_channel, loss_channel_ancilla, TwoModeDensity};
pub use detection::{detector_stats, sensitivity_oracle, DetectorStats, SLOPE_STEP};
pub use moments::{moment_oracle, moment_table};
pub use pipeline::{run_pipeline, run_pipeline_with, PipelineOutput, StopAt};
pub use qfi::{qfi_mixed_oracle, qfi_pure_oracle, LossOrdering};
pub use single_mode::{
    coherent, coherent_distribution, squeezed_distribution, squeezed_vacuum, INPUT_TAIL_TOL,
};
pub use splitter::{beam_splitter, Splitter};
pub use state::{Mode, TwoModeState};

use mzi_core::ParamError;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("truncation at cutoff {cutoff} discards probability {tail:e}")]
    TruncationLoss { tail: f64, cutoff: usize },
    #[error("moment of order {order} needs more headroom than cutoff {cutoff} provides")]
    SpecExceedsCutoff { order: u32, cutoff: usize },
    #[error("ill-conditioned spectral problem: {0}")]
    IllConditioned(String),
    #[error(transparent)]
    Param(#[from] ParamError),
}
