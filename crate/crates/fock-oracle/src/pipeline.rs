//! The interferometer, step by step.

use mzi_core::{ExperimentParams, Scheme};

use crate::cutoff::{choose_cutoff, CutoffPolicy};
use crate::density::{loss_channel, TwoModeDensity};
use crate::single_mode::{coherent, squeezed_vacuum};
use crate::splitter::{beam_splitter, Splitter};
use crate::state::{Mode, TwoModeState};
use crate::OracleError;

/// Where to stop the sequence `B₂ U_φ B_L · (scheme-specific preparation)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopAt {
    /// After the arm losses, before `U_φ`.
    BeforePhase,
    /// After `U_φ`, before `B₂`.
    BeforeSecondSplitter,
    Output,
}

/// Pure while every step is unitary (`T = 1`), mixed once arm loss acts.
#[derive(Debug, Clone, PartialEq)]
pub enum PipelineOutput {
    Pure(TwoModeState),
    Mixed(TwoModeDensity),
}

impl PipelineOutput {
    pub fn cutoff(&self) -> usize {
        match self {
            Self::Pure(s) => s.cutoff(),
            Self::Mixed(r) => r.cutoff(),
        }
    }

    pub fn norm_tail(&self) -> f64 {
        match self {
            Self::Pure(s) => s.norm_tail,
            Self::Mixed(r) => r.norm_tail(),
        }
    }

    pub fn into_density(self) -> TwoModeDensity {
        match self {
            Self::Pure(s) => s.into(),
            Self::Mixed(r) => r,
        }
    }

    /// Continues a [`StopAt::BeforePhase`] result through `U_φ` and `B₂`, so
    /// that several phases can share one (φ-independent) preparation.
    pub fn complete(&self, phi: f64) -> PipelineOutput {
        self.clone()
            .map(|s| beam_splitter(&s.phase_shift(phi), Splitter::B2))
    }

    fn map(self, pure: impl Fn(&TwoModeState) -> TwoModeState) -> PipelineOutput {
        match self {
            Self::Pure(s) => Self::Pure(pure(&s)),
            Self::Mixed(r) => Self::Mixed(r.map(pure)),
        }
    }
}

/// `|α⟩_a ⊗ S(r)|0⟩_b` in a space of total photon number ≤ `cutoff`.
pub(crate) fn input_state(params: &ExperimentParams, cutoff: usize) -> Result<TwoModeState, OracleError> {
    let a = coherent(params.alpha(), cutoff)?;
    let b = squeezed_vacuum(params.r, cutoff)?;
    Ok(TwoModeState::product(&a, &b, cutoff))
}

/// The lossless preparation up to (not including) the arm losses:
/// `B₁ a†^m` for scheme A, `a†^m B₁` for scheme B, `B₁` for the original.
pub(crate) fn prepare(params: &ExperimentParams, cutoff: usize) -> Result<TwoModeState, OracleError> {
    let input = input_state(params, cutoff)?;
    let m = params.added_photons() as usize;
    Ok(match params.scheme {
        Scheme::Original => beam_splitter(&input, Splitter::B1),
        Scheme::A => {
            let (s, _) = input.photon_add(Mode::A, m)?;
            beam_splitter(&s, Splitter::B1)
        }
        Scheme::B => {
            let s = beam_splitter(&input, Splitter::B1);
            s.photon_add(Mode::A, m)?.0
        }
    })
}

fn run_at(params: &ExperimentParams, stop_at: StopAt, cutoff: usize) -> Result<PipelineOutput, OracleError> {
    let prepared = prepare(params, cutoff)?;
    let t = params.transmittance;
    let mut out = if t < 1.0 {
        let rho = loss_channel(&prepared.into(), Mode::A, t);
        PipelineOutput::Mixed(loss_channel(&rho, Mode::B, t))
    } else {
        PipelineOutput::Pure(prepared)
    };
    if stop_at == StopAt::BeforePhase {
        return Ok(out);
    }
    out = out.map(|s| s.phase_shift(params.phi));
    if stop_at == StopAt::BeforeSecondSplitter {
        return Ok(out);
    }
    Ok(out.map(|s| beam_splitter(s, Splitter::B2)))
}

/// Runs the interferometer for `params` with the default cutoff policy.
pub fn run_pipeline(params: &ExperimentParams, stop_at: StopAt) -> Result<PipelineOutput, OracleError> {
    run_pipeline_with(params, stop_at, &CutoffPolicy::default())
}

/// As [`run_pipeline`]; if the constructed state loses more than the policy
/// allows to truncation, the cutoff is raised once before giving up.
pub fn run_pipeline_with(
    params: &ExperimentParams,
    stop_at: StopAt,
    policy: &CutoffPolicy,
) -> Result<PipelineOutput, OracleError> {
    params.validate()?;
    with_retry(params, policy, |nc| run_at(params, stop_at, nc), PipelineOutput::norm_tail)
}

pub(crate) fn with_retry<T>(
    params: &ExperimentParams,
    policy: &CutoffPolicy,
    run: impl Fn(usize) -> Result<T, OracleError>,
    tail: impl Fn(&T) -> f64,
) -> Result<T, OracleError> {
    let first = choose_cutoff(params, policy)?;
    let mut nc = first;
    for attempt in 0..2 {
        match run(nc) {
            Ok(out) if tail(&out) <= policy.norm_tail_tol => return Ok(out),
            Ok(out) if attempt == 1 => {
                return Err(OracleError::TruncationLoss {
                    tail: tail(&out),
                    cutoff: nc,
                })
            }
            Err(e) if attempt == 1 => return Err(e),
            _ => nc = policy.escalate(first),
        }
    }
    unreachable!("loop returns on the second attempt")
}
