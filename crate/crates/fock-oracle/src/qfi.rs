//! Quantum Fisher information of the phase `U_φ = exp(iφ n_a)`.

use mzi_core::{ExperimentParams, Scheme};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cutoff::CutoffPolicy;
use crate::density::{loss_channel, TwoModeDensity};
use crate::pipeline::{input_state, prepare, with_retry};
use crate::splitter::Splitter;
use crate::state::{Mode, TwoModeState};
use crate::OracleError;

/// Where the mode-`a` loss `η` sits relative to photon addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossOrdering {
    /// Loss acts on the fully prepared probe, just before the phase. This is
    /// the setting of the Escher-type bound the closed-form lossy QFI comes
    /// from.
    #[default]
    AfterPreparation,
    /// Loss acts on mode `a` right before `a†^m`: on the coherent input for
    /// scheme A, after `B₁` for scheme B.
    BeforeAddition,
}

/// `4 Var(n_a)` of the lossless state entering the phase shifter. Arm
/// transmittance and η are ignored.
pub fn qfi_pure_oracle(params: &ExperimentParams) -> Result<f64, OracleError> {
    let params = params.validate()?;
    let policy = CutoffPolicy::default();
    let state = with_retry(&params, &policy, |nc| prepare(&params, nc), |s| s.norm_tail)?;
    Ok(pure_qfi(&state))
}

fn pure_qfi(state: &TwoModeState) -> f64 {
    let n = state.map_na(|k| k as f64);
    let norm = state.norm_sqr();
    let mean = state.inner(&n).re / norm;
    let second = n.norm_sqr() / norm;
    4.0 * (second - mean * mean)
}

/// QFI of the mixed state obtained with mode-`a` transmittance `params.eta`
/// (arm transmittance `T` is not applied).
pub fn qfi_mixed_oracle(params: &ExperimentParams, ordering: LossOrdering) -> Result<f64, OracleError> {
    let params = params.validate()?;
    let policy = CutoffPolicy::default();
    let rho = with_retry(
        &params,
        &policy,
        |nc| lossy_probe(&params, ordering, nc),
        TwoModeDensity::norm_tail,
    )?;
    mixed_qfi(&rho)
}

fn lossy_probe(
    params: &ExperimentParams,
    ordering: LossOrdering,
    cutoff: usize,
) -> Result<TwoModeDensity, OracleError> {
    let eta = params.eta;
    let m = params.added_photons() as usize;
    match (ordering, params.scheme) {
        (LossOrdering::AfterPreparation, _) | (LossOrdering::BeforeAddition, Scheme::Original) => {
            Ok(loss_channel(&prepare(params, cutoff)?.into(), Mode::A, eta))
        }
        (LossOrdering::BeforeAddition, Scheme::A) => {
            let rho = loss_channel(&input_state(params, cutoff)?.into(), Mode::A, eta);
            let (rho, _) = rho.photon_add(Mode::A, m)?;
            Ok(rho.beam_splitter(Splitter::B1))
        }
        (LossOrdering::BeforeAddition, Scheme::B) => {
            let split = crate::beam_splitter(&input_state(params, cutoff)?, Splitter::B1);
            let rho = loss_channel(&split.into(), Mode::A, eta);
            Ok(rho.photon_add(Mode::A, m)?.0)
        }
    }
}

/// QFI of `e^{iφn} ρ e^{-iφn}` for `ρ = Σ_k |ψ_k⟩⟨ψ_k|`.
///
/// With the Gram matrix `G_kl = ⟨ψ_k|ψ_l⟩ = Σ_i p_i v_i v_i†` (the `p_i` are
/// the nonzero eigenvalues of `ρ`) and `M_kl = ⟨ψ_k|n|ψ_l⟩`,
///
/// `F = 4 tr(ρn²) − 8 Σ_{ij} |v_i† M v_j|² / (p_i + p_j)`,
///
/// which is the usual `2 Σ (p_i−p_j)²/(p_i+p_j) |⟨e_i|n|e_j⟩|²` with the
/// kernel contributions summed in closed form. Nothing is divided by a small
/// eigenvalue alone, so near-degenerate or tiny eigenvalues are harmless.
pub(crate) fn mixed_qfi(rho: &TwoModeDensity) -> Result<f64, OracleError> {
    let branches = rho.branches();
    let k = branches.len();
    if k == 0 {
        return Ok(0.0);
    }
    let n_branches: Vec<TwoModeState> = branches.iter().map(|b| b.map_na(|x| x as f64)).collect();
    let mut gram = DMatrix::<Complex64>::zeros(k, k);
    let mut m = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let g = branches[i].inner(&branches[j]);
            let x = branches[i].inner(&n_branches[j]);
            gram[(i, j)] = g;
            gram[(j, i)] = g.conj();
            m[(i, j)] = x;
            m[(j, i)] = x.conj();
        }
    }
    let trace: f64 = (0..k).map(|i| gram[(i, i)].re).sum();
    let n2: f64 = n_branches.iter().map(TwoModeState::norm_sqr).sum();
    // Entries near the subnormal range derail the Householder reduction.
    let floor = 1e-200 * trace;
    gram.iter_mut().filter(|c| c.norm() < floor).for_each(|c| *c = Complex64::new(0.0, 0.0));
    let eig = gram.symmetric_eigen();
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(OracleError::IllConditioned("Gram eigendecomposition failed".into()));
    }
    let p: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
    let pmax = p.iter().copied().fold(0.0, f64::max);
    let v = eig.eigenvectors;
    let mv = v.adjoint() * m * &v;
    let mut cross = 0.0;
    for i in 0..k {
        for j in 0..k {
            let s = p[i] + p[j];
            if s > 1e-300 && s > 1e-16 * pmax {
                cross += mv[(i, j)].norm_sqr() / s;
            }
        }
    }
    let f = (4.0 * n2 - 8.0 * cross) / trace;
    if !f.is_finite() {
        return Err(OracleError::IllConditioned(format!("QFI evaluated to {f}")));
    }
    Ok(f.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_and_coherent() {
        let p = ExperimentParams::new(Scheme::Original, 0, 0.0, 0.0);
        assert!(qfi_pure_oracle(&p).unwrap().abs() < 1e-14);
        let p = ExperimentParams::new(Scheme::Original, 0, 1.0, 0.0);
        assert!((qfi_pure_oracle(&p).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_reduces_to_pure_without_loss() {
        let p = ExperimentParams::new(Scheme::B, 1, 0.7, 0.4);
        let pure = qfi_pure_oracle(&p).unwrap();
        for ord in [LossOrdering::AfterPreparation, LossOrdering::BeforeAddition] {
            let mixed = qfi_mixed_oracle(&p, ord).unwrap();
            assert!((mixed - pure).abs() < 1e-8 * pure.max(1.0), "{mixed} vs {pure}");
        }
    }

    #[test]
    fn total_loss_kills_information() {
        let p = ExperimentParams::new(Scheme::A, 1, 1.0, 0.5).with_eta(0.0);
        assert!(qfi_mixed_oracle(&p, LossOrdering::AfterPreparation).unwrap().abs() < 1e-10);
    }

    #[test]
    fn lossy_coherent_state_is_attenuated_coherent() {
        // loss maps |α/√2⟩ to |√η α/√2⟩, whose QFI is 4η|α|²/2
        let p = ExperimentParams::new(Scheme::Original, 0, 1.0, 0.0).with_eta(0.5);
        let f = qfi_mixed_oracle(&p, LossOrdering::AfterPreparation).unwrap();
        assert!((f - 1.0).abs() < 1e-10, "{f}");
    }

    #[test]
    fn dense_spectral_formula_agrees() {
        // textbook Σ 2(p_i−p_j)²/(p_i+p_j)|⟨e_i|n|e_j⟩|² on the materialized matrix
        let p = ExperimentParams::new(Scheme::B, 1, 0.4, 0.1).with_eta(0.6);
        let rho = loss_channel(&prepare(&p, 16).unwrap().into(), Mode::A, 0.6);
        let fast = mixed_qfi(&rho).unwrap();
        let side = rho.cutoff() + 1;
        // restrict to the populated triangle n_a + n_b <= cutoff
        let idx: Vec<usize> = (0..side * side).filter(|i| i / side + i % side < side).collect();
        let full = rho.to_matrix();
        let mat = DMatrix::from_fn(idx.len(), idx.len(), |i, j| full[(idx[i], idx[j])]);
        let eig = mat.symmetric_eigen();
        let n = DMatrix::<Complex64>::from_diagonal(&nalgebra::DVector::from_iterator(
            idx.len(),
            idx.iter().map(|i| Complex64::new((i / side) as f64, 0.0)),
        ));
        let e = &eig.eigenvectors;
        let nij = e.adjoint() * n * e;
        let mut slow = 0.0;
        for i in 0..idx.len() {
            for j in 0..idx.len() {
                let (a, b) = (eig.eigenvalues[i].max(0.0), eig.eigenvalues[j].max(0.0));
                if a + b > 1e-12 {
                    slow += 2.0 * (a - b).powi(2) / (a + b) * nij[(i, j)].norm_sqr();
                }
            }
        }
        assert!((fast - slow).abs() < 1e-8, "{fast} vs {slow}");
    }
}
