//! Mixed two-mode states and the photon-loss channel.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::splitter::{beam_splitter, Splitter};
use crate::state::{Mode, TwoModeState};
use crate::OracleError;

/// Branches lighter than this fraction of the trace are dropped by the loss
/// channel. Their contribution to any moment of order ≤ 8 stays far below the
/// oracle's accuracy target.
pub const BRANCH_PRUNE_REL: f64 = 1e-22;

/// A density matrix kept as an ensemble of unnormalized pure branches,
/// `ρ = Σ_k |ψ_k⟩⟨ψ_k|`. A branch may live on a smaller triangle than the
/// density's cutoff (a branch that lost `l` photons needs `l` fewer levels).
///
/// Every channel used by the interferometer maps branches to branches, so the
/// dense `((n_a,n_b),(n_a′,n_b′))` matrix is only materialized on request by
/// [`TwoModeDensity::to_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeDensity {
    cutoff: usize,
    branches: Vec<TwoModeState>,
}

impl From<TwoModeState> for TwoModeDensity {
    fn from(state: TwoModeState) -> Self {
        Self {
            cutoff: state.cutoff(),
            branches: vec![state],
        }
    }
}

impl TwoModeDensity {
    pub fn from_branches(cutoff: usize, branches: Vec<TwoModeState>) -> Self {
        assert!(branches.iter().all(|b| b.cutoff() <= cutoff));
        Self { cutoff, branches }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn branches(&self) -> &[TwoModeState] {
        &self.branches
    }

    pub fn trace(&self) -> f64 {
        self.branches.iter().map(TwoModeState::norm_sqr).sum()
    }

    /// Largest truncation tail recorded on any branch.
    pub fn norm_tail(&self) -> f64 {
        self.branches.iter().map(|b| b.norm_tail).fold(0.0, f64::max)
    }

    /// Rescales to unit trace and returns the trace before rescaling.
    pub fn normalize(&mut self) -> f64 {
        let t = self.trace();
        if t > 0.0 {
            let s = t.sqrt().recip();
            for b in &mut self.branches {
                b.scale(s);
            }
        }
        t
    }

    /// Applies the same pure-state map to every branch.
    pub fn map(&self, f: impl Fn(&TwoModeState) -> TwoModeState) -> TwoModeDensity {
        Self {
            cutoff: self.cutoff,
            branches: self.branches.iter().map(f).collect(),
        }
    }

    pub fn beam_splitter(&self, which: Splitter) -> TwoModeDensity {
        self.map(|b| beam_splitter(b, which))
    }

    pub fn phase_shift(&self, phi: f64) -> TwoModeDensity {
        self.map(|b| b.phase_shift(phi))
    }

    /// `a†^m ρ a^m / tr(·)`; returns the state and the trace before
    /// normalization.
    pub fn photon_add(&self, mode: Mode, m: usize) -> Result<(TwoModeDensity, f64), OracleError> {
        let mut out = self.map(|b| b.raise(mode, m));
        let n = out.normalize();
        if n == 0.0 {
            return Err(OracleError::TruncationLoss {
                tail: 1.0,
                cutoff: self.cutoff,
            });
        }
        Ok((out, n))
    }

    /// Dense matrix over the square index `n_a·(cutoff+1) + n_b`.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let side = self.cutoff + 1;
        let dim = side * side;
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for b in &self.branches {
            let v: Vec<(usize, Complex64)> = b
                .iter()
                .filter(|(_, _, c)| c.norm_sqr() > 0.0)
                .map(|(na, nb, c)| (na * side + nb, c))
                .collect();
            for &(i, ci) in &v {
                for &(j, cj) in &v {
                    rho[(i, j)] += ci * cj.conj();
                }
            }
        }
        rho
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized pure state `ψ`.
    pub fn fidelity_with(&self, psi: &TwoModeState) -> f64 {
        self.branches.iter().map(|b| psi.inner(b).norm_sqr()).sum()
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

fn prune(branches: Vec<TwoModeState>, total: f64) -> Vec<TwoModeState> {
    branches
        .into_iter()
        .filter(|b| b.norm_sqr() > BRANCH_PRUNE_REL * total)
        .collect()
}

/// Photon loss on `mode` with the given transmittance η, in Kraus form:
/// `ρ → Σ_l K_l ρ K_l†`, `K_l = √((1−η)^l / l!) η^{n/2} a^l`.
pub fn loss_channel(rho: &TwoModeDensity, mode: Mode, transmittance: f64) -> TwoModeDensity {
    let eta = transmittance.clamp(0.0, 1.0);
    if eta == 1.0 {
        return rho.clone();
    }
    let lnf = ln_factorials(rho.cutoff);
    let total = rho.trace();
    let mut out = Vec::new();
    for psi in &rho.branches {
        for l in 0..=psi.cutoff() {
            let c = psi.cutoff();
            let mut k = TwoModeState::zeros(c - l);
            k.norm_tail = psi.norm_tail;
            for n in 0..=c - l {
                // |⟨n|K_l|n+l⟩|² = C(n+l, l) (1−η)^l η^n
                let w = if eta == 0.0 {
                    if n == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (lnf[n + l] - lnf[n] - lnf[l]
                        + l as f64 * (1.0 - eta).ln()
                        + n as f64 * eta.ln())
                    .exp()
                };
                if w == 0.0 {
                    continue;
                }
                let s = w.sqrt();
                for o in 0..=c - n - l {
                    match mode {
                        Mode::A => k.set(n, o, psi.get(n + l, o) * s),
                        Mode::B => k.set(o, n, psi.get(o, n + l) * s),
                    }
                }
            }
            out.push(k);
        }
    }
    TwoModeDensity {
        cutoff: rho.cutoff,
        branches: prune(out, total),
    }
}

/// The same channel realized physically: the lossy mode meets a vacuum
/// ancilla on a beam splitter of transmittance η, and the ancilla is traced
/// out (each ancilla photon number becomes one branch).
pub fn loss_channel_ancilla(rho: &TwoModeDensity, mode: Mode, transmittance: f64) -> TwoModeDensity {
    let c = rho.cutoff;
    let total = rho.trace();
    let which = Splitter::Fictitious { transmittance };
    let mut out = Vec::new();
    for psi in &rho.branches {
        let psi = &psi.with_cutoff(c);
        let mut by_ancilla: Vec<TwoModeState> = (0..=c).map(|_| TwoModeState::zeros(c)).collect();
        for o in 0..=c {
            let mut sub = TwoModeState::zeros(c - o);
            for k in 0..=c - o {
                let amp = match mode {
                    Mode::A => psi.get(k, o),
                    Mode::B => psi.get(o, k),
                };
                sub.set(k, 0, amp);
            }
            for (k, nv, amp) in beam_splitter(&sub, which).iter() {
                match mode {
                    Mode::A => by_ancilla[nv].set(k, o, amp),
                    Mode::B => by_ancilla[nv].set(o, k, amp),
                }
            }
        }
        for b in &mut by_ancilla {
            b.norm_tail = psi.norm_tail;
        }
        out.extend(by_ancilla);
    }
    TwoModeDensity {
        cutoff: c,
        branches: prune(out, total),
    }
}
