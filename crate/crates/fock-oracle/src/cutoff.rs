//! Choice of the Fock-space truncation.

use mzi_core::ExperimentParams;

use crate::single_mode::{coherent_distribution, squeezed_distribution};
use crate::OracleError;

/// How far out the truncated space must reach.
///
/// Photon addition reweights the input by roughly `N^m` and a moment of order
/// `k` by a further `N^k`, so the discarded input probability is weighted by
/// `(N+m+1)^{m+k}` before comparing it to `weighted_tail_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    pub weighted_tail_tol: f64,
    pub moment_order: u32,
    /// Accepted truncation tail on the constructed state.
    pub norm_tail_tol: f64,
    pub max_cutoff: usize,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self {
            weighted_tail_tol: 1e-13,
            moment_order: 4,
            norm_tail_tol: 1e-12,
            max_cutoff: 400,
        }
    }
}

impl CutoffPolicy {
    /// Larger cutoff used for the single retry.
    pub fn escalate(&self, cutoff: usize) -> usize {
        (cutoff + cutoff / 2 + 10).min(self.max_cutoff)
    }
}

/// Floor taken from the simple per-mode rule
/// `max(20, ⌈|α|² + 6|α|⌉ + m + 4, ⌈5 sinh² r⌉ + m + 6)`.
fn rule_of_thumb(params: &ExperimentParams) -> usize {
    let a = params.alpha_mag;
    let m = params.added_photons() as usize;
    let coh = (a * a + 6.0 * a).ceil() as usize + m + 4;
    let sq = (5.0 * params.r.sinh().powi(2)).ceil() as usize + m + 6;
    20.max(coh).max(sq)
}

/// Total-photon-number cutoff for `params`: the smallest `n_c` whose weighted
/// input tail meets the policy, never below the rule-of-thumb floor.
pub fn choose_cutoff(params: &ExperimentParams, policy: &CutoffPolicy) -> Result<usize, OracleError> {
    let m = params.added_photons() as usize;
    let len = 4 * policy.max_cutoff;
    let pc = coherent_distribution(params.alpha_mag, len);
    let ps = squeezed_distribution(params.r, len);
    // P(N) for the input product state, N = n_a + n_b
    let mut p = vec![0.0; len];
    for (i, &x) in pc.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in ps[..len - i].iter().enumerate() {
            p[i + j] += x * y;
        }
    }
    let power = (m as i32) + policy.moment_order as i32;
    // tail[k] = Σ_{N >= k} P(N)(N+m+1)^{power}
    let mut tail = vec![0.0; len + 1];
    for n in (0..len).rev() {
        tail[n] = tail[n + 1] + p[n] * ((n + m + 1) as f64).powi(power);
    }
    let needed = (0..len)
        .find(|&k| tail[k + 1] <= policy.weighted_tail_tol)
        .ok_or(OracleError::TruncationLoss {
            tail: tail[len - 1],
            cutoff: policy.max_cutoff,
        })?;
    let nc = (needed + m).max(rule_of_thumb(params));
    if nc > policy.max_cutoff {
        return Err(OracleError::TruncationLoss {
            tail: tail[policy.max_cutoff.saturating_sub(m) + 1],
            cutoff: policy.max_cutoff,
        });
    }
    Ok(nc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mzi_core::Scheme;

    #[test]
    fn floor_applies_for_small_inputs() {
        let p = ExperimentParams::new(Scheme::Original, 0, 0.0, 0.0);
        assert_eq!(choose_cutoff(&p, &CutoffPolicy::default()).unwrap(), 20);
    }

    #[test]
    fn grows_with_squeezing_and_addition() {
        let pol = CutoffPolicy::default();
        let a = choose_cutoff(&ExperimentParams::new(Scheme::A, 0, 1.0, 0.3), &pol).unwrap();
        let b = choose_cutoff(&ExperimentParams::new(Scheme::A, 0, 1.0, 0.8), &pol).unwrap();
        let c = choose_cutoff(&ExperimentParams::new(Scheme::A, 2, 1.0, 0.8), &pol).unwrap();
        assert!(a < b && b < c, "{a} {b} {c}");
    }

    #[test]
    fn refuses_beyond_max() {
        let pol = CutoffPolicy {
            max_cutoff: 30,
            ..CutoffPolicy::default()
        };
        let p = ExperimentParams::new(Scheme::Original, 0, 1.0, 1.5);
        assert!(matches!(choose_cutoff(&p, &pol), Err(OracleError::TruncationLoss { .. })));
    }
}
