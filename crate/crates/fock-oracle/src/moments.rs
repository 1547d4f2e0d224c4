//! Normally ordered moments by direct ladder-operator action.

use mzi_core::genfun::MomentSpec;
use num_complex::Complex64;

use crate::density::TwoModeDensity;
use crate::state::{Mode, TwoModeState};
use crate::OracleError;

/// `⟨a†^{p₁} b†^{q₁} b^{q₂} a^{p₂}⟩ = tr ρ(...)`. The `m` field of the spec is
/// ignored: added photons are already part of the state.
pub fn moment_oracle(rho: &TwoModeDensity, spec: &MomentSpec) -> Result<Complex64, OracleError> {
    Ok(moment_table(rho, std::slice::from_ref(spec))?[0])
}

/// All `specs` in one pass over the branches, normalized by `tr ρ`.
///
/// Each branch contributes `⟨b^{q₁} a^{p₁} ψ | b^{q₂} a^{p₂} ψ⟩`; the lowered
/// vectors are built once per branch and shared by every spec.
pub fn moment_table(rho: &TwoModeDensity, specs: &[MomentSpec]) -> Result<Vec<Complex64>, OracleError> {
    let cutoff = rho.cutoff();
    let mut order = 0;
    for s in specs {
        if s.order() as usize > cutoff {
            return Err(OracleError::SpecExceedsCutoff {
                order: s.order(),
                cutoff,
            });
        }
        order = order.max((s.p1 + s.q1).max(s.p2 + s.q2));
    }
    let order = order as usize;
    // ⟨L₁ψ|L₂ψ⟩ and ⟨L₂ψ|L₁ψ⟩ are conjugates: evaluate each unordered pair once
    let side = order + 1;
    let key = |p: u32, q: u32| p as usize * side + q as usize;
    let mut pairs: Vec<(usize, usize)> = specs
        .iter()
        .map(|s| {
            let (l, r) = (key(s.p1, s.q1), key(s.p2, s.q2));
            (l.min(r), l.max(r))
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut sums = vec![Complex64::new(0.0, 0.0); pairs.len()];
    for psi in rho.branches() {
        let lowered = lowered_family(psi, order);
        let get = |k: usize| &lowered[k / side][k % side];
        for (acc, &(l, r)) in sums.iter_mut().zip(&pairs) {
            *acc += get(l).inner(get(r));
        }
    }
    let acc: Vec<Complex64> = specs
        .iter()
        .map(|s| {
            let (l, r) = (key(s.p1, s.q1), key(s.p2, s.q2));
            let i = pairs.binary_search(&(l.min(r), l.max(r))).expect("pair was registered");
            if l <= r {
                sums[i]
            } else {
                sums[i].conj()
            }
        })
        .collect();
    let tr = rho.trace();
    Ok(acc.into_iter().map(|v| v / tr).collect())
}

/// `out[p][q] = b^q a^p ψ` for `p + q <= order`.
fn lowered_family(psi: &TwoModeState, order: usize) -> Vec<Vec<TwoModeState>> {
    let mut out = Vec::with_capacity(order + 1);
    let mut ap = psi.clone();
    for p in 0..=order {
        if p > 0 {
            ap = ap.lower(Mode::A, 1);
        }
        let mut row = Vec::with_capacity(order + 1 - p);
        let mut bq = ap.clone();
        for q in 0..=order - p {
            if q > 0 {
                bq = bq.lower(Mode::B, 1);
            }
            row.push(bq.clone());
        }
        out.push(row);
    }
    out
}
