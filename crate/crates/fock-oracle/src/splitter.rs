//! Two-mode beam splitters as exact unitaries on photon-number blocks.
//!
//! Every splitter here is `exp(-iθG)` with `G = g a†b + g* ab†`. The generator
//! conserves `n_a + n_b`, so on the block of total `n` (basis `|k, n-k⟩`) it is
//! a Hermitian tridiagonal matrix; diagonalizing it gives the block unitary to
//! machine precision.

use std::f64::consts::FRAC_PI_4;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::state::TwoModeState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Splitter {
    /// `exp[-iπ(a†b + ab†)/4]`.
    B1,
    /// `B1†`.
    B2,
    /// `exp[arccos√T (a†b − ab†)]` with `b` playing the vacuum ancilla: the
    /// photon stays in mode `a` with probability `T`.
    Fictitious { transmittance: f64 },
}

fn block_unitary(g: Complex64, theta: f64, n: usize) -> DMatrix<Complex64> {
    let dim = n + 1;
    let mut gen = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..n {
        let c = (((k + 1) * (n - k)) as f64).sqrt();
        gen[(k + 1, k)] = g * c;
        gen[(k, k + 1)] = g.conj() * c;
    }
    let eig = gen.symmetric_eigen();
    let v = eig.eigenvectors;
    let phases = DVector::from_iterator(
        dim,
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -theta * l)),
    );
    let mut vd = v.clone();
    for (j, p) in phases.iter().enumerate() {
        for i in 0..dim {
            vd[(i, j)] *= p;
        }
    }
    vd * v.adjoint()
}

/// Real form of the balanced splitter: with `D = diag((−i)^k)` on block `n`,
/// `B1 = D R D†` where `R = exp[−(π/4)(a†b − ab†)]` is real orthogonal. Blocks
/// of `R` are computed once per total photon number and shared.
fn balanced_block(n: usize) -> Arc<DMatrix<f64>> {
    static CACHE: OnceLock<Mutex<Vec<Arc<DMatrix<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut blocks = cache.lock().unwrap_or_else(|e| e.into_inner());
    while blocks.len() <= n {
        let k = blocks.len();
        let u = block_unitary(Complex64::new(1.0, 0.0), FRAC_PI_4, k);
        // R_jk = i^j U_jk (−i)^k
        let r = DMatrix::from_fn(k + 1, k + 1, |j, l| (u[(j, l)] * i_pow(j as i64 - l as i64)).re);
        blocks.push(Arc::new(r));
    }
    Arc::clone(&blocks[n])
}

/// `i^k` for any integer `k`.
fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn apply_balanced(state: &TwoModeState, adjoint: bool) -> TwoModeState {
    let mut out = TwoModeState::zeros(state.cutoff());
    out.norm_tail = state.norm_tail;
    let mut w = Vec::with_capacity(state.cutoff() + 1);
    for n in 0..=state.cutoff() {
        let mut v = state.block(n);
        if v.iter().all(|c| c.norm_sqr() == 0.0) {
            continue;
        }
        // D† v
        for (k, x) in v.iter_mut().enumerate() {
            *x *= i_pow(k as i64);
        }
        let r = balanced_block(n);
        w.clear();
        w.resize(n + 1, Complex64::new(0.0, 0.0));
        let data = r.as_slice();
        if adjoint {
            // (Rᵀ v)_j = Σ_k R_kj v_k: column j of R is contiguous
            for (wj, col) in w.iter_mut().zip(data.chunks_exact(n + 1)) {
                let (mut re, mut im) = (0.0, 0.0);
                for (&rkj, x) in col.iter().zip(&v) {
                    re += rkj * x.re;
                    im += rkj * x.im;
                }
                *wj = Complex64::new(re, im);
            }
        } else {
            for (col, x) in data.chunks_exact(n + 1).zip(&v) {
                for (wj, &rjk) in w.iter_mut().zip(col) {
                    wj.re += rjk * x.re;
                    wj.im += rjk * x.im;
                }
            }
        }
        // D w
        for (j, x) in w.iter_mut().enumerate() {
            *x *= i_pow(-(j as i64));
        }
        out.set_block(n, &w);
    }
    out
}

fn apply_blocks(state: &TwoModeState, block: impl Fn(usize) -> DMatrix<Complex64>) -> TwoModeState {
    let mut out = TwoModeState::zeros(state.cutoff());
    out.norm_tail = state.norm_tail;
    for n in 0..=state.cutoff() {
        let v = DVector::from_vec(state.block(n));
        if v.iter().all(|c| c.norm_sqr() == 0.0) {
            continue;
        }
        let w = block(n) * v;
        out.set_block(n, w.as_slice());
    }
    out
}

/// Applies `which` to `state` exactly.
pub fn beam_splitter(state: &TwoModeState, which: Splitter) -> TwoModeState {
    match which {
        Splitter::B1 => apply_balanced(state, false),
        Splitter::B2 => apply_balanced(state, true),
        Splitter::Fictitious { transmittance } => {
            let theta = transmittance.clamp(0.0, 1.0).sqrt().acos();
            apply_blocks(state, |n| block_unitary(Complex64::new(0.0, 1.0), theta, n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Mode;
    use proptest::prelude::*;

    fn random_state(cutoff: usize, seed: u64) -> TwoModeState {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut s = TwoModeState::zeros(cutoff);
        for na in 0..=cutoff {
            for nb in 0..=cutoff - na {
                s.set(na, nb, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        s.normalize();
        s
    }

    fn mean(s: &TwoModeState, mode: Mode) -> f64 {
        s.lower(mode, 1).norm_sqr()
    }

    #[test]
    fn balanced_split_of_one_photon() {
        let s = beam_splitter(&TwoModeState::fock(4, 1, 0), Splitter::B1);
        assert!((mean(&s, Mode::A) - 0.5).abs() < 1e-14);
        assert!((mean(&s, Mode::B) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn b1_single_photon_amplitudes() {
        // exp[-iπ(a†b+ab†)/4]|1,0⟩ = (|1,0⟩ − i|0,1⟩)/√2
        let s = beam_splitter(&TwoModeState::fock(3, 1, 0), Splitter::B1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.get(1, 0) - Complex64::new(h, 0.0)).norm() < 1e-14);
        assert!((s.get(0, 1) - Complex64::new(0.0, -h)).norm() < 1e-14);
    }

    #[test]
    fn real_form_reproduces_the_unitary() {
        for n in [0, 1, 2, 5, 12] {
            let u = block_unitary(Complex64::new(1.0, 0.0), FRAC_PI_4, n);
            let r = balanced_block(n);
            for j in 0..=n {
                for k in 0..=n {
                    let back = i_pow(-(j as i64)) * r[(j, k)] * i_pow(k as i64);
                    assert!((back - u[(j, k)]).norm() < 1e-13);
                }
            }
            let ortho = r.transpose() * &*r - DMatrix::<f64>::identity(n + 1, n + 1);
            assert!(ortho.norm() < 1e-12);
        }
    }

    #[test]
    fn hong_ou_mandel() {
        let s = beam_splitter(&TwoModeState::fock(4, 1, 1), Splitter::B1);
        assert!(s.get(1, 1).norm() < 1e-14);
    }

    #[test]
    fn fictitious_keeps_photon_with_probability_t() {
        for t in [0.0, 0.3, 0.64, 1.0] {
            let s = beam_splitter(&TwoModeState::fock(3, 1, 0), Splitter::Fictitious { transmittance: t });
            assert!((s.get(1, 0).norm_sqr() - t).abs() < 1e-14);
            assert!((s.get(0, 1).norm_sqr() - (1.0 - t)).abs() < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn unitary_and_block_preserving(seed in any::<u64>(), cutoff in 1usize..14, t in 0.0f64..1.0) {
            let s = random_state(cutoff, seed);
            for which in [Splitter::B1, Splitter::B2, Splitter::Fictitious { transmittance: t }] {
                let o = beam_splitter(&s, which);
                prop_assert!((o.norm_sqr() - 1.0).abs() < 1e-12);
                let (p, q) = (s.total_number_distribution(), o.total_number_distribution());
                for (x, y) in p.iter().zip(&q) {
                    prop_assert!((x - y).abs() < 1e-13);
                }
            }
            let back = beam_splitter(&beam_splitter(&s, Splitter::B1), Splitter::B2);
            let err: f64 = back.iter().map(|(a, b, c)| (c - s.get(a, b)).norm_sqr()).sum();
            prop_assert!(err.sqrt() < 1e-12);
        }
    }
}
