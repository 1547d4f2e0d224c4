//! Truncated two-mode pure states.

use num_complex::Complex64;

use crate::OracleError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// Two-mode amplitudes `ψ(n_a, n_b)` on the triangle `n_a + n_b <= cutoff`,
/// packed row by row (row `n_a` holds `n_b = 0..=cutoff-n_a`). Truncating by
/// total photon number keeps every photon-number block complete, so passive
/// optics act exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    cutoff: usize,
    amps: Vec<Complex64>,
    /// Probability mass discarded by truncation, relative to the state's
    /// norm at the time of discarding, accumulated over all operations.
    pub norm_tail: f64,
}

#[inline]
fn row_start(cutoff: usize, na: usize) -> usize {
    // Σ_{k<na} (cutoff + 1 - k)
    na * (cutoff + 1) - na * na.saturating_sub(1) / 2
}

fn packed_len(cutoff: usize) -> usize {
    (cutoff + 1) * (cutoff + 2) / 2
}

impl TwoModeState {
    pub fn zeros(cutoff: usize) -> Self {
        Self {
            cutoff,
            amps: vec![ZERO; packed_len(cutoff)],
            norm_tail: 0.0,
        }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut s = Self::zeros(cutoff);
        s.amps[0] = Complex64::new(1.0, 0.0);
        s
    }

    /// Fock state `|n_a, n_b⟩`.
    pub fn fock(cutoff: usize, na: usize, nb: usize) -> Self {
        assert!(na + nb <= cutoff, "Fock state outside the cutoff");
        let mut s = Self::zeros(cutoff);
        s.set(na, nb, Complex64::new(1.0, 0.0));
        s
    }

    /// Tensor product of two single-mode amplitude vectors, truncated to the
    /// triangle and renormalized.
    pub fn product(a: &[Complex64], b: &[Complex64], cutoff: usize) -> Self {
        let mut s = Self::zeros(cutoff);
        let mut dropped = 0.0;
        for (na, ca) in a.iter().enumerate() {
            for (nb, cb) in b.iter().enumerate() {
                let v = ca * cb;
                if na + nb <= cutoff {
                    s.set(na, nb, v);
                } else {
                    dropped += v.norm_sqr();
                }
            }
        }
        let kept = s.norm_sqr();
        s.norm_tail = dropped / (kept + dropped);
        s.scale(kept.sqrt().recip());
        s
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    #[inline]
    fn row(&self, na: usize) -> &[Complex64] {
        let s = row_start(self.cutoff, na);
        &self.amps[s..s + self.cutoff + 1 - na]
    }

    #[inline]
    fn row_mut(&mut self, na: usize) -> &mut [Complex64] {
        let s = row_start(self.cutoff, na);
        let len = self.cutoff + 1 - na;
        &mut self.amps[s..s + len]
    }

    #[inline]
    pub fn get(&self, na: usize, nb: usize) -> Complex64 {
        if na + nb > self.cutoff {
            ZERO
        } else {
            self.amps[row_start(self.cutoff, na) + nb]
        }
    }

    #[inline]
    pub fn set(&mut self, na: usize, nb: usize, v: Complex64) {
        assert!(na + nb <= self.cutoff, "amplitude outside the cutoff");
        self.amps[row_start(self.cutoff, na) + nb] = v;
    }

    /// Iterates `(n_a, n_b, ψ)` over the triangle.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..=self.cutoff)
            .flat_map(move |na| self.row(na).iter().enumerate().map(move |(nb, &c)| (na, nb, c)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&mut self, k: f64) {
        for c in &mut self.amps {
            *c *= k;
        }
    }

    /// Normalizes in place and returns the squared norm before scaling.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm_sqr();
        if n > 0.0 {
            self.scale(n.sqrt().recip());
        }
        n
    }

    /// `⟨self|other⟩`. The cutoffs may differ; amplitudes outside the smaller
    /// triangle pair with zeros.
    pub fn inner(&self, other: &TwoModeState) -> Complex64 {
        if self.cutoff == other.cutoff {
            return dot(&self.amps, &other.amps);
        }
        let c = self.cutoff.min(other.cutoff);
        (0..=c)
            .map(|na| {
                let len = c + 1 - na;
                dot(&self.row(na)[..len], &other.row(na)[..len])
            })
            .sum()
    }

    /// `mode^k |ψ⟩`, unnormalized. Lowering never leaves the space, and the
    /// result lives on the smaller triangle of cutoff `cutoff - k`.
    pub fn lower(&self, mode: Mode, k: usize) -> TwoModeState {
        let mut out = self.clone();
        for _ in 0..k.min(self.cutoff + 1) {
            if out.cutoff == 0 {
                out.amps[0] = ZERO;
                continue;
            }
            let c = out.cutoff - 1;
            let mut next = Self::zeros(c);
            next.norm_tail = out.norm_tail;
            for na in 0..=c {
                let dst = next.row_mut(na);
                match mode {
                    Mode::A => {
                        let f = ((na + 1) as f64).sqrt();
                        for (d, s) in dst.iter_mut().zip(out.row(na + 1)) {
                            *d = s * f;
                        }
                    }
                    Mode::B => {
                        for (nb, (d, s)) in dst.iter_mut().zip(&out.row(na)[1..]).enumerate() {
                            *d = s * ((nb + 1) as f64).sqrt();
                        }
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Unnormalized `mode†^k |ψ⟩`. Amplitude pushed past the cutoff is dropped
    /// and accounted in `norm_tail`.
    pub fn raise(&self, mode: Mode, k: usize) -> TwoModeState {
        let c = self.cutoff;
        let mut out = self.clone();
        for _ in 0..k {
            let mut next = Self::zeros(c);
            next.norm_tail = out.norm_tail;
            let mut dropped = 0.0;
            for na in 0..=c {
                let src = out.row(na);
                match mode {
                    Mode::A => {
                        let f = ((na + 1) as f64).sqrt();
                        dropped += src[c - na].norm_sqr() * f * f;
                        if na < c {
                            let dst = next.row_mut(na + 1);
                            for (d, s) in dst.iter_mut().zip(src) {
                                *d = s * f;
                            }
                        }
                    }
                    Mode::B => {
                        dropped += src[c - na].norm_sqr() * (c - na + 1) as f64;
                        let src: Vec<Complex64> = src.to_vec();
                        let dst = next.row_mut(na);
                        for nb in 1..dst.len() {
                            dst[nb] = src[nb - 1] * (nb as f64).sqrt();
                        }
                    }
                }
            }
            let kept = next.norm_sqr();
            if kept + dropped > 0.0 {
                next.norm_tail += dropped / (kept + dropped);
            }
            out = next;
        }
        out
    }

    /// `a†^m` followed by renormalization; returns the state and the squared
    /// norm of `a†^m|ψ⟩` before renormalization.
    pub fn photon_add(&self, mode: Mode, m: usize) -> Result<(TwoModeState, f64), OracleError> {
        let mut out = self.raise(mode, m);
        let n = out.normalize();
        if n == 0.0 {
            return Err(OracleError::TruncationLoss {
                tail: 1.0,
                cutoff: self.cutoff,
            });
        }
        Ok((out, n))
    }

    /// `exp(iφ n_a)`.
    pub fn phase_shift(&self, phi: f64) -> TwoModeState {
        let mut out = self.clone();
        for na in 0..=self.cutoff {
            let f = Complex64::from_polar(1.0, phi * na as f64);
            for c in out.row_mut(na) {
                *c *= f;
            }
        }
        out
    }

    /// Multiplies each amplitude by `f(n_a)`.
    pub fn map_na(&self, f: impl Fn(usize) -> f64) -> TwoModeState {
        let mut out = self.clone();
        for na in 0..=self.cutoff {
            let k = f(na);
            for c in out.row_mut(na) {
                *c *= k;
            }
        }
        out
    }

    /// Probability of each total photon number `N = n_a + n_b`.
    pub fn total_number_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.cutoff + 1];
        for (na, nb, c) in self.iter() {
            p[na + nb] += c.norm_sqr();
        }
        p
    }

    /// Re-embeds the state with a different cutoff; amplitudes beyond the
    /// new triangle are dropped into `norm_tail`.
    pub fn with_cutoff(&self, cutoff: usize) -> TwoModeState {
        let mut out = Self::zeros(cutoff);
        out.norm_tail = self.norm_tail;
        let mut dropped = 0.0;
        for (na, nb, c) in self.iter() {
            if na + nb <= cutoff {
                out.set(na, nb, c);
            } else {
                dropped += c.norm_sqr();
            }
        }
        let total = self.norm_sqr();
        if total > 0.0 {
            out.norm_tail += dropped / total;
        }
        out
    }

    /// Smallest cutoff that holds every nonzero amplitude.
    pub fn support_cutoff(&self) -> usize {
        self.iter()
            .filter(|(_, _, c)| c.norm_sqr() > 0.0)
            .map(|(na, nb, _)| na + nb)
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn block(&self, n: usize) -> Vec<Complex64> {
        (0..=n).map(|k| self.get(k, n - k)).collect()
    }

    pub(crate) fn set_block(&mut self, n: usize, v: &[Complex64]) {
        for (k, c) in v.iter().enumerate() {
            self.set(k, n - k, *c);
        }
    }
}

#[inline]
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ladder_actions() {
        let s = TwoModeState::fock(6, 2, 1);
        let l = s.lower(Mode::A, 1);
        assert_eq!(l.cutoff(), 5);
        assert!((l.get(1, 1) - c(2f64.sqrt())).norm() < 1e-15);
        let l = s.lower(Mode::B, 1);
        assert!((l.get(2, 0) - c(1.0)).norm() < 1e-15);
        let r = s.raise(Mode::B, 2);
        assert!((r.get(2, 3) - c((2.0f64 * 3.0).sqrt())).norm() < 1e-15);
        assert_eq!(s.lower(Mode::B, 2).norm_sqr(), 0.0);
    }

    #[test]
    fn photon_addition_on_vacuum() {
        let v = TwoModeState::vacuum(5);
        let (one, n1) = v.photon_add(Mode::A, 1).unwrap();
        assert_eq!(one.get(1, 0), c(1.0));
        assert_eq!(n1, 1.0);
        let (_, n2) = v.photon_add(Mode::A, 2).unwrap();
        assert!((n2 - 2.0).abs() < 1e-15);
        let (same, n0) = v.photon_add(Mode::A, 0).unwrap();
        assert_eq!((same, n0), (v, 1.0));
    }

    #[test]
    fn raising_past_cutoff_is_recorded() {
        let s = TwoModeState::fock(3, 2, 1);
        let r = s.raise(Mode::A, 1);
        assert_eq!(r.norm_sqr(), 0.0);
        assert!((r.norm_tail - 1.0).abs() < 1e-15);
    }

    #[test]
    fn packing_round_trips() {
        let mut s = TwoModeState::zeros(7);
        for na in 0..=7 {
            for nb in 0..=7 - na {
                s.set(na, nb, Complex64::new(na as f64, nb as f64));
            }
        }
        assert!(s.iter().all(|(na, nb, v)| v == Complex64::new(na as f64, nb as f64)));
        assert_eq!(s.iter().count(), 36);
        let big = s.with_cutoff(10);
        assert_eq!(big.inner(&s), s.norm_sqr().into());
        assert_eq!(big.with_cutoff(7), s);
    }

    #[test]
    fn raising_b_matches_definition() {
        let s = TwoModeState::fock(5, 1, 2);
        let r = s.raise(Mode::B, 1);
        assert!((r.get(1, 3) - c(3f64.sqrt())).norm() < 1e-15);
        assert_eq!(r.norm_tail, 0.0);
    }

    #[test]
    fn phase_is_unitary() {
        let a = crate::coherent(Complex64::new(0.7, 0.2), 30).unwrap();
        let b = crate::squeezed_vacuum(0.4, 30).unwrap();
        let s = TwoModeState::product(&a, &b, 30);
        let p = s.phase_shift(1.234);
        assert!((p.norm_sqr() - s.norm_sqr()).abs() < 1e-14);
    }
}
