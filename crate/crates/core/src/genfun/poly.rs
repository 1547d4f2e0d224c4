//! Sparse polynomials in the six formal variables and the exponents
//! `W⁽¹⁾`, `W⁽²⁾`, `Q₁`, `Q₂` built from them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::dual::DualComplex;
use crate::params::{chi_omega, ExperimentParams, Scheme};

/// Number of formal variables.
pub const NVARS: usize = 6;

/// Exponent vector over `(x₁, x₂, y₁, y₂, s₁, s₂)`.
///
/// `x₁`/`x₂` generate `a†`/`a`, `y₁`/`y₂` generate `b†`/`b`, and `s₁`/`s₂`
/// generate the added photons on the bra and ket side.
pub type Exponent = [u8; NVARS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X1 = 0,
    X2 = 1,
    Y1 = 2,
    Y2 = 3,
    S1 = 4,
    S2 = 5,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::X1, Var::X2, Var::Y1, Var::Y2, Var::S1, Var::S2];

    pub fn name(self) -> &'static str {
        ["x1", "x2", "y1", "y2", "s1", "s2"][self as usize]
    }
}

/// Exponent of a single variable raised to `power`.
pub fn unit(var: Var, power: u8) -> Exponent {
    let mut e = [0; NVARS];
    e[var as usize] = power;
    e
}

pub fn degree(e: &Exponent) -> u32 {
    e.iter().map(|&k| u32::from(k)).sum()
}

/// Polynomial with [`DualComplex`] coefficients; exact zeros are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparsePoly {
    terms: BTreeMap<Exponent, DualComplex>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<DualComplex>) -> Self {
        Self::monomial([0; NVARS], c)
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(unit(v, 1), DualComplex::ONE)
    }

    pub fn monomial(exp: Exponent, c: impl Into<DualComplex>) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c.into());
        p
    }

    pub fn add_term(&mut self, exp: Exponent, c: DualComplex) {
        let slot = self.terms.entry(exp).or_insert(DualComplex::ZERO);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: &Exponent) -> DualComplex {
        self.terms.get(exp).copied().unwrap_or(DualComplex::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &DualComplex)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> DualComplex {
        self.coeff(&[0; NVARS])
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(degree).max().unwrap_or(0)
    }

    /// Drops coefficients whose value and derivative are both below `tol`.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.terms
            .retain(|_, c| c.val.norm() > tol || c.dphi.norm() > tol);
        self
    }

    /// Copy with a single coefficient replaced; used to probe the validation
    /// suite's sensitivity to transcription errors.
    pub fn with_coeff(mut self, exp: Exponent, c: DualComplex) -> Self {
        self.terms.remove(&exp);
        self.add_term(exp, c);
        self
    }

    pub fn square(&self) -> Self {
        self * self
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6})", c.val)?;
            for v in Var::ALL {
                match e[v as usize] {
                    0 => {}
                    1 => write!(f, "·{}", v.name())?,
                    k => write!(f, "·{}^{}", v.name(), k)?,
                }
            }
        }
        Ok(())
    }
}

impl Add for SparsePoly {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for SparsePoly {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for SparsePoly {
    type Output = Self;
    fn neg(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -*c;
        }
        self
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: Self) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for (k, b) in e.iter_mut().zip(eb) {
                    *k += b;
                }
                out.add_term(e, *ca * *cb);
            }
        }
        out
    }
}

impl Mul for SparsePoly {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Mul<DualComplex> for SparsePoly {
    type Output = Self;
    fn mul(mut self, k: DualComplex) -> Self {
        for c in self.terms.values_mut() {
            *c = *c * k;
        }
        self.terms.retain(|_, c| !c.is_zero());
        self
    }
}

impl Mul<Complex64> for SparsePoly {
    type Output = Self;
    fn mul(self, k: Complex64) -> Self {
        self * DualComplex::constant(k)
    }
}

impl Mul<f64> for SparsePoly {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self * DualComplex::real(k)
    }
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn x1() -> SparsePoly {
    SparsePoly::var(Var::X1)
}
fn x2() -> SparsePoly {
    SparsePoly::var(Var::X2)
}
fn y1() -> SparsePoly {
    SparsePoly::var(Var::Y1)
}
fn y2() -> SparsePoly {
    SparsePoly::var(Var::Y2)
}
fn s1() -> SparsePoly {
    SparsePoly::var(Var::S1)
}
fn s2() -> SparsePoly {
    SparsePoly::var(Var::S2)
}

/// Output-state exponent: `W⁽¹⁾` for scheme A, `W⁽²⁾` for scheme B. The
/// original scheme uses `W⁽¹⁾`; with `m = 0` its `s` terms never contribute.
///
/// For complex `α`, terms generated by creation operators (`x₁`, `y₁`, `s₂`)
/// carry `α*` and the others carry `α`; with `θ_α = 0` this is the usual
/// real-amplitude form.
pub fn build_w(params: &ExperimentParams) -> SparsePoly {
    let (chi, omega) = chi_omega(params);
    let chi_c = chi.conj();
    let omega_c = omega.conj();
    let alpha = params.alpha();
    let a = DualComplex::constant(alpha);
    let a_c = DualComplex::constant(alpha.conj());
    let i = DualComplex::constant(I);
    let r = params.r;
    let sh2 = r.sinh().powi(2);
    let s2r = (2.0 * r).sinh();
    let ch2 = r.cosh().powi(2);

    // Terms shared by both schemes: coherent drive of the output operators,
    // and the squeezed-vacuum quadratic forms.
    let drive = (x1() * chi + y1() * (i * omega)) * a_c + (x2() * chi_c - y2() * (i * omega_c)) * a;
    let thermal = (x1() * x2() * omega.norm_sqr()
        + y1() * y2() * chi.norm_sqr()
        + x2() * y1() * (i * chi * omega_c)
        - x1() * y2() * (i * chi_c * omega))
        * sh2;
    let anomalous = (y1().square() * (chi * chi) + y2().square() * (chi_c * chi_c)
        - x1().square() * (omega * omega)
        - x2().square() * (omega_c * omega_c)
        - x1() * y1() * (i * chi * omega).scale(2.0)
        + x2() * y2() * (i * chi_c * omega_c).scale(2.0))
        * (-0.25 * s2r);

    match params.scheme {
        Scheme::Original | Scheme::A => {
            drive
                + thermal
                + anomalous
                + (s2() * a_c + s1() * a)
                + s1() * s2()
                + (x1() * s1() * chi + x2() * s2() * chi_c + y1() * s1() * (i * omega)
                    - y2() * s2() * (i * omega_c))
        }
        Scheme::B => {
            let rt2 = std::f64::consts::SQRT_2;
            let cosh2 = DualComplex::real(ch2);
            drive
                + thermal
                + anomalous
                + (s2() * a_c + s1() * a) * (1.0 / rt2)
                + s1() * s2() * (1.0 + 0.5 * sh2)
                + (s1().square() + s2().square()) * (s2r / 8.0)
                + (x1() * s1() * (chi - omega * cosh2)
                    + x2() * s2() * (chi_c - omega_c * cosh2)
                    + y1() * s1() * (i * (omega - chi * cosh2))
                    - y2() * s2() * (i * (omega_c - chi_c * cosh2)))
                    * (1.0 / rt2)
                - (x1() * s2() * omega
                    + x2() * s1() * omega_c
                    + y1() * s2() * (i * chi)
                    - y2() * s1() * (i * chi_c))
                    * (s2r / (2.0 * rt2))
        }
    }
}

/// Exponent of the ideal state after the phase shift and before the second
/// splitter: `Q₁` (scheme A, also used for the original scheme) or `Q₂`
/// (scheme B). Independent of φ, T and η.
pub fn build_q(params: &ExperimentParams) -> SparsePoly {
    let alpha = params.alpha();
    let a = DualComplex::constant(alpha);
    let a_c = DualComplex::constant(alpha.conj());
    let i = DualComplex::constant(I);
    let r = params.r;
    let sh2 = r.sinh().powi(2);
    let cs = r.cosh() * r.sinh();
    let rt2 = std::f64::consts::SQRT_2;

    match params.scheme {
        Scheme::Original | Scheme::A => {
            let up = (x1() + y1() * i) * (1.0 / rt2);
            let down = (x2() - y2() * i) * (1.0 / rt2);
            let bu = y1() + x1() * i;
            let bd = y2() - x2() * i;
            (s2() + up.clone()) * a_c
                + (s1() + down.clone()) * a
                + &bu * &bd * (sh2 / 2.0)
                + s1() * s2()
                + up * s1()
                + down * s2()
                - (bu.square() + bd.square()) * (cs / 4.0)
        }
        Scheme::B => {
            let bu = y1() + (s2() + x1()) * i;
            let bd = y2() - (s1() + x2()) * i;
            (s2() + x1() + y1() * i) * (a_c * (1.0 / rt2))
                + (s1() + x2() - y2() * i) * (a * (1.0 / rt2))
                + &bu * &bd * (sh2 / 2.0)
                + s1() * x1()
                + x2() * s2()
                + s1() * s2()
                - (bu.square() + bd.square()) * (cs / 4.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn xs(e: &[(Var, u8)]) -> Exponent {
        let mut out = [0; NVARS];
        for &(v, k) in e {
            out[v as usize] += k;
        }
        out
    }

    fn alpha_and_r_free_terms(p: &SparsePoly) -> Vec<Exponent> {
        p.terms().map(|(e, _)| *e).collect()
    }

    #[test]
    fn vacuum_input_leaves_only_addition_terms_scheme_a() {
        let p = ExperimentParams::new(Scheme::A, 1, 0.0, 0.0).with_phi(0.7);
        let w = build_w(&p);
        let (chi, omega) = chi_omega(&p);
        assert_eq!(w.coeff(&xs(&[(Var::S1, 1), (Var::S2, 1)])), DualComplex::ONE);
        assert_eq!(w.coeff(&xs(&[(Var::X1, 1), (Var::S1, 1)])), chi);
        assert_eq!(w.coeff(&xs(&[(Var::Y2, 1), (Var::S2, 1)])), -(DualComplex::constant(I) * omega.conj()));
        // s1s2 plus the four single-photon routing terms
        assert_eq!(alpha_and_r_free_terms(&w).len(), 5);
        assert_eq!(w.constant_term(), DualComplex::ZERO);
    }

    #[test]
    fn vacuum_input_leaves_only_addition_terms_scheme_b() {
        let p = ExperimentParams::new(Scheme::B, 1, 0.0, 0.0).with_phi(0.7);
        let w = build_w(&p);
        assert_eq!(w.coeff(&xs(&[(Var::S1, 1), (Var::S2, 1)])), DualComplex::ONE);
        assert!(w.coeff(&xs(&[(Var::S1, 2)])).is_zero());
        assert!(w.coeff(&xs(&[(Var::X1, 1), (Var::S2, 1)])).is_zero());
        assert_eq!(alpha_and_r_free_terms(&w).len(), 5);
    }

    #[test]
    fn thermal_coefficient_of_x1x2() {
        let p = ExperimentParams::new(Scheme::A, 0, 1.0, 1.0).with_phi(FRAC_PI_2);
        let w = build_w(&p);
        let c = w.coeff(&xs(&[(Var::X1, 1), (Var::X2, 1)]));
        let expected = 0.5 * 1f64.sinh().powi(2);
        assert!((c.val.re - expected).abs() < 1e-14 && c.val.im.abs() < 1e-15);
    }

    #[test]
    fn exponents_are_quadratic_without_constant() {
        for scheme in Scheme::ALL {
            let p = ExperimentParams::new(scheme, if scheme == Scheme::Original { 0 } else { 2 }, 0.8, 0.6)
                .with_theta_alpha(0.4)
                .with_transmittance(0.7);
            for poly in [build_w(&p), build_q(&p)] {
                assert!(poly.total_degree() <= 2);
                assert!(poly.constant_term().is_zero());
            }
        }
    }

    #[test]
    fn q_has_no_phase_dependence() {
        let p = ExperimentParams::new(Scheme::B, 2, 1.0, 0.5).with_phi(1.1);
        let q = build_q(&p);
        assert!(q.terms().all(|(_, c)| c.dphi == Complex64::new(0.0, 0.0)));
        assert_eq!(q, build_q(&p.with_phi(2.3).with_transmittance(0.3)));
    }

    #[test]
    fn q_vacuum_input() {
        let p = ExperimentParams::new(Scheme::A, 1, 0.0, 0.0);
        let q = build_q(&p);
        assert_eq!(q.coeff(&xs(&[(Var::S1, 1), (Var::S2, 1)])), DualComplex::ONE);
        assert!(q.terms().all(|(e, _)| e[Var::S1 as usize] + e[Var::S2 as usize] >= 1));
    }

    #[test]
    fn q2_thermal_y1y2() {
        let p = ExperimentParams::new(Scheme::B, 1, 1.0, 0.5);
        let q = build_q(&p);
        let c = q.coeff(&xs(&[(Var::Y1, 1), (Var::Y2, 1)]));
        let expected = 0.5 * 0.5f64.sinh().powi(2);
        assert!((c.val - Complex64::new(expected, 0.0)).norm() < 1e-15);
        assert!((expected - 0.1357).abs() < 1e-4);
    }

    #[test]
    fn schemes_share_output_terms_without_addition_variables() {
        let p = ExperimentParams::new(Scheme::A, 0, 0.9, 0.7).with_phi(0.4).with_transmittance(0.8);
        let wa = build_w(&p);
        let wb = build_w(&ExperimentParams { scheme: Scheme::B, ..p });
        for (e, c) in wa.terms() {
            if e[4] == 0 && e[5] == 0 {
                assert_eq!(wb.coeff(e), *c);
            }
        }
    }
}
