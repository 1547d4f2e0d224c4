use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dual::DualComplex;
use crate::params::ExperimentParams;

use super::poly::{build_q, build_w, Exponent, SparsePoly};
use super::series::{exp_series, TruncatedSeries, FACTORIALS};
use super::GenfunError;

/// Largest `p₁+p₂+q₁+q₂` accepted by [`moment`] and [`internal_moment`].
pub const MAX_MOMENT_ORDER: u32 = 8;

/// Indices of `D_{m,p₁,p₂,q₁,q₂}`: the moment `⟨a†^{p₁} b†^{q₁} b^{q₂} a^{p₂}⟩`
/// of a state with `m` added photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct MomentSpec {
    pub p1: u32,
    pub p2: u32,
    pub q1: u32,
    pub q2: u32,
    pub m: u32,
}

impl MomentSpec {
    pub const fn new(p1: u32, p2: u32, q1: u32, q2: u32) -> Self {
        Self { p1, p2, q1, q2, m: 0 }
    }

    pub const fn with_m(mut self, m: u32) -> Self {
        self.m = m;
        self
    }

    pub fn order(&self) -> u32 {
        self.p1 + self.p2 + self.q1 + self.q2
    }

    /// Exponent of `x₁^{p₁} x₂^{p₂} y₁^{q₁} y₂^{q₂} s₁^m s₂^m`, saturating at
    /// `u8::MAX` (which no cap covers).
    pub fn exponent(&self) -> Exponent {
        [self.p1, self.p2, self.q1, self.q2, self.m, self.m]
            .map(|k| u8::try_from(k).unwrap_or(u8::MAX))
    }

    /// Hermitian-conjugate moment, `(p₂, p₁, q₂, q₁)`.
    pub fn adjoint(&self) -> Self {
        Self {
            p1: self.p2,
            p2: self.p1,
            q1: self.q2,
            q2: self.q1,
            m: self.m,
        }
    }

    /// All specs with `p₁+p₂+q₁+q₂ <= order`, in lexicographic order.
    pub fn all_up_to(order: u32, m: u32) -> Vec<MomentSpec> {
        let mut out = Vec::new();
        for p1 in 0..=order {
            for p2 in 0..=order - p1 {
                for q1 in 0..=order - p1 - p2 {
                    for q2 in 0..=order - p1 - p2 - q1 {
                        out.push(MomentSpec::new(p1, p2, q1, q2).with_m(m));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for MomentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(p1={}, p2={}, q1={}, q2={}; m={})",
            self.p1, self.p2, self.q1, self.q2, self.m
        )
    }
}

/// `p₁!·p₂!·q₁!·q₂!·(m!)²` times the Taylor coefficient: the mixed partial
/// derivative of the series at the origin.
pub fn extract_d(series: &TruncatedSeries, spec: &MomentSpec) -> Result<DualComplex, GenfunError> {
    let e = spec.exponent();
    let c = series.coeff(&e).ok_or(GenfunError::SpecExceedsCap {
        spec: *spec,
        cap: series.cap(),
    })?;
    let weight: f64 = e.iter().map(|&k| FACTORIALS[usize::from(k)] as f64).product();
    Ok(c.scale(weight))
}

/// Per-operator truncation of a [`MomentEngine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OperatorCap {
    pub p1: u8,
    pub p2: u8,
    pub q1: u8,
    pub q2: u8,
}

impl OperatorCap {
    pub const fn uniform(k: u8) -> Self {
        Self {
            p1: k,
            p2: k,
            q1: k,
            q2: k,
        }
    }

    pub const fn new(p1: u8, p2: u8, q1: u8, q2: u8) -> Self {
        Self { p1, p2, q1, q2 }
    }

    pub fn for_spec(spec: &MomentSpec) -> Self {
        let e = spec.exponent();
        Self::new(e[0], e[1], e[2], e[3])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// After the second splitter (exponent `W`).
    Output,
    /// Inside the interferometer, before the second splitter (exponent `Q`).
    Internal,
}

/// One exponentiated series per (configuration, cap), answering many moments.
#[derive(Debug, Clone)]
pub struct MomentEngine {
    kind: StateKind,
    m: u32,
    series: TruncatedSeries,
    norm: DualComplex,
}

impl MomentEngine {
    pub fn output(params: &ExperimentParams, cap: OperatorCap) -> Result<Self, GenfunError> {
        let params = params.validate()?;
        Self::from_poly(&build_w(&params), params.added_photons(), cap, StateKind::Output)
    }

    pub fn internal(params: &ExperimentParams, cap: OperatorCap) -> Result<Self, GenfunError> {
        let params = params.validate()?;
        Self::from_poly(&build_q(&params), params.added_photons(), cap, StateKind::Internal)
    }

    /// Engine over an arbitrary exponent with `m` added photons.
    pub fn from_poly(
        poly: &SparsePoly,
        m: u32,
        cap: OperatorCap,
        kind: StateKind,
    ) -> Result<Self, GenfunError> {
        let mm = u8::try_from(m).map_err(|_| GenfunError::CapTooLarge {
            reason: format!("m = {m}"),
        })?;
        let series = exp_series(poly, [cap.p1, cap.p2, cap.q1, cap.q2, mm, mm])?;
        let norm = extract_d(&series, &MomentSpec::default().with_m(m))?;
        if norm.val.norm() == 0.0 {
            return Err(GenfunError::ZeroNorm);
        }
        Ok(Self {
            kind,
            m,
            series,
            norm,
        })
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn added_photons(&self) -> u32 {
        self.m
    }

    /// `D_{m,0,0,0,0} e^{W}` (up to the cancelled global prefactor).
    pub fn normalization(&self) -> DualComplex {
        self.norm
    }

    /// Normalized `⟨a†^{p₁} b†^{q₁} b^{q₂} a^{p₂}⟩` with its φ-derivative.
    pub fn moment(&self, p1: u32, p2: u32, q1: u32, q2: u32) -> Result<DualComplex, GenfunError> {
        self.moment_spec(&MomentSpec::new(p1, p2, q1, q2).with_m(self.m))
    }

    pub fn moment_spec(&self, spec: &MomentSpec) -> Result<DualComplex, GenfunError> {
        if spec.m != self.m {
            return Err(GenfunError::PhotonNumberMismatch {
                spec_m: spec.m,
                state_m: self.m,
            });
        }
        Ok(extract_d(&self.series, spec)? / self.norm)
    }
}

fn check_spec(params: &ExperimentParams, spec: &MomentSpec) -> Result<(), GenfunError> {
    params.validate()?;
    if spec.order() > MAX_MOMENT_ORDER {
        return Err(GenfunError::OrderTooLarge {
            order: spec.order(),
            limit: MAX_MOMENT_ORDER,
        });
    }
    if spec.m != params.added_photons() {
        return Err(GenfunError::PhotonNumberMismatch {
            spec_m: spec.m,
            state_m: params.added_photons(),
        });
    }
    Ok(())
}

/// Normalized output moment `A²·D_{m,p₁,p₂,q₁,q₂} e^{W}`.
pub fn moment(params: &ExperimentParams, spec: &MomentSpec) -> Result<DualComplex, GenfunError> {
    check_spec(params, spec)?;
    MomentEngine::output(params, OperatorCap::for_spec(spec))?.moment_spec(spec)
}

/// Normalized moment of the ideal state inside the interferometer,
/// `A²·D_{m,p₁,p₂,q₁,q₂} e^{Q}`. The exponent carries no phase, so the dual
/// part is zero; photon-number moments (`p₁ = p₂`, `q₁ = q₂`) coincide with
/// those after the phase shift.
pub fn internal_moment(
    params: &ExperimentParams,
    spec: &MomentSpec,
) -> Result<DualComplex, GenfunError> {
    check_spec(params, spec)?;
    MomentEngine::internal(params, OperatorCap::for_spec(spec))?.moment_spec(spec)
}
