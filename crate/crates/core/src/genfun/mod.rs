//! Generating-function moment engine.
//!
//! Every normally ordered moment `⟨a†^{p₁} b†^{q₁} b^{q₂} a^{p₂}⟩` of the
//! interferometer state is a Taylor coefficient of `exp(W)`, where `W` is a
//! quadratic polynomial in six formal variables whose coefficients depend on
//! the configuration. The engine builds `W` (or `Q` for the state inside the
//! interferometer), exponentiates it as a truncated series, and reads moments
//! off as scaled coefficients. Global prefactors such as `e^{-|α|²}` cancel
//! against the normalization and are never formed.

mod moments;
mod poly;
mod series;

use thiserror::Error;

use crate::params::ParamError;

pub use moments::{
    extract_d, internal_moment, moment, MomentEngine, MomentSpec, OperatorCap, StateKind,
    MAX_MOMENT_ORDER,
};
pub use poly::{build_q, build_w, degree, unit, Exponent, SparsePoly, Var, NVARS};
pub use series::{
    exp_series, exp_series_with_budget, TruncatedSeries, DEFAULT_WORK_BUDGET, FACTORIALS,
    MAX_VAR_CAP,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenfunError {
    #[error("series cap too large: {reason}")]
    CapTooLarge { reason: String },
    #[error("moment {spec} lies outside the series cap {cap:?}")]
    SpecExceedsCap { spec: MomentSpec, cap: Exponent },
    #[error("exponent polynomial has a non-zero constant term")]
    NonZeroConstant,
    #[error("moment order {order} exceeds the limit {limit}")]
    OrderTooLarge { order: u32, limit: u32 },
    #[error("moment requests m = {spec_m} but the state has m = {state_m} added photons")]
    PhotonNumberMismatch { spec_m: u32, state_m: u32 },
    #[error("normalization D_m,0,0,0,0 vanished")]
    ZeroNorm,
    #[error(transparent)]
    Param(#[from] ParamError),
}
