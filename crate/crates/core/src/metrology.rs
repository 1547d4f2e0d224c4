//! Phase sensitivity, photon-number limits and quantum Fisher information.
//!
//! Every quantity is assembled from dual-valued moments, so the slope
//! `∂_φ⟨O⟩` comes out of the same evaluation as the variance.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual::DualComplex;
use crate::genfun::{GenfunError, MomentEngine, OperatorCap};
use crate::params::{ExperimentParams, ParamError};

/// Slopes below this magnitude make `σ/|∂_φ⟨O⟩|` meaningless.
pub const ZERO_SLOPE_TOL: f64 = 1e-12;

/// Grid size of [`optimize_phase`] before golden-section refinement.
pub const PHASE_GRID_POINTS: usize = 2001;

/// Default search interval for [`optimize_phase`].
pub const DEFAULT_PHASE_INTERVAL: (f64, f64) = (0.01, PI - 0.01);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetrologyError {
    #[error("slope {slope:e} at phi = {phi} is below the zero-slope threshold")]
    ZeroSlope { phi: f64, slope: f64 },
    #[error("Fisher information must be positive, got {0}")]
    NonPositiveFisher(f64),
    #[error("no phase in the search interval has a non-zero slope")]
    NoFinitePoint,
    #[error("invalid phase interval ({0}, {1})")]
    BadInterval(f64, f64),
    #[error(transparent)]
    Genfun(#[from] GenfunError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    /// `O₁ = N_a − N_b`.
    #[serde(rename = "idiff")]
    IntensityDiff,
    /// `O₂ = X_a = (a + a†)/√2`.
    Homodyne,
}

impl Detector {
    pub const ALL: [Detector; 2] = [Detector::IntensityDiff, Detector::Homodyne];

    pub fn as_str(self) -> &'static str {
        match self {
            Detector::IntensityDiff => "idiff",
            Detector::Homodyne => "homodyne",
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Detector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "idiff" | "intensity" | "intensity-diff" => Ok(Detector::IntensityDiff),
            "homodyne" | "hd" => Ok(Detector::Homodyne),
            other => Err(format!("unknown detector '{other}' (expected idiff or homodyne)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub detector: Detector,
    pub phi: f64,
    /// `Δφ = σ / slope`.
    pub delta_phi: f64,
    /// `√⟨ΔO²⟩`.
    pub sigma: f64,
    /// `|∂_φ⟨O⟩|`.
    pub slope: f64,
    /// `⟨N_a⟩ + ⟨N_b⟩` at the output (equal to the internal total when `T = 1`).
    pub n_total: f64,
    /// `1/√N`.
    pub sql: f64,
    /// `1/N`.
    pub hl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiReport {
    pub f_ideal: f64,
    pub f_lossy: f64,
    /// `⟨n_a⟩` inside the interferometer.
    pub n_a_internal: f64,
    /// `1/√(v F)`; infinite when `F = 0`.
    pub qcrb_ideal: f64,
    pub qcrb_lossy: f64,
}

fn real(d: DualComplex) -> (f64, f64) {
    (d.val.re, d.dphi.re)
}

fn finish(
    detector: Detector,
    phi: f64,
    variance: f64,
    slope: f64,
    n_total: f64,
) -> Result<SensitivityReport, MetrologyError> {
    let slope = slope.abs();
    if !(slope >= ZERO_SLOPE_TOL) {
        return Err(MetrologyError::ZeroSlope { phi, slope });
    }
    let sigma = variance.max(0.0).sqrt();
    Ok(SensitivityReport {
        detector,
        phi,
        delta_phi: sigma / slope,
        sigma,
        slope,
        n_total,
        sql: n_total.sqrt().recip(),
        hl: n_total.recip(),
    })
}

/// `Δφ₁` for `N_a − N_b`, with `Var = ⟨ΔN_a²⟩ + ⟨ΔN_b²⟩ − 2 Cov(N_a, N_b)`.
pub fn intensity_diff_sensitivity(params: &ExperimentParams) -> Result<SensitivityReport, MetrologyError> {
    let e = MomentEngine::output(params, OperatorCap::uniform(2))?;
    let (na, dna) = real(e.moment(1, 1, 0, 0)?);
    let (nb, dnb) = real(e.moment(0, 0, 1, 1)?);
    let na2 = e.moment(2, 2, 0, 0)?.val.re + na;
    let nb2 = e.moment(0, 0, 2, 2)?.val.re + nb;
    let nanb = e.moment(1, 1, 1, 1)?.val.re;
    let var = (na2 - na * na) + (nb2 - nb * nb) - 2.0 * (nanb - na * nb);
    finish(Detector::IntensityDiff, params.phi, var, dna - dnb, na + nb)
}

/// `Δφ₂` for the mode-`a` quadrature,
/// `⟨ΔX²⟩ = ½[⟨a†²⟩ + ⟨a²⟩ + 2⟨a†a⟩ + 1] − ⟨X⟩²`.
pub fn homodyne_sensitivity(params: &ExperimentParams) -> Result<SensitivityReport, MetrologyError> {
    let e = MomentEngine::output(params, OperatorCap::new(2, 2, 1, 1))?;
    let a = e.moment(0, 1, 0, 0)?;
    let ad = e.moment(1, 0, 0, 0)?;
    let x = (a + ad).scale(1.0 / SQRT_2);
    let x2 = (e.moment(2, 0, 0, 0)?.val + e.moment(0, 2, 0, 0)?.val).re
        + 2.0 * e.moment(1, 1, 0, 0)?.val.re
        + 1.0;
    let var = 0.5 * x2 - x.val.re * x.val.re;
    let n_total = e.moment(1, 1, 0, 0)?.val.re + e.moment(0, 0, 1, 1)?.val.re;
    finish(Detector::Homodyne, params.phi, var, x.dphi.re, n_total)
}

pub fn sensitivity(detector: Detector, params: &ExperimentParams) -> Result<SensitivityReport, MetrologyError> {
    match detector {
        Detector::IntensityDiff => intensity_diff_sensitivity(params),
        Detector::Homodyne => homodyne_sensitivity(params),
    }
}

/// `⟨N_a⟩ + ⟨N_b⟩` after the second splitter (arm loss included).
pub fn total_photon_number(params: &ExperimentParams) -> Result<f64, MetrologyError> {
    let e = MomentEngine::output(params, OperatorCap::uniform(1))?;
    Ok(e.moment(1, 1, 0, 0)?.val.re + e.moment(0, 0, 1, 1)?.val.re)
}

/// `(⟨n_a⟩, F = 4⟨Δ²n_a⟩)` of the lossless state inside the interferometer.
fn internal_number_stats(params: &ExperimentParams) -> Result<(f64, f64), MetrologyError> {
    let e = MomentEngine::internal(params, OperatorCap::new(2, 2, 0, 0))?;
    let n = e.moment(1, 1, 0, 0)?.val.re;
    let n2 = e.moment(2, 2, 0, 0)?.val.re + n;
    Ok((n, (4.0 * (n2 - n * n)).max(0.0)))
}

/// `F = 4[⟨n_a²⟩ − ⟨n_a⟩²]` before the second splitter; independent of φ, T, η.
pub fn qfi_ideal(params: &ExperimentParams) -> Result<f64, MetrologyError> {
    Ok(internal_number_stats(params)?.1)
}

/// `F_L = 4ηF⟨n_a⟩ / [(1−η)F + 4η⟨n_a⟩]`, with mode-`a` transmittance `η`.
pub fn qfi_lossy(params: &ExperimentParams) -> Result<f64, MetrologyError> {
    let (n, f) = internal_number_stats(params)?;
    Ok(lossy_from_ideal(f, n, params.eta))
}

/// The closed form on its own; 0 when either `η`, `F` or `⟨n_a⟩` vanishes.
pub fn lossy_from_ideal(f: f64, n_a: f64, eta: f64) -> f64 {
    let den = (1.0 - eta) * f + 4.0 * eta * n_a;
    if eta == 0.0 || f == 0.0 || den <= 0.0 {
        return 0.0;
    }
    4.0 * eta * f * n_a / den
}

/// `Δφ_QCRB = 1/√(v F)`.
pub fn qcrb(f: f64, v: u32) -> Result<f64, MetrologyError> {
    if !(f > 0.0) || v == 0 {
        return Err(MetrologyError::NonPositiveFisher(f * f64::from(v)));
    }
    Ok((f64::from(v) * f).sqrt().recip())
}

pub fn qfi_report(params: &ExperimentParams, v: u32) -> Result<QfiReport, MetrologyError> {
    let (n, f) = internal_number_stats(params)?;
    let fl = lossy_from_ideal(f, n, params.eta);
    let bound = |f: f64| qcrb(f, v).unwrap_or(f64::INFINITY);
    Ok(QfiReport {
        f_ideal: f,
        f_lossy: fl,
        n_a_internal: n,
        qcrb_ideal: bound(f),
        qcrb_lossy: bound(fl),
    })
}

/// Minimizes `Δφ` over `interval ⊂ (0, π)`: a uniform grid locates the
/// global basin (the landscape has several local minima near divergences),
/// golden-section search polishes it. Points with a vanishing slope are
/// skipped; ties go to the smallest φ.
pub fn optimize_phase(
    detector: Detector,
    params: &ExperimentParams,
    interval: (f64, f64),
) -> Result<SensitivityReport, MetrologyError> {
    let params = params.validate()?;
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi && hi < PI) {
        return Err(MetrologyError::BadInterval(lo, hi));
    }
    let eval = |phi: f64| -> Result<Option<SensitivityReport>, MetrologyError> {
        match sensitivity(detector, &params.with_phi(phi)) {
            Ok(r) => Ok(Some(r)),
            Err(MetrologyError::ZeroSlope { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let n = PHASE_GRID_POINTS;
    let step = (hi - lo) / (n - 1) as f64;
    let grid = |i: usize| if i + 1 == n { hi } else { lo + step * i as f64 };
    let mut best: Option<(usize, SensitivityReport)> = None;
    for i in 0..n {
        if let Some(r) = eval(grid(i))? {
            if best.is_none_or(|(_, b)| r.delta_phi < b.delta_phi) {
                best = Some((i, r));
            }
        }
    }
    let (i, mut best) = best.ok_or(MetrologyError::NoFinitePoint)?;

    let cost = |phi: f64| -> Result<f64, MetrologyError> {
        Ok(eval(phi)?.map_or(f64::INFINITY, |r| r.delta_phi))
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid(i.saturating_sub(1)), grid((i + 1).min(n - 1)));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (cost(c)?, cost(d)?);
    while b - a > 1e-10 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = cost(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = cost(d)?;
        }
    }
    if let Some(r) = eval(0.5 * (a + b))? {
        if r.delta_phi < best.delta_phi {
            best = r;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Scheme;
    use std::f64::consts::FRAC_PI_2;

    fn coherent(alpha: f64, phi: f64) -> ExperimentParams {
        ExperimentParams::new(Scheme::Original, 0, alpha, 0.0).with_phi(phi)
    }

    #[test]
    fn coherent_closed_forms() {
        for phi in [0.3, 1.0, FRAC_PI_2, 2.5] {
            for alpha in [0.5, 1.0, 2.0] {
                let expected = 1.0 / (alpha * phi.sin());
                let p = coherent(alpha, phi);
                let d1 = intensity_diff_sensitivity(&p).unwrap();
                let d2 = homodyne_sensitivity(&p).unwrap();
                assert!((d1.delta_phi - expected).abs() < 1e-10 * expected);
                assert!((d2.delta_phi - expected).abs() < 1e-10 * expected);
                assert!((d1.n_total - alpha * alpha).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_slope_cases() {
        let p = ExperimentParams::new(Scheme::Original, 0, 0.0, 1.0);
        assert!(matches!(homodyne_sensitivity(&p), Err(MetrologyError::ZeroSlope { .. })));
        let p = ExperimentParams::new(Scheme::Original, 0, 1.0, 1.0).with_phi(0.0);
        assert!(matches!(
            intensity_diff_sensitivity(&p),
            Err(MetrologyError::ZeroSlope { .. })
        ));
    }

    #[test]
    fn photon_numbers() {
        let p = ExperimentParams::new(Scheme::Original, 0, 0.0, 1.0);
        assert!((total_photon_number(&p).unwrap() - 1f64.sinh().powi(2)).abs() < 1e-12);
        let p = ExperimentParams::new(Scheme::A, 1, 0.0, 0.0).with_transmittance(0.5);
        assert!((total_photon_number(&p).unwrap() - 0.5).abs() < 1e-12);
        let p = ExperimentParams::new(Scheme::Original, 0, 1.0, 0.0);
        assert!((total_photon_number(&p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qfi_anchors() {
        assert_eq!(qfi_ideal(&ExperimentParams::new(Scheme::Original, 0, 0.0, 0.0)).unwrap(), 0.0);
        let p = ExperimentParams::new(Scheme::Original, 0, 1.0, 0.0);
        assert!((qfi_ideal(&p).unwrap() - 2.0).abs() < 1e-12);
        let lossy = qfi_lossy(&p.with_eta(0.5)).unwrap();
        assert!((lossy - 1.0).abs() < 1e-12);
        assert_eq!(qfi_lossy(&p.with_eta(0.0)).unwrap(), 0.0);
        assert!((qfi_lossy(&p.with_eta(1.0)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn qcrb_values() {
        assert_eq!(qcrb(1.0, 1).unwrap(), 1.0);
        assert_eq!(qcrb(4.0, 1).unwrap(), 0.5);
        assert!((qcrb(2.0, 1).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(qcrb(0.0, 1), Err(MetrologyError::NonPositiveFisher(_))));
        assert!(matches!(qcrb(-1.0, 1), Err(MetrologyError::NonPositiveFisher(_))));
    }

    #[test]
    fn optimizer_finds_quadrature_point() {
        let r = optimize_phase(Detector::IntensityDiff, &coherent(1.0, 0.1), DEFAULT_PHASE_INTERVAL).unwrap();
        assert!((r.phi - FRAC_PI_2).abs() < 1e-5, "{}", r.phi);
        assert!((r.delta_phi - 1.0).abs() < 1e-10);
        let r = optimize_phase(Detector::Homodyne, &coherent(2.0, 0.1), DEFAULT_PHASE_INTERVAL).unwrap();
        assert!((r.phi - FRAC_PI_2).abs() < 1e-5);
        assert!((r.delta_phi - 0.5).abs() < 1e-10);
    }

    #[test]
    fn optimizer_without_signal() {
        let p = ExperimentParams::new(Scheme::Original, 0, 0.0, 0.5);
        assert!(matches!(
            optimize_phase(Detector::Homodyne, &p, DEFAULT_PHASE_INTERVAL),
            Err(MetrologyError::NoFinitePoint)
        ));
        assert!(matches!(
            optimize_phase(Detector::Homodyne, &p, (2.0, 1.0)),
            Err(MetrologyError::BadInterval(..))
        ));
    }

    #[test]
    fn detector_names_round_trip() {
        for d in Detector::ALL {
            assert_eq!(d.as_str().parse::<Detector>().unwrap(), d);
        }
        assert!("parity".parse::<Detector>().is_err());
    }
}
