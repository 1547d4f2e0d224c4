//! Physical configuration of one interferometer evaluation.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual::DualComplex;

/// Largest photon-addition order accepted by [`ExperimentParams::validate`].
pub const DEFAULT_MAX_ADDED: u32 = 5;

/// Where the `m` photons are added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Plain interferometer, no photon addition.
    Original,
    /// Photon addition on the coherent input port, before the first splitter.
    A,
    /// Photon addition on arm `a`, between the first splitter and the losses.
    B,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Original, Scheme::A, Scheme::B];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Original => "original",
            Scheme::A => "a",
            Scheme::B => "b",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "original" | "o" | "0" => Ok(Scheme::Original),
            "a" => Ok(Scheme::A),
            "b" => Ok(Scheme::B),
            other => Err(ParamError::UnknownScheme(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter `{field}` = {value} is out of range ({bound})")]
    OutOfRange {
        field: &'static str,
        value: f64,
        bound: &'static str,
    },
    #[error("scheme `original` requires m = 0, got m = {m}")]
    SchemeMismatch { m: u32 },
    #[error("unknown scheme `{0}` (expected original, a or b)")]
    UnknownScheme(String),
}

/// All knobs of a single configuration.
///
/// `transmittance` is the internal loss of both arms used by the detection
/// model; `eta` is the mode-`a` loss used only by the lossy Fisher
/// information. The two loss models are independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub alpha_mag: f64,
    pub theta_alpha: f64,
    pub r: f64,
    pub phi: f64,
    pub transmittance: f64,
    pub eta: f64,
    pub m: u32,
    pub scheme: Scheme,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            alpha_mag: 1.0,
            theta_alpha: 0.0,
            r: 1.0,
            phi: FRAC_PI_2,
            transmittance: 1.0,
            eta: 1.0,
            m: 0,
            scheme: Scheme::Original,
        }
    }
}

impl ExperimentParams {
    pub fn new(scheme: Scheme, m: u32, alpha_mag: f64, r: f64) -> Self {
        Self {
            alpha_mag,
            r,
            m,
            scheme,
            ..Self::default()
        }
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_transmittance(mut self, t: f64) -> Self {
        self.transmittance = t;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_theta_alpha(mut self, theta: f64) -> Self {
        self.theta_alpha = theta;
        self
    }

    /// Complex coherent amplitude `|α| e^{iθ_α}`.
    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.alpha_mag, self.theta_alpha)
    }

    /// Number of photons actually added (always 0 for the original scheme).
    pub fn added_photons(&self) -> u32 {
        match self.scheme {
            Scheme::Original => 0,
            _ => self.m,
        }
    }

    pub fn validate(self) -> Result<Self, ParamError> {
        self.validate_with_cap(DEFAULT_MAX_ADDED)
    }

    pub fn validate_with_cap(self, max_added: u32) -> Result<Self, ParamError> {
        non_negative("alpha", self.alpha_mag)?;
        non_negative("r", self.r)?;
        finite("theta_alpha", self.theta_alpha)?;
        finite("phi", self.phi)?;
        unit_interval("T", self.transmittance)?;
        unit_interval("eta", self.eta)?;
        if self.scheme == Scheme::Original && self.m > 0 {
            return Err(ParamError::SchemeMismatch { m: self.m });
        }
        if self.m > max_added {
            return Err(ParamError::OutOfRange {
                field: "m",
                value: f64::from(self.m),
                bound: "m <= photon-addition cap",
            });
        }
        Ok(self)
    }
}

/// Arm couplings `χ = (√T/2)(e^{-iφ}+1)` and `ω = (√T/2)(1-e^{-iφ})`,
/// with their exact φ-derivatives in the dual parts.
pub fn chi_omega(params: &ExperimentParams) -> (DualComplex, DualComplex) {
    let half_amp = 0.5 * params.transmittance.sqrt();
    let e = Complex64::from_polar(1.0, -params.phi);
    let de = Complex64::new(0.0, -1.0) * e;
    let chi = DualComplex::new((e + 1.0) * half_amp, de * half_amp);
    let omega = DualComplex::new((1.0 - e) * half_amp, -de * half_amp);
    (chi, omega)
}

fn finite(field: &'static str, value: f64) -> Result<(), ParamError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ParamError::OutOfRange {
            field,
            value,
            bound: "finite",
        })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<(), ParamError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ParamError::OutOfRange {
            field,
            value,
            bound: "finite and >= 0",
        })
    }
}

fn unit_interval(field: &'static str, value: f64) -> Result<(), ParamError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ParamError::OutOfRange {
            field,
            value,
            bound: "in [0, 1]",
        })
    }
}
