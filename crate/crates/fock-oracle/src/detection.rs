//! Detector statistics read straight off the Fock amplitudes, without any
//! normally ordered moment algebra, and error-propagation sensitivities with
//! finite-difference slopes.

use mzi_core::{Detector, ExperimentParams};

use crate::density::TwoModeDensity;
use crate::pipeline::{run_pipeline, StopAt};
use crate::OracleError;

/// Step of the central difference used for `∂⟨O⟩/∂φ`.
pub const SLOPE_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorStats {
    /// `⟨N_a − N_b⟩`.
    pub diff_mean: f64,
    pub diff_var: f64,
    /// `⟨X_a⟩`, `X_a = (a + a†)/√2`.
    pub x_mean: f64,
    pub x_var: f64,
}

impl DetectorStats {
    pub fn mean(&self, detector: Detector) -> f64 {
        match detector {
            Detector::IntensityDiff => self.diff_mean,
            Detector::Homodyne => self.x_mean,
        }
    }

    pub fn variance(&self, detector: Detector) -> f64 {
        match detector {
            Detector::IntensityDiff => self.diff_var,
            Detector::Homodyne => self.x_var,
        }
    }
}

/// `N_a − N_b` is diagonal in the Fock basis; `X_a` needs `⟨a⟩`, `⟨a²⟩` and
/// `⟨a†a⟩`, each a plain sum over neighbouring amplitudes.
pub fn detector_stats(rho: &TwoModeDensity) -> DetectorStats {
    let (mut d1, mut d2) = (0.0, 0.0);
    let (mut a1, mut a2, mut n) = (
        num_complex::Complex64::new(0.0, 0.0),
        num_complex::Complex64::new(0.0, 0.0),
        0.0,
    );
    for psi in rho.branches() {
        for (na, nb, c) in psi.iter() {
            let p = c.norm_sqr();
            let k = na as f64 - nb as f64;
            d1 += p * k;
            d2 += p * k * k;
            n += p * na as f64;
            let cc = c.conj();
            a1 += cc * psi.get(na + 1, nb) * ((na + 1) as f64).sqrt();
            a2 += cc * psi.get(na + 2, nb) * (((na + 1) * (na + 2)) as f64).sqrt();
        }
    }
    let tr = rho.trace();
    let (d1, d2, n, a1, a2) = (d1 / tr, d2 / tr, n / tr, a1 / tr, a2 / tr);
    let x = std::f64::consts::SQRT_2 * a1.re;
    DetectorStats {
        diff_mean: d1,
        diff_var: d2 - d1 * d1,
        x_mean: x,
        // ⟨X²⟩ = ½⟨a² + a†² + 2a†a + 1⟩
        x_var: a2.re + n + 0.5 - x * x,
    }
}

/// `Δφ = σ(O)/|∂⟨O⟩/∂φ|` at `params.phi`, with the slope from a central
/// difference of step [`SLOPE_STEP`].
pub fn sensitivity_oracle(params: &ExperimentParams, detector: Detector) -> Result<f64, OracleError> {
    let prepared = run_pipeline(params, StopAt::BeforePhase)?;
    let stats = |phi: f64| detector_stats(&prepared.complete(phi).into_density());
    let centre = stats(params.phi);
    let slope = (stats(params.phi + SLOPE_STEP).mean(detector) - stats(params.phi - SLOPE_STEP).mean(detector))
        / (2.0 * SLOPE_STEP);
    Ok(centre.variance(detector).max(0.0).sqrt() / slope.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::TwoModeState;
    use mzi_core::Scheme;

    #[test]
    fn fock_state_statistics() {
        let rho: TwoModeDensity = TwoModeState::fock(6, 2, 1).into();
        let s = detector_stats(&rho);
        assert_eq!((s.diff_mean, s.diff_var), (1.0, 0.0));
        // Fock states have ⟨X⟩ = 0 and ⟨X²⟩ = n + ½
        assert_eq!(s.x_mean, 0.0);
        assert!((s.x_var - 2.5).abs() < 1e-15);
    }

    #[test]
    fn coherent_light_gives_the_shot_noise_limit() {
        for (alpha, phi) in [(1.0, 1.2), (2.0, 0.4)] {
            let p = ExperimentParams::new(Scheme::Original, 0, alpha, 0.0).with_phi(phi);
            let expected = 1.0 / (alpha * f64::sin(phi));
            for d in Detector::ALL {
                let got = sensitivity_oracle(&p, d).unwrap();
                assert!((got - expected).abs() / expected < 1e-8, "{d}: {got} vs {expected}");
            }
        }
    }
}
