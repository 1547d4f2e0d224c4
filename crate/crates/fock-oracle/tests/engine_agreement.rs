//! The generating-function engine against brute force on small random
//! configurations. The exhaustive grids live in `mzi validate`; these keep a
//! cheap slice of the same comparison in the ordinary test run.

use std::f64::consts::PI;

use mzi_core::genfun::{MomentEngine, MomentSpec, OperatorCap};
use mzi_core::metrology::{qfi_ideal, qfi_lossy, sensitivity};
use mzi_core::{Detector, ExperimentParams, MetrologyError, Scheme};
use mzi_fock::{
    moment_table, qfi_mixed_oracle, qfi_pure_oracle, run_pipeline, sensitivity_oracle, LossOrdering, StopAt,
};
use proptest::prelude::*;

const ORDER: u32 = 3;

prop_compose! {
    fn small_params()(
        scheme in prop_oneof![Just(Scheme::Original), Just(Scheme::A), Just(Scheme::B)],
        m in 0u32..=2,
        alpha in 0.0f64..1.0,
        theta in -PI..PI,
        r in 0.0f64..0.5,
        phi in 0.1f64..3.0,
        t in 0.3f64..=1.0,
    ) -> ExperimentParams {
        let m = if scheme == Scheme::Original { 0 } else { m };
        ExperimentParams::new(scheme, m, alpha, r)
            .with_theta_alpha(theta)
            .with_phi(phi)
            .with_transmittance(t)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn output_moments_agree(p in small_params()) {
        let rho = run_pipeline(&p, StopAt::Output).unwrap().into_density();
        let specs = MomentSpec::all_up_to(ORDER, p.added_photons());
        let oracle = moment_table(&rho, &specs).unwrap();
        let engine = MomentEngine::output(&p, OperatorCap::uniform(ORDER as u8)).unwrap();
        for (spec, o) in specs.iter().zip(&oracle) {
            let g = engine.moment_spec(spec).unwrap().val;
            prop_assert!((g - o).norm() <= 1e-8 * o.norm().max(1e-3), "{spec}: engine {g}, oracle {o}");
        }
    }

    #[test]
    fn fisher_information_agrees(p in small_params(), eta in 0.1f64..=1.0) {
        let f = qfi_ideal(&p).unwrap();
        let pure = qfi_pure_oracle(&p).unwrap();
        prop_assert!((f - pure).abs() <= 1e-8 * f.max(1.0), "{f} vs {pure}");

        let p = p.with_eta(eta);
        let closed = qfi_lossy(&p).unwrap();
        let mixed = qfi_mixed_oracle(&p, LossOrdering::AfterPreparation).unwrap();
        prop_assert!(mixed <= closed + 1e-8, "oracle {mixed} above the bound {closed}");
    }

    #[test]
    fn sensitivities_agree(p in small_params()) {
        prop_assume!(p.alpha_mag > 0.05);
        for d in Detector::ALL {
            match sensitivity(d, &p) {
                Ok(r) => {
                    let o = sensitivity_oracle(&p, d).unwrap();
                    prop_assert!((r.delta_phi - o).abs() <= 1e-6 * o, "{d}: engine {}, oracle {o}", r.delta_phi);
                }
                Err(MetrologyError::ZeroSlope { .. }) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
