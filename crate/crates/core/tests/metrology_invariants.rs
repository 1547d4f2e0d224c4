use std::f64::consts::PI;

use mzi_core::metrology::{
    optimize_phase, qfi_ideal, qfi_lossy, qfi_report, sensitivity, total_photon_number, DEFAULT_PHASE_INTERVAL,
};
use mzi_core::{Detector, ExperimentParams, MetrologyError, Scheme};
use proptest::prelude::*;

fn scheme() -> impl Strategy<Value = (Scheme, u32)> {
    prop_oneof![
        Just((Scheme::Original, 0)),
        (0u32..=3).prop_map(|m| (Scheme::A, m)),
        (0u32..=3).prop_map(|m| (Scheme::B, m)),
    ]
}

fn detector() -> impl Strategy<Value = Detector> {
    prop_oneof![Just(Detector::IntensityDiff), Just(Detector::Homodyne)]
}

prop_compose! {
    fn params()(
        (scheme, m) in scheme(),
        alpha in 0.1f64..2.0,
        theta in -PI..PI,
        r in 0.0f64..1.2,
        phi in 0.05f64..3.09,
        t in 0.05f64..=1.0,
        eta in 0.0f64..=1.0,
    ) -> ExperimentParams {
        ExperimentParams::new(scheme, m, alpha, r)
            .with_theta_alpha(theta)
            .with_phi(phi)
            .with_transmittance(t)
            .with_eta(eta)
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ideal_qfi_ignores_phase_and_losses(p in params(), phi in 0.05f64..3.09, t in 0.05f64..=1.0) {
        let f = qfi_ideal(&p).unwrap();
        let moved = qfi_ideal(&p.with_phi(phi).with_transmittance(t).with_eta(1.0)).unwrap();
        prop_assert!(close(f, moved, 1e-12), "{f} vs {moved}");
        prop_assert!(f >= 0.0);
    }

    #[test]
    fn lossy_qfi_grows_with_eta_up_to_the_ideal(p in params(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let f_lo = qfi_lossy(&p.with_eta(lo)).unwrap();
        let f_hi = qfi_lossy(&p.with_eta(hi)).unwrap();
        let ideal = qfi_ideal(&p).unwrap();
        prop_assert!(f_lo <= f_hi * (1.0 + 1e-12) + 1e-14, "F_L({lo}) = {f_lo} > F_L({hi}) = {f_hi}");
        prop_assert!(f_hi <= ideal * (1.0 + 1e-12) + 1e-14);
        prop_assert!(close(qfi_lossy(&p.with_eta(1.0)).unwrap(), ideal, 1e-12));
        prop_assert_eq!(qfi_lossy(&p.with_eta(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn report_fields_are_consistent(p in params(), d in detector()) {
        match sensitivity(d, &p) {
            Ok(r) => {
                prop_assert!(close(r.delta_phi * r.slope, r.sigma, 1e-12));
                prop_assert!(close(r.sql * r.sql, r.hl, 1e-12));
                prop_assert!(close(r.hl * r.n_total, 1.0, 1e-12));
                prop_assert!(close(r.n_total, total_photon_number(&p).unwrap(), 1e-10));
                prop_assert_eq!(r.phi, p.phi);
            }
            Err(MetrologyError::ZeroSlope { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn arm_loss_scales_the_photon_number(p in params(), t in 0.0f64..=1.0) {
        let full = total_photon_number(&p.with_transmittance(1.0)).unwrap();
        let lossy = total_photon_number(&p.with_transmittance(t)).unwrap();
        prop_assert!(close(lossy, t * full, 1e-11), "{lossy} vs {t} × {full}");
    }

    #[test]
    fn qcrb_follows_the_fisher_information(p in params(), v in 1u32..10) {
        let q = qfi_report(&p, v).unwrap();
        prop_assert!(close(q.qcrb_ideal, 1.0 / (f64::from(v) * q.f_ideal).sqrt(), 1e-12));
        prop_assert!(q.qcrb_lossy >= q.qcrb_ideal * (1.0 - 1e-12));
    }

    #[test]
    fn no_photon_added_is_the_original_scheme(p in params(), d in detector()) {
        let mut plain = p;
        plain.scheme = Scheme::Original;
        plain.m = 0;
        for s in [Scheme::A, Scheme::B] {
            let mut zero = p;
            zero.scheme = s;
            zero.m = 0;
            prop_assert!(close(qfi_ideal(&zero).unwrap(), qfi_ideal(&plain).unwrap(), 1e-12));
            if let (Ok(a), Ok(b)) = (sensitivity(d, &zero), sensitivity(d, &plain)) {
                prop_assert!(close(a.delta_phi, b.delta_phi, 1e-9));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn optimum_respects_the_quantum_cramer_rao_bound(
        (scheme, m) in scheme(),
        alpha in 0.2f64..2.0,
        r in 0.0f64..1.0,
        d in detector(),
    ) {
        let p = ExperimentParams::new(scheme, m, alpha, r);
        let best = optimize_phase(d, &p, DEFAULT_PHASE_INTERVAL).unwrap();
        let bound = qfi_report(&p, 1).unwrap().qcrb_ideal;
        prop_assert!(best.delta_phi >= bound - 1e-9, "{} < {bound}", best.delta_phi);
        prop_assert!(best.phi >= DEFAULT_PHASE_INTERVAL.0 && best.phi <= DEFAULT_PHASE_INTERVAL.1);
    }
}

#[test]
fn coherent_light_anchors() {
    for alpha in [0.5, 1.0, 2.5] {
        for phi in [0.1, 0.7, 1.3, 2.2, 3.0] {
            let p = ExperimentParams::new(Scheme::Original, 0, alpha, 0.0).with_phi(phi);
            let expected = 1.0 / (alpha * phi.sin());
            for d in Detector::ALL {
                let got = sensitivity(d, &p).unwrap().delta_phi;
                assert!((got - expected).abs() <= 1e-9 * expected, "{d} α={alpha} φ={phi}: {got}");
            }
        }
        let f = qfi_ideal(&ExperimentParams::new(Scheme::Original, 0, alpha, 0.0)).unwrap();
        assert!((f - 2.0 * alpha * alpha).abs() < 1e-9);
    }
}

#[test]
fn vacuum_input_has_no_sensitivity() {
    let p = ExperimentParams::new(Scheme::Original, 0, 0.0, 0.0);
    assert_eq!(qfi_ideal(&p).unwrap(), 0.0);
    assert_eq!(qfi_report(&p, 1).unwrap().qcrb_ideal, f64::INFINITY);
    assert!(matches!(
        optimize_phase(Detector::IntensityDiff, &p, DEFAULT_PHASE_INTERVAL),
        Err(MetrologyError::NoFinitePoint)
    ));
}
