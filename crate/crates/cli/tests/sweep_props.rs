use mzi_cli::sweep::{Axis, AxisRange, RowStatus, SweepSpec};
use mzi_core::{Detector, ExperimentParams, Scheme};
use proptest::prelude::*;

proptest! {
    #[test]
    fn linear_ranges_hit_both_ends(start in -5.0f64..5.0, span in 0.0f64..10.0, steps in 2usize..500) {
        let v = AxisRange::linear(start, start + span, steps).values();
        prop_assert_eq!(v.len(), steps);
        prop_assert_eq!(v[0], start);
        prop_assert_eq!(*v.last().unwrap(), start + span);
        prop_assert!(v.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn range_syntax_round_trips(a in -3.0f64..3.0, b in -3.0f64..3.0, n in 1usize..50) {
        let parsed: AxisRange = format!("{a}:{b}:{n}").parse().unwrap();
        prop_assert_eq!(parsed, AxisRange::linear(a, b, n));
        let list: AxisRange = format!("{a}, {b}").parse().unwrap();
        prop_assert_eq!(list.values(), vec![a, b]);
    }
}

fn spec(axis: Axis, range: AxisRange, schemes: &[Scheme], ms: &[u32], optimize_phi: bool) -> SweepSpec {
    SweepSpec {
        axis,
        range,
        fixed: ExperimentParams::new(Scheme::Original, 0, 1.0, 1.0),
        schemes: schemes.to_vec(),
        ms: ms.to_vec(),
        detectors: Detector::ALL.to_vec(),
        optimize_phi,
    }
}

#[test]
fn rows_are_axis_major_then_scheme_m_detector() {
    let rows = spec(Axis::Phi, AxisRange::linear(0.5, 2.5, 3), &[Scheme::Original, Scheme::B], &[1, 2], false)
        .run()
        .unwrap();
    let keys: Vec<(f64, Scheme, u32, Detector)> = rows.iter().map(|r| (r.value, r.scheme, r.m, r.detector)).collect();
    let mut expected = Vec::new();
    for value in [0.5, 1.5, 2.5] {
        // the original scheme runs once, with m = 0
        for (scheme, m) in [(Scheme::Original, 0), (Scheme::B, 1), (Scheme::B, 2)] {
            for d in Detector::ALL {
                expected.push((value, scheme, m, d));
            }
        }
    }
    assert_eq!(keys, expected);
    assert!(rows.iter().all(|r| r.status == RowStatus::Ok));
}

#[test]
fn optimal_sensitivity_does_not_degrade_with_transmittance() {
    let rows = spec(Axis::T, AxisRange::linear(0.1, 1.0, 10), &[Scheme::A, Scheme::B], &[0, 1, 2], true)
        .run()
        .unwrap();
    let per_value = rows.len() / 10;
    for curve in 0..per_value {
        let points: Vec<_> = rows.iter().skip(curve).step_by(per_value).collect();
        for w in points.windows(2) {
            assert!(
                w[1].delta_phi <= w[0].delta_phi,
                "{} {} m={} at T={}",
                w[1].detector,
                w[1].scheme,
                w[1].m,
                w[1].value
            );
        }
    }
}
