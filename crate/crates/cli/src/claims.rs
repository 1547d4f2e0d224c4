//! The qualitative orderings the figures show, checked at the captioned
//! parameters. Inequalities are strict as stated; there is no slack.

use std::fmt;

use mzi_core::metrology::{optimize_phase, qfi_ideal, qfi_lossy, DEFAULT_PHASE_INTERVAL};
use mzi_core::{Detector, ExperimentParams, MetrologyError, Scheme, SensitivityReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimResult {
    pub id: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    /// The numbers behind the verdict (or the first counterexample).
    pub detail: String,
}

impl fmt::Display for ClaimResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) {} {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.statement,
            self.detail
        )
    }
}

type Res<T> = Result<T, MetrologyError>;

fn optimal(detector: Detector, p: ExperimentParams) -> Res<SensitivityReport> {
    optimize_phase(detector, &p, DEFAULT_PHASE_INTERVAL)
}

fn point(scheme: Scheme, m: u32, alpha: f64, r: f64) -> ExperimentParams {
    ExperimentParams::new(scheme, m, alpha, r)
}

fn first_failure(checks: Vec<(bool, String)>) -> (bool, String) {
    match checks.iter().find(|(ok, _)| !ok) {
        Some((_, why)) => (false, why.clone()),
        None => (true, format!("{} inequalities hold", checks.len())),
    }
}

fn claim(id: &'static str, statement: &'static str, run: impl FnOnce() -> Res<(bool, String)>) -> ClaimResult {
    let (passed, detail) = run().unwrap_or_else(|e| (false, format!("evaluation failed: {e}")));
    ClaimResult {
        id,
        statement,
        passed,
        detail,
    }
}

/// T values of the transmittance claims.
pub fn transmittance_grid() -> Vec<f64> {
    (0..20).map(|i| 0.05 + 0.95 * i as f64 / 19.0).collect()
}

/// (i) α=1, r=1, T=1: the optimal Δφ strictly decreases with m = 0..3.
pub fn more_photons_help() -> ClaimResult {
    claim("i", "optimal Δφ strictly decreases in m at α=1, r=1", || {
        let mut checks = Vec::new();
        for scheme in [Scheme::A, Scheme::B] {
            for d in Detector::ALL {
                let v: Vec<f64> = (0..=3)
                    .map(|m| optimal(d, point(scheme, m, 1.0, 1.0)).map(|r| r.delta_phi))
                    .collect::<Res<_>>()?;
                for m in 0..3 {
                    checks.push((
                        v[m + 1] < v[m],
                        format!("{scheme} {d}: Δφ(m={}) = {:.6} vs Δφ(m={m}) = {:.6}", m + 1, v[m + 1], v[m]),
                    ));
                }
            }
        }
        Ok(first_failure(checks))
    })
}

/// (ii) Homodyne: Scheme B with one photon beats Scheme A with three.
pub fn one_inside_beats_three_outside() -> ClaimResult {
    claim("ii", "optimal Δφ₂(B, m=1) < Δφ₂(A, m=3) at α=1, r=1", || {
        let b = optimal(Detector::Homodyne, point(Scheme::B, 1, 1.0, 1.0))?.delta_phi;
        let a = optimal(Detector::Homodyne, point(Scheme::A, 3, 1.0, 1.0))?.delta_phi;
        Ok((b < a, format!("B m=1: {b:.6}, A m=3: {a:.6}")))
    })
}

/// (iii) α=1, r=1: both optimal sensitivities are non-increasing in T, and
/// homodyne is never worse than intensity difference.
pub fn transmittance_orderings() -> ClaimResult {
    claim(
        "iii",
        "optimal Δφ non-increasing in T; homodyne ≤ intensity difference (α=1, r=1)",
        || {
            let ts = transmittance_grid();
            let mut checks = Vec::new();
            for scheme in [Scheme::A, Scheme::B] {
                for m in 0..=3 {
                    let mut curves = Vec::new();
                    for d in Detector::ALL {
                        let v: Vec<f64> = ts
                            .iter()
                            .map(|&t| optimal(d, point(scheme, m, 1.0, 1.0).with_transmittance(t)).map(|r| r.delta_phi))
                            .collect::<Res<_>>()?;
                        for i in 1..v.len() {
                            checks.push((
                                v[i] <= v[i - 1],
                                format!(
                                    "{scheme} m={m} {d}: Δφ(T={:.3}) = {:.8} > Δφ(T={:.3}) = {:.8}",
                                    ts[i], v[i], ts[i - 1], v[i - 1]
                                ),
                            ));
                        }
                        curves.push(v);
                    }
                    for (i, t) in ts.iter().enumerate() {
                        checks.push((
                            curves[1][i] <= curves[0][i],
                            format!(
                                "{scheme} m={m} T={t:.3}: homodyne {:.6} > intensity difference {:.6}",
                                curves[1][i], curves[0][i]
                            ),
                        ));
                    }
                }
            }
            Ok(first_failure(checks))
        },
    )
}

/// (iv) QFI strictly increases with m along the α and r sweeps, and Scheme B
/// beats Scheme A for m ≥ 1 at α=1, r=1.
pub fn qfi_orderings() -> ClaimResult {
    claim("iv", "QFI strictly increasing in m; F(B) > F(A) for m ≥ 1 at α=1, r=1", || {
        let mut checks = Vec::new();
        let alphas = (1..=10).map(|i| (0.3 * i as f64, 1.0));
        let rs = (1..=10).map(|i| (1.0, 0.15 * i as f64));
        for (alpha, r) in alphas.chain(rs) {
            for scheme in [Scheme::A, Scheme::B] {
                let f: Vec<f64> = (0..=3).map(|m| qfi_ideal(&point(scheme, m, alpha, r))).collect::<Res<_>>()?;
                for m in 0..3 {
                    checks.push((
                        f[m + 1] > f[m],
                        format!("{scheme} α={alpha} r={r}: F(m={}) = {:.6} vs F(m={m}) = {:.6}", m + 1, f[m + 1], f[m]),
                    ));
                }
            }
        }
        for m in 1..=3 {
            let a = qfi_ideal(&point(Scheme::A, m, 1.0, 1.0))?;
            let b = qfi_ideal(&point(Scheme::B, m, 1.0, 1.0))?;
            checks.push((b > a, format!("m={m}: F(B) = {b:.6}, F(A) = {a:.6}")));
        }
        Ok(first_failure(checks))
    })
}

/// (v) α=1, r=1: the lossy QFI grows with η, and Scheme B beats Scheme A
/// for m ≥ 1 at every η > 0.
pub fn lossy_qfi_orderings() -> ClaimResult {
    claim("v", "F_L monotone in η; F_L(B) > F_L(A) for m ≥ 1 (α=1, r=1)", || {
        let etas: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
        let mut checks = Vec::new();
        let curve = |scheme, m| -> Res<Vec<f64>> {
            etas.iter().map(|&eta| qfi_lossy(&point(scheme, m, 1.0, 1.0).with_eta(eta))).collect()
        };
        for m in 0..=3 {
            let a = curve(Scheme::A, m)?;
            let b = curve(Scheme::B, m)?;
            for (name, v) in [("A", &a), ("B", &b)] {
                for i in 1..v.len() {
                    checks.push((
                        v[i] >= v[i - 1],
                        format!("{name} m={m}: F_L(η={}) = {:.6} < F_L(η={}) = {:.6}", etas[i], v[i], etas[i - 1], v[i - 1]),
                    ));
                }
            }
            if m >= 1 {
                for i in 0..etas.len() {
                    checks.push((b[i] > a[i], format!("m={m} η={}: F_L(B) = {:.6}, F_L(A) = {:.6}", etas[i], b[i], a[i])));
                }
            }
        }
        Ok(first_failure(checks))
    })
}

fn limits_at(t: f64) -> Res<SensitivityReport> {
    optimal(Detector::IntensityDiff, point(Scheme::A, 3, 2.0, 0.6).with_transmittance(t))
}

/// (vi) α=2, r=0.6, T=1, Scheme A, m=3, intensity difference: within 1.5×
/// of the Heisenberg limit and below the standard quantum limit.
pub fn approaches_heisenberg() -> ClaimResult {
    claim("vi", "Scheme A, m=3, α=2, r=0.6, T=1: Δφ ≤ 1.5 Δφ_HL and Δφ < Δφ_SQL", || {
        let r = limits_at(1.0)?;
        Ok((
            r.delta_phi <= 1.5 * r.hl && r.delta_phi < r.sql,
            format!("Δφ = {:.6}, HL = {:.6} (ratio {:.4}), SQL = {:.6}, N = {:.4}", r.delta_phi, r.hl, r.delta_phi / r.hl, r.sql, r.n_total),
        ))
    })
}

/// (vii) Same configuration at T = 0.5: still below the standard quantum limit.
pub fn beats_sql_with_loss() -> ClaimResult {
    claim("vii", "Scheme A, m=3, α=2, r=0.6, T=0.5: Δφ < Δφ_SQL", || {
        let r = limits_at(0.5)?;
        Ok((
            r.delta_phi < r.sql,
            format!("Δφ = {:.6}, SQL = {:.6}, N = {:.4}", r.delta_phi, r.sql, r.n_total),
        ))
    })
}

pub fn check_all() -> Vec<ClaimResult> {
    vec![
        more_photons_help(),
        one_inside_beats_three_outside(),
        transmittance_orderings(),
        qfi_orderings(),
        lossy_qfi_orderings(),
        approaches_heisenberg(),
        beats_sql_with_loss(),
    ]
}
