//! Truncated multivariate power series and the exponential of a quadratic.

use crate::dual::DualComplex;

use super::poly::{degree, Exponent, SparsePoly, NVARS};
use super::GenfunError;

/// Largest per-variable truncation order.
pub const MAX_VAR_CAP: u8 = 12;

/// Upper bound on `coefficients × polynomial terms` for one exponentiation.
pub const DEFAULT_WORK_BUDGET: usize = 200_000_000;

/// Exact factorials `0!..=12!`.
pub const FACTORIALS: [u64; MAX_VAR_CAP as usize + 1] = {
    let mut f = [1u64; MAX_VAR_CAP as usize + 1];
    let mut k = 1;
    while k <= MAX_VAR_CAP as usize {
        f[k] = f[k - 1] * k as u64;
        k += 1;
    }
    f
};

/// Dense coefficient table of a series truncated independently in every
/// variable: entry `e` is stored iff `e[v] <= cap[v]` for all `v`.
#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    cap: Exponent,
    strides: [usize; NVARS],
    coeffs: Vec<DualComplex>,
}

impl TruncatedSeries {
    fn zeros(cap: Exponent) -> Self {
        let mut strides = [0; NVARS];
        let mut len = 1usize;
        for v in 0..NVARS {
            strides[v] = len;
            len *= usize::from(cap[v]) + 1;
        }
        Self {
            cap,
            strides,
            coeffs: vec![DualComplex::ZERO; len],
        }
    }

    pub fn cap(&self) -> Exponent {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn covers(&self, e: &Exponent) -> bool {
        e.iter().zip(&self.cap).all(|(k, c)| k <= c)
    }

    fn index(&self, e: &Exponent) -> usize {
        e.iter()
            .zip(&self.strides)
            .map(|(&k, s)| usize::from(k) * s)
            .sum()
    }

    /// Taylor coefficient of the monomial `e`, or `None` outside the cap.
    pub fn coeff(&self, e: &Exponent) -> Option<DualComplex> {
        self.covers(e).then(|| self.coeffs[self.index(e)])
    }
}

/// `exp(poly)` truncated at `cap`.
///
/// Uses the Euler-operator identity `E·exp(P) = exp(P)·E·P`, where `E`
/// multiplies a monomial by its total degree: for `|e| > 0`,
/// `F[e] = (1/|e|) Σ_t |t|·P_t·F[e - t]`. Every `F[e - t]` precedes `F[e]` in
/// the dense mixed-radix order, so one forward pass is exact for all
/// coefficients under the cap.
pub fn exp_series(poly: &SparsePoly, cap: Exponent) -> Result<TruncatedSeries, GenfunError> {
    exp_series_with_budget(poly, cap, DEFAULT_WORK_BUDGET)
}

pub fn exp_series_with_budget(
    poly: &SparsePoly,
    cap: Exponent,
    budget: usize,
) -> Result<TruncatedSeries, GenfunError> {
    if !poly.constant_term().is_zero() {
        return Err(GenfunError::NonZeroConstant);
    }
    if let Some(&c) = cap.iter().find(|&&c| c > MAX_VAR_CAP) {
        return Err(GenfunError::CapTooLarge {
            reason: format!("per-variable cap {c} exceeds {MAX_VAR_CAP}"),
        });
    }
    let mut series = TruncatedSeries::zeros(cap);
    let work = series.len().saturating_mul(poly.len().max(1));
    if work > budget {
        return Err(GenfunError::CapTooLarge {
            reason: format!("{work} coefficient updates exceed budget {budget}"),
        });
    }

    // Terms that fit under the cap, pre-scaled by their degree.
    let terms: Vec<(Exponent, usize, DualComplex)> = poly
        .terms()
        .filter(|(e, _)| series.covers(e))
        .map(|(e, c)| (*e, series.index(e), c.scale(f64::from(degree(e)))))
        .collect();

    series.coeffs[0] = DualComplex::ONE;
    let mut e: Exponent = [0; NVARS];
    let mut total: u32 = 0;
    for idx in 1..series.coeffs.len() {
        // advance the mixed-radix counter
        for v in 0..NVARS {
            if e[v] < cap[v] {
                e[v] += 1;
                total += 1;
                break;
            }
            total -= u32::from(e[v]);
            e[v] = 0;
        }
        let mut acc = DualComplex::ZERO;
        for (t, offset, c) in &terms {
            if t.iter().zip(&e).all(|(a, b)| a <= b) {
                acc += *c * series.coeffs[idx - offset];
            }
        }
        series.coeffs[idx] = acc.scale(1.0 / f64::from(total));
    }
    Ok(series)
}
