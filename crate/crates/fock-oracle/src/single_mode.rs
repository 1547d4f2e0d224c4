//! Single-mode input states as Fock amplitude vectors.

use num_complex::Complex64;

use crate::OracleError;

/// Largest discarded probability accepted by the input-state constructors.
pub const INPUT_TAIL_TOL: f64 = 1e-14;

/// `|α⟩` truncated to `cutoff + 1` amplitudes and renormalized.
pub fn coherent(alpha: Complex64, cutoff: usize) -> Result<Vec<Complex64>, OracleError> {
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=cutoff {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        amps.push(c);
    }
    finish(amps, cutoff)
}

/// Squeezed vacuum with only even amplitudes,
/// `c_{2k} = (-tanh r)^k √((2k)!) / (2^k k! √cosh r)`.
pub fn squeezed_vacuum(r: f64, cutoff: usize) -> Result<Vec<Complex64>, OracleError> {
    let t = r.tanh();
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    let mut c = 1.0 / r.cosh().sqrt();
    let mut k = 0usize;
    while 2 * k <= cutoff {
        amps[2 * k] = Complex64::new(c, 0.0);
        // c_{2k+2} / c_{2k} = -tanh r · √((2k+1)/(2k+2))
        c *= -t * ((2 * k + 1) as f64 / (2 * k + 2) as f64).sqrt();
        k += 1;
    }
    finish(amps, cutoff)
}

fn finish(mut amps: Vec<Complex64>, cutoff: usize) -> Result<Vec<Complex64>, OracleError> {
    let kept: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    let tail = (1.0 - kept).max(0.0);
    if tail > INPUT_TAIL_TOL {
        return Err(OracleError::TruncationLoss { tail, cutoff });
    }
    let s = kept.sqrt().recip();
    for c in &mut amps {
        *c *= s;
    }
    Ok(amps)
}

/// Photon-number distribution of `|α⟩`, computed to `len` entries without
/// truncation checks.
pub fn coherent_distribution(alpha_mag: f64, len: usize) -> Vec<f64> {
    let mean = alpha_mag * alpha_mag;
    let mut p = Vec::with_capacity(len);
    let mut x = (-mean).exp();
    for n in 0..len {
        if n > 0 {
            x *= mean / n as f64;
        }
        p.push(x);
    }
    p
}

/// Photon-number distribution of the squeezed vacuum, `len` entries.
pub fn squeezed_distribution(r: f64, len: usize) -> Vec<f64> {
    let t2 = r.tanh().powi(2);
    let mut p = vec![0.0; len];
    let mut x = 1.0 / r.cosh();
    let mut k = 0usize;
    while 2 * k < len {
        p[2 * k] = x;
        x *= t2 * (2 * k + 1) as f64 / (2 * k + 2) as f64;
        k += 1;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_n(v: &[Complex64]) -> f64 {
        v.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
    }

    #[test]
    fn vacuum_limits() {
        let v = coherent(Complex64::new(0.0, 0.0), 5).unwrap();
        assert_eq!(v[0], Complex64::new(1.0, 0.0));
        let v = squeezed_vacuum(0.0, 5).unwrap();
        assert_eq!(v[0], Complex64::new(1.0, 0.0));
        assert!(v[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn coherent_ratio_and_mean() {
        let v = coherent(Complex64::new(1.0, 0.0), 20).unwrap();
        assert!((v[1] / v[0] - 1.0).norm() < 1e-15);
        let v = coherent(Complex64::from_polar(1.7, 0.3), 60).unwrap();
        assert!((mean_n(&v) - 1.7f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn squeezed_structure() {
        for r in [0.3, 0.8, 1.2] {
            let v = squeezed_vacuum(r, 200).unwrap();
            assert!(v.iter().skip(1).step_by(2).all(|c| c.norm() == 0.0));
            assert!((mean_n(&v) - r.sinh().powi(2)).abs() < 1e-10);
            // second amplitude is negative: ⟨b²⟩ = -sinh(2r)/2
            assert!(v[2].re < 0.0);
            let b2: f64 = (0..v.len() - 2)
                .map(|n| (v[n].conj() * v[n + 2]).re * (((n + 1) * (n + 2)) as f64).sqrt())
                .sum();
            assert!((b2 + (2.0 * r).sinh() / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn truncation_reported() {
        assert!(matches!(
            coherent(Complex64::new(3.0, 0.0), 10),
            Err(OracleError::TruncationLoss { .. })
        ));
        assert!(squeezed_vacuum(1.0, 10).is_err());
    }

    #[test]
    fn distributions_normalized() {
        let p: f64 = coherent_distribution(1.3, 80).iter().sum();
        assert!((p - 1.0).abs() < 1e-14);
        let p: f64 = squeezed_distribution(0.8, 400).iter().sum();
        assert!((p - 1.0).abs() < 1e-13);
    }
}
