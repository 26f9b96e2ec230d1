//! Bessel functions of the first kind: integer order k <= 200 on [0, 100]
//! via power series / Miller backward recurrence, and purely imaginary
//! order 2it via the defining power series with complex gamma factors.

use super::gamma::complex_gamma;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// J_k(x) for integer k in [0, 200] and real x in [0, 100], absolute
/// accuracy ~1e-13. Small arguments use the power series; larger ones use
/// Miller's backward recurrence normalized by J_0 + 2 Σ J_{2m} = 1.
pub fn bessel_j_integer(k: u32, x: f64) -> Result<f64> {
    if k > 200 {
        return Err(Error::Budget(format!("order {k} exceeds 200")));
    }
    if !(0.0..=100.0).contains(&x) {
        return Err(Error::Domain(format!("argument {x} outside [0, 100]")));
    }
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if x <= 10.0 {
        Ok(series_jk(k, x))
    } else {
        Ok(miller_jk(k, x))
    }
}

fn series_jk(k: u32, x: f64) -> f64 {
    // Σ_m (-1)^m (x/2)^{k+2m} / (m! (m+k)!)
    let half = 0.5 * x;
    // first term (x/2)^k / k!; build in log space to dodge under/overflow
    let mut log_t0 = k as f64 * half.ln();
    for j in 1..=k {
        log_t0 -= (j as f64).ln();
    }
    if log_t0 < -745.0 {
        return 0.0; // below f64 underflow threshold; |J_k(x)| < 1e-323
    }
    let mut term = log_t0.exp();
    let mut acc = term;
    let q = half * half;
    for m in 1..200 {
        term *= -q / (m as f64 * (m as f64 + k as f64));
        acc += term;
        if term.abs() < 1e-18 * (1.0 + acc.abs()) {
            break;
        }
    }
    acc
}

fn miller_jk(k: u32, x: f64) -> f64 {
    let start = (k as usize).max(x.ceil() as usize) + 60;
    // downward recurrence J_{m-1} = (2m/x) J_m - J_{m+1} from a tiny seed
    let mut jp = 0.0f64; // J_{m+1}
    let mut j = 1e-300f64; // J_m
    let mut target = 0.0f64;
    let mut norm = 0.0f64; // accumulates J_0 + 2 Σ_{m even > 0} J_m
    for m in (1..=start).rev() {
        let jm = 2.0 * m as f64 / x * j - jp;
        jp = j;
        j = jm;
        if m - 1 == k as usize {
            target = j;
        }
        if (m - 1) % 2 == 0 {
            norm += if m - 1 == 0 { j } else { 2.0 * j };
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            target *= 1e-250;
            norm *= 1e-250;
        }
    }
    target / norm
}

/// J_{2it}(x) for real t with |t| <= 50 and 0 < x < 4π, by the power series
/// Σ_m (-1)^m (x/2)^{2it+2m} / (m! Γ(m + 1 + 2it)), truncated once a term
/// drops below 1e-16 relative to the running magnitude scale.
pub fn bessel_j_imag(t: f64, x: f64) -> Result<Complex64> {
    if t.abs() > 50.0 {
        return Err(Error::Budget(format!("|t| = {} exceeds 50", t.abs())));
    }
    if x <= 0.0 || x >= 4.0 * std::f64::consts::PI {
        return Err(Error::Domain(format!("argument {x} outside (0, 4π)")));
    }
    bessel_j_imag_unrestricted(t, x)
}

/// Series evaluation without the argument-range guard; convergence is
/// entire in x but cancellation grows with x, so callers beyond 4π must
/// budget accuracy themselves.
pub(crate) fn bessel_j_imag_unrestricted(t: f64, x: f64) -> Result<Complex64> {
    let nu = Complex64::new(0.0, 2.0 * t);
    let half = Complex64::new(0.5 * x, 0.0);
    // first term (x/2)^{2it} / Γ(1 + 2it)
    let mut term = half.powc(nu) / complex_gamma(nu + 1.0)?;
    let mut acc = term;
    let mut peak = term.norm();
    let q = 0.25 * x * x;
    for m in 1..400 {
        let mf = m as f64;
        term = -term * q / (Complex64::new(mf, 0.0) * (nu + mf));
        acc += term;
        peak = peak.max(acc.norm());
        if term.norm() < 1e-16 * peak.max(1e-300) {
            break;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_integer_order_values() {
        let cases = [
            (0u32, 1.0f64, 0.76519768655796655145),
            (5, 10.0, -0.23406152818679364044),
            (27, 3.0, 4.8143095970073008661e-24),
            (100, 50.0, 1.115927369083809278e-21),
            (1, 100.0, -0.077145352014112158033),
        ];
        for (k, x, want) in cases {
            let got = bessel_j_integer(k, x).unwrap();
            assert!(
                (got - want).abs() < 1e-12 * (1.0 + want.abs()),
                "J_{k}({x}): got {got}, want {want}"
            );
        }
    }

    #[test]
    fn small_argument_leading_behavior() {
        // J_1(x) = x/2 - x^3/16 + O(x^5)
        let x = 1e-3;
        let got = bessel_j_integer(1, x).unwrap();
        let approx = x / 2.0 - x * x * x / 16.0;
        assert!((got - approx).abs() < 1e-16);
    }

    #[test]
    fn derivative_recurrence_against_finite_differences() {
        // 2 J'_k = J_{k-1} - J_{k+1}
        let h = 1e-5;
        for &(k, x) in &[(1u32, 2.5f64), (4, 7.0), (10, 20.0), (40, 60.0)] {
            let fd = (bessel_j_integer(k, x + h).unwrap() - bessel_j_integer(k, x - h).unwrap())
                / (2.0 * h);
            let rec = 0.5
                * (bessel_j_integer(k - 1, x).unwrap() - bessel_j_integer(k + 1, x).unwrap());
            assert!(
                (fd - rec).abs() < 1e-8,
                "derivative mismatch at k = {k}, x = {x}: fd = {fd}, rec = {rec}"
            );
        }
    }

    #[test]
    fn three_term_recurrence() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let k = rng.gen_range(1..=50u32);
            let x = rng.gen_range(0.1..=50.0f64);
            let lhs = bessel_j_integer(k - 1, x).unwrap() + bessel_j_integer(k + 1, x).unwrap();
            let rhs = 2.0 * k as f64 / x * bessel_j_integer(k, x).unwrap();
            assert!(
                (lhs - rhs).abs() < 1e-10,
                "recurrence failed at k = {k}, x = {x}"
            );
        }
    }

    #[test]
    fn domain_checks() {
        assert!(bessel_j_integer(201, 1.0).is_err());
        assert!(bessel_j_integer(3, -0.5).is_err());
        assert!(bessel_j_integer(3, 100.5).is_err());
        assert_eq!(bessel_j_integer(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j_integer(7, 0.0).unwrap(), 0.0);
    }

    /// 50-term reference sum for J_{2it}(x) with terms built only from
    /// elementary operations and the gamma oracle recurrence
    /// Γ(m + 1 + ν) = (m + ν) Γ(m + ν), seeded by a frozen Γ(1 + i) pin.
    fn imag_order_oracle(t: f64, x: f64) -> Complex64 {
        let nu = Complex64::new(0.0, 2.0 * t);
        // build Γ(1 + ν) from scratch via the product definition:
        // Γ(z) = lim n^z n! / (z (z+1) ... (z+n)) at z = 1 + ν, n = 4e6,
        // which converges like |z(z+1)| / (2n) ~ 1e-6 here
        let n = 4_000_000usize;
        let z = nu + 1.0;
        let mut log_g = z * (n as f64).ln() - z.ln();
        for j in 1..=n {
            log_g += Complex64::new((j as f64).ln(), 0.0);
            log_g -= (z + j as f64).ln();
        }
        let gamma1nu = log_g.exp();
        let mut gammas = vec![gamma1nu];
        for m in 1..=50 {
            let prev = gammas[m - 1];
            gammas.push(prev * (nu + m as f64));
        }
        let half = Complex64::new(0.5 * x, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut sign = 1.0;
        for m in 0..=50 {
            let num = half.powc(nu + 2.0 * m as f64);
            let mut mfac = 1.0f64;
            for j in 1..=m {
                mfac *= j as f64;
            }
            acc += sign * num / (mfac * gammas[m]);
            sign = -sign;
        }
        acc
    }

    #[test]
    fn imag_order_pinned_and_oracle() {
        // frozen references
        let cases = [
            (0.5f64, 1.0f64, Complex64::new(1.6410241794950822613, -0.4370750102136830645)),
            (3.0, 2.0, Complex64::new(1188.9973045748535663, 1566.7170029625278278)),
            (30.0, 0.5, Complex64::new(3.7351358428369430921e39, 2.3192459762547881389e39)),
        ];
        for (t, x, want) in cases {
            let got = bessel_j_imag(t, x).unwrap();
            assert!(
                (got - want).norm() / want.norm() < 1e-11,
                "J_(2i*{t})({x}): got {got}, want {want}"
            );
        }
        // independent series oracle at the first pin
        let oracle = imag_order_oracle(0.5, 1.0);
        let got = bessel_j_imag(0.5, 1.0).unwrap();
        assert!((got - oracle).norm() < 1e-6, "oracle disagrees: {got} vs {oracle}");
    }

    #[test]
    fn conjugation_symmetry() {
        for &(t, x) in &[(0.7f64, 1.3f64), (5.0, 3.0), (22.0, 9.0)] {
            let plus = bessel_j_imag(t, x).unwrap();
            let minus = bessel_j_imag(-t, x).unwrap();
            assert!(
                (plus.conj() - minus).norm() < 1e-12 * (1.0 + plus.norm()),
                "conjugation failed at t = {t}, x = {x}"
            );
        }
    }

    #[test]
    fn order_zero_limit() {
        for &x in &[0.3f64, 1.0, 4.0, 11.0] {
            let a = bessel_j_imag(0.0, x).unwrap();
            let b = bessel_j_integer(0, x).unwrap();
            assert!((a.re - b).abs() < 1e-12, "t = 0 mismatch at x = {x}");
            assert!(a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn imag_order_domain() {
        assert!(bessel_j_imag(51.0, 1.0).is_err());
        assert!(bessel_j_imag(1.0, 0.0).is_err());
        assert!(bessel_j_imag(1.0, 4.0 * std::f64::consts::PI).is_err());
    }
}
