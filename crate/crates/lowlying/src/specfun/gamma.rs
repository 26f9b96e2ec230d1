//! Complex gamma function via the Lanczos approximation (g = 7, 9 terms)
//! with the reflection formula on the left half-plane.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn lanczos_sum(z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + (k as f64 - 1.0));
    }
    acc
}

/// Γ(z) for complex z, relative accuracy ~1e-13 for |z| <= 50. Nonpositive
/// real integers are poles and rejected.
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Domain(format!("gamma pole at z = {}", z.re)));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(π z)
        let s = (PI * z).sin();
        return PI / (s * gamma_unchecked(Complex64::new(1.0, 0.0) - z));
    }
    let zm1 = z - 1.0;
    let t = zm1 + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(zm1 + 0.5) * (-t).exp() * lanczos_sum(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent reference for Γ(z): shift z up by recurrence until
    /// |z| is large, then use Stirling's series with 14 Bernoulli terms.
    /// Built and pinned before the Lanczos path; shares nothing with it.
    pub(crate) fn gamma_oracle(mut z: Complex64) -> Complex64 {
        if z.re < 0.5 {
            let s = (PI * z).sin();
            return PI / (s * gamma_oracle(Complex64::new(1.0, 0.0) - z));
        }
        let mut shift = Complex64::new(1.0, 0.0);
        while z.norm() < 40.0 {
            shift *= z;
            z += 1.0;
        }
        // Stirling: log Γ(z) = (z - 1/2) log z - z + log(2π)/2 + Σ B_{2n}/(2n(2n-1) z^{2n-1})
        let bern = [
            1.0 / 6.0,
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
            7.0 / 6.0,
            -3617.0 / 510.0,
            43867.0 / 798.0,
            -174611.0 / 330.0,
            854513.0 / 138.0,
            -236364091.0 / 2730.0,
            8553103.0 / 6.0,
        ];
        let mut lg = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln();
        let z2 = z * z;
        let mut zp = z;
        for (n, &b2n) in bern.iter().enumerate() {
            let n = n + 1;
            lg += b2n / ((2 * n * (2 * n - 1)) as f64) / zp;
            zp *= z2;
        }
        lg.exp() / shift
    }

    #[test]
    fn oracle_matches_frozen_references() {
        // values frozen from an independent high-precision computation
        let cases = [
            (Complex64::new(1.0, 1.0), Complex64::new(0.49801566811835604271, -0.15494982830181068512)),
            (Complex64::new(0.5, 0.0), Complex64::new(1.7724538509055160273, 0.0)),
            (Complex64::new(-1.5, 2.0), Complex64::new(-0.0018843965411520957168, 0.020932721986921831184)),
            (Complex64::new(10.0, -30.0), Complex64::new(-8.5429315061699318786e-7, 6.586002584109200444e-7)),
        ];
        for (z, want) in cases {
            let got = gamma_oracle(z);
            assert!(
                (got - want).norm() / want.norm() < 1e-12,
                "oracle drift at z = {z}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn lanczos_matches_oracle() {
        let cases = [
            Complex64::new(1.0, 1.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(6.0, 0.0),
            Complex64::new(-1.5, 2.0),
            Complex64::new(10.0, -30.0),
            Complex64::new(0.25, 49.0),
            Complex64::new(-10.3, 0.7),
            Complex64::new(35.0, 35.0),
        ];
        for z in cases {
            let got = complex_gamma(z).unwrap();
            let want = gamma_oracle(z);
            assert!(
                (got - want).norm() / want.norm() < 1e-12,
                "gamma mismatch at z = {z}: got {got}, want {want}"
            );
        }
        assert!((complex_gamma(Complex64::new(6.0, 0.0)).unwrap().re - 120.0).abs() < 1e-10);
    }

    #[test]
    fn poles_rejected() {
        for re in [0.0, -1.0, -2.0, -7.0] {
            assert!(complex_gamma(Complex64::new(re, 0.0)).is_err());
        }
        assert!(complex_gamma(Complex64::new(-0.5, 0.0)).is_ok());
    }

    #[test]
    fn reflection_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let z = Complex64::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
            if z.im == 0.0 {
                continue;
            }
            let lhs = complex_gamma(z).unwrap() * complex_gamma(Complex64::new(1.0, 0.0) - z).unwrap();
            let rhs = PI / (PI * z).sin();
            assert!(
                (lhs - rhs).norm() / rhs.norm() < 1e-10,
                "reflection failed at z = {z}"
            );
        }
    }
}
