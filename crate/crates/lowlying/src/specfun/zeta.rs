//! Hurwitz zeta by Euler-Maclaurin summation, Riemann zeta, Dirichlet
//! L-functions assembled from Hurwitz rows, and zeta with the Euler
//! factors at a given level's primes removed.

use crate::error::{Error, Result};
use crate::ntcore::characters::DirichletCharacter;
use crate::ntcore::factorize;
use num_complex::Complex64;

/// B_{2k} for k = 1..=12.
const BERN: [f64; 12] = [
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
];

/// ζ(s, a) for a > 0 and s ≠ 1, |Im s| <= 5000, by Euler-Maclaurin with
/// 12 Bernoulli correction terms and an adaptively doubled cutoff.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("hurwitz shift {a} must be positive")));
    }
    if s.im == 0.0 && s.re == 1.0 {
        return Err(Error::Domain("pole of zeta at s = 1".into()));
    }
    if s.im.abs() > 5000.0 {
        return Err(Error::Budget(format!("|Im s| = {} exceeds 5000", s.im.abs())));
    }
    if s.re < -1.0 {
        return Err(Error::Domain(format!("Re s = {} below supported -1", s.re)));
    }
    let mut m = 20usize.max((2.0 * s.im.abs()).ceil() as usize);
    loop {
        let (val, last) = euler_maclaurin(s, a, m);
        if last <= 1e-15 * (1.0 + val.norm()) {
            return Ok(val);
        }
        if m >= 1 << 22 {
            return Err(Error::Budget(format!(
                "hurwitz cutoff exceeded 2^22 at s = {s}, a = {a}"
            )));
        }
        m *= 2;
    }
}

/// One Euler-Maclaurin pass with cutoff m; returns the value and the
/// magnitude of the final Bernoulli term as the accuracy proxy.
fn euler_maclaurin(s: Complex64, a: f64, m: usize) -> (Complex64, f64) {
    let mut direct = Complex64::new(0.0, 0.0);
    for n in 0..m {
        direct += (-s * (n as f64 + a).ln()).exp();
    }
    let w = m as f64 + a;
    let lw = w.ln();
    let w_pow = |e: Complex64| (e * lw).exp();
    let mut val = direct + w_pow(1.0 - s) / (s - 1.0) + 0.5 * w_pow(-s);
    // Σ_k B_{2k}/(2k)! (s)_{2k-1} w^{-s-2k+1}
    let mut poch = s;
    let mut wfac = w_pow(-s - 1.0);
    let w2 = 1.0 / (w * w);
    let mut fact = 2.0f64; // (2k)!
    let mut last = 0.0;
    for (k, &b) in BERN.iter().enumerate() {
        let term = (b / fact) * poch * wfac;
        val += term;
        last = term.norm();
        let two_k = 2.0 * (k as f64 + 1.0);
        poch *= (s + (two_k - 1.0)) * (s + two_k);
        wfac *= w2;
        fact *= (two_k + 1.0) * (two_k + 2.0);
    }
    (val, last)
}

/// ζ(s).
pub fn zeta(s: Complex64) -> Result<Complex64> {
    hurwitz_zeta(s, 1.0)
}

/// The row [ζ(s, r/q)] for r = 1..=q, the building block for every
/// Dirichlet L-value mod q at this s.
pub fn hurwitz_row(s: Complex64, q: u64) -> Result<Vec<Complex64>> {
    (1..=q).map(|r| hurwitz_zeta(s, r as f64 / q as f64)).collect()
}

/// L(s, χ) = q^{-s} Σ_{r=1}^{q} χ(r) ζ(s, r/q). At s = 1 the character sum
/// cancels the Hurwitz poles, leaving L(1, χ) = -(1/q) Σ_r χ(r) ψ(r/q) for
/// non-principal χ.
pub fn dirichlet_l(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    if s.im == 0.0 && s.re == 1.0 {
        if chi.is_principal {
            return Err(Error::Domain("pole of principal L at s = 1".into()));
        }
        let q = chi.modulus;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 1..q {
            acc += chi.eval(r) * digamma(r as f64 / q as f64);
        }
        return Ok(-acc / q as f64);
    }
    let row = hurwitz_row(s, chi.modulus)?;
    dirichlet_l_from_row(s, chi, &row)
}

/// ψ(x) for x > 0, by upward recurrence into the asymptotic range.
fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    acc + x.ln()
        - 0.5 / x
        - inv2
            * (1.0 / 12.0
                - inv2
                    * (1.0 / 120.0
                        - inv2
                            * (1.0 / 252.0
                                - inv2
                                    * (1.0 / 240.0
                                        - inv2
                                            * (1.0 / 132.0
                                                - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))))
}

/// Same as [`dirichlet_l`] given a precomputed Hurwitz row for χ's modulus,
/// so a batch over characters shares the row.
pub fn dirichlet_l_from_row(
    s: Complex64,
    chi: &DirichletCharacter,
    row: &[Complex64],
) -> Result<Complex64> {
    let q = chi.modulus;
    debug_assert_eq!(row.len() as u64, q);
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 1..=q {
        let c = chi.eval(r);
        if c != Complex64::new(0.0, 0.0) {
            acc += c * row[(r - 1) as usize];
        }
    }
    Ok((-s * (q as f64).ln()).exp() * acc)
}

/// ζ(s) with the Euler factors at primes dividing `level` removed:
/// ζ_N(s) = ζ(s) Π_{p | N} (1 - p^{-s}).
pub fn zeta_deflated(level: u64, s: Complex64) -> Result<Complex64> {
    if level == 0 {
        return Err(Error::Domain("level must be positive".into()));
    }
    let mut val = zeta(s)?;
    for (p, _) in factorize(level) {
        val *= 1.0 - (-s * (p as f64).ln()).exp();
    }
    Ok(val)
}
