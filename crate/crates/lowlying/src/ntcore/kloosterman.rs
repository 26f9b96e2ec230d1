//! Kloosterman sums S(m, n; c), by direct enumeration for small moduli and
//! by twisted multiplicativity across coprime factors for large ones, plus
//! the all-characters Gauss-sum expansion of S(n, 1; c).

use super::{character_group, factorize, gauss_sum, gcd_u64, mod_inverse};
use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct KloostermanQuery {
    pub m: i64,
    pub n: i64,
    pub c: u64,
}

/// Moduli above this are evaluated through the coprime-factor route; the
/// prime-power pieces stay direct.
const DIRECT_CUTOFF: u64 = 10_000;

fn direct_sum(m: u64, n: u64, c: u64) -> Complex64 {
    if c == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let tau = 2.0 * std::f64::consts::PI / c as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 1..c {
        if gcd_u64(x, c) != 1 {
            continue;
        }
        let xinv = mod_inverse(x, c).expect("unit has an inverse");
        let k = ((m as u128 * x as u128 + n as u128 * xinv as u128) % c as u128) as u64;
        acc += Complex64::from_polar(1.0, tau * k as f64);
    }
    acc
}

fn eval(m: u64, n: u64, c: u64) -> Complex64 {
    if c <= DIRECT_CUTOFF {
        return direct_sum(m % c.max(1), n % c.max(1), c);
    }
    let factors = factorize(c);
    if factors.len() == 1 {
        return direct_sum(m % c, n % c, c);
    }
    // S(m, n; rs) = S(m s', n s'; r) S(m r', n r'; s) with ss' = 1 (r), rr' = 1 (s)
    let r = factors[0].0.pow(factors[0].1);
    let s = c / r;
    let s_inv = mod_inverse(s % r, r).expect("coprime cofactor");
    let r_inv = mod_inverse(r % s, s).expect("coprime cofactor");
    let left = eval(
        ((m % r) as u128 * s_inv as u128 % r as u128) as u64,
        ((n % r) as u128 * s_inv as u128 % r as u128) as u64,
        r,
    );
    let right = eval(
        ((m % s) as u128 * r_inv as u128 % s as u128) as u64,
        ((n % s) as u128 * r_inv as u128 % s as u128) as u64,
        s,
    );
    left * right
}

/// S(m, n; c) = Σ_{x mod c, (x,c)=1} e((m x + n x̄)/c). The sum is real; the
/// numerically accumulated imaginary part is required to stay below 1e-10
/// times the unit count.
pub fn kloosterman(q: &KloostermanQuery) -> Result<f64> {
    if q.c < 1 {
        return Err(Error::Domain("modulus must be at least 1".into()));
    }
    let m = q.m.rem_euclid(q.c as i64) as u64;
    let n = q.n.rem_euclid(q.c as i64) as u64;
    let v = eval(m, n, q.c);
    let scale = 1.0 + v.re.abs().max(q.c as f64);
    if v.im.abs() > 1e-10 * scale {
        return Err(Error::Invariant(format!(
            "Kloosterman sum S({}, {}; {}) returned imaginary part {:.3e}",
            q.m, q.n, q.c, v.im
        )));
    }
    Ok(v.re)
}

/// Gauss-sum expansion of S(n, 1; c) over all characters mod c:
/// S(n, 1; c) = (1/φ(c)) Σ_{χ mod c} χ̄(n) τ(χ)², valid for (n, c) = 1.
/// The principal character contributes its (non-primitive) Gauss sum like
/// every other χ.
pub fn kloosterman_char_expansion(n: u64, c: u64) -> Result<f64> {
    if c < 2 {
        return Err(Error::Domain("expansion requires c >= 2".into()));
    }
    if gcd_u64(n % c, c) != 1 {
        return Err(Error::Domain(format!("requires gcd(n, c) = 1, got n = {n}, c = {c}")));
    }
    let chars = character_group(c)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for chi in &chars {
        let tau = gauss_sum(chi)?;
        acc += chi.eval(n % c).conj() * tau * tau;
    }
    let phi = chars.len() as f64;
    let v = acc / phi;
    if v.im.abs() > 1e-9 * (1.0 + v.re.abs().max(c as f64)) {
        return Err(Error::Invariant(format!(
            "character expansion of S({n}, 1; {c}) returned imaginary part {:.3e}",
            v.im
        )));
    }
    Ok(v.re)
}
