//! Integer-arithmetic core: multiplicative-function tables, Dirichlet
//! characters with conductors and Gauss sums, and Kloosterman sums.

pub mod characters;
pub mod kloosterman;

pub use characters::{character_group, gauss_sum, DirichletCharacter};
pub use kloosterman::{kloosterman, kloosterman_char_expansion, KloostermanQuery};

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Sieved tables of the classical multiplicative functions up to `limit`.
/// All vectors have length `limit + 1` and are indexed by n; index 0 is
/// an unused zero slot.
#[derive(Debug, Clone)]
pub struct ArithTables {
    pub limit: usize,
    /// von Mangoldt Λ(n): log p at prime powers p^k, 0 elsewhere.
    pub mangoldt: Vec<f64>,
    /// Moebius μ(n) ∈ {-1, 0, 1}.
    pub moebius: Vec<i8>,
    /// Euler totient φ(n).
    pub totient: Vec<u64>,
    /// Divisor count τ(n).
    pub divisor_count: Vec<u32>,
}

/// Linear sieve of μ, φ, τ and Λ up to `limit` (1 ≤ limit ≤ 10^8).
pub fn sieve_arith(limit: usize) -> Result<ArithTables> {
    if limit < 1 {
        return Err(Error::Domain("sieve limit must be at least 1".into()));
    }
    if limit > 100_000_000 {
        return Err(Error::Budget(format!(
            "sieve limit {limit} exceeds 10^8"
        )));
    }
    let n = limit + 1;
    let mut moebius = vec![0i8; n];
    let mut totient = vec![0u64; n];
    let mut divisor_count = vec![0u32; n];
    // exponent of the smallest prime factor, for the τ recurrence
    let mut spf_exp = vec![0u32; n];
    let mut composite = vec![false; n];
    let mut primes: Vec<usize> = Vec::new();

    moebius[1] = 1;
    totient[1] = 1;
    divisor_count[1] = 1;
    for i in 2..n {
        if !composite[i] {
            primes.push(i);
            moebius[i] = -1;
            totient[i] = (i - 1) as u64;
            divisor_count[i] = 2;
            spf_exp[i] = 1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip >= n {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                moebius[ip] = 0;
                totient[ip] = totient[i] * p as u64;
                spf_exp[ip] = spf_exp[i] + 1;
                divisor_count[ip] = divisor_count[i] / (spf_exp[i] + 1) * (spf_exp[i] + 2);
                break;
            } else {
                moebius[ip] = -moebius[i];
                totient[ip] = totient[i] * (p as u64 - 1);
                spf_exp[ip] = 1;
                divisor_count[ip] = divisor_count[i] * 2;
            }
        }
    }

    let mut mangoldt = vec![0.0f64; n];
    for &p in &primes {
        let lp = (p as f64).ln();
        let mut q = p;
        loop {
            mangoldt[q] = lp;
            match q.checked_mul(p) {
                Some(next) if next < n => q = next,
                _ => break,
            }
        }
    }

    Ok(ArithTables {
        limit,
        mangoldt,
        moebius,
        totient,
        divisor_count,
    })
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Modular inverse of a mod m, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    let m = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Trial-division factorization, adequate for the desk scales used here.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let snapshot = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(snapshot.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = 37u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_up_to(x: usize) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; x + 1];
    let mut out = Vec::new();
    for i in 2..=x {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= x {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// σ_{2it}(n) = Σ_{d | n} d^{2it}.
pub fn sigma_2it(n: u64, t: f64) -> Result<Complex64> {
    if n < 1 {
        return Err(Error::Domain("sigma_2it requires n >= 1".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for d in divisors(n) {
        acc += Complex64::from_polar(1.0, 2.0 * t * (d as f64).ln());
    }
    Ok(acc)
}
