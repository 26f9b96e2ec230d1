//! Exactness check for the K-fold combinatorial expansion of the von
//! Mangoldt function: for n ≤ z^K,
//!
//!   Λ(n) = Σ_{j=1}^{K} (−1)^{j−1} C(K,j) (μ_{≤z}^{*j} * 1^{*(j−1)} * log)(n).
//!
//! Every convolution except the final log factor runs in exact integers, so
//! the returned residual measures floating-point noise only.

use crate::error::{Error, Result};
use crate::ntcore::sieve_arith;

/// Dense-array cap; the boundary case n_max = 2^20 = z^K at z = 2, K = 20
/// must stay in range.
const N_CAP: usize = 1 << 20;
const K_CAP: u32 = 40;

/// Evaluate the depth-K expansion of Λ(n) for every n ≤ n_max and return
/// max_n |expansion(n) − Λ(n)|. The identity needs n_max ≤ z^K.
pub fn heath_brown_check(n_max: usize, z: u64, k: u32) -> Result<f64> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    if n_max > N_CAP {
        return Err(Error::Budget(format!(
            "n_max = {n_max} exceeds the dense-array cap {N_CAP}"
        )));
    }
    if k == 0 {
        return Err(Error::Domain("depth K must be at least 1".into()));
    }
    if k > K_CAP {
        return Err(Error::Budget(format!("depth K = {k} exceeds {K_CAP}")));
    }
    if z < 2 {
        return Err(Error::Domain(format!("smoothing cut z = {z} must be at least 2")));
    }
    let mut reach: u128 = 1;
    let mut covered = false;
    for _ in 0..k {
        reach = reach.saturating_mul(u128::from(z));
        if reach >= n_max as u128 {
            covered = true;
            break;
        }
    }
    if !covered {
        return Err(Error::Domain(format!(
            "identity only holds for n ≤ z^K; n_max = {n_max} > {z}^{k}"
        )));
    }

    let tables = sieve_arith(n_max)?;
    let z_cap = usize::try_from(z).unwrap_or(usize::MAX).min(n_max);
    let mut mu_z = vec![0_i128; n_max + 1];
    for n in 1..=z_cap {
        mu_z[n] = i128::from(tables.moebius[n]);
    }

    // w walks through W_j = μ_{≤z}^{*j} * 1^{*(j−1)}; acc accumulates the
    // signed binomial combination. The huge intermediate values cancel
    // exactly in the integers.
    let mut w = mu_z.clone();
    let mut acc: Vec<i128> = w.iter().map(|&v| v * i128::from(k)).collect();
    let mut binom = i128::from(k);
    for j in 2..=i128::from(k) {
        w = mul_by_one(&w);
        w = mul_by_truncated_moebius(&w, &mu_z, z_cap);
        binom = binom * (i128::from(k) - j + 1) / j;
        let signed = if j % 2 == 1 { binom } else { -binom };
        for n in 1..=n_max {
            acc[n] += signed * w[n];
        }
    }

    // final factor: expansion = acc * log, then compare with Λ
    let ln: Vec<f64> = (0..=n_max)
        .map(|q| if q == 0 { 0.0 } else { (q as f64).ln() })
        .collect();
    let mut expansion = vec![0.0_f64; n_max + 1];
    for d in 1..=n_max {
        if acc[d] == 0 {
            continue;
        }
        let a = acc[d] as f64;
        let mut m = d;
        let mut q = 1;
        while m <= n_max {
            expansion[m] += a * ln[q];
            m += d;
            q += 1;
        }
    }
    let mut worst = 0.0_f64;
    for n in 1..=n_max {
        worst = worst.max((expansion[n] - tables.mangoldt[n]).abs());
    }
    Ok(worst)
}

/// Dirichlet product with the constant-one sequence: out[n] = Σ_{d|n} w[d].
fn mul_by_one(w: &[i128]) -> Vec<i128> {
    let n_max = w.len() - 1;
    let mut out = vec![0_i128; n_max + 1];
    for d in 1..=n_max {
        let v = w[d];
        if v == 0 {
            continue;
        }
        let mut m = d;
        while m <= n_max {
            out[m] += v;
            m += d;
        }
    }
    out
}

/// Dirichlet product with μ truncated at z: out[n] = Σ_{d|n, d≤z} μ(d) w[n/d].
fn mul_by_truncated_moebius(w: &[i128], mu_z: &[i128], z_cap: usize) -> Vec<i128> {
    let n_max = w.len() - 1;
    let mut out = vec![0_i128; n_max + 1];
    for d in 1..=z_cap {
        let m = mu_z[d];
        if m == 0 {
            continue;
        }
        let mut nd = d;
        let mut q = 1;
        while nd <= n_max {
            out[nd] += m * w[q];
            nd += d;
            q += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_contract_calls() {
        assert!(heath_brown_check(0, 3, 2).is_err());
        assert!(heath_brown_check(N_CAP + 1, 2, 20).is_err());
        assert!(heath_brown_check(100, 3, 0).is_err());
        assert!(heath_brown_check(100, 3, 41).is_err());
        assert!(heath_brown_check(100, 1, 20).is_err());
        // 3^4 = 81 < 100: identity range too short
        assert!(heath_brown_check(100, 3, 4).is_err());
        assert!(heath_brown_check(81, 3, 4).is_ok());
    }

    #[test]
    fn depth_one_is_moebius_log() {
        // K = 1: Λ(n) = Σ_{d|n, d≤z} μ(d) log(n/d) for n ≤ z
        let r = heath_brown_check(5000, 5000, 1).unwrap();
        assert!(r <= 1e-10, "residual {r}");
    }

    #[test]
    fn single_point_is_exact() {
        let r = heath_brown_check(1, 2, 1).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn mid_scale_expansion_is_exact_to_float_noise() {
        let r = heath_brown_check(10_000, 3, 20).unwrap();
        assert!(r <= 1e-9, "residual {r}");
        let r2 = heath_brown_check(1 << 15, 2, 20).unwrap();
        assert!(r2 <= 1e-8, "residual {r2}");
    }
}
