//! One-level density from the geometric side: family-averaged prime sums at
//! prime level normalized by the star-basis mass, the per-form prime-sum
//! side used by explicit-formula checks, and the all-characters
//! reconstruction of the Kloosterman error term.

use super::{
    delta_full_with, delta_one, eisenstein_term, kloosterman_tail, validate_prime_level_args,
    GnTable,
};
use crate::error::{Error, Result};
use crate::lmfdb::HeckeEigenvalueSource;
use crate::ntcore::{
    character_group, divisors, gauss_sum, gcd_u64, kloosterman, primes_up_to, KloostermanQuery,
};
use crate::transforms::{katz_sarnak_functional, TestFunction, WeightFunction};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest admissible prime-power reach level^sigma; beyond this the sieve
/// and the per-pair modulus sweeps stop fitting a sane run.
const REACH_BUDGET: f64 = 4e6;

/// Character-form work cap: Σ_c (c² + φ(c)·terms) across the run.
const CHARACTER_BUDGET: f64 = 2e9;

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    #[serde(rename = "N")]
    pub level: u64,
    pub sigma: f64,
    pub c_max: u64,
    pub main_terms: f64,
    pub kloosterman_term: f64,
    pub eisenstein_term: f64,
    pub omega_star: f64,
    pub density_value: f64,
    pub ks_prediction: f64,
    pub deviation: f64,
    pub tail_bound: f64,
}

/// Prime powers p^ν ≤ reach with p ≠ level, outer loop over ν so the pair
/// order (and hence the reduction order) is fixed.
fn prime_power_pairs(level: u64, reach: u64) -> Vec<(u64, u32, u64)> {
    let primes = primes_up_to(reach as usize);
    let mut out = Vec::new();
    let mut nu = 1u32;
    loop {
        let mut any = false;
        for &p in &primes {
            if p == level {
                continue;
            }
            let q = (p as u128).pow(nu);
            if q > reach as u128 {
                break;
            }
            any = true;
            out.push((p, nu, q as u64));
        }
        if !any {
            return out;
        }
        nu += 1;
    }
}

/// Evaluate the averaged one-level density at prime level from the
/// geometric side. Each prime power q = p^ν ≤ level^sigma contributes its
/// own modulus sum and continuous term; the family average over eigenvalues
/// is the star-basis ratio, so the whole prime sum is scaled by −2/Ω* with
/// Ω* evaluated at the same modulus cap. The level-one correction to each
/// averaged eigenvalue is dropped (it is suppressed by 2/(level+1)); the
/// reported tail bound covers only the modulus truncations actually made.
pub fn density_geometric(
    h: &WeightFunction,
    phi: &TestFunction,
    level: u64,
    c_max: u64,
) -> Result<DensityReport> {
    validate_prime_level_args(1, 1, level, c_max)?;
    if c_max > level * level {
        return Err(Error::Domain(format!(
            "modulus cap {c_max} exceeds level² = {level}²"
        )));
    }
    let nf = level as f64;
    let log_n = nf.ln();
    let sigma = phi.sigma;
    let reach_f = nf.powf(sigma);
    if reach_f > REACH_BUDGET {
        return Err(Error::Budget(format!(
            "prime-power reach {reach_f:.3e} exceeds the {REACH_BUDGET:.0e} budget"
        )));
    }
    let reach = reach_f as u64;

    let gn = GnTable::build(level)?;
    let prime_leg = delta_full_with(h, &gn, 1, 1, c_max)?;
    let one_leg = delta_one(h, 1, 1, c_max)?;
    let star_w = 2.0 / (nf + 1.0);
    let omega = prime_leg.total - star_w * one_leg.total;
    let omega_tail = prime_leg.kloosterman_tail + star_w * one_leg.kloosterman_tail;
    let linear_bound = h.hplus_table()?.linear_bound;

    let pairs = prime_power_pairs(level, reach);
    let contributions = pairs
        .par_iter()
        .map(|&(p, nu, q)| -> Result<(f64, f64, f64, f64)> {
            let u = nu as f64 * (p as f64).ln() / log_n;
            let w = phi.phi_hat(u) * (p as f64).ln() / log_n;
            if w == 0.0 {
                return Ok((0.0, 0.0, 0.0, 0.0));
            }
            let x_base = 4.0 * PI * (q as f64).sqrt();
            let mut kl = 0.0;
            for k in 1..=c_max / level {
                let c = k * level;
                let s = kloosterman(&KloostermanQuery {
                    m: q as i64,
                    n: 1,
                    c,
                })?;
                if s != 0.0 {
                    kl += s / c as f64 * h.hplus(x_base / c as f64)?;
                }
            }
            let eis = eisenstein_term(h, &gn, q, 1)?;
            let tail = kloosterman_tail(q, 1, level, c_max, linear_bound);
            Ok((w * (q as f64).powf(-0.5), kl, eis, tail))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sum_kl = 0.0;
    let mut sum_eis = 0.0;
    let mut sum_tail = 0.0;
    for (wq, kl, eis, tail) in contributions {
        sum_kl += wq * kl;
        sum_eis += wq * eis;
        sum_tail += wq.abs() * tail;
    }

    let kloosterman_term = -2.0 * sum_kl / omega;
    let eisenstein_total = -2.0 * sum_eis / omega;
    let main_terms = phi.phi_hat(0.0) + 0.5 * phi.phi(0.0);
    let density_value = main_terms + kloosterman_term + eisenstein_total;
    let ks_prediction = katz_sarnak_functional(phi);
    // numerator truncation plus first-order propagation of the Ω* truncation
    let tail_bound = 2.0 * sum_tail / omega.abs()
        + 2.0 * (sum_kl + sum_eis).abs() * omega_tail / (omega * omega);
    Ok(DensityReport {
        level,
        sigma,
        c_max,
        main_terms,
        kloosterman_term,
        eisenstein_term: eisenstein_total,
        omega_star: omega,
        density_value,
        ks_prediction,
        deviation: (density_value - ks_prediction).abs(),
        tail_bound,
    })
}

/// The prime-power side of one form's explicit formula, split so the depth
/// ν ≥ 3 contribution can be inspected separately.
#[derive(Debug, Clone, Serialize)]
pub struct PrimeSumParts {
    pub total: f64,
    pub nu_ge3_subtotal: f64,
}

/// φ(0)/2 − 2 Σ_{p^ν ≤ X^σ} λ(p^ν) p^{−ν/2} φ̂(ν ln p / ln X) ln p / ln X,
/// with eigenvalues taken straight from the source (every queried index is
/// within coverage by the precondition).
pub fn prime_sum_parts(
    source: &HeckeEigenvalueSource,
    phi: &TestFunction,
    x: f64,
) -> Result<PrimeSumParts> {
    if !(x >= 2.0) {
        return Err(Error::Domain(format!("scale {x} must be at least 2")));
    }
    let reach_f = x.powf(phi.sigma);
    if reach_f > REACH_BUDGET {
        return Err(Error::Budget(format!(
            "prime-power reach {reach_f:.3e} exceeds the {REACH_BUDGET:.0e} budget"
        )));
    }
    let reach = reach_f.floor() as u64;
    if (source.coverage() as u64) < reach {
        return Err(Error::Insufficient(format!(
            "eigenvalues cover n ≤ {} but the sum needs n ≤ {reach}",
            source.coverage()
        )));
    }
    let log_x = x.ln();
    let mut total = 0.5 * phi.phi(0.0);
    let mut nu_ge3 = 0.0;
    for &p in &primes_up_to(reach as usize) {
        let mut nu = 1u32;
        loop {
            let q = (p as u128).pow(nu);
            if q > reach as u128 {
                break;
            }
            let u = nu as f64 * (p as f64).ln() / log_x;
            let w = phi.phi_hat(u) * (p as f64).ln() / log_x;
            if w != 0.0 {
                let term = -2.0 * source.lambda(q as u64)? * (q as f64).powf(-0.5) * w;
                total += term;
                if nu >= 3 {
                    nu_ge3 += term;
                }
            }
            nu += 1;
        }
    }
    Ok(PrimeSumParts {
        total,
        nu_ge3_subtotal: nu_ge3,
    })
}

pub fn prime_sum_side(
    source: &HeckeEigenvalueSource,
    phi: &TestFunction,
    x: f64,
) -> Result<f64> {
    Ok(prime_sum_parts(source, phi, x)?.total)
}

/// The error term in two character shapes: `bound_form` regroups the
/// weighted Kloosterman sums by conductor of the inducing primitive
/// character, and `reconstruction_diff` is the worst gap between the direct
/// modulus sums and their all-characters Gauss-sum rebuild. Both sides drop
/// prime powers sharing a factor with the modulus, which is where the
/// character identity holds.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorTermReport {
    pub level: u64,
    pub sigma: f64,
    pub c_max: u64,
    pub bound_form: f64,
    pub reconstruction_diff: f64,
}

pub fn error_term_character_form(
    h: &WeightFunction,
    phi: &TestFunction,
    level: u64,
    c_max: u64,
) -> Result<ErrorTermReport> {
    validate_prime_level_args(1, 1, level, c_max)?;
    let cap = c_max.min(level * level - 1);
    let nf = level as f64;
    let log_n = nf.ln();
    let reach_f = nf.powf(phi.sigma);
    if reach_f > REACH_BUDGET {
        return Err(Error::Budget(format!(
            "prime-power reach {reach_f:.3e} exceeds the {REACH_BUDGET:.0e} budget"
        )));
    }
    let reach = reach_f as u64;

    let mut weighted: Vec<(u64, f64)> = Vec::new();
    for (p, nu, q) in prime_power_pairs(level, reach) {
        let u = nu as f64 * (p as f64).ln() / log_n;
        let w = phi.phi_hat(u) * (p as f64).ln() / log_n;
        if w != 0.0 {
            weighted.push((q, w * (q as f64).powf(-0.5)));
        }
    }

    let cs: Vec<u64> = (1..=cap / level).map(|k| k * level).collect();
    let work: f64 = cs
        .iter()
        .map(|&c| (c as f64) * (c as f64) + 0.5 * (c as f64) * weighted.len() as f64)
        .sum();
    if work > CHARACTER_BUDGET {
        return Err(Error::Budget(format!(
            "character-form work {work:.3e} exceeds the {CHARACTER_BUDGET:.0e} budget"
        )));
    }

    let per_c = cs
        .par_iter()
        .map(|&c| -> Result<(f64, f64)> {
            let terms: Vec<(u64, f64)> = weighted
                .iter()
                .filter(|&&(q, _)| gcd_u64(q, c) == 1)
                .map(|&(q, a)| -> Result<(u64, f64)> {
                    Ok((q, a * h.hplus(4.0 * PI * (q as f64).sqrt() / c as f64)?))
                })
                .collect::<Result<Vec<_>>>()?;

            let mut direct = 0.0;
            for &(q, b) in &terms {
                direct += b
                    * kloosterman(&KloostermanQuery {
                        m: q as i64,
                        n: 1,
                        c,
                    })?
                    / c as f64;
            }

            let group = character_group(c)?;
            let phi_c = group.len() as f64;
            let mut rebuilt = Complex64::new(0.0, 0.0);
            for chi in &group {
                let tau = gauss_sum(chi)?;
                let mut inner = Complex64::new(0.0, 0.0);
                for &(q, b) in &terms {
                    inner += chi.eval(q).conj() * b;
                }
                rebuilt += tau * tau * inner;
            }
            rebuilt /= phi_c * c as f64;
            let diff = (rebuilt - Complex64::new(direct, 0.0)).norm();

            let mut bound = 0.0;
            for d in divisors(c) {
                if d == 1 {
                    continue;
                }
                let subgroup = character_group(d)?;
                let mut prim_sum = 0.0;
                for psi in &subgroup {
                    if !psi.is_primitive {
                        continue;
                    }
                    let mut inner = Complex64::new(0.0, 0.0);
                    for &(q, b) in &terms {
                        inner += psi.eval(q) * b;
                    }
                    prim_sum += inner.norm();
                }
                bound += d as f64 * prim_sum;
            }
            bound /= (c as f64) * phi_c;
            Ok((bound, diff))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut bound_form = 0.0;
    let mut reconstruction_diff = 0.0f64;
    for (b, d) in per_c {
        bound_form += b;
        reconstruction_diff = reconstruction_diff.max(d);
    }
    Ok(ErrorTermReport {
        level,
        sigma: phi.sigma,
        c_max: cap,
        bound_form,
        reconstruction_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmfdb::{synthetic_source, FormKind, HeckeEigenvalueSource};
    use crate::transforms::{gaussian_weight, make_test_triangle};

    fn flat_source(cov: usize) -> HeckeEigenvalueSource {
        HeckeEigenvalueSource {
            label: "flat".into(),
            kind: FormKind::Maass,
            spectral_parameter: 9.5,
            sign: 1,
            coefficients: vec![0.0; cov],
            zeros: vec![],
            fetched_at: "1970-01-01T00:00:00Z".into(),
        }
    }

    #[test]
    fn triangle_density_report_is_coherent() {
        let h = gaussian_weight();
        let phi = make_test_triangle(1.0).unwrap();
        let r = density_geometric(h, &phi, 101, 4040).unwrap();
        assert!((r.main_terms - 1.5).abs() < 1e-15);
        assert!((r.ks_prediction - 1.5).abs() < 1e-15);
        let implied = r.main_terms + r.kloosterman_term + r.eisenstein_term;
        assert!((r.density_value - implied).abs() < 1e-15);
        assert!(
            (r.deviation - (r.kloosterman_term + r.eisenstein_term).abs()).abs() < 1e-12,
            "deviation must be the non-main remainder"
        );
        assert!(r.deviation <= 0.25, "deviation {}", r.deviation);
        assert!(r.tail_bound > 0.0 && r.tail_bound.is_finite());
        assert!(r.omega_star > 0.0);

        let again = density_geometric(h, &phi, 101, 4040).unwrap();
        assert_eq!(
            r.density_value.to_bits(),
            again.density_value.to_bits(),
            "fixed reduction order must reproduce bits"
        );
    }

    #[test]
    fn doubling_the_cap_moves_less_than_the_tail_bound() {
        let h = gaussian_weight();
        let phi = make_test_triangle(1.0).unwrap();
        let a = density_geometric(h, &phi, 101, 4040).unwrap();
        let b = density_geometric(h, &phi, 101, 8080).unwrap();
        assert!(
            (a.density_value - b.density_value).abs() <= a.tail_bound,
            "moved {:.3e}, bound {:.3e}",
            (a.density_value - b.density_value).abs(),
            a.tail_bound
        );
    }

    #[test]
    fn support_sweep_stays_in_band() {
        let h = gaussian_weight();
        for sigma in [0.5, 1.5] {
            let phi = make_test_triangle(sigma).unwrap();
            let r = density_geometric(h, &phi, 101, 4040).unwrap();
            assert!(
                r.deviation <= 0.25,
                "sigma {sigma}: deviation {}",
                r.deviation
            );
        }
    }

    #[test]
    fn zero_eigenvalues_leave_half_the_delta_mass() {
        let phi = make_test_triangle(1.0).unwrap();
        let src = flat_source(200);
        let got = prime_sum_side(&src, &phi, 100.0).unwrap();
        let want = 0.5 * phi.phi(0.0);
        assert!((got - want).abs() < 1e-15, "flat eigenvalues give {got}");
    }

    #[test]
    fn coverage_shortfall_is_reported() {
        let phi = make_test_triangle(1.0).unwrap();
        let src = flat_source(10);
        match prime_sum_side(&src, &phi, 100.0) {
            Err(crate::error::Error::Insufficient(_)) => {}
            other => panic!("expected a coverage error, got {other:?}"),
        }
        assert!(prime_sum_side(&src, &phi, 1.5).is_err(), "scale below 2");
    }

    #[test]
    fn deep_prime_powers_stay_small() {
        let phi = make_test_triangle(1.0).unwrap();
        let src = synthetic_source("probe", 4000);
        for x in [50.0, 200.0] {
            let parts = prime_sum_parts(&src, &phi, x).unwrap();
            assert!(
                parts.nu_ge3_subtotal.abs() * x.ln() <= 2.0,
                "x = {x}: depth-3 subtotal {}",
                parts.nu_ge3_subtotal
            );
            assert!(parts.nu_ge3_subtotal.abs() < parts.total.abs() + 1.0);
        }
    }

    #[test]
    fn character_rebuild_matches_direct_sums() {
        let h = gaussian_weight();
        let phi = make_test_triangle(1.0).unwrap();
        let r = error_term_character_form(h, &phi, 101, 101).unwrap();
        assert!(
            r.reconstruction_diff <= 1e-8,
            "rebuild gap {}",
            r.reconstruction_diff
        );
        assert!(r.bound_form > 0.0 && r.bound_form.is_finite());
        assert_eq!(r.c_max, 101);
    }

    #[test]
    fn rejects_bad_density_arguments() {
        let h = gaussian_weight();
        let phi = make_test_triangle(1.0).unwrap();
        assert!(density_geometric(h, &phi, 100, 4000).is_err());
        assert!(density_geometric(h, &phi, 101, 50).is_err());
        assert!(density_geometric(h, &phi, 101, 101 * 101 + 1).is_err());
        let wide = make_test_triangle(1.7).unwrap();
        match density_geometric(h, &wide, 10007, 40 * 10007) {
            Err(crate::error::Error::Budget(_)) => {}
            other => panic!("expected a budget error, got {other:?}"),
        }
    }
}
