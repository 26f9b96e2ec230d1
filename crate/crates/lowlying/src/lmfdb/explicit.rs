//! Per-form consistency check between a sum over low zeros and the
//! Hecke-eigenvalue prime sum it should reproduce. The two sides agree up
//! to an archimedean term of size O(log(|t_f| + 2)/log X) and the tail of
//! zeros beyond what the data source carries; the report quantifies the
//! latter so callers can budget the former.

use super::HeckeEigenvalueSource;
use crate::error::{Error, Result};
use crate::kuznetsov::prime_sum_side;
use crate::quad::gauss_legendre;
use crate::transforms::TestFunction;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ExplicitFormulaReport {
    pub label: String,
    pub x: f64,
    /// Σ over stored ordinates γ of φ(γ·log x/2π) + φ(−γ·log x/2π).
    pub zero_side: f64,
    /// φ(0)/2 − 2 Σ_{p,ν} λ(p^ν) p^{−ν/2} φ̂(ν log p/log x)(log p/log x).
    pub prime_side: f64,
    pub gap: f64,
    /// Majorant for the zero-side mass lost past the last stored ordinate.
    pub truncation_estimate: f64,
    pub zeros_used: usize,
}

const MIN_ZEROS: usize = 10;
/// Integration horizon past the last zero. For admissible φ (quadratic
/// decay or faster) the mass beyond γ_max + 500 is below 1e-5 of the
/// estimate itself.
const TAIL_SPAN: usize = 500;

/// Upper bound on the zero-counting density of L(s, f) at height γ,
/// zeros per unit length on the critical line.
fn zero_density_cap(t_f: f64, gamma: f64) -> f64 {
    (3.0 + t_f.abs() + gamma).ln() / std::f64::consts::PI
}

fn truncation_tail(phi: &TestFunction, t_f: f64, gamma_max: f64, scale: f64) -> f64 {
    let (xs, ws) = gauss_legendre(10);
    let mut acc = 0.0;
    for k in 0..TAIL_SPAN {
        let lo = gamma_max + k as f64;
        let mut panel = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            let g = lo + 0.5 * (x + 1.0);
            panel += w * phi.phi(g * scale).abs() * zero_density_cap(t_f, g);
        }
        acc += 0.5 * panel;
    }
    2.0 * acc
}

/// Compares Σ_γ φ(γ·log x/2π), summed over the zeros the source stores
/// (symmetrized in ±γ), against the prime sum built from the same source's
/// Hecke eigenvalues. Needs at least ten stored zeros and coefficient
/// coverage out to x^σ.
pub fn explicit_formula_check(
    source: &HeckeEigenvalueSource,
    phi: &TestFunction,
    x: f64,
) -> Result<ExplicitFormulaReport> {
    if source.zeros.len() < MIN_ZEROS {
        return Err(Error::Insufficient(format!(
            "{}: {} stored zeros, need {MIN_ZEROS}",
            source.label,
            source.zeros.len()
        )));
    }
    let prime_side = prime_sum_side(source, phi, x)?;

    let scale = x.ln() / (2.0 * std::f64::consts::PI);
    let mut zero_side = 0.0;
    let mut gamma_max = 0.0f64;
    for &g in &source.zeros {
        if g <= 0.0 {
            return Err(Error::Invariant(format!(
                "{}: nonpositive zero ordinate {g}",
                source.label
            )));
        }
        zero_side += phi.phi(g * scale) + phi.phi(-g * scale);
        gamma_max = gamma_max.max(g);
    }
    let truncation_estimate =
        truncation_tail(phi, source.spectral_parameter, gamma_max, scale);

    Ok(ExplicitFormulaReport {
        label: source.label.clone(),
        x,
        zero_side,
        prime_side,
        gap: (zero_side - prime_side).abs(),
        truncation_estimate,
        zeros_used: source.zeros.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmfdb::synthetic_source;
    use crate::transforms::make_test_triangle;

    #[test]
    fn needs_ten_zeros_and_coverage() {
        let phi = make_test_triangle(1.0).unwrap();
        let mut src = synthetic_source("few", 200);
        src.zeros = vec![5.0; 9];
        assert!(matches!(
            explicit_formula_check(&src, &phi, 100.0),
            Err(Error::Insufficient(_))
        ));

        // enough zeros, not enough coefficients for x^sigma = 400
        let mut short = synthetic_source("short", 200);
        short.zeros = (1..=12).map(|k| k as f64).collect();
        assert!(matches!(
            explicit_formula_check(&short, &phi, 400.0),
            Err(Error::Insufficient(_))
        ));

        let mut neg = synthetic_source("neg", 200);
        neg.zeros = (1..=12).map(|k| k as f64).collect();
        neg.zeros[3] = -2.0;
        assert!(matches!(
            explicit_formula_check(&neg, &phi, 100.0),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn zero_side_matches_a_hand_loop() {
        let phi = make_test_triangle(1.0).unwrap();
        let mut src = synthetic_source("hand", 200);
        src.zeros = (1..=15).map(|k| 0.8 * k as f64).collect();
        let report = explicit_formula_check(&src, &phi, 100.0).unwrap();

        let scale = 100.0f64.ln() / (2.0 * std::f64::consts::PI);
        let want: f64 = src
            .zeros
            .iter()
            .map(|&g| phi.phi(g * scale) + phi.phi(-g * scale))
            .sum();
        assert!((report.zero_side - want).abs() < 1e-12);
        assert_eq!(report.zeros_used, 15);
        assert!((report.gap - (report.zero_side - report.prime_side).abs()).abs() < 1e-15);
        assert!(report.truncation_estimate > 0.0);
    }

    #[test]
    fn more_zeros_shrink_the_truncation_estimate() {
        let phi = make_test_triangle(1.0).unwrap();
        let mut short = synthetic_source("trunc-short", 200);
        short.zeros = (1..=10).map(|k| k as f64).collect();
        let mut long = synthetic_source("trunc-long", 200);
        long.zeros = (1..=20).map(|k| k as f64).collect();

        let a = explicit_formula_check(&short, &phi, 100.0).unwrap();
        let b = explicit_formula_check(&long, &phi, 100.0).unwrap();
        assert!(b.truncation_estimate < a.truncation_estimate);
        // the extra zeros carry exactly the mass the shorter run budgeted
        assert!((b.zero_side - a.zero_side).abs() <= a.truncation_estimate + 1e-12);
    }
}
