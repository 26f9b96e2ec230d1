//! Spectral-sum evaluation through the trace formula: diagonal, Eisenstein,
//! and Kloosterman terms for prime level and for level one, the star-basis
//! combination, and explicit truncation tails for every cut that is made.
//!
//! Sign convention: the full spectral sum equals
//! `diagonal + eisenstein + kloosterman`, where [`eisenstein_term`] already
//! carries its minus sign.

pub mod density;

use crate::error::{Error, Result};
use crate::ntcore::{divisors, factorize, is_prime, kloosterman, KloostermanQuery};
use crate::quad;
use crate::specfun::zeta_deflated;
use crate::transforms::hplus::hplus_integral_wide;
use crate::transforms::WeightFunction;
use num_complex::Complex64;
use once_cell::sync::OnceCell;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub use density::{
    density_geometric, error_term_character_form, prime_sum_parts, prime_sum_side, DensityReport,
    ErrorTermReport, PrimeSumParts,
};

/// Spectral integrals are cut at |t| = 30; the discarded range is covered by
/// [`spectral_cut_remainder`].
pub const SPECTRAL_T_CUT: f64 = 30.0;

/// Level-one sums over the modulus are capped here; the remainder is covered
/// by [`kloosterman_tail`].
pub(crate) const LEVEL_ONE_C_CAP: u64 = 20_000;

/// ζ(3/2)², an upper bound for Σ_{k≥1} τ(k) k^{−3/2}.
const TAU_32_FULL: f64 = 6.824_504_87;

/// (1/π²) ∫ t·h(t)·tanh(πt) dt over the real line, the diagonal term of the
/// spectral sum.
pub fn spectral_mass_integral(h: &WeightFunction) -> f64 {
    let f = |t: f64| t * h.eval_real(t) * (PI * t).tanh();
    2.0 / (PI * PI) * quad::integrate(&f, 0.0, SPECTRAL_T_CUT, 1e-12).value
}

/// Bound on the |t| > 30 part of the diagonal plus Eisenstein integrals.
///
/// The weight's decay class is |h(t)| ≤ M (1+t)^{−2−δ}; M is measured on the
/// probe window [30, 120] and the class carries it beyond. Against the
/// envelope (1+t)(ln(3+t))² — which covers both t·tanh(πt) and the
/// divisor-over-zeta kernel past the cut — the remainder integrates to
/// M · 121^{−δ} (L²/δ + 2L/δ² + 2/δ³) with L = ln 123, times the prefactor
/// 1/π² + 2τ(m)τ(n)/(π·level). Exactly zero for weights that underflow on
/// the probe window.
pub fn spectral_cut_remainder(h: &WeightFunction, m: u64, n: u64, level: u64) -> f64 {
    let delta = h.decay_delta;
    let mut m_env = 0.0f64;
    for i in 0..=900 {
        let t = SPECTRAL_T_CUT + 0.1 * i as f64;
        m_env = m_env.max(h.eval_real(t).abs() * (1.0 + t).powf(2.0 + delta));
    }
    let l = 123.0f64.ln();
    let tail = 121.0f64.powf(-delta)
        * (l * l / delta + 2.0 * l / (delta * delta) + 2.0 / (delta * delta * delta));
    let tau = |k: u64| divisors(k).len() as f64;
    let pref = 1.0 / (PI * PI) + 2.0 * tau(m) * tau(n) / (PI * level as f64);
    pref * m_env * tail
}

/// Bound on Σ_{k>K} τ(k) k^{−s} for s > 1, K ≥ 2, by partial summation
/// against Σ_{k≤x} τ(k) ≤ x ln x + x:
/// s·K^{1−s}·(ln K/(s−1) + 1/(s−1)² + 1/(s−1)). Strictly decreasing in K.
pub fn divisor_tail(k: f64, s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("tail exponent {s} must exceed 1")));
    }
    if !(k >= 2.0) {
        return Err(Error::Domain(format!("tail start {k} must be at least 2")));
    }
    let r = s - 1.0;
    Ok(s * k.powf(-r) * (k.ln() / r + 1.0 / (r * r) + 1.0 / r))
}

/// Bound on the modulus sum beyond c_max: each term is at most
/// τ(c) √gcd(m,n) c^{1/2} · c^{−1} · C·4π√(mn)/c with C the linear envelope
/// of the transform, giving 4πC √(mn·gcd) Σ_{c>c_max} τ(c) c^{−3/2} over the
/// admissible moduli. For prime level τ(k·level) ≤ 2τ(k) collapses the
/// congruence condition.
pub fn kloosterman_tail(m: u64, n: u64, level: u64, c_max: u64, linear_bound: f64) -> f64 {
    let g = crate::ntcore::gcd_u64(m, n);
    let scale = 4.0 * PI * linear_bound * ((m as f64) * (n as f64) * g as f64).sqrt();
    let (mult, k_start) = if level == 1 {
        (1.0, c_max as f64)
    } else {
        (2.0, c_max as f64 / level as f64)
    };
    let tau_sum = if k_start < 2.0 {
        TAU_32_FULL
    } else {
        divisor_tail(k_start, 1.5).expect("arguments validated above")
    };
    scale * mult * (level as f64).powf(-1.5) * tau_sum
}

const GN_DEG: usize = 20;
const GN_PANEL_W: f64 = 0.25;

/// Chebyshev table of t ↦ 1/|ζ^{(level)}(1+2it)|² on [0, 30], where ζ^{(N)}
/// drops the Euler factors at primes dividing the level. Panels are kept at
/// width 1/4: the function has poles at t = γ/2 ± i/4 for every zeta zero
/// 1/2 + iγ, so wider panels would put the Bernstein ellipse too close to a
/// pole for the target accuracy.
pub struct GnTable {
    pub level: u64,
    coeffs: Vec<[f64; GN_DEG]>,
}

fn gn_direct(level: u64, t: f64) -> Result<f64> {
    let z = zeta_deflated(level, Complex64::new(1.0, 2.0 * t))?;
    Ok(1.0 / z.norm_sqr())
}

impl GnTable {
    pub fn build(level: u64) -> Result<Self> {
        if level < 1 {
            return Err(Error::Domain("level must be at least 1".into()));
        }
        let n_panels = (SPECTRAL_T_CUT / GN_PANEL_W).round() as usize;
        let nodes: Vec<(usize, usize)> = (0..n_panels)
            .flat_map(|p| (0..GN_DEG).map(move |j| (p, j)))
            .collect();
        let vals = nodes
            .par_iter()
            .map(|&(p, j)| {
                let mid = (p as f64 + 0.5) * GN_PANEL_W;
                let theta = PI * (j as f64 + 0.5) / GN_DEG as f64;
                gn_direct(level, mid + 0.5 * GN_PANEL_W * theta.cos())
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut coeffs = Vec::with_capacity(n_panels);
        for p in 0..n_panels {
            let v = &vals[p * GN_DEG..(p + 1) * GN_DEG];
            let mut c = [0.0f64; GN_DEG];
            for (k, ck) in c.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, vj) in v.iter().enumerate() {
                    acc += vj * (PI * k as f64 * (j as f64 + 0.5) / GN_DEG as f64).cos();
                }
                *ck = 2.0 * acc / GN_DEG as f64;
            }
            c[0] *= 0.5;
            coeffs.push(c);
        }
        let table = GnTable { level, coeffs };

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(131);
        for _ in 0..40 {
            let t = rng.gen_range(0.01..SPECTRAL_T_CUT);
            let want = gn_direct(level, t)?;
            let got = table.eval(t)?;
            if (got - want).abs() > 1e-9 * (1.0 + want.abs()) {
                return Err(Error::Invariant(format!(
                    "zeta-kernel table error {:.3e} at t = {t}",
                    (got - want).abs()
                )));
            }
        }
        Ok(table)
    }

    /// The tabulated kernel at |t|; the function is even.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if !(t <= SPECTRAL_T_CUT) {
            return Err(Error::Domain(format!("argument {t} outside [0, 30]")));
        }
        let p = ((t / GN_PANEL_W) as usize).min(self.coeffs.len() - 1);
        let mid = (p as f64 + 0.5) * GN_PANEL_W;
        let tau = (t - mid) / (0.5 * GN_PANEL_W);
        let c = &self.coeffs[p];
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for k in (1..GN_DEG).rev() {
            let b0 = 2.0 * tau * b1 - b2 + c[k];
            b2 = b1;
            b1 = b0;
        }
        Ok(tau * b1 - b2 + c[0])
    }
}

/// σ_{2it}(k)/k^{it} as a real product: for each p^a ‖ k the factor is the
/// Dirichlet kernel Σ_{j=0}^{a} e^{i(2j−a)t ln p} = U_a(cos(t ln p)), with
/// U_a the degree-a Chebyshev polynomial of the second kind. Empty
/// factorization (k = 1) gives 1.
pub(crate) fn sigma_kernel(factors: &[(u64, u32)], t: f64) -> f64 {
    factors
        .iter()
        .map(|&(p, a)| chebyshev_u(a, (t * (p as f64).ln()).cos()))
        .product()
}

fn chebyshev_u(a: u32, c: f64) -> f64 {
    let mut prev = 1.0;
    let mut cur = 2.0 * c;
    match a {
        0 => 1.0,
        1 => cur,
        _ => {
            for _ in 2..=a {
                let next = 2.0 * c * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// The (signed) continuous-spectrum term:
/// −pref ∫ h(t) σ_{2it}(m)σ_{2it}(n)/((mn)^{it} |ζ^{(N)}(1+2it)|²) dt over
/// the real line, with pref = (1+1/N)/(πN) for prime level N and 1/π for
/// level one.
pub fn eisenstein_term(h: &WeightFunction, gn: &GnTable, m: u64, n: u64) -> Result<f64> {
    if m < 1 || n < 1 {
        return Err(Error::Domain("indices must be positive".into()));
    }
    if gn.level > 1 && (m % gn.level == 0 || n % gn.level == 0) {
        return Err(Error::Domain(format!(
            "indices ({m}, {n}) must be coprime to the level {}",
            gn.level
        )));
    }
    let fm = factorize(m);
    let fnn = factorize(n);
    let nf = gn.level as f64;
    let pref = if gn.level == 1 {
        1.0 / PI
    } else {
        (1.0 + 1.0 / nf) / (PI * nf)
    };
    let f = |t: f64| -> f64 {
        h.eval_real(t)
            * gn.eval(t).expect("integration stays inside the table range")
            * sigma_kernel(&fm, t)
            * sigma_kernel(&fnn, t)
    };
    let q = quad::integrate(&f, 0.0, SPECTRAL_T_CUT, 1e-11);
    Ok(-pref * 2.0 * q.value)
}

/// One fully evaluated geometric side, term by term, with bounds on what the
/// two cuts (modulus cap, spectral cap) discarded.
#[derive(Debug, Clone, Serialize)]
pub struct GeometricSideReport {
    pub level: u64,
    pub m: u64,
    pub n: u64,
    pub c_max: u64,
    pub diagonal: f64,
    pub eisenstein: f64,
    pub kloosterman: f64,
    pub total: f64,
    pub kloosterman_tail: f64,
    pub spectral_remainder: f64,
}

pub(crate) fn validate_prime_level_args(m: u64, n: u64, level: u64, c_max: u64) -> Result<()> {
    if !is_prime(level) {
        return Err(Error::Domain(format!("level {level} must be prime")));
    }
    if m < 1 || n < 1 {
        return Err(Error::Domain("indices must be positive".into()));
    }
    if m % level == 0 || n % level == 0 {
        return Err(Error::Domain(format!(
            "indices ({m}, {n}) must be coprime to the level {level}"
        )));
    }
    if (m as u128) * (n as u128) >= (level as u128) * (level as u128) {
        return Err(Error::Domain(format!(
            "index product {m}·{n} must stay below level² = {level}²"
        )));
    }
    if c_max < level {
        return Err(Error::Domain(format!(
            "modulus cap {c_max} admits no modulus at level {level}"
        )));
    }
    Ok(())
}

/// Geometric side of the spectral sum at prime level: moduli run over
/// multiples of the level up to c_max. The index constraint mn < level²
/// keeps every transform argument 4π√(mn)/c below 4π.
pub fn delta_full(
    h: &WeightFunction,
    m: u64,
    n: u64,
    level: u64,
    c_max: u64,
) -> Result<GeometricSideReport> {
    validate_prime_level_args(m, n, level, c_max)?;
    let gn = GnTable::build(level)?;
    delta_full_with(h, &gn, m, n, c_max)
}

/// Same as [`delta_full`] but reusing a prebuilt zeta-kernel table, for
/// callers that sweep many index pairs at one level.
pub fn delta_full_with(
    h: &WeightFunction,
    gn: &GnTable,
    m: u64,
    n: u64,
    c_max: u64,
) -> Result<GeometricSideReport> {
    let level = gn.level;
    validate_prime_level_args(m, n, level, c_max)?;
    let diagonal = if m == n { spectral_mass_integral(h) } else { 0.0 };
    let eisenstein = eisenstein_term(h, gn, m, n)?;
    let x_base = 4.0 * PI * ((m as f64) * (n as f64)).sqrt();
    let ks: Vec<u64> = (1..=c_max / level).collect();
    let terms = ks
        .par_iter()
        .map(|&k| -> Result<f64> {
            let c = k * level;
            let s = kloosterman(&KloostermanQuery {
                m: m as i64,
                n: n as i64,
                c,
            })?;
            if s == 0.0 {
                return Ok(0.0);
            }
            Ok(s / c as f64 * h.hplus(x_base / c as f64)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let kl: f64 = terms.iter().sum();
    let linear_bound = h.hplus_table()?.linear_bound;
    Ok(GeometricSideReport {
        level,
        m,
        n,
        c_max,
        diagonal,
        eisenstein,
        kloosterman: kl,
        total: diagonal + eisenstein + kl,
        kloosterman_tail: kloosterman_tail(m, n, level, c_max, linear_bound),
        spectral_remainder: spectral_cut_remainder(h, m, n, level),
    })
}

static S11: OnceCell<Vec<f64>> = OnceCell::new();

/// S(1, 1; c) for c = 1..=LEVEL_ONE_C_CAP, built once per process.
fn s11_table() -> Result<&'static Vec<f64>> {
    S11.get_or_try_init(|| {
        (1..=LEVEL_ONE_C_CAP)
            .into_par_iter()
            .map(|c| kloosterman(&KloostermanQuery { m: 1, n: 1, c }))
            .collect()
    })
}

/// Geometric side of the level-one spectral sum: all moduli c ≥ 1
/// participate, so the transform argument reaches 4π√(mn) at c = 1 and the
/// wide-window evaluator takes over where the table ends. The index product
/// is capped at 4 to keep that argument inside the wide window.
pub fn delta_one(h: &WeightFunction, m: u64, n: u64, c_max: u64) -> Result<GeometricSideReport> {
    if m < 1 || n < 1 {
        return Err(Error::Domain("indices must be positive".into()));
    }
    if m * n > 4 {
        return Err(Error::Domain(format!(
            "index product {m}·{n} exceeds 4; the level-one evaluator only \
             covers transform arguments up to 8π"
        )));
    }
    if c_max < 1 {
        return Err(Error::Domain("modulus cap must be at least 1".into()));
    }
    let cap = c_max.min(LEVEL_ONE_C_CAP);
    let gn = GnTable::build(1)?;
    let diagonal = if m == n { spectral_mass_integral(h) } else { 0.0 };
    let eisenstein = eisenstein_term(h, &gn, m, n)?;
    let x_base = 4.0 * PI * ((m as f64) * (n as f64)).sqrt();
    let wide_edge = 4.0 * PI * (1.0 - 1e-9);
    let hval = |x: f64| -> Result<f64> {
        if x < wide_edge {
            h.hplus(x)
        } else {
            hplus_integral_wide(h, x)
        }
    };
    let mut kl = 0.0;
    if (m, n) == (1, 1) {
        let table = s11_table()?;
        for c in 1..=cap {
            let s = table[(c - 1) as usize];
            if s != 0.0 {
                kl += s / c as f64 * hval(x_base / c as f64)?;
            }
        }
    } else {
        for c in 1..=cap {
            let s = kloosterman(&KloostermanQuery {
                m: m as i64,
                n: n as i64,
                c,
            })?;
            if s != 0.0 {
                kl += s / c as f64 * hval(x_base / c as f64)?;
            }
        }
    }
    let linear_bound = h.hplus_table()?.linear_bound;
    Ok(GeometricSideReport {
        level: 1,
        m,
        n,
        c_max: cap,
        diagonal,
        eisenstein,
        kloosterman: kl,
        total: diagonal + eisenstein + kl,
        kloosterman_tail: kloosterman_tail(m, n, 1, cap, linear_bound),
        spectral_remainder: spectral_cut_remainder(h, m, n, 1),
    })
}

/// The star-basis spectral sum: the prime-level sum minus 2/(level+1) times
/// the level-one sum at the same indices.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaStarReport {
    pub prime_level: GeometricSideReport,
    pub level_one: GeometricSideReport,
    pub value: f64,
    pub tail_bound: f64,
}

pub fn delta_star(
    h: &WeightFunction,
    m: u64,
    n: u64,
    level: u64,
    c_max: u64,
) -> Result<DeltaStarReport> {
    let prime_level = delta_full(h, m, n, level, c_max)?;
    let level_one = delta_one(h, m, n, c_max)?;
    let w = 2.0 / (level as f64 + 1.0);
    let value = prime_level.total - w * level_one.total;
    let tail_bound = prime_level.kloosterman_tail + w * level_one.kloosterman_tail;
    Ok(DeltaStarReport {
        prime_level,
        level_one,
        value,
        tail_bound,
    })
}

/// The normalization mass at indices (1,1): the geometric star-basis value
/// against its integral form, mass · (level−1)/(level+1). Their gap is the
/// off-diagonal residue of the formula and decays like 1/level.
#[derive(Debug, Clone, Serialize)]
pub struct OmegaStarReport {
    pub level: u64,
    pub c_max: u64,
    pub geometric: f64,
    pub integral: f64,
    pub difference: f64,
    pub tail_bound: f64,
}

pub fn omega_star(h: &WeightFunction, level: u64, c_max: u64) -> Result<OmegaStarReport> {
    let star = delta_star(h, 1, 1, level, c_max)?;
    let nf = level as f64;
    let integral = spectral_mass_integral(h) * (nf - 1.0) / (nf + 1.0);
    Ok(OmegaStarReport {
        level,
        c_max,
        geometric: star.value,
        integral,
        difference: star.value - integral,
        tail_bound: star.tail_bound,
    })
}

/// Hecke eigenvalue at a prime power from the eigenvalue at the prime:
/// X_ν = λ X_{ν−1} − X_{ν−2} with X_0 = 1, X_1 = λ; at ramified primes the
/// relation degenerates to λ^ν.
pub fn hecke_power(lambda_p: f64, nu: u32, ramified: bool) -> f64 {
    if ramified {
        return lambda_p.powi(nu as i32);
    }
    let mut prev = 1.0;
    let mut cur = lambda_p;
    match nu {
        0 => 1.0,
        1 => lambda_p,
        _ => {
            for _ in 2..=nu {
                let next = lambda_p * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntcore::sigma_2it;
    use crate::specfun::zeta;
    use crate::transforms::{gaussian_weight, make_weight_gaussian};

    // 40-digit quadrature of (2/π²)∫₀^∞ t e^{−t²} tanh(πt) dt.
    const MASS_PIN: f64 = 0.094_063_591_558_318_470_6;
    // 25-digit quadrature of ∫₀^∞ e^{−t²} |ζ(1+2it)|^{−2} dt.
    const I11_PIN: f64 = 0.857_792_974_437_911_577;

    #[test]
    fn mass_integral_matches_reference() {
        let got = spectral_mass_integral(gaussian_weight());
        assert!((got - MASS_PIN).abs() < 1e-12, "mass = {got}");
    }

    #[test]
    fn cut_remainder_vanishes_for_the_gaussian() {
        assert_eq!(spectral_cut_remainder(gaussian_weight(), 1, 1, 101), 0.0);
    }

    #[test]
    fn divisor_tail_shrinks_and_rejects_bad_arguments() {
        let t10 = divisor_tail(10.0, 1.5).unwrap();
        let t100 = divisor_tail(100.0, 1.5).unwrap();
        let t1000 = divisor_tail(1000.0, 1.5).unwrap();
        assert!(t10 > t100 && t100 > t1000 && t1000 > 0.0);
        assert!(divisor_tail(1.0, 1.5).is_err());
        assert!(divisor_tail(10.0, 1.0).is_err());
    }

    #[test]
    fn kloosterman_tail_decreases_in_the_cap() {
        let c = 0.41;
        let a = kloosterman_tail(1, 1, 101, 202, c);
        let b = kloosterman_tail(1, 1, 101, 404, c);
        let d = kloosterman_tail(1, 1, 101, 808, c);
        assert!(a > b && b > d && d > 0.0);
    }

    #[test]
    fn zeta_kernel_table_matches_direct_evaluation() {
        let g1 = GnTable::build(1).unwrap();
        let z = zeta(Complex64::new(1.0, 1.0)).unwrap();
        let want = 1.0 / z.norm_sqr();
        let got = g1.eval(0.5).unwrap();
        assert!((got - want).abs() < 1e-10, "got {got}, want {want}");
        assert!(g1.eval(-0.5).unwrap() == got, "kernel must be even");
        assert!(g1.eval(31.0).is_err());

        let g101 = GnTable::build(101).unwrap();
        let got101 = g101.eval(2.0).unwrap();
        let z101 = zeta_deflated(101, Complex64::new(1.0, 4.0)).unwrap();
        assert!((got101 - 1.0 / z101.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn sigma_kernel_matches_the_divisor_sum() {
        for &m in &[12u64, 360, 1024, 97] {
            let f = factorize(m);
            for &t in &[0.3, 1.7, 9.2] {
                let direct = sigma_2it(m, t).unwrap()
                    * Complex64::from_polar(1.0, -t * (m as f64).ln());
                assert!(direct.im.abs() < 1e-9 * (1.0 + direct.re.abs()));
                let got = sigma_kernel(&f, t);
                assert!(
                    (got - direct.re).abs() < 1e-9 * (1.0 + direct.re.abs()),
                    "m = {m}, t = {t}: {got} vs {}",
                    direct.re
                );
            }
        }
    }

    #[test]
    fn eisenstein_term_matches_reference_values() {
        let h = gaussian_weight();
        let g1 = GnTable::build(1).unwrap();
        let eis = eisenstein_term(h, &g1, 1, 1).unwrap();
        assert!(
            (eis + 2.0 * I11_PIN / PI).abs() < 1e-8,
            "level-one value {eis}"
        );
        let g101 = GnTable::build(101).unwrap();
        let eis101 = eisenstein_term(h, &g101, 1, 1).unwrap();
        assert!((eis101 + 5.460_825e-3).abs() < 1e-8, "level-101 {eis101}");
        assert!(eisenstein_term(h, &g101, 101, 1).is_err());
    }

    #[test]
    fn eisenstein_scaling_between_levels() {
        let h = gaussian_weight();
        let a = delta_full(h, 1, 1, 101, 1010).unwrap().eisenstein;
        let b = delta_full(h, 1, 1, 1009, 10090).unwrap().eisenstein;
        let ratio = a / b;
        assert!(
            (9.9..10.3).contains(&ratio),
            "eisenstein ratio 101/1009 = {ratio}"
        );
    }

    // The lowest level-one eigenvalue sits near t = 9.53, so a unit-width
    // Gaussian weight gives the spectral side ~ e^{-90}: the geometric side
    // must cancel to numerical truncation noise.
    #[test]
    fn level_one_spectral_sum_is_invisible_to_the_gaussian() {
        let r = delta_one(gaussian_weight(), 1, 1, LEVEL_ONE_C_CAP).unwrap();
        assert!(
            r.total.abs() < 1e-3,
            "level-one sum {} (diag {}, eis {}, kloosterman {})",
            r.total,
            r.diagonal,
            r.eisenstein,
            r.kloosterman
        );
    }

    #[test]
    fn diagonal_dominates_at_large_level() {
        let h = gaussian_weight();
        let r = delta_full(h, 1, 1, 10007, 40 * 10007).unwrap();
        assert!((r.total - r.diagonal).abs() < 1e-2);
        assert!(r.kloosterman.abs() < 1e-2);
        assert!(r.eisenstein.abs() < 1e-3);
        let off = delta_full(h, 2, 3, 10007, 40 * 10007).unwrap();
        assert_eq!(off.diagonal, 0.0);
    }

    #[test]
    fn geometric_side_symmetric_in_the_indices() {
        let h = gaussian_weight();
        let a = delta_full(h, 2, 3, 101, 2020).unwrap();
        let b = delta_full(h, 3, 2, 101, 2020).unwrap();
        assert!((a.kloosterman - b.kloosterman).abs() < 1e-12);
        assert!((a.eisenstein - b.eisenstein).abs() < 1e-12);
    }

    #[test]
    fn geometric_side_linear_in_the_weight() {
        let h1 = make_weight_gaussian();
        let h2 = crate::transforms::WeightFunction::new(14.0, 1.0, |s: Complex64| {
            (1.0 + s * s) * (-s * s).exp()
        })
        .unwrap();
        let h3 = {
            let (a, b) = (h1.clone(), h2.clone());
            crate::transforms::WeightFunction::new(14.0, 1.0, move |s: Complex64| {
                0.7 * a.eval(s) + 0.3 * b.eval(s)
            })
            .unwrap()
        };
        let r1 = delta_full(&h1, 2, 1, 101, 1010).unwrap();
        let r2 = delta_full(&h2, 2, 1, 101, 1010).unwrap();
        let r3 = delta_full(&h3, 2, 1, 101, 1010).unwrap();
        let combo = 0.7 * r1.total + 0.3 * r2.total;
        assert!(
            (r3.total - combo).abs() < 1e-9,
            "{} vs {}",
            r3.total,
            combo
        );
    }

    #[test]
    fn star_basis_composition_and_shrinking_gap() {
        let h = gaussian_weight();
        let s = delta_star(h, 1, 1, 101, 4040).unwrap();
        let w = 2.0 / 102.0;
        let want = s.prime_level.total - w * s.level_one.total;
        assert!((s.value - want).abs() < 1e-15);

        let o101 = omega_star(h, 101, 4040).unwrap();
        let o1009 = omega_star(h, 1009, 40360).unwrap();
        assert!(o101.difference.abs() < 0.02, "gap {}", o101.difference);
        assert!(o1009.difference.abs() < 2.5e-3, "gap {}", o1009.difference);
        assert!(o1009.difference.abs() < o101.difference.abs());
    }

    #[test]
    fn hecke_power_matches_the_root_expansion() {
        for &theta in &[0.4f64, 1.1, 2.8] {
            let lam = 2.0 * theta.cos();
            for nu in 0..=10u32 {
                // sin((ν+1)θ)/sin θ is the unramified eigenvalue at p^ν
                let want = ((nu as f64 + 1.0) * theta).sin() / theta.sin();
                let got = hecke_power(lam, nu, false);
                assert!((got - want).abs() < 1e-9, "nu = {nu}: {got} vs {want}");
            }
        }
        assert_eq!(hecke_power(0.7, 3, true), 0.7f64.powi(3));
    }

    #[test]
    fn rejects_arguments_outside_the_formula_domain() {
        let h = gaussian_weight();
        assert!(delta_full(h, 1, 1, 100, 4000).is_err(), "composite level");
        assert!(delta_full(h, 101, 1, 101, 4040).is_err(), "index at level");
        assert!(delta_full(h, 102, 102, 101, 4040).is_err(), "product cap");
        assert!(delta_full(h, 1, 1, 101, 100).is_err(), "empty modulus run");
        assert!(delta_one(h, 3, 3, 1000).is_err(), "wide-window cap");
        assert!(delta_one(h, 0, 1, 1000).is_err(), "zero index");
    }
}
