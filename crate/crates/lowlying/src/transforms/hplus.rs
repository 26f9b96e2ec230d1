//! The H⁺ transform of a spectral weight: the two-sided integral
//! (2i/π) ∫ h(t) J_{2it}(x) t/cosh(πt) dt, its residue series, and a
//! panelized Chebyshev table for bulk evaluation.

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::bessel::{bessel_j_imag_unrestricted, bessel_j_integer};
use crate::transforms::WeightFunction;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Truncation of the spectral integral. Every admitted weight decays at
/// least like (1+|s|)^{-2-δ}, and the Gaussian default is < 1e-300 here.
const T_CUT: f64 = 30.0;

/// Below this the table panels lose relative accuracy; callers fall back
/// to the direct integral.
pub(crate) const TABLE_X_MIN: f64 = 1e-6;

fn check_domain(x: f64) -> Result<()> {
    if x > 0.0 && x < 4.0 * PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("argument {x} outside (0, 4π)")))
    }
}

/// H⁺(x) by adaptive quadrature of the defining integral. The exact value
/// is real; the quadrature's imaginary residue must stay below 1e-9 and is
/// discarded.
pub fn hplus_integral(h: &WeightFunction, x: f64) -> Result<f64> {
    check_domain(x)?;
    let f = |t: f64| -> Complex64 {
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let j = bessel_j_imag_unrestricted(t, x)
            .expect("imaginary-order series converges on (0, 4π)");
        h.eval(Complex64::new(t, 0.0)) * j * (t / (PI * t).cosh())
    };
    // unit panels keep the quadrature from converging on the near-zero
    // samples outside the weight's envelope
    let mut acc = Complex64::new(0.0, 0.0);
    let mut a = -T_CUT;
    while a < T_CUT - 0.5 {
        acc += quad::integrate(&f, a, a + 1.0, 2e-14).value;
        a += 1.0;
    }
    let val = Complex64::new(0.0, 2.0 / PI) * acc;
    if val.im.abs() > 1e-9 {
        return Err(Error::Invariant(format!(
            "imaginary residue {:.3e} of H+({x})",
            val.im
        )));
    }
    Ok(val.re)
}

/// Bessel arguments past 4π arise only from the level-1 correction with
/// small mn; by x = 26 the power-series evaluation has lost ~1e-6 absolute
/// accuracy to cancellation, which those callers budget for.
pub(crate) const WIDE_X_MAX: f64 = 26.0;

/// H⁺(x) on the wide window (0, WIDE_X_MAX] by fixed composite
/// Gauss–Legendre panels. A fixed rule is required here: past 4π the
/// series noise (~1e-6) sits far above the adaptive estimator's tolerance
/// and would trigger unbounded subdivision. The ±t fold makes the result
/// exactly real: H⁺(x) = −(4/π) Im ∫₀^∞ h(t) J_{2it}(x) t sech(πt) dt.
pub(crate) fn hplus_integral_wide(h: &WeightFunction, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= WIDE_X_MAX) {
        return Err(Error::Domain(format!(
            "argument {x} outside the wide window (0, {WIDE_X_MAX}]"
        )));
    }
    let (gx, gw) = quad::gauss_legendre(30);
    let mut acc = 0.0;
    for p in 0..T_CUT as usize {
        let mid = p as f64 + 0.5;
        for (xi, wi) in gx.iter().zip(&gw) {
            let t = mid + 0.5 * xi;
            let j = bessel_j_imag_unrestricted(t, x)
                .expect("imaginary-order series converges for all x");
            let f = h.eval(Complex64::new(t, 0.0)) * j * (t / (PI * t).cosh());
            acc += 0.5 * wi * f.im;
        }
    }
    Ok(-(4.0 / PI) * acc)
}

/// Terms (4/π)(−1)^k (k+1/2) h(−i(k+1/2)) J_{2k+1}(x) of the residue
/// series, k = 0 .. floor(A)−1.
pub(crate) fn hplus_series_terms(h: &WeightFunction, x: f64) -> Result<Vec<f64>> {
    check_domain(x)?;
    let n = h.strip_height.floor() as usize;
    let mut out = Vec::with_capacity(n);
    let mut sign = 1.0;
    for k in 0..n {
        let half = k as f64 + 0.5;
        let hv = h.eval(Complex64::new(0.0, -half));
        if hv.im.abs() > 1e-9 * (1.0 + hv.norm()) {
            return Err(Error::Invariant(format!(
                "weight has nonreal value at -i({half})"
            )));
        }
        let j = bessel_j_integer(2 * k as u32 + 1, x)?;
        out.push(sign * (4.0 / PI) * half * hv.re * j);
        sign = -sign;
    }
    Ok(out)
}

/// Residue-series form of H⁺ with floor(A) terms, obtained by shifting the
/// spectral contour past the poles of 1/cosh(πt). The omitted remainder
/// scales like x^{2 floor(A)}, but its constant involves h on the line
/// Im t = −A; for the Gaussian weight that is e^{A²}, so the series is a
/// divergent asymptotic expansion: accurate for x below ~0.02 and useless
/// well before x = 1.
pub fn hplus_series(h: &WeightFunction, x: f64) -> Result<f64> {
    Ok(hplus_series_terms(h, x)?.iter().sum())
}

const CHEB_DEG: usize = 24;

/// Chebyshev panels in ln x covering [TABLE_X_MIN, 4π), degree 23 each,
/// validated against the direct integral at seeded points after the build.
#[derive(Debug, Clone)]
pub struct HplusTable {
    y_min: f64,
    panel_w: f64,
    coeffs: Vec<[f64; CHEB_DEG]>,
    /// max |H⁺(x)| / x over the build nodes; H⁺ vanishes linearly at 0 and
    /// the node set brackets the supremum, so C·x with this C is a usable
    /// envelope for truncation-tail estimates.
    pub linear_bound: f64,
}

impl HplusTable {
    pub(crate) fn build(h: &WeightFunction) -> Result<Self> {
        let y_min = TABLE_X_MIN.ln();
        let y_max = (4.0 * PI).ln();
        let n_panels = ((y_max - y_min) / 0.45).ceil() as usize;
        let panel_w = (y_max - y_min) / n_panels as f64;

        let nodes: Vec<(usize, usize)> = (0..n_panels)
            .flat_map(|p| (0..CHEB_DEG).map(move |j| (p, j)))
            .collect();
        let vals = nodes
            .par_iter()
            .map(|&(p, j)| {
                let mid = y_min + (p as f64 + 0.5) * panel_w;
                let theta = PI * (j as f64 + 0.5) / CHEB_DEG as f64;
                let y = mid + 0.5 * panel_w * theta.cos();
                hplus_integral(h, y.exp())
            })
            .collect::<Result<Vec<f64>>>()?;

        let linear_bound = nodes
            .iter()
            .zip(&vals)
            .map(|(&(p, j), v)| {
                let mid = y_min + (p as f64 + 0.5) * panel_w;
                let theta = PI * (j as f64 + 0.5) / CHEB_DEG as f64;
                v.abs() / (mid + 0.5 * panel_w * theta.cos()).exp()
            })
            .fold(0.0, f64::max);

        let mut coeffs = Vec::with_capacity(n_panels);
        for p in 0..n_panels {
            let v = &vals[p * CHEB_DEG..(p + 1) * CHEB_DEG];
            let mut c = [0.0f64; CHEB_DEG];
            for (k, ck) in c.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, vj) in v.iter().enumerate() {
                    acc += vj * (PI * k as f64 * (j as f64 + 0.5) / CHEB_DEG as f64).cos();
                }
                *ck = 2.0 * acc / CHEB_DEG as f64;
            }
            c[0] *= 0.5;
            coeffs.push(c);
        }
        let table = HplusTable {
            y_min,
            panel_w,
            coeffs,
            linear_bound,
        };

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
        let checks: Vec<f64> = (0..2 * n_panels)
            .map(|_| rng.gen_range(y_min..y_max))
            .collect();
        let errs = checks
            .par_iter()
            .map(|&y| -> Result<f64> {
                let x = y.exp();
                Ok((table.eval(x)? - hplus_integral(h, x)?).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        let worst = errs.into_iter().fold(0.0, f64::max);
        if worst > 1e-9 {
            return Err(Error::Invariant(format!(
                "H+ table validation error {worst:.3e}"
            )));
        }
        Ok(table)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        check_domain(x)?;
        if x < TABLE_X_MIN {
            return Err(Error::Domain(format!("argument {x} below table floor")));
        }
        let y = x.ln();
        let p = (((y - self.y_min) / self.panel_w) as usize).min(self.coeffs.len() - 1);
        let mid = self.y_min + (p as f64 + 0.5) * self.panel_w;
        let tau = (y - mid) / (0.5 * self.panel_w);
        let c = &self.coeffs[p];
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for k in (1..CHEB_DEG).rev() {
            let b0 = 2.0 * tau * b1 - b2 + c[k];
            b2 = b1;
            b1 = b0;
        }
        Ok(tau * b1 - b2 + c[0])
    }
}
