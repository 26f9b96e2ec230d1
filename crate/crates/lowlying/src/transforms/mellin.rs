//! Mellin transforms of the smoothed Bessel kernels: Ψ for the spectral
//! H⁺ kernel and Ψ♭ for the holomorphic J_{k−1} kernels, plus bound-shape
//! fits, an inversion round trip, and an entirety diagnostic.

use crate::error::{Error, Result};
use crate::quad;
use crate::quad::gauss_legendre;
use crate::specfun::bessel::bessel_j_integer;
use crate::transforms::{hplus, TestFunction, WeightFunction};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MellinKind {
    Maass,
    Holomorphic { weight: u32 },
}

/// Point query for the transforms: scale is the family parameter (N for
/// the spectral kernel, X for the holomorphic one), c the modulus of the
/// Kloosterman term the kernel came from.
#[derive(Debug, Clone, Copy)]
pub struct MellinQuery {
    pub s: Complex64,
    pub scale: f64,
    pub c: f64,
    pub kind: MellinKind,
}

fn validate(q: &MellinQuery, sigma: f64) -> Result<()> {
    if !(q.scale >= 2.0) {
        return Err(Error::Domain(format!("scale {} below 2", q.scale)));
    }
    if !(q.c >= 1.0) {
        return Err(Error::Domain(format!("modulus {} below 1", q.c)));
    }
    let arg_max = 4.0 * PI * q.scale.powf(0.5 * sigma) / q.c;
    match q.kind {
        MellinKind::Maass => {
            if arg_max >= 4.0 * PI {
                return Err(Error::Domain(format!(
                    "kernel argument reaches 4π on the support; need c > scale^(σ/2), got c = {}",
                    q.c
                )));
            }
            let arg_min = 4.0 * PI * q.scale.powf(-0.5 * sigma) / q.c;
            if arg_min < hplus::TABLE_X_MIN {
                return Err(Error::Budget(format!(
                    "kernel argument falls below the H+ table floor; modulus {} too large",
                    q.c
                )));
            }
        }
        MellinKind::Holomorphic { weight } => {
            if weight < 2 || weight % 2 != 0 {
                return Err(Error::Domain(format!("weight {weight} must be even and ≥ 2")));
            }
            if weight > 200 {
                return Err(Error::Budget(format!("weight {weight} above Bessel order cap")));
            }
            if arg_max > 100.0 {
                return Err(Error::Budget(format!(
                    "Bessel argument {arg_max:.1} exceeds the evaluation cap"
                )));
            }
        }
    }
    Ok(())
}

fn quad_tol(q: &MellinQuery, sigma: f64) -> f64 {
    1e-12 * (1.0 + q.scale.powf(sigma * q.s.re.abs()))
}

/// Ψ(s) = ∫_{−σ}^{σ} scale^{us} φ̂(u) H⁺(4π·scale^{u/2}/c) du, the Mellin
/// transform of x ↦ φ̂(log x / log scale)·H⁺(4π√x/c)/log scale after the
/// substitution x = scale^u (whose Jacobian cancels the 1/log scale).
pub fn mellin_psi(q: &MellinQuery, phi: &TestFunction, h: &WeightFunction) -> Result<Complex64> {
    if q.kind != MellinKind::Maass {
        return Err(Error::Domain("query kind must be Maass".into()));
    }
    let sigma = phi.sigma;
    validate(q, sigma)?;
    let table = h.hplus_table()?;
    let ln_n = q.scale.ln();
    let s = q.s;
    let f = |u: f64| -> Complex64 {
        let w = phi.phi_hat(u);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = 4.0 * PI * (0.5 * u * ln_n).exp() / q.c;
        let kernel = table.eval(x).expect("kernel argument inside validated range");
        (s * (u * ln_n)).exp() * (w * kernel)
    };
    Ok(quad::integrate(&f, -sigma, sigma, quad_tol(q, sigma)).value)
}

/// Ψ♭(s): the same transform with J_{k−1} in place of H⁺.
pub fn mellin_psi_flat(q: &MellinQuery, phi: &TestFunction) -> Result<Complex64> {
    let weight = match q.kind {
        MellinKind::Holomorphic { weight } => weight,
        MellinKind::Maass => {
            return Err(Error::Domain("query kind must be holomorphic".into()))
        }
    };
    let sigma = phi.sigma;
    validate(q, sigma)?;
    let ln_x = q.scale.ln();
    let s = q.s;
    let f = |u: f64| -> Complex64 {
        let w = phi.phi_hat(u);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = 4.0 * PI * (0.5 * u * ln_x).exp() / q.c;
        let kernel =
            bessel_j_integer(weight - 1, x).expect("Bessel argument inside validated range");
        (s * (u * ln_x)).exp() * (w * kernel)
    };
    Ok(quad::integrate(&f, -sigma, sigma, quad_tol(q, sigma)).value)
}

/// scale^{σ|Re s + a|}/((|s|+1)^2·c^b), the decay-bound shape for the
/// query's kernel: a = 1/2, b = 1 for the spectral kernel and
/// a = (k−1)/2, b = k−1 for holomorphic weight k. The exponent factor is
/// minimized (equal to 1) on the line Re s = −a.
pub(crate) fn bound_shape(q: &MellinQuery, sigma: f64, s: Complex64) -> f64 {
    let (shift, c_pow) = match q.kind {
        MellinKind::Maass => (0.5, q.c),
        MellinKind::Holomorphic { weight } => {
            ((weight as f64 - 1.0) / 2.0, q.c.powi(weight as i32 - 1))
        }
    };
    q.scale.powf(sigma * (s.re + shift).abs()) / ((s.norm() + 1.0).powi(2) * c_pow)
}

/// A fitted decay-bound constant together with the worst ratio observed on
/// a fresh band of larger |Im s| (values ≤ 1 mean the fitted bound kept
/// holding there).
#[derive(Debug, Clone, Copy)]
pub struct BoundFit {
    pub constant: f64,
    pub worst_checked_ratio: f64,
}

fn bound_fit_impl(
    q0: &MellinQuery,
    sigma: f64,
    eval: &(dyn Fn(Complex64) -> Result<Complex64> + Sync),
) -> Result<BoundFit> {
    // values at conjugate s are conjugate, so only Im s ≥ 0 is sampled
    let mut fit_pts = Vec::new();
    for i in 0..9 {
        for j in 0..9 {
            fit_pts.push(Complex64::new(-1.0 + 0.25 * i as f64, 1.25 * j as f64));
        }
    }
    let ratios = fit_pts
        .par_iter()
        .map(|&s| Ok(eval(s)?.norm() / bound_shape(q0, sigma, s)))
        .collect::<Result<Vec<f64>>>()?;
    let constant = ratios.into_iter().fold(0.0, f64::max);
    if !(constant.is_finite() && constant > 0.0) {
        return Err(Error::Invariant(format!(
            "degenerate fitted bound constant {constant}"
        )));
    }

    let mut check_pts = Vec::new();
    for i in 0..8 {
        for j in 0..10 {
            check_pts.push(Complex64::new(
                -0.875 + 0.25 * i as f64,
                10.0 + (j as f64 + 1.0),
            ));
        }
    }
    let checked = check_pts
        .par_iter()
        .map(|&s| Ok(eval(s)?.norm() / (constant * bound_shape(q0, sigma, s))))
        .collect::<Result<Vec<f64>>>()?;
    let worst_checked_ratio = checked.into_iter().fold(0.0, f64::max);
    Ok(BoundFit {
        constant,
        worst_checked_ratio,
    })
}

/// Fit the constant in |Ψ(s)| ≤ C·scale^{σ|Re s+1/2|}/((|s|+1)²c) on the
/// grid Re s ∈ [−1, 1], |Im s| ≤ 10, then check the shape on fresh points
/// with |Im s| ∈ (10, 20].
pub fn psi_bound_fit(
    q0: &MellinQuery,
    phi: &TestFunction,
    h: &WeightFunction,
) -> Result<BoundFit> {
    if q0.kind != MellinKind::Maass {
        return Err(Error::Domain("query kind must be Maass".into()));
    }
    validate(q0, phi.sigma)?;
    h.hplus_table()?;
    bound_fit_impl(q0, phi.sigma, &|s| {
        mellin_psi(&MellinQuery { s, ..*q0 }, phi, h)
    })
}

/// The Ψ♭ analogue of [`psi_bound_fit`], with exponent (k−1)/2 and c^{k−1}.
pub fn psi_flat_bound_fit(q0: &MellinQuery, phi: &TestFunction) -> Result<BoundFit> {
    match q0.kind {
        MellinKind::Holomorphic { .. } => {}
        MellinKind::Maass => return Err(Error::Domain("query kind must be holomorphic".into())),
    }
    validate(q0, phi.sigma)?;
    bound_fit_impl(q0, phi.sigma, &|s| {
        mellin_psi_flat(&MellinQuery { s, ..*q0 }, phi)
    })
}

/// Outcome of the inversion round trip: worst reconstruction error over
/// the sample points, and the magnitude of Ψ near the truncation height
/// (a proxy for the neglected tail).
#[derive(Debug, Clone, Copy)]
pub struct InversionReport {
    pub max_abs_err: f64,
    pub tail_magnitude: f64,
}

/// Invert the transform along the imaginary axis:
/// (log scale / 2π) ∫_{−T}^{T} Ψ(it)·n^{−it} dt should reproduce
/// φ̂(log n / log scale)·K(4π√n/c) at each sample n, where K is the
/// query's kernel. The log scale factor is the Jacobian of n = scale^v.
/// Pass the weight for the spectral kind, None for holomorphic.
pub fn mellin_inversion_check(
    q0: &MellinQuery,
    phi: &TestFunction,
    h: Option<&WeightFunction>,
    samples: &[u64],
    t_max: f64,
) -> Result<InversionReport> {
    validate(q0, phi.sigma)?;
    if samples.is_empty() || !(t_max > 1.0) {
        return Err(Error::Domain("need sample points and t_max > 1".into()));
    }
    let psi_at = |s: Complex64| -> Result<Complex64> {
        let q = MellinQuery { s, ..*q0 };
        match q0.kind {
            MellinKind::Maass => {
                let h = h.ok_or_else(|| {
                    Error::Domain("spectral kind needs a weight function".into())
                })?;
                mellin_psi(&q, phi, h)
            }
            MellinKind::Holomorphic { .. } => mellin_psi_flat(&q, phi),
        }
    };
    if let (MellinKind::Maass, Some(h)) = (q0.kind, h) {
        h.hplus_table()?;
    }

    // fixed composite Gauss grid on [0, T]; conjugate symmetry supplies
    // the negative half
    let (gx, gw) = gauss_legendre(12);
    let n_panels = (2.0 * t_max).ceil() as usize;
    let width = t_max / n_panels as f64;
    let mut nodes = Vec::with_capacity(n_panels * gx.len());
    for p in 0..n_panels {
        let mid = (p as f64 + 0.5) * width;
        for (i, &x) in gx.iter().enumerate() {
            nodes.push((mid + 0.5 * width * x, 0.5 * width * gw[i]));
        }
    }
    let psi_vals = nodes
        .par_iter()
        .map(|&(t, _)| psi_at(Complex64::new(0.0, t)))
        .collect::<Result<Vec<Complex64>>>()?;

    let tail_magnitude = psi_vals[psi_vals.len() - gx.len()..]
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);

    let ln_scale = q0.scale.ln();
    let kernel_at = |x: f64| -> Result<f64> {
        match q0.kind {
            MellinKind::Maass => h.unwrap().hplus(x),
            MellinKind::Holomorphic { weight } => bessel_j_integer(weight - 1, x),
        }
    };
    let mut max_abs_err = 0.0f64;
    for &n in samples {
        if n == 0 {
            return Err(Error::Domain("sample points must be positive".into()));
        }
        let ln_n = (n as f64).ln();
        let mut acc = 0.0;
        for (i, &(t, w)) in nodes.iter().enumerate() {
            // 2 Re[Ψ(it) n^{-it}] pairs t with -t
            let rot = Complex64::new(0.0, -t * ln_n).exp();
            acc += 2.0 * (psi_vals[i] * rot).re * w;
        }
        let got = acc * ln_scale / (2.0 * PI);
        let want = phi.phi_hat(ln_n / ln_scale) * kernel_at(4.0 * PI * (n as f64).sqrt() / q0.c)?;
        max_abs_err = max_abs_err.max((got - want).abs());
    }
    Ok(InversionReport {
        max_abs_err,
        tail_magnitude,
    })
}

/// |∮ Ψ ds| around the axis-aligned rectangle with opposite corners lo,
/// hi; values near zero are the Cauchy-theorem signature of an entire
/// integrand.
pub fn mellin_entirety_residual(
    q0: &MellinQuery,
    phi: &TestFunction,
    h: Option<&WeightFunction>,
    lo: Complex64,
    hi: Complex64,
) -> Result<f64> {
    if !(hi.re > lo.re && hi.im > lo.im) {
        return Err(Error::Domain("degenerate rectangle".into()));
    }
    let psi_at = |s: Complex64| -> Result<Complex64> {
        let q = MellinQuery { s, ..*q0 };
        match q0.kind {
            MellinKind::Maass => mellin_psi(
                &q,
                phi,
                h.ok_or_else(|| Error::Domain("spectral kind needs a weight function".into()))?,
            ),
            MellinKind::Holomorphic { .. } => mellin_psi_flat(&q, phi),
        }
    };
    let corners = [
        lo,
        Complex64::new(hi.re, lo.im),
        hi,
        Complex64::new(lo.re, hi.im),
    ];
    let mut total = Complex64::new(0.0, 0.0);
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let dir = b - a;
        let f = |tau: f64| -> Complex64 {
            psi_at(a + tau * dir).expect("validated query inside edge integral")
        };
        let max_re = a.re.abs().max(b.re.abs());
        let tol = 1e-12 * (1.0 + q0.scale.powf(phi.sigma * max_re));
        total += dir * quad::integrate(&f, 0.0, 1.0, tol).value;
    }
    Ok(total.norm())
}
