//! Spectral weight functions h, test-function pairs (φ, φ̂), and the
//! Katz-Sarnak functional. The H⁺ transform lives in [`hplus`], the
//! Mellin transforms in [`mellin`].

pub mod hplus;
pub mod mellin;

use crate::error::{Error, Result};
use crate::quad;
use hplus::HplusTable;
use num_complex::Complex64;
use once_cell::sync::{Lazy, OnceCell};
use std::f64::consts::PI;
use std::sync::Arc;

type ComplexMap = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Even spectral weight, holomorphic on |Im s| ≤ strip_height, bounded by
/// decay_constant · (1+|s|)^{−2−decay_delta} on the strip (the constant is
/// measured on a sample grid at construction and recorded).
#[derive(Clone)]
pub struct WeightFunction {
    pub strip_height: f64,
    pub decay_delta: f64,
    pub decay_constant: f64,
    map: ComplexMap,
    table: Arc<OnceCell<HplusTable>>,
}

impl WeightFunction {
    /// Wrap an evaluator after verifying the class invariants on a
    /// 100 × 100 strip sample: evenness, finiteness, and real nonnegative
    /// (not identically zero) values on the real axis.
    pub fn new(
        strip_height: f64,
        decay_delta: f64,
        evaluator: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(strip_height > 13.0) {
            return Err(Error::Domain(format!(
                "strip height {strip_height} must exceed 13"
            )));
        }
        if !(decay_delta > 0.0) {
            return Err(Error::Domain("decay exponent must be positive".into()));
        }
        let mut decay_constant = 0.0f64;
        for i in 0..100 {
            let re = -40.0 + 80.0 * (i as f64 + 0.5) / 100.0;
            for j in 0..100 {
                let im = strip_height * (-1.0 + 2.0 * (j as f64 + 0.5) / 100.0);
                let s = Complex64::new(re, im);
                let v = evaluator(s);
                if !v.is_finite() {
                    return Err(Error::Invariant(format!("weight not finite at s = {s}")));
                }
                if (v - evaluator(-s)).norm() > 1e-10 * (1.0 + v.norm()) {
                    return Err(Error::Invariant(format!("weight not even at s = {s}")));
                }
                decay_constant =
                    decay_constant.max(v.norm() * (1.0 + s.norm()).powf(2.0 + decay_delta));
            }
        }
        let mut max_axis = 0.0f64;
        for i in 0..100 {
            let t = -40.0 + 80.0 * (i as f64 + 0.5) / 100.0;
            let v = evaluator(Complex64::new(t, 0.0));
            if v.im.abs() > 1e-10 * (1.0 + v.norm()) || v.re < -1e-12 {
                return Err(Error::Invariant(format!(
                    "weight not real-nonnegative at t = {t}"
                )));
            }
            max_axis = max_axis.max(v.re);
        }
        if max_axis <= 0.0 {
            return Err(Error::Invariant(
                "weight vanishes identically on the sampled axis".into(),
            ));
        }
        Ok(WeightFunction {
            strip_height,
            decay_delta,
            decay_constant,
            map: Arc::new(evaluator),
            table: Arc::new(OnceCell::new()),
        })
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        (self.map)(s)
    }

    pub fn eval_real(&self, t: f64) -> f64 {
        (self.map)(Complex64::new(t, 0.0)).re
    }

    pub(crate) fn hplus_table(&self) -> Result<&HplusTable> {
        self.table.get_or_try_init(|| HplusTable::build(self))
    }

    /// H⁺(x) through the cached Chebyshev table (built on first use);
    /// arguments below the table floor fall back to direct quadrature.
    pub fn hplus(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 4.0 * PI) {
            return Err(Error::Domain(format!("argument {x} outside (0, 4π)")));
        }
        if x < hplus::TABLE_X_MIN {
            return hplus::hplus_integral(self, x);
        }
        self.hplus_table()?.eval(x)
    }
}

/// h(t) = exp(−t²) with strip height 14 and decay exponent 1.
pub fn make_weight_gaussian() -> WeightFunction {
    WeightFunction::new(14.0, 1.0, |s: Complex64| (-s * s).exp())
        .expect("gaussian weight satisfies the class invariants")
}

static GAUSSIAN: Lazy<WeightFunction> = Lazy::new(make_weight_gaussian);

/// Shared Gaussian weight instance, so the H⁺ table is built once per
/// process.
pub fn gaussian_weight() -> &'static WeightFunction {
    &GAUSSIAN
}

/// Even test-function pair: φ̂ compactly supported in (−σ, σ) and
/// φ(x) = ∫ φ̂(u) e^{2πiux} du.
#[derive(Clone)]
pub struct TestFunction {
    pub sigma: f64,
    hat_fn: RealMap,
    phi_fn: RealMap,
}

impl TestFunction {
    /// Wrap a transform pair after checking evenness and that φ is
    /// reproduced from φ̂ by the Fourier integral at 50 sample points.
    pub fn new(
        sigma: f64,
        phi_hat: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 2.0) {
            return Err(Error::Domain(format!(
                "support radius {sigma} outside (0, 2)"
            )));
        }
        let tf = TestFunction {
            sigma,
            hat_fn: Arc::new(phi_hat),
            phi_fn: Arc::new(phi),
        };
        for i in 0..50 {
            let x = -4.0 + 8.0 * (i as f64 + 0.5) / 50.0;
            if (tf.phi(x) - tf.phi(-x)).abs() > 1e-12 {
                return Err(Error::Invariant(format!("phi not even at x = {x}")));
            }
            let u = sigma * (-1.0 + 2.0 * (i as f64 + 0.5) / 50.0);
            if (tf.phi_hat(u) - tf.phi_hat(-u)).abs() > 1e-12 {
                return Err(Error::Invariant(format!("phi_hat not even at u = {u}")));
            }
            let from_hat = 2.0
                * quad::integrate(
                    &|v: f64| tf.phi_hat(v) * (2.0 * PI * v * x).cos(),
                    0.0,
                    sigma,
                    1e-12,
                )
                .value;
            if (tf.phi(x) - from_hat).abs() > 1e-8 {
                return Err(Error::Invariant(format!(
                    "phi is not the Fourier integral of phi_hat at x = {x}"
                )));
            }
        }
        Ok(tf)
    }

    pub fn phi_hat(&self, u: f64) -> f64 {
        if u.abs() >= self.sigma {
            0.0
        } else {
            (self.hat_fn)(u)
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi_fn)(x)
    }

    /// φ at a complex argument, through the Fourier integral over the
    /// compact support.
    pub fn phi_complex(&self, z: Complex64) -> Complex64 {
        let f = |u: f64| -> Complex64 {
            self.phi_hat(u) * (Complex64::new(0.0, 2.0 * PI * u) * z).exp()
        };
        quad::integrate(&f, -self.sigma, self.sigma, 1e-12).value
    }
}

/// Triangle pair: φ̂(u) = (1 − |u|/σ)⁺, φ(x) = σ (sin(πσx)/(πσx))².
pub fn make_test_triangle(sigma: f64) -> Result<TestFunction> {
    if !(sigma > 0.0 && sigma < 2.0) {
        return Err(Error::Domain(format!(
            "support radius {sigma} outside (0, 2)"
        )));
    }
    let hat = move |u: f64| (1.0 - u.abs() / sigma).max(0.0);
    let phi = move |x: f64| {
        let y = PI * sigma * x;
        if y.abs() < 1e-4 {
            // sinc² = 1 - y²/3 + 2y⁴/45 - ...
            sigma * (1.0 - y * y / 3.0)
        } else {
            let s = y.sin() / y;
            sigma * s * s
        }
    };
    TestFunction::new(sigma, hat, phi)
}

/// Smooth bump pair: φ̂(u) = exp(−1/(1−(u/σ)²)) inside (−σ, σ), zero
/// outside; φ by quadrature of the Fourier integral.
pub fn make_test_bump(sigma: f64) -> Result<TestFunction> {
    if !(sigma > 0.0 && sigma < 2.0) {
        return Err(Error::Domain(format!(
            "support radius {sigma} outside (0, 2)"
        )));
    }
    let hat = move |u: f64| {
        let r = u / sigma;
        let d = 1.0 - r * r;
        if d > 0.0 {
            (-1.0 / d).exp()
        } else {
            0.0
        }
    };
    let phi = move |x: f64| {
        2.0 * quad::integrate(&|u: f64| hat(u) * (2.0 * PI * u * x).cos(), 0.0, sigma, 1e-13)
            .value
    };
    TestFunction::new(sigma, hat, phi)
}

/// φ̂(0) + φ(0)/2, the expected one-level density mass against
/// 1 + δ₀/2.
pub fn katz_sarnak_functional(phi: &TestFunction) -> f64 {
    phi.phi_hat(0.0) + 0.5 * phi.phi(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_weight_class_data() {
        let h = make_weight_gaussian();
        assert_eq!(h.strip_height, 14.0);
        assert_eq!(h.decay_delta, 1.0);
        assert!((h.eval_real(0.0) - 1.0).abs() < 1e-15);
        for i in 0..100 {
            let t = -12.0 + 24.0 * (i as f64 + 0.5) / 100.0;
            assert!((h.eval_real(t) - h.eval_real(-t)).abs() < 1e-14);
        }
        // h(-i/2) = e^{1/4}
        let v = h.eval(Complex64::new(0.0, -0.5));
        assert!((v.re - 0.25f64.exp()).abs() < 1e-13);
        assert!(v.im.abs() < 1e-13);
        assert!(h.decay_constant.is_finite() && h.decay_constant > 0.0);
    }

    #[test]
    fn weight_invariants_reject_bad_evaluators() {
        assert!(WeightFunction::new(12.0, 1.0, |s: Complex64| (-s * s).exp()).is_err());
        assert!(WeightFunction::new(14.0, 0.0, |s: Complex64| (-s * s).exp()).is_err());
        // odd function
        assert!(WeightFunction::new(14.0, 1.0, |s: Complex64| s * (-s * s).exp()).is_err());
        // negative on the axis
        assert!(WeightFunction::new(14.0, 1.0, |s: Complex64| -(-s * s).exp()).is_err());
        // identically zero
        assert!(WeightFunction::new(14.0, 1.0, |_| Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn triangle_shape() {
        let tf = make_test_triangle(1.25).unwrap();
        assert!((tf.phi(0.0) - 1.25).abs() < 1e-12);
        assert!((tf.phi_hat(0.0) - 1.0).abs() < 1e-15);
        assert!((tf.phi_hat(0.625) - 0.5).abs() < 1e-15);
        assert_eq!(tf.phi_hat(1.25), 0.0);
        assert_eq!(tf.phi_hat(1.7), 0.0);
        // ∫φ̂ = σ/2 · 2 · 1/2 ... triangle area = σ
        let area = quad::integrate(&|u: f64| tf.phi_hat(u), -1.25, 1.25, 1e-12).value;
        assert!((area - 1.25).abs() < 1e-10);
        assert!(make_test_triangle(0.0).is_err());
        assert!(make_test_triangle(2.0).is_err());
    }

    /// Sine integral for the tail formula, series below 6, asymptotic
    /// auxiliary functions above.
    fn si(z: f64) -> f64 {
        assert!(z >= 0.0);
        if z < 6.0 {
            let mut term = z;
            let mut acc = z;
            for k in 1..40 {
                let k2 = 2 * k;
                term *= -z * z / ((k2 * (k2 + 1)) as f64);
                acc += term / (k2 + 1) as f64;
                if term.abs() < 1e-18 {
                    break;
                }
            }
            acc
        } else {
            let inv = 1.0 / z;
            let inv2 = inv * inv;
            let f = inv * (1.0 - inv2 * (2.0 - inv2 * (24.0 - inv2 * 720.0)));
            let g = inv2 * (1.0 - inv2 * (6.0 - inv2 * (120.0 - inv2 * 5040.0)));
            0.5 * PI - f * z.cos() - g * z.sin()
        }
    }

    /// ∫_X^∞ cos(ωx)/x² dx = cos(ωX)/X − ω(π/2 − Si(ωX)) for ω > 0.
    fn cos_tail(omega: f64, x0: f64) -> f64 {
        if omega == 0.0 {
            return 1.0 / x0;
        }
        (omega * x0).cos() / x0 - omega * (0.5 * PI - si(omega * x0))
    }

    #[test]
    fn triangle_forward_transform_recovers_hat() {
        // φ̂(u) = 2∫_0^∞ φ(x) cos(2πux) dx, split at X with the tail done
        // analytically from φ(x) = σ(1 − cos(2πσx))/(2π²σ²x²)
        let sigma = 1.0f64;
        let tf = make_test_triangle(sigma).unwrap();
        let x0 = 200.0;
        for u in [0.0, 0.25, 0.5, 0.9] {
            let main = 2.0
                * quad::integrate(&|x: f64| tf.phi(x) * (2.0 * PI * u * x).cos(), 0.0, x0, 1e-9)
                    .value;
            // 2·cos(2πux)(1 − cos(2πσx))/(2π²σx²) →
            //   [cos(2πux) − cos(2π(σ+u)x)/2 − cos(2π(σ−u)x)/2] / (π²σx²)
            let tail = (cos_tail(2.0 * PI * u, x0)
                - 0.5 * cos_tail(2.0 * PI * (sigma + u), x0)
                - 0.5 * cos_tail(2.0 * PI * (sigma - u), x0))
                / (PI * PI * sigma);
            let got = main + tail;
            assert!(
                (got - tf.phi_hat(u)).abs() < 1e-6,
                "forward transform at u = {u}: got {got}, want {}",
                tf.phi_hat(u)
            );
        }
    }

    #[test]
    fn bump_shape_and_self_convergence() {
        let sigma = 1.0;
        let tf = make_test_bump(sigma).unwrap();
        assert_eq!(tf.phi_hat(sigma), 0.0);
        assert_eq!(tf.phi_hat(-sigma), 0.0);
        assert!((tf.phi_hat(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        for x in [0.3, 1.7, 2.9] {
            assert!((tf.phi(x) - tf.phi(-x)).abs() < 1e-12);
        }
        // trapezoid refinement oracle for φ(1); endpoint derivatives all
        // vanish, so halving converges fast
        let g = |u: f64| tf.phi_hat(u) * (2.0 * PI * u).cos();
        let mut n = 8usize;
        let mut prev = f64::NAN;
        let mut stable = 0;
        let mut value = f64::NAN;
        while stable < 2 && n < (1 << 22) {
            let h = 2.0 * sigma / n as f64;
            let mut acc = 0.5 * (g(-sigma) + g(sigma));
            for i in 1..n {
                acc += g(-sigma + i as f64 * h);
            }
            value = acc * h;
            if (value - prev).abs() <= 1e-10 {
                stable += 1;
            } else {
                stable = 0;
            }
            prev = value;
            n *= 2;
        }
        assert!(stable == 2, "trapezoid refinement did not stabilize");
        assert!((tf.phi(1.0) - value).abs() < 1e-9);
    }

    #[test]
    fn katz_sarnak_values() {
        let tri = make_test_triangle(1.0).unwrap();
        assert!((katz_sarnak_functional(&tri) - 1.5).abs() < 1e-12);
        let zero = TestFunction::new(1.0, |_| 0.0, |_| 0.0).unwrap();
        assert_eq!(katz_sarnak_functional(&zero), 0.0);
        // ∫φ + φ(0)/2 with ∫φ by quadrature, for the fast-decaying bump
        let bump = make_test_bump(1.0).unwrap();
        let integral = quad::integrate(&|x: f64| bump.phi(x), -100.0, 100.0, 1e-9).value;
        let direct = integral + 0.5 * bump.phi(0.0);
        assert!((katz_sarnak_functional(&bump) - direct).abs() < 1e-7);
    }

    #[test]
    fn complex_phi_matches_real_axis() {
        let tf = make_test_triangle(1.0).unwrap();
        for x in [0.0, 0.6, 2.3] {
            let z = tf.phi_complex(Complex64::new(x, 0.0));
            assert!((z.re - tf.phi(x)).abs() < 1e-10);
            assert!(z.im.abs() < 1e-12);
        }
    }
}
