//! Zero counting for Dirichlet L-functions in the critical strip:
//! completed L-values, root numbers, argument-principle box counts over
//! rectangles [β, 3/2] × [−T, T], and sign-change scans of the rotated
//! completed function along the critical line.

use crate::error::{Error, Result};
use crate::ntcore::characters::{gauss_sum, DirichletCharacter};
use crate::specfun::gamma::complex_gamma;
use crate::specfun::zeta::{dirichlet_l_from_row, hurwitz_row};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct ZeroCountQuery {
    pub beta: f64,
    pub t_max: f64,
    pub character: DirichletCharacter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroCountReport {
    /// Zeros with Re(ρ) ≥ β and |Im(ρ)| ≤ T, from the box contour.
    pub count: i64,
    /// Sign-change count on the critical line, filled when β = 1/2.
    pub line_scan_count: Option<i64>,
    /// True when the box and line counts differ at β = 1/2.
    pub scan_disagrees: bool,
}

/// Λ(s, χ) = (q/π)^{(s+a)/2} Γ((s+a)/2) L(s, χ) for primitive χ mod q > 1,
/// where a is the parity of χ; for q = 1 the xi function
/// s(s−1)/2 · π^{−s/2} Γ(s/2) ζ(s). Entire in both cases.
pub fn completed_l(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive {
        return Err(Error::Domain(
            "completed form requires a primitive character".into(),
        ));
    }
    let row = hurwitz_row(s, chi.modulus)?;
    completed_from_row(s, chi, chi.parity(), &row)
}

fn completed_from_row(
    s: Complex64,
    chi: &DirichletCharacter,
    parity: u32,
    row: &[Complex64],
) -> Result<Complex64> {
    let q = chi.modulus;
    if q == 1 {
        let zeta_s = row[0];
        return Ok(0.5
            * s
            * (s - 1.0)
            * (-0.5 * s * PI.ln()).exp()
            * complex_gamma(0.5 * s)?
            * zeta_s);
    }
    let l = dirichlet_l_from_row(s, chi, row)?;
    let shifted = s + parity as f64;
    let pref = (0.5 * shifted * (q as f64 / PI).ln()).exp();
    Ok(pref * complex_gamma(0.5 * shifted)? * l)
}

/// Root number ε(χ) = τ(χ) / (i^a √q) for primitive χ; unit modulus, and
/// Λ(s, χ) = ε(χ) Λ(1−s, χ̄).
pub fn root_number(chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive {
        return Err(Error::Domain("root number requires a primitive character".into()));
    }
    if chi.modulus == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let i_a = if chi.parity() == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    Ok(gauss_sum(chi)? / (i_a * (chi.modulus as f64).sqrt()))
}

/// Relative residual of Λ(s, χ) − ε(χ) Λ(1−s, χ̄), scaled by the sum of
/// the two magnitudes.
pub fn functional_equation_residual(s: Complex64, chi: &DirichletCharacter) -> Result<f64> {
    let lam = completed_l(s, chi)?;
    let lam_bar = completed_l(Complex64::new(1.0, 0.0) - s, &chi.conjugate())?;
    let eps = root_number(chi)?;
    Ok((lam - eps * lam_bar).norm() / (lam.norm() + lam_bar.norm()).max(1e-300))
}

fn validate_character(chi: &DirichletCharacter, t_max: f64) -> Result<()> {
    if !chi.is_primitive {
        return Err(Error::Domain(format!(
            "character mod {} with conductor {} is imprimitive",
            chi.modulus, chi.conductor
        )));
    }
    if !(t_max > 0.0) {
        return Err(Error::Domain("height T must be positive".into()));
    }
    if t_max > 50.0 {
        return Err(Error::Budget(format!("height T = {t_max} exceeds 50")));
    }
    Ok(())
}

/// Zeros with Re(ρ) ≥ β, |Im(ρ)| ≤ T for a primitive character, modulus
/// ≤ 200, T ≤ 50. The count comes from the winding number of the
/// completed function around [β, 3/2] × [−T, T]; at β = 1/2 the left edge
/// sits just left of the line so on-line zeros are inside, and the count
/// is cross-checked against the critical-line sign-change scan.
pub fn zero_count(query: &ZeroCountQuery) -> Result<ZeroCountReport> {
    let chi = &query.character;
    if !(0.5..=1.0).contains(&query.beta) {
        return Err(Error::Domain(format!(
            "beta = {} outside [1/2, 1]",
            query.beta
        )));
    }
    if chi.modulus > 200 {
        return Err(Error::Budget(format!("modulus {} exceeds 200", chi.modulus)));
    }
    validate_character(chi, query.t_max)?;
    let count =
        box_counts_same_modulus(std::slice::from_ref(chi), query.beta, query.t_max)?[0];
    let on_line = query.beta <= 0.5 + 1e-12;
    let (line_scan_count, scan_disagrees) = if on_line {
        let sc = critical_line_scan(chi, query.t_max)?;
        (Some(sc), sc != count)
    } else {
        (None, false)
    };
    Ok(ZeroCountReport {
        count,
        line_scan_count,
        scan_disagrees,
    })
}

/// Box counts for a batch of primitive characters sharing one modulus,
/// so each contour point computes a single Hurwitz row. Refinement is
/// driven by the worst character; instability retries perturb the box by
/// 1e-3 per attempt, three attempts total.
pub fn box_counts_same_modulus(
    chars: &[DirichletCharacter],
    beta: f64,
    t_max: f64,
) -> Result<Vec<i64>> {
    if chars.is_empty() {
        return Ok(Vec::new());
    }
    let q = chars[0].modulus;
    for chi in chars {
        if chi.modulus != q {
            return Err(Error::Domain("batch characters must share a modulus".into()));
        }
        validate_character(chi, t_max)?;
    }
    if q > 1000 {
        return Err(Error::Budget(format!("modulus {q} exceeds 1000")));
    }
    for attempt in 0..3u32 {
        // at β = 1/2 the zeros sit on the left edge: always shift it left.
        // At β = 1 the edge would graze the ζ pole at s = 1; shift as well,
        // which costs nothing since the completed function is entire.
        let base_shift = if beta <= 0.5 + 1e-12 || beta >= 1.0 - 1e-12 {
            1.0
        } else {
            0.0
        };
        let left = beta - 1e-3 * (base_shift + attempt as f64);
        let top = t_max + 1e-3 * attempt as f64;
        match walk_box(chars, q, left, top) {
            Ok(windings) => {
                let mut counts = Vec::with_capacity(chars.len());
                let mut clean = true;
                for w in windings {
                    let x = w / (2.0 * PI);
                    let n = x.round();
                    if (x - n).abs() > 0.15 || n < -0.1 {
                        clean = false;
                        break;
                    }
                    counts.push(n as i64);
                }
                if clean {
                    return Ok(counts);
                }
            }
            Err(Error::Invariant(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::UnstableCount(format!(
        "box winding did not stabilize (q = {q}, beta = {beta}, T = {t_max})"
    )))
}

struct ContourWalker<'a> {
    chars: &'a [DirichletCharacter],
    parities: Vec<u32>,
    q: u64,
    evals: usize,
}

impl ContourWalker<'_> {
    fn values(&mut self, s: Complex64) -> Result<Vec<Complex64>> {
        self.evals += 1;
        if self.evals > 500_000 {
            return Err(Error::Budget("contour evaluation budget exceeded".into()));
        }
        let row = hurwitz_row(s, self.q)?;
        let mut out = Vec::with_capacity(self.chars.len());
        for (chi, &a) in self.chars.iter().zip(&self.parities) {
            let v = completed_from_row(s, chi, a, &row)?;
            if !v.is_finite() || v.norm() < 1e-280 {
                return Err(Error::Invariant(
                    "completed value degenerate on contour".into(),
                ));
            }
            out.push(v);
        }
        Ok(out)
    }

    fn refine(
        &mut self,
        s0: Complex64,
        s1: Complex64,
        v0: &[Complex64],
        v1: &[Complex64],
        depth: u32,
        windings: &mut [f64],
    ) -> Result<()> {
        let mut worst = 0.0f64;
        for (a, b) in v0.iter().zip(v1) {
            let d = (b / a).arg().abs();
            if !(d <= worst) {
                worst = d;
            }
        }
        if worst <= 0.9 {
            for (w, (a, b)) in windings.iter_mut().zip(v0.iter().zip(v1)) {
                *w += (b / a).arg();
            }
            return Ok(());
        }
        if depth >= 40 {
            return Err(Error::Invariant(
                "contour refinement stalled near a zero".into(),
            ));
        }
        let sm = 0.5 * (s0 + s1);
        let vm = self.values(sm)?;
        self.refine(s0, sm, v0, &vm, depth + 1, windings)?;
        self.refine(sm, s1, &vm, v1, depth + 1, windings)
    }
}

fn walk_box(
    chars: &[DirichletCharacter],
    q: u64,
    left: f64,
    top: f64,
) -> Result<Vec<f64>> {
    let parities = chars.iter().map(|c| c.parity()).collect();
    let mut walker = ContourWalker {
        chars,
        parities,
        q,
        evals: 0,
    };
    let right = 1.5;
    let corners = [
        Complex64::new(left, -top),
        Complex64::new(right, -top),
        Complex64::new(right, top),
        Complex64::new(left, top),
    ];
    let mut windings = vec![0.0f64; chars.len()];
    for e in 0..4 {
        let s0 = corners[e];
        let s1 = corners[(e + 1) % 4];
        // seed the edge densely enough that the true phase change per
        // piece stays below π for q ≤ 1000, T ≤ 50
        let pieces = (((s1 - s0).norm() / 0.125).ceil() as usize).max(8);
        let mut prev_s = s0;
        let mut prev_v = walker.values(prev_s)?;
        for j in 1..=pieces {
            let s = s0 + (s1 - s0) * (j as f64 / pieces as f64);
            let v = walker.values(s)?;
            walker.refine(prev_s, s, &prev_v, &v, 0, &mut windings)?;
            prev_s = s;
            prev_v = v;
        }
    }
    Ok(windings)
}

/// Sign changes of the rotated completed function Z(t) = ε^{−1/2} Λ(1/2+it)
/// over [−T, T], starting at step 0.05 and halving until the count repeats
/// twice in a row.
pub fn critical_line_scan(chi: &DirichletCharacter, t_max: f64) -> Result<i64> {
    validate_character(chi, t_max)?;
    let rot = root_number(chi)?.sqrt().conj();
    let mut n = ((2.0 * t_max / 0.05).ceil() as usize).max(4);
    let eval = |t: f64| -> Result<Complex64> {
        let s = Complex64::new(0.5, t);
        let row = hurwitz_row(s, chi.modulus)?;
        Ok(rot * completed_from_row(s, chi, chi.parity(), &row)?)
    };
    let grid_t = |i: usize, n: usize| -t_max + 2.0 * t_max * (i as f64 / n as f64);
    let mut vals: Vec<Complex64> = (0..=n).map(|i| eval(grid_t(i, n))).collect::<Result<_>>()?;
    let mut history: Vec<i64> = Vec::new();
    for _ in 0..10 {
        let count = vals
            .windows(2)
            .filter(|w| w[0].re.signum() != w[1].re.signum())
            .count() as i64;
        history.push(count);
        let l = history.len();
        if l >= 3 && history[l - 2] == count && history[l - 3] == count {
            let scale = vals.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            let worst_im = vals.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max);
            if worst_im > 1e-6 * scale {
                return Err(Error::Invariant(format!(
                    "rotated line values not real: |Im| up to {worst_im:e} at scale {scale:e}"
                )));
            }
            return Ok(count);
        }
        // halve the step by inserting midpoints
        let mut refined = Vec::with_capacity(2 * vals.len() - 1);
        for i in 0..vals.len() - 1 {
            refined.push(vals[i]);
            let tm = 0.5 * (grid_t(i, n) + grid_t(i + 1, n));
            refined.push(eval(tm)?);
        }
        refined.push(*vals.last().unwrap());
        vals = refined;
        n *= 2;
    }
    Err(Error::UnstableCount(format!(
        "sign-change count kept drifting: history {history:?}"
    )))
}

/// Height of the critical-line zero closest to t = 0, located by a
/// sign-change bracket at step 0.01 (confirmed at 0.005) and bisection.
pub fn lowest_zero_height(chi: &DirichletCharacter, t_hi: f64) -> Result<f64> {
    validate_character(chi, t_hi)?;
    let rot = root_number(chi)?.sqrt().conj();
    let z = |t: f64| -> Result<f64> {
        let s = Complex64::new(0.5, t);
        let row = hurwitz_row(s, chi.modulus)?;
        Ok((rot * completed_from_row(s, chi, chi.parity(), &row)?).re)
    };
    let mut bracket: Option<(f64, f64)> = None;
    for &step in &[0.01f64, 0.005] {
        let n = (2.0 * t_hi / step).ceil() as usize;
        let mut best: Option<(f64, f64)> = None;
        let mut prev_t = -t_hi;
        let mut prev_v = z(prev_t)?;
        for i in 1..=n {
            let t = -t_hi + 2.0 * t_hi * (i as f64 / n as f64);
            let v = z(t)?;
            if prev_v.signum() != v.signum() {
                let mid = 0.5 * (prev_t + t);
                let closer = match best {
                    None => true,
                    Some((a, b)) => mid.abs() < (0.5 * (a + b)).abs(),
                };
                if closer {
                    best = Some((prev_t, t));
                }
            }
            prev_t = t;
            prev_v = v;
        }
        match (bracket, best) {
            (None, Some(b)) => bracket = Some(b),
            (Some(coarse), Some(fine)) => {
                // zeros at ±γ₁ tie on |mid|; compare heights, not positions
                let cm = (0.5 * (coarse.0 + coarse.1)).abs();
                let fm = (0.5 * (fine.0 + fine.1)).abs();
                if (cm - fm).abs() > 0.02 {
                    return Err(Error::UnstableCount(
                        "lowest-zero bracket moved under refinement".into(),
                    ));
                }
                bracket = Some(fine);
            }
            (_, None) => {
                return Err(Error::Insufficient(format!(
                    "no critical-line sign change below {t_hi}"
                )))
            }
        }
    }
    let (mut a, mut b) = bracket.unwrap();
    let mut va = z(a)?;
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        let vm = z(m)?;
        if va.signum() == vm.signum() {
            a = m;
            va = vm;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b)).abs())
}
