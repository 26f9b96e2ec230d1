//! Character-sum inequalities at desk scale: the orthogonality sieve with
//! constant exactly one, fourth moments of Dirichlet polynomials, first
//! moments of dyadic block products, and the tailored envelope comparison.
//!
//! Integrals over the vertical line carry the measure dt/(1+t²); all
//! integrands here are even in t, so quadrature runs on [0, t_max] with the
//! factor 2 folded into the weights and a recorded tail bound past t_max.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{CoefKind, DyadicTuple};
use crate::error::{Error, Result};
use crate::ntcore::characters::character_group;
use crate::ntcore::sieve_arith;
use crate::quad::gauss_legendre;

const FOURTH_D_MAX: u64 = 200;
const FOURTH_X_MAX: usize = 10_000;
const POLY_D_MAX: u64 = 200;
const POLY_LEN_MAX: f64 = 1e5;
const POLY_ACTIVE_MAX: usize = 4;
const T_MAX_CAP: f64 = 100.0;
const DEFAULT_PANEL_W: f64 = 0.5;
const DEFAULT_PANEL_NODES: usize = 20;

/// Σ*_{χ mod d} |Σ_{n≤X} χ(n) a(n)|² against (d + X)·Σ_{n≤X} |a(n)|².
/// The return is (lhs, rhs); the orthogonality proof gives lhs ≤ rhs with
/// constant exactly 1, via φ(d)(X/d + 1) ≤ X + d.
pub fn large_sieve_check(d: u64, x: usize, a: &[Complex64]) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::Domain(format!("modulus d = {d} must be at least 2")));
    }
    if x == 0 {
        return Err(Error::Domain("length X must be at least 1".into()));
    }
    if a.len() < x {
        return Err(Error::Domain(format!(
            "coefficient vector holds {} entries, X = {x}",
            a.len()
        )));
    }
    let chars = character_group(d)?;
    let dd = d as usize;
    let mut lhs = 0.0;
    for chi in chars.iter().filter(|c| c.is_primitive) {
        let table: Vec<Complex64> = (0..d).map(|r| chi.eval(r)).collect();
        let mut s = Complex64::new(0.0, 0.0);
        for (i, &coeff) in a[..x].iter().enumerate() {
            s += table[(i + 1) % dd] * coeff;
        }
        lhs += s.norm_sqr();
    }
    let sum_sq: f64 = a[..x].iter().map(|c| c.norm_sqr()).sum();
    let rhs = (d as f64 + x as f64) * sum_sq;
    Ok((lhs, rhs))
}

/// Nodes and weights turning Σ w·f(t) into ∫_{−t_max}^{t_max} f dt/(1+t²)
/// for even f: composite Gauss–Legendre on [0, t_max] with the measure and
/// the doubling baked into the weights.
fn even_line_grid(t_max: f64, panel_w: f64, panel_nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let (xs, gw) = gauss_legendre(panel_nodes);
    let panels = (t_max / panel_w).ceil().max(1.0) as usize;
    let step = t_max / panels as f64;
    let mut ts = Vec::with_capacity(panels * panel_nodes);
    let mut ws = Vec::with_capacity(panels * panel_nodes);
    for p in 0..panels {
        let half = 0.5 * step;
        let mid = p as f64 * step + half;
        for (x, w) in xs.iter().zip(&gw) {
            let t = mid + half * x;
            ts.push(t);
            ws.push(w * half * 2.0 / (1.0 + t * t));
        }
    }
    (ts, ws)
}

/// One block of a Dirichlet polynomial: terms a(n) n^{−1/2−it} for n in a
/// fixed integer range, pre-grouped by the residue of n mod d.
pub(crate) struct PolyBlock {
    residues: Vec<usize>,
    amps: Vec<f64>,
    lns: Vec<f64>,
}

impl PolyBlock {
    fn from_range(lo: u64, hi: u64, kind: CoefKind, d: u64, moebius: Option<&[i8]>) -> PolyBlock {
        let mut residues = Vec::new();
        let mut amps = Vec::new();
        let mut lns = Vec::new();
        for n in lo..=hi {
            let nf = n as f64;
            let a = match kind {
                CoefKind::One => 1.0,
                CoefKind::Log => nf.ln(),
                CoefKind::Moebius => {
                    f64::from(moebius.expect("moebius table supplied")[n as usize])
                }
            };
            if a == 0.0 {
                continue;
            }
            residues.push((n % d) as usize);
            amps.push(a / nf.sqrt());
            lns.push(nf.ln());
        }
        PolyBlock { residues, amps, lns }
    }

    /// Residue-class sums g[r] = Σ_{n≡r} a(n) n^{−1/2−it}.
    fn residue_sums(&self, t: f64, g: &mut [Complex64]) {
        for z in g.iter_mut() {
            *z = Complex64::new(0.0, 0.0);
        }
        for i in 0..self.amps.len() {
            let (s, c) = (-t * self.lns[i]).sin_cos();
            g[self.residues[i]] += Complex64::new(self.amps[i] * c, self.amps[i] * s);
        }
    }

    /// Σ_n |a(n)|/√n, the sup bound for the block's polynomial.
    fn sup_bound(&self) -> f64 {
        self.amps.iter().map(|a| a.abs()).sum()
    }
}

fn check_t_max(t_max: f64) -> Result<()> {
    if !(t_max > 0.0) || t_max > T_MAX_CAP {
        return Err(Error::Domain(format!(
            "integration height t_max = {t_max} outside (0, {T_MAX_CAP}]"
        )));
    }
    Ok(())
}

fn check_log_power(log_power: f64) -> Result<()> {
    if !(log_power >= 0.0) || !log_power.is_finite() {
        return Err(Error::Domain(format!(
            "log power {log_power} must be a finite nonnegative real"
        )));
    }
    Ok(())
}

fn primitive_tables(d: u64) -> Result<Vec<Vec<Complex64>>> {
    let chars = character_group(d)?;
    Ok(chars
        .iter()
        .filter(|c| c.is_primitive)
        .map(|chi| (0..d).map(|r| chi.eval(r)).collect())
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct FourthMomentReport {
    pub d: u64,
    pub x: usize,
    pub kind: CoefKind,
    pub t_max: f64,
    pub log_power: f64,
    /// ∫ Σ*_{χ mod d} |Σ_{n≤X} a(n)χ(n)n^{−1/2−it}|⁴ dt/(t²+1), |t| ≤ t_max.
    pub lhs: f64,
    /// lhs normalized by d·(log dX)^log_power.
    pub ratio: f64,
    /// Sup-norm envelope times the measure of |t| > t_max.
    pub tail_bound: f64,
    pub primitive_count: usize,
}

/// Truncated fourth-moment integral for coefficients a(n) = 1 or log n.
pub fn fourth_moment_integral(
    d: u64,
    x: usize,
    kind: CoefKind,
    t_max: f64,
    log_power: f64,
) -> Result<FourthMomentReport> {
    fourth_moment_on_grid(d, x, kind, t_max, log_power, DEFAULT_PANEL_W, DEFAULT_PANEL_NODES)
}

pub(crate) fn fourth_moment_on_grid(
    d: u64,
    x: usize,
    kind: CoefKind,
    t_max: f64,
    log_power: f64,
    panel_w: f64,
    panel_nodes: usize,
) -> Result<FourthMomentReport> {
    if !(2..=FOURTH_D_MAX).contains(&d) {
        return Err(Error::Budget(format!(
            "modulus d = {d} outside [2, {FOURTH_D_MAX}]"
        )));
    }
    if x == 0 || x > FOURTH_X_MAX {
        return Err(Error::Budget(format!(
            "length X = {x} outside [1, {FOURTH_X_MAX}]"
        )));
    }
    if kind == CoefKind::Moebius {
        return Err(Error::Domain(
            "fourth moment takes coefficient kind one or log".into(),
        ));
    }
    check_t_max(t_max)?;
    check_log_power(log_power)?;

    let tables = primitive_tables(d)?;
    let block = PolyBlock::from_range(1, x as u64, kind, d, None);
    let (ts, ws) = even_line_grid(t_max, panel_w, panel_nodes);
    let mut g = vec![Complex64::new(0.0, 0.0); d as usize];
    let mut lhs = 0.0;
    for (&t, &w) in ts.iter().zip(&ws) {
        block.residue_sums(t, &mut g);
        let mut node_sum = 0.0;
        for table in &tables {
            let mut s = Complex64::new(0.0, 0.0);
            for (zr, zg) in table.iter().zip(&g) {
                s += zr * zg;
            }
            let m2 = s.norm_sqr();
            node_sum += m2 * m2;
        }
        lhs += w * node_sum;
    }

    let envelope = tables.len() as f64 * block.sup_bound().powi(4);
    let tail_bound = envelope * (PI - 2.0 * t_max.atan());
    let ratio = lhs / (d as f64 * (d as f64 * x as f64).ln().powf(log_power));
    Ok(FourthMomentReport {
        d,
        x,
        kind,
        t_max,
        log_power,
        lhs,
        ratio,
        tail_bound,
        primitive_count: tables.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CharPolyReport {
    pub d: u64,
    pub t_max: f64,
    pub log_power: f64,
    pub active_slots: usize,
    /// Π_j max(N_j, 1): the length scale entering the envelope.
    pub scale_n: f64,
    /// ∫ Σ*_{χ mod d} |Π_j Σ_{n∼N_j} a_j(n)χ(n)n^{−1/2−it}| dt/(t²+1).
    pub lhs: f64,
    /// ((N+d)²/d)·N^{1/16}·(log dN)^log_power.
    pub rhs_envelope: f64,
    pub tail_bound: f64,
    pub primitive_count: usize,
}

/// Truncated first-moment integral of a product of dyadic block polynomials
/// over primitive characters mod d, with the fitted envelope it is compared
/// against. Desk scale: at most 4 active slots, Π(2N_j) ≤ 10^5 over them.
pub fn char_poly_integral(
    tuple: &DyadicTuple,
    d: u64,
    t_max: f64,
    log_power: f64,
) -> Result<CharPolyReport> {
    char_poly_on_grid(tuple, d, t_max, log_power, DEFAULT_PANEL_W, DEFAULT_PANEL_NODES)
}

pub(crate) fn char_poly_on_grid(
    tuple: &DyadicTuple,
    d: u64,
    t_max: f64,
    log_power: f64,
    panel_w: f64,
    panel_nodes: usize,
) -> Result<CharPolyReport> {
    if !(2..=POLY_D_MAX).contains(&d) {
        return Err(Error::Budget(format!(
            "modulus d = {d} outside [2, {POLY_D_MAX}]"
        )));
    }
    check_t_max(t_max)?;
    check_log_power(log_power)?;
    let active = active_slots(tuple);
    if active.len() > POLY_ACTIVE_MAX {
        return Err(Error::Budget(format!(
            "{} active slots exceed the desk-scale cap {POLY_ACTIVE_MAX}",
            active.len()
        )));
    }
    let length: f64 = active.iter().map(|&j| 2.0 * tuple.sizes()[j]).product();
    if length > POLY_LEN_MAX {
        return Err(Error::Budget(format!(
            "total block length {length:.3e} exceeds {POLY_LEN_MAX:.0e}"
        )));
    }

    let (lhs, blocks, prim_count) =
        product_moment_on_grid(tuple, &active, d, t_max, panel_w, panel_nodes, 1)?;

    let scale_n: f64 = tuple.sizes().iter().map(|&n| n.max(1.0)).product();
    let rhs_envelope = (scale_n + d as f64).powi(2) / d as f64
        * scale_n.powf(1.0 / 16.0)
        * (d as f64 * scale_n).ln().powf(log_power);
    let sup: f64 = blocks.iter().map(PolyBlock::sup_bound).product();
    let tail_bound = prim_count as f64 * sup * (PI - 2.0 * t_max.atan());
    Ok(CharPolyReport {
        d,
        t_max,
        log_power,
        active_slots: active.len(),
        scale_n,
        lhs,
        rhs_envelope,
        tail_bound,
        primitive_count: prim_count,
    })
}

/// Slots that contribute anything besides the constant factor 1: a padding
/// slot holds only n = 1 with coefficient 1.
fn active_slots(tuple: &DyadicTuple) -> Vec<usize> {
    (0..tuple.sizes().len())
        .filter(|&j| tuple.sizes()[j] > 0.5 || tuple.kinds()[j] != CoefKind::One)
        .collect()
}

/// ∫ Σ*_{χ mod d} |Π_{j∈slots} P_j(χ, t)|^power dt/(t²+1) on the given
/// grid. Returns the integral, the built blocks, and the primitive count.
pub(crate) fn product_moment_on_grid(
    tuple: &DyadicTuple,
    slots: &[usize],
    d: u64,
    t_max: f64,
    panel_w: f64,
    panel_nodes: usize,
    power: u32,
) -> Result<(f64, Vec<PolyBlock>, usize)> {
    let sizes = tuple.sizes();
    let kinds = tuple.kinds();
    let needs_moebius = slots.iter().any(|&j| kinds[j] == CoefKind::Moebius);
    let hi_max = slots
        .iter()
        .map(|&j| (2.0 * sizes[j]).floor() as u64)
        .max()
        .unwrap_or(1);
    let tables_mu;
    let moebius: Option<&[i8]> = if needs_moebius {
        tables_mu = sieve_arith(hi_max as usize)?;
        Some(&tables_mu.moebius)
    } else {
        None
    };

    let blocks: Vec<PolyBlock> = slots
        .iter()
        .map(|&j| {
            let lo = sizes[j].floor() as u64 + 1;
            let hi = (2.0 * sizes[j]).floor() as u64;
            PolyBlock::from_range(lo, hi, kinds[j], d, moebius)
        })
        .collect();

    let tables = primitive_tables(d)?;
    let (ts, ws) = even_line_grid(t_max, panel_w, panel_nodes);
    let dd = d as usize;
    let mut g = vec![vec![Complex64::new(0.0, 0.0); dd]; blocks.len()];
    let mut lhs = 0.0;
    for (&t, &w) in ts.iter().zip(&ws) {
        for (block, gb) in blocks.iter().zip(g.iter_mut()) {
            block.residue_sums(t, gb);
        }
        let mut node_sum = 0.0;
        for table in &tables {
            let mut p = Complex64::new(1.0, 0.0);
            for gb in &g {
                let mut s = Complex64::new(0.0, 0.0);
                for (zr, zg) in table.iter().zip(gb.iter()) {
                    s += zr * zg;
                }
                p *= s;
            }
            node_sum += p.norm().powi(power as i32);
        }
        lhs += w * node_sum;
    }
    Ok((lhs, blocks, tables.len()))
}

/// The two sides of the envelope comparison ((N+d)²/d)·N^{1/16} against
/// d·N^{1/16} + d^{1/2}·N^{9/16} + N^{17/16}. The sum never exceeds 3/2
/// of the product side: d² + d^{3/2}√N + dN ≤ (3/2)(N+d)² by d^{3/2}√N
/// ≤ d(d+N)/2.
pub fn tailoring_sides(n: f64, d: f64) -> Result<(f64, f64)> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::Domain(format!("length N = {n} must be at least 1")));
    }
    if !(d >= 1.0) || !d.is_finite() {
        return Err(Error::Domain(format!("modulus d = {d} must be at least 1")));
    }
    let lhs = (n + d).powi(2) / d * n.powf(1.0 / 16.0);
    let rhs = d * n.powf(1.0 / 16.0) + d.sqrt() * n.powf(9.0 / 16.0) + n.powf(17.0 / 16.0);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rayon::prelude::*;

    #[test]
    fn orthogonality_pins() {
        // mod 3 has one primitive character, chi(2) = -1
        let a = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let (lhs, rhs) = large_sieve_check(3, 2, &a).unwrap();
        assert!(lhs.abs() < 1e-12, "lhs {lhs}");
        assert!((rhs - 10.0).abs() < 1e-12);

        // a supported on one n coprime to d: lhs = (#primitive)·|a(n)|²
        let mut b = [Complex64::new(0.0, 0.0); 3];
        b[2] = Complex64::new(2.0, -1.0);
        let (lhs, rhs) = large_sieve_check(7, 3, &b).unwrap();
        assert!((lhs - 5.0 * 5.0).abs() < 1e-10, "lhs {lhs}");
        assert!((rhs - 50.0).abs() < 1e-12);
        assert!(lhs <= rhs);
    }

    #[test]
    fn random_vectors_never_violate_the_sieve() {
        let violations: usize = (0..10_000usize)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(0x0515_e000 + trial as u64);
                let d = rng.gen_range(2..=100u64);
                let x = rng.gen_range(1..=1000usize);
                let a: Vec<Complex64> = (0..x)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let (lhs, rhs) = large_sieve_check(d, x, &a).unwrap();
                usize::from(lhs > rhs * (1.0 + 1e-12) + 1e-12)
            })
            .sum();
        assert_eq!(violations, 0);
    }

    #[test]
    fn fourth_moment_self_converges() {
        let coarse = fourth_moment_integral(3, 10, CoefKind::One, 8.0, 13.0).unwrap();
        let fine = fourth_moment_on_grid(3, 10, CoefKind::One, 8.0, 13.0, 0.25, 40).unwrap();
        assert!(coarse.lhs > 0.0);
        assert!(
            (coarse.lhs - fine.lhs).abs() <= 1e-6 * coarse.lhs.max(1.0),
            "coarse {} fine {}",
            coarse.lhs,
            fine.lhs
        );
        assert!(coarse.ratio > 0.0 && coarse.ratio.is_finite());
        assert!(coarse.tail_bound > 0.0);
    }

    #[test]
    fn log_kind_sits_under_the_log_x_envelope() {
        // partial-summation comparison at matched parameters
        let one = fourth_moment_integral(5, 100, CoefKind::One, 6.0, 13.0).unwrap();
        let log = fourth_moment_integral(5, 100, CoefKind::Log, 6.0, 13.0).unwrap();
        let cap = (100.0_f64).ln().powi(4) * one.lhs;
        assert!(
            log.lhs <= cap,
            "log-kind lhs {} exceeds (log X)^4 * one-kind lhs {}",
            log.lhs,
            cap
        );
    }

    #[test]
    fn fourth_moment_mini_grid_has_finite_ratio() {
        let mut max_ratio = 0.0_f64;
        for &d in &[3u64, 7, 11] {
            for &x in &[50usize, 200] {
                let r = fourth_moment_integral(d, x, CoefKind::One, 5.0, 13.0).unwrap();
                assert!(r.ratio.is_finite() && r.ratio >= 0.0);
                max_ratio = max_ratio.max(r.ratio);
            }
        }
        assert!(max_ratio > 0.0);
    }

    #[test]
    fn padded_product_is_primitive_mass() {
        // every slot holds only n = 1: the integrand is the number of
        // primitive characters, and ∫ dt/(1+t²) truncates to 2·atan(t_max)
        let t = DyadicTuple::new(&[], 0.1, 100.0).unwrap();
        let r = char_poly_integral(&t, 5, 10.0, 4.0).unwrap();
        assert_eq!(r.primitive_count, 3);
        assert_eq!(r.active_slots, 0);
        let expect = 3.0 * 2.0 * 10.0_f64.atan();
        assert!((r.lhs - expect).abs() < 1e-8, "lhs {} expect {expect}", r.lhs);
        assert!((r.scale_n - 1.0).abs() < 1e-12);
        assert!(r.rhs_envelope.is_finite() && r.rhs_envelope > 0.0);
    }

    #[test]
    fn one_active_block_matches_a_brute_force_integral() {
        let t = DyadicTuple::new(&[(8.0, CoefKind::One)], 0.1, 100.0).unwrap();
        let r = char_poly_integral(&t, 5, 4.0, 4.0).unwrap();

        // trapezoid oracle over the same integrand, built from scratch
        let chars = character_group(5).unwrap();
        let prim: Vec<_> = chars.iter().filter(|c| c.is_primitive).collect();
        let steps = 20_000usize;
        let h = 4.0 / steps as f64;
        let f = |t: f64| -> f64 {
            let mut sum = 0.0;
            for chi in &prim {
                let mut s = Complex64::new(0.0, 0.0);
                for n in 9u64..=16 {
                    let nf = n as f64;
                    let phase = Complex64::from_polar(nf.powf(-0.5), -t * nf.ln());
                    s += chi.eval(n) * phase;
                }
                sum += s.norm();
            }
            2.0 * sum / (1.0 + t * t)
        };
        let mut oracle = 0.5 * (f(0.0) + f(4.0));
        for i in 1..steps {
            oracle += f(i as f64 * h);
        }
        oracle *= h;
        assert!(
            (r.lhs - oracle).abs() < 1e-5,
            "lhs {} oracle {oracle}",
            r.lhs
        );

        // grid refinement stays put
        let fine = char_poly_on_grid(&t, 5, 4.0, 4.0, 0.25, 40).unwrap();
        assert!((r.lhs - fine.lhs).abs() < 1e-6 * r.lhs.max(1.0));
    }

    #[test]
    fn product_first_moment_obeys_cauchy_schwarz() {
        // |Σ_χ ∫ P₀P₁| ≤ √(∫Σ|P₀|²)·√(∫Σ|P₁|²) on the same grid
        let t = DyadicTuple::new(
            &[(6.0, CoefKind::One), (10.0, CoefKind::Log)],
            0.1,
            100.0,
        )
        .unwrap();
        let r = char_poly_integral(&t, 7, 6.0, 4.0).unwrap();
        let (m0, _, _) =
            product_moment_on_grid(&t, &[0], 7, 6.0, DEFAULT_PANEL_W, DEFAULT_PANEL_NODES, 2)
                .unwrap();
        let (m1, _, _) =
            product_moment_on_grid(&t, &[1], 7, 6.0, DEFAULT_PANEL_W, DEFAULT_PANEL_NODES, 2)
                .unwrap();
        assert!(
            r.lhs <= (m0 * m1).sqrt() * (1.0 + 1e-9) + 1e-12,
            "lhs {} bound {}",
            r.lhs,
            (m0 * m1).sqrt()
        );
    }

    #[test]
    fn moebius_blocks_integrate() {
        // a small smooth block with moebius coefficients runs end to end
        let t = DyadicTuple::new(
            &[(4.0, CoefKind::Moebius), (3.0, CoefKind::One)],
            0.1,
            1e9,
        )
        .unwrap();
        let r = char_poly_integral(&t, 3, 5.0, 4.0).unwrap();
        assert!(r.lhs.is_finite() && r.lhs >= 0.0);
        assert_eq!(r.active_slots, 2);
    }

    #[test]
    fn tailoring_comparison_holds_on_a_grid() {
        for i in 0..=60 {
            let n = 10f64.powf(i as f64 / 10.0);
            for j in 0..=40 {
                let d = 10f64.powf(j as f64 / 10.0);
                let (lhs, rhs) = tailoring_sides(n, d).unwrap();
                assert!(lhs.is_finite() && rhs.is_finite());
                assert!(
                    rhs <= 1.5 * lhs * (1.0 + 1e-12),
                    "N {n} d {d}: rhs {rhs} lhs {lhs}"
                );
                assert!(3.0 * lhs >= rhs);
            }
        }
        assert!(tailoring_sides(0.5, 2.0).is_err());
        assert!(tailoring_sides(2.0, 0.0).is_err());
    }

    #[test]
    fn desk_scale_caps_are_enforced() {
        let a = [Complex64::new(1.0, 0.0)];
        assert!(large_sieve_check(1, 1, &a).is_err());
        assert!(large_sieve_check(3, 0, &a).is_err());
        assert!(large_sieve_check(3, 2, &a).is_err());

        assert!(fourth_moment_integral(1, 10, CoefKind::One, 5.0, 13.0).is_err());
        assert!(fourth_moment_integral(201, 10, CoefKind::One, 5.0, 13.0).is_err());
        assert!(fourth_moment_integral(3, 0, CoefKind::One, 5.0, 13.0).is_err());
        assert!(fourth_moment_integral(3, 10_001, CoefKind::One, 5.0, 13.0).is_err());
        assert!(fourth_moment_integral(3, 10, CoefKind::Moebius, 5.0, 13.0).is_err());
        assert!(fourth_moment_integral(3, 10, CoefKind::One, 0.0, 13.0).is_err());
        assert!(fourth_moment_integral(3, 10, CoefKind::One, 5.0, -1.0).is_err());

        // five active slots
        let five = DyadicTuple::new(
            &[
                (2.0, CoefKind::One),
                (2.0, CoefKind::One),
                (2.0, CoefKind::One),
                (2.0, CoefKind::One),
                (2.0, CoefKind::One),
            ],
            0.1,
            100.0,
        )
        .unwrap();
        assert!(char_poly_integral(&five, 5, 5.0, 4.0).is_err());

        // length product beyond 10^5
        let long = DyadicTuple::new(
            &[(300.0, CoefKind::One), (300.0, CoefKind::One)],
            0.1,
            1e9,
        )
        .unwrap();
        assert!(char_poly_integral(&long, 5, 5.0, 4.0).is_err());
    }
}
