//! Dirichlet character groups: enumeration by CRT components, discrete-log
//! evaluation tables, conductors, primitivity, and Gauss sums.

use super::{factorize, gcd_u64, mod_pow};
use crate::error::{Error, Result};
use num_complex::Complex64;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

const NON_UNIT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
enum CompKind {
    /// (Z/p^e)* for odd p: cyclic of order φ(p^e).
    OddPrime,
    /// (Z/2)*: trivial.
    TwoE1,
    /// (Z/4)*: order 2, generated by -1.
    TwoE2,
    /// (Z/2^e)*, e >= 3: <-1> x <5>, orders 2 and 2^{e-2}.
    TwoBig,
}

#[derive(Debug, Clone)]
struct Component {
    p: u64,
    e: u32,
    pm: u64,
    kind: CompKind,
    /// Discrete logs of units mod pm (NON_UNIT elsewhere). For TwoBig the
    /// entry packs (a, b) with x = (-1)^a 5^b as a * 2^{e-2} + b.
    dlog: Vec<u32>,
    /// Orders of the cyclic factors this component contributes.
    orders: Vec<u64>,
}

#[derive(Debug)]
struct GroupData {
    modulus: u64,
    comps: Vec<Component>,
    /// Concatenation of all component factor orders; their product is φ(q).
    factor_orders: Vec<u64>,
}

/// A Dirichlet character mod q, carried as exponents against the cyclic
/// factors of (Z/q)*. Evaluation is table-driven and exact in the exponent.
#[derive(Clone)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub index: u64,
    pub conductor: u64,
    pub is_primitive: bool,
    pub is_principal: bool,
    exps: Vec<u64>,
    group: Arc<GroupData>,
}

impl std::fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("modulus", &self.modulus)
            .field("index", &self.index)
            .field("conductor", &self.conductor)
            .field("is_primitive", &self.is_primitive)
            .field("is_principal", &self.is_principal)
            .finish()
    }
}

fn primitive_root_odd(p: u64, e: u32) -> u64 {
    let phi_p = p - 1;
    let prime_factors: Vec<u64> = factorize(phi_p).into_iter().map(|(q, _)| q).collect();
    let mut g = 2u64;
    loop {
        if g % p != 0
            && prime_factors
                .iter()
                .all(|&q| mod_pow(g, phi_p / q, p) != 1)
        {
            break;
        }
        g += 1;
    }
    if e == 1 {
        return g;
    }
    // lift: g generates (Z/p^e)* unless g^{p-1} = 1 mod p^2
    if mod_pow(g, p - 1, p * p) == 1 {
        g += p;
    }
    g
}

fn build_component(p: u64, e: u32) -> Component {
    let pm = p.pow(e);
    if p == 2 {
        match e {
            1 => {
                let mut dlog = vec![NON_UNIT; 2];
                dlog[1] = 0;
                Component { p, e, pm, kind: CompKind::TwoE1, dlog, orders: vec![1] }
            }
            2 => {
                let mut dlog = vec![NON_UNIT; 4];
                dlog[1] = 0;
                dlog[3] = 1;
                Component { p, e, pm, kind: CompKind::TwoE2, dlog, orders: vec![2] }
            }
            _ => {
                let ord5 = pm / 4;
                let mut dlog = vec![NON_UNIT; pm as usize];
                for a in 0..2u64 {
                    let mut x = if a == 0 { 1u64 } else { pm - 1 };
                    for b in 0..ord5 {
                        dlog[x as usize] = (a * ord5 + b) as u32;
                        x = x * 5 % pm;
                    }
                }
                Component { p, e, pm, kind: CompKind::TwoBig, dlog, orders: vec![2, ord5] }
            }
        }
    } else {
        let phi = pm / p * (p - 1);
        let g = primitive_root_odd(p, e);
        let mut dlog = vec![NON_UNIT; pm as usize];
        let mut x = 1u64;
        for k in 0..phi {
            dlog[x as usize] = k as u32;
            x = x * g % pm;
        }
        Component { p, e, pm, kind: CompKind::OddPrime, dlog, orders: vec![phi] }
    }
}

fn build_group(q: u64) -> Arc<GroupData> {
    let comps: Vec<Component> = factorize(q)
        .into_iter()
        .map(|(p, e)| build_component(p, e))
        .collect();
    let factor_orders: Vec<u64> = comps.iter().flat_map(|c| c.orders.clone()).collect();
    Arc::new(GroupData { modulus: q, comps, factor_orders })
}

static GROUP_CACHE: Lazy<Mutex<HashMap<u64, Arc<GroupData>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn group_data(q: u64) -> Arc<GroupData> {
    // cache small moduli; large tables are rebuilt per call
    if q <= 20_000 {
        let mut cache = GROUP_CACHE.lock().unwrap();
        if let Some(g) = cache.get(&q) {
            return g.clone();
        }
        let g = build_group(q);
        if cache.len() < 4096 {
            cache.insert(q, g.clone());
        }
        return g;
    }
    build_group(q)
}

/// Conductor of the component character with exponents `exps` (one per
/// cyclic factor of the component).
fn component_conductor(comp: &Component, exps: &[u64]) -> u64 {
    match comp.kind {
        CompKind::TwoE1 => 1,
        CompKind::TwoE2 => {
            if exps[0] % 2 == 0 {
                1
            } else {
                4
            }
        }
        CompKind::TwoBig => {
            let ord5 = comp.orders[1];
            let b = exps[1] % ord5;
            if b == 0 {
                if exps[0] % 2 == 0 {
                    1
                } else {
                    4
                }
            } else {
                // order of the <5>-part is 2^m; the character factors through
                // (Z/2^{m+2})* and no smaller power
                4 * (ord5 / gcd_u64(b, ord5))
            }
        }
        CompKind::OddPrime => {
            let phi = comp.orders[0];
            let m = exps[0] % phi;
            if m == 0 {
                return 1;
            }
            let order = phi / gcd_u64(m, phi);
            let mut pj = 1u64;
            for _ in 0..comp.e {
                pj *= comp.p;
                let phi_j = pj / comp.p * (comp.p - 1);
                if phi_j % order == 0 {
                    return pj;
                }
            }
            comp.pm
        }
    }
}

fn make_character(group: Arc<GroupData>, exps: Vec<u64>) -> DirichletCharacter {
    debug_assert_eq!(exps.len(), group.factor_orders.len());
    let mut index = 0u64;
    let mut radix = 1u64;
    for (x, ord) in exps.iter().zip(&group.factor_orders) {
        index += x * radix;
        radix *= ord;
    }
    let mut conductor = 1u64;
    let mut off = 0;
    for comp in &group.comps {
        let k = comp.orders.len();
        conductor *= component_conductor(comp, &exps[off..off + k]);
        off += k;
    }
    let is_principal = exps.iter().all(|&x| x == 0);
    DirichletCharacter {
        modulus: group.modulus,
        index,
        conductor,
        is_primitive: conductor == group.modulus,
        is_principal,
        exps,
        group,
    }
}

/// Enumerate all φ(q) Dirichlet characters mod q (1 ≤ q ≤ 10^6). Index 0 is
/// the principal character.
pub fn character_group(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q < 1 {
        return Err(Error::Domain("modulus must be at least 1".into()));
    }
    if q > 1_000_000 {
        return Err(Error::Budget(format!("modulus {q} exceeds 10^6")));
    }
    let group = group_data(q);
    let nfac = group.factor_orders.len();
    let total: u64 = group.factor_orders.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    let mut exps = vec![0u64; nfac];
    loop {
        out.push(make_character(group.clone(), exps.clone()));
        // mixed-radix increment, least-significant factor first
        let mut i = 0;
        while i < nfac {
            exps[i] += 1;
            if exps[i] < group.factor_orders[i] {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
        if i == nfac {
            break;
        }
    }
    debug_assert_eq!(out.len() as u64, total);
    Ok(out)
}

impl DirichletCharacter {
    /// χ(n), with χ(n) = 0 when gcd(n, q) > 1.
    pub fn eval(&self, n: u64) -> Complex64 {
        let mut frac = 0.0f64;
        let mut off = 0;
        for comp in &self.group.comps {
            let r = (n % comp.pm) as usize;
            let d = comp.dlog[r];
            if d == NON_UNIT {
                return Complex64::new(0.0, 0.0);
            }
            match comp.kind {
                CompKind::TwoBig => {
                    let ord5 = comp.orders[1];
                    let a = d as u64 / ord5;
                    let b = d as u64 % ord5;
                    frac += (self.exps[off] * a % 2) as f64 / 2.0;
                    frac += (self.exps[off + 1] * b % ord5) as f64 / ord5 as f64;
                }
                _ => {
                    let ord = comp.orders[0];
                    if ord > 1 {
                        frac += (self.exps[off] * d as u64 % ord) as f64 / ord as f64;
                    }
                }
            }
            off += comp.orders.len();
        }
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * frac)
    }

    pub fn eval_signed(&self, n: i64) -> Complex64 {
        self.eval(n.rem_euclid(self.modulus.max(1) as i64) as u64)
    }

    /// Parity a ∈ {0, 1} with χ(-1) = (-1)^a.
    pub fn parity(&self) -> u32 {
        if self.modulus <= 2 {
            return 0;
        }
        if self.eval(self.modulus - 1).re < 0.0 {
            1
        } else {
            0
        }
    }

    /// The complex conjugate character χ̄ = χ^{-1}.
    pub fn conjugate(&self) -> DirichletCharacter {
        let exps: Vec<u64> = self
            .exps
            .iter()
            .zip(&self.group.factor_orders)
            .map(|(&x, &ord)| if x == 0 { 0 } else { ord - x })
            .collect();
        make_character(self.group.clone(), exps)
    }

    /// The primitive character inducing χ.
    pub fn primitive_inducer(&self) -> DirichletCharacter {
        if self.is_primitive {
            return self.clone();
        }
        let new_group = group_data(self.conductor);
        let mut new_exps = vec![0u64; new_group.factor_orders.len()];
        let mut new_off_by_p: HashMap<u64, usize> = HashMap::new();
        let mut off = 0;
        for comp in &new_group.comps {
            new_off_by_p.insert(comp.p, off);
            off += comp.orders.len();
        }
        let mut src_off = 0;
        for comp in &self.group.comps {
            let cond = component_conductor(comp, &self.exps[src_off..src_off + comp.orders.len()]);
            if cond > 1 {
                let noff = new_off_by_p[&comp.p];
                let ncomp = new_group
                    .comps
                    .iter()
                    .find(|c| c.p == comp.p)
                    .expect("conductor component present");
                match comp.kind {
                    CompKind::OddPrime => {
                        // exponent divides down by φ(p^e)/φ(p^j)
                        new_exps[noff] = self.exps[src_off] / (comp.orders[0] / ncomp.orders[0]);
                    }
                    CompKind::TwoE2 => {
                        new_exps[noff] = self.exps[src_off] % 2;
                    }
                    CompKind::TwoBig => {
                        let a = self.exps[src_off] % 2;
                        let b = self.exps[src_off + 1];
                        match ncomp.kind {
                            CompKind::TwoE2 => {
                                new_exps[noff] = a;
                            }
                            CompKind::TwoBig => {
                                new_exps[noff] = a;
                                new_exps[noff + 1] = b / (comp.orders[1] / ncomp.orders[1]);
                            }
                            _ => unreachable!("conductor 2-part below 4 with nonzero exponent"),
                        }
                    }
                    CompKind::TwoE1 => unreachable!("trivial component has conductor 1"),
                }
            }
            src_off += comp.orders.len();
        }
        make_character(new_group, new_exps)
    }

    /// Product of two characters with coprime moduli, as a character mod
    /// q1 * q2.
    pub fn product(&self, other: &DirichletCharacter) -> Result<DirichletCharacter> {
        if gcd_u64(self.modulus, other.modulus) != 1 {
            return Err(Error::Domain(
                "character product requires coprime moduli".into(),
            ));
        }
        let q = self.modulus * other.modulus;
        if q > 1_000_000 {
            return Err(Error::Budget(format!("product modulus {q} exceeds 10^6")));
        }
        let group = group_data(q);
        let mut exps = vec![0u64; group.factor_orders.len()];
        let mut off = 0;
        for comp in &group.comps {
            let (src, src_group) = if self.modulus % comp.p == 0 {
                (&self.exps, &self.group)
            } else {
                (&other.exps, &other.group)
            };
            let mut s_off = 0;
            for s_comp in &src_group.comps {
                if s_comp.p == comp.p {
                    debug_assert_eq!(s_comp.e, comp.e);
                    for k in 0..comp.orders.len() {
                        exps[off + k] = src[s_off + k];
                    }
                    break;
                }
                s_off += s_comp.orders.len();
            }
            off += comp.orders.len();
        }
        Ok(make_character(group, exps))
    }
}

/// Gauss sum τ(χ) = Σ_{b mod q} χ(b) e(b/q).
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<Complex64> {
    let q = chi.modulus;
    if q > 1_000_000 {
        return Err(Error::Budget(format!("modulus {q} exceeds 10^6")));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let tau = 2.0 * std::f64::consts::PI / q as f64;
    for b in 1..=q {
        let v = chi.eval(b);
        if v.re != 0.0 || v.im != 0.0 {
            acc += v * Complex64::from_polar(1.0, tau * b as f64);
        }
    }
    Ok(acc)
}
