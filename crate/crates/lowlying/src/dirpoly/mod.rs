//! Dirichlet-polynomial machinery: the Heath-Brown expansion of the von
//! Mangoldt function, dyadic block bookkeeping for 40-variable products,
//! constructive splitting witnesses, mean-value and fourth-moment
//! integrals over primitive characters, and density-conjecture zero
//! counts at desk scale.

pub mod grand_density;
pub mod heath_brown;
pub mod sieve_ineq;
pub mod splitting;

use crate::error::{Error, Result};
use serde::Serialize;

pub use grand_density::{grand_density_ratio, GrandDensityReport};
pub use heath_brown::heath_brown_check;
pub use sieve_ineq::{
    char_poly_integral, fourth_moment_integral, large_sieve_check, tailoring_sides,
    CharPolyReport, FourthMomentReport,
};
pub use splitting::{
    grid_split_sweep, random_split_sweep, split_window, splitting_witness,
    splitting_witness_holo, SplitSweepSummary, SplitWitness,
};

/// Number of variable slots in a decomposed tuple. Heath-Brown with
/// K = 20 produces at most 2K = 40 active variables; shorter products
/// pad the remaining slots at size 1/2.
pub const TUPLE_SLOTS: usize = 40;

/// Support exponent for a weight-k holomorphic family: 2 − 1/(5k−2).
pub fn theta_k(k: u32) -> Result<f64> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::Domain(format!(
            "weight must be an even integer at least 2, got {k}"
        )));
    }
    Ok(2.0 - 1.0 / (5.0 * k as f64 - 2.0))
}

/// Coefficient tag of one convolution variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefKind {
    One,
    Moebius,
    Log,
}

/// A dyadic block of the 40-variable product: variable j runs over
/// (N_j, 2N_j] carrying coefficients of kind `kinds[j]`. Unused slots sit
/// at N_j = 1/2 where the block holds only n = 1.
#[derive(Debug, Clone, Serialize)]
pub struct DyadicTuple {
    sizes: Vec<f64>,
    kinds: Vec<CoefKind>,
    pub epsilon: f64,
    /// The scale parameter N that thresholds are powers of.
    pub scale: f64,
    /// Even weight k when the tuple was admitted under the Θ_k budget;
    /// None means the Maass budget N^{15/8 − ε}.
    holo_weight: Option<u32>,
}

impl DyadicTuple {
    /// Block sizes under the Maass-mode product budget Π N_j ≤ N^{15/8−ε}.
    /// `active` lists the non-padding slots; the rest fill with (1/2, one).
    pub fn new(active: &[(f64, CoefKind)], epsilon: f64, scale: f64) -> Result<Self> {
        Self::build(active, epsilon, scale, None)
    }

    /// Same under the holomorphic budget Π N_j ≤ N^{Θ_k−ε}.
    pub fn new_holo(
        active: &[(f64, CoefKind)],
        k: u32,
        epsilon: f64,
        scale: f64,
    ) -> Result<Self> {
        theta_k(k)?;
        Self::build(active, epsilon, scale, Some(k))
    }

    /// Convenience constructor taking sizes as exponents of the scale:
    /// (e, kind) becomes the block at N^e.
    pub fn from_exponents(
        active: &[(f64, CoefKind)],
        epsilon: f64,
        scale: f64,
    ) -> Result<Self> {
        let sized: Vec<(f64, CoefKind)> = active
            .iter()
            .map(|&(e, kind)| (scale.powf(e), kind))
            .collect();
        Self::build(&sized, epsilon, scale, None)
    }

    fn build(
        active: &[(f64, CoefKind)],
        epsilon: f64,
        scale: f64,
        holo_weight: Option<u32>,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Domain(format!("epsilon = {epsilon} must be positive")));
        }
        if !(scale >= 2.0) || !scale.is_finite() {
            return Err(Error::Domain(format!("scale N = {scale} must be at least 2")));
        }
        if active.len() > TUPLE_SLOTS {
            return Err(Error::Domain(format!(
                "{} variables exceed the {TUPLE_SLOTS}-slot budget",
                active.len()
            )));
        }
        let mut sizes = vec![0.5; TUPLE_SLOTS];
        let mut kinds = vec![CoefKind::One; TUPLE_SLOTS];
        for (j, &(n_j, kind)) in active.iter().enumerate() {
            if !(n_j >= 0.5) || !n_j.is_finite() {
                return Err(Error::Domain(format!(
                    "block size N_{j} = {n_j} below the floor 1/2"
                )));
            }
            sizes[j] = n_j;
            kinds[j] = kind;
        }
        let tuple = DyadicTuple {
            sizes,
            kinds,
            epsilon,
            scale,
            holo_weight,
        };
        let budget = match holo_weight {
            None => 15.0 / 8.0 - epsilon,
            Some(k) => theta_k(k)? - epsilon,
        };
        if tuple.product_ln() > budget * scale.ln() + 1e-9 {
            return Err(Error::Invariant(format!(
                "product of block sizes exceeds N^{budget:.6}"
            )));
        }
        let smooth_cut = 0.1 * scale.ln();
        for j in 0..TUPLE_SLOTS {
            if tuple.kinds[j] == CoefKind::Moebius && tuple.sizes[j].ln() > smooth_cut {
                return Err(Error::Invariant(format!(
                    "slot {j} carries a moebius coefficient above N^(1/10)"
                )));
            }
        }
        Ok(tuple)
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn kinds(&self) -> &[CoefKind] {
        &self.kinds
    }

    pub fn holo_weight(&self) -> Option<u32> {
        self.holo_weight
    }

    /// Σ_j ln N_j, the log of the full block-size product.
    pub fn product_ln(&self) -> f64 {
        self.sizes.iter().map(|n| n.ln()).sum()
    }

    /// ln N_j for every slot, the scale the witness search works on.
    pub(crate) fn ln_sizes(&self) -> Vec<f64> {
        self.sizes.iter().map(|n| n.ln()).collect()
    }
}

/// Dyadic covering of a single variable's range (lo, hi]: the block
/// starts N with (N, 2N] meeting the range, N running over 2^e, e ≥ −1.
/// Every integer in (lo, hi] lies in exactly one returned block.
pub fn dyadic_decompose(lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo >= 1.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "range ({lo}, {hi}] must satisfy 1 <= lo <= hi"
        )));
    }
    let mut out = Vec::new();
    if lo == hi {
        return Ok(out);
    }
    let mut n = 0.5;
    while n < hi {
        if 2.0 * n > lo {
            out.push(n);
        }
        n *= 2.0;
    }
    Ok(out)
}
