//! Explicit constants of the diameter and rectification theorems, evaluated
//! in the log domain so that thresholds like `(16K)^{-12K²}` do not
//! underflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::largecoeff2_formula;

/// Relative slack on log-domain comparisons of `α` against a threshold, so
/// that `α` given as the rounded threshold counts as on the boundary.
const BOUNDARY_REL: f64 = 1e-12;

/// `ln (16K)^{-12K²}`.
pub fn ln_threshold_thm1(k_const: f64) -> f64 {
    -12.0 * k_const * k_const * (16.0 * k_const).ln()
}

/// `ln (16kK)^{-12K²}`.
pub fn ln_threshold_thm2(k_const: f64, k: u32) -> f64 {
    -12.0 * k_const * k_const * (16.0 * k as f64 * k_const).ln()
}

/// `12 α^{1/4K²} sqrt(log 1/α)`, as a fraction of `N`.
pub fn delta_bound_ln(ln_alpha: f64, k_const: f64) -> f64 {
    12.0 * (ln_alpha / (4.0 * k_const * k_const)).exp() * (-ln_alpha).sqrt()
}

fn within(ln_alpha: f64, ln_threshold: f64) -> bool {
    ln_alpha <= ln_threshold + BOUNDARY_REL * ln_threshold.abs()
}

/// The chain `τ = K²α`, `η` from the large-coefficient lemma, `δ = 2K√η`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReplay {
    pub ln_tau: f64,
    pub eta: f64,
    pub delta: f64,
    /// `τ <= 14^{-2K²}`.
    pub tau_gate: bool,
    pub delta_below_third: bool,
    /// `δ <= 12 α^{1/4K²} sqrt(log 1/α)`.
    pub delta_within_bound: bool,
    /// `δ < 1/k`, evaluated when `α` is under the second threshold.
    pub delta_below_inv_k: Option<bool>,
}

impl ChainReplay {
    pub fn holds(&self) -> bool {
        self.tau_gate && self.delta_below_third && self.delta_within_bound && self.delta_below_inv_k.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub alpha: f64,
    pub ln_alpha: f64,
    pub k_const: f64,
    pub k: u32,
    pub threshold_thm1: f64,
    pub ln_threshold_thm1: f64,
    pub threshold_thm2: f64,
    pub ln_threshold_thm2: f64,
    pub delta_bound: f64,
    pub alpha_within_thm1: bool,
    pub alpha_within_thm2: bool,
    pub delta_bound_below_third: bool,
    pub delta_bound_below_inv_k: bool,
    /// Present when `α` is under the first threshold.
    pub replay: Option<ChainReplay>,
}

pub fn bound_calculator(alpha: f64, k_const: f64, k: u32) -> Result<BoundReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    bound_calculator_ln(alpha.ln(), k_const, k)
}

/// Same as [`bound_calculator`] with `α` given by its logarithm.
pub fn bound_calculator_ln(ln_alpha: f64, k_const: f64, k: u32) -> Result<BoundReport> {
    if !(ln_alpha < 0.0 && ln_alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("ln alpha must be negative and finite, got {ln_alpha}")));
    }
    if !(k_const >= 1.0 && k_const.is_finite()) {
        return Err(Error::InvalidArgument(format!("K must be at least 1, got {k_const}")));
    }
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    let t1 = ln_threshold_thm1(k_const);
    let t2 = ln_threshold_thm2(k_const, k);
    let delta_bound = delta_bound_ln(ln_alpha, k_const);
    let alpha_within_thm1 = within(ln_alpha, t1);
    let alpha_within_thm2 = within(ln_alpha, t2);
    let replay = alpha_within_thm1.then(|| {
        let k2 = k_const * k_const;
        let ln_tau = k2.ln() + ln_alpha;
        let eta = largecoeff2_formula(ln_tau, k_const);
        let delta = 2.0 * k_const * eta.sqrt();
        ChainReplay {
            ln_tau,
            eta,
            delta,
            tau_gate: ln_tau <= -2.0 * k2 * 14f64.ln(),
            delta_below_third: delta < 1.0 / 3.0,
            delta_within_bound: delta <= delta_bound,
            delta_below_inv_k: alpha_within_thm2.then(|| delta < 1.0 / k as f64),
        }
    });
    Ok(BoundReport {
        alpha: ln_alpha.exp(),
        ln_alpha,
        k_const,
        k,
        threshold_thm1: t1.exp(),
        ln_threshold_thm1: t1,
        threshold_thm2: t2.exp(),
        ln_threshold_thm2: t2,
        delta_bound,
        alpha_within_thm1,
        alpha_within_thm2,
        delta_bound_below_third: delta_bound < 1.0 / 3.0,
        delta_bound_below_inv_k: delta_bound < 1.0 / k as f64,
        replay,
    })
}
