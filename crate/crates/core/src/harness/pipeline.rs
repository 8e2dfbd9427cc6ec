//! The diameter theorem on a concrete set: exact gates, the large
//! coefficient of `A - A` when the density gate passes, and the true
//! diameter against the claimed bound.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::fourier::{eta_largecoeff2, spectrum};
use crate::group::{difference_set, doubling_ratio, GSet, GroupSpec};
use crate::harness::bounds::delta_bound_ln;
use crate::primes::is_prime;
use crate::rectify::{diameter_with_budget, DEFAULT_DIAMETER_BUDGET};
use crate::tolerance::MAGNITUDE_SLACK;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaChain {
    pub eta: f64,
    /// `2K√η`.
    pub delta: f64,
    pub character: i64,
    pub magnitude: f64,
    /// `max |D^(r)| >= (1 - η)|D|`.
    pub coefficient_holds: bool,
    /// `diam A < δN`, when `δ < 1/3` and the diameter is known.
    pub diameter_below_delta: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub modulus: u64,
    pub size: u64,
    pub alpha: Ratio<u64>,
    /// `min(|2A|, |A-A|) / |A|`.
    pub k_const: Ratio<u64>,
    pub sum_size: u64,
    pub difference_size: u64,
    /// `|A - A| / N`.
    pub tau: Ratio<u64>,
    /// `α <= (16K)^{-12K²}`.
    pub alpha_gate: bool,
    /// `τ <= 14^{-2K²}`.
    pub tau_gate: bool,
    pub chain: Option<LemmaChain>,
    pub diameter: Option<u64>,
    /// `12 α^{1/4K²} sqrt(log 1/α) N`.
    pub diameter_bound: f64,
    /// Decided when the alpha gate passes and the diameter is known.
    pub conclusion_holds: Option<bool>,
}

impl Theorem1Report {
    pub fn falsified(&self) -> bool {
        self.conclusion_holds == Some(false)
            || self.chain.as_ref().is_some_and(|c| !c.coefficient_holds || c.diameter_below_delta == Some(false))
    }
}

pub fn theorem1_pipeline(a: &GSet) -> Result<Theorem1Report> {
    let n_mod = match a.group() {
        GroupSpec::Cyclic { modulus } => modulus,
        group => return Err(Error::Unsupported { op: "diameter theorem", group }),
    };
    if !is_prime(n_mod) {
        return Err(Error::NotPrime(n_mod));
    }
    let stats = doubling_ratio(a)?;
    let size = a.len() as u64;
    let alpha = Ratio::new(size, n_mod);
    let k_const = stats.min_ratio();
    let tau = Ratio::new(stats.diff_size, n_mod);
    let kq = exact::big(k_const);
    let k2 = &kq * &kq;
    let alpha_gate = exact::le_pow(
        &exact::big(alpha),
        &(exact::big_int(16) * &kq),
        &(-(BigRational::from_integer(BigInt::from(12)) * &k2)),
    );
    let tau_gate =
        exact::le_pow(&exact::big(tau), &exact::big_int(14), &(-(BigRational::from_integer(2.into()) * &k2)));
    let k_f = exact::to_f64(&kq);
    let ln_alpha = exact::ln(&exact::big(alpha));
    let diameter_bound = if size == n_mod { 0.0 } else { delta_bound_ln(ln_alpha, k_f) * n_mod as f64 };
    let diameter = match diameter_with_budget(a, DEFAULT_DIAMETER_BUDGET) {
        Ok(w) => Some(w.l),
        Err(Error::BudgetExceeded(_)) => None,
        Err(e) => return Err(e),
    };
    let chain = if tau_gate {
        let eta: f64 = eta_largecoeff2(&exact::big(tau), &kq, None)?;
        let d = difference_set(a, a)?;
        let spec = spectrum::<f64>(&d)?;
        let (character, magnitude) =
            spec.max_nonprincipal.map(|(c, m)| (c.0.as_scalar().unwrap_or(0), m)).unwrap_or((0, 0.0));
        let dsize = d.len() as f64;
        let delta = 2.0 * k_f * eta.sqrt();
        Some(LemmaChain {
            eta,
            delta,
            character,
            magnitude,
            coefficient_holds: magnitude + MAGNITUDE_SLACK * dsize >= (1.0 - eta) * dsize,
            diameter_below_delta: diameter.filter(|_| delta < 1.0 / 3.0).map(|l| (l as f64) < delta * n_mod as f64),
        })
    } else {
        None
    };
    let conclusion_holds = diameter.filter(|_| alpha_gate).map(|l| l as f64 <= diameter_bound);
    Ok(Theorem1Report {
        modulus: n_mod,
        size,
        alpha,
        k_const,
        sum_size: stats.sum_size,
        difference_size: stats.diff_size,
        tau,
        alpha_gate,
        tau_gate,
        chain,
        diameter,
        diameter_bound,
        conclusion_holds,
    })
}
