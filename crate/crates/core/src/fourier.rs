//! Character sums on cyclic groups and torsion products.
//!
//! For `B ⊆ Z/N` the transform is `B^(r) = Σ_b e(br/N)`; on `(Z/r)^n` the
//! character indexed by `c` is `x ↦ e(Σ c_i x_i / r)`. Character indices use
//! the same code encoding as group elements, so the principal character has
//! code 0.
//!
//! Two evaluation paths exist: direct summation (the reference) and an FFT
//! (`rustfft`, one pass per axis for torsion products). Magnitudes are
//! floating point; everything that can be exact (convolution counts,
//! Cauchy–Schwarz, hypothesis gates on densities) is exact.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::covering::is_k_covering;
use crate::error::{Error, Result};
use crate::exact;
use crate::group::{iterated_sum, Element, GSet, GroupSpec};
use crate::real::Real;
use crate::tolerance::{MAGNITUDE_SLACK, PARSEVAL_REL};

/// Above this `|G| * |B|` the automatic path switches to the FFT.
const DIRECT_AUTO_LIMIT: u64 = 1 << 16;
/// Refuse direct summation above this `|G| * |B|`.
const DIRECT_BUDGET: u64 = 1 << 34;
/// Refuse convolution counting above this `|G| * |B| * m`.
const CONVOLUTION_BUDGET: u64 = 1 << 34;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharacterIndex(pub Element);

impl CharacterIndex {
    pub fn from_code(group: &GroupSpec, code: i64) -> Self {
        CharacterIndex(group.decode(code))
    }

    pub fn is_principal(&self) -> bool {
        match &self.0 {
            Element::Scalar(v) => *v == 0,
            Element::Tuple(c) => c.iter().all(|&x| x == 0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformPath {
    Auto,
    Direct,
    Fast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport<F> {
    pub group: GroupSpec,
    pub size: u64,
    pub order: u64,
    /// `|B| / |G|`.
    pub density: Ratio<u64>,
    /// `|B^(γ)|`, indexed by character code.
    pub magnitudes: Vec<F>,
    /// The largest nonprincipal magnitude (ties: smallest index); `None`
    /// for the trivial group.
    pub max_nonprincipal: Option<(CharacterIndex, F)>,
    /// `1 - max / |B|`.
    pub eta_achieved: Option<F>,
    /// `|Σ |B^|² - |G||B|| / (|G||B|)`.
    pub parseval_residual: F,
}

impl<F: Real> SpectrumReport<F> {
    pub fn magnitude(&self, code: i64) -> F {
        self.magnitudes[code as usize]
    }

    /// The `j` largest nonprincipal magnitudes, largest first.
    pub fn top_nonprincipal(&self, j: usize) -> Vec<(CharacterIndex, F)> {
        let mut idx: Vec<usize> = (1..self.magnitudes.len()).collect();
        idx.sort_by(|&x, &y| {
            self.magnitudes[y].partial_cmp(&self.magnitudes[x]).unwrap_or(std::cmp::Ordering::Equal).then(x.cmp(&y))
        });
        idx.into_iter()
            .take(j)
            .map(|i| (CharacterIndex::from_code(&self.group, i as i64), self.magnitudes[i]))
            .collect()
    }

    pub fn parseval_ok(&self) -> bool {
        self.parseval_residual <= F::of(PARSEVAL_REL)
    }

    /// Serializable view; the full magnitude vector is kept only when the
    /// group has at most `2^16` elements.
    pub fn summary(&self, top_j: usize) -> SpectrumSummary<F> {
        SpectrumSummary {
            group: self.group,
            size: self.size,
            order: self.order,
            density: self.density,
            max_nonprincipal: self.max_nonprincipal.clone(),
            eta_achieved: self.eta_achieved,
            parseval_residual: self.parseval_residual,
            top: self.top_nonprincipal(top_j),
            magnitudes: (self.order <= 1 << 16).then(|| self.magnitudes.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSummary<F> {
    pub group: GroupSpec,
    pub size: u64,
    pub order: u64,
    pub density: Ratio<u64>,
    pub max_nonprincipal: Option<(CharacterIndex, F)>,
    pub eta_achieved: Option<F>,
    pub parseval_residual: F,
    pub top: Vec<(CharacterIndex, F)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub magnitudes: Option<Vec<F>>,
}

fn finite_order(group: GroupSpec, op: &'static str) -> Result<u64> {
    group.order().ok_or(Error::Unsupported { op, group })
}

fn direct_magnitudes<F: Real>(b: &GSet) -> Vec<F> {
    let group = b.group();
    let order = group.order().unwrap();
    let tau = F::TAU();
    match group {
        GroupSpec::Cyclic { modulus } => (0..modulus)
            .map(|r| {
                let (mut re, mut im) = (F::zero(), F::zero());
                for &x in b.codes() {
                    let phase = (x as u128 * r as u128 % modulus as u128) as u64;
                    let angle = tau * F::of_u64(phase) / F::of_u64(modulus);
                    re = re + angle.cos();
                    im = im + angle.sin();
                }
                re.hypot(im)
            })
            .collect(),
        GroupSpec::Torsion { exponent, .. } => {
            let digits: Vec<Vec<i64>> = b
                .codes()
                .iter()
                .map(|&c| match group.decode(c) {
                    Element::Tuple(d) => d,
                    Element::Scalar(_) => unreachable!(),
                })
                .collect();
            let r = exponent as i64;
            (0..order as i64)
                .map(|code| {
                    let chi = match group.decode(code) {
                        Element::Tuple(d) => d,
                        Element::Scalar(_) => unreachable!(),
                    };
                    let (mut re, mut im) = (F::zero(), F::zero());
                    for x in &digits {
                        let phase = chi.iter().zip(x).map(|(c, v)| c * v).sum::<i64>().rem_euclid(r);
                        let angle = tau * F::of_u64(phase as u64) / F::of_u64(exponent as u64);
                        re = re + angle.cos();
                        im = im + angle.sin();
                    }
                    re.hypot(im)
                })
                .collect()
        }
        GroupSpec::Window { .. } => unreachable!(),
    }
}

fn fast_magnitudes<F: Real>(b: &GSet) -> Vec<F> {
    let group = b.group();
    let order = group.order().unwrap() as usize;
    let mut buf = vec![Complex::new(F::zero(), F::zero()); order];
    for &x in b.codes() {
        buf[x as usize] = Complex::new(F::one(), F::zero());
    }
    let mut planner = FftPlanner::<F>::new();
    match group {
        GroupSpec::Cyclic { .. } => {
            planner.plan_fft_forward(order).process(&mut buf);
        }
        GroupSpec::Torsion { exponent, rank } => {
            let r = exponent as usize;
            let fft = planner.plan_fft_forward(r);
            let mut fiber = vec![Complex::new(F::zero(), F::zero()); r];
            for axis in 0..rank {
                let stride = r.pow(rank - 1 - axis);
                for start in 0..order {
                    if !(start / stride).is_multiple_of(r) {
                        continue;
                    }
                    for (j, slot) in fiber.iter_mut().enumerate() {
                        *slot = buf[start + j * stride];
                    }
                    fft.process(&mut fiber);
                    for (j, v) in fiber.iter().enumerate() {
                        buf[start + j * stride] = *v;
                    }
                }
            }
        }
        GroupSpec::Window { .. } => unreachable!(),
    }
    // for real input the forward transform is the conjugate of the character
    // sum, so magnitudes agree
    buf.iter().map(|z| z.norm()).collect()
}

/// Magnitudes of all character sums of `B`.
pub fn spectrum<F: Real>(b: &GSet) -> Result<SpectrumReport<F>> {
    spectrum_with(b, TransformPath::Auto)
}

pub fn spectrum_with<F: Real>(b: &GSet, path: TransformPath) -> Result<SpectrumReport<F>> {
    let group = b.group();
    let order = finite_order(group, "spectrum")?;
    let work = order.saturating_mul(b.len().max(1) as u64);
    let direct = match path {
        TransformPath::Direct => {
            if work > DIRECT_BUDGET {
                return Err(Error::BudgetExceeded(format!("direct character sums over {work} terms")));
            }
            true
        }
        TransformPath::Fast => false,
        TransformPath::Auto => work <= DIRECT_AUTO_LIMIT,
    };
    let mut magnitudes = if direct { direct_magnitudes::<F>(b) } else { fast_magnitudes::<F>(b) };
    // the principal coefficient is |B| exactly
    magnitudes[0] = F::of_u64(b.len() as u64);
    Ok(assemble(group, b.len() as u64, magnitudes))
}

fn assemble<F: Real>(group: GroupSpec, size: u64, magnitudes: Vec<F>) -> SpectrumReport<F> {
    let order = magnitudes.len() as u64;
    let mut max: Option<(usize, F)> = None;
    for (i, &m) in magnitudes.iter().enumerate().skip(1) {
        if max.is_none_or(|(_, best)| m > best) {
            max = Some((i, m));
        }
    }
    let size_f = F::of_u64(size);
    let energy = magnitudes.iter().fold(F::zero(), |acc, &m| acc + m * m);
    let expected = F::of_u64(order) * size_f;
    let parseval_residual = if expected > F::zero() { (energy - expected).abs() / expected } else { energy };
    SpectrumReport {
        group,
        size,
        order,
        density: Ratio::new(size, order),
        max_nonprincipal: max.map(|(i, m)| (CharacterIndex::from_code(&group, i as i64), m)),
        eta_achieved: max.filter(|_| size > 0).map(|(_, m)| F::one() - m / size_f),
        parseval_residual,
        magnitudes,
    }
}

/// `r_{m+1}(x)`: the number of `(m+1)`-tuples of `B` summing to `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionCounts {
    pub group: GroupSpec,
    /// `m + 1`.
    pub order: u32,
    /// Indexed by element code.
    pub counts: Vec<u128>,
    /// `R = |(m+1)B|`.
    pub support_size: u64,
}

impl ConvolutionCounts {
    pub fn total(&self) -> BigUint {
        self.counts.iter().map(|&c| BigUint::from(c)).sum()
    }

    pub fn sum_of_squares(&self) -> BigUint {
        self.counts.iter().map(|&c| BigUint::from(c) * BigUint::from(c)).sum()
    }

    pub fn support(&self) -> Result<GSet> {
        GSet::from_codes(self.group, self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, _)| i as i64))
    }
}

/// The `(m+1)`-fold autoconvolution of the indicator of `B`.
pub fn convolution_counts(b: &GSet, m: u32) -> Result<ConvolutionCounts> {
    let group = b.group();
    let order = finite_order(group, "convolution counts")?;
    if m == 0 {
        return Err(Error::InvalidArgument("convolution counts need m >= 1".into()));
    }
    let work = order.saturating_mul(b.len() as u64).saturating_mul(m as u64);
    if work > CONVOLUTION_BUDGET {
        return Err(Error::BudgetExceeded(format!("convolution over {work} steps")));
    }
    let mut counts = vec![0u128; order as usize];
    for &x in b.codes() {
        counts[x as usize] = 1;
    }
    for _ in 0..m {
        let mut next = vec![0u128; order as usize];
        for (x, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &y in b.codes() {
                let s = group.add(x as i64, y)? as usize;
                next[s] = next[s].checked_add(c).ok_or(Error::Overflow)?;
            }
        }
        counts = next;
    }
    let support_size = counts.iter().filter(|&&c| c > 0).count() as u64;
    Ok(ConvolutionCounts { group, order: m + 1, counts, support_size })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport<F> {
    pub m: u32,
    pub size: u64,
    pub group_order: u64,
    /// `R = |(m+1)B|`.
    pub support_size: u64,
    /// `Σ r_{m+1}(x) = |B|^{m+1}` exactly.
    pub total_ok: bool,
    /// `R · Σ r² - |B|^{2m+2}` (nonnegative by Cauchy–Schwarz).
    pub cauchy_schwarz_margin: BigInt,
    pub cauchy_schwarz_holds: bool,
    /// `Σ_γ |B^(γ)|^{2m+2}`.
    pub spectral_moment: F,
    /// `|G| Σ r²`.
    pub spatial_moment: F,
    pub parseval_residual: F,
    pub parseval_holds: bool,
    /// `max_{γ≠γ0} |B^(γ)|^{2m}`.
    pub max_power: F,
    /// `(1/R - 1/|G|) |B|^{2m+1}`.
    pub max_bound: F,
    pub max_bound_holds: bool,
}

impl<F: Real> MomentReport<F> {
    pub fn holds(&self) -> bool {
        self.total_ok && self.cauchy_schwarz_holds && self.parseval_holds && self.max_bound_holds
    }
}

/// Replays the high-moment argument: exact total and Cauchy–Schwarz steps,
/// Parseval on the `(2m+2)`-th moment, and the lower bound on the largest
/// nonprincipal coefficient.
pub fn moment_lower_bound_check<F: Real>(b: &GSet, m: u32) -> Result<MomentReport<F>> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    let counts = convolution_counts(b, m)?;
    let spec = spectrum::<F>(b)?;
    let n = b.len() as u64;
    let order = spec.order;
    let r = counts.support_size;
    let total_ok = counts.total() == exact::pow_u(n, (m + 1) as u64);
    let squares = counts.sum_of_squares();
    let cs_lhs = BigInt::from(squares.clone()) * BigInt::from(r);
    let cs_rhs = BigInt::from(exact::pow_u(n, 2 * m as u64 + 2));
    let cauchy_schwarz_margin = cs_lhs - cs_rhs;
    let power = 2 * m as i32 + 2;
    let spectral_moment = spec.magnitudes.iter().fold(F::zero(), |acc, &x| acc + x.powi(power));
    let spatial_moment = F::of_u64(order) * F::of(squares.to_f64().unwrap_or(f64::INFINITY));
    let parseval_residual = (spectral_moment - spatial_moment).abs() / spatial_moment;
    let max = spec.max_nonprincipal.as_ref().map_or(F::zero(), |(_, v)| *v);
    let max_power = max.powi(2 * m as i32);
    let n_f = F::of_u64(n);
    let max_bound = (F::one() / F::of_u64(r) - F::one() / F::of_u64(order)) * n_f.powi(2 * m as i32 + 1);
    let slack = F::of(MAGNITUDE_SLACK) * n_f.powi(2 * m as i32 + 1);
    Ok(MomentReport {
        m,
        size: n,
        group_order: order,
        support_size: r,
        total_ok,
        cauchy_schwarz_holds: cauchy_schwarz_margin >= BigInt::zero(),
        cauchy_schwarz_margin,
        spectral_moment,
        spatial_moment,
        parseval_holds: parseval_residual <= F::of(PARSEVAL_REL),
        parseval_residual,
        max_power,
        max_bound,
        max_bound_holds: max_power + slack >= max_bound,
    })
}

/// The moment `m` chosen for a k-covering set of density `β` and the
/// resulting `η = 18 β^{1/k} log(1/β) / k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaChoice<F> {
    pub k: u32,
    pub beta: F,
    /// `floor(k (2β)^{-1/k} / 14)`.
    pub m: u64,
    pub eta: F,
    pub m_at_least_k: bool,
    /// `m >= k β^{-1/k} / 36`.
    pub m_lower_bound: bool,
    /// `(k / 14m)^k > β`.
    pub positive: bool,
    /// `β^{1/2m} > 1 - log(1/β)/2m >= 1 - η`.
    pub chain_holds: bool,
}

impl<F: Real> EtaChoice<F> {
    pub fn holds(&self) -> bool {
        self.m_at_least_k && self.m_lower_bound && self.positive && self.chain_holds
    }
}

fn q(n: u64) -> BigRational {
    exact::big_int(n)
}

/// `η` for a k-covering set of density `β <= 14^{-k-1}`.
pub fn eta_largecoeff<F: Real>(beta: &BigRational, k: u32) -> Result<EtaChoice<F>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if *beta <= BigRational::zero() || *beta > BigRational::one() {
        return Err(Error::InvalidArgument(format!("density must lie in (0, 1], got {beta}")));
    }
    let limit = num_traits::pow(q(14), k as usize + 1).recip();
    if *beta > limit {
        return Err(Error::Hypothesis(format!("density {beta} exceeds 14^-{}", k + 1)));
    }
    let kq = q(k as u64);
    let two_beta = beta * q(2);
    // (14m/k)^k * 2β <= 1 defines m; start from the float estimate and fix up exactly
    let fits = |m: u64| num_traits::pow(q(14 * m) / &kq, k as usize) * &two_beta <= BigRational::one();
    let ln_beta = exact::ln(beta);
    let estimate = (k as f64 * (-exact::ln(&two_beta) / k as f64).exp() / 14.0).floor().max(0.0) as u64;
    let mut m = estimate;
    while m > 0 && !fits(m) {
        m -= 1;
    }
    while fits(m + 1) {
        m += 1;
    }
    let m_at_least_k = m >= k as u64;
    // m >= k β^{-1/k}/36  <=>  β (36m/k)^k >= 1
    let m_lower_bound = num_traits::pow(q(36 * m) / &kq, k as usize) * beta >= BigRational::one();
    // (k/14m)^k > β  <=>  β (14m/k)^k < 1
    let positive = m > 0 && num_traits::pow(q(14 * m) / &kq, k as usize) * beta < BigRational::one();
    let beta_f = F::of(exact::to_f64(beta));
    let ln_inv = F::of(-ln_beta);
    let kf = F::of_u64(k as u64);
    let eta = F::of(18.0) * (F::of(ln_beta) / kf).exp() * ln_inv / kf;
    let chain_holds = m > 0 && {
        let two_m = F::of_u64(2 * m);
        let root = (F::of(ln_beta) / two_m).exp();
        let middle = F::one() - ln_inv / two_m;
        root > middle && middle >= F::one() - eta
    };
    Ok(EtaChoice { k, beta: beta_f, m, eta, m_at_least_k, m_lower_bound, positive, chain_holds })
}

/// `η = 9 K^{-2} τ^{1/2K²} log(1/τ)`, given `ln τ`.
pub fn largecoeff2_formula<F: Real>(ln_tau: F, k_const: F) -> F {
    let k2 = k_const * k_const;
    F::of(9.0) / k2 * (ln_tau / (F::of(2.0) * k2)).exp() * (-ln_tau)
}

/// `η` for `D = A - A` of density `τ <= 14^{-2K²}`, with the gate decided
/// exactly. When `k_cover` is given it must satisfy `k_cover <= 2K² - 1`.
pub fn eta_largecoeff2<F: Real>(tau: &BigRational, k_const: &BigRational, k_cover: Option<u64>) -> Result<F> {
    if *tau <= BigRational::zero() || *tau > BigRational::one() {
        return Err(Error::InvalidArgument(format!("density must lie in (0, 1], got {tau}")));
    }
    if *k_const < BigRational::one() {
        return Err(Error::InvalidArgument(format!("K must be at least 1, got {k_const}")));
    }
    let two_k2 = k_const * k_const * q(2);
    if !exact::le_pow(tau, &q(14), &-two_k2.clone()) {
        return Err(Error::Hypothesis(format!("density {tau} exceeds 14^(-2K^2) for K = {k_const}")));
    }
    if let Some(k) = k_cover {
        if q(k) > two_k2 - BigRational::one() {
            return Err(Error::Hypothesis(format!("covering size {k} exceeds 2K^2 - 1")));
        }
    }
    Ok(largecoeff2_formula(F::of(exact::ln(tau)), F::of(exact::to_f64(k_const))))
}

/// Same as [`eta_largecoeff2`] for densities given by their logarithm
/// (used when `τ` underflows).
pub fn eta_largecoeff2_log<F: Real>(ln_tau: F, k_const: F) -> Result<F> {
    if ln_tau > F::zero() || k_const < F::one() {
        return Err(Error::InvalidArgument("need ln τ <= 0 and K >= 1".into()));
    }
    if ln_tau > -F::of(2.0) * k_const * k_const * F::of(14f64.ln()) {
        return Err(Error::Hypothesis("density exceeds 14^(-2K^2)".into()));
    }
    Ok(largecoeff2_formula(ln_tau, k_const))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LargeCoefficientReport<F> {
    /// `max(|T|, 2)`.
    pub k: u32,
    pub eta: EtaChoice<F>,
    pub character: CharacterIndex,
    pub magnitude: F,
    /// `(1 - η) |B|`.
    pub target: F,
    pub holds: bool,
}

/// Checks that a k-covering `B` of density at most `14^{-k-1}` has a
/// nonprincipal coefficient of size at least `(1 - η)|B|`.
pub fn certified_large_coefficient<F: Real>(b: &GSet, t: &GSet) -> Result<LargeCoefficientReport<F>> {
    let order = finite_order(b.group(), "large coefficient")?;
    if b.is_empty() || t.is_empty() {
        return Err(Error::EmptySet);
    }
    if !is_k_covering(b, t)? {
        return Err(Error::Hypothesis("B is not covered by the given T".into()));
    }
    // a k-covering set is (k+1)-covering, so |T| = 1 can be raised to 2
    let k = (t.len() as u32).max(2);
    let beta = BigRational::new(BigInt::from(b.len()), BigInt::from(order));
    let eta = eta_largecoeff::<F>(&beta, k)?;
    let spec = spectrum::<F>(b)?;
    let (character, magnitude) =
        spec.max_nonprincipal.clone().ok_or(Error::Hypothesis("trivial group has no nonprincipal character".into()))?;
    let size = F::of_u64(b.len() as u64);
    let target = (F::one() - eta.eta) * size;
    let holds = magnitude + F::of(MAGNITUDE_SLACK) * size >= target;
    Ok(LargeCoefficientReport { k, eta, character, magnitude, target, holds })
}

/// `(m+1)B` through the convolution support; equals `iterated_sum(B, m+1)`.
pub fn convolution_support(b: &GSet, m: u32) -> Result<(GSet, GSet)> {
    let counts = convolution_counts(b, m)?;
    Ok((counts.support()?, iterated_sum(b, m + 1)?))
}
