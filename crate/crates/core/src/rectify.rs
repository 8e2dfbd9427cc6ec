//! Diameters in `Z/N`, interval concentration, Freiman isomorphisms and
//! rectification.
//!
//! `diam A` is the least `l` such that `A ⊆ {a, a+d, ..., a+ld}` for some
//! `a, d`. For a fixed `d` the best `l` is `N` minus the largest circular gap
//! of the positions of `A` along the progression, so the search is one sort
//! per dilation. `d` and `-d` give the same `l`, so only `1 <= d <= N/2` is
//! scanned.

use std::collections::HashMap;

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{spectrum, SpectrumReport};
use crate::group::{difference_set, dilate_invertible, Element, GSet, GroupSpec};
use crate::primes::{is_prime, mod_inverse, smallest_prime_in};
use crate::tolerance::MAGNITUDE_SLACK;

pub const DEFAULT_DIAMETER_BUDGET: u64 = 1_000_000;
/// Maximum number of `k`-multisets enumerated by an isomorphism check.
pub const DEFAULT_ISO_BUDGET: u64 = 2_000_000;

fn cyclic_modulus(a: &GSet, op: &'static str) -> Result<u64> {
    match a.group() {
        GroupSpec::Cyclic { modulus } => Ok(modulus),
        group => Err(Error::Unsupported { op, group }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterWitness {
    pub modulus: u64,
    pub l: u64,
    pub d: u64,
    pub a: u64,
    /// `j` with `x = a + j d`, aligned with the codes of `A`.
    pub positions: Vec<u64>,
    /// `{j}` as a subset of the window `[0, l]`.
    pub normalized: GSet,
    pub dilations_examined: u64,
}

impl DiameterWitness {
    /// Membership check of `A ⊆ {a, a+d, ..., a+ld}`.
    pub fn verify(&self, a: &GSet) -> bool {
        let n = self.modulus as u128;
        a.len() == self.positions.len()
            && a.codes()
                .iter()
                .zip(&self.positions)
                .all(|(&x, &j)| j <= self.l && (self.a as u128 + j as u128 * self.d as u128) % n == x as u128)
    }
}

struct Fit {
    l: u64,
    a: u64,
    positions: Vec<u64>,
}

/// Best progression with common difference `d` containing `codes`.
fn fit(codes: &[i64], n: u64, d: u64) -> Option<Fit> {
    let g = d.gcd(&n);
    let m = n / g;
    let inv = mod_inverse((d / g) as i64, m)?;
    let x0 = codes[0];
    let mut js = Vec::with_capacity(codes.len());
    for &x in codes {
        let diff = (x - x0).rem_euclid(n as i64) as u64;
        if !diff.is_multiple_of(g) {
            return None;
        }
        js.push(((diff / g) as u128 * inv as u128 % m as u128) as u64);
    }
    let mut sorted = js.clone();
    sorted.sort_unstable();
    let mut gap = sorted[0] + m - sorted[sorted.len() - 1];
    let mut start = sorted[0];
    for w in sorted.windows(2) {
        if w[1] - w[0] > gap {
            gap = w[1] - w[0];
            start = w[1];
        }
    }
    let a = ((x0 as u128 + start as u128 * d as u128) % n as u128) as u64;
    let positions = js.iter().map(|&j| (j + m - start) % m).collect();
    Some(Fit { l: m - gap, a, positions })
}

pub fn diameter(a: &GSet) -> Result<DiameterWitness> {
    diameter_with_budget(a, DEFAULT_DIAMETER_BUDGET)
}

/// Exhaustive diameter search; ties between dilations go to the smallest `d`.
pub fn diameter_with_budget(a: &GSet, max_modulus: u64) -> Result<DiameterWitness> {
    let n = cyclic_modulus(a, "diameter")?;
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if n > max_modulus {
        return Err(Error::BudgetExceeded(format!("diameter search over Z/{n} (limit {max_modulus})")));
    }
    let half = (n / 2).max(1);
    let codes = a.codes();
    let (d, best) = (1..=half)
        .into_par_iter()
        .filter_map(|d| fit(codes, n, d).map(|f| (d, f)))
        .min_by_key(|(d, f)| (f.l, *d))
        .expect("d = 1 always fits");
    let normalized = GSet::from_codes(GroupSpec::window(0, best.l as i64)?, best.positions.iter().map(|&j| j as i64))?;
    Ok(DiameterWitness {
        modulus: n,
        l: best.l,
        d,
        a: best.a,
        positions: best.positions,
        normalized,
        dilations_examined: half,
    })
}

/// `ceil(δN) - 1`, the longest interval length below `δN`.
fn length_below(delta: Ratio<i64>, n: u64) -> u64 {
    let (p, q) = (*delta.numer() as u128, *delta.denom() as u128);
    ((p * n as u128).div_ceil(q) - 1) as u64
}

fn lt_ratio(count: u64, r: Ratio<i64>, total: u64) -> bool {
    // count < r * total
    (count as u128) * (*r.denom() as u128) < (*r.numer() as u128) * (total as u128)
}

fn check_open_unit(name: &str, r: Ratio<i64>, upper: Ratio<i64>) -> Result<()> {
    if r <= Ratio::from_integer(0) || r >= upper {
        return Err(Error::InvalidArgument(format!("{name} = {r} must lie in (0, {upper})")));
    }
    Ok(())
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Circular window counts over an indicator of `Z/N`.
struct WindowCounter {
    n: u64,
    prefix: Vec<u32>,
}

impl WindowCounter {
    fn new(set: &GSet, n: u64) -> Self {
        let mut prefix = vec![0u32; 2 * n as usize + 1];
        for i in 0..2 * n as usize {
            prefix[i + 1] = prefix[i] + set.contains_code((i as u64 % n) as i64) as u32;
        }
        WindowCounter { n, prefix }
    }

    /// `|S ∩ [a, a+l]|` for `l < N`.
    fn count(&self, a: u64, l: u64) -> u64 {
        (self.prefix[(a + l + 1) as usize] - self.prefix[a as usize]) as u64
    }

    /// Window of length `l` with the most points; ties to the smallest `a`.
    fn best(&self, l: u64) -> (u64, u64) {
        (0..self.n).map(|a| (a, self.count(a, l))).fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevInterval {
    pub a: u64,
    pub l: u64,
    /// `|B \ [a, a+l]|`.
    pub exceptions: u64,
    /// `exceptions < ε|B|`.
    pub conclusion_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LevOutcome {
    NotApplicable { magnitude: f64, threshold: f64 },
    Interval { magnitude: f64, threshold: f64, interval: LevInterval },
}

impl LevOutcome {
    pub fn falsified(&self) -> bool {
        matches!(self, LevOutcome::Interval { interval, .. } if !interval.conclusion_holds)
    }
}

/// Interval concentration for one set under many `(ε, δ)`.
pub struct LevProbe {
    size: u64,
    magnitude: f64,
    windows: WindowCounter,
}

impl LevProbe {
    pub fn new(b: &GSet) -> Result<Self> {
        let n = cyclic_modulus(b, "lev interval")?;
        if b.is_empty() {
            return Err(Error::EmptySet);
        }
        let (mut re, mut im) = (0f64, 0f64);
        for &x in b.codes() {
            let angle = std::f64::consts::TAU * x as f64 / n as f64;
            re += angle.cos();
            im += angle.sin();
        }
        Ok(LevProbe { size: b.len() as u64, magnitude: re.hypot(im), windows: WindowCounter::new(b, n) })
    }

    /// `|B^(1)|`.
    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn scan_window(&self, l: u64, eps: Ratio<i64>) -> LevInterval {
        let (a, inside) = self.windows.best(l);
        let exceptions = self.size - inside;
        LevInterval { a, l, exceptions, conclusion_holds: lt_ratio(exceptions, eps, self.size) }
    }

    /// If `|B^(1)| >= (1 - 8εδ²)|B|`, the densest window of length
    /// `ceil(δN) - 1`.
    pub fn query(&self, eps: Ratio<i64>, delta: Ratio<i64>) -> Result<LevOutcome> {
        check_open_unit("epsilon", eps, Ratio::from_integer(1))?;
        check_open_unit("delta", delta, Ratio::new(1, 2))?;
        let size = self.size as f64;
        let (e, d) = (ratio_f64(eps), ratio_f64(delta));
        let threshold = (1.0 - 8.0 * e * d * d) * size;
        if self.magnitude < threshold + MAGNITUDE_SLACK * size {
            return Ok(LevOutcome::NotApplicable { magnitude: self.magnitude, threshold });
        }
        let interval = self.scan_window(length_below(delta, self.windows.n), eps);
        Ok(LevOutcome::Interval { magnitude: self.magnitude, threshold, interval })
    }
}

pub fn lev_interval(b: &GSet, eps: Ratio<i64>, delta: Ratio<i64>) -> Result<LevOutcome> {
    LevProbe::new(b)?.query(eps, delta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum GapCoverOutcome {
    HypothesisFails {
        exceptions: u64,
    },
    Covered {
        a: u64,
        l: u64,
        exceptions: u64,
    },
    /// Hypothesis held and no interval of length `l` contains `A`.
    Violated {
        a: u64,
        span: u64,
        exceptions: u64,
    },
}

/// `|(A - A) \ [b, b+l]| < n/2` with `l < N/3` forces `A` into an interval
/// of length `l`.
pub struct GapCoverProbe {
    set: GSet,
    n: u64,
    size: u64,
    diff_size: u64,
    diffs: WindowCounter,
    start: u64,
}

impl GapCoverProbe {
    pub fn new(a: &GSet) -> Result<Self> {
        let n = cyclic_modulus(a, "gap cover")?;
        if a.is_empty() {
            return Err(Error::EmptySet);
        }
        let d = difference_set(a, a)?;
        let start = fit(a.codes(), n, 1).expect("d = 1 always fits").a;
        Ok(GapCoverProbe {
            set: a.clone(),
            n,
            size: a.len() as u64,
            diff_size: d.len() as u64,
            diffs: WindowCounter::new(&d, n),
            start,
        })
    }

    pub fn check(&self, b: i64, l: u64) -> Result<GapCoverOutcome> {
        if 3 * l as u128 >= self.n as u128 {
            return Err(Error::InvalidArgument(format!("need 3l < N, got l = {l}, N = {}", self.n)));
        }
        let b = b.rem_euclid(self.n as i64) as u64;
        let exceptions = self.diff_size - self.diffs.count(b, l);
        if 2 * exceptions >= self.size {
            return Ok(GapCoverOutcome::HypothesisFails { exceptions });
        }
        // the interval starts right after the longest gap of A
        let span = self.set.codes().iter().map(|&x| (x as u64 + self.n - self.start) % self.n).max().unwrap_or(0);
        Ok(if span <= l {
            GapCoverOutcome::Covered { a: self.start, l, exceptions }
        } else {
            GapCoverOutcome::Violated { a: self.start, span, exceptions }
        })
    }
}

pub fn gap_cover(a: &GSet, b: i64, l: u64) -> Result<GapCoverOutcome> {
    GapCoverProbe::new(a)?.check(b, l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiamHypothesis {
    Holds,
    Fails,
    /// Met only at characters that are not units, where the dilation
    /// argument does not apply.
    NonUnitOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiamReport {
    pub delta: Ratio<i64>,
    /// `|D| - 4δ²|A|`.
    pub threshold: f64,
    pub character: Option<u64>,
    pub magnitude: Option<f64>,
    pub hypothesis: DiamHypothesis,
    pub lev: Option<LevInterval>,
    pub cover: Option<GapCoverOutcome>,
    pub diameter: u64,
    /// `diam A < δN`, decided when the hypothesis holds.
    pub conclusion_holds: Option<bool>,
}

impl DiamReport {
    pub fn falsified(&self) -> bool {
        self.conclusion_holds == Some(false)
    }

    /// Every intermediate step of the argument succeeded.
    pub fn chain_consistent(&self) -> bool {
        self.hypothesis != DiamHypothesis::Holds
            || (self.lev.as_ref().is_some_and(|l| l.conclusion_holds)
                && matches!(self.cover, Some(GapCoverOutcome::Covered { .. }))
                && self.conclusion_holds == Some(true))
    }
}

/// Spectrum of `A - A` and the diameter of `A`, reusable across `δ`.
pub struct DiamProbe {
    set: GSet,
    n: u64,
    diff: GSet,
    spectrum: SpectrumReport<f64>,
    diameter: DiameterWitness,
}

impl DiamProbe {
    pub fn new(a: &GSet) -> Result<Self> {
        let n = cyclic_modulus(a, "diam from spectrum")?;
        if a.is_empty() {
            return Err(Error::EmptySet);
        }
        let diff = difference_set(a, a)?;
        Ok(DiamProbe { set: a.clone(), n, spectrum: spectrum(&diff)?, diff, diameter: diameter(a)? })
    }

    pub fn diameter(&self) -> &DiameterWitness {
        &self.diameter
    }

    pub fn query(&self, delta: Ratio<i64>) -> Result<DiamReport> {
        check_open_unit("delta", delta, Ratio::new(1, 3))?;
        let size = self.set.len() as u64;
        let m = self.diff.len() as f64;
        let d = ratio_f64(delta);
        let threshold = m - 4.0 * d * d * size as f64;
        let gate = threshold + MAGNITUDE_SLACK * m;
        let mags = &self.spectrum.magnitudes;
        let mut best_unit: Option<(u64, f64)> = None;
        let mut nonunit_meets = false;
        for r in 1..self.n {
            let v = mags[r as usize];
            if r.gcd(&self.n) == 1 {
                if best_unit.is_none_or(|(_, b)| v > b) {
                    best_unit = Some((r, v));
                }
            } else if v >= gate {
                nonunit_meets = true;
            }
        }
        let mut report = DiamReport {
            delta,
            threshold,
            character: best_unit.map(|(r, _)| r),
            magnitude: best_unit.map(|(_, v)| v),
            hypothesis: DiamHypothesis::Fails,
            lev: None,
            cover: None,
            diameter: self.diameter.l,
            conclusion_holds: None,
        };
        let r = match best_unit {
            Some((r, v)) if v >= gate => r,
            _ => {
                if nonunit_meets {
                    report.hypothesis = DiamHypothesis::NonUnitOnly;
                }
                return Ok(report);
            }
        };
        report.hypothesis = DiamHypothesis::Holds;
        // D^(r) is the first coefficient of r·D
        let scaled = dilate_invertible(&self.set, r as i64)?;
        let scaled_diff = dilate_invertible(&self.diff, r as i64)?;
        let l = length_below(delta, self.n);
        let eps = Ratio::new(size as i64, 2 * self.diff.len() as i64);
        let lev = LevProbe::new(&scaled_diff)?.scan_window(l, eps);
        report.cover = Some(GapCoverProbe::new(&scaled)?.check(lev.a as i64, l)?);
        report.lev = Some(lev);
        report.conclusion_holds = Some(lt_ratio(self.diameter.l, delta, self.n));
        Ok(report)
    }
}

pub fn diam_from_spectrum(a: &GSet, delta: Ratio<i64>) -> Result<DiamReport> {
    DiamProbe::new(a)?.query(delta)
}

/// A bijection from `source` onto a subset of `target_group`, stored as the
/// image of each code of `source` in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreimanMap {
    pub source: GSet,
    pub target_group: GroupSpec,
    pub images: Vec<i64>,
}

impl FreimanMap {
    pub fn new(source: GSet, target_group: GroupSpec, images: Vec<i64>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::NotBijective(format!("{} images for {} points", images.len(), source.len())));
        }
        if let Some(&y) = images.iter().find(|&&y| !target_group.contains_code(y)) {
            return Err(Error::NotInGroup { element: y.to_string(), group: target_group });
        }
        let mut sorted = images.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::NotBijective(format!("two points map to {}", w[0])));
        }
        Ok(FreimanMap { source, target_group, images })
    }

    pub fn from_fn(source: &GSet, target_group: GroupSpec, f: impl Fn(i64) -> Result<i64>) -> Result<Self> {
        let images = source.codes().iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Self::new(source.clone(), target_group, images)
    }

    pub fn identity(source: &GSet) -> Self {
        FreimanMap { source: source.clone(), target_group: source.group(), images: source.codes().to_vec() }
    }

    /// `x ↦ λx + c`, into the tightest window for integer sets and into the
    /// same group otherwise.
    pub fn affine(source: &GSet, lambda: i64, shift: i64) -> Result<Self> {
        let group = source.group();
        let images = source
            .codes()
            .iter()
            .map(|&x| match group {
                GroupSpec::Window { .. } => {
                    lambda.checked_mul(x).and_then(|v| v.checked_add(shift)).ok_or(Error::Overflow)
                }
                g => g.add(g.scale(lambda, x)?, g.reduce_scalar(shift)?),
            })
            .collect::<Result<Vec<_>>>()?;
        let target_group = match group {
            GroupSpec::Window { .. } => {
                GroupSpec::window(images.iter().copied().min().unwrap_or(0), images.iter().copied().max().unwrap_or(0))?
            }
            g => g,
        };
        Self::new(source.clone(), target_group, images)
    }

    pub fn target(&self) -> Result<GSet> {
        GSet::from_codes(self.target_group, self.images.iter().copied())
    }

    pub fn image(&self, code: i64) -> Option<i64> {
        self.source.codes().binary_search(&code).ok().map(|i| self.images[i])
    }

    pub fn inverse(&self) -> Result<FreimanMap> {
        let target = self.target()?;
        let back: HashMap<i64, i64> = self.images.iter().copied().zip(self.source.codes().iter().copied()).collect();
        let images = target.codes().iter().map(|y| back[y]).collect();
        FreimanMap::new(target, self.source.group(), images)
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &FreimanMap) -> Result<FreimanMap> {
        if self.target()? != then.source {
            return Err(Error::InvalidArgument("composed maps do not match up".into()));
        }
        let images = self.images.iter().map(|&y| then.image(y).unwrap()).collect();
        FreimanMap::new(self.source.clone(), then.target_group, images)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum IsoOutcome {
    Iso {
        k: u32,
        multisets: u64,
    },
    /// `left` and `right` agree in sum on exactly one side.
    Counterexample {
        left: Vec<Element>,
        right: Vec<Element>,
        sums_equal_in_source: bool,
    },
}

impl IsoOutcome {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoOutcome::Iso { .. })
    }
}

/// `C(n + k - 1, k)`, saturating.
pub fn multiset_count(n: u64, k: u32) -> u64 {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * (n as u128 + i) / (i + 1);
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

fn sum_key(group: GroupSpec, codes: impl Iterator<Item = i64>) -> i128 {
    match group {
        GroupSpec::Window { .. } => codes.map(|c| c as i128).sum(),
        GroupSpec::Cyclic { modulus } => codes.map(|c| c as i128).sum::<i128>() % modulus as i128,
        g => codes.fold(0i64, |acc, c| g.add(acc, c).unwrap()) as i128,
    }
}

/// Nondecreasing index tuples of length `k` over `0..n`, in lexicographic order.
struct Multisets {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Multisets {
    fn new(n: usize, k: usize) -> Self {
        Multisets { n, idx: vec![0; k], done: n == 0 }
    }

    fn advance(&mut self) {
        let mut p = self.idx.len();
        while p > 0 && self.idx[p - 1] == self.n - 1 {
            p -= 1;
        }
        if p == 0 {
            self.done = true;
            return;
        }
        self.idx[p - 1] += 1;
        let v = self.idx[p - 1];
        for slot in &mut self.idx[p..] {
            *slot = v;
        }
    }
}

pub fn freiman_iso_check(map: &FreimanMap, k: u32) -> Result<IsoOutcome> {
    freiman_iso_check_with_budget(map, k, DEFAULT_ISO_BUDGET)
}

/// Compares the partitions of all `k`-multisets of the source by sum, in
/// the source and in the image.
pub fn freiman_iso_check_with_budget(map: &FreimanMap, k: u32, budget: u64) -> Result<IsoOutcome> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("isomorphism order must be at least 2, got {k}")));
    }
    let n = map.source.len();
    let total = multiset_count(n as u64, k);
    if total > budget {
        return Err(Error::BudgetExceeded(format!("{total} multisets of size {k}")));
    }
    let sg = map.source.group();
    let tg = map.target_group;
    let src = map.source.codes();
    let mut first_src: HashMap<i128, u64> = HashMap::new();
    let mut first_tgt: HashMap<i128, u64> = HashMap::new();
    let mut it = Multisets::new(n, k as usize);
    let mut id = 0u64;
    while !it.done {
        let s = sum_key(sg, it.idx.iter().map(|&i| src[i]));
        let t = sum_key(tg, it.idx.iter().map(|&i| map.images[i]));
        let rs = *first_src.entry(s).or_insert(id);
        let rt = *first_tgt.entry(t).or_insert(id);
        if rs != rt {
            let (earlier, same_source) = if rs < rt { (rs, true) } else { (rt, false) };
            let left = nth_multiset(n, k as usize, earlier);
            let elements = |ix: &[usize]| ix.iter().map(|&i| sg.decode(src[i])).collect::<Vec<_>>();
            return Ok(IsoOutcome::Counterexample {
                left: elements(&left),
                right: elements(&it.idx),
                sums_equal_in_source: same_source,
            });
        }
        id += 1;
        it.advance();
    }
    Ok(IsoOutcome::Iso { k, multisets: total })
}

fn nth_multiset(n: usize, k: usize, id: u64) -> Vec<usize> {
    let mut it = Multisets::new(n, k);
    for _ in 0..id {
        it.advance();
    }
    it.idx
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectificationWitness {
    pub k: u32,
    pub modulus: u64,
    /// `λ = d⁻¹`; the map is `x ↦ λ(x - shift) mod N`.
    pub dilation: u64,
    pub shift: u64,
    pub diameter: u64,
    /// Image in `[0, diameter]`.
    pub image: GSet,
    pub map: FreimanMap,
    /// The isomorphism check ran and passed; `false` means it was skipped
    /// for budget.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RectifyOutcome {
    Rectified(RectificationWitness),
    /// `k · diam A >= N`.
    TooWide {
        diameter: DiameterWitness,
    },
}

pub fn rectify(a: &GSet, k: u32) -> Result<RectifyOutcome> {
    rectify_with_budget(a, k, DEFAULT_ISO_BUDGET)
}

/// Maps `A ⊆ Z/p` onto integers when `k · diam A < p`.
pub fn rectify_with_budget(a: &GSet, k: u32, budget: u64) -> Result<RectifyOutcome> {
    let n = cyclic_modulus(a, "rectify")?;
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    if k < 2 {
        return Err(Error::InvalidArgument(format!("order must be at least 2, got {k}")));
    }
    let diam = diameter(a)?;
    if k as u128 * diam.l as u128 >= n as u128 {
        return Ok(RectifyOutcome::TooWide { diameter: diam });
    }
    let dilation = mod_inverse(diam.d as i64, n).expect("nonzero d is a unit mod p");
    let image = diam.normalized.clone();
    let map = FreimanMap::new(a.clone(), image.group(), diam.positions.iter().map(|&j| j as i64).collect())?;
    let verified = multiset_count(a.len() as u64, k) <= budget;
    if verified {
        if let IsoOutcome::Counterexample { left, right, .. } = freiman_iso_check_with_budget(&map, k, budget)? {
            return Err(Error::Counterexample(format!(
                "rectifying map of {a:?} is not a Freiman isomorphism of order {k}: {left:?} vs {right:?}"
            )));
        }
    }
    Ok(RectifyOutcome::Rectified(RectificationWitness {
        k,
        modulus: n,
        dilation,
        shift: diam.a,
        diameter: diam.l,
        image,
        map,
        verified,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRound {
    /// `max A` at the start of the round.
    pub length: i64,
    pub prime: u64,
    pub diameter: u64,
    pub accepted: bool,
    pub verified: bool,
}

/// A set of integers `F_k`-isomorphic to the input with `min = 1`. Its
/// maximum is an upper bound on the shortest length in the isomorphism
/// class, not the minimum itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegerModel {
    pub k: u32,
    pub set: GSet,
    pub length_upper_bound: i64,
    pub rounds: Vec<ModelRound>,
}

/// Repeatedly embeds into `Z/p` with `p` the smallest prime in `(kL, 2kL]`,
/// rectifies and pulls back, while the length shrinks.
pub fn minimal_integer_model(a: &GSet, k: u32, rounds: u32, budget: u64) -> Result<IntegerModel> {
    if !matches!(a.group(), GroupSpec::Window { .. }) {
        return Err(Error::Unsupported { op: "minimal integer model", group: a.group() });
    }
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if k < 2 {
        return Err(Error::InvalidArgument(format!("order must be at least 2, got {k}")));
    }
    let lo = a.codes()[0];
    let shifted: Vec<i64> = a.codes().iter().map(|&x| x - lo + 1).collect();
    let mut current = GSet::integers(&shifted)?;
    let mut log = Vec::new();
    for _ in 0..rounds {
        let length = *current.codes().last().unwrap();
        let kl = k as u64 * length as u64;
        let prime = smallest_prime_in(kl, 2 * kl)
            .ok_or_else(|| Error::Hypothesis(format!("no prime in ({kl}, {}]", 2 * kl)))?;
        let embedded = GSet::cyclic(prime, current.codes())?;
        let diam = diameter(&embedded)?;
        let shorter = (diam.l as i64 + 1) < length && (k as u128 * diam.l as u128) < prime as u128;
        if !shorter {
            log.push(ModelRound { length, prime, diameter: diam.l, accepted: false, verified: false });
            break;
        }
        // codes of `current` and of `embedded` coincide since max < p
        let images: Vec<i64> = diam.positions.iter().map(|&j| j as i64 + 1).collect();
        let map = FreimanMap::new(current.clone(), GroupSpec::window(1, diam.l as i64 + 1)?, images)?;
        let verified = multiset_count(current.len() as u64, k) <= budget;
        if verified && !freiman_iso_check_with_budget(&map, k, budget)?.is_iso() {
            return Err(Error::Counterexample(format!("model round at p = {prime} broke {k}-sums")));
        }
        log.push(ModelRound { length, prime, diameter: diam.l, accepted: true, verified });
        current = map.target()?;
    }
    let length_upper_bound = *current.codes().last().unwrap();
    Ok(IntegerModel { k, set: current, length_upper_bound, rounds: log })
}
