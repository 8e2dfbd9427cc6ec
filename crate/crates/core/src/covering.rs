//! Covering sets and the growth of iterated sumsets.
//!
//! Given `A, B1, B2` with `|A + Bi| = Ki |A|`, [`covering_certificate`]
//! produces `T ⊆ B1 + B2` with `B1 - B1 + B2 - B2 ⊆ A - A + T - T`, and
//! `|T| <= 2 K1 K2 - 1` when the translates are chosen against a
//! Plünnecke witness `A' ⊆ A` with `|A' + B1 + B2| <= K1 K2 |A'|`.
//!
//! `J(k, m)` counts integer k-tuples whose positive parts and negative
//! parts have equal sums, both at most `m`; it bounds `|m(T - T)|` for
//! `|T| = k`.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::group::{difference_set, negate, sumset, GSet};

/// Default subset budget for [`pluennecke_witness`].
pub const DEFAULT_WITNESS_BUDGET: usize = 18;

/// Result of the greedy translate selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyTranslates {
    /// Selected translates in canonical order.
    pub translates: GSet,
    /// Selected translates in selection order.
    pub order: Vec<i64>,
    /// `|A' + t_1 ∪ ... ∪ A' + t_k|`.
    pub union_size: u64,
}

/// Selects `t_1, t_2, ...` from `candidates`, each new translate `A' + t_j`
/// adding at least `|A'|/2` new points to the union. Among qualifying
/// candidates the one adding the most wins; ties go to the smallest code.
pub fn greedy_translates(base: &GSet, candidates: &GSet) -> Result<GreedyTranslates> {
    if base.is_empty() || candidates.is_empty() {
        return Err(Error::EmptySet);
    }
    base.group().check_compatible(&candidates.group())?;
    let group = base.group();
    let n = base.len();
    let mut covered: HashSet<i64> = HashSet::new();
    let mut order = Vec::new();
    let mut chosen: HashSet<i64> = HashSet::new();
    loop {
        let mut best: Option<(usize, i64)> = None;
        for &u in candidates.codes() {
            if chosen.contains(&u) {
                continue;
            }
            let mut fresh = 0usize;
            for &a in base.codes() {
                if !covered.contains(&group.add(a, u)?) {
                    fresh += 1;
                }
            }
            if 2 * fresh >= n && best.is_none_or(|(f, _)| fresh > f) {
                best = Some((fresh, u));
            }
        }
        let Some((_, t)) = best else { break };
        for &a in base.codes() {
            covered.insert(group.add(a, t)?);
        }
        chosen.insert(t);
        order.push(t);
    }
    let translates = GSet::from_codes(candidates.group(), order.iter().copied())?;
    Ok(GreedyTranslates { translates, order, union_size: covered.len() as u64 })
}

/// A subset `A' ⊆ A` minimizing `|A' + B1 + B2| / |A'|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PluenneckeWitness {
    pub subset: GSet,
    /// `|A' + B1 + B2|`.
    pub sum_size: u64,
    pub ratio: Ratio<u64>,
    pub k1: Ratio<u64>,
    pub k2: Ratio<u64>,
    pub subsets_examined: u64,
}

impl PluenneckeWitness {
    /// `ratio <= K1 K2`.
    pub fn within_bound(&self) -> bool {
        self.ratio <= self.k1 * self.k2
    }
}

struct WitnessSearch<'a> {
    masks: &'a [Vec<u64>],
    n: usize,
    best: Option<(u64, u64, Vec<usize>)>,
    examined: u64,
}

impl WitnessSearch<'_> {
    // Enumerates size-`size` index combinations in lexicographic order with
    // the union of the chosen masks carried along; a branch is cut once its
    // partial union already rules out a strictly smaller ratio.
    fn descend(&mut self, size: usize, start: usize, picked: &mut Vec<usize>, union: &[u64]) {
        let count = union.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        if let Some((bn, bd, _)) = &self.best {
            if count * bd >= bn * size as u64 {
                return;
            }
        }
        if picked.len() == size {
            self.examined += 1;
            self.best = Some((count, size as u64, picked.clone()));
            return;
        }
        let remaining = size - picked.len();
        for i in start..=(self.n - remaining) {
            let next: Vec<u64> = union.iter().zip(&self.masks[i]).map(|(a, b)| a | b).collect();
            picked.push(i);
            self.descend(size, i + 1, picked, &next);
            picked.pop();
        }
    }
}

/// Exhaustive search for a Plünnecke witness. Subsets are visited by
/// decreasing size, then lexicographically; the first subset attaining the
/// minimum ratio is returned.
pub fn pluennecke_witness(a: &GSet, b1: &GSet, b2: &GSet, budget: usize) -> Result<PluenneckeWitness> {
    if a.is_empty() || b1.is_empty() || b2.is_empty() {
        return Err(Error::EmptySet);
    }
    if a.len() > budget {
        return Err(Error::BudgetExceeded(format!(
            "witness search over |A| = {} exceeds budget {budget}; use A' = A",
            a.len()
        )));
    }
    let n = a.len() as u64;
    let k1 = Ratio::new(sumset(a, b1)?.len() as u64, n);
    let k2 = Ratio::new(sumset(a, b2)?.len() as u64, n);
    let s = sumset(b1, b2)?;
    let full = sumset(a, &s)?;
    let index = |code: i64| full.codes().binary_search(&code).expect("sum lies in A + S");
    let words = full.len().div_ceil(64);
    let group = full.group();
    let mut masks = Vec::with_capacity(a.len());
    for &x in a.codes() {
        let mut mask = vec![0u64; words];
        for &y in s.codes() {
            let i = index(group.add(x, y)?);
            mask[i / 64] |= 1 << (i % 64);
        }
        masks.push(mask);
    }
    let mut search = WitnessSearch { masks: &masks, n: a.len(), best: None, examined: 0 };
    let s_len = s.len() as u64;
    for size in (1..=a.len()).rev() {
        // every subset of this size has ratio >= |S| / size
        if let Some((bn, bd, _)) = &search.best {
            if s_len * bd >= bn * size as u64 {
                break;
            }
        }
        let empty = vec![0u64; words];
        search.descend(size, 0, &mut Vec::new(), &empty);
    }
    let (num, den, picked) = search.best.expect("the full set is always examined");
    let subset = GSet::from_codes(a.group(), picked.iter().map(|&i| a.codes()[i]))?;
    Ok(PluenneckeWitness {
        subset,
        sum_size: num,
        ratio: Ratio::new(num, den),
        k1,
        k2,
        subsets_examined: search.examined,
    })
}

/// How [`covering_certificate`] obtains `A'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessMode {
    /// Exhaustive witness search; fail if `|A|` exceeds the budget.
    Require { budget: usize },
    /// Exhaustive witness search, falling back to `A' = A` over budget.
    Prefer { budget: usize },
    /// Always use `A' = A`.
    Skip,
}

/// Which size bound a certificate certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `|T| <= 2 K1 K2 - 1`.
    Pluennecke,
    /// `|T| <= 2 |A + B1 + B2| / |A| - 1`.
    Fallback,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringCertificate {
    pub base: GSet,
    pub b1: GSet,
    pub b2: GSet,
    pub translates: GSet,
    pub witness: GSet,
    pub bound_kind: BoundKind,
    pub k1: Ratio<u64>,
    pub k2: Ratio<u64>,
    /// Exact value of the certified bound on `|T|`.
    pub size_bound_exact: Ratio<u64>,
    /// `floor(size_bound_exact)`.
    pub size_bound: u64,
    /// `|B1 - B1 + B2 - B2|`.
    pub lhs_size: u64,
    /// `|A - A + T - T|`.
    pub rhs_size: u64,
    pub inclusion_verified: bool,
}

impl CoveringCertificate {
    pub fn size(&self) -> usize {
        self.translates.len()
    }
}

/// Builds `T` against `A'` and verifies `B1 - B1 + B2 - B2 ⊆ A - A + T - T`
/// by exhaustive membership.
pub fn covering_certificate(a: &GSet, b1: &GSet, b2: &GSet, mode: WitnessMode) -> Result<CoveringCertificate> {
    if a.is_empty() || b1.is_empty() || b2.is_empty() {
        return Err(Error::EmptySet);
    }
    a.group().check_compatible(&b1.group())?;
    a.group().check_compatible(&b2.group())?;
    let n = a.len() as u64;
    let k1 = Ratio::new(sumset(a, b1)?.len() as u64, n);
    let k2 = Ratio::new(sumset(a, b2)?.len() as u64, n);
    let witness = match mode {
        WitnessMode::Require { budget } => Some(pluennecke_witness(a, b1, b2, budget)?),
        WitnessMode::Prefer { budget } if a.len() <= budget => Some(pluennecke_witness(a, b1, b2, budget)?),
        _ => None,
    };
    let s = sumset(b1, b2)?;
    let (base, bound_kind, size_bound_exact) = match &witness {
        Some(w) => {
            if !w.within_bound() {
                return Err(Error::Counterexample(format!("witness ratio {} exceeds K1 K2 = {}", w.ratio, k1 * k2)));
            }
            (w.subset.clone(), BoundKind::Pluennecke, Ratio::from_integer(2) * k1 * k2 - Ratio::from_integer(1))
        }
        None => {
            let r = Ratio::new(sumset(a, &s)?.len() as u64, n);
            (a.clone(), BoundKind::Fallback, Ratio::from_integer(2) * r - Ratio::from_integer(1))
        }
    };
    let greedy = greedy_translates(&base, &s)?;
    let t = greedy.translates;
    let size_bound = size_bound_exact.floor().to_integer();
    if t.len() as u64 > size_bound {
        return Err(Error::Counterexample(format!("|T| = {} exceeds certified bound {}", t.len(), size_bound_exact)));
    }
    let lhs = sumset(&difference_set(b1, b1)?, &difference_set(b2, b2)?)?;
    let rhs = sumset(&difference_set(a, a)?, &difference_set(&t, &t)?)?;
    if let Some(x) = lhs.first_missing_from(&rhs) {
        return Err(Error::Counterexample(format!("{} lies in B1-B1+B2-B2 but not in A-A+T-T", lhs.group().decode(x))));
    }
    Ok(CoveringCertificate {
        base: a.clone(),
        b1: b1.clone(),
        b2: b2.clone(),
        translates: t,
        witness: base,
        bound_kind,
        k1,
        k2,
        size_bound_exact,
        size_bound,
        lhs_size: lhs.len() as u64,
        rhs_size: rhs.len() as u64,
        inclusion_verified: true,
    })
}

/// The covering certificate for `B1 = B2 = A` or `B1 = B2 = -A`, whichever
/// yields the smaller `T` (ties keep `A`).
pub fn difference_covering(a: &GSet, mode: WitnessMode) -> Result<CoveringCertificate> {
    let plus = covering_certificate(a, a, a, mode)?;
    let neg = negate(a)?;
    if neg == *a {
        return Ok(plus);
    }
    let minus = covering_certificate(a, &neg, &neg, mode)?;
    Ok(if minus.size() < plus.size() { minus } else { plus })
}

/// Largest `m <= m_max` such that `(j+1)(A-A) ⊆ A-A + j(T-T)` for every
/// `j <= m`.
pub fn verify_incm(a: &GSet, t: &GSet, m_max: u32) -> Result<u32> {
    let d = difference_set(a, a)?;
    let tt = difference_set(t, t)?;
    let mut lhs = d.clone();
    let mut multiple = tt.clone();
    for m in 1..=m_max {
        lhs = sumset(&lhs, &d)?;
        if m > 1 {
            multiple = sumset(&multiple, &tt)?;
        }
        let rhs = sumset(&d, &multiple)?;
        if !lhs.is_subset_of(&rhs) {
            return Ok(m - 1);
        }
    }
    Ok(m_max)
}

/// `B + B ⊆ B + (T - T)`.
pub fn is_k_covering(b: &GSet, t: &GSet) -> Result<bool> {
    b.group().check_compatible(&t.group())?;
    let lhs = sumset(b, b)?;
    let rhs = sumset(b, &difference_set(t, t)?)?;
    Ok(lhs.is_subset_of(&rhs))
}

/// A set `T` with `B + B ⊆ B + (T - T)`, built as `{t0} ∪ C` where the
/// translates `B + (c - t0)` greedily cover `(B + B) \ B`.
pub fn covering_translates(b: &GSet) -> Result<GSet> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    let group = b.group();
    let doubled = sumset(b, b)?;
    let mut uncovered: HashSet<i64> = doubled.codes().iter().copied().filter(|&x| !b.contains_code(x)).collect();
    let shifts = difference_set(&doubled, b)?;
    let t0 = b.codes()[0];
    let mut chosen = vec![t0];
    while !uncovered.is_empty() {
        let mut best: Option<(usize, i64)> = None;
        for &c in shifts.codes() {
            let mut gain = 0;
            for &x in b.codes() {
                if uncovered.contains(&group.add(x, c)?) {
                    gain += 1;
                }
            }
            if gain > 0 && best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, c));
            }
        }
        let (_, c) = best.expect("(B+B)-B contains a shift covering any point of B+B");
        for &x in b.codes() {
            uncovered.remove(&group.add(x, c)?);
        }
        chosen.push(group.add(t0, c)?);
    }
    let group_t = match group {
        crate::group::GroupSpec::Window { .. } => {
            let lo = *chosen.iter().min().unwrap();
            let hi = *chosen.iter().max().unwrap();
            crate::group::GroupSpec::window(lo, hi)?
        }
        g => g,
    };
    GSet::from_codes(group_t, chosen)
}

/// `J(k, m)` by dynamic programming over (index, positive sum, negative sum).
pub fn j_count(k: u32, m: u32) -> Result<BigUint> {
    Ok(j_counts(k, m)?.pop().unwrap())
}

/// `J(k, 0), ..., J(k, m_max)` from one table.
pub fn j_counts(k: u32, m_max: u32) -> Result<Vec<BigUint>> {
    if k == 0 {
        return Err(Error::InvalidArgument("J(k, m) needs k >= 1".into()));
    }
    let w = m_max as usize + 1;
    // dp[p * w + q]: tuples so far with positive-part sum p, negative-part sum q
    let mut dp = vec![BigUint::zero(); w * w];
    dp[0] = BigUint::from(1u8);
    for _ in 0..k {
        let mut next = dp.clone();
        for p in 0..w {
            for q in 0..w {
                let cur = &dp[p * w + q];
                if cur.is_zero() {
                    continue;
                }
                for x in 1..w {
                    if p + x < w {
                        next[(p + x) * w + q] += cur;
                    }
                    if q + x < w {
                        next[p * w + q + x] += cur;
                    }
                }
            }
        }
        dp = next;
    }
    let mut acc = BigUint::zero();
    Ok((0..w)
        .map(|s| {
            acc += &dp[s * w + s];
            acc.clone()
        })
        .collect())
}

/// `(14 m / k)^k`.
pub fn j_bound(k: u32, m: u32) -> BigRational {
    let base = BigRational::new((14 * m as u64).into(), (k as u64).into());
    num_traits::pow(base, k as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JBoundReport {
    pub k: u32,
    pub m: u32,
    pub count: BigUint,
    pub bound: f64,
    pub holds: bool,
}

/// Compares `J(k, m)` against `(14m/k)^k` exactly; requires `m >= k`.
pub fn j_bound_report(k: u32, m: u32) -> Result<JBoundReport> {
    if k == 0 || m < k {
        return Err(Error::Hypothesis(format!("J bound needs m >= k >= 1, got k = {k}, m = {m}")));
    }
    let count = j_count(k, m)?;
    let bound = j_bound(k, m);
    let holds = BigRational::from_integer(count.clone().into()) < bound;
    Ok(JBoundReport { k, m, count, bound: exact::to_f64(&bound), holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub m: u32,
    pub count: BigUint,
    /// `(14m/k)^k`, meaningful for `m >= k`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub k: u32,
    pub rows: Vec<GrowthRow>,
    /// Largest `J(k,m)^{1/k} k / m` over rows with `m >= k`: the smallest
    /// constant that could replace 14 on this range.
    pub empirical_constant: f64,
}

pub fn growth_table(k: u32, m_max: u32) -> Result<GrowthTable> {
    let mut rows = Vec::new();
    let mut constant = 0f64;
    for m in 0..=m_max {
        let count = j_count(k, m)?;
        if m >= k && m > 0 {
            let c = count.to_f64().unwrap().powf(1.0 / k as f64) * k as f64 / m as f64;
            constant = constant.max(c);
        }
        rows.push(GrowthRow { m, count, bound: exact::to_f64(&j_bound(k, m)) });
    }
    Ok(GrowthTable { k, rows, empirical_constant: constant })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub m: u32,
    /// `|T|`.
    pub k: u32,
    pub base_size: u64,
    /// `|(m+1)B|`.
    pub iterated_size: u64,
    /// `|m(T-T)|`.
    pub difference_multiple_size: u64,
    pub j: BigUint,
    /// `|m(T-T)| <= J(k, m)`.
    pub difference_multiple_holds: bool,
    /// `|(m+1)B| <= |B| J(k, m)`.
    pub estjcov_holds: bool,
    /// `|(m+1)B| < (14m/k)^k |B|`; `None` when `m < k`.
    pub estecov_holds: Option<bool>,
}

impl GrowthReport {
    pub fn holds(&self) -> bool {
        self.difference_multiple_holds && self.estjcov_holds && self.estecov_holds.unwrap_or(true)
    }
}

/// Checks the growth bounds for a k-covering pair `(B, T)`.
pub fn growth_bound_check(b: &GSet, t: &GSet, m: u32) -> Result<GrowthReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("growth check needs m >= 1".into()));
    }
    Ok(growth_bound_profile(b, t, m)?.pop().unwrap())
}

/// [`growth_bound_check`] for every `m` in `1..=m_max`, sharing the
/// iterated sumsets.
pub fn growth_bound_profile(b: &GSet, t: &GSet, m_max: u32) -> Result<Vec<GrowthReport>> {
    if b.is_empty() || t.is_empty() {
        return Err(Error::EmptySet);
    }
    if !is_k_covering(b, t)? {
        return Err(Error::Hypothesis("B + B is not contained in B + (T - T)".into()));
    }
    let k = t.len() as u32;
    let tt = difference_set(t, t)?;
    let js = j_counts(k, m_max)?;
    let base_size = b.len() as u64;
    let mut iterated = b.clone();
    let mut multiple = tt.clone();
    let mut out = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        iterated = sumset(&iterated, b)?;
        if m > 1 {
            multiple = sumset(&multiple, &tt)?;
        }
        let j = js[m as usize].clone();
        let iterated_size = iterated.len() as u64;
        let estecov_holds = (m >= k).then(|| {
            let lhs = BigRational::from_integer((iterated_size).into());
            lhs < j_bound(k, m) * BigRational::from_integer(base_size.into())
        });
        out.push(GrowthReport {
            m,
            k,
            base_size,
            iterated_size,
            difference_multiple_size: multiple.len() as u64,
            difference_multiple_holds: BigUint::from(multiple.len()) <= j,
            estjcov_holds: BigUint::from(iterated_size) <= BigUint::from(base_size) * &j,
            estecov_holds,
            j,
        });
    }
    Ok(out)
}
