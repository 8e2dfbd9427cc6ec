//! Subgroup covers in groups of bounded exponent.
//!
//! If `A ⊆ (Z/r)^n` has small doubling, then `A` lies in a coset of
//! `gen(A - A)`, and the covering set `T` bounds that subgroup: iterating
//! `2(A-A) ⊆ A-A + T-T` gives `gen(A-A) ⊆ (A-A) + gen(T-T)`, and
//! `gen(T-T)` is generated by `|T| - 1` elements of order dividing `r`.

use std::collections::VecDeque;

use bitvec::prelude::*;
use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use serde::{Deserialize, Serialize};

use crate::covering::{difference_covering, BoundKind, WitnessMode};
use crate::error::{Error, Result};
use crate::exact;
use crate::group::{difference_set, doubling_ratio, sumset, Element, GSet, GroupSpec, DENSE_LIMIT};

/// Witness budget used when building `T`.
pub const TORSION_WITNESS_BUDGET: usize = 12;

/// `gen X` by breadth-first closure.
pub fn subgroup_generated(x: &GSet) -> Result<GSet> {
    let group = x.group();
    let order = group.order().ok_or(Error::Unsupported { op: "subgroup closure", group })?;
    if order > DENSE_LIMIT {
        return Err(Error::BudgetExceeded(format!("closure in a group of order {order}")));
    }
    let gens: Vec<i64> = x.codes().iter().copied().filter(|&c| c != 0).collect();
    let mut seen = bitvec![u64, Lsb0; 0; order as usize];
    seen.set(0, true);
    let mut queue = VecDeque::from([0i64]);
    while let Some(y) = queue.pop_front() {
        for &g in &gens {
            let z = group.add(y, g)?;
            if !seen[z as usize] {
                seen.set(z as usize, true);
                queue.push_back(z);
            }
        }
    }
    GSet::from_codes(group, seen.iter_ones().map(|i| i as i64))
}

fn exponent_of(group: GroupSpec) -> Result<u32> {
    match group {
        GroupSpec::Torsion { exponent, .. } => Ok(exponent),
        group => Err(Error::Unsupported { op: "torsion cover", group }),
    }
}

/// `c · r^⌊2c² - 2⌋ · |A|` for one choice of the constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremBound {
    /// The ratio the bound is stated in.
    pub constant: Ratio<u64>,
    /// `c²` for bound (a), `c` for bound (b).
    pub multiplier: Ratio<u64>,
    /// `⌊2c² - 2⌋`.
    pub exponent: u64,
    pub uncapped: BigRational,
    /// `min(uncapped, |G|)`.
    pub capped: BigRational,
    /// `|gen(A - A)| <= uncapped`.
    pub holds: bool,
}

impl TheoremBound {
    fn new(constant: Ratio<u64>, multiplier: Ratio<u64>, r: u32, n: u64, order: u64, size: u64) -> Self {
        let c = exact::big(constant);
        let two = BigRational::from_integer(2.into());
        let exponent = (&c * &c * &two - &two).floor().to_integer();
        let exponent = u64::try_from(exponent).unwrap_or(0);
        let power = num_traits::pow(BigUint::from(r), exponent as usize);
        let uncapped = exact::big(multiplier) * BigRational::from_integer(BigInt::from(power) * BigInt::from(n));
        let order = BigRational::from_integer(order.into());
        let capped = if uncapped > order { order } else { uncapped.clone() };
        let holds = BigRational::from_integer(size.into()) <= uncapped;
        TheoremBound { constant, multiplier, exponent, uncapped, capped, holds }
    }

    pub fn uncapped_f64(&self) -> f64 {
        exact::to_f64(&self.uncapped)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgroupCosetCertificate {
    pub group: GroupSpec,
    pub exponent: u32,
    pub set_size: u64,
    /// `|2A| / |A|`.
    pub doubling: Ratio<u64>,
    /// `|A - A| / |A|`.
    pub difference_ratio: Ratio<u64>,
    pub translates: GSet,
    pub translate_bound: BoundKind,
    /// `t_i - t_1`.
    pub generators: Vec<Element>,
    pub subgroup: GSet,
    pub subgroup_size: u64,
    pub coset_rep: Element,
    pub difference_size: u64,
    /// `|gen(T - T)|`.
    pub translate_subgroup_size: u64,
    /// `|gen(T - T)| <= r^{|T|-1}`.
    pub translate_subgroup_holds: bool,
    /// `gen(A - A) ⊆ (A - A) + gen(T - T)`.
    pub gen_inclusion: bool,
    /// `|gen(A - A)| <= |A - A| r^{|T|-1}`.
    pub growth_holds: bool,
    pub contains_a: bool,
    /// `K² r^⌊2K²-2⌋ |A|` with `K = |2A|/|A|`.
    pub bound_a: TheoremBound,
    /// `K r^⌊2K²-2⌋ |A|` with `K = |A-A|/|A|`.
    pub bound_b: TheoremBound,
}

impl SubgroupCosetCertificate {
    /// Every checked inclusion and inequality held.
    pub fn holds(&self) -> bool {
        self.contains_a
            && self.gen_inclusion
            && self.growth_holds
            && self.translate_subgroup_holds
            && self.bound_a.holds
            && self.bound_b.holds
    }
}

/// Places `A` in a coset of `gen(A - A)` and certifies its size.
pub fn torsion_cover(a: &GSet) -> Result<SubgroupCosetCertificate> {
    torsion_cover_with(a, WitnessMode::Prefer { budget: TORSION_WITNESS_BUDGET })
}

pub fn torsion_cover_with(a: &GSet, mode: WitnessMode) -> Result<SubgroupCosetCertificate> {
    let group = a.group();
    let r = exponent_of(group)?;
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let order = group.order().unwrap();
    let n = a.len() as u64;
    let stats = doubling_ratio(a)?;
    let cert = difference_covering(a, mode)?;
    let t = cert.translates;
    let t1 = t.codes()[0];
    let gen_codes = t.codes()[1..].iter().map(|&x| group.sub(x, t1)).collect::<Result<Vec<_>>>()?;
    let gen_set = GSet::from_codes(group, gen_codes.iter().copied())?;
    let translate_subgroup = subgroup_generated(&gen_set)?;
    let d = difference_set(a, a)?;
    let subgroup = subgroup_generated(&d)?;
    let gen_inclusion = subgroup.is_subset_of(&sumset(&d, &translate_subgroup)?);
    let rank_power = num_traits::pow(BigUint::from(r), t.len() - 1);
    let growth_holds = BigUint::from(subgroup.len()) <= BigUint::from(d.len()) * &rank_power;
    let translate_subgroup_holds = BigUint::from(translate_subgroup.len()) <= rank_power;
    let a0 = a.codes()[0];
    let contains_a = a.codes().iter().all(|&x| group.sub(x, a0).is_ok_and(|y| subgroup.contains_code(y)));
    let doubling = stats.doubling();
    let difference_ratio = stats.difference_ratio();
    let size = subgroup.len() as u64;
    let bound_a = TheoremBound::new(doubling, doubling * doubling, r, n, order, size);
    let bound_b = TheoremBound::new(difference_ratio, difference_ratio, r, n, order, size);
    Ok(SubgroupCosetCertificate {
        group,
        exponent: r,
        set_size: n,
        doubling,
        difference_ratio,
        translates: t,
        translate_bound: cert.bound_kind,
        generators: gen_codes.iter().map(|&c| group.decode(c)).collect(),
        subgroup_size: size,
        subgroup,
        coset_rep: group.decode(a0),
        difference_size: d.len() as u64,
        translate_subgroup_size: translate_subgroup.len() as u64,
        translate_subgroup_holds,
        gen_inclusion,
        growth_holds,
        contains_a,
        bound_a,
        bound_b,
    })
}
