//! Deterministic instance generators.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{translate, GSet, GroupSpec};
use crate::torsion::subgroup_generated;

pub const DEFAULT_INSTANCE_BUDGET: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Every nonempty subset of `Z/N` of size at most `max_size`, in
    /// size-then-lexicographic order. With `normalize`, only the
    /// lexicographically least translate of each set is kept.
    Exhaustive {
        modulus: u64,
        max_size: usize,
        #[serde(default)]
        normalize: bool,
    },
    /// `count` uniform subsets of `Z/N` of the given size.
    Random {
        modulus: u64,
        size: usize,
        count: usize,
        seed: u64,
    },
    /// Every nonempty subset of `(Z/r)^n` of size at most `max_size`.
    TorsionExhaustive {
        exponent: u32,
        rank: u32,
        max_size: usize,
    },
    RandomTorsion {
        exponent: u32,
        rank: u32,
        size: usize,
        count: usize,
        seed: u64,
    },
    /// `{a, a+d, ..., a+(l-1)d}` in `Z/N`.
    Progression {
        modulus: u64,
        start: i64,
        step: i64,
        length: usize,
    },
    /// `count` unions of `parts` random progressions of the given length.
    ProgressionUnion {
        modulus: u64,
        length: usize,
        parts: usize,
        count: usize,
        seed: u64,
    },
    /// `count` random cosets of random `dim`-generated subgroups of `(Z/r)^n`.
    SubspaceCoset {
        exponent: u32,
        rank: u32,
        dim: usize,
        count: usize,
        seed: u64,
    },
}

fn binomial_sum(n: u64, max_k: usize) -> u64 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for k in 1..=max_k.min(n as usize) as u128 {
        c = c * (n as u128 - k + 1) / k;
        total += c;
        if total > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    total as u64
}

impl Generator {
    /// Number of sets produced (before normalization).
    pub fn count(&self) -> u64 {
        match *self {
            Generator::Exhaustive { modulus, max_size, .. } => binomial_sum(modulus, max_size),
            Generator::TorsionExhaustive { exponent, rank, max_size } => {
                binomial_sum((exponent as u64).saturating_pow(rank), max_size)
            }
            Generator::Random { count, .. }
            | Generator::RandomTorsion { count, .. }
            | Generator::ProgressionUnion { count, .. }
            | Generator::SubspaceCoset { count, .. } => count as u64,
            Generator::Progression { .. } => 1,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            Generator::Random { seed, .. }
            | Generator::RandomTorsion { seed, .. }
            | Generator::ProgressionUnion { seed, .. }
            | Generator::SubspaceCoset { seed, .. } => Some(seed),
            _ => None,
        }
    }
}

/// Calls `f` on each `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn exhaustive(group: GroupSpec, max_size: usize) -> Result<Vec<GSet>> {
    let order = group.order().unwrap() as usize;
    let mut out = Vec::new();
    for k in 1..=max_size.min(order) {
        let mut err = None;
        for_each_subset(order, k, |idx| match GSet::from_codes(group, idx.iter().map(|&i| i as i64)) {
            Ok(s) => out.push(s),
            Err(e) => err = Some(e),
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(out)
}

fn is_least_translate(a: &GSet) -> bool {
    let group = a.group();
    let order = group.order().unwrap() as i64;
    (1..order).all(|c| translate(a, c).map_or(true, |t| a.codes() <= t.codes()))
}

fn random_subset(group: GroupSpec, size: usize, rng: &mut ChaCha8Rng) -> Result<GSet> {
    let order = group.order().unwrap() as usize;
    if size == 0 || size > order {
        return Err(Error::InvalidArgument(format!("cannot draw {size} points from a group of order {order}")));
    }
    GSet::from_codes(group, sample(rng, order, size).into_iter().map(|i| i as i64))
}

fn progression(group: GroupSpec, start: i64, step: i64, length: usize) -> Result<GSet> {
    let n = group.modulus().unwrap() as i128;
    GSet::from_codes(group, (0..length as i128).map(|j| (start as i128 + step as i128 * j).rem_euclid(n) as i64))
}

/// Materializes the instances of `generator`; fails if more than `budget`
/// sets would be produced.
pub fn enumerate_instances(generator: &Generator, budget: u64) -> Result<Vec<GSet>> {
    let count = generator.count();
    if count > budget {
        return Err(Error::BudgetExceeded(format!("{count} instances (limit {budget})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(generator.seed().unwrap_or(0));
    match *generator {
        Generator::Exhaustive { modulus, max_size, normalize } => {
            let all = exhaustive(GroupSpec::cyclic(modulus)?, max_size)?;
            Ok(if normalize { all.into_iter().filter(is_least_translate).collect() } else { all })
        }
        Generator::TorsionExhaustive { exponent, rank, max_size } => {
            exhaustive(GroupSpec::torsion(exponent, rank)?, max_size)
        }
        Generator::Random { modulus, size, count, .. } => {
            let group = GroupSpec::cyclic(modulus)?;
            (0..count).map(|_| random_subset(group, size, &mut rng)).collect()
        }
        Generator::RandomTorsion { exponent, rank, size, count, .. } => {
            let group = GroupSpec::torsion(exponent, rank)?;
            (0..count).map(|_| random_subset(group, size, &mut rng)).collect()
        }
        Generator::Progression { modulus, start, step, length } => {
            Ok(vec![progression(GroupSpec::cyclic(modulus)?, start, step, length)?])
        }
        Generator::ProgressionUnion { modulus, length, parts, count, .. } => {
            let group = GroupSpec::cyclic(modulus)?;
            if parts == 0 || length == 0 {
                return Err(Error::InvalidArgument("progression unions need parts and length >= 1".into()));
            }
            let step = rng.gen_range(1..modulus.max(2)) as i64;
            (0..count)
                .map(|_| {
                    let mut acc: Option<GSet> = None;
                    for _ in 0..parts {
                        let start = rng.gen_range(0..modulus) as i64;
                        let p = progression(group, start, step, length)?;
                        acc = Some(match acc {
                            Some(s) => s.union(&p)?,
                            None => p,
                        });
                    }
                    Ok(acc.unwrap())
                })
                .collect()
        }
        Generator::SubspaceCoset { exponent, rank, dim, count, .. } => {
            let group = GroupSpec::torsion(exponent, rank)?;
            let order = group.order().unwrap();
            (0..count)
                .map(|_| {
                    let gens = (0..dim).map(|_| rng.gen_range(0..order) as i64);
                    let h = subgroup_generated(&GSet::from_codes(group, gens)?)?;
                    translate(&h, rng.gen_range(0..order) as i64)
                })
                .collect()
        }
    }
}
