//! Finite abelian groups, finite subsets, and exact sumset arithmetic.
//!
//! Every element is carried as an `i64` *code*:
//!
//! * cyclic `Z/NZ`: the residue in `[0, N)`;
//! * integer window: the integer itself (windows never wrap);
//! * torsion product `(Z/r)^n`: the base-`r` number whose digits are the
//!   coordinates, most significant first, so numeric order of codes is the
//!   lexicographic order of coordinate tuples.
//!
//! [`GSet`] keeps its codes sorted and deduplicated. For cyclic and torsion
//! groups of order at most [`DENSE_LIMIT`] it also keeps a dense bit
//! indicator, which sumset computations use to deduplicate.

use std::collections::BTreeSet;
use std::fmt;

use bitvec::prelude::*;
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order for which dense indicators are built.
pub const DENSE_LIMIT: u64 = 1 << 24;

const MAX_MODULUS: u64 = 1 << 62;
const MAX_TORSION_ORDER: u64 = 1 << 40;

type Bits = BitVec<u64, Lsb0>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GroupSpec {
    Cyclic {
        modulus: u64,
    },
    /// A bounded window `[lo, hi]` of the integers.
    Window {
        lo: i64,
        hi: i64,
    },
    /// `(Z/exponent)^rank`.
    Torsion {
        exponent: u32,
        rank: u32,
    },
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic { modulus } => write!(f, "Z/{modulus}"),
            GroupSpec::Window { lo, hi } => write!(f, "Z[{lo},{hi}]"),
            GroupSpec::Torsion { exponent, rank } => write!(f, "(Z/{exponent})^{rank}"),
        }
    }
}

impl GroupSpec {
    pub fn cyclic(modulus: u64) -> Result<Self> {
        GroupSpec::Cyclic { modulus }.validated()
    }

    pub fn window(lo: i64, hi: i64) -> Result<Self> {
        GroupSpec::Window { lo, hi }.validated()
    }

    pub fn torsion(exponent: u32, rank: u32) -> Result<Self> {
        GroupSpec::Torsion { exponent, rank }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            GroupSpec::Cyclic { modulus } => {
                if modulus == 0 || modulus > MAX_MODULUS {
                    return Err(Error::InvalidGroup(format!("cyclic modulus {modulus} out of range")));
                }
            }
            GroupSpec::Window { lo, hi } => {
                if lo > hi {
                    return Err(Error::InvalidGroup(format!("window [{lo},{hi}] is empty")));
                }
            }
            GroupSpec::Torsion { exponent, rank } => {
                if exponent < 2 || rank < 1 {
                    return Err(Error::InvalidGroup(format!(
                        "torsion product needs exponent >= 2 and rank >= 1, got ({exponent}, {rank})"
                    )));
                }
                let order = (exponent as u64).checked_pow(rank);
                if order.is_none_or(|o| o > MAX_TORSION_ORDER) {
                    return Err(Error::InvalidGroup(format!("{self} is too large to encode")));
                }
            }
        }
        Ok(self)
    }

    /// Group order; `None` for integer windows.
    pub fn order(&self) -> Option<u64> {
        match *self {
            GroupSpec::Cyclic { modulus } => Some(modulus),
            GroupSpec::Window { .. } => None,
            GroupSpec::Torsion { exponent, rank } => Some((exponent as u64).pow(rank)),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            GroupSpec::Cyclic { modulus } => Some(modulus),
            _ => None,
        }
    }

    /// Two sets may be combined when they live in the same ambient group. Any
    /// two windows are subsets of `Z`.
    pub fn compatible(&self, other: &GroupSpec) -> bool {
        match (self, other) {
            (GroupSpec::Window { .. }, GroupSpec::Window { .. }) => true,
            _ => self == other,
        }
    }

    pub fn check_compatible(&self, other: &GroupSpec) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::GroupMismatch { left: *self, right: *other })
        }
    }

    pub fn contains_code(&self, code: i64) -> bool {
        match *self {
            GroupSpec::Cyclic { modulus } => code >= 0 && (code as u64) < modulus,
            GroupSpec::Window { lo, hi } => lo <= code && code <= hi,
            GroupSpec::Torsion { .. } => code >= 0 && (code as u64) < self.order().unwrap(),
        }
    }

    pub fn add(&self, a: i64, b: i64) -> Result<i64> {
        match *self {
            GroupSpec::Cyclic { modulus } => Ok(((a as i128 + b as i128) % modulus as i128) as i64),
            GroupSpec::Window { .. } => a.checked_add(b).ok_or(Error::Overflow),
            GroupSpec::Torsion { exponent: 2, .. } => Ok(a ^ b),
            GroupSpec::Torsion { exponent, rank } => Ok(torsion_combine(exponent, rank, a, b, |x, y| x + y)),
        }
    }

    pub fn sub(&self, a: i64, b: i64) -> Result<i64> {
        match *self {
            GroupSpec::Cyclic { modulus } => Ok((a as i128 - b as i128).rem_euclid(modulus as i128) as i64),
            GroupSpec::Window { .. } => a.checked_sub(b).ok_or(Error::Overflow),
            GroupSpec::Torsion { exponent: 2, .. } => Ok(a ^ b),
            GroupSpec::Torsion { exponent, rank } => {
                Ok(torsion_combine(exponent, rank, a, b, |x, y| x + exponent as i64 - y))
            }
        }
    }

    pub fn neg(&self, a: i64) -> Result<i64> {
        self.sub(0, a)
    }

    /// `lambda * a`.
    pub fn scale(&self, lambda: i64, a: i64) -> Result<i64> {
        match *self {
            GroupSpec::Cyclic { modulus } => Ok(((lambda as i128 * a as i128).rem_euclid(modulus as i128)) as i64),
            GroupSpec::Window { .. } => lambda.checked_mul(a).ok_or(Error::Overflow),
            GroupSpec::Torsion { exponent, rank } => {
                let l = lambda.rem_euclid(exponent as i64);
                Ok(torsion_combine(exponent, rank, a, 0, |x, _| x * l))
            }
        }
    }

    /// Reduces a scalar into canonical range (cyclic), or checks it lies in
    /// the window.
    pub fn reduce_scalar(&self, value: i64) -> Result<i64> {
        match *self {
            GroupSpec::Cyclic { modulus } => Ok((value as i128).rem_euclid(modulus as i128) as i64),
            GroupSpec::Window { lo, hi } => {
                if lo <= value && value <= hi {
                    Ok(value)
                } else {
                    Err(Error::NotInGroup { element: value.to_string(), group: *self })
                }
            }
            GroupSpec::Torsion { .. } => {
                Err(Error::InvalidArgument(format!("torsion elements need a coordinate tuple, got scalar {value}")))
            }
        }
    }

    pub fn encode(&self, element: &Element) -> Result<i64> {
        match (self, element) {
            (GroupSpec::Torsion { exponent, rank }, Element::Tuple(coords)) => {
                if coords.len() != *rank as usize {
                    return Err(Error::NotInGroup { element: element.to_string(), group: *self });
                }
                let r = *exponent as i64;
                Ok(coords.iter().fold(0i64, |acc, &c| acc * r + c.rem_euclid(r)))
            }
            (GroupSpec::Torsion { .. }, Element::Scalar(_)) => {
                Err(Error::NotInGroup { element: element.to_string(), group: *self })
            }
            (_, Element::Scalar(v)) => self.reduce_scalar(*v),
            (_, Element::Tuple(coords)) if coords.len() == 1 => self.reduce_scalar(coords[0]),
            _ => Err(Error::NotInGroup { element: element.to_string(), group: *self }),
        }
    }

    pub fn decode(&self, code: i64) -> Element {
        match *self {
            GroupSpec::Torsion { exponent, rank } => {
                let r = exponent as i64;
                let mut coords = vec![0i64; rank as usize];
                let mut c = code;
                for slot in coords.iter_mut().rev() {
                    *slot = c % r;
                    c /= r;
                }
                Element::Tuple(coords)
            }
            _ => Element::Scalar(code),
        }
    }
}

fn torsion_combine(exponent: u32, rank: u32, a: i64, b: i64, op: impl Fn(i64, i64) -> i64) -> i64 {
    let r = exponent as i64;
    let (mut a, mut b) = (a, b);
    let mut out = 0i64;
    let mut place = 1i64;
    for _ in 0..rank {
        let digit = op(a % r, b % r).rem_euclid(r);
        out += digit * place;
        place *= r;
        a /= r;
        b /= r;
    }
    out
}

/// A group element in user-facing form: a scalar for cyclic and window
/// groups, a coordinate tuple for torsion products.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Scalar(i64),
    Tuple(Vec<i64>),
}

impl Element {
    pub fn as_scalar(&self) -> Option<i64> {
        match self {
            Element::Scalar(v) => Some(*v),
            Element::Tuple(_) => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Scalar(v) => write!(f, "{v}"),
            Element::Tuple(c) => {
                write!(f, "(")?;
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// The exchange format for sets: `{"group": {...}, "elements": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub group: GroupSpec,
    pub elements: Vec<Element>,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn to_gset(&self) -> Result<GSet> {
        GSet::from_elements(self.group, &self.elements)
    }
}

/// A finite subset of a group.
///
/// Equality compares elements and ambient groups; two window sets compare
/// equal whenever they hold the same integers.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "Instance", into = "Instance")]
pub struct GSet {
    group: GroupSpec,
    codes: Vec<i64>,
    indicator: Option<Bits>,
}

impl PartialEq for GSet {
    fn eq(&self, other: &Self) -> bool {
        self.group.compatible(&other.group) && self.codes == other.codes
    }
}

impl Eq for GSet {}

impl TryFrom<Instance> for GSet {
    type Error = Error;

    fn try_from(value: Instance) -> Result<Self> {
        value.to_gset()
    }
}

impl From<GSet> for Instance {
    fn from(set: GSet) -> Self {
        set.to_instance()
    }
}

impl fmt::Display for GSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}} in {}", self.group)
    }
}

impl GSet {
    /// Builds a set from canonical codes, sorting and deduplicating them.
    pub fn from_codes(group: GroupSpec, codes: impl IntoIterator<Item = i64>) -> Result<Self> {
        let group = group.validated()?;
        let mut codes: Vec<i64> = codes.into_iter().collect();
        codes.sort_unstable();
        codes.dedup();
        if let Some(&bad) = codes.iter().find(|&&c| !group.contains_code(c)) {
            return Err(Error::NotInGroup { element: group.decode(bad).to_string(), group });
        }
        Ok(Self::from_sorted_unchecked(group, codes))
    }

    pub(crate) fn from_sorted_unchecked(group: GroupSpec, codes: Vec<i64>) -> Self {
        let indicator = match group.order() {
            Some(order) if order <= DENSE_LIMIT => {
                let mut bits = bitvec![u64, Lsb0; 0; order as usize];
                for &c in &codes {
                    bits.set(c as usize, true);
                }
                Some(bits)
            }
            _ => None,
        };
        GSet { group, codes, indicator }
    }

    pub fn from_elements(group: GroupSpec, elements: &[Element]) -> Result<Self> {
        let group = group.validated()?;
        let codes = elements.iter().map(|e| group.encode(e)).collect::<Result<Vec<_>>>()?;
        Self::from_codes(group, codes)
    }

    /// A subset of `Z/modulus`; values are reduced.
    pub fn cyclic(modulus: u64, values: &[i64]) -> Result<Self> {
        let group = GroupSpec::cyclic(modulus)?;
        let codes = values.iter().map(|&v| group.reduce_scalar(v)).collect::<Result<Vec<_>>>()?;
        Self::from_codes(group, codes)
    }

    /// A subset of the integer window `[lo, hi]`.
    pub fn window(lo: i64, hi: i64, values: &[i64]) -> Result<Self> {
        Self::from_codes(GroupSpec::window(lo, hi)?, values.iter().copied())
    }

    /// A set of integers in the tightest window containing it.
    pub fn integers(values: &[i64]) -> Result<Self> {
        let lo = values.iter().copied().min().unwrap_or(0);
        let hi = values.iter().copied().max().unwrap_or(0);
        Self::window(lo, hi, values)
    }

    pub fn torsion(exponent: u32, rank: u32, points: &[Vec<i64>]) -> Result<Self> {
        let group = GroupSpec::torsion(exponent, rank)?;
        let elements: Vec<Element> = points.iter().cloned().map(Element::Tuple).collect();
        Self::from_elements(group, &elements)
    }

    pub fn empty(group: GroupSpec) -> Self {
        Self::from_sorted_unchecked(group, Vec::new())
    }

    /// The whole group (cyclic and torsion only).
    pub fn full(group: GroupSpec) -> Result<Self> {
        let order = group.order().ok_or(Error::Unsupported { op: "full group", group })?;
        Ok(Self::from_sorted_unchecked(group, (0..order as i64).collect()))
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[i64] {
        &self.codes
    }

    pub fn contains_code(&self, code: i64) -> bool {
        match &self.indicator {
            Some(bits) => code >= 0 && (code as usize) < bits.len() && bits[code as usize],
            None => self.codes.binary_search(&code).is_ok(),
        }
    }

    pub fn contains(&self, element: &Element) -> bool {
        self.group.encode(element).is_ok_and(|c| self.contains_code(c))
    }

    pub fn elements(&self) -> Vec<Element> {
        self.codes.iter().map(|&c| self.group.decode(c)).collect()
    }

    pub fn to_instance(&self) -> Instance {
        Instance { group: self.group, elements: self.elements() }
    }

    pub fn is_subset_of(&self, other: &GSet) -> bool {
        self.group.compatible(&other.group) && self.codes.iter().all(|&c| other.contains_code(c))
    }

    /// First element of `self` missing from `other`.
    pub fn first_missing_from(&self, other: &GSet) -> Option<i64> {
        self.codes.iter().copied().find(|&c| !other.contains_code(c))
    }

    /// Number of elements of `self` not in `other`.
    pub fn count_outside(&self, other: &GSet) -> usize {
        self.codes.iter().filter(|&&c| !other.contains_code(c)).count()
    }

    pub fn union(&self, other: &GSet) -> Result<GSet> {
        self.group.check_compatible(&other.group)?;
        let group = join_windows(self.group, other.group);
        let merged: BTreeSet<i64> = self.codes.iter().chain(other.codes.iter()).copied().collect();
        Ok(GSet::from_sorted_unchecked(group, merged.into_iter().collect()))
    }

    /// Re-expresses a window set inside the given (compatible, larger)
    /// window; other groups are returned unchanged.
    pub fn with_group(&self, group: GroupSpec) -> Result<GSet> {
        self.group.check_compatible(&group)?;
        GSet::from_codes(group, self.codes.iter().copied())
    }
}

fn join_windows(a: GroupSpec, b: GroupSpec) -> GroupSpec {
    match (a, b) {
        (GroupSpec::Window { lo: l1, hi: h1 }, GroupSpec::Window { lo: l2, hi: h2 }) => {
            GroupSpec::Window { lo: l1.min(l2), hi: h1.max(h2) }
        }
        _ => a,
    }
}

/// How [`sumset_with`] deduplicates sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumsetPath {
    /// Dense indicator when the group is finite and of order at most
    /// [`DENSE_LIMIT`], pairwise otherwise.
    Auto,
    Dense,
    Pairwise,
}

fn combine(a: &GSet, b: &GSet, path: SumsetPath, negate_b: bool) -> Result<GSet> {
    a.group.check_compatible(&b.group)?;
    let group = match (a.group, b.group) {
        (GroupSpec::Window { lo: l1, hi: h1 }, GroupSpec::Window { lo: l2, hi: h2 }) => {
            let (lo, hi) = if negate_b {
                (l1.checked_sub(h2), h1.checked_sub(l2))
            } else {
                (l1.checked_add(l2), h1.checked_add(h2))
            };
            GroupSpec::Window { lo: lo.ok_or(Error::Overflow)?, hi: hi.ok_or(Error::Overflow)? }
        }
        (g, _) => g,
    };
    if a.is_empty() || b.is_empty() {
        return Ok(GSet::empty(group));
    }
    let op = |x: i64, y: i64| if negate_b { group.sub(x, y) } else { group.add(x, y) };
    let dense_ok = group.order().is_some_and(|o| o <= DENSE_LIMIT);
    let use_dense = match path {
        SumsetPath::Auto => dense_ok,
        SumsetPath::Dense => {
            if !dense_ok {
                return Err(Error::Unsupported { op: "dense sumset", group });
            }
            true
        }
        SumsetPath::Pairwise => false,
    };
    if use_dense {
        let order = group.order().unwrap() as usize;
        let mut bits = bitvec![u64, Lsb0; 0; order];
        for &x in &a.codes {
            for &y in &b.codes {
                bits.set(op(x, y)? as usize, true);
            }
        }
        let codes: Vec<i64> = bits.iter_ones().map(|i| i as i64).collect();
        Ok(GSet { group, codes, indicator: Some(bits) })
    } else {
        let mut codes = Vec::with_capacity(a.len() * b.len());
        for &x in &a.codes {
            for &y in &b.codes {
                codes.push(op(x, y)?);
            }
        }
        codes.sort_unstable();
        codes.dedup();
        Ok(GSet::from_sorted_unchecked(group, codes))
    }
}

/// `A + B`.
pub fn sumset(a: &GSet, b: &GSet) -> Result<GSet> {
    combine(a, b, SumsetPath::Auto, false)
}

pub fn sumset_with(a: &GSet, b: &GSet, path: SumsetPath) -> Result<GSet> {
    combine(a, b, path, false)
}

/// `A - B`.
pub fn difference_set(a: &GSet, b: &GSet) -> Result<GSet> {
    combine(a, b, SumsetPath::Auto, true)
}

/// `kA`, the k-fold sumset.
pub fn iterated_sum(a: &GSet, k: u32) -> Result<GSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("iterated sum needs k >= 1".into()));
    }
    let mut acc = a.clone();
    for _ in 1..k {
        acc = sumset(&acc, a)?;
    }
    Ok(acc)
}

/// `{lambda * a}`. No invertibility requirement; see [`dilate_invertible`].
pub fn dilate(a: &GSet, lambda: i64) -> Result<GSet> {
    let group = match a.group {
        GroupSpec::Window { lo, hi } => {
            let x = lo.checked_mul(lambda).ok_or(Error::Overflow)?;
            let y = hi.checked_mul(lambda).ok_or(Error::Overflow)?;
            GroupSpec::Window { lo: x.min(y), hi: x.max(y) }
        }
        g => g,
    };
    let codes = a.codes.iter().map(|&c| group.scale(lambda, c)).collect::<Result<Vec<_>>>()?;
    GSet::from_codes(group, codes)
}

/// Dilation by a unit of `Z/N` (a bijection of the group).
pub fn dilate_invertible(a: &GSet, lambda: i64) -> Result<GSet> {
    match a.group {
        GroupSpec::Cyclic { modulus } => {
            if lambda.rem_euclid(modulus as i64).gcd(&(modulus as i64)) != 1 && modulus > 1 {
                return Err(Error::NotInvertible { value: lambda, modulus });
            }
            dilate(a, lambda)
        }
        GroupSpec::Torsion { exponent, .. } => {
            let l = lambda.rem_euclid(exponent as i64);
            if l.gcd(&(exponent as i64)) != 1 {
                return Err(Error::NotInvertible { value: lambda, modulus: exponent as u64 });
            }
            dilate(a, lambda)
        }
        GroupSpec::Window { .. } => {
            if lambda == 0 {
                return Err(Error::NotInvertible { value: 0, modulus: 0 });
            }
            dilate(a, lambda)
        }
    }
}

/// `A + c` where `c` is an element code.
pub fn translate(a: &GSet, c: i64) -> Result<GSet> {
    let group = match a.group {
        GroupSpec::Window { lo, hi } => GroupSpec::Window {
            lo: lo.checked_add(c).ok_or(Error::Overflow)?,
            hi: hi.checked_add(c).ok_or(Error::Overflow)?,
        },
        g => {
            if !g.contains_code(c) {
                return Err(Error::NotInGroup { element: c.to_string(), group: g });
            }
            g
        }
    };
    let codes = a.codes.iter().map(|&x| group.add(x, c)).collect::<Result<Vec<_>>>()?;
    GSet::from_codes(group, codes)
}

pub fn negate(a: &GSet) -> Result<GSet> {
    dilate(a, -1)
}

/// Cardinalities behind the doubling constant `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublingStats {
    pub size: u64,
    pub sum_size: u64,
    pub diff_size: u64,
}

impl DoublingStats {
    /// `|A + A| / |A|`.
    pub fn doubling(&self) -> Ratio<u64> {
        Ratio::new(self.sum_size, self.size)
    }

    /// `|A - A| / |A|`.
    pub fn difference_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.diff_size, self.size)
    }

    /// `min(|2A|, |A - A|) / |A|`.
    pub fn min_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.sum_size.min(self.diff_size), self.size)
    }
}

pub fn doubling_ratio(a: &GSet) -> Result<DoublingStats> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(DoublingStats {
        size: a.len() as u64,
        sum_size: sumset(a, a)?.len() as u64,
        diff_size: difference_set(a, a)?.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: u64, v: &[i64]) -> GSet {
        GSet::cyclic(n, v).unwrap()
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(sumset(&cyc(7, &[0]), &cyc(7, &[0])).unwrap(), cyc(7, &[0]));
        let a = GSet::window(0, 10, &[0, 1, 3]).unwrap();
        let s = sumset(&a, &a).unwrap();
        assert_eq!(s.codes(), &[0, 1, 2, 3, 4, 6]);
        assert_eq!(sumset(&cyc(7, &[0, 1]), &cyc(7, &[0, 2])).unwrap().codes(), &[0, 1, 2, 3]);
    }

    #[test]
    fn difference_examples() {
        let a = cyc(11, &[5]);
        assert_eq!(difference_set(&a, &a).unwrap().codes(), &[0]);
        let a = cyc(7, &[0, 1, 3]);
        assert_eq!(difference_set(&a, &a).unwrap().len(), 7);
        let a = GSet::window(0, 10, &[0, 1, 3]).unwrap();
        assert_eq!(difference_set(&a, &a).unwrap().codes(), &[-3, -2, -1, 0, 1, 2, 3]);
    }

    #[test]
    fn iterated_examples() {
        assert_eq!(iterated_sum(&cyc(13, &[0]), 5).unwrap().codes(), &[0]);
        assert_eq!(iterated_sum(&cyc(101, &[0, 1]), 3).unwrap().codes(), &[0, 1, 2, 3]);
        let a = GSet::window(0, 10, &[0, 1, 3]).unwrap();
        assert_eq!(iterated_sum(&a, 2).unwrap(), sumset(&a, &a).unwrap());
        assert_eq!(iterated_sum(&a, 1).unwrap(), a);
        assert!(iterated_sum(&a, 0).is_err());
    }

    #[test]
    fn dilation_and_translation() {
        let a = GSet::integers(&[0, 1, 2]).unwrap();
        assert_eq!(dilate(&a, 1).unwrap(), a);
        assert_eq!(dilate_invertible(&cyc(7, &[0, 2, 4]), 4).unwrap().codes(), &[0, 1, 2]);
        assert_eq!(translate(&cyc(5, &[0, 1]), 4).unwrap().codes(), &[0, 4]);
        assert!(matches!(dilate_invertible(&cyc(8, &[1, 2]), 2), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn doubling_examples() {
        let ap = GSet::integers(&(0..10).collect::<Vec<_>>()).unwrap();
        assert_eq!(doubling_ratio(&ap).unwrap().doubling(), Ratio::new(19, 10));
        assert_eq!(doubling_ratio(&cyc(5, &[0])).unwrap().doubling(), Ratio::from_integer(1));
        let a = GSet::integers(&[0, 1, 3]).unwrap();
        assert_eq!(doubling_ratio(&a).unwrap().doubling(), Ratio::from_integer(2));
        assert_eq!(doubling_ratio(&GSet::empty(GroupSpec::cyclic(5).unwrap())), Err(Error::EmptySet));
    }

    #[test]
    fn empty_operand_gives_empty_sumset() {
        let g = GroupSpec::cyclic(9).unwrap();
        assert!(sumset(&GSet::empty(g), &cyc(9, &[1, 2])).unwrap().is_empty());
    }

    #[test]
    fn group_mismatch_is_rejected() {
        let r = sumset(&cyc(7, &[1]), &cyc(11, &[1]));
        assert!(matches!(r, Err(Error::GroupMismatch { .. })));
    }

    #[test]
    fn window_overflow_is_detected() {
        let a = GSet::window(i64::MAX - 1, i64::MAX, &[i64::MAX]).unwrap();
        assert_eq!(sumset(&a, &a), Err(Error::Overflow));
    }

    #[test]
    fn torsion_codes_round_trip_and_add() {
        let g = GroupSpec::torsion(3, 2).unwrap();
        let e = Element::Tuple(vec![2, 1]);
        let code = g.encode(&e).unwrap();
        assert_eq!(code, 7);
        assert_eq!(g.decode(code), e);
        let s = g.add(code, g.encode(&Element::Tuple(vec![2, 2])).unwrap()).unwrap();
        assert_eq!(g.decode(s), Element::Tuple(vec![1, 0]));
        assert_eq!(g.decode(g.neg(code).unwrap()), Element::Tuple(vec![1, 2]));
        let g2 = GroupSpec::torsion(2, 3).unwrap();
        assert_eq!(g2.add(0b101, 0b110).unwrap(), 0b011);
        assert_eq!(g2.sub(0b101, 0b110).unwrap(), 0b011);
        assert_eq!(g2.scale(3, 0b101).unwrap(), 0b101);
        assert_eq!(g2.scale(2, 0b101).unwrap(), 0);
    }

    #[test]
    fn instance_json_matches_schema() {
        let inst = Instance::from_json(r#"{"group":{"type":"cyclic","modulus":7},"elements":[3,1,8]}"#).unwrap();
        let set = inst.to_gset().unwrap();
        assert_eq!(set.codes(), &[1, 3]);
        assert_eq!(set.to_instance().to_json(), r#"{"group":{"type":"cyclic","modulus":7},"elements":[1,3]}"#);
        let t = Instance::from_json(r#"{"group":{"type":"torsion","exponent":2,"rank":2},"elements":[[1,1],[0,1]]}"#)
            .unwrap()
            .to_gset()
            .unwrap();
        assert_eq!(
            t.to_instance().to_json(),
            r#"{"group":{"type":"torsion","exponent":2,"rank":2},"elements":[[0,1],[1,1]]}"#
        );
        let w = Instance::from_json(r#"{"group":{"type":"window","lo":0,"hi":3},"elements":[4]}"#).unwrap();
        assert!(w.to_gset().is_err());
    }

    #[test]
    fn invalid_groups_are_rejected() {
        assert!(GroupSpec::cyclic(0).is_err());
        assert!(GroupSpec::window(3, 2).is_err());
        assert!(GroupSpec::torsion(1, 3).is_err());
        assert!(GroupSpec::torsion(2, 0).is_err());
    }
}
