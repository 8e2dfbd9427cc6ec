//! Exact comparisons involving rational powers.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive};

// Above this many bits the exact comparison falls back to logarithms.
const EXACT_BIT_BUDGET: u64 = 1 << 22;

pub fn big(r: Ratio<u64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn big_int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| ln(r).exp())
}

/// Natural logarithm of a positive rational, accurate for huge or tiny values.
pub fn ln(r: &BigRational) -> f64 {
    fn ln_int(n: &BigInt) -> f64 {
        let bits = n.bits();
        if bits < 1000 {
            return n.to_f64().unwrap().ln();
        }
        let shift = bits - 64;
        (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_int(r.numer()) - ln_int(r.denom())
}

fn pow(base: &BigRational, exp: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

fn bits(r: &BigRational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

/// Decides `x <= base^exponent` for positive rationals `x`, `base` and a
/// rational exponent, exactly when the integers involved stay within budget
/// and by logarithms otherwise.
pub fn le_pow(x: &BigRational, base: &BigRational, exponent: &BigRational) -> bool {
    assert!(x.is_positive() && base.is_positive(), "le_pow needs positive operands");
    // x <= base^(p/q)  <=>  x^q <= base^p   (q > 0)
    let p = exponent.numer();
    let q = exponent.denom();
    let (pa, qa) = (p.abs().to_u64(), q.to_u64());
    if let (Some(pa), Some(qa)) = (pa, qa) {
        let cost = qa.saturating_mul(bits(x)).saturating_add(pa.saturating_mul(bits(base)));
        if cost <= EXACT_BIT_BUDGET {
            let lhs = pow(x, qa);
            let rhs = if p.is_negative() { pow(&base.recip(), pa) } else { pow(base, pa) };
            return lhs <= rhs;
        }
    }
    ln(x) <= to_f64(exponent) * ln(base)
}

/// `floor(r)` for a nonnegative rational.
pub fn floor_u64(r: &BigRational) -> u64 {
    r.floor().to_integer().to_u64().unwrap_or(u64::MAX)
}

pub fn pow_u(base: u64, exp: u64) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}
