//! Primality, modular inverses and prime search.

use num_integer::Integer;

// Deterministic for every u64.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `p` with `lo < p <= hi`.
pub fn smallest_prime_in(lo: u64, hi: u64) -> Option<u64> {
    (lo.checked_add(1)?..=hi).find(|&p| is_prime(p))
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: i64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let m_i = m as i128;
    let a = (a as i128).rem_euclid(m_i);
    let egcd = a.extended_gcd(&m_i);
    if egcd.gcd != 1 {
        return None;
    }
    Some(egcd.x.rem_euclid(m_i) as u64)
}
