//! Brute-force reference implementations, written against plain residues
//! so they share no code with the library.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<i64>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i as i64);
            go(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(n, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

pub fn sum_mod(n: u64, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut hit = vec![false; n as usize];
    for &x in a {
        for &y in b {
            hit[(x + y).rem_euclid(n as i64) as usize] = true;
        }
    }
    (0..n as i64).filter(|&x| hit[x as usize]).collect()
}

pub fn diff_mod(n: u64, a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = n as i64;
    let s: BTreeSet<i64> = a.iter().flat_map(|&x| b.iter().map(move |&y| (x - y).rem_euclid(n))).collect();
    s.into_iter().collect()
}

/// `m`-fold sumset, `m >= 1`.
pub fn multiple_mod(n: u64, a: &[i64], m: u32) -> Vec<i64> {
    let mut acc = a.to_vec();
    for _ in 1..m {
        if acc.len() as u64 == n {
            break;
        }
        acc = sum_mod(n, &acc, a);
    }
    acc
}

pub fn subset_of(a: &[i64], b: &[i64]) -> bool {
    let b: BTreeSet<i64> = b.iter().copied().collect();
    a.iter().all(|x| b.contains(x))
}

/// Smallest `l` such that `A ⊆ {a, a+d, ..., a+ld}` for some `a` and some
/// nonzero `d`, by trying every pair `(d, a)`.
pub fn brute_diameter(n: u64, a: &[i64]) -> u64 {
    if a.len() <= 1 {
        return 0;
    }
    let nu = n as usize;
    let mut best = u64::MAX;
    for d in 1..nu {
        // pos[y] = first j with j*d = y
        let mut pos = vec![u64::MAX; nu];
        let (mut y, mut j) = (0usize, 0u64);
        while pos[y] == u64::MAX {
            pos[y] = j;
            y = (y + d) % nu;
            j += 1;
        }
        for start in 0..nu {
            let mut l = 0;
            for &x in a {
                let p = pos[(x as usize + nu - start) % nu];
                l = l.max(p);
                if l >= best {
                    break;
                }
            }
            best = best.min(l);
        }
    }
    best
}

/// Number of integer `k`-tuples with equal positive and negative parts,
/// each at most `m`.
pub fn brute_j(k: u32, m: u32) -> u64 {
    fn go(k: u32, m: i64, pos: i64, neg: i64) -> u64 {
        if k == 0 {
            return (pos == neg) as u64;
        }
        let mut total = 0;
        for x in -m..=m {
            let (p, q) = if x > 0 { (pos + x, neg) } else { (pos, neg - x) };
            if p <= m && q <= m {
                total += go(k - 1, m, p, q);
            }
        }
        total
    }
    go(k, m as i64, 0, 0)
}

/// Freiman isomorphism of order `k` between `src ⊆ Z/n` and integer
/// images: two `k`-multisets have equal sums in the source exactly when
/// their images do.
pub fn brute_freiman(n: u64, src: &[i64], images: &[i64], k: u32) -> bool {
    let mut forward: HashMap<i64, i64> = HashMap::new();
    let mut backward: HashMap<i64, i64> = HashMap::new();
    let mut ok = true;
    let mut idx = vec![0usize; k as usize];
    loop {
        let s = idx.iter().map(|&i| src[i]).sum::<i64>().rem_euclid(n as i64);
        let t = idx.iter().map(|&i| images[i]).sum::<i64>();
        ok &= *forward.entry(s).or_insert(t) == t;
        ok &= *backward.entry(t).or_insert(s) == s;
        if !ok {
            return false;
        }
        // next nondecreasing index tuple
        let mut p = k as usize;
        while p > 0 && idx[p - 1] == src.len() - 1 {
            p -= 1;
        }
        if p == 0 {
            return true;
        }
        idx[p - 1] += 1;
        for q in p..k as usize {
            idx[q] = idx[p - 1];
        }
    }
}

/// `|Σ_{x ∈ B} e(r x / n)|` by direct summation.
pub fn coefficient(n: u64, b: &[i64], r: u64) -> f64 {
    let (mut re, mut im) = (0f64, 0f64);
    for &x in b {
        let t = std::f64::consts::TAU * ((r as u128 * x as u128) % n as u128) as f64 / n as f64;
        re += t.cos();
        im += t.sin();
    }
    re.hypot(im)
}

/// Span of a set of vectors over `F_2`, vectors packed into integers.
pub fn xor_span(gens: &[i64]) -> Vec<i64> {
    let mut span: BTreeSet<i64> = BTreeSet::from([0]);
    for &g in gens {
        if !span.contains(&g) {
            let shifted: Vec<i64> = span.iter().map(|&x| x ^ g).collect();
            span.extend(shifted);
        }
    }
    span.into_iter().collect()
}

pub fn xor_diff(a: &[i64], b: &[i64]) -> Vec<i64> {
    let s: BTreeSet<i64> = a.iter().flat_map(|&x| b.iter().map(move |&y| x ^ y)).collect();
    s.into_iter().collect()
}
