//! Acceptance run: one PASS/FAIL line per criterion. Every library result
//! is cross-checked against the brute-force references in `common`.

mod common;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use smallsum::covering::{
    covering_certificate, covering_translates, growth_bound_profile, is_k_covering, j_bound_report, j_count,
    verify_incm, BoundKind, CoveringCertificate, WitnessMode,
};
use smallsum::fourier::{
    certified_large_coefficient, convolution_counts, moment_lower_bound_check, spectrum, spectrum_with, TransformPath,
};
use smallsum::group::{dilate, translate};
use smallsum::harness::bounds::{bound_calculator_ln, ln_threshold_thm1, ln_threshold_thm2};
use smallsum::primes::{is_prime, smallest_prime_in};
use smallsum::rectify::{
    diameter, freiman_iso_check, rectify, DiamHypothesis, DiamProbe, GapCoverOutcome, GapCoverProbe, LevOutcome,
    LevProbe, RectifyOutcome,
};
use smallsum::torsion::torsion_cover;
use smallsum::{Error, GSet, GroupSpec};

use common::*;

const SLACK: f64 = 1e-9;

struct Verdict {
    failures: Vec<String>,
    detail: String,
}

impl Verdict {
    fn new() -> Self {
        Verdict { failures: Vec::new(), detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }

    fn merge(&mut self, other: Vec<String>) {
        for f in other {
            self.check(false, || f);
        }
    }
}

#[derive(Clone)]
struct Inst {
    n: u64,
    codes: Vec<i64>,
}

impl Inst {
    fn set(&self) -> GSet {
        GSet::cyclic(self.n, &self.codes).unwrap()
    }
}

fn random_codes(rng: &mut ChaCha8Rng, n: u64, size: usize) -> Vec<i64> {
    let mut v: Vec<i64> = sample(rng, n as usize, size).into_iter().map(|x| x as i64).collect();
    v.sort_unstable();
    v
}

/// Exhaustive sets of size at most 4 modulo 11..23, then 500 random sets of
/// size at most 10 modulo at most 499.
fn covering_instances() -> Vec<Inst> {
    let mut out = Vec::new();
    for n in [11u64, 13, 17, 19, 23] {
        for k in 1..=4 {
            out.extend(subsets(n as usize, k).into_iter().map(|codes| Inst { n, codes }));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let n = rng.gen_range(11..=499u64);
        let size = rng.gen_range(1..=10usize);
        out.push(Inst { n, codes: random_codes(&mut rng, n, size) });
    }
    out
}

fn collect_failures<T: Sync>(items: &[T], f: impl Fn(&T) -> Vec<String> + Sync) -> Vec<String> {
    items.par_iter().flat_map_iter(|x| f(x)).collect()
}

fn certificates(insts: &[Inst]) -> Vec<CoveringCertificate> {
    insts
        .par_iter()
        .map(|inst| {
            let a = inst.set();
            covering_certificate(&a, &a, &a, WitnessMode::Prefer { budget: 12 }).unwrap()
        })
        .collect()
}

fn criterion_1(insts: &[Inst], certs: &[CoveringCertificate]) -> Verdict {
    let mut v = Verdict::new();
    let witnessed = AtomicU64::new(0);
    let pairs: Vec<_> = insts.iter().zip(certs).collect();
    let failures = collect_failures(&pairs, |&(inst, cert)| {
        let mut out = Vec::new();
        let d = diff_mod(inst.n, &inst.codes, &inst.codes);
        let t = cert.translates.codes();
        let lhs = sum_mod(inst.n, &d, &d);
        let rhs = sum_mod(inst.n, &d, &diff_mod(inst.n, t, t));
        if !subset_of(&lhs, &rhs) || !cert.inclusion_verified {
            out.push(format!("inclusion fails for {:?} mod {}", inst.codes, inst.n));
        }
        if cert.bound_kind == BoundKind::Pluennecke {
            witnessed.fetch_add(1, Ordering::Relaxed);
            // |T| <= 2 K1 K2 - 1 with K1 = K2 = |2A|/|A|
            let s = sum_mod(inst.n, &inst.codes, &inst.codes).len() as u64;
            let n = inst.codes.len() as u64;
            if (t.len() as u64 + 1) * n * n > 2 * s * s {
                out.push(format!("|T| = {} too large for {:?} mod {}", t.len(), inst.codes, inst.n));
            }
        } else {
            out.push(format!("no witness for {:?}", inst.codes));
        }
        out
    });
    v.merge(failures);
    v.detail = format!(
        "{} certificates, inclusion checked by brute force; {} with witness size bound",
        insts.len(),
        witnessed.load(Ordering::Relaxed)
    );
    v
}

fn criterion_2(insts: &[Inst], certs: &[CoveringCertificate]) -> Verdict {
    let mut v = Verdict::new();
    let pairs: Vec<_> = insts.iter().zip(certs).collect();
    let failures = collect_failures(&pairs, |&(inst, cert)| {
        let mut out = Vec::new();
        if verify_incm(&inst.set(), &cert.translates, 4).unwrap() != 4 {
            out.push(format!("library reports failure for {:?} mod {}", inst.codes, inst.n));
        }
        let d = diff_mod(inst.n, &inst.codes, &inst.codes);
        let t = cert.translates.codes();
        let tt = diff_mod(inst.n, t, t);
        let (mut lhs, mut multiple) = (d.clone(), tt.clone());
        for m in 1..=4 {
            lhs = sum_mod(inst.n, &lhs, &d);
            if m > 1 {
                multiple = sum_mod(inst.n, &multiple, &tt);
            }
            if !subset_of(&lhs, &sum_mod(inst.n, &d, &multiple)) {
                out.push(format!("m = {m} fails for {:?} mod {}", inst.codes, inst.n));
            }
        }
        out
    });
    v.merge(failures);
    v.detail = format!("m = 1..4 on {} instances", insts.len());
    v
}

fn criterion_3() -> Verdict {
    let mut v = Verdict::new();
    for k in 1..=4 {
        for m in 0..=8 {
            let dp = j_count(k, m).unwrap();
            let brute = brute_j(k, m);
            v.check(dp == BigUint::from(brute), || format!("J({k},{m}): dp {dp} vs brute {brute}"));
        }
    }
    let mut bound_cases = 0;
    for k in 1..=6 {
        for m in k..=40 {
            let r = j_bound_report(k, m).unwrap();
            // (14m/k)^k recomputed as integers: J k^k < (14m)^k
            let lhs = r.count.clone() * BigUint::from(k).pow(k);
            let rhs = BigUint::from(14 * m).pow(k);
            v.check(r.holds && lhs < rhs, || format!("J({k},{m}) = {} exceeds the bound", r.count));
            bound_cases += 1;
        }
        v.check(j_count(k, 0).unwrap() == BigUint::from(1u8), || format!("J({k},0) != 1"));
    }
    for m in 0..=40 {
        v.check(j_count(1, m).unwrap() == BigUint::from(1u8), || format!("J(1,{m}) != 1"));
    }
    v.detail = format!("36 brute-force comparisons, {bound_cases} bound cases, trivial values");
    v
}

fn criterion_4(insts: &[Inst], certs: &[CoveringCertificate]) -> Verdict {
    let mut v = Verdict::new();
    let checks = AtomicU64::new(0);
    let pairs: Vec<_> = insts.iter().zip(certs).collect();
    let failures = collect_failures(&pairs, |&(inst, cert)| {
        let t = &cert.translates;
        let b_codes = diff_mod(inst.n, &inst.codes, &inst.codes);
        let b = GSet::cyclic(inst.n, &b_codes).unwrap();
        let k = t.len() as u32;
        let bsize = b_codes.len() as u64;
        let mut out = Vec::new();
        let reports = growth_bound_profile(&b, t, k.max(4)).unwrap();
        let mut iterated = b_codes.clone();
        for r in reports {
            let m = r.m;
            iterated = sum_mod(inst.n, &iterated, &b_codes);
            let size = iterated.len() as u64;
            let j = j_count(k, m).unwrap();
            let mut ok = r.iterated_size == size && r.j == j && BigUint::from(size) <= j * bsize;
            if m >= k {
                let lhs = BigUint::from(size) * BigUint::from(k).pow(k);
                let rhs = BigUint::from(14 * m).pow(k) * bsize;
                ok &= lhs < rhs && r.estecov_holds == Some(true);
            }
            ok &= r.holds();
            checks.fetch_add(1, Ordering::Relaxed);
            if !ok {
                out.push(format!("m = {m}, |T| = {k} for {:?} mod {}", inst.codes, inst.n));
            }
        }
        out
    });
    v.merge(failures);
    v.detail = format!("{} (B, T, m) cases with B = A - A", checks.load(Ordering::Relaxed));
    v
}

fn criterion_5() -> Verdict {
    let mut v = Verdict::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sets: Vec<Inst> = (0..1000)
        .map(|_| {
            let n = rng.gen_range(2..=4096u64);
            let size = rng.gen_range(1..=(n as usize).min(64));
            Inst { n, codes: random_codes(&mut rng, n, size) }
        })
        .collect();
    let worst = sets
        .par_iter()
        .map(|inst| {
            let a = inst.set();
            let fast = spectrum_with::<f64>(&a, TransformPath::Fast).unwrap();
            let direct = spectrum_with::<f64>(&a, TransformPath::Direct).unwrap();
            let size = inst.codes.len() as f64;
            let energy: f64 = fast.magnitudes.iter().map(|m| m * m).sum();
            let residual = (energy - inst.n as f64 * size).abs() / (inst.n as f64 * size);
            let agree =
                fast.magnitudes.iter().zip(&direct.magnitudes).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / size;
            let probe = (0..inst.n.min(7))
                .map(|r| (coefficient(inst.n, &inst.codes, r) - fast.magnitudes[r as usize]).abs() / size)
                .fold(0.0, f64::max);
            (residual.max(fast.parseval_residual), agree.max(probe))
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    v.check(worst.0 <= 1e-9, || format!("Parseval residual {:.3e}", worst.0));
    v.check(worst.1 <= 1e-9, || format!("transform paths differ by {:.3e}|B|", worst.1));

    let moment_sets: Vec<Inst> = (0..200)
        .map(|_| {
            let n = rng.gen_range(3..=512u64);
            let size = rng.gen_range(1..=(n as usize).min(12));
            Inst { n, codes: random_codes(&mut rng, n, size) }
        })
        .collect();
    let failures = collect_failures(&moment_sets, |inst| {
        let a = inst.set();
        let mut out = Vec::new();
        let mut r = vec![0u128; inst.n as usize];
        for &x in &inst.codes {
            r[x as usize] += 1;
        }
        for m in 1..=3u32 {
            let mut next = vec![0u128; inst.n as usize];
            for (y, &c) in r.iter().enumerate() {
                for &x in &inst.codes {
                    next[(y + x as usize) % inst.n as usize] += c;
                }
            }
            r = next;
            let counts = convolution_counts(&a, m).unwrap();
            let b = BigUint::from(inst.codes.len());
            if counts.counts != r || counts.total() != b.pow(m + 1) {
                out.push(format!("counts differ at m = {m} for {:?} mod {}", inst.codes, inst.n));
            }
            let rep = moment_lower_bound_check::<f64>(&a, m).unwrap();
            let support = r.iter().filter(|&&c| c > 0).count() as u64;
            let squares: BigUint = r.iter().map(|&c| BigUint::from(c) * c).sum();
            let margin = BigInt::from(squares * support) - BigInt::from(b.pow(2 * m + 2));
            if !rep.holds() || rep.cauchy_schwarz_margin != margin || rep.parseval_residual > 1e-9 {
                out.push(format!("moment chain fails at m = {m} for {:?} mod {}", inst.codes, inst.n));
            }
        }
        out
    });
    v.merge(failures);

    let mut kernel_err = 0f64;
    for _ in 0..50 {
        let n = rng.gen_range(5..=4096u64);
        let l = rng.gen_range(1..n);
        let b: Vec<i64> = (0..l as i64).collect();
        let s = spectrum::<f64>(&GSet::cyclic(n, &b).unwrap()).unwrap();
        for r in 1..n {
            let t = std::f64::consts::PI * r as f64 / n as f64;
            let closed = ((l as f64 * t).sin() / t.sin()).abs();
            kernel_err = kernel_err.max((closed - s.magnitudes[r as usize]).abs() / l as f64);
        }
    }
    v.check(kernel_err <= 1e-9, || format!("Dirichlet kernel error {kernel_err:.3e}|B|"));
    v.detail = format!(
        "Parseval {:.1e}, paths {:.1e}, kernel {:.1e} (relative to |B|); 200 moment instances m <= 3",
        worst.0, worst.1, kernel_err
    );
    v
}

/// `|sin(π L x / N) / sin(π x / N)|` with `x` reduced mod `N`.
fn dirichlet(n: u64, len: u64, x: u64) -> f64 {
    let x = x % n;
    if x == 0 {
        return len as f64;
    }
    let num = (std::f64::consts::PI * ((len as u128 * x as u128) % n as u128) as f64 / n as f64).sin();
    (num / (std::f64::consts::PI * x as f64 / n as f64).sin()).abs()
}

/// `{start + j step : j < len}`, together with its translate by `shift`.
struct Block {
    n: u64,
    start: i64,
    len: u64,
    step: u64,
    shift: Option<u64>,
}

impl Block {
    fn codes(&self) -> Vec<i64> {
        let n = self.n as i128;
        let base = (0..self.len as i128).map(|j| (self.start as i128 + j * self.step as i128).rem_euclid(n) as i64);
        let mut out: Vec<i64> = base.clone().collect();
        if let Some(s) = self.shift {
            out.extend(base.map(|x| ((x as i128 + s as i128) % n) as i64));
        }
        out
    }

    fn magnitude(&self, r: u64) -> f64 {
        let d = dirichlet(self.n, self.len, (r as u128 * self.step as u128 % self.n as u128) as u64);
        match self.shift {
            None => d,
            Some(s) => {
                let phase = (r as u128 * s as u128 % self.n as u128) as f64 / self.n as f64;
                d * (2.0 * (std::f64::consts::PI * phase).cos()).abs()
            }
        }
    }
}

fn criterion_6() -> Verdict {
    let mut v = Verdict::new();
    let p6 = smallest_prime_in(1_000_000, 1_100_000).unwrap();
    let p5 = smallest_prime_in(100_000, 110_000).unwrap();
    let p4 = smallest_prime_in(30_000, 31_000).unwrap();
    let block = |n, start, len, step, shift| Block { n, start, len, step, shift };
    let mut cases: Vec<Block> = Vec::new();
    for len in [2, 3, 10, 50, 100, 200, 300, 364] {
        cases.push(block(p6, 0, len, 1, None));
    }
    for len in [2, 5, 20, 36] {
        cases.push(block(p5, 0, len, 1, None));
    }
    for len in [2, 5, 10] {
        cases.push(block(p4, 0, len, 1, None));
    }
    for h in [10, 100, 181] {
        cases.push(block(p6, -h, 2 * h as u64 + 1, 1, None));
    }
    for (len, step) in [(10, 7919), (100, 123_457), (250, 3), (30, 999_983)] {
        cases.push(block(p6, 0, len, step, None));
    }
    for (len, gap) in [(5, 1000), (10, 50_000), (12, 1), (6, 333_333), (13, 7)] {
        cases.push(block(p6, 0, len, 1, Some(len + gap)));
    }
    let results: Vec<_> = cases
        .par_iter()
        .map(|c| {
            let codes = c.codes();
            let b = GSet::cyclic(c.n, &codes).unwrap();
            let t = covering_translates(&b).unwrap();
            assert!(is_k_covering(&b, &t).unwrap());
            match certified_large_coefficient::<f64>(&b, &t) {
                Ok(rep) => {
                    let k = rep.k as f64;
                    let size = codes.len() as f64;
                    let beta = size / c.n as f64;
                    let eta = 18.0 * beta.powf(1.0 / k) * (1.0 / beta).ln() / k;
                    let best = (1..c.n).map(|r| c.magnitude(r)).fold(0.0, f64::max);
                    let ok = rep.holds
                        && (rep.eta.eta - eta).abs() <= 1e-12 * eta
                        && best + SLACK * size >= (1.0 - eta) * size
                        && (best - rep.magnitude).abs() <= SLACK * size;
                    Some((rep.k, ok))
                }
                Err(Error::Hypothesis(_)) => None,
                Err(e) => panic!("{e}"),
            }
        })
        .collect();
    let eligible = results.iter().flatten().count();
    let failed = results.iter().flatten().filter(|(_, ok)| !ok).count();
    let k3 = results.iter().flatten().filter(|(k, _)| *k > 2).count();
    v.check(eligible >= 20, || format!("only {eligible} instances meet the density gate"));
    v.check(failed == 0, || format!("{failed} instances below (1 - eta)|B|"));
    v.detail = format!(
        "{eligible} of {} instances meet the gate ({k3} with |T| > 2), N up to {p6}, {failed} failures",
        cases.len()
    );
    v
}

#[derive(Default)]
struct Sweep {
    sets: u64,
    cover_hyp: u64,
    lev_hyp: u64,
    diam_hyp: u64,
    failures: Vec<String>,
    rectified: u64,
    rect_failures: Vec<String>,
}

impl Sweep {
    fn merge(mut self, o: Sweep) -> Sweep {
        self.sets += o.sets;
        self.cover_hyp += o.cover_hyp;
        self.lev_hyp += o.lev_hyp;
        self.diam_hyp += o.diam_hyp;
        self.rectified += o.rectified;
        self.failures.extend(o.failures.into_iter().take(20));
        self.rect_failures.extend(o.rect_failures.into_iter().take(20));
        self
    }
}

const EPS: [(i64, i64); 3] = [(1, 10), (1, 4), (2, 5)];
const DELTA: [(i64, i64); 3] = [(1, 10), (1, 5), (3, 10)];

/// Circular count of `set` inside `[b, b + l]` for every `b`, via prefix sums.
fn window_counts(n: usize, set: &[i64], l: usize) -> Vec<u64> {
    let mut ind = vec![0u64; 2 * n + 1];
    for &x in set {
        ind[x as usize + 1] += 1;
        ind[x as usize + n + 1] += 1;
    }
    for i in 1..ind.len() {
        ind[i] += ind[i - 1];
    }
    (0..n).map(|b| ind[(b + l + 1).min(2 * n)] - ind[b]).collect()
}

fn min_span(n: u64, a: &[i64]) -> u64 {
    a.iter().map(|&c| a.iter().map(|&x| (x - c).rem_euclid(n as i64) as u64).max().unwrap()).min().unwrap()
}

/// `e(k/N)` for `k < N`.
fn roots(n: u64) -> Vec<(f64, f64)> {
    (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).map(|t| (t.cos(), t.sin())).collect()
}

fn table_coefficient(roots: &[(f64, f64)], b: &[i64], r: u64) -> f64 {
    let n = roots.len() as u64;
    let (re, im) = b.iter().fold((0.0, 0.0), |(re, im), &x| {
        let (c, s) = roots[((r * x as u64) % n) as usize];
        (re + c, im + s)
    });
    f64::hypot(re, im)
}

fn sweep_one(n: u64, codes: &[i64], roots: &[(f64, f64)]) -> Sweep {
    let mut s = Sweep { sets: 1, ..Default::default() };
    let size = codes.len() as u64;
    let a = GSet::cyclic(n, codes).unwrap();
    let nu = n as usize;

    // interval concentration, |B| <= 6
    let probe = LevProbe::new(&a).unwrap();
    let mag = table_coefficient(roots, codes, 1);
    for (ep, eq) in EPS {
        for (dp, dq) in DELTA {
            let out = probe.query(Ratio::new(ep, eq), Ratio::new(dp, dq)).unwrap();
            let held = mag
                >= (1.0 - 8.0 * (ep as f64 / eq as f64) * (dp as f64 / dq as f64).powi(2)) * size as f64
                    + SLACK * size as f64;
            if held {
                s.lev_hyp += 1;
                // l = ceil(δN) - 1
                let l = ((dp as u64 * n).div_ceil(dq as u64) - 1) as usize;
                let inside = window_counts(nu, codes, l).into_iter().max().unwrap();
                let exceptions = size - inside;
                if (exceptions as i64) * eq >= ep * size as i64 {
                    s.failures.push(format!("lev: {codes:?} mod {n}, eps {ep}/{eq}, delta {dp}/{dq}"));
                }
            }
            if out.falsified() || (held && !matches!(out, LevOutcome::Interval { .. })) {
                s.failures.push(format!("lev library: {codes:?} mod {n}: {out:?}"));
            }
        }
    }
    if size > 5 {
        return s;
    }

    // gap cover
    let d = diff_mod(n, codes, codes);
    let gp = GapCoverProbe::new(&a).unwrap();
    let span = min_span(n, codes);
    let mut l = 0;
    while 3 * l < n {
        let counts = window_counts(nu, &d, l as usize);
        for b in 0..nu {
            let exceptions = d.len() as u64 - counts[b];
            let held = 2 * exceptions < size;
            let out = gp.check(b as i64, l).unwrap();
            if held {
                s.cover_hyp += 1;
                if span > l {
                    s.failures.push(format!("cover: {codes:?} mod {n}, b = {b}, l = {l}"));
                }
            }
            let agrees = match out {
                GapCoverOutcome::HypothesisFails { .. } => !held,
                GapCoverOutcome::Covered { .. } => held,
                GapCoverOutcome::Violated { .. } => false,
            };
            if !agrees {
                s.failures.push(format!("cover library: {codes:?} mod {n}: {out:?}"));
            }
        }
        l += 1;
    }

    // spectral diameter test
    let dp_probe = DiamProbe::new(&a).unwrap();
    let best = (1..n).map(|r| table_coefficient(roots, &d, r)).fold(0.0, f64::max);
    let mut diam = None;
    for (dp, dq) in DELTA {
        let rep = dp_probe.query(Ratio::new(dp, dq)).unwrap();
        let m = d.len() as f64;
        let delta = dp as f64 / dq as f64;
        if best >= m - 4.0 * delta * delta * size as f64 + SLACK * m {
            s.diam_hyp += 1;
            let l = *diam.get_or_insert_with(|| brute_diameter(n, codes));
            if l as i64 * dq >= dp * n as i64 {
                s.failures.push(format!("diam: {codes:?} mod {n}, delta {dp}/{dq}"));
            }
        }
        if rep.falsified() || !rep.chain_consistent() || rep.hypothesis == DiamHypothesis::NonUnitOnly {
            s.failures.push(format!("diam library: {codes:?} mod {n}: {rep:?}"));
        }
    }
    s
}

fn rectify_one(n: u64, codes: &[i64], s: &mut Sweep) {
    let a = GSet::cyclic(n, codes).unwrap();
    for k in 2..=3u32 {
        match rectify(&a, k).unwrap() {
            RectifyOutcome::Rectified(w) => {
                s.rectified += 1;
                let ok = freiman_iso_check(&w.map, k).unwrap().is_iso()
                    && brute_freiman(n, codes, &w.map.images, k)
                    && w.map.images.iter().all(|&x| 0 <= x && x as u64 <= w.diameter);
                if !ok {
                    s.rect_failures.push(format!("rectify: {codes:?} mod {n}, k = {k}"));
                }
            }
            RectifyOutcome::TooWide { diameter } => {
                if (k as u64) * diameter.l < n {
                    s.rect_failures.push(format!("rejected: {codes:?} mod {n}, k = {k}"));
                }
            }
        }
    }
}

fn implication_sweep() -> Sweep {
    let mut total = Sweep::default();
    for n in (11u64..=31).filter(|&n| is_prime(n)) {
        let roots = roots(n);
        for size in 1..=8usize {
            if size > 6 && n > 19 {
                continue;
            }
            let sets = subsets(n as usize, size);
            let part = sets
                .par_iter()
                .map(|codes| {
                    let mut s = if size <= 6 { sweep_one(n, codes, &roots) } else { Sweep::default() };
                    if size <= 5 || n <= 19 {
                        rectify_one(n, codes, &mut s);
                    }
                    s
                })
                .reduce(Sweep::default, Sweep::merge);
            total = total.merge(part);
        }
    }
    total
}

fn criterion_7(sweep: &Sweep) -> Verdict {
    let mut v = Verdict::new();
    v.merge(sweep.failures.clone());
    v.detail = format!(
        "{} sets; hypothesis held {} times (cover), {} (lev), {} (diam)",
        sweep.sets, sweep.cover_hyp, sweep.lev_hyp, sweep.diam_hyp
    );
    v
}

fn criterion_8(sweep: &Sweep) -> Verdict {
    let mut v = Verdict::new();
    v.merge(sweep.rect_failures.clone());

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tested: Vec<Inst> = Vec::new();
    for n in 2..=101u64 {
        for _ in 0..10 {
            let size = rng.gen_range(1..=(n as usize).min(10));
            tested.push(Inst { n, codes: random_codes(&mut rng, n, size) });
        }
    }
    let failures = collect_failures(&tested, |inst| {
        let w = diameter(&inst.set()).unwrap();
        let brute = brute_diameter(inst.n, &inst.codes);
        if w.l != brute || !w.verify(&inst.set()) {
            vec![format!("diameter {} vs brute {brute} for {:?} mod {}", w.l, inst.codes, inst.n)]
        } else {
            Vec::new()
        }
    });
    v.merge(failures);

    // every affine image of a small set is itself one of the small sets
    let base: Vec<Vec<i64>> = (1..=4).flat_map(|k| subsets(23, k)).collect();
    let diam: HashMap<Vec<i64>, u64> =
        base.par_iter().map(|codes| (codes.clone(), diameter(&GSet::cyclic(23, codes).unwrap()).unwrap().l)).collect();
    let failures = collect_failures(&base, |codes| {
        let l = diam[codes];
        let mut out = Vec::new();
        for lambda in 1..23 {
            for c in 0..23 {
                let mut image: Vec<i64> = codes.iter().map(|&x| (lambda * x + c) % 23).collect();
                image.sort_unstable();
                if diam[&image] != l {
                    out.push(format!("diam changes under x -> {lambda}x + {c} for {codes:?}"));
                }
            }
        }
        out
    });
    v.merge(failures);
    let a = GSet::cyclic(23, &[0, 1, 5, 9]).unwrap();
    let image = translate(&dilate(&a, 7).unwrap(), 11).unwrap();
    v.check(diameter(&image).unwrap().l == diam[&vec![0, 1, 5, 9]], || "library dilation changes diam".into());
    v.detail = format!(
        "{} rectifications certified, {} diameters against brute force, {} sets x 506 affine maps mod 23",
        sweep.rectified,
        tested.len(),
        base.len()
    );
    v
}

fn torsion_check(rank: u32, codes: &[i64]) -> Vec<String> {
    let a = GSet::from_codes(GroupSpec::torsion(2, rank).unwrap(), codes.iter().copied()).unwrap();
    let c = torsion_cover(&a).unwrap();
    let d = xor_diff(codes, codes);
    let span = xor_span(&d);
    let t = c.translates.codes();
    let tspan = xor_span(&xor_diff(t, t));
    let rep = GroupSpec::torsion(2, rank).unwrap().encode(&c.coset_rep).unwrap();
    let reach: Vec<i64> = {
        let s: std::collections::BTreeSet<i64> = d.iter().flat_map(|&x| tspan.iter().map(move |&y| x ^ y)).collect();
        s.into_iter().collect()
    };
    let n = codes.len() as u64;
    let e_of = |num: u64| -> u64 {
        // floor(2 (num/n)^2 - 2)
        (2 * num * num / (n * n)).saturating_sub(2)
    };
    let pow2 = |e: u64| -> BigUint { BigUint::from(1u8) << e.min(4096) };
    let h = span.len() as u64;
    let bound_b = pow2(e_of(d.len() as u64)) * d.len();
    let s2 = d.len() as u64; // A + A = A - A in characteristic 2
    let bound_a_times_n = pow2(e_of(s2)) * (s2 * s2);
    let ok = c.subgroup.codes() == span.as_slice()
        && codes.iter().all(|&x| span.contains(&(x ^ rep)))
        && subset_of(&span, &reach)
        && tspan.len() as u64 <= 1 << (t.len() - 1)
        && (h as u128) <= d.len() as u128 * (1u128 << (t.len() - 1))
        && BigUint::from(h) <= bound_b
        && BigUint::from(h * n) <= bound_a_times_n
        && c.holds();
    if ok {
        Vec::new()
    } else {
        vec![format!("torsion certificate fails for {codes:?} in rank {rank}")]
    }
}

fn criterion_9() -> Verdict {
    let mut v = Verdict::new();
    let mut cases: Vec<(u32, Vec<i64>)> = (1..=8).flat_map(|k| subsets(8, k)).map(|s| (3, s)).collect();
    assert_eq!(cases.len(), 255);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let rank = rng.gen_range(1..=10u32);
        let order = 1u64 << rank;
        let size = rng.gen_range(1..=(order as usize).min(16));
        cases.push((rank, random_codes(&mut rng, order, size)));
    }
    let failures = collect_failures(&cases, |(rank, codes)| torsion_check(*rank, codes));
    v.merge(failures);
    v.detail = format!("{} sets ({} exhaustive in rank 3)", cases.len(), 255);
    v
}

fn criterion_10() -> Verdict {
    let mut v = Verdict::new();
    let mut worst = 0f64;
    let mut parts = Vec::new();
    for big_k in [1.0f64, 1.5, 2.0, 3.0] {
        let ln_alpha = -12.0 * big_k * big_k * (16.0 * big_k).ln();
        let rep = bound_calculator_ln(ln_threshold_thm1(big_k), big_k, 2).unwrap();
        let chain = rep.replay.clone().expect("alpha on the threshold passes the gate");
        let ln_tau = (big_k * big_k).ln() + ln_alpha;
        let eta = 9.0 / (big_k * big_k) * (ln_tau / (2.0 * big_k * big_k)).exp() * -ln_tau;
        let delta = 2.0 * big_k * eta.sqrt();
        worst = worst.max((delta - chain.delta).abs() / delta);
        v.check(delta < 1.0 / 3.0 && chain.delta_below_third && chain.holds(), || {
            format!("K = {big_k}: delta = {delta:.12e}")
        });
        v.check(ln_tau <= -2.0 * big_k * big_k * 14f64.ln(), || format!("K = {big_k}: density gate fails"));
        parts.push(format!("K={big_k}: {delta:.3e}"));
        for k in [2u32, 3, 5] {
            let ln_alpha = -12.0 * big_k * big_k * (16.0 * k as f64 * big_k).ln();
            let rep = bound_calculator_ln(ln_threshold_thm2(big_k, k), big_k, k).unwrap();
            let chain = rep.replay.clone().expect("the second threshold is below the first");
            let ln_tau = (big_k * big_k).ln() + ln_alpha;
            let eta = 9.0 / (big_k * big_k) * (ln_tau / (2.0 * big_k * big_k)).exp() * -ln_tau;
            let delta = 2.0 * big_k * eta.sqrt();
            worst = worst.max((delta - chain.delta).abs() / delta);
            v.check(delta < 1.0 / k as f64 && chain.delta_below_inv_k == Some(true), || {
                format!("K = {big_k}, k = {k}: delta = {delta:.12e}")
            });
        }
    }
    v.check(worst < 1e-11, || format!("library and reference delta differ by {worst:.1e}"));
    v.detail = format!("delta at threshold: {}; agreement {worst:.1e}", parts.join(", "));
    v
}

fn main() {
    let total = Instant::now();
    let insts = covering_instances();
    let t = Instant::now();
    let certs = certificates(&insts);
    let cert_time = t.elapsed();
    let timed = |f: &dyn Fn() -> Verdict| {
        let t = Instant::now();
        let v = f();
        (v, t.elapsed())
    };
    let mut results = vec![
        (1, timed(&|| criterion_1(&insts, &certs))),
        (2, timed(&|| criterion_2(&insts, &certs))),
        (3, timed(&criterion_3)),
        (4, timed(&|| criterion_4(&insts, &certs))),
        (5, timed(&criterion_5)),
        (6, timed(&criterion_6)),
    ];
    let t = Instant::now();
    let sweep = implication_sweep();
    let sweep_time = t.elapsed();
    results.push((7, (criterion_7(&sweep), sweep_time)));
    results.push((8, timed(&|| criterion_8(&sweep))));
    results.push((9, timed(&criterion_9)));
    results.push((10, timed(&criterion_10)));

    results[0].1 .1 += cert_time;
    let mut all = true;
    for (id, (v, elapsed)) in &results {
        let pass = v.failures.is_empty();
        all &= pass;
        println!(
            "criterion {id:>2}: {}  {} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64()
        );
        for f in v.failures.iter().filter(|f| !f.is_empty()).take(5) {
            println!("    {f}");
        }
    }
    println!(
        "acceptance: {} in {:.1}s",
        if all { "all criteria pass" } else { "FAILED" },
        total.elapsed().as_secs_f64()
    );
    if !all {
        std::process::exit(1);
    }
}
