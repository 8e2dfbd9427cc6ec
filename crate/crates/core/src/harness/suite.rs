//! Runs lemma checks over generated instances and aggregates the results.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{
    covering_certificate, growth_bound_profile, j_bound_report, j_count, verify_incm, WitnessMode,
    DEFAULT_WITNESS_BUDGET,
};
use crate::error::{Error, Result};
use crate::fourier::{moment_lower_bound_check, spectrum_with, TransformPath};
use crate::group::{difference_set, GSet, GroupSpec, Instance};
use crate::harness::instances::{enumerate_instances, Generator, DEFAULT_INSTANCE_BUDGET};
use crate::primes::is_prime;
use crate::rectify::{
    freiman_iso_check_with_budget, rectify_with_budget, DiamProbe, GapCoverProbe, LevProbe, RectifyOutcome,
    DEFAULT_ISO_BUDGET,
};
use crate::tolerance::{MAGNITUDE_SLACK, TRANSFORM_REL};
use crate::torsion::torsion_cover;

pub const LEV_EPSILONS: [(i64, i64); 3] = [(1, 10), (1, 4), (2, 5)];
pub const DELTAS: [(i64, i64); 3] = [(1, 10), (1, 5), (3, 10)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckName {
    Inc,
    Incm,
    Jbound,
    Estjcov,
    Estecov,
    Parseval,
    Moment,
    Cover,
    Lev,
    Diam,
    Iso,
    Torsion,
}

impl CheckName {
    pub const ALL: [CheckName; 12] = [
        CheckName::Inc,
        CheckName::Incm,
        CheckName::Jbound,
        CheckName::Estjcov,
        CheckName::Estecov,
        CheckName::Parseval,
        CheckName::Moment,
        CheckName::Cover,
        CheckName::Lev,
        CheckName::Diam,
        CheckName::Iso,
        CheckName::Torsion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Inc => "inc",
            CheckName::Incm => "incm",
            CheckName::Jbound => "jbound",
            CheckName::Estjcov => "estjcov",
            CheckName::Estecov => "estecov",
            CheckName::Parseval => "parseval",
            CheckName::Moment => "moment",
            CheckName::Cover => "cover",
            CheckName::Lev => "lev",
            CheckName::Diam => "diam",
            CheckName::Iso => "iso",
            CheckName::Torsion => "torsion",
        }
    }

    /// Parses a comma-separated list; `all` selects every check.
    pub fn parse_list(text: &str) -> Result<Vec<CheckName>> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(CheckName::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    /// Not applicable to this instance, or its hypothesis is not met.
    Skip,
    Fail(String),
}

/// A per-instance check. Implemented by the built-in lemma checks; tests
/// may inject others.
pub trait LemmaCheck: Send + Sync {
    fn name(&self) -> String;
    fn check(&self, a: &GSet) -> Result<CheckOutcome>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Largest `|A|` for the exhaustive witness search.
    pub witness: usize,
    /// Largest number of multisets per isomorphism check.
    pub iso: u64,
    /// Largest number of instances.
    pub instances: u64,
    /// `m` range for iterated covering.
    pub incm_m: u32,
    /// `m` range for the moment chain.
    pub moment_m: u32,
    /// Orders tried by the rectification check.
    pub iso_orders: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            witness: DEFAULT_WITNESS_BUDGET,
            iso: DEFAULT_ISO_BUDGET,
            instances: DEFAULT_INSTANCE_BUDGET,
            incm_m: 4,
            moment_m: 3,
            iso_orders: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: String,
    pub checks: Vec<CheckName>,
    pub generator: Generator,
    #[serde(default)]
    pub budgets: Budgets,
    /// `(k_max, m_max)` for the `jbound` table.
    #[serde(default = "default_jbound")]
    pub jbound: (u32, u32),
    #[serde(default)]
    pub timing: bool,
}

fn default_jbound() -> (u32, u32) {
    (4, 10)
}

impl SuiteConfig {
    pub fn new(suite: impl Into<String>, checks: Vec<CheckName>, generator: Generator) -> Self {
        SuiteConfig {
            suite: suite.into(),
            checks,
            generator,
            budgets: Budgets::default(),
            jbound: default_jbound(),
            timing: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: u64,
    pub fail: u64,
    pub skip: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: String,
    pub instance_id: usize,
    pub instance: Option<Instance>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub generator: Generator,
    pub seed: Option<u64>,
    pub instance_count: usize,
    pub checks: Vec<String>,
    pub tallies: BTreeMap<String, Tally>,
    pub counterexamples: Vec<Counterexample>,
    /// Budget or configuration errors met while running.
    pub errors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<u64>,
}

impl SuiteReport {
    /// 0 when every check passed, 1 on a counterexample, 2 on a budget or
    /// configuration error.
    pub fn exit_code(&self) -> i32 {
        if !self.counterexamples.is_empty() {
            1
        } else if !self.errors.is_empty() {
            2
        } else {
            0
        }
    }
}

fn fail_if(cond: bool, detail: impl FnOnce() -> String) -> CheckOutcome {
    if cond {
        CheckOutcome::Fail(detail())
    } else {
        CheckOutcome::Pass
    }
}

fn cyclic(a: &GSet) -> Option<u64> {
    match a.group() {
        GroupSpec::Cyclic { modulus } => Some(modulus),
        _ => None,
    }
}

struct Builtin {
    name: CheckName,
    budgets: Budgets,
}

impl Builtin {
    fn inc(&self, a: &GSet) -> Result<CheckOutcome> {
        let mode = WitnessMode::Prefer { budget: self.budgets.witness };
        covering_certificate(a, a, a, mode)?;
        Ok(CheckOutcome::Pass)
    }

    fn incm(&self, a: &GSet) -> Result<CheckOutcome> {
        let cert = covering_certificate(a, a, a, WitnessMode::Prefer { budget: self.budgets.witness })?;
        let m = self.budgets.incm_m;
        let reached = verify_incm(a, &cert.translates, m)?;
        Ok(fail_if(reached < m, || format!("iterated covering fails at m = {}", reached + 1)))
    }

    fn growth(&self, a: &GSet, exponential: bool) -> Result<CheckOutcome> {
        if cyclic(a).is_none() {
            return Ok(CheckOutcome::Skip);
        }
        // 2A - 2A ⊆ (A - A) + (T - T) makes A - A a |T|-covering set
        let cert = covering_certificate(a, a, a, WitnessMode::Prefer { budget: self.budgets.witness })?;
        let b = difference_set(a, a)?;
        let t = cert.translates;
        let m_max = (t.len() as u32).max(4);
        for r in growth_bound_profile(&b, &t, m_max)? {
            if exponential && r.m < t.len() as u32 {
                continue;
            }
            let ok = if exponential { r.estecov_holds.unwrap_or(true) } else { r.estjcov_holds };
            if !ok || !r.difference_multiple_holds {
                return Ok(CheckOutcome::Fail(format!("growth bound fails at m = {}: {r:?}", r.m)));
            }
        }
        Ok(CheckOutcome::Pass)
    }

    fn parseval(&self, a: &GSet) -> Result<CheckOutcome> {
        let order = match a.group().order() {
            Some(o) => o,
            None => return Ok(CheckOutcome::Skip),
        };
        let fast = spectrum_with::<f64>(a, TransformPath::Fast)?;
        if !fast.parseval_ok() {
            return Ok(CheckOutcome::Fail(format!("Parseval residual {}", fast.parseval_residual)));
        }
        let size = a.len() as f64;
        if fast.magnitudes.iter().any(|&m| m > size * (1.0 + MAGNITUDE_SLACK)) {
            return Ok(CheckOutcome::Fail("a coefficient exceeds |B|".into()));
        }
        if order <= 1 << 16 {
            let direct = spectrum_with::<f64>(a, TransformPath::Direct)?;
            let worst = direct.magnitudes.iter().zip(&fast.magnitudes).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            if worst > TRANSFORM_REL * size {
                return Ok(CheckOutcome::Fail(format!("direct and fast transforms differ by {worst}")));
            }
        }
        Ok(CheckOutcome::Pass)
    }

    fn moment(&self, a: &GSet) -> Result<CheckOutcome> {
        if a.group().order().is_none() {
            return Ok(CheckOutcome::Skip);
        }
        for m in 1..=self.budgets.moment_m {
            let r = moment_lower_bound_check::<f64>(a, m)?;
            if !r.holds() {
                return Ok(CheckOutcome::Fail(format!("moment chain fails at m = {m}: {r:?}")));
            }
        }
        Ok(CheckOutcome::Pass)
    }

    fn cover(&self, a: &GSet) -> Result<CheckOutcome> {
        let n = match cyclic(a) {
            Some(n) => n,
            None => return Ok(CheckOutcome::Skip),
        };
        let probe = GapCoverProbe::new(a)?;
        for l in 0..n.div_ceil(3) {
            for b in 0..n as i64 {
                let out = probe.check(b, l)?;
                if let crate::rectify::GapCoverOutcome::Violated { .. } = out {
                    return Ok(CheckOutcome::Fail(format!("b = {b}, l = {l}: {out:?}")));
                }
            }
        }
        Ok(CheckOutcome::Pass)
    }

    fn lev(&self, a: &GSet) -> Result<CheckOutcome> {
        if cyclic(a).is_none() {
            return Ok(CheckOutcome::Skip);
        }
        let probe = LevProbe::new(a)?;
        for &(ep, eq) in &LEV_EPSILONS {
            for &(dp, dq) in &DELTAS {
                let out = probe.query(Ratio::new(ep, eq), Ratio::new(dp, dq))?;
                if out.falsified() {
                    return Ok(CheckOutcome::Fail(format!("eps = {ep}/{eq}, delta = {dp}/{dq}: {out:?}")));
                }
            }
        }
        Ok(CheckOutcome::Pass)
    }

    fn diam(&self, a: &GSet) -> Result<CheckOutcome> {
        if cyclic(a).is_none() {
            return Ok(CheckOutcome::Skip);
        }
        let probe = DiamProbe::new(a)?;
        for &(dp, dq) in &DELTAS {
            let rep = probe.query(Ratio::new(dp, dq))?;
            if rep.falsified() || !rep.chain_consistent() {
                return Ok(CheckOutcome::Fail(format!("delta = {dp}/{dq}: {rep:?}")));
            }
        }
        Ok(CheckOutcome::Pass)
    }

    fn iso(&self, a: &GSet) -> Result<CheckOutcome> {
        let n = match cyclic(a) {
            Some(n) if is_prime(n) => n,
            _ => return Ok(CheckOutcome::Skip),
        };
        for k in 2..=self.budgets.iso_orders.max(2) {
            match rectify_with_budget(a, k, self.budgets.iso)? {
                RectifyOutcome::Rectified(w) => {
                    if w.verified && !freiman_iso_check_with_budget(&w.map, k, self.budgets.iso)?.is_iso() {
                        return Ok(CheckOutcome::Fail(format!("rectifying map of order {k} is not an isomorphism")));
                    }
                }
                RectifyOutcome::TooWide { diameter } => {
                    if (k as u128) * (diameter.l as u128) < n as u128 {
                        return Ok(CheckOutcome::Fail(format!("order {k} rejected with diameter {}", diameter.l)));
                    }
                }
            }
        }
        Ok(CheckOutcome::Pass)
    }

    fn torsion(&self, a: &GSet) -> Result<CheckOutcome> {
        if !matches!(a.group(), GroupSpec::Torsion { .. }) {
            return Ok(CheckOutcome::Skip);
        }
        let c = torsion_cover(a)?;
        Ok(fail_if(!c.holds(), || format!("{c:?}")))
    }
}

impl LemmaCheck for Builtin {
    fn name(&self) -> String {
        self.name.to_string()
    }

    fn check(&self, a: &GSet) -> Result<CheckOutcome> {
        match self.name {
            CheckName::Inc => self.inc(a),
            CheckName::Incm => self.incm(a),
            CheckName::Estjcov => self.growth(a, false),
            CheckName::Estecov => self.growth(a, true),
            CheckName::Parseval => self.parseval(a),
            CheckName::Moment => self.moment(a),
            CheckName::Cover => self.cover(a),
            CheckName::Lev => self.lev(a),
            CheckName::Diam => self.diam(a),
            CheckName::Iso => self.iso(a),
            CheckName::Torsion => self.torsion(a),
            CheckName::Jbound => Ok(CheckOutcome::Skip),
        }
    }
}

/// `J(k, m) < (14m/k)^k` for `k <= m`, and the trivial values `J(1, m)`
/// and `J(k, 0)`, over the configured range.
fn jbound_table(k_max: u32, m_max: u32) -> Result<(Tally, Vec<String>)> {
    let mut tally = Tally::default();
    let mut failures = Vec::new();
    for k in 1..=k_max {
        for m in 0..=m_max {
            let ok = if m >= k {
                let r = j_bound_report(k, m)?;
                r.holds
            } else if k == 1 || m == 0 {
                j_count(k, m)? == 1u32.into()
            } else {
                tally.skip += 1;
                continue;
            };
            if ok {
                tally.pass += 1;
            } else {
                tally.fail += 1;
                failures.push(format!("J({k}, {m})"));
            }
        }
    }
    Ok((tally, failures))
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    run_suite_with(config, Vec::new())
}

/// Runs the configured checks plus `extra`. Errors here are configuration
/// errors; errors inside a check are recorded in the report.
pub fn run_suite_with(config: &SuiteConfig, extra: Vec<Box<dyn LemmaCheck>>) -> Result<SuiteReport> {
    let start = config.timing.then(Instant::now);
    if config.checks.is_empty() && extra.is_empty() {
        return Err(Error::InvalidArgument("no checks selected".into()));
    }
    let mut checks: Vec<Box<dyn LemmaCheck>> = config
        .checks
        .iter()
        .filter(|&&c| c != CheckName::Jbound)
        .map(|&name| Box::new(Builtin { name, budgets: config.budgets }) as Box<dyn LemmaCheck>)
        .collect();
    checks.extend(extra);
    let instances =
        if checks.is_empty() { Vec::new() } else { enumerate_instances(&config.generator, config.budgets.instances)? };

    let results: Vec<Vec<Result<CheckOutcome>>> =
        instances.par_iter().map(|a| checks.iter().map(|c| c.check(a)).collect()).collect();

    let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
    let mut counterexamples = Vec::new();
    let mut errors = Vec::new();
    if config.checks.contains(&CheckName::Jbound) {
        let (k_max, m_max) = config.jbound;
        let (tally, failures) = jbound_table(k_max, m_max)?;
        tallies.insert(CheckName::Jbound.to_string(), tally);
        for detail in failures {
            counterexamples.push(Counterexample { check: "jbound".into(), instance_id: 0, instance: None, detail });
        }
    }
    for c in &checks {
        tallies.entry(c.name()).or_default();
    }
    for (id, row) in results.into_iter().enumerate() {
        for (c, res) in checks.iter().zip(row) {
            let tally = tallies.get_mut(&c.name()).unwrap();
            let fail = |detail: String| Counterexample {
                check: c.name(),
                instance_id: id,
                instance: Some(instances[id].to_instance()),
                detail,
            };
            match res {
                Ok(CheckOutcome::Pass) => tally.pass += 1,
                Ok(CheckOutcome::Skip) | Err(Error::Hypothesis(_)) | Err(Error::Unsupported { .. }) => tally.skip += 1,
                Ok(CheckOutcome::Fail(detail)) | Err(Error::Counterexample(detail)) => {
                    tally.fail += 1;
                    counterexamples.push(fail(detail));
                }
                Err(e) => {
                    tally.skip += 1;
                    errors.push(format!("{} on instance {id}: {e}", c.name()));
                }
            }
        }
    }
    let mut names: Vec<String> = config.checks.iter().map(|c| c.to_string()).collect();
    names.extend(checks.iter().map(|c| c.name()).filter(|n| n.parse::<CheckName>().is_err()));
    Ok(SuiteReport {
        suite: config.suite.clone(),
        generator: config.generator.clone(),
        seed: config.generator.seed(),
        instance_count: instances.len(),
        checks: names,
        tallies,
        counterexamples,
        errors,
        elapsed_ms: start.map(|s| s.elapsed().as_millis() as u64),
    })
}
