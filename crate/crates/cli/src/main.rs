use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;

use smallsum::covering::{covering_certificate, difference_covering, growth_table, verify_incm, WitnessMode};
use smallsum::fourier::{spectrum_with, TransformPath};
use smallsum::group::{difference_set, doubling_ratio, iterated_sum, sumset};
use smallsum::harness::instances::{enumerate_instances, DEFAULT_INSTANCE_BUDGET};
use smallsum::harness::report::to_json_pretty;
use smallsum::harness::{
    bound_calculator, bound_calculator_ln, run_suite, theorem1_pipeline, CheckName, Generator, SuiteConfig,
};
use smallsum::rectify::{
    diam_from_spectrum, diameter_with_budget, minimal_integer_model, rectify_with_budget, RectifyOutcome,
    DEFAULT_DIAMETER_BUDGET, DEFAULT_ISO_BUDGET,
};
use smallsum::torsion::torsion_cover;
use smallsum::{Element, Error, GSet, GroupSpec, Instance, Result};

#[derive(Parser)]
#[command(
    name = "smallsum",
    version,
    about = "Sumsets, covering certificates and rectification for small-doubling sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Human,
    Structured,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Group: cyclic:N, window:LO:HI, torsion:R:N, or a JSON group object.
    #[arg(long)]
    group: Option<String>,
    /// Elements: comma-separated integers or colon-separated tuples
    /// (0:1:1,1:0:0), or a JSON array.
    #[arg(long, allow_hyphen_values = true)]
    elements: Option<String>,
    /// Instance file: {"group": ..., "elements": [...]}.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// |A|, A+A, A-A and kA.
    Sumset {
        #[command(flatten)]
        common: Common,
        /// Also compute the k-fold sum.
        #[arg(short, long)]
        k: Option<u32>,
    },
    /// Diameter of A in Z/N, optionally with the spectral test or the
    /// diameter-theorem pipeline.
    Diam {
        #[command(flatten)]
        common: Common,
        /// Run the spectral diameter test at this delta (a fraction p/q).
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        theorem: bool,
    },
    /// Character sums of A.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        top: usize,
        #[arg(long, value_enum, default_value_t = PathArg::Auto)]
        path: PathArg,
    },
    /// Covering set T with B1-B1+B2-B2 ⊆ A-A+T-T.
    Cover {
        #[command(flatten)]
        common: Common,
        /// Try both A and -A and keep the smaller T.
        #[arg(long)]
        difference: bool,
        /// Skip the exhaustive witness search.
        #[arg(long)]
        no_witness: bool,
        /// Check iterated covering up to this m.
        #[arg(long)]
        incm: Option<u32>,
    },
    /// Map A ⊆ Z/p onto integers, or shorten an integer set.
    Rectify {
        #[command(flatten)]
        common: Common,
        #[arg(short, long, default_value_t = 2)]
        k: u32,
        /// For integer sets: number of shortening rounds.
        #[arg(long, default_value_t = 10)]
        rounds: u32,
    },
    /// Coset of a subgroup containing A in (Z/r)^n.
    TorsionCover {
        #[command(flatten)]
        common: Common,
    },
    /// Thresholds and the constant chain for given alpha, K, k.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        ln_alpha: Option<f64>,
        #[arg(long = "big-k", default_value_t = 1.0)]
        big_k: f64,
        #[arg(short, long, default_value_t = 2)]
        k: u32,
        /// Print J(k, m) for m up to this value against (14m/k)^k.
        #[arg(long)]
        growth: Option<u32>,
    },
    /// Run lemma checks over generated instances.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated check names, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        /// Generator: exhaustive:N:MAX, random:N:SIZE:COUNT,
        /// torsion:R:N:MAX, random-torsion:R:N:SIZE:COUNT,
        /// progression:N:START:STEP:LEN, or a JSON generator object.
        #[arg(long, default_value = "exhaustive:13:4")]
        generator: String,
        /// Suite configuration file (overrides --checks and --generator).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        suite: Option<String>,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Print the instances of a generator.
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        generator: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Auto,
    Direct,
    Fast,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| parse_err(format!("not a number: '{s}'")))
}

fn parse_group(text: &str) -> Result<GroupSpec> {
    let text = text.trim();
    if text.starts_with('{') {
        let g: GroupSpec = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        return g.validated();
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["cyclic", n] | ["z", n] => GroupSpec::cyclic(num(n)?),
        ["window", lo, hi] => GroupSpec::window(num(lo)?, num(hi)?),
        ["torsion", r, n] => GroupSpec::torsion(num(r)?, num(n)?),
        _ => Err(parse_err(format!("unrecognized group '{text}'"))),
    }
}

fn parse_elements(text: &str) -> Result<Vec<Element>> {
    let text = text.trim();
    if text.starts_with('[') {
        return serde_json::from_str(text).map_err(|e| parse_err(e.to_string()));
    }
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            if item.contains(':') {
                Ok(Element::Tuple(item.split(':').map(num).collect::<Result<_>>()?))
            } else {
                Ok(Element::Scalar(num(item)?))
            }
        })
        .collect()
}

fn load_set(common: &Common) -> Result<GSet> {
    if let Some(path) = &common.input {
        let text = fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
        return Instance::from_json(&text)?.to_gset();
    }
    let elements =
        parse_elements(common.elements.as_deref().ok_or_else(|| parse_err("--elements or --input required"))?)?;
    match &common.group {
        Some(g) => GSet::from_elements(parse_group(g)?, &elements),
        None => {
            let values: Vec<i64> = elements
                .iter()
                .map(|e| e.as_scalar().ok_or_else(|| parse_err("tuples need --group")))
                .collect::<Result<_>>()?;
            GSet::integers(&values)
        }
    }
}

fn parse_ratio(text: &str) -> Result<Ratio<i64>> {
    match text.split_once('/') {
        Some((p, q)) => {
            let q: i64 = num(q)?;
            if q == 0 {
                return Err(parse_err("zero denominator"));
            }
            Ok(Ratio::new(num(p)?, q))
        }
        None => {
            // decimal: scale by a power of ten
            let (int, frac) = text.split_once('.').unwrap_or((text, ""));
            let den = 10i64.pow(frac.len() as u32);
            Ok(Ratio::new(num::<i64>(&format!("{int}{frac}"))?, den))
        }
    }
}

fn parse_generator(text: &str, seed: Option<u64>) -> Result<Generator> {
    let text = text.trim();
    let mut g: Generator = if text.starts_with('{') {
        serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?
    } else {
        let p: Vec<&str> = text.split(':').collect();
        let s = seed.unwrap_or(0);
        match p.as_slice() {
            ["exhaustive", n, k] => Generator::Exhaustive { modulus: num(n)?, max_size: num(k)?, normalize: false },
            ["exhaustive-normalized", n, k] => {
                Generator::Exhaustive { modulus: num(n)?, max_size: num(k)?, normalize: true }
            }
            ["random", n, size, count] => {
                Generator::Random { modulus: num(n)?, size: num(size)?, count: num(count)?, seed: s }
            }
            ["torsion", r, n, k] => {
                Generator::TorsionExhaustive { exponent: num(r)?, rank: num(n)?, max_size: num(k)? }
            }
            ["random-torsion", r, n, size, count] => Generator::RandomTorsion {
                exponent: num(r)?,
                rank: num(n)?,
                size: num(size)?,
                count: num(count)?,
                seed: s,
            },
            ["progression", n, a, d, l] => {
                Generator::Progression { modulus: num(n)?, start: num(a)?, step: num(d)?, length: num(l)? }
            }
            _ => return Err(parse_err(format!("unrecognized generator '{text}'"))),
        }
    };
    if let Some(s) = seed {
        match &mut g {
            Generator::Random { seed, .. }
            | Generator::RandomTorsion { seed, .. }
            | Generator::ProgressionUnion { seed, .. }
            | Generator::SubspaceCoset { seed, .. } => *seed = s,
            _ => {}
        }
    }
    Ok(g)
}

fn fmt_set(a: &GSet) -> String {
    let items: Vec<String> = a.elements().iter().map(|e| e.to_string()).collect();
    if items.len() > 40 {
        format!("{{{}, ... ({} elements)}}", items[..40].join(", "), items.len())
    } else {
        format!("{{{}}}", items.join(", "))
    }
}

fn emit<T: Serialize>(common: &Common, value: &T, human: impl FnOnce() -> String) -> Result<()> {
    let text = match common.format {
        Format::Structured => to_json_pretty(value)?,
        Format::Human => human(),
    };
    match &common.out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| parse_err(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SumsetOutput {
    set: Instance,
    size: usize,
    sumset: Instance,
    difference_set: Instance,
    doubling: Ratio<u64>,
    difference_ratio: Ratio<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterated: Option<(u32, Instance)>,
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sumset { common, k } => {
            let a = load_set(&common)?;
            let s = sumset(&a, &a)?;
            let d = difference_set(&a, &a)?;
            let stats = doubling_ratio(&a)?;
            let iterated = match k {
                Some(k) => Some((k, iterated_sum(&a, k)?)),
                None => None,
            };
            let out = SumsetOutput {
                set: a.to_instance(),
                size: a.len(),
                sumset: s.to_instance(),
                difference_set: d.to_instance(),
                doubling: stats.doubling(),
                difference_ratio: stats.difference_ratio(),
                iterated: iterated.as_ref().map(|(k, s)| (*k, s.to_instance())),
            };
            emit(&common, &out, || {
                let mut t = String::new();
                let _ = writeln!(t, "group      {}", a.group());
                let _ = writeln!(t, "A          {} (|A| = {})", fmt_set(&a), a.len());
                let _ = writeln!(t, "A+A        {} (|A+A| = {}, K = {})", fmt_set(&s), s.len(), stats.doubling());
                let _ = write!(t, "A-A        {} (|A-A| = {})", fmt_set(&d), d.len());
                if let Some((k, s)) = &iterated {
                    let _ = write!(t, "\n{k}A         {} (|{k}A| = {})", fmt_set(s), s.len());
                }
                t
            })?;
        }
        Command::Diam { common, delta, theorem } => {
            let a = load_set(&common)?;
            if theorem {
                let r = theorem1_pipeline(&a)?;
                emit(&common, &r, || {
                    format!(
                        "N = {}, |A| = {}, K = {}, alpha = {}, tau = {}\nalpha gate {}, tau gate {}\ndiameter {:?}, bound {:.6}",
                        r.modulus,
                        r.size,
                        r.k_const,
                        r.alpha,
                        r.tau,
                        r.alpha_gate,
                        r.tau_gate,
                        r.diameter,
                        r.diameter_bound
                    )
                })?;
                return Ok(if r.falsified() { 1 } else { 0 });
            }
            if let Some(delta) = delta {
                let r = diam_from_spectrum(&a, parse_ratio(&delta)?)?;
                emit(&common, &r, || {
                    format!(
                        "delta = {}: hypothesis {:?} (threshold {:.6}, best character {:?} with {:?})\ndiameter {}, conclusion {:?}",
                        r.delta, r.hypothesis, r.threshold, r.character, r.magnitude, r.diameter, r.conclusion_holds
                    )
                })?;
                return Ok(if r.falsified() { 1 } else { 0 });
            }
            let w = diameter_with_budget(&a, common.budget.unwrap_or(DEFAULT_DIAMETER_BUDGET))?;
            emit(&common, &w, || {
                format!("diam = {} with d = {}, a = {}\nnormalized {}", w.l, w.d, w.a, fmt_set(&w.normalized))
            })?;
        }
        Command::Spectrum { common, top, path } => {
            let a = load_set(&common)?;
            let path = match path {
                PathArg::Auto => TransformPath::Auto,
                PathArg::Direct => TransformPath::Direct,
                PathArg::Fast => TransformPath::Fast,
            };
            let s = spectrum_with::<f64>(&a, path)?;
            let summary = s.summary(top);
            emit(&common, &summary, || {
                let mut t = format!(
                    "|B| = {}, |G| = {}, density {}\nParseval residual {:.3e}\n",
                    s.size, s.order, s.density, s.parseval_residual
                );
                if let Some(eta) = s.eta_achieved {
                    let _ = writeln!(t, "eta achieved {eta:.9}");
                }
                for (c, m) in &summary.top {
                    let _ = writeln!(t, "  {c:>12}  {m:.9}", c = c.0.to_string());
                }
                t.trim_end().to_string()
            })?;
        }
        Command::Cover { common, difference, no_witness, incm } => {
            let a = load_set(&common)?;
            let mode = if no_witness {
                WitnessMode::Skip
            } else {
                WitnessMode::Prefer {
                    budget: common.budget.map_or(smallsum::covering::DEFAULT_WITNESS_BUDGET, |b| b as usize),
                }
            };
            let cert =
                if difference { difference_covering(&a, mode)? } else { covering_certificate(&a, &a, &a, mode)? };
            let reached = match incm {
                Some(m) => Some(verify_incm(&a, &cert.translates, m)?),
                None => None,
            };
            #[derive(Serialize)]
            struct Out<'a> {
                certificate: &'a smallsum::covering::CoveringCertificate,
                #[serde(skip_serializing_if = "Option::is_none")]
                incm_reached: Option<u32>,
            }
            emit(&common, &Out { certificate: &cert, incm_reached: reached }, || {
                let mut t = format!(
                    "T = {} (|T| = {}, bound {} via {:?})\nK1 = {}, K2 = {}\ninclusion verified: {}",
                    fmt_set(&cert.translates),
                    cert.size(),
                    cert.size_bound,
                    cert.bound_kind,
                    cert.k1,
                    cert.k2,
                    cert.inclusion_verified
                );
                if let Some(m) = reached {
                    let _ = write!(t, "\niterated covering holds up to m = {m}");
                }
                t
            })?;
            if let (Some(m), Some(r)) = (incm, reached) {
                return Ok(if r < m { 1 } else { 0 });
            }
        }
        Command::Rectify { common, k, rounds } => {
            let a = load_set(&common)?;
            let budget = common.budget.unwrap_or(DEFAULT_ISO_BUDGET);
            if matches!(a.group(), GroupSpec::Window { .. }) {
                let m = minimal_integer_model(&a, k, rounds, budget)?;
                emit(&common, &m, || {
                    format!(
                        "model {} (length at most {}, {} rounds)",
                        fmt_set(&m.set),
                        m.length_upper_bound,
                        m.rounds.len()
                    )
                })?;
                return Ok(0);
            }
            let out = rectify_with_budget(&a, k, budget)?;
            emit(&common, &out, || match &out {
                RectifyOutcome::Rectified(w) => format!(
                    "rectified of order {k}: x -> {}(x - {}) mod {}\nimage {}\nverified: {}",
                    w.dilation,
                    w.shift,
                    w.modulus,
                    fmt_set(&w.image),
                    w.verified
                ),
                RectifyOutcome::TooWide { diameter } => {
                    format!("not rectified: {k} * diam = {} >= {}", k as u64 * diameter.l, diameter.modulus)
                }
            })?;
        }
        Command::TorsionCover { common } => {
            let a = load_set(&common)?;
            let c = torsion_cover(&a)?;
            emit(&common, &c, || {
                format!(
                    "A ⊆ {} + H with |H| = {}\nK = {}, |A-A| = {}, |T| = {}\nbound (a) {} (capped {}), bound (b) {} (capped {})\nall checks: {}",
                    c.coset_rep,
                    c.subgroup_size,
                    c.doubling,
                    c.difference_size,
                    c.translates.len(),
                    c.bound_a.uncapped,
                    c.bound_a.capped,
                    c.bound_b.uncapped,
                    c.bound_b.capped,
                    c.holds()
                )
            })?;
            return Ok(if c.holds() { 0 } else { 1 });
        }
        Command::Bounds { common, alpha, ln_alpha, big_k, k, growth } => {
            if let Some(m) = growth {
                let t = growth_table(k, m)?;
                emit(&common, &t, || {
                    let mut s = String::new();
                    for row in &t.rows {
                        let _ = writeln!(s, "J({k}, {:>3}) = {:>20}   (14m/k)^k = {:.6e}", row.m, row.count, row.bound);
                    }
                    let _ = write!(s, "empirical constant {:.6}", t.empirical_constant);
                    s
                })?;
                return Ok(0);
            }
            let r = match (alpha, ln_alpha) {
                (Some(a), None) => bound_calculator(a, big_k, k)?,
                (None, Some(l)) => bound_calculator_ln(l, big_k, k)?,
                (None, None) => bound_calculator_ln(smallsum::harness::bounds::ln_threshold_thm1(big_k), big_k, k)?,
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidArgument("give --alpha or --ln-alpha, not both".into()))
                }
            };
            emit(&common, &r, || {
                let mut t = format!(
                    "alpha = {:.6e} (ln {:.6}), K = {}, k = {}\nthreshold (16K)^(-12K^2) = {:.6e}, within: {}\nthreshold (16kK)^(-12K^2) = {:.6e}, within: {}\ndelta bound {:.6e}",
                    r.alpha, r.ln_alpha, r.k_const, r.k, r.threshold_thm1, r.alpha_within_thm1, r.threshold_thm2, r.alpha_within_thm2, r.delta_bound
                );
                if let Some(c) = &r.replay {
                    let _ = write!(
                        t,
                        "\nreplay: eta = {:.6e}, delta = {:.6e}, delta < 1/3: {}, delta < 1/k: {:?}",
                        c.eta, c.delta, c.delta_below_third, c.delta_below_inv_k
                    );
                }
                t
            })?;
            if r.replay.as_ref().is_some_and(|c| !c.holds()) {
                return Ok(1);
            }
        }
        Command::Verify { common, checks, generator, config, suite, timing } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<SuiteConfig>(&text).map_err(|e| parse_err(e.to_string()))?
                }
                None => SuiteConfig::new(
                    suite.clone().unwrap_or_else(|| checks.clone()),
                    CheckName::parse_list(&checks)?,
                    parse_generator(&generator, common.seed)?,
                ),
            };
            if let Some(s) = suite {
                cfg.suite = s;
            }
            if let Some(b) = common.budget {
                cfg.budgets.instances = b;
            }
            cfg.timing |= timing;
            let report = run_suite(&cfg)?;
            emit(&common, &report, || {
                let mut t = format!("suite {}: {} instances\n", report.suite, report.instance_count);
                for (name, tally) in &report.tallies {
                    let _ = writeln!(
                        t,
                        "  {name:<10} pass {:>8}  fail {:>4}  skip {:>8}",
                        tally.pass, tally.fail, tally.skip
                    );
                }
                for c in &report.counterexamples {
                    let _ = writeln!(t, "COUNTEREXAMPLE {} #{}: {}", c.check, c.instance_id, c.detail);
                }
                for e in &report.errors {
                    let _ = writeln!(t, "ERROR {e}");
                }
                if let Some(ms) = report.elapsed_ms {
                    let _ = writeln!(t, "elapsed {ms} ms");
                }
                t.trim_end().to_string()
            })?;
            return Ok(report.exit_code());
        }
        Command::Enumerate { common, generator } => {
            let g = parse_generator(&generator, common.seed)?;
            let sets = enumerate_instances(&g, common.budget.unwrap_or(DEFAULT_INSTANCE_BUDGET))?;
            let instances: Vec<Instance> = sets.iter().map(GSet::to_instance).collect();
            emit(&common, &instances, || sets.iter().map(fmt_set).collect::<Vec<_>>().join("\n"))?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Counterexample(_) => 1,
                _ => 2,
            })
        }
    }
}
