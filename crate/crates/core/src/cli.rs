//! The `twofold` command line.
//!
//! Exit codes: 0 on success, 1 when the report cannot be written, 2 on
//! invalid flags, 3 when the rounding environment is broken.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::accuracy::{self, AccuracyConfig, ScalingConfig};
use crate::bench::{self, BenchGrid, BenchOptions, Tier, TierSizes};
use crate::eft::{fast_math_canary, fast_two_sum, two_sum};
use crate::error::{Error, Result};
use crate::kernels::{Flavor, Method, Op};
use crate::real::Precision;
use crate::rng::{GeneratorKind, Interval, LcgState, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BROKEN_ENVIRONMENT: i32 = 3;

/// Environment variables overriding the tier working-set bytes.
pub const TIER_ENV: [(&str, Tier); 3] = [
    ("TWOFOLD_SMALL_BYTES", Tier::Small),
    ("TWOFOLD_MEDIUM_BYTES", Tier::Medium),
    ("TWOFOLD_LARGE_BYTES", Tier::Large),
];

#[derive(Debug, Parser)]
#[command(name = "twofold", version, about = "Twofold summation: kernels, accuracy experiments and benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Relative error of each method per precision, generator and interval.
    Accuracy,
    /// 3.6 million binary32 tenths of a second.
    Hours100,
    /// Median relative error against N over seeded trials.
    Scaling,
    /// Throughput of every method, flavor, precision and tier.
    Bench,
    /// Memory roof: stream one or two arrays without arithmetic.
    ReadBaseline,
    /// Compute roof: accumulate register-resident data.
    NoreadBaseline,
    /// Checks error-free transformations and the rounding environment.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Working precision; both when omitted.
    #[arg(long, global = true)]
    pub precision: Option<Precision>,
    /// Number of addends (for scaling: the largest N, stepping by decades from 1000).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Generator seed; scaling trial t uses seed + t.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Generator; both when omitted (scaling defaults to mmix).
    #[arg(long, global = true)]
    pub generator: Option<GeneratorKind>,
    /// Data interval; both when omitted.
    #[arg(long, global = true)]
    pub interval: Option<Interval>,
    /// Comma-separated methods: direct, wide, twofold-fast, twofold-rigorous, kahan.
    #[arg(long, global = true, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    /// Comma-separated flavors: seq, unroll:k, vec:w.
    #[arg(long, global = true, value_delimiter = ',')]
    pub flavor: Option<Vec<Flavor>>,
    /// Comma-separated tiers; all when omitted.
    #[arg(long, global = true, value_delimiter = ',')]
    pub tier: Option<Vec<Tier>>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Md)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the metadata line and timestamps.
    #[arg(long, global = true)]
    pub no_meta: bool,
    /// Trials per N in the scaling study.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Best-of sample count for timings.
    #[arg(long, global = true)]
    pub reps: Option<usize>,
}

/// Parses `args` (program name first), runs one command and returns the
/// exit code. Reports go to `stdout` unless `--out` is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(failure) = fast_math_canary() {
        let _ = writeln!(stderr, "twofold: {failure}");
        return EXIT_BROKEN_ENVIRONMENT;
    }
    match execute(&cli, stderr) {
        Ok(Outcome { report, code }) => match emit(&cli.options, &report, stdout) {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(stderr, "twofold: {e}");
                EXIT_IO
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "twofold: {e}");
            match e {
                Error::Io(_) => EXIT_IO,
                _ => EXIT_USAGE,
            }
        }
    }
}

struct Outcome {
    report: String,
    code: i32,
}

impl From<String> for Outcome {
    fn from(report: String) -> Self {
        Outcome { report, code: EXIT_OK }
    }
}

fn emit(options: &Options, report: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match &options.out {
        Some(path) => std::fs::write(path, report),
        None => stdout.write_all(report.as_bytes()),
    }
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> Result<Outcome> {
    let o = &cli.options;
    let body = match cli.command {
        Command::Accuracy => accuracy_report(o)?,
        Command::Hours100 => {
            let rows = accuracy::run_hours100();
            match o.format {
                Format::Csv => accuracy::hours100_csv(&rows),
                Format::Md => accuracy::hours100_markdown(&rows),
            }
        }
        Command::Scaling => scaling_report(o)?,
        Command::Bench => bench_report(o, stderr)?,
        Command::ReadBaseline => read_report(o)?,
        Command::NoreadBaseline => noread_report(o, stderr)?,
        Command::Selftest => {
            let checks = selftest();
            let passed = checks.iter().all(|c| c.passed);
            let mut out = String::new();
            for c in &checks {
                let _ = writeln!(out, "{} {}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail);
            }
            let code = if passed { EXIT_OK } else { EXIT_BROKEN_ENVIRONMENT };
            return Ok(Outcome { report: out, code });
        }
    };
    Ok(with_meta(cli, body).into())
}

/// Prefixes the metadata line unless `--no-meta` is set. Benchmark reports
/// carry their own environment and timestamps.
fn with_meta(cli: &Cli, body: String) -> String {
    let o = &cli.options;
    if o.no_meta || matches!(cli.command, Command::Bench | Command::ReadBaseline | Command::NoreadBaseline) {
        return body;
    }
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let prefix = match o.format {
        Format::Csv => "# ",
        Format::Md => "<!-- ",
    };
    let suffix = match o.format {
        Format::Csv => "",
        Format::Md => " -->",
    };
    format!(
        "{prefix}twofold {} seed={} generated_unix={now}{suffix}\n{body}",
        env!("CARGO_PKG_VERSION"),
        o.seed
    )
}

fn precisions(o: &Options) -> Vec<Precision> {
    o.precision.map_or_else(|| Precision::ALL.to_vec(), |p| vec![p])
}

fn single_flavor(o: &Options) -> Result<Option<Flavor>> {
    match o.flavor.as_deref() {
        None => Ok(None),
        Some([f]) => Ok(Some(*f)),
        Some(_) => Err(Error::Unsupported("this command takes a single --flavor".into())),
    }
}

fn accuracy_report(o: &Options) -> Result<String> {
    let defaults = AccuracyConfig::default();
    let config = AccuracyConfig {
        n: o.n.unwrap_or(defaults.n),
        seed: o.seed,
        methods: o.methods.clone().unwrap_or(defaults.methods),
        precisions: precisions(o),
        generators: o.generator.map_or(defaults.generators, |g| vec![g]),
        intervals: o.interval.map_or(defaults.intervals, |i| vec![i]),
        flavor: single_flavor(o)?.unwrap_or(defaults.flavor),
    };
    let rows = accuracy::run_accuracy_table(&config)?;
    Ok(match o.format {
        Format::Csv => accuracy::accuracy_csv(&rows),
        Format::Md => accuracy::accuracy_markdown(&rows),
    })
}

fn scaling_report(o: &Options) -> Result<String> {
    let defaults = ScalingConfig::default();
    let ns = match o.n {
        None => defaults.ns,
        Some(max) if max >= 1_000 => std::iter::successors(Some(1_000usize), |n| n.checked_mul(10))
            .take_while(|&n| n <= max)
            .collect(),
        Some(max) => return Err(Error::Unsupported(format!("scaling needs --n of at least 1000, got {max}"))),
    };
    let config = ScalingConfig {
        ns,
        trials: o.trials.unwrap_or(defaults.trials),
        seed: o.seed,
        generator: o.generator.unwrap_or(defaults.generator),
        methods: o.methods.clone().unwrap_or(defaults.methods),
    };
    let report = accuracy::run_scaling_study(&config)?;
    Ok(match o.format {
        Format::Csv => accuracy::scaling_csv(&report),
        Format::Md => accuracy::scaling_markdown(&report),
    })
}

/// Default options with tier sizes from the environment and `--reps`.
pub fn bench_options(reps: Option<usize>) -> Result<BenchOptions> {
    let mut options = BenchOptions::default();
    if let Some(r) = reps {
        options.samples = r;
    }
    options.sizes = tier_sizes_from_env(|k| std::env::var(k).ok())?;
    Ok(options)
}

/// Tier sizes with overrides looked up through `var`.
pub fn tier_sizes_from_env(var: impl Fn(&str) -> Option<String>) -> Result<TierSizes> {
    let mut sizes = TierSizes::default();
    for (key, tier) in TIER_ENV {
        let Some(raw) = var(key) else { continue };
        let bytes: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&b| b > 0)
            .ok_or_else(|| Error::Unsupported(format!("{key} must be a positive byte count, got `{raw}`")))?;
        match tier {
            Tier::Small => sizes.small = bytes,
            Tier::Medium => sizes.medium = bytes,
            Tier::Large => sizes.large = bytes,
        }
    }
    Ok(sizes)
}

fn bench_output(o: &Options, reports: &[bench::KernelReport]) -> String {
    let meta = !o.no_meta;
    match o.format {
        Format::Csv => bench::reports_csv(reports, meta),
        Format::Md => bench::reports_markdown(reports, meta),
    }
}

fn bench_report(o: &Options, stderr: &mut dyn Write) -> Result<String> {
    let options = bench_options(o.reps)?;
    let mut reports = Vec::new();
    for precision in precisions(o) {
        let flavors = o.flavor.clone().unwrap_or_else(|| {
            vec![
                Flavor::Sequential,
                Flavor::default_unrolled(precision),
                Flavor::default_vectorized(precision),
            ]
        });
        let grid = BenchGrid {
            ops: Op::ALL.to_vec(),
            methods: o.methods.clone().unwrap_or_else(|| Method::ALL.to_vec()),
            flavors,
            precisions: vec![precision],
            tiers: o.tier.clone().unwrap_or_else(|| Tier::ALL.to_vec()),
        };
        reports.extend(bench::run_bench(&grid, &options)?);
    }
    bench::sort_reports(&mut reports);
    let mut out = bench_output(o, &reports);
    flag_checks(o, &reports, &mut out, stderr);
    Ok(out)
}

fn read_report(o: &Options) -> Result<String> {
    let options = bench_options(o.reps)?;
    let tiers = o.tier.clone().unwrap_or_else(|| Tier::ALL.to_vec());
    let mut reports = Vec::new();
    for precision in precisions(o) {
        for &tier in &tiers {
            for channels in [1, 2] {
                reports.extend(bench::run_read_baseline(channels, precision, tier, &options)?);
            }
        }
    }
    bench::sort_reports(&mut reports);
    Ok(bench_output(o, &reports))
}

fn noread_report(o: &Options, stderr: &mut dyn Write) -> Result<String> {
    let options = bench_options(o.reps)?;
    let methods = o.methods.clone().unwrap_or_else(|| Method::ALL.to_vec());
    let mut reports = Vec::new();
    for precision in precisions(o) {
        let flavor = single_flavor(o)?.unwrap_or_else(|| Flavor::default_vectorized(precision));
        for op in Op::ALL {
            for &method in &methods {
                match bench::run_noread_baseline(op, method, flavor, precision, &options) {
                    Ok(r) => reports.extend(r),
                    // binary64 has no wider hardware accumulator to keep in registers.
                    Err(Error::Unsupported(_)) if o.methods.is_none() => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    bench::sort_reports(&mut reports);
    let mut out = bench_output(o, &reports);
    flag_checks(o, &reports, &mut out, stderr);
    Ok(out)
}

/// Appends property checks to markdown reports and warns about flagged ones.
fn flag_checks(o: &Options, reports: &[bench::KernelReport], out: &mut String, stderr: &mut dyn Write) {
    let checks = bench::check_properties(reports);
    for c in checks.iter().filter(|c| !c.passed) {
        let _ = writeln!(stderr, "twofold: flagged: {} ({})", c.name, c.detail);
    }
    if o.format == Format::Md && !checks.is_empty() {
        out.push('\n');
        out.push_str(&bench::checks_markdown(&checks));
    }
}

/// One selftest result.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pairs per precision checked by [`selftest`].
pub const SELFTEST_PAIRS: usize = 100_000;

/// The exactness suite run by `twofold selftest`.
pub fn selftest() -> Vec<SelfCheck> {
    let canary = fast_math_canary();
    let mut checks = vec![SelfCheck {
        name: "canary",
        passed: canary.is_ok(),
        detail: canary.map_or_else(|e| e.to_string(), |()| "fast_two_sum(1, 2^-53) recovers 2^-53".into()),
    }];

    let mut g = LcgState::new(GeneratorKind::Mmix, DEFAULT_SEED);
    let mut bad32 = 0;
    for _ in 0..SELFTEST_PAIRS {
        let (a, next) = g.next_raw();
        let (b, next) = next.next_raw();
        g = next;
        let (a, b) = (f32_from_bits_finite(a), f32_from_bits_finite(b));
        let exact = a as f64 + b as f64;
        let t = two_sum(a, b);
        let mut ok = t.value as f64 + t.error as f64 == exact;
        if a.abs() >= b.abs() {
            let f = fast_two_sum(a, b);
            ok &= f.value as f64 + f.error as f64 == exact;
        }
        bad32 += usize::from(!ok);
    }
    checks.push(SelfCheck {
        name: "binary32 pairs",
        passed: bad32 == 0,
        detail: format!("{bad32} of {SELFTEST_PAIRS} pairs inexact under binary64 widening"),
    });

    let mut bad64 = 0;
    for _ in 0..SELFTEST_PAIRS {
        let (a, next) = g.next_raw();
        let (b, next) = next.next_raw();
        g = next;
        let (a, b) = (f64_near_one(a), f64_near_one(b));
        let t = two_sum(a, b);
        let mut ok = scaled_sum(&[a, b]) == scaled_sum(&[t.value, t.error]);
        if a.abs() >= b.abs() {
            let f = fast_two_sum(a, b);
            ok &= scaled_sum(&[a, b]) == scaled_sum(&[f.value, f.error]);
        }
        bad64 += usize::from(!ok);
    }
    checks.push(SelfCheck {
        name: "binary64 pairs",
        passed: bad64 == 0,
        detail: format!("{bad64} of {SELFTEST_PAIRS} pairs inexact against integer arithmetic"),
    });
    checks
}

/// A finite binary32 value from random bits, with exponents kept away from
/// overflow.
fn f32_from_bits_finite(raw: u64) -> f32 {
    let bits = (raw >> 32) as u32;
    let exp = ((bits >> 23) & 0xff) % 200 + 27;
    f32::from_bits(bits & 0x807f_ffff | exp << 23)
}

/// A binary64 value with exponent in `[-30, 30]`, the range [`scaled_sum`]
/// handles.
fn f64_near_one(raw: u64) -> f64 {
    let exp = (raw >> 52 & 0x7ff) % 61 + 1023 - 30;
    f64::from_bits(raw & 0x800f_ffff_ffff_ffff | exp << 52)
}

/// Exact sum of binary64 multiples of `2^-82` below `2^45` in magnitude, in
/// units of `2^-82`.
fn scaled_sum(xs: &[f64]) -> i128 {
    xs.iter()
        .map(|&x| {
            if x == 0.0 {
                return 0;
            }
            let bits = x.to_bits();
            let exp = (bits >> 52 & 0x7ff) as i32;
            let mant = if exp == 0 { bits & ((1 << 52) - 1) } else { bits & ((1 << 52) - 1) | 1 << 52 } as i128;
            // x = mant * 2^(exp - 1075); shift to units of 2^-82. Round-off
            // terms may have smaller exponents but stay multiples of 2^-82.
            let shift = exp - 1075 + 82;
            assert!(shift <= 74 && mant.trailing_zeros() as i32 >= -shift, "outside the selftest range: {x:e}");
            let v = if shift >= 0 { mant << shift } else { mant >> -shift };
            if bits >> 63 == 1 {
                -v
            } else {
                v
            }
        })
        .sum()
}
