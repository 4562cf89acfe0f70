//! Throughput harness: every method in every flavor over data sets sized for
//! L1, last-level cache and main memory, plus two roofs. `read1`/`read2`
//! stream one or two arrays without arithmetic (the memory roof), and the
//! register-resident runs accumulate without touching memory (the compute
//! roof).
//!
//! Rates count one addition per element for sums and dot products alike,
//! ignoring the extra operations of twofold and Kahan summation, so
//! `megaflops == elements / second / 10^6`.
//!
//! Measurements are best-of-`samples` on the monotonic clock, each sample
//! repeating the kernel until it lasts at least `min_sample`. Every kernel
//! result feeds a checksum that is printed with the report, so the timed
//! work cannot be optimized away.

use std::fmt::{self, Write as _};
use std::hint::black_box;
use std::str::FromStr;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};
use crate::kernels::{self, Flavor, Input, Method, Op, VECTOR_CHAINS};
use crate::real::{Precision, Real};
use crate::rng::{self, GeneratorKind, Interval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    /// Fits the L1 data cache.
    Small,
    /// Fits the last-level cache but not L1.
    Medium,
    /// Exceeds the last-level cache.
    Large,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Small, Tier::Medium, Tier::Large];

    pub fn name(self) -> &'static str {
        match self {
            Tier::Small => "small",
            Tier::Medium => "medium",
            Tier::Large => "large",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "small" => Ok(Tier::Small),
            "medium" => Ok(Tier::Medium),
            "large" => Ok(Tier::Large),
            other => Err(format!("unknown tier `{other}` (valid: small, medium, large)")),
        }
    }
}

/// Working-set bytes per tier, shared by all arrays of a kernel (a dot
/// product splits its tier between two arrays).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TierSizes {
    pub small: usize,
    pub medium: usize,
    pub large: usize,
}

impl Default for TierSizes {
    fn default() -> Self {
        TierSizes {
            small: 16 << 10,
            medium: 1 << 20,
            large: 64 << 20,
        }
    }
}

impl TierSizes {
    pub fn bytes(&self, tier: Tier) -> usize {
        match tier {
            Tier::Small => self.small,
            Tier::Medium => self.medium,
            Tier::Large => self.large,
        }
    }

    /// Elements per array for `arrays` arrays of `precision`.
    pub fn elements(&self, tier: Tier, precision: Precision, arrays: usize) -> usize {
        (self.bytes(tier) / (precision.size_of() * arrays)).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    /// Best-of count. Zero skips all timing.
    pub samples: usize,
    pub warmup: usize,
    /// Each sample repeats the kernel until it takes at least this long.
    pub min_sample: Duration,
    pub sizes: TierSizes,
    /// Additions per register-resident call.
    pub resident_passes: u64,
    /// Pin the process to one CPU before measuring.
    pub pin: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            samples: 20,
            warmup: 3,
            min_sample: Duration::from_millis(10),
            sizes: TierSizes::default(),
            resident_passes: 1 << 14,
            pin: true,
        }
    }
}

/// What a report measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Workload {
    /// A kernel streaming its data from memory.
    Kernel { op: Op, method: Method },
    /// A kernel on a register-resident block.
    NoRead { op: Op, method: Method },
    /// Reading one or two arrays without arithmetic.
    Read { channels: u8 },
}

/// Description of the measuring environment, repeated on every report.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub cpu: String,
    pub isa: &'static str,
    pub clock: &'static str,
    pub sizes: TierSizes,
    pub vector_chains: usize,
    pub samples: usize,
    pub warmup: usize,
    pub min_sample: Duration,
    /// `Ok(cpu)` when pinned, `Err(reason)` otherwise.
    pub pinning: std::result::Result<usize, String>,
}

impl Environment {
    pub fn capture(options: &BenchOptions, pinning: std::result::Result<usize, String>) -> Self {
        Environment {
            cpu: cpu_model(),
            isa: native_isa(),
            clock: "std::time::Instant (monotonic)",
            sizes: options.sizes,
            vector_chains: VECTOR_CHAINS,
            samples: options.samples,
            warmup: options.warmup,
            min_sample: options.min_sample,
            pinning,
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cpu={}; isa={}; clock={}; tiers={}/{}/{} bytes; vector_chains={}; best_of={}; warmup={}; min_sample={:?}; ",
            self.cpu,
            self.isa,
            self.clock,
            self.sizes.small,
            self.sizes.medium,
            self.sizes.large,
            self.vector_chains,
            self.samples,
            self.warmup,
            self.min_sample
        )?;
        match &self.pinning {
            Ok(cpu) => write!(f, "pinned=cpu{cpu}"),
            Err(why) => write!(f, "pinned=no ({why})"),
        }
    }
}

/// One measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub workload: Workload,
    /// `None` for read roofs.
    pub flavor: Option<Flavor>,
    pub precision: Precision,
    /// `None` for register-resident runs.
    pub tier: Option<Tier>,
    /// Elements (additions) per kernel call.
    pub n: usize,
    /// Kernel calls per timed sample.
    pub repetitions: u64,
    pub best_elements_per_second: f64,
    /// Equal to `best_elements_per_second / 10^6`.
    pub megaflops: f64,
    pub checksum: f64,
    /// Seconds since the Unix epoch at the end of the measurement.
    pub timestamp: u64,
    pub environment: Environment,
}

impl KernelReport {
    /// Kernel name in the `[prefix]op[suffix]` scheme: no prefix for the
    /// plain loop, `u` for unrolled, `h` for vectorized and `p` for
    /// register-resident runs; suffix `tf`, `t`, `k` or `d` for the method.
    pub fn name(&self) -> String {
        match self.workload {
            Workload::Read { channels } => format!("read{channels}"),
            Workload::Kernel { op, method } => {
                let prefix = match self.flavor {
                    Some(Flavor::Unrolled(_)) => "u",
                    Some(Flavor::Vectorized(_)) => "h",
                    _ => "",
                };
                format!("{prefix}{}{}", op.name(), method.suffix())
            }
            Workload::NoRead { op, method } => format!("p{}{}", op.name(), method.suffix()),
        }
    }

    fn sort_key(&self) -> (u8, u8, u8, Precision, Option<Tier>, Option<Flavor>) {
        let (group, method, op) = match self.workload {
            Workload::Kernel { op, method } => {
                let group = match self.flavor {
                    Some(Flavor::Sequential) | None => 0,
                    Some(Flavor::Unrolled(_)) => 1,
                    Some(Flavor::Vectorized(_)) => 2,
                };
                (group, method_rank(method), op as u8)
            }
            Workload::NoRead { op, method } => (3, method_rank(method), op as u8),
            Workload::Read { channels } => (4, 0, channels),
        };
        (group, method, op, self.precision, self.tier, self.flavor)
    }
}

fn method_rank(method: Method) -> u8 {
    match method {
        Method::Direct => 0,
        Method::TwofoldFast => 1,
        Method::TwofoldRigorous => 2,
        Method::Kahan => 3,
        Method::WideAccumulator => 4,
    }
}

/// Sorts reports into table order: plain, unrolled, vectorized,
/// register-resident, then read roofs; within a group by method, then sum
/// before dot.
pub fn sort_reports(reports: &mut [KernelReport]) {
    reports.sort_by_key(|r| r.sort_key());
}

/// Cells to measure; every combination is run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchGrid {
    pub ops: Vec<Op>,
    pub methods: Vec<Method>,
    pub flavors: Vec<Flavor>,
    pub precisions: Vec<Precision>,
    pub tiers: Vec<Tier>,
}

impl Default for BenchGrid {
    fn default() -> Self {
        BenchGrid {
            ops: vec![Op::Sum, Op::Dot],
            methods: Method::ALL.to_vec(),
            flavors: vec![Flavor::Sequential],
            precisions: Precision::ALL.to_vec(),
            tiers: Tier::ALL.to_vec(),
        }
    }
}

/// Times every cell of `grid`, sorted into table order.
pub fn run_bench(grid: &BenchGrid, options: &BenchOptions) -> Result<Vec<KernelReport>> {
    let flavors = grid.flavors.iter().map(|f| f.validate()).collect::<Result<Vec<_>>>()?;
    if options.samples == 0 {
        return Ok(Vec::new());
    }
    let env = prepare(options);
    let mut reports = Vec::new();
    for &precision in &grid.precisions {
        for &tier in &grid.tiers {
            for &op in &grid.ops {
                match precision {
                    Precision::F32 => bench_cells::<f32>(op, tier, grid, &flavors, options, &env, &mut reports)?,
                    Precision::F64 => bench_cells::<f64>(op, tier, grid, &flavors, options, &env, &mut reports)?,
                }
            }
        }
    }
    sort_reports(&mut reports);
    Ok(reports)
}

/// All methods and flavors on one data set.
fn bench_cells<T: Real>(
    op: Op,
    tier: Tier,
    grid: &BenchGrid,
    flavors: &[Flavor],
    options: &BenchOptions,
    env: &Environment,
    reports: &mut Vec<KernelReport>,
) -> Result<()> {
    let arrays = match op {
        Op::Sum => 1,
        Op::Dot => 2,
    };
    let n = options.sizes.elements(tier, T::PRECISION, arrays);
    let a: Vec<T> = rng::generate(GeneratorKind::Mmix, 1, Interval::Unit, n);
    let b: Vec<T> = match op {
        Op::Sum => Vec::new(),
        Op::Dot => rng::generate(GeneratorKind::Mmix, 2, Interval::Unit, n),
    };
    let input = match op {
        Op::Sum => Input::Sum(&a),
        Op::Dot => Input::dot(&a, &b)?,
    };
    for &method in &grid.methods {
        for &flavor in flavors {
            // Validate once so the timed closure cannot fail.
            kernels::run_flavor(method, flavor, input)?;
            let m = measure(options, n as u64, || {
                let r = kernels::run_flavor(method, flavor, black_box(input)).expect("validated above");
                r.twofold.value + r.twofold.error
            });
            reports.push(m.report(Workload::Kernel { op, method }, Some(flavor), T::PRECISION, Some(tier), n, env));
        }
    }
    Ok(())
}

/// Streams one or two arrays of `precision` from `tier` with a bitwise
/// reduction and no floating-point work.
pub fn run_read_baseline(channels: u8, precision: Precision, tier: Tier, options: &BenchOptions) -> Result<Option<KernelReport>> {
    if !(1..=2).contains(&channels) {
        return Err(Error::Unsupported(format!("read baseline takes 1 or 2 channels, not {channels}")));
    }
    if options.samples == 0 {
        return Ok(None);
    }
    let env = prepare(options);
    let n = options.sizes.elements(tier, precision, channels as usize);
    let words = (n * precision.size_of()).div_ceil(8);
    let a: Vec<u64> = (0..words as u64).map(|i| i.wrapping_mul(0x9e37_79b9_7f4a_7c15)).collect();
    let b: Vec<u64> = if channels == 2 { a.iter().map(|w| w.rotate_left(17)).collect() } else { Vec::new() };
    let m = measure(options, n as u64, || {
        let x = xor_fold(black_box(&a)) ^ if channels == 2 { xor_fold(black_box(&b)) } else { 0 };
        (x >> 11) as f64
    });
    Ok(Some(m.report(Workload::Read { channels }, None, precision, Some(tier), n, &env)))
}

/// Accumulates a register-resident block `resident_passes` times per call.
pub fn run_noread_baseline(
    op: Op,
    method: Method,
    flavor: Flavor,
    precision: Precision,
    options: &BenchOptions,
) -> Result<Option<KernelReport>> {
    let flavor = flavor.validate()?;
    if options.samples == 0 {
        return Ok(None);
    }
    let env = prepare(options);
    let report = match precision {
        Precision::F32 => noread::<f32>(op, method, flavor, options, &env)?,
        Precision::F64 => noread::<f64>(op, method, flavor, options, &env)?,
    };
    Ok(Some(report))
}

fn noread<T: Real>(op: Op, method: Method, flavor: Flavor, options: &BenchOptions, env: &Environment) -> Result<KernelReport> {
    let lanes = flavor.lanes();
    // Values near one keep long runs of additions finite and rounding.
    let a: Vec<T> = (0..lanes).map(|i| T::from_f64(1.0 + i as f64 / 1024.0 + 1e-3)).collect();
    let b: Vec<T> = (0..lanes).map(|i| T::from_f64(1.0 - i as f64 / 4096.0)).collect();
    let other = (op == Op::Dot).then_some(b.as_slice());
    let passes = options.resident_passes;
    kernels::run_register_resident(method, flavor, &a, other, passes)?;
    let per_call = lanes as u64 * passes;
    let m = measure(options, per_call, || {
        let r = kernels::run_register_resident(method, flavor, black_box(&a), black_box(other), passes).expect("validated above");
        r.twofold.value + r.twofold.error
    });
    Ok(m.report(Workload::NoRead { op, method }, Some(flavor), T::PRECISION, None, per_call as usize, env))
}

struct Measurement {
    repetitions: u64,
    best: Duration,
    elements: u64,
    checksum: f64,
}

impl Measurement {
    fn report(
        &self,
        workload: Workload,
        flavor: Option<Flavor>,
        precision: Precision,
        tier: Option<Tier>,
        n: usize,
        env: &Environment,
    ) -> KernelReport {
        let eps = (self.elements * self.repetitions) as f64 / self.best.as_secs_f64();
        KernelReport {
            workload,
            flavor,
            precision,
            tier,
            n,
            repetitions: self.repetitions,
            best_elements_per_second: eps,
            megaflops: eps / 1e6,
            checksum: self.checksum,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            environment: env.clone(),
        }
    }
}

fn measure(options: &BenchOptions, elements: u64, mut kernel: impl FnMut() -> f64) -> Measurement {
    let mut checksum = 0.0;
    for _ in 0..options.warmup {
        checksum += black_box(kernel());
    }
    let mut reps: u64 = 1;
    loop {
        let (elapsed, sum) = timed(reps, &mut kernel);
        checksum += sum;
        if elapsed >= options.min_sample {
            break;
        }
        let scale = options.min_sample.as_secs_f64() / elapsed.as_secs_f64().max(1e-9);
        reps = (reps as f64 * scale.clamp(2.0, 100.0)).ceil() as u64;
    }
    let mut best = Duration::MAX;
    for _ in 0..options.samples {
        let (elapsed, sum) = timed(reps, &mut kernel);
        checksum += sum;
        best = best.min(elapsed);
    }
    Measurement {
        repetitions: reps,
        best,
        elements,
        checksum: black_box(checksum),
    }
}

fn timed(reps: u64, kernel: &mut impl FnMut() -> f64) -> (Duration, f64) {
    let mut sum = 0.0;
    let start = Instant::now();
    for _ in 0..reps {
        sum += black_box(kernel());
    }
    (start.elapsed(), sum)
}

fn xor_fold(words: &[u64]) -> u64 {
    #[cfg(target_arch = "x86_64")]
    {
        if is_x86_feature_detected!("avx512f") {
            return unsafe { read::xor_fold_avx512(words) };
        }
        if is_x86_feature_detected!("avx2") {
            return unsafe { read::xor_fold_avx2(words) };
        }
    }
    words.iter().fold(0, |x, w| x ^ w)
}

#[cfg(target_arch = "x86_64")]
mod read {
    use std::arch::x86_64::*;

    /// Eight independent accumulators, one 64-byte load each per step.
    #[target_feature(enable = "avx512f")]
    pub unsafe fn xor_fold_avx512(words: &[u64]) -> u64 {
        const STEP: usize = 8 * 8;
        let mut acc = [_mm512_setzero_si512(); 8];
        let mut chunks = words.chunks_exact(STEP);
        for chunk in &mut chunks {
            let p = chunk.as_ptr();
            for (r, a) in acc.iter_mut().enumerate() {
                *a = _mm512_xor_si512(*a, _mm512_loadu_si512(p.add(8 * r) as *const _));
            }
        }
        let mut lanes = [0u64; 8];
        let mut x = chunks.remainder().iter().fold(0, |x, w| x ^ w);
        for a in acc {
            _mm512_storeu_si512(lanes.as_mut_ptr() as *mut _, a);
            x = lanes.iter().fold(x, |x, w| x ^ w);
        }
        x
    }

    #[target_feature(enable = "avx2")]
    pub unsafe fn xor_fold_avx2(words: &[u64]) -> u64 {
        const STEP: usize = 8 * 4;
        let mut acc = [_mm256_setzero_si256(); 8];
        let mut chunks = words.chunks_exact(STEP);
        for chunk in &mut chunks {
            let p = chunk.as_ptr();
            for (r, a) in acc.iter_mut().enumerate() {
                *a = _mm256_xor_si256(*a, _mm256_loadu_si256(p.add(4 * r) as *const __m256i));
            }
        }
        let mut lanes = [0u64; 4];
        let mut x = chunks.remainder().iter().fold(0, |x, w| x ^ w);
        for a in acc {
            _mm256_storeu_si256(lanes.as_mut_ptr() as *mut __m256i, a);
            x = lanes.iter().fold(x, |x, w| x ^ w);
        }
        x
    }
}

fn prepare(options: &BenchOptions) -> Environment {
    let pinning = if options.pin { pin_current_thread() } else { Err("disabled".to_string()) };
    Environment::capture(options, pinning)
}

/// Pins the calling thread to the first CPU it may run on.
#[cfg(target_os = "linux")]
pub fn pin_current_thread() -> std::result::Result<usize, String> {
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        if libc::sched_getaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &mut set) != 0 {
            return Err(format!("sched_getaffinity: {}", std::io::Error::last_os_error()));
        }
        let Some(cpu) = (0..libc::CPU_SETSIZE as usize).find(|&c| libc::CPU_ISSET(c, &set)) else {
            return Err("empty affinity mask".to_string());
        };
        let mut one: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(cpu, &mut one);
        if libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &one) != 0 {
            return Err(format!("sched_setaffinity: {}", std::io::Error::last_os_error()));
        }
        Ok(cpu)
    }
}

#[cfg(not(target_os = "linux"))]
pub fn pin_current_thread() -> std::result::Result<usize, String> {
    Err("CPU pinning is only implemented on Linux".to_string())
}

fn cpu_model() -> String {
    std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|info| {
            info.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_string())
        })
        .unwrap_or_else(|| std::env::consts::ARCH.to_string())
}

fn native_isa() -> &'static str {
    kernels::backend_name(Precision::F32, Flavor::default_vectorized(Precision::F32))
}

/// One ordering or ratio check over a set of reports.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Noise allowance for the ordering checks.
pub const NOISE_ALLOWANCE: f64 = 0.10;

/// Ratio and ordering checks over whatever `reports` contains. Checks with
/// missing inputs are skipped. Results are meant to be flagged, not
/// enforced: timings on shared machines are noisy.
pub fn check_properties(reports: &[KernelReport]) -> Vec<PropertyCheck> {
    let slack = 1.0 + NOISE_ALLOWANCE;
    let mut checks = Vec::new();
    let rate = |r: &KernelReport| r.best_elements_per_second;

    for precision in Precision::ALL {
        let noread = |m: Method| {
            reports.iter().find(|r| {
                r.precision == precision && r.workload == Workload::NoRead { op: Op::Sum, method: m }
            })
        };
        if let (Some(d), Some(tf), Some(t)) = (
            noread(Method::Direct),
            noread(Method::TwofoldFast),
            noread(Method::TwofoldRigorous),
        ) {
            let r = rate(d) / rate(tf);
            checks.push(band(format!("{precision} noread direct/twofold-fast"), r, 2.0, 6.0, slack));
            let r = rate(d) / rate(t);
            checks.push(band(format!("{precision} noread direct/twofold-rigorous"), r, 4.0, 10.0, slack));
        }

        let read = |channels: u8, tier: Tier| {
            reports
                .iter()
                .find(|r| r.precision == precision && r.tier == Some(tier) && r.workload == Workload::Read { channels })
        };
        for tier in Tier::ALL {
            if let (Some(r1), Some(r2)) = (read(1, tier), read(2, tier)) {
                checks.push(at_most(format!("{precision} {tier} read2 <= read1"), rate(r2), rate(r1), slack));
            }
        }
        if let (Some(large), Some(small)) = (read(1, Tier::Large), read(1, Tier::Small)) {
            checks.push(at_most(format!("{precision} read1 large <= small"), rate(large), rate(small), slack));
        }
        if let Some(roof) = read(1, Tier::Large) {
            for r in reports.iter().filter(|r| {
                r.precision == precision
                    && r.tier == Some(Tier::Large)
                    && r.workload == (Workload::Kernel { op: Op::Sum, method: Method::Direct })
            }) {
                checks.push(at_most(format!("{precision} large {} <= read1", r.name()), rate(r), rate(roof), slack));
            }
        }
        if let Some(p) = noread(Method::TwofoldFast) {
            for r in reports.iter().filter(|r| {
                r.precision == precision
                    && r.tier == Some(Tier::Large)
                    && r.workload == (Workload::Kernel { op: Op::Sum, method: Method::TwofoldFast })
            }) {
                checks.push(at_most(format!("{precision} large {} <= psumtf", r.name()), rate(r), rate(p), 1.05));
            }
        }
    }

    // Rigorous twofold never beats the fast form on the same cell.
    for t in reports.iter().filter(|r| matches!(r.workload, Workload::Kernel { method: Method::TwofoldRigorous, .. } | Workload::NoRead { method: Method::TwofoldRigorous, .. })) {
        let fast_workload = match t.workload {
            Workload::Kernel { op, .. } => Workload::Kernel { op, method: Method::TwofoldFast },
            Workload::NoRead { op, .. } => Workload::NoRead { op, method: Method::TwofoldFast },
            Workload::Read { .. } => continue,
        };
        if let Some(f) = reports.iter().find(|r| {
            r.workload == fast_workload && r.precision == t.precision && r.tier == t.tier && r.flavor == t.flavor
        }) {
            let cell = format!(
                "{} {} {}",
                t.precision,
                t.tier.map_or("resident", |x| x.name()),
                t.flavor.map(|f| f.to_string()).unwrap_or_default()
            );
            checks.push(at_most(format!("{cell}: {} <= {}", t.name(), f.name()), rate(t), rate(f), slack));
        }
    }
    checks
}

fn band(name: String, ratio: f64, lo: f64, hi: f64, slack: f64) -> PropertyCheck {
    PropertyCheck {
        name,
        passed: ratio >= lo / slack && ratio <= hi * slack,
        detail: format!("ratio {ratio:.2}, expected [{lo}, {hi}]"),
    }
}

fn at_most(name: String, lhs: f64, rhs: f64, slack: f64) -> PropertyCheck {
    PropertyCheck {
        name,
        passed: lhs <= rhs * slack,
        detail: format!("{:.1} vs {:.1} Melem/s", lhs / 1e6, rhs / 1e6),
    }
}

pub const CSV_HEADER: &str =
    "kernel,method,op,flavor,precision,tier,N,repetitions,elements_per_second,megaflops,checksum,timestamp";

pub fn reports_csv(reports: &[KernelReport], meta: bool) -> String {
    let mut out = String::new();
    if meta {
        if let Some(r) = reports.first() {
            let _ = writeln!(out, "# {}", r.environment);
        }
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let (method, op) = match r.workload {
            Workload::Kernel { op, method } | Workload::NoRead { op, method } => (method.name(), op.name()),
            Workload::Read { .. } => ("", "read"),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.6e},{:.3},{:e},{}",
            r.name(),
            method,
            op,
            r.flavor.map(|f| f.to_string()).unwrap_or_default(),
            r.precision,
            r.tier.map_or("resident", |t| t.name()),
            r.n,
            r.repetitions,
            r.best_elements_per_second,
            r.megaflops,
            r.checksum,
            r.timestamp
        );
    }
    out
}

pub fn reports_markdown(reports: &[KernelReport], meta: bool) -> String {
    let mut out = String::new();
    if meta {
        if let Some(r) = reports.first() {
            let _ = writeln!(out, "Environment: {}\n", r.environment);
        }
    }
    out.push_str("| kernel | flavor | precision | tier | N | megaflops | checksum |\n|---|---|---|---|---:|---:|---:|\n");
    for r in reports {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {:.1} | {:.6e} |",
            r.name(),
            r.flavor.map(|f| f.to_string()).unwrap_or_else(|| "-".to_string()),
            r.precision,
            r.tier.map_or("resident", |t| t.name()),
            r.n,
            r.megaflops,
            r.checksum
        );
    }
    out
}

pub fn checks_markdown(checks: &[PropertyCheck]) -> String {
    let mut out = String::from("| property | status | detail |\n|---|---|---|\n");
    for c in checks {
        let status = if c.passed { "ok" } else { "FLAGGED" };
        let _ = writeln!(out, "| {} | {status} | {} |", c.name, c.detail);
    }
    out
}
