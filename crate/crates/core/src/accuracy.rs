//! Accuracy experiments: relative error against the exact oracle on random
//! data, the "100 hours" clock, and the growth of error with `N`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::eft::Twofold;
use crate::error::{Error, Result};
use crate::kernels::{self, Flavor, Input, Method};
use crate::oracle::{self, Expansion};
use crate::real::{Precision, Real};
use crate::rng::{self, GeneratorKind, Interval};

/// Methods the accuracy table runs unless told otherwise.
pub const DEFAULT_METHODS: [Method; 3] = [Method::Direct, Method::Kahan, Method::TwofoldFast];

/// CSV header shared by accuracy tables.
pub const CSV_HEADER: &str = "precision,generator,interval,method,N,seed,rel_error";

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyConfig {
    pub n: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub precisions: Vec<Precision>,
    pub generators: Vec<GeneratorKind>,
    pub intervals: Vec<Interval>,
    pub flavor: Flavor,
}

impl Default for AccuracyConfig {
    fn default() -> Self {
        AccuracyConfig {
            n: 1_000_000,
            seed: rng::DEFAULT_SEED,
            methods: DEFAULT_METHODS.to_vec(),
            precisions: Precision::ALL.to_vec(),
            generators: GeneratorKind::ALL.to_vec(),
            intervals: Interval::ALL.to_vec(),
            flavor: Flavor::Sequential,
        }
    }
}

/// One method on one data set.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub precision: Precision,
    pub generator: GeneratorKind,
    pub interval: Interval,
    pub method: Method,
    pub n: usize,
    pub seed: u64,
    /// `(result - exact) / exact`, where twofold results are scored on
    /// `value + error`. NaN when the row is invalid.
    pub rel_error: f64,
    /// Relative error of `value` alone.
    pub value_rel_error: f64,
    /// Kernel output, widened to binary64.
    pub result: Twofold<f64>,
    /// Exact sum rounded to binary64.
    pub reference: f64,
    /// False if the kernel produced a non-finite result or the exact sum
    /// was zero.
    pub valid: bool,
}

impl AccuracyRow {
    /// Whether `error` has the sign of `exact - value`. Only meaningful for
    /// twofold methods, and only once `value` is off by more than a few
    /// rounding errors.
    pub fn estimate_points_right(&self) -> bool {
        let deviation = -self.value_rel_error * self.reference;
        deviation.signum() == self.result.error.signum() && self.result.error != 0.0
    }
}

/// Runs every method on every (precision, generator, interval) data set.
///
/// Each data set is generated once from a fresh generator seeded with
/// `config.seed` and shared by all methods.
pub fn run_accuracy_table(config: &AccuracyConfig) -> Result<Vec<AccuracyRow>> {
    if config.n == 0 {
        return Err(Error::Unsupported("accuracy table needs N >= 1".to_string()));
    }
    let mut rows = Vec::new();
    for &precision in &config.precisions {
        for &generator in &config.generators {
            for &interval in &config.intervals {
                let set = DataSet {
                    precision,
                    generator,
                    interval,
                    seed: config.seed,
                };
                match precision {
                    Precision::F32 => set.run::<f32>(config, &mut rows)?,
                    Precision::F64 => set.run::<f64>(config, &mut rows)?,
                }
            }
        }
    }
    Ok(rows)
}

struct DataSet {
    precision: Precision,
    generator: GeneratorKind,
    interval: Interval,
    seed: u64,
}

impl DataSet {
    fn run<T: Real>(&self, config: &AccuracyConfig, rows: &mut Vec<AccuracyRow>) -> Result<()> {
        let data: Vec<T> = rng::generate(self.generator, self.seed, self.interval, config.n);
        let exact = oracle::exact_sum(&data);
        for &method in &config.methods {
            let result = kernels::run_flavor(method, config.flavor, Input::Sum(&data))?.twofold;
            let (rel_error, value_rel_error, valid) = score(method, result, &exact);
            rows.push(AccuracyRow {
                precision: self.precision,
                generator: self.generator,
                interval: self.interval,
                method,
                n: config.n,
                seed: self.seed,
                rel_error,
                value_rel_error,
                result,
                reference: exact.round::<f64>(),
                valid,
            });
        }
        Ok(())
    }
}

fn score(method: Method, result: Twofold<f64>, exact: &Expansion) -> (f64, f64, bool) {
    if !result.is_finite() || exact.is_zero() || !exact.is_finite() {
        return (f64::NAN, f64::NAN, false);
    }
    let scored = if method.is_twofold() {
        oracle::relative_error_twofold(result, exact)
    } else {
        oracle::relative_error(result.value, exact)
    };
    let value = oracle::relative_error(result.value, exact);
    match (scored, value) {
        // Adding zero turns -0 into +0 so reports never show a signed zero.
        (Ok(r), Ok(v)) => (r + 0.0, v + 0.0, true),
        _ => (f64::NAN, f64::NAN, false),
    }
}

pub fn accuracy_csv(rows: &[AccuracyRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:e}",
            r.precision, r.generator, r.interval, r.method, r.n, r.seed, r.rel_error
        );
    }
    out
}

pub fn accuracy_markdown(rows: &[AccuracyRow]) -> String {
    let mut out = String::from(
        "| precision | generator | interval | method | N | seed | rel_error |\n\
         |---|---|---|---|---:|---:|---:|\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} |",
            r.precision,
            r.generator,
            r.interval.label(),
            r.method,
            r.n,
            r.seed,
            if r.valid { format!("{:.5e}", r.rel_error) } else { "invalid".to_string() }
        );
    }
    out.push_str(
        "\nReference figures (N = 10^6, unknown seeds, so compare orders of \
         magnitude only):\n\n\
         | precision | generator | interval | direct | kahan | twofold-fast |\n\
         |---|---|---|---:|---:|---:|\n",
    );
    for (p, g, i, d, k, t) in REFERENCE_DIGITS {
        let _ = writeln!(out, "| {p} | {g} | {i} | {d} | {k} | {t} |");
    }
    out
}

const REFERENCE_DIGITS: [(&str, &str, &str, &str, &str, &str); 8] = [
    ("f32", "nr", "[0,1]", "-1.07759e-7", "1.72372e-8", "-5.24003e-11"),
    ("f32", "nr", "[-1,1]", "-2.73821e-4", "3.69634e-9", "0"),
    ("f32", "mmix", "[0,1]", "-4.74619e-6", "5.19367e-9", "9.09826e-11"),
    ("f32", "mmix", "[-1,1]", "1.65869e-6", "-2.07055e-8", "0"),
    ("f64", "nr", "[0,1]", "2.72008e-17", "2.72008e-17", "0"),
    ("f64", "nr", "[-1,1]", "3.20017e-13", "-1.06717e-16", "0"),
    ("f64", "mmix", "[0,1]", "-1.63303e-14", "-2.73781e-17", "0"),
    ("f64", "mmix", "[-1,1]", "5.17981e-14", "-1.14555e-17", "0"),
];

/// Ticks in 100 hours at ten ticks per second.
pub const HOURS100_TICKS: usize = 3_600_000;

/// One row of the 100-hours clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hours100Row {
    pub method: Method,
    /// Shown time; `value + error` for twofold.
    pub result_hours: f64,
    /// `|100 - result_hours|`.
    pub deviation_hours: f64,
    /// `error` in hours, twofold only.
    pub estimate_hours: Option<f64>,
}

/// A clock adding binary32 `0.1` seconds per tick for 100 hours, counted
/// with each method. The wide row keeps the same binary32 ticks in a
/// binary64 counter.
pub fn run_hours100() -> Vec<Hours100Row> {
    let ticks = vec![0.1f32; HOURS100_TICKS];
    let hours = |seconds: f64| seconds / 3600.0;
    let row = |method, result: Twofold<f64>| {
        let result_hours = hours(result.value + result.error);
        Hours100Row {
            method,
            result_hours,
            deviation_hours: (100.0 - result_hours).abs(),
            estimate_hours: method.is_twofold().then(|| hours(result.error)),
        }
    };
    vec![
        row(Method::Direct, kernels::sum_direct(&ticks).widen().twofold),
        row(Method::WideAccumulator, kernels::sum_wide(&ticks).twofold),
        row(Method::Kahan, kernels::sum_kahan(&ticks).widen().twofold),
        row(Method::TwofoldFast, kernels::sum_twofold_fast(&ticks).widen().twofold),
    ]
}

pub fn hours100_csv(rows: &[Hours100Row]) -> String {
    let mut out = String::from("method,result_hours,deviation_hours,estimate_hours\n");
    for r in rows {
        let estimate = r.estimate_hours.map(|e| format!("{e:e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:e},{:e},{}",
            r.method, r.result_hours, r.deviation_hours, estimate
        );
    }
    out
}

pub fn hours100_markdown(rows: &[Hours100Row]) -> String {
    let mut out = String::from("| method | result (h) | deviation (h) | estimate (h) |\n|---|---:|---:|---:|\n");
    for r in rows {
        let estimate = r.estimate_hours.map(|e| format!("{}", Sig(e))).unwrap_or_else(|| "-".to_string());
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            r.method,
            Sig(r.result_hours),
            Sig(r.deviation_hours),
            estimate
        );
    }
    out.push_str(
        "\nReference figures: direct 96.3958 (deviation 3.60423), \
         wide 100 (1.49012e-6), kahan 100 (0), twofold 99.9359 (0.0641498, estimate 3.54008).\n",
    );
    out
}

/// Six significant digits, trailing zeros trimmed.
struct Sig(f64);

impl std::fmt::Display for Sig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let x = self.0;
        if x == 0.0 {
            return f.write_str("0");
        }
        let magnitude = x.abs().log10().floor() as i32;
        if !(-4..6).contains(&magnitude) {
            return write!(f, "{x:.5e}");
        }
        let decimals = (5 - magnitude).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.') } else { &s };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub generator: GeneratorKind,
    pub methods: Vec<Method>,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            ns: vec![1_000, 10_000, 100_000, 1_000_000],
            trials: 100,
            seed: rng::DEFAULT_SEED,
            generator: GeneratorKind::Mmix,
            methods: vec![Method::Direct, Method::TwofoldFast],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub n: usize,
    pub method: Method,
    /// Median over trials of `|rel_error|` (twofold scored on
    /// `value + error`).
    pub median_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `ln median` against `ln N` per method, over
    /// the points with a nonzero median. NaN with fewer than two such points.
    pub slopes: Vec<(Method, f64)>,
}

/// binary32 uniform `[0, 1)` data; trial `t` uses seed `seed + t`.
pub fn run_scaling_study(config: &ScalingConfig) -> Result<ScalingReport> {
    let mut points = Vec::new();
    for &n in &config.ns {
        if n == 0 {
            return Err(Error::Unsupported("scaling study needs N >= 1".to_string()));
        }
        let per_trial: Vec<Vec<f64>> = (0..config.trials as u64)
            .into_par_iter()
            .map(|t| {
                let data: Vec<f32> = rng::generate(config.generator, config.seed.wrapping_add(t), Interval::Unit, n);
                let exact = oracle::exact_sum(&data);
                config
                    .methods
                    .iter()
                    .map(|&m| {
                        let result = kernels::run_flavor(m, Flavor::Sequential, Input::Sum(&data))
                            .expect("sequential flavor is always valid")
                            .twofold;
                        score(m, result, &exact).0.abs()
                    })
                    .collect()
            })
            .collect();
        for (k, &method) in config.methods.iter().enumerate() {
            let errors: Vec<f64> = per_trial.iter().map(|t| t[k]).collect();
            points.push(ScalingPoint {
                n,
                method,
                median_rel_error: median(errors),
            });
        }
    }
    let slopes = config
        .methods
        .iter()
        .map(|&m| {
            let xy: Vec<(f64, f64)> = points
                .iter()
                .filter(|p| p.method == m && p.median_rel_error > 0.0)
                .map(|p| ((p.n as f64).ln(), p.median_rel_error.ln()))
                .collect();
            (m, slope(&xy))
        })
        .collect();
    Ok(ScalingReport { points, slopes })
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

fn slope(xy: &[(f64, f64)]) -> f64 {
    if xy.len() < 2 {
        return f64::NAN;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn scaling_csv(report: &ScalingReport) -> String {
    let mut out = String::from("N,method,median_rel_error\n");
    for p in &report.points {
        let _ = writeln!(out, "{},{},{:e}", p.n, p.method, p.median_rel_error);
    }
    for (m, s) in &report.slopes {
        let _ = writeln!(out, "slope,{m},{s:e}");
    }
    out
}

pub fn scaling_markdown(report: &ScalingReport) -> String {
    let mut out = String::from("| N | method | median rel_error |\n|---:|---|---:|\n");
    for p in &report.points {
        let _ = writeln!(out, "| {} | {} | {:.4e} |", p.n, p.method, p.median_rel_error);
    }
    out.push_str("\n| method | log-log slope |\n|---|---:|\n");
    for (m, s) in &report.slopes {
        let _ = writeln!(out, "| {m} | {s:.3} |");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_element_is_exact_for_every_method() {
        let config = AccuracyConfig {
            n: 1,
            methods: Method::ALL.to_vec(),
            ..AccuracyConfig::default()
        };
        let rows = run_accuracy_table(&config).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2 * 5);
        for r in rows {
            assert!(r.valid);
            assert_eq!(r.rel_error, 0.0, "{r:?}");
        }
    }

    #[test]
    fn zero_n_is_rejected() {
        let config = AccuracyConfig {
            n: 0,
            ..AccuracyConfig::default()
        };
        assert!(run_accuracy_table(&config).is_err());
    }

    #[test]
    fn csv_has_the_fixed_columns() {
        let config = AccuracyConfig {
            n: 10,
            precisions: vec![Precision::F32],
            generators: vec![GeneratorKind::NumericalRecipes],
            intervals: vec![Interval::Unit],
            ..AccuracyConfig::default()
        };
        let csv = accuracy_csv(&run_accuracy_table(&config).unwrap());
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&first[..6], &["f32", "nr", "unit", "direct", "10", "1"]);
        assert!(first[6].parse::<f64>().is_ok());
        assert_eq!(csv.lines().count(), 1 + 3);
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(Sig(96.395_806).to_string(), "96.3958");
        assert_eq!(Sig(100.0).to_string(), "100");
        assert_eq!(Sig(0.0).to_string(), "0");
        assert_eq!(Sig(1.490_116e-6).to_string(), "1.49012e-6");
        assert_eq!(Sig(3.540_078).to_string(), "3.54008");
    }

    #[test]
    fn median_and_slope() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
        let xy: Vec<(f64, f64)> = (1..5).map(|i| (i as f64, 0.5 * i as f64 + 1.0)).collect();
        assert!((slope(&xy) - 0.5).abs() < 1e-12);
        assert!(slope(&xy[..1]).is_nan());
    }

    #[test]
    fn scaling_of_single_elements_is_exact() {
        let report = run_scaling_study(&ScalingConfig {
            ns: vec![1],
            trials: 5,
            ..ScalingConfig::default()
        })
        .unwrap();
        assert!(report.points.iter().all(|p| p.median_rel_error == 0.0));
        assert!(report.slopes.iter().all(|(_, s)| s.is_nan()));
    }
}
