//! `tmps`: experiments over Thue-Morse values along arithmetic
//! progressions, Beatty sequences, and power floors `⌊n^c⌋`.
//!
//! Every run writes one JSON object (or one CSV table) carrying the full
//! effective configuration, the library version, wall time, and results.
//! Runs are deterministic for a fixed seed and thread count; worker counts
//! change wall time only, never report bodies.

mod lemmas;
mod report;

use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use report::{fmt_f64, to_csv_bytes, to_json_bytes, CsvRows, Envelope};
use tmps::beatty::{
    discrepancy, farey_approx_scaled, farey_neighbors, mean_discrepancy_integral,
    mean_discrepancy_profile,
};
use tmps::census::{
    ap_average_deviation, beatty_average_deviation, block_count_ps, normality_report,
    ApSamplingPolicy, AverageReport, BeattySamplingPolicy, NormalityReport,
};
use tmps::fourier::{
    fourier_direct, fourier_recursive, good_census_formula, good_set_census_all, type_sets,
    CoeffBlock, ShiftProfile,
};
use tmps::powerfloor::{floor_power, ExponentSpec};
use tmps::sumlab::{s1_beatty_direct, s1_direct, JPolicy, S1BeattyReport, S1Report, SumParams};
use tmps::{Real, Word};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "tmps",
    version,
    about = "Thue-Morse values along Beatty and power-floor sequences: censuses, averages, Fourier checks, lemma suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every sampled quantity in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: TMPS_THREADS env var, then all cores).
    /// Thread count never changes report bodies, only wall time.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the first values of t(⌊n^c⌋) together with the floors.
    Seq {
        /// Exponent, as `p/q` (exact roots) or a decimal (interval ladder).
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 16)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        start: u64,
    },
    /// Count every length-L block of t(⌊n^c⌋) for n < N.
    Blocks {
        #[arg(long)]
        c: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 3)]
        word_len: u8,
    },
    /// Block census at increasing checkpoints with the log-log decay slope.
    Normality {
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 3)]
        word_len: u8,
        /// Comma-separated, e.g. `1e4,1e5,1e6`.
        #[arg(long)]
        checkpoints: String,
    },
    /// Randomized comparison of the Fourier-table recurrence against
    /// direct evaluation, with Parseval checks.
    FourierCheck {
        #[arg(long, default_value_t = 200)]
        instances: u64,
        #[arg(long, default_value_t = 10)]
        max_lambda: u32,
        #[arg(long, default_value_t = 3)]
        max_window: usize,
        #[arg(long, default_value_t = 64)]
        max_offset: u64,
    },
    /// Exact good-position census over all d < 2^λ against the closed
    /// formula, for r = odd_part·2^x.
    CensusGood {
        #[arg(long)]
        lambda: u32,
        #[arg(long)]
        x: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        odd_part: u64,
        /// Sample a random valid profile instead of the zero profile.
        #[arg(long, default_value_t = false)]
        random_profile: bool,
    },
    /// Exact nα-discrepancy of one α, or a dyadic mean-discrepancy profile.
    Discrepancy {
        /// `p/q`, a decimal, or `sqrt(k)`.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 1024)]
        n: u64,
        /// Run the profile Σ_{d<2^mu} D_N(d/2^mu) instead.
        #[arg(long)]
        profile_mu: Option<u32>,
        /// Also report the geometric-sum statistic for this shift.
        #[arg(long)]
        geometric_m: Option<u64>,
        /// Run the midpoint-rule profile of ∫₀¹ D_N(α) dα on this grid.
        #[arg(long)]
        integral_grid: Option<u32>,
    },
    /// Enumerate Farey neighbours with their identities, or compute the
    /// scaled rational approximation of one α.
    Farey {
        #[arg(long)]
        order: Option<u64>,
        /// α for the scaled approximation mode.
        #[arg(long)]
        approx: Option<String>,
        #[arg(long, default_value_t = 0)]
        mu: u32,
        #[arg(long, default_value_t = 4)]
        sigma: u32,
    },
    /// Summed worst-case progression deviation over d ∈ (D, 2D], D = x^e.
    BvAp {
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 0.55)]
        d_exponent: f64,
        #[arg(long, default_value = "01")]
        word: String,
        #[arg(long, default_value_t = 3)]
        j_grid_shift: u32,
        /// Window lengths as fractions of x, comma-separated.
        #[arg(long, default_value = "1.0")]
        window_fractions: String,
    },
    /// Integrated worst-case Beatty deviation over α ∈ [D, 2D], D = x^e.
    BvBeatty {
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 0.55)]
        d_exponent: f64,
        #[arg(long, default_value = "01")]
        word: String,
        #[arg(long, default_value_t = 64)]
        grid: u32,
        #[arg(long, default_value_t = 8)]
        beta_samples: u32,
    },
    /// Direct exponential-sum evaluation over moduli d ∈ [D, 2D) (or the
    /// Beatty quadrature analogue with --beatty).
    S1 {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 0.0)]
        xi: f64,
        #[arg(long, default_value = "1")]
        pattern: String,
        #[arg(long, default_value_t = 64)]
        dense: u64,
        #[arg(long, default_value_t = 32)]
        extra: u32,
        #[arg(long, default_value_t = false)]
        beatty: bool,
        #[arg(long, default_value_t = 32)]
        grid: u32,
        #[arg(long, default_value_t = 8)]
        beta_samples: u32,
    },
    /// Run the lemma-checker suites.
    Lemmas {
        /// `all` or any of: vdc, carry, correlation, fracfacts, farey,
        /// discrepancy, fourier, saving, approx.
        #[arg(long, default_value = "all", value_delimiter = ',')]
        suite: Vec<String>,
        #[arg(long, value_enum, default_value_t = lemmas::Budget::Small)]
        budget: lemmas::Budget,
    },
}

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    Lib(tmps::Error),
    Io(std::io::Error),
    Parse(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::Parse(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl From<tmps::Error> for CliError {
    fn from(e: tmps::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Parse(_) => 2,
        CliError::Lib(tmps::Error::InvalidParameter(_)) => 2,
        CliError::Lib(tmps::Error::BudgetExceeded(_)) => 3,
        CliError::Lib(tmps::Error::PrecisionExhausted { .. }) => 4,
        CliError::Io(_) => 1,
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_cover_every_error_class() {
        assert_eq!(exit_code(&CliError::Parse("x".into())), 2);
        assert_eq!(
            exit_code(&CliError::Lib(tmps::Error::InvalidParameter("x".into()))),
            2
        );
        assert_eq!(
            exit_code(&CliError::Lib(tmps::Error::BudgetExceeded("x".into()))),
            3
        );
        assert_eq!(
            exit_code(&CliError::Lib(tmps::Error::PrecisionExhausted { bits: 4096 })),
            4
        );
        assert_eq!(
            exit_code(&CliError::Io(std::io::Error::other(
                "x"
            ))),
            1
        );
    }

    #[test]
    fn rational_parser_accepts_all_forms() {
        assert_eq!(parse_rational("7/5").unwrap(), rat_check(7, 5));
        assert_eq!(parse_rational("1.25").unwrap(), rat_check(5, 4));
        assert_eq!(parse_rational("-3").unwrap(), rat_check(-3, 1));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_real("sqrt(2)").is_ok());
    }

    fn rat_check(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }
}

// ---------------------------------------------------------------------------
// Shared run context
// ---------------------------------------------------------------------------

struct Ctx {
    seed: u64,
    threads: usize,
    output: Option<std::path::PathBuf>,
    format: Format,
    started: Instant,
}

impl Ctx {
    fn emit<C: Serialize, R: Serialize + CsvRows>(
        &self,
        command: &'static str,
        config: C,
        results: R,
    ) -> Result<(), CliError> {
        let env = Envelope {
            command,
            version: VERSION,
            config,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            results,
        };
        let bytes = match self.format {
            Format::Json => to_json_bytes(&env)?,
            Format::Csv => to_csv_bytes(&env)?,
        };
        match &self.output {
            Some(path) => std::fs::write(path, bytes)?,
            None => std::io::stdout().write_all(&bytes)?,
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("TMPS_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if threads > 0 {
        // Ignore the error when a pool already exists (tests call run twice).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let ctx = Ctx {
        seed: cli.seed,
        threads,
        output: cli.output.clone(),
        format: cli.format,
        started: Instant::now(),
    };
    dispatch(cli.command, &ctx)
}

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

fn parse_exponent(s: &str) -> Result<ExponentSpec, CliError> {
    ExponentSpec::parse(s).map_err(CliError::from)
}

fn parse_word(s: &str) -> Result<Word, CliError> {
    Word::parse(s).map_err(CliError::from)
}

fn parse_checkpoints(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|part| {
            let v: f64 = part
                .trim()
                .parse()
                .map_err(|_| CliError::Parse(format!("bad checkpoint {part:?}")))?;
            if !v.is_finite() || !(1.0..=1e18).contains(&v) || v.fract() != 0.0 {
                return Err(CliError::Parse(format!("bad checkpoint {part:?}")));
            }
            Ok(v as u64)
        })
        .collect()
}

fn parse_fractions(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Parse(format!("bad fraction {part:?}")))
        })
        .collect()
}

/// Accepts `p/q`, decimal literals, and `sqrt(k)`.
fn parse_real(s: &str) -> Result<Real, CliError> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|t| t.strip_suffix(')')) {
        let k: u64 = inner
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("bad sqrt argument {inner:?}")))?;
        return Real::sqrt(k).map_err(CliError::from);
    }
    parse_rational(s).map(Real::from_rational)
}

fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::Parse(format!("bad rational {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = if let Some((p, q)) = body.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        BigRational::new(p, q)
    } else if let Some((int, frac)) = body.split_once('.') {
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let joined: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let mut den = BigInt::from(1);
        for _ in 0..frac.len() {
            den *= 10;
        }
        BigRational::new(joined, den)
    } else {
        let p: BigInt = body.trim().parse().map_err(|_| bad())?;
        BigRational::from_integer(p)
    };
    Ok(if neg { -value } else { value })
}

// ---------------------------------------------------------------------------
// Per-command configs and results
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CommonConfig {
    seed: u64,
    threads: usize,
}

macro_rules! impl_rows {
    ($ty:ty, $headers:expr, |$self_:ident| $rows:expr) => {
        impl CsvRows for $ty {
            fn headers(&self) -> Vec<String> {
                $headers.iter().map(|s: &&str| s.to_string()).collect()
            }
            fn rows(&$self_) -> Vec<Vec<String>> {
                $rows
            }
        }
    };
}

#[derive(Serialize)]
struct SeqConfig {
    common: CommonConfig,
    c: String,
    start: u64,
    count: u64,
}

#[derive(Serialize)]
struct SeqResult {
    rows: Vec<(u64, String, u8)>,
}

impl_rows!(SeqResult, ["n", "floor_pow", "t"], |self| self
    .rows
    .iter()
    .map(|(n, f, t)| vec![n.to_string(), f.clone(), t.to_string()])
    .collect());

#[derive(Serialize)]
struct BlocksConfig {
    common: CommonConfig,
    c: String,
    n: u64,
    word_len: u8,
}

#[derive(Serialize)]
struct BlocksResult {
    total: u64,
    max_dev: f64,
    rows: Vec<(String, u64, f64)>,
}

impl_rows!(BlocksResult, ["word", "count", "deviation"], |self| self
    .rows
    .iter()
    .map(|(w, c, d)| vec![w.clone(), c.to_string(), fmt_f64(*d)])
    .collect());

#[derive(Serialize)]
struct NormalityConfig {
    common: CommonConfig,
    c: String,
    word_len: u8,
    checkpoints: Vec<u64>,
}

#[derive(Serialize)]
struct NormalityResult {
    report: NormalityReport,
}

impl_rows!(NormalityResult, ["n", "max_dev", "slope"], |self| self
    .report
    .rows
    .iter()
    .map(|(n, d)| vec![n.to_string(), fmt_f64(*d), fmt_f64(self.report.slope)])
    .collect());

#[derive(Serialize)]
struct FourierCheckConfig {
    common: CommonConfig,
    instances: u64,
    max_lambda: u32,
    max_window: usize,
    max_offset: u64,
    tolerance: f64,
}

#[derive(Serialize)]
struct FourierCheckResult {
    max_entry_error: f64,
    max_parseval_error: f64,
    all_ok: bool,
    rows: Vec<(u32, u64, usize, u64, f64, f64)>,
}

impl_rows!(
    FourierCheckResult,
    ["lambda", "d", "window_len", "offset", "entry_error", "parseval_error"],
    |self| self
        .rows
        .iter()
        .map(|(l, d, w, r, e, p)| vec![
            l.to_string(),
            d.to_string(),
            w.to_string(),
            r.to_string(),
            fmt_f64(*e),
            fmt_f64(*p)
        ])
        .collect()
);

#[derive(Serialize)]
struct CensusGoodConfig {
    common: CommonConfig,
    lambda: u32,
    x: u32,
    m: u32,
    odd_part: u64,
    r: u64,
    random_profile: bool,
}

#[derive(Serialize)]
struct CensusGoodResult {
    a2: Vec<u32>,
    total: u64,
    total_expected: u64,
    all_match: bool,
    rows: Vec<(String, u64, String, bool)>,
}

impl_rows!(
    CensusGoodResult,
    ["subset", "count", "formula", "matches"],
    |self| self
        .rows
        .iter()
        .map(|(s, c, f, m)| vec![s.clone(), c.to_string(), f.clone(), m.to_string()])
        .collect()
);

#[derive(Serialize)]
struct DiscrepancyConfig {
    common: CommonConfig,
    alpha: Option<String>,
    n: u64,
    profile_mu: Option<u32>,
    geometric_m: Option<u64>,
    integral_grid: Option<u32>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum DiscrepancyResult {
    Single {
        value: f64,
        exact: String,
    },
    Profile {
        report: tmps::beatty::MeanDiscrepancyReport,
    },
    Integral {
        report: tmps::beatty::IntegralDiscrepancyReport,
    },
}

impl CsvRows for DiscrepancyResult {
    fn headers(&self) -> Vec<String> {
        match self {
            DiscrepancyResult::Single { .. } => vec!["value".into(), "exact".into()],
            DiscrepancyResult::Profile { .. } => {
                vec!["mu".into(), "n".into(), "sum".into(), "normalized".into()]
            }
            DiscrepancyResult::Integral { .. } => {
                vec!["n".into(), "grid".into(), "value".into(), "normalized".into()]
            }
        }
    }
    fn rows(&self) -> Vec<Vec<String>> {
        match self {
            DiscrepancyResult::Single { value, exact } => {
                vec![vec![fmt_f64(*value), exact.clone()]]
            }
            DiscrepancyResult::Profile { report } => vec![vec![
                report.mu.to_string(),
                report.n.to_string(),
                fmt_f64(report.sum),
                fmt_f64(report.normalized),
            ]],
            DiscrepancyResult::Integral { report } => vec![vec![
                report.n.to_string(),
                report.grid.to_string(),
                fmt_f64(report.value),
                fmt_f64(report.normalized),
            ]],
        }
    }
}

#[derive(Serialize)]
struct FareyConfig {
    common: CommonConfig,
    order: Option<u64>,
    approx: Option<String>,
    mu: u32,
    sigma: u32,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FareyResult {
    Pairs {
        order: u64,
        pair_count: u64,
        all_hold: bool,
    },
    Approx {
        p: u64,
        q: u64,
        error: f64,
        bound: f64,
        holds: bool,
    },
}

impl CsvRows for FareyResult {
    fn headers(&self) -> Vec<String> {
        match self {
            FareyResult::Pairs { .. } => {
                vec!["order".into(), "pair_count".into(), "all_hold".into()]
            }
            FareyResult::Approx { .. } => vec![
                "p".into(),
                "q".into(),
                "error".into(),
                "bound".into(),
                "holds".into(),
            ],
        }
    }
    fn rows(&self) -> Vec<Vec<String>> {
        match self {
            FareyResult::Pairs {
                order,
                pair_count,
                all_hold,
            } => vec![vec![
                order.to_string(),
                pair_count.to_string(),
                all_hold.to_string(),
            ]],
            FareyResult::Approx {
                p,
                q,
                error,
                bound,
                holds,
            } => vec![vec![
                p.to_string(),
                q.to_string(),
                fmt_f64(*error),
                fmt_f64(*bound),
                holds.to_string(),
            ]],
        }
    }
}

#[derive(Serialize)]
struct BvConfig {
    common: CommonConfig,
    x: u64,
    d_exponent: f64,
    d_lo: f64,
    word: String,
    policy: tmps::census::SamplingPolicy,
}

#[derive(Serialize)]
struct BvResult {
    report: AverageReport,
}

impl_rows!(BvResult, ["modulus", "deviation", "aggregate", "normalized"], |self| self
    .report
    .per_modulus
    .iter()
    .map(|(m, v)| vec![
        fmt_f64(*m),
        fmt_f64(*v),
        fmt_f64(self.report.aggregate),
        fmt_f64(self.report.normalized)
    ])
    .collect());

#[derive(Serialize)]
struct S1Config {
    common: CommonConfig,
    n: u64,
    d: f64,
    xi: f64,
    pattern: String,
    beatty: bool,
    j_policy: JPolicy,
    grid: u32,
    beta_samples: u32,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum S1Result {
    Progression { report: S1Report },
    Beatty { report: S1BeattyReport },
}

impl CsvRows for S1Result {
    fn headers(&self) -> Vec<String> {
        match self {
            S1Result::Progression { .. } => {
                vec!["dense_cap".into(), "curve_value".into(), "value".into(), "normalized".into()]
            }
            S1Result::Beatty { .. } => vec!["value".into(), "normalized".into()],
        }
    }
    fn rows(&self) -> Vec<Vec<String>> {
        match self {
            S1Result::Progression { report } => report
                .curve
                .iter()
                .map(|(cap, v)| {
                    vec![
                        cap.to_string(),
                        fmt_f64(*v),
                        fmt_f64(report.value),
                        fmt_f64(report.normalized),
                    ]
                })
                .collect(),
            S1Result::Beatty { report } => {
                vec![vec![fmt_f64(report.value), fmt_f64(report.normalized)]]
            }
        }
    }
}

#[derive(Serialize)]
struct LemmasConfig {
    common: CommonConfig,
    suite: Vec<String>,
    budget: String,
}

#[derive(Serialize)]
struct LemmasResult {
    all_hold: bool,
    outcomes: Vec<lemmas::LemmaOutcome>,
}

impl_rows!(LemmasResult, ["name", "cases", "failures", "holds", "note"], |self| self
    .outcomes
    .iter()
    .map(|o| vec![
        o.name.clone(),
        o.cases.to_string(),
        o.failures.to_string(),
        o.holds.to_string(),
        o.note.clone()
    ])
    .collect());

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn dispatch(command: Command, ctx: &Ctx) -> Result<(), CliError> {
    let common = CommonConfig {
        seed: ctx.seed,
        threads: ctx.threads,
    };
    match command {
        Command::Seq { c, count, start } => {
            let spec = parse_exponent(&c)?;
            if count > 10_000_000 {
                return Err(CliError::Lib(tmps::Error::BudgetExceeded(
                    "seq is capped at 10^7 terms".into(),
                )));
            }
            let end = start
                .checked_add(count)
                .ok_or_else(|| CliError::Parse("start + count overflows".into()))?;
            let mut rows = Vec::new();
            for n in start..end {
                let f = floor_power(n, &spec)?;
                rows.push((n, f.to_string(), tmps::digits::thue_morse_u128(f)));
            }
            ctx.emit(
                "seq",
                SeqConfig {
                    common,
                    c: spec.to_string(),
                    start,
                    count,
                },
                SeqResult { rows },
            )
        }
        Command::Blocks { c, n, word_len } => {
            let spec = parse_exponent(&c)?;
            let report = block_count_ps(n, &spec, word_len)?;
            let rows = Word::all_of_len(word_len)
                .map(|w| (w.to_string(), report.count(w), report.deviation(w)))
                .collect();
            ctx.emit(
                "blocks",
                BlocksConfig {
                    common,
                    c: spec.to_string(),
                    n,
                    word_len,
                },
                BlocksResult {
                    total: report.total,
                    max_dev: report.max_dev,
                    rows,
                },
            )
        }
        Command::Normality {
            c,
            word_len,
            checkpoints,
        } => {
            let spec = parse_exponent(&c)?;
            let cps = parse_checkpoints(&checkpoints)?;
            let report = normality_report(&spec, word_len, &cps)?;
            ctx.emit(
                "normality",
                NormalityConfig {
                    common,
                    c: spec.to_string(),
                    word_len,
                    checkpoints: cps,
                },
                NormalityResult { report },
            )
        }
        Command::FourierCheck {
            instances,
            max_lambda,
            max_window,
            max_offset,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let mut rows = Vec::new();
            let mut max_entry_error = 0f64;
            let mut max_parseval_error = 0f64;
            for _ in 0..instances {
                let lambda = rng.gen_range(0..=max_lambda);
                let l = rng.gen_range(1..=max_window);
                let r = rng.gen_range(l as u64..=max_offset.max(l as u64));
                let mut bits = vec![true];
                for _ in 1..l {
                    bits.push(rng.gen_bool(0.5));
                }
                let block = CoeffBlock::new(bits, r)?;
                let profile = ShiftProfile::sample(&mut rng, l, r);
                let d = rng.gen_range(0..(1u64 << lambda.max(1)));
                let coeffs = block.coeffs();
                let direct = fourier_direct(lambda, &profile, &coeffs, d)?;
                let rec = fourier_recursive(lambda, &profile, &coeffs, d)?;
                let entry_err = (0..(1u64 << lambda))
                    .map(|h| (direct.entry(h) - rec.entry(h)).norm())
                    .fold(0.0, f64::max);
                let parseval_err = (direct.parseval_sum() - 1.0).abs();
                max_entry_error = max_entry_error.max(entry_err);
                max_parseval_error = max_parseval_error.max(parseval_err);
                rows.push((lambda, d, l, r, entry_err, parseval_err));
            }
            let all_ok = max_entry_error < tmps::fourier::TABLE_TOLERANCE
                && max_parseval_error < tmps::fourier::TABLE_TOLERANCE;
            ctx.emit(
                "fourier-check",
                FourierCheckConfig {
                    common,
                    instances,
                    max_lambda,
                    max_window,
                    max_offset,
                    tolerance: tmps::fourier::TABLE_TOLERANCE,
                },
                FourierCheckResult {
                    max_entry_error,
                    max_parseval_error,
                    all_ok,
                    rows,
                },
            )
        }
        Command::CensusGood {
            lambda,
            x,
            m,
            odd_part,
            random_profile,
        } => {
            if odd_part % 2 == 0 {
                return Err(CliError::Parse("odd_part must be odd".into()));
            }
            let r = odd_part
                .checked_shl(x)
                .ok_or_else(|| CliError::Parse("r = odd_part·2^x overflows".into()))?;
            let profile = if random_profile {
                let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
                ShiftProfile::sample(&mut rng, 1, r)
            } else {
                ShiftProfile::zero(1, r).map_err(CliError::from)?
            };
            let all = good_set_census_all(lambda, m, &profile)?;
            let (_, a2) = type_sets(lambda, x, m);
            let mut rows = Vec::new();
            let mut total = 0u64;
            let mut all_match = true;
            for (subset, count) in &all {
                let formula = good_census_formula(lambda, x, m, subset.len() as u32);
                let matches = num_bigint::BigUint::from(*count) == formula;
                all_match &= matches;
                total += count;
                rows.push((
                    format!("{subset:?}"),
                    *count,
                    formula.to_string(),
                    matches,
                ));
            }
            ctx.emit(
                "census-good",
                CensusGoodConfig {
                    common,
                    lambda,
                    x,
                    m,
                    odd_part,
                    r,
                    random_profile,
                },
                CensusGoodResult {
                    a2,
                    total,
                    total_expected: 1u64 << lambda,
                    all_match: all_match && total == 1u64 << lambda,
                    rows,
                },
            )
        }
        Command::Discrepancy {
            alpha,
            n,
            profile_mu,
            geometric_m,
            integral_grid,
        } => {
            let config = DiscrepancyConfig {
                common,
                alpha: alpha.clone(),
                n,
                profile_mu,
                geometric_m,
                integral_grid,
            };
            let result = if let Some(grid) = integral_grid {
                DiscrepancyResult::Integral {
                    report: mean_discrepancy_integral(n, grid)?,
                }
            } else if let Some(mu) = profile_mu {
                DiscrepancyResult::Profile {
                    report: mean_discrepancy_profile(mu, n, geometric_m)?,
                }
            } else {
                let alpha = alpha
                    .ok_or_else(|| CliError::Parse("need --alpha or --profile-mu".into()))?;
                if n < 1 || n > 1 << 24 {
                    return Err(CliError::Parse("discrepancy needs 1 <= n <= 2^24".into()));
                }
                let alpha = parse_rational(&alpha)?;
                let d = discrepancy(&alpha, n);
                DiscrepancyResult::Single {
                    value: tmps::real::rational_to_f64(&d),
                    exact: d.to_string(),
                }
            };
            ctx.emit("discrepancy", config, result)
        }
        Command::Farey {
            order,
            approx,
            mu,
            sigma,
        } => {
            let config = FareyConfig {
                common,
                order,
                approx: approx.clone(),
                mu,
                sigma,
            };
            let result = if let Some(alpha) = approx {
                let alpha = parse_real(&alpha)?;
                let fa = farey_approx_scaled(&alpha, mu, sigma)?;
                let err = fa.dissection_error(&alpha);
                let error = err.to_f64().abs();
                let bound = 0.5f64.powi(sigma as i32);
                FareyResult::Approx {
                    p: fa.p,
                    q: fa.q,
                    error,
                    bound,
                    holds: error < bound,
                }
            } else {
                let order =
                    order.ok_or_else(|| CliError::Parse("need --order or --approx".into()))?;
                if !(1..=100_000).contains(&order) {
                    return Err(CliError::Parse("farey order must be in 1..=10^5".into()));
                }
                let mut all_hold = true;
                let pairs = farey_neighbors(order);
                for (l, r) in &pairs {
                    let uni = l.den as i128 * r.num as i128 - l.num as i128 * r.den as i128;
                    all_hold &= uni == 1 && l.den + r.den > order;
                }
                FareyResult::Pairs {
                    order,
                    pair_count: pairs.len() as u64,
                    all_hold,
                }
            };
            ctx.emit("farey", config, result)
        }
        Command::BvAp {
            x,
            d_exponent,
            word,
            j_grid_shift,
            window_fractions,
        } => {
            let omega = parse_word(&word)?;
            let d_lo = (x as f64).powf(d_exponent);
            let policy = ApSamplingPolicy {
                window_fractions: parse_fractions(&window_fractions)?,
                y_values: vec![0.0],
                j_grid_shift,
            };
            let report = ap_average_deviation(x, d_lo, omega, &policy)?;
            ctx.emit(
                "bv-ap",
                BvConfig {
                    common,
                    x,
                    d_exponent,
                    d_lo,
                    word,
                    policy: tmps::census::SamplingPolicy::Ap(policy),
                },
                BvResult { report },
            )
        }
        Command::BvBeatty {
            x,
            d_exponent,
            word,
            grid,
            beta_samples,
        } => {
            let omega = parse_word(&word)?;
            let d_lo = (x as f64).powf(d_exponent);
            let policy = BeattySamplingPolicy {
                window_fractions: vec![1.0],
                y_values: vec![0.0],
                beta_samples,
            };
            let report = beatty_average_deviation(x, d_lo, omega, grid, &policy)?;
            ctx.emit(
                "bv-beatty",
                BvConfig {
                    common,
                    x,
                    d_exponent,
                    d_lo,
                    word,
                    policy: tmps::census::SamplingPolicy::Beatty(policy),
                },
                BvResult { report },
            )
        }
        Command::S1 {
            n,
            d,
            xi,
            pattern,
            dense,
            extra,
            beatty,
            grid,
            beta_samples,
        } => {
            let bits: Vec<bool> = pattern
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(CliError::Parse(format!("bad pattern {pattern:?}"))),
                })
                .collect::<Result<_, _>>()?;
            let mut params = SumParams::new(n, d, xi, bits)?;
            params.j_policy = JPolicy {
                dense,
                random_extra: extra,
                cap: None,
                seed: ctx.seed,
            };
            let config = S1Config {
                common,
                n,
                d,
                xi,
                pattern,
                beatty,
                j_policy: params.j_policy.clone(),
                grid,
                beta_samples,
            };
            let result = if beatty {
                S1Result::Beatty {
                    report: s1_beatty_direct(&params, grid, beta_samples)?,
                }
            } else {
                S1Result::Progression {
                    report: s1_direct(&params)?,
                }
            };
            ctx.emit("s1", config, result)
        }
        Command::Lemmas { suite, budget } => {
            let outcomes = lemmas::run_suite(&suite, budget, ctx.seed)?;
            let all_hold = outcomes.iter().all(|o| o.holds);
            ctx.emit(
                "lemmas",
                LemmasConfig {
                    common,
                    suite,
                    budget: format!("{budget:?}").to_lowercase(),
                },
                LemmasResult { all_hold, outcomes },
            )
        }
    }
}
