//! Block-occurrence counting and distribution averages.
//!
//! `block_count_*` counts occurrences of a binary pattern in the Thue-Morse
//! values along an arithmetic progression, a Beatty sequence, or `⌊n^c⌋`.
//! On top of those sit the average experiments: the summed worst-case
//! deviation over moduli `d ∈ (D, 2D]`, its Beatty-integral analogue, and
//! the block-frequency census with its decay trend.
//!
//! The suprema over all windows `[y, z)` and shifts `j` (or `β`) in the
//! average experiments are not finitely computable; they are replaced by
//! documented sampling grids carried inside each report, so runs are
//! reproducible from the report alone.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::beatty::BeattyParams;
use crate::digits::{sum_digits_big, thue_morse, thue_morse_u128, Word};
use crate::error::{Error, Result};
use crate::powerfloor::{floor_power, ExponentSpec};

/// Occurrence counts of every word of one length, with deviations from the
/// uniform frequency `2^{-L}`.
#[derive(Debug, Clone, Serialize)]
pub struct FreqReport {
    pub word_len: u8,
    pub total: u64,
    /// `counts[w]` for the word whose bit `k` is `(w >> k) & 1`.
    pub counts: Vec<u64>,
    /// `|counts[w]/total - 2^-L|` per word, same indexing as `counts`.
    pub deviations: Vec<f64>,
    pub max_dev: f64,
}

impl FreqReport {
    pub fn from_counts(word_len: u8, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), 1 << word_len);
        let total: u64 = counts.iter().sum();
        let expect = 0.5f64.powi(word_len as i32);
        let deviations: Vec<f64> = counts
            .iter()
            .map(|&c| {
                if total == 0 {
                    0.0
                } else {
                    (c as f64 / total as f64 - expect).abs()
                }
            })
            .collect();
        let max_dev = deviations.iter().copied().fold(0.0, f64::max);
        FreqReport {
            word_len,
            total,
            counts,
            deviations,
            max_dev,
        }
    }

    pub fn count(&self, w: Word) -> u64 {
        assert_eq!(w.len(), self.word_len);
        self.counts[w.bits() as usize]
    }

    /// `|count/total - 2^{-L}|`.
    pub fn deviation(&self, w: Word) -> f64 {
        let expect = 0.5f64.powi(self.word_len as i32);
        (self.count(w) as f64 / self.total as f64 - expect).abs()
    }
}

fn max_deviation(counts: &[u64], total: u64, word_len: u8) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let expect = 0.5f64.powi(word_len as i32);
    counts
        .iter()
        .map(|&c| (c as f64 / total as f64 - expect).abs())
        .fold(0.0, f64::max)
}

/// Counter tables hold 2^L entries; 24 caps them at 16M counters.
fn check_word_len(word_len: u8) -> Result<()> {
    if word_len < 1 || word_len > 24 {
        return Err(Error::invalid(format!(
            "word length must be in 1..=24, got {word_len}"
        )));
    }
    Ok(())
}

fn f64_to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::invalid(format!("non-finite bound {x}")))
}

// ---------------------------------------------------------------------------
// Beatty-sequence block counting
// ---------------------------------------------------------------------------

/// Exact count of `y <= m < z` such that `m = ⌊nα+β⌋` for some `n` and the
/// digit-sum parities of the next `L` Beatty terms spell out `omega`.
///
/// Requires `α >= 1`, which makes `n ↦ ⌊nα+β⌋` strictly increasing, so
/// each represented `m` corresponds to exactly one `n`.
pub fn block_count_beatty(y: f64, z: f64, bp: &BeattyParams, omega: Word) -> Result<u64> {
    if !(0.0 <= y && y <= z) {
        return Err(Error::invalid("block_count_beatty needs 0 <= y <= z"));
    }
    if bp.alpha.cmp_rational(&BigRational::from_integer(BigInt::from(1)))?
        == std::cmp::Ordering::Less
    {
        return Err(Error::invalid("block_count_beatty needs alpha >= 1"));
    }
    if let (Some(a), Some(b)) = (bp.alpha.as_rational(), bp.beta.as_rational()) {
        if let Some(fast) = RationalBeatty::try_new(a, b) {
            return block_count_beatty_fast(y, z, &fast, omega);
        }
    }
    block_count_beatty_general(y, z, bp, omega)
}

use crate::beatty::RationalBeatty;

fn block_count_beatty_fast(y: f64, z: f64, fb: &RationalBeatty, omega: Word) -> Result<u64> {
    let l = omega.len() as u64;
    let y_ceil = y.ceil() as u128;
    // First n with term(n) >= y_ceil, by binary search on monotonicity.
    let mut lo = 0u64;
    let mut hi = 1u64;
    while fb.term(hi) < y_ceil && hi < RationalBeatty::MAX_N / 2 {
        hi *= 2;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if fb.term(mid) >= y_ceil {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mut count = 0u64;
    let mut n = lo;
    loop {
        let m = fb.term(n);
        if (m as f64) >= z {
            break;
        }
        if (m as f64) >= y {
            let mut ok = true;
            for k in 0..l {
                let t = thue_morse_u128(fb.term(n + k));
                if t != omega.bit(k as u8) {
                    ok = false;
                    break;
                }
            }
            if ok {
                count += 1;
            }
        }
        n += 1;
    }
    Ok(count)
}

fn block_count_beatty_general(y: f64, z: f64, bp: &BeattyParams, omega: Word) -> Result<u64> {
    let l = omega.len() as u64;
    let y_rat = f64_to_rational(y)?;
    let z_rat = f64_to_rational(z)?;
    let mut count = 0u64;
    let mut n = 0u64;
    // alpha >= 1 bounds the scan length by z - y + O(1) terms.
    loop {
        let m = crate::beatty::beatty_term(n, bp)?;
        let m_rat = BigRational::from_integer(m.clone());
        if m_rat >= z_rat {
            break;
        }
        if m_rat >= y_rat {
            let mut ok = true;
            for k in 0..l {
                let term = crate::beatty::beatty_term(n + k, bp)?;
                let mag: BigUint = term
                    .to_biguint()
                    .ok_or_else(|| Error::invalid("negative Beatty term in block count"))?;
                let t = (sum_digits_big(&mag) & 1) as u8;
                if t != omega.bit(k as u8) {
                    ok = false;
                    break;
                }
            }
            if ok {
                count += 1;
            }
        }
        n += 1;
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Arithmetic-progression block counting
// ---------------------------------------------------------------------------

/// `|{m < y : s(m) ≡ 0 (mod 2), m ≡ j (mod d)}|`.
pub fn block_count_ap(y: f64, d: u64, j: u64) -> u64 {
    assert!(d >= 1);
    let mut count = 0u64;
    let mut m = j % d;
    while (m as f64) < y {
        if thue_morse(m) == 0 {
            count += 1;
        }
        m += d;
    }
    count
}

/// The word-level progression count `A_ω(y, z; d, j)`: the number of
/// `m ∈ [y, z)` of the form `m = nd + j` whose `L` successor terms on the
/// progression carry Thue-Morse values `omega`.
pub fn block_count_ap_word(y: f64, z: f64, d: u64, j: u64, omega: Word) -> u64 {
    assert!(d >= 1 && 0.0 <= y && y <= z);
    let l = omega.len() as i64;
    let d_i = d as i64;
    let j_i = j as i64;
    // n with y <= nd + j < z
    let n_lo = ((y - j as f64) / d as f64).ceil() as i64;
    let mut count = 0u64;
    let mut n = n_lo;
    loop {
        let m = n * d_i + j_i;
        if (m as f64) >= z {
            break;
        }
        if (m as f64) >= y {
            let mut ok = true;
            for k in 0..l {
                let arg = (n + k) * d_i + j_i;
                debug_assert!(arg >= 0);
                if thue_morse(arg as u64) != omega.bit(k as u8) {
                    ok = false;
                    break;
                }
            }
            if ok {
                count += 1;
            }
        }
        n += 1;
    }
    count
}

// ---------------------------------------------------------------------------
// Power-floor block census
// ---------------------------------------------------------------------------

/// `u(n) = t(⌊n^c⌋)`.
pub fn ps_term(n: u64, c: &ExponentSpec) -> Result<u8> {
    Ok(thue_morse_u128(floor_power(n, c)?))
}

/// Window counts of all `2^L` words over `n ∈ range`, where the window at
/// `n` reads `u(n), …, u(n+L-1)`.
pub fn ps_window_counts(
    range: std::ops::Range<u64>,
    c: &ExponentSpec,
    word_len: u8,
) -> Result<Vec<u64>> {
    check_word_len(word_len)?;
    let l = word_len as u64;
    let size = 1usize << word_len;
    if range.is_empty() {
        return Ok(vec![0; size]);
    }
    let chunk: u64 = 1 << 16;
    let starts: Vec<u64> = (range.start..range.end).step_by(chunk as usize).collect();
    let partials: Vec<Result<Vec<u64>>> = starts
        .par_iter()
        .map(|&s| {
            let e = (s + chunk).min(range.end);
            let mut counts = vec![0u64; size];
            // Seed the first L-1 window bits, then slide.
            let mut window: u32 = 0;
            for k in 0..l - 1 {
                window |= u32::from(ps_term(s + k, c)?) << k;
            }
            for n in s..e {
                let full = window | (u32::from(ps_term(n + l - 1, c)?) << (l - 1));
                counts[full as usize] += 1;
                window = full >> 1;
            }
            Ok(counts)
        })
        .collect();
    let mut total = vec![0u64; size];
    for p in partials {
        let p = p?;
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    Ok(total)
}

/// Full block census of `n ↦ t(⌊n^c⌋)` for `n < n_limit`: one pass over the
/// sequence counting all `2^L` windows at once.
pub fn block_count_ps(n_limit: u64, c: &ExponentSpec, word_len: u8) -> Result<FreqReport> {
    if n_limit > 100_000_000 {
        return Err(Error::BudgetExceeded(
            "block census capped at N = 10^8".into(),
        ));
    }
    let counts = ps_window_counts(0..n_limit, c, word_len)?;
    Ok(FreqReport::from_counts(word_len, counts))
}

// ---------------------------------------------------------------------------
// Average experiments
// ---------------------------------------------------------------------------

/// Sampling grid for the progression average: which windows `[y, y+w)` and
/// which shifts `j` stand in for the unbounded maxima.
#[derive(Debug, Clone, Serialize)]
pub struct ApSamplingPolicy {
    /// Window lengths as fractions of `x`; default `[1.0]`.
    pub window_fractions: Vec<f64>,
    /// Window left endpoints; default `[0.0]`.
    pub y_values: Vec<f64>,
    /// Shifts run over `j < d·2^{⌈log₂L⌉ + j_grid_shift}`; default 3.
    pub j_grid_shift: u32,
}

impl Default for ApSamplingPolicy {
    fn default() -> Self {
        ApSamplingPolicy {
            window_fractions: vec![1.0],
            y_values: vec![0.0],
            j_grid_shift: 3,
        }
    }
}

/// Sampling grid for the Beatty average.
#[derive(Debug, Clone, Serialize)]
pub struct BeattySamplingPolicy {
    pub window_fractions: Vec<f64>,
    pub y_values: Vec<f64>,
    /// `β` runs over `k·α/beta_samples` for `k < beta_samples`; default 8.
    pub beta_samples: u32,
}

impl Default for BeattySamplingPolicy {
    fn default() -> Self {
        BeattySamplingPolicy {
            window_fractions: vec![1.0],
            y_values: vec![0.0],
            beta_samples: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplingPolicy {
    Ap(ApSamplingPolicy),
    Beatty(BeattySamplingPolicy),
}

/// Summed (or integrated) worst-case deviation over a dyadic modulus range,
/// together with the per-modulus data and the sampling policy that stood in
/// for the unbounded maxima.
#[derive(Debug, Clone, Serialize)]
pub struct AverageReport {
    pub x: u64,
    pub d_lo: f64,
    pub d_hi: f64,
    pub word: String,
    /// Sum over moduli (progressions) or midpoint-rule integral (Beatty).
    pub aggregate: f64,
    /// `aggregate / x`, the decay-trend statistic.
    pub normalized: f64,
    pub per_modulus: Vec<(f64, f64)>,
    pub policy: SamplingPolicy,
}

/// `Σ_{D<d<=2D} max_{sampled y,z,j} |A_ω(y,z;d,j) - (z-y)/(2^L d)|`.
pub fn ap_average_deviation(
    x: u64,
    d_lo: f64,
    omega: Word,
    policy: &ApSamplingPolicy,
) -> Result<AverageReport> {
    if x > 1_000_000 {
        return Err(Error::BudgetExceeded("ap average capped at x = 10^6".into()));
    }
    if d_lo < 1.0 || !d_lo.is_finite() || d_lo > x as f64 {
        return Err(Error::invalid("ap average needs 1 <= D <= x"));
    }
    let l = omega.len();
    let d_first = d_lo.floor() as u64 + 1;
    let d_last = (2.0 * d_lo).floor() as u64;
    let j_factor = 1u64 << (l.next_power_of_two().trailing_zeros() + policy.j_grid_shift);
    let moduli: Vec<u64> = (d_first..=d_last).collect();
    let per: Vec<(f64, f64)> = moduli
        .par_iter()
        .map(|&d| {
            let mut worst = 0f64;
            for &frac in &policy.window_fractions {
                for &y in &policy.y_values {
                    let z = y + frac * x as f64;
                    let expect = (z - y) / (2f64.powi(l as i32) * d as f64);
                    for j in 0..d.saturating_mul(j_factor) {
                        let count = block_count_ap_word(y, z, d, j, omega);
                        worst = worst.max((count as f64 - expect).abs());
                    }
                }
            }
            (d as f64, worst)
        })
        .collect();
    let aggregate: f64 = per.iter().map(|&(_, v)| v).sum();
    Ok(AverageReport {
        x,
        d_lo,
        d_hi: 2.0 * d_lo,
        word: omega.to_string(),
        aggregate,
        normalized: aggregate / x as f64,
        per_modulus: per,
        policy: SamplingPolicy::Ap(policy.clone()),
    })
}

/// Midpoint-rule approximation of
/// `∫_D^{2D} max_{sampled y,z,β} |A_ω(y,z;α,β) - (z-y)/(2^L α)| dα`
/// on a grid of exact rational `α` samples.
pub fn beatty_average_deviation(
    x: u64,
    d_lo: f64,
    omega: Word,
    grid: u32,
    policy: &BeattySamplingPolicy,
) -> Result<AverageReport> {
    if x > 1_000_000 {
        return Err(Error::BudgetExceeded(
            "beatty average capped at x = 10^6".into(),
        ));
    }
    if d_lo < 1.0 || d_lo > x as f64 || grid == 0 {
        return Err(Error::invalid("beatty average needs 1 <= D <= x and grid >= 1"));
    }
    let l = omega.len();
    let d_rat = f64_to_rational(d_lo)?;
    let step = &d_rat / BigRational::from_integer(BigInt::from(grid));
    let samples: Vec<u32> = (0..grid).collect();
    let per: Vec<Result<(f64, f64)>> = samples
        .par_iter()
        .map(|&g| {
            // alpha = D + (g + 1/2)·D/grid
            let alpha = &d_rat
                + &step * BigRational::new(BigInt::from(2 * g + 1), BigInt::from(2));
            let alpha_f = crate::real::rational_to_f64(&alpha);
            let mut worst = 0f64;
            for &frac in &policy.window_fractions {
                for &y in &policy.y_values {
                    let z = y + frac * x as f64;
                    let expect = (z - y) / (2f64.powi(l as i32) * alpha_f);
                    for k in 0..policy.beta_samples {
                        let beta = &alpha
                            * BigRational::new(BigInt::from(k), BigInt::from(policy.beta_samples));
                        let bp = BeattyParams::rational(alpha.clone(), beta);
                        let count = block_count_beatty(y, z, &bp, omega)?;
                        worst = worst.max((count as f64 - expect).abs());
                    }
                }
            }
            Ok((alpha_f, worst))
        })
        .collect();
    let mut per_modulus = Vec::with_capacity(per.len());
    for r in per {
        per_modulus.push(r?);
    }
    let width = d_lo / grid as f64;
    let aggregate: f64 = per_modulus.iter().map(|&(_, v)| v * width).sum();
    Ok(AverageReport {
        x,
        d_lo,
        d_hi: 2.0 * d_lo,
        word: omega.to_string(),
        aggregate,
        normalized: aggregate / x as f64,
        per_modulus,
        policy: SamplingPolicy::Beatty(policy.clone()),
    })
}

// ---------------------------------------------------------------------------
// Normality trend
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct NormalityReport {
    pub c: String,
    pub word_len: u8,
    /// `(N, max_dev)` per checkpoint.
    pub rows: Vec<(u64, f64)>,
    /// Least-squares slope of `ln max_dev` against `ln N`; an empirical
    /// stand-in for the decay exponent.
    pub slope: f64,
}

/// Runs the block census at each checkpoint in one cumulative pass and
/// fits the log-log decay slope.
pub fn normality_report(
    c: &ExponentSpec,
    word_len: u8,
    checkpoints: &[u64],
) -> Result<NormalityReport> {
    check_word_len(word_len)?;
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("checkpoints must be strictly increasing"));
    }
    let last = *checkpoints.last().unwrap();
    if last > 100_000_000 {
        return Err(Error::BudgetExceeded("census capped at N = 10^8".into()));
    }
    let size = 1usize << word_len;
    let mut cumulative = vec![0u64; size];
    let mut prev = 0u64;
    let mut rows = Vec::new();
    for &cp in checkpoints {
        let seg = ps_window_counts(prev..cp, c, word_len)?;
        for (t, v) in cumulative.iter_mut().zip(seg) {
            *t += v;
        }
        let total: u64 = cumulative.iter().sum();
        rows.push((cp, max_deviation(&cumulative, total, word_len)));
        prev = cp;
    }
    let slope = log_log_slope(&rows);
    Ok(NormalityReport {
        c: c.to_string(),
        word_len,
        rows,
        slope,
    })
}

fn log_log_slope(rows: &[(u64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|&&(_, dev)| dev > 0.0)
        .map(|&(n, dev)| ((n as f64).ln(), dev.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

// ---------------------------------------------------------------------------
// Power-floor vs Beatty substitution report
// ---------------------------------------------------------------------------

/// Instantiation of the segment-substitution inequality: the block-frequency
/// deviation on `(N, 2N]` against the three right-hand terms
/// `f''(N)K²`, `(log N)²/K`, and the sampled integral average `J(N, K)`.
#[derive(Debug, Clone, Serialize)]
pub struct PsViaBeattyReport {
    pub n: u64,
    pub k: u64,
    pub word: String,
    pub lhs: f64,
    pub curvature_term: f64,
    pub log_term: f64,
    /// Midpoint-rule, β-sampled approximation of the integral average.
    pub j_term_sampled: f64,
    pub j_term_is_approximation: bool,
    pub rhs_sum: f64,
}

pub fn ps_via_beatty_report(
    n: u64,
    k: u64,
    c: &ExponentSpec,
    omega: Word,
    alpha_grid: u32,
    beta_samples: u32,
) -> Result<PsViaBeattyReport> {
    if n < 2 || k < 1 || alpha_grid == 0 || beta_samples == 0 {
        return Err(Error::invalid("ps_via_beatty_report needs N >= 2, K >= 1"));
    }
    let word_len = omega.len();
    let counts = ps_window_counts(n + 1..n + n + 1, c, word_len)?;
    let count = counts[omega.bits() as usize];
    let delta = 0.5f64.powi(word_len as i32);
    let lhs = (count as f64 / n as f64 - delta).abs();
    let cf = c.to_f64();
    let f2n = cf * (cf - 1.0) * (n as f64).powf(cf - 2.0);
    let curvature_term = f2n * (k * k) as f64;
    let log_term = (n as f64).ln().powi(2) / k as f64;
    // Sampled J(N, K): midpoint α-grid on [f'(N), f'(2N)], the shift β on
    // a uniform grid over (f(N), f(2N)], window fixed to n < K. Counting
    // matches over n < K at shift β equals the Beatty block count on
    // [β, Kα+β).
    let fp = |x: f64| cf * x.powf(cf - 1.0);
    let (alo, ahi) = (fp(n as f64), fp(2.0 * n as f64));
    let (blo, bhi) = ((n as f64).powf(cf), (2.0 * n as f64).powf(cf));
    let mut acc = 0.0;
    for g in 0..alpha_grid {
        let alpha_f = alo + (g as f64 + 0.5) * (ahi - alo) / alpha_grid as f64;
        let alpha = f64_to_rational(alpha_f)?;
        let mut worst = 0f64;
        for b in 0..beta_samples {
            let beta_f = blo + (b as f64 + 1.0) * (bhi - blo) / beta_samples as f64;
            let beta = f64_to_rational(beta_f)?;
            let bp = BeattyParams::rational(alpha.clone(), beta);
            let y = beta_f;
            let z = k as f64 * alpha_f + beta_f;
            let count = block_count_beatty(y, z, &bp, omega)?;
            worst = worst.max((count as f64 / k as f64 - delta).abs());
        }
        acc += worst;
    }
    let j_term_sampled = acc / alpha_grid as f64;
    Ok(PsViaBeattyReport {
        n,
        k,
        word: omega.to_string(),
        lhs,
        curvature_term,
        log_term,
        j_term_sampled,
        j_term_is_approximation: true,
        rhs_sum: curvature_term + log_term + j_term_sampled,
    })
}
