//! Exact evaluation of `⌊n^c⌋` for exponents `1 < c < 2`, and the segment
//! linearization that replaces `n^c` by `n·alpha + beta` on short intervals.
//!
//! Rational exponents `p/q` go through exact big-integer `q`-th roots.
//! Exponents given as decimal literals go through the certified interval
//! ladder in [`crate::real`]; the canonicalization there folds `n^{p/q}` to
//! an exact integer whenever `n` is a perfect `q`-th power, so boundary
//! cases like `4^{3/2} = 8` resolve exactly instead of stalling the ladder.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::real::{rational_to_f64, Real};

/// The exponent `c` of the power floor, either exactly rational or a
/// decimal literal resolved through the precision ladder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExponentSpec {
    /// `c = p/q` in lowest terms.
    Rational { p: u64, q: u64 },
    /// `c` parsed from a decimal literal such as `"1.4"`. The parsed value
    /// is exact; floors are resolved by interval arithmetic with widening
    /// precision rather than integer roots.
    Real { value: BigRational, digits: String },
}

impl ExponentSpec {
    /// Exact rational exponent; reduces `p/q` and checks `1 < c < 2`.
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("exponent denominator must be nonzero"));
        }
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        check_range(&BigRational::new(BigInt::from(p), BigInt::from(q)))?;
        Ok(ExponentSpec::Rational { p, q })
    }

    /// Exponent from a decimal literal, e.g. `"1.4"`.
    pub fn real(digits: &str) -> Result<Self> {
        let value = parse_decimal(digits)?;
        check_range(&value)?;
        Ok(ExponentSpec::Real {
            value,
            digits: digits.to_string(),
        })
    }

    /// Accepts `"p/q"` for the rational path or a decimal literal for the
    /// real path.
    pub fn parse(s: &str) -> Result<Self> {
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad exponent {s:?}")))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad exponent {s:?}")))?;
            ExponentSpec::rational(p, q)
        } else {
            ExponentSpec::real(s.trim())
        }
    }

    /// The exact value of `c`.
    pub fn value(&self) -> BigRational {
        match self {
            ExponentSpec::Rational { p, q } => {
                BigRational::new(BigInt::from(*p), BigInt::from(*q))
            }
            ExponentSpec::Real { value, .. } => value.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.value())
    }
}

impl std::fmt::Display for ExponentSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExponentSpec::Rational { p, q } => write!(f, "{p}/{q}"),
            ExponentSpec::Real { digits, .. } => write!(f, "{digits}"),
        }
    }
}

fn check_range(c: &BigRational) -> Result<()> {
    let one = BigRational::one();
    let two = &one + &one;
    if *c <= one || *c >= two {
        return Err(Error::invalid(format!(
            "exponent must satisfy 1 < c < 2, got {c}"
        )));
    }
    Ok(())
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::invalid(format!("bad decimal literal {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let num: BigInt = joined.parse().map_err(|_| bad())?;
    let den = num_traits::pow::pow(BigInt::from(10), frac_part.len());
    Ok(BigRational::new(num, den))
}

/// Exact `⌊n^c⌋`.
///
/// The rational path returns the unique `m` with `m^q <= n^p < (m+1)^q`
/// via a big-integer `q`-th root. The real path builds a certified
/// enclosure of `n^c` and widens precision until the floor is pinned down,
/// failing with [`Error::PrecisionExhausted`] only past the 4096-bit cap.
pub fn floor_power(n: u64, c: &ExponentSpec) -> Result<u128> {
    if n <= 1 {
        return Ok(u128::from(n));
    }
    match c {
        ExponentSpec::Rational { p, q } => {
            let bits = 64 - n.leading_zeros() as u64;
            if p.saturating_mul(bits) > 20_000_000 {
                return Err(Error::BudgetExceeded(format!(
                    "n^p would need about {} bits",
                    p * bits
                )));
            }
            let q32 = u32::try_from(*q)
                .map_err(|_| Error::invalid("exponent denominator too large"))?;
            let m = BigUint::from(n)
                .pow(u32::try_from(*p).map_err(|_| Error::invalid("exponent numerator too large"))?)
                .nth_root(q32);
            m.to_u128()
                .ok_or_else(|| Error::invalid("power floor exceeds 128 bits"))
        }
        ExponentSpec::Real { value, .. } => {
            let x = Real::pow(n, value.clone())?;
            let m = x.floor()?;
            debug_assert!(!m.is_negative());
            m.to_u128()
                .ok_or_else(|| Error::invalid("power floor exceeds 128 bits"))
        }
    }
}

/// A short interval `(a, a+count]` together with the linear replacement
/// `n^c ≈ n·alpha + beta` and a bound on the second derivative.
#[derive(Debug, Clone)]
pub struct Segment {
    pub a: u64,
    pub count: u64,
    /// `alpha = f'(a) = c·a^{c-1}`.
    pub alpha: Real,
    /// `beta = f(a) - a·alpha = (1-c)·a^c`.
    pub beta: Real,
    /// `B = f''(a) = c(c-1)·a^{c-2}`; `f''` decreases on the segment for
    /// `1 < c < 2`, so the left endpoint bounds the whole interval.
    pub second_derivative_bound: Real,
}

impl Segment {
    /// The Beatty-side value `n·alpha + beta`.
    pub fn linear_value(&self, n: u64) -> Real {
        self.alpha
            .scale(&BigRational::from_integer(BigInt::from(n)))
            .add(&self.beta)
    }
}

/// Builds the linearization of `x^c` at the left endpoint of `(a, a+count]`.
pub fn linearize_segment(a: u64, count: u64, c: &ExponentSpec) -> Result<Segment> {
    if a < 1 || count < 1 {
        return Err(Error::invalid("segment needs a >= 1 and count >= 1"));
    }
    let cv = c.value();
    let one = BigRational::one();
    let alpha = Real::pow(a, &cv - &one)?.scale(&cv);
    let beta = Real::pow(a, cv.clone())?.scale(&(&one - &cv));
    let b = Real::pow(a, &cv - &one - &one)?.scale(&(&cv * (&cv - &one)));
    Ok(Segment {
        a,
        count,
        alpha,
        beta,
        second_derivative_bound: b,
    })
}

/// Counts `n ∈ (a, a+count]` where `⌊n^c⌋` and `⌊n·alpha+beta⌋` disagree,
/// by exact evaluation of both floors.
pub fn linearization_mismatch_count(seg: &Segment, c: &ExponentSpec) -> Result<u64> {
    let mut mismatches = 0;
    for n in (seg.a + 1)..=(seg.a + seg.count) {
        let exact = floor_power(n, c)?;
        let linear = seg.linear_value(n).floor()?;
        if BigInt::from(exact) != linear {
            mismatches += 1;
        }
    }
    Ok(mismatches)
}

/// Signed error `x·alpha + beta - x^c` of the linear replacement at an
/// integer point, as an exact [`Real`].
pub fn linear_approx_error(seg: &Segment, x: u64, c: &ExponentSpec) -> Result<Real> {
    let f = Real::pow(x, c.value())?;
    Ok(seg.linear_value(x).sub(&f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn parse_and_reduce() {
        let c = ExponentSpec::parse("14/10").unwrap();
        assert_eq!(c, ExponentSpec::Rational { p: 7, q: 5 });
        let c = ExponentSpec::parse("1.4").unwrap();
        assert_eq!(c.value(), rat(7, 5));
        assert!(matches!(c, ExponentSpec::Real { .. }));
        assert!(ExponentSpec::parse("2.5").is_err());
        assert!(ExponentSpec::parse("1/1").is_err());
        assert!(ExponentSpec::parse("x").is_err());
    }

    #[test]
    fn floor_power_examples() {
        let c32 = ExponentSpec::rational(3, 2).unwrap();
        let c75 = ExponentSpec::rational(7, 5).unwrap();
        assert_eq!(floor_power(1, &c32).unwrap(), 1);
        assert_eq!(floor_power(4, &c32).unwrap(), 8); // exact power boundary
        assert_eq!(floor_power(10, &c75).unwrap(), 25);
        // 25^5 = 9765625 <= 10^7 < 26^5 = 11881376
        assert!(25u64.pow(5) <= 10u64.pow(7) && 10u64.pow(7) < 26u64.pow(5));
    }

    #[test]
    fn real_path_handles_exact_power_boundary() {
        let c = ExponentSpec::real("1.5").unwrap();
        assert_eq!(floor_power(4, &c).unwrap(), 8);
        assert_eq!(floor_power(9, &c).unwrap(), 27);
        assert_eq!(floor_power(16, &c).unwrap(), 64);
    }

    #[test]
    fn rational_and_real_paths_agree() {
        let rational = ExponentSpec::rational(7, 5).unwrap();
        let real = ExponentSpec::real("1.4").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xfeed);
        for _ in 0..2000 {
            let n = rng.gen_range(0..1_000_000_000_000u64);
            assert_eq!(
                floor_power(n, &rational).unwrap(),
                floor_power(n, &real).unwrap(),
                "n={n}"
            );
        }
    }

    #[test]
    fn paths_agree_near_the_exponent_range_ends() {
        for (digits, p, q) in [("1.999", 1999u64, 1000u64), ("1.001", 1001, 1000)] {
            let real = ExponentSpec::real(digits).unwrap();
            let rational = ExponentSpec::rational(p, q).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xed6e);
            for _ in 0..60 {
                let n = rng.gen_range(0..1_000_000u64);
                assert_eq!(
                    floor_power(n, &rational).unwrap(),
                    floor_power(n, &real).unwrap(),
                    "c={digits} n={n}"
                );
            }
        }
    }

    #[test]
    fn ladder_floors_match_high_precision_fixture() {
        // Frozen from an independent 80-digit decimal evaluation of n^c;
        // every case sits at least 1e-30 away from an integer boundary.
        let cases: &[(u64, &str, u128)] = &[
            (386756065699, "1.4", 16688295728992520),
            (519710511440, "1.4", 25238648839072154),
            (631592779430, "1.4", 33159808890400109),
            (462114914982, "1.4", 21411642330837424),
            (107244471332, "1.4", 2770287725406119),
            (455269567927, "1.4", 20968920337026961),
            (421376671436, "1.4", 18816493010795981),
            (299916779013, "1.4", 11689638169310960),
            (50640815838, "1.4", 968949116682142),
            (727161322511, "1.4", 40390858040331263),
            (659405008774, "1.4", 35221929085272784),
            (647838418829, "1.4", 34360017727619814),
            (216868486912, "1.41421356", 10759763796190226),
            (1240493217, "1.41421356", 7249106846677),
            (351879823390, "1.41421356", 21333763707913604),
            (529324435908, "1.41421356", 38005508357315950),
            (516631287981, "1.41421356", 36723070175879286),
            (6549166804, "1.41421356", 76240093805487),
            (823663964266, "1.41421356", 71025666958201476),
            (871716366297, "1.41421356", 76955651480180044),
            (404710628733, "1.41421356", 26000476109483391),
            (7638745944, "1.41421356", 94777188104742),
            (824099774422, "1.41421356", 71078819640079427),
            (465325663681, "1.41421356", 31673800129841619),
            (630196550475, "1.259921", 735203606268099),
            (317767196481, "1.259921", 310276405814423),
            (425390706611, "1.259921", 448078600205407),
            (627613310550, "1.259921", 731408639196976),
            (936185905246, "1.259921", 1210515922425249),
            (130593034916, "1.259921", 101200127797416),
            (470660980901, "1.259921", 508967653568300),
            (262381149556, "1.259921", 243754711423164),
            (419494310444, "1.259921", 440267531902955),
            (64159187406, "1.259921", 41332567499994),
            (804438215259, "1.259921", 999954548618870),
            (650577469896, "1.259921", 765285550742463),
            (777507829622, "1.1", 12016424116679),
            (96341280457, "1.1", 1208352529579),
            (869730632448, "1.1", 13593248085031),
            (714315311827, "1.1", 10946592609024),
            (284507181819, "1.1", 3976514378601),
            (177194119384, "1.1", 2362078002480),
            (387332813481, "1.1", 5583322570808),
            (106256004223, "1.1", 1345825733471),
            (697499929401, "1.1", 10663470818126),
            (272459491639, "1.1", 3791684001875),
            (447521635081, "1.1", 6544785829873),
            (225634241175, "1.1", 3081381759855),
            (356927493074, "1.9", 8910498535809272792846),
            (260544730586, "1.9", 4899777498122373122798),
            (153101108736, "1.9", 1784262870000548391266),
            (357823484993, "1.9", 8953045636381157498074),
            (630973769163, "1.9", 26303980854198048983801),
            (317094101915, "1.9", 7116353474555353262111),
            (186446794015, "1.9", 2594504020273459715576),
            (243699404640, "1.9", 4315424169270603490091),
            (854598574700, "1.9", 46811020810452023341461),
            (812800301024, "1.9", 42556835438152675371461),
            (318652485077, "1.9", 7182950747587918203875),
            (527434128800, "1.9", 18711975229020356562994),
            (93021180740, "1.333333333333", 421478860353255),
            (427080896021, "1.333333333333", 3216228235156720),
            (963872858885, "1.333333333333", 9521228805934611),
            (302121258235, "1.333333333333", 2027254997171148),
            (538780520429, "1.333333333333", 4384120817596833),
            (304908327049, "1.333333333333", 2052228495125978),
            (825242996377, "1.333333333333", 7740620866650349),
            (408918314707, "1.333333333333", 3035163444923551),
            (126483183710, "1.333333333333", 634907394167534),
            (508654978690, "1.333333333333", 4060358680492732),
            (168641770789, "1.333333333333", 931723118693431),
            (890348890449, "1.333333333333", 8565386456659800),
        ];
        for &(n, c, expect) in cases {
            let spec = ExponentSpec::real(c).unwrap();
            assert_eq!(floor_power(n, &spec).unwrap(), expect, "n={n} c={c}");
        }
    }

    #[test]
    fn rational_floor_satisfies_root_inequality() {
        let c = ExponentSpec::rational(7, 5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let n = rng.gen_range(2..1_000_000_000u64);
            let m = floor_power(n, &c).unwrap();
            let m_big = BigUint::from(m);
            let n_pow = BigUint::from(n).pow(7);
            assert!(m_big.pow(5) <= n_pow);
            assert!((m_big + 1u8).pow(5) > n_pow);
        }
    }

    #[test]
    fn linearize_examples() {
        let c32 = ExponentSpec::rational(3, 2).unwrap();
        // alpha = (3/2) * 4^{1/2} = 3 exactly
        let seg = linearize_segment(4, 8, &c32).unwrap();
        assert_eq!(seg.alpha.as_rational(), Some(&rat(3, 1)));
        // B at a=1: c(c-1) = 3/4 exactly
        let seg = linearize_segment(1, 1, &c32).unwrap();
        assert_eq!(
            seg.second_derivative_bound.as_rational(),
            Some(&rat(3, 4))
        );
    }

    #[test]
    fn linearize_matches_float_oracle() {
        let c = ExponentSpec::rational(7, 5).unwrap();
        let seg = linearize_segment(100, 10, &c).unwrap();
        let cf = 1.4f64;
        let alpha_f = cf * 100f64.powf(cf - 1.0);
        let beta_f = 100f64.powf(cf) - 100.0 * alpha_f;
        let b_f = cf * (cf - 1.0) * 100f64.powf(cf - 2.0);
        assert!((seg.alpha.to_f64() - alpha_f).abs() < 1e-12);
        // beta ~ -252; the f64 oracle itself carries a few ulp (~1e-13).
        assert!((seg.beta.to_f64() - beta_f).abs() < 1e-12);
        assert!((seg.second_derivative_bound.to_f64() - b_f).abs() < 1e-12);
    }

    #[test]
    fn approx_error_bounded_by_bk_squared_on_integers() {
        let c = ExponentSpec::rational(7, 5).unwrap();
        for (a, k) in [(50u64, 10u64), (1000, 30), (10_000, 100)] {
            let seg = linearize_segment(a, k, &c).unwrap();
            let bound = seg
                .second_derivative_bound
                .scale(&rat((k * k) as i64, 1));
            for x in (a..=a + k).step_by((k as usize / 10).max(1)) {
                let err = linear_approx_error(&seg, x, &c).unwrap();
                assert_ne!(
                    err.sub(&bound).sign().unwrap(),
                    std::cmp::Ordering::Greater,
                    "a={a} k={k} x={x}"
                );
                assert_ne!(
                    err.neg().sub(&bound).sign().unwrap(),
                    std::cmp::Ordering::Greater,
                    "a={a} k={k} x={x}"
                );
            }
        }
    }

    #[test]
    fn floors_agree_when_linear_value_clears_the_band() {
        let c = ExponentSpec::rational(7, 5).unwrap();
        let (a, k) = (500u64, 40u64);
        let seg = linearize_segment(a, k, &c).unwrap();
        let band = seg
            .second_derivative_bound
            .scale(&rat((k * k) as i64, 1));
        for x in (a + 1)..=(a + k) {
            let v = seg.linear_value(x);
            let fl = v.floor().unwrap();
            let frac = v.sub(&Real::from_rational(BigRational::from_integer(fl.clone())));
            let dist_up = Real::from_int(1).sub(&frac);
            let clears = frac.cmp_real(&band).unwrap() == std::cmp::Ordering::Greater
                && dist_up.cmp_real(&band).unwrap() == std::cmp::Ordering::Greater;
            if clears {
                let exact = floor_power(x, &c).unwrap();
                assert_eq!(BigInt::from(exact), fl, "x={x}");
            }
        }
    }

    #[test]
    fn mismatch_count_within_discrepancy_bound() {
        // count <= 2BK³ + K·D_K(alpha) at a long segment.
        let c = ExponentSpec::rational(7, 5).unwrap();
        let seg = linearize_segment(100_000, 100, &c).unwrap();
        let count = linearization_mismatch_count(&seg, &c).unwrap();
        let k = seg.count as f64;
        let b = seg.second_derivative_bound.to_f64();
        let d_k = crate::beatty::discrepancy_f64(seg.alpha.to_f64(), seg.count);
        let bound = 2.0 * b * k * k * k + k * d_k;
        assert!(
            (count as f64) <= bound,
            "count={count} bound={bound} (B={b}, D_K={d_k})"
        );
    }

    #[test]
    fn mismatch_count_empty_and_small() {
        let c = ExponentSpec::rational(7, 5).unwrap();
        let mut seg = linearize_segment(100, 10, &c).unwrap();
        let count = linearization_mismatch_count(&seg, &c).unwrap();
        // Frozen from the independent double-evaluation oracle (60-digit
        // decimal arithmetic): the floors disagree at n = 106..110.
        assert_eq!(count, 5);
        seg.count = 0;
        assert_eq!(linearization_mismatch_count(&seg, &c).unwrap(), 0);
    }
}
