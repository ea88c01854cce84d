//! Exact real numbers of the form `r + Σ cᵢ·bᵢ^eᵢ` with rational `r`, `cᵢ`,
//! `eᵢ` and integer bases `bᵢ ≥ 2`, together with the certified dyadic
//! interval arithmetic used to resolve floors and comparisons.
//!
//! Values are canonicalized aggressively (perfect-power bases reduced,
//! integer exponent parts folded into the coefficient, like terms merged),
//! so quantities such as `√4` or `a·a^{c-1} - a^c` collapse to exact
//! rationals and never reach the ladder. Anything genuinely irrational is
//! resolved by a Ziv-style ladder: evaluate a certified enclosure at 128
//! bits, double until the floor (or sign) is determined, and give up with
//! [`Error::PrecisionExhausted`] at 4096 bits.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// First rung of the precision ladder, in bits.
pub const LADDER_START_BITS: u32 = 128;
/// Ladder cap; reaching it without resolution is an error.
pub const LADDER_CAP_BITS: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Round {
    Down, // toward -inf
    Up,   // toward +inf
}

/// A signed dyadic number `mant · 2^exp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Dyadic { mant: n, exp: 0 }
    }

    pub fn from_u64(n: u64) -> Self {
        Dyadic {
            mant: BigInt::from(n),
            exp: 0,
        }
    }

    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    /// Keeps at most `bits` significant bits, rounding in direction `dir`.
    fn round_to(&self, bits: u64, dir: Round) -> Dyadic {
        let nbits = self.mant.bits();
        if nbits <= bits {
            return self.clone();
        }
        let shift = nbits - bits;
        let mant = shift_right_dir(&self.mant, shift, dir);
        Dyadic {
            mant,
            exp: self.exp + shift as i64,
        }
    }

    fn add_exact(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - exp) as u64;
        let b = &other.mant << (other.exp - exp) as u64;
        Dyadic { mant: a + b, exp }
    }

    fn mul_exact(&self, other: &Dyadic) -> Dyadic {
        Dyadic {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    /// `⌊self⌋` as an integer.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shift_right_dir(&self.mant, (-self.exp) as u64, Round::Down)
        }
    }

    pub fn cmp_value(&self, other: &Dyadic) -> std::cmp::Ordering {
        self.add_exact(&other.neg()).sign_of()
    }

    fn sign_of(&self) -> std::cmp::Ordering {
        match self.mant.sign() {
            Sign::Minus => std::cmp::Ordering::Less,
            Sign::NoSign => std::cmp::Ordering::Equal,
            Sign::Plus => std::cmp::Ordering::Greater,
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Reduce to <= 64 significant bits first so the conversion is sane.
        let r = self.round_to(64, Round::Down);
        let m = r.mant.to_f64().unwrap_or(f64::NAN);
        let e = r.exp;
        if e >= 0 {
            m * 2f64.powi(e.min(20_000) as i32)
        } else {
            m * 2f64.powi(e.max(-20_000) as i32)
        }
    }
}

/// Floor (Down) or ceiling (Up) shift of a signed integer.
fn shift_right_dir(n: &BigInt, shift: u64, dir: Round) -> BigInt {
    match dir {
        // num-bigint's >> on BigInt rounds toward negative infinity.
        Round::Down => n >> shift,
        Round::Up => -((-n) >> shift),
    }
}

/// Directed conversion of an exact rational to a `bits`-significant dyadic.
pub(crate) fn rational_to_dyadic(r: &BigRational, bits: u64, dir: Round) -> Dyadic {
    if r.is_zero() {
        return Dyadic::zero();
    }
    let num = r.numer();
    let den = r.denom(); // > 0 in canonical form
    // Scale so the quotient keeps `bits + 2` significant bits.
    let scale = (bits + den.bits() + 2).saturating_sub(num.bits().max(1)) + 2;
    let q = div_dir(&(num << scale), den, dir);
    Dyadic {
        mant: q,
        exp: -(scale as i64),
    }
    .round_to(bits, dir)
}

fn div_dir(num: &BigInt, den: &BigInt, dir: Round) -> BigInt {
    debug_assert!(den.is_positive());
    match dir {
        Round::Down => num.div_floor(den),
        Round::Up => -((-num).div_floor(den)),
    }
}

/// A certified enclosure `[lo, hi]` of a real value.
#[derive(Debug, Clone)]
pub(crate) struct Enclosure {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Enclosure {
    fn exact(d: Dyadic) -> Self {
        Enclosure {
            lo: d.clone(),
            hi: d,
        }
    }

    fn of_rational(r: &BigRational, bits: u64) -> Self {
        Enclosure {
            lo: rational_to_dyadic(r, bits, Round::Down),
            hi: rational_to_dyadic(r, bits, Round::Up),
        }
    }

    fn add(&self, other: &Enclosure, bits: u64) -> Enclosure {
        Enclosure {
            lo: self.lo.add_exact(&other.lo).round_to(bits, Round::Down),
            hi: self.hi.add_exact(&other.hi).round_to(bits, Round::Up),
        }
    }

    /// Multiplies by an exact rational, flipping the enclosure when negative.
    fn scale(&self, r: &BigRational, bits: u64) -> Enclosure {
        if r.is_zero() {
            return Enclosure::exact(Dyadic::zero());
        }
        let (lo_src, hi_src) = if r.is_positive() {
            (&self.lo, &self.hi)
        } else {
            (&self.hi, &self.lo)
        };
        let num = Dyadic::from_bigint(r.numer().clone());
        let lo_num = lo_src.mul_exact(&num);
        let hi_num = hi_src.mul_exact(&num);
        let den = r.denom();
        Enclosure {
            lo: div_dyadic_by_int(&lo_num, den, bits, Round::Down),
            hi: div_dyadic_by_int(&hi_num, den, bits, Round::Up),
        }
    }
}

fn div_dyadic_by_int(x: &Dyadic, den: &BigInt, bits: u64, dir: Round) -> Dyadic {
    if x.is_zero() {
        return Dyadic::zero();
    }
    let scale = (bits + den.bits() + 2).saturating_sub(x.mant.bits().max(1)) + 2;
    let q = div_dir(&(&x.mant << scale), den, dir);
    Dyadic {
        mant: q,
        exp: x.exp - scale as i64,
    }
    .round_to(bits, dir)
}

// ---------------------------------------------------------------------------
// Certified binary logarithm and exponential.
// ---------------------------------------------------------------------------

/// Certified enclosure of `log2(x)` for a positive dyadic `x`, accurate to
/// roughly `frac_bits` fractional bits.
pub(crate) fn log2_enclose(x: &Dyadic, frac_bits: u64) -> Enclosure {
    assert!(x.mant.is_positive(), "log2 needs a positive argument");
    let fixed = frac_bits + 32; // working fixed-point precision
    let nbits = x.mant.bits();
    // x = y * 2^p with y in [1, 2).
    let p = x.exp + nbits as i64 - 1;
    let mag = x.mant.magnitude();
    // y in fixed point: lo/hi integers meaning value * 2^fixed.
    let (mut lo, mut hi) = if fixed >= nbits - 1 {
        let v: BigUint = mag << (fixed - (nbits - 1));
        (v.clone(), v)
    } else {
        let shift = (nbits - 1) - fixed;
        let l: BigUint = mag >> shift;
        (l.clone(), l + 1u8)
    };
    let one = BigUint::one() << fixed;
    let two = &one << 1u8;
    // frac accumulates extracted bits of log2(y), scaled by 2^steps_done.
    let mut frac = BigUint::zero();
    let mut steps = 0u64;
    while steps < frac_bits {
        // Square the enclosure of y with directed rounding.
        let lo2: BigUint = (&lo * &lo) >> fixed;
        let hi2: BigUint = ((&hi * &hi) + (&one - 1u8)) >> fixed;
        let lo_ge2 = lo2 >= two;
        let hi_ge2 = hi2 >= two;
        steps += 1;
        frac <<= 1;
        if lo_ge2 && hi_ge2 {
            frac += 1u8;
            lo = lo2 >> 1;
            hi = (hi2 + 1u8) >> 1;
        } else if !lo_ge2 && !hi_ge2 {
            lo = lo2;
            hi = hi2;
        } else {
            // Enclosure straddles 2: the current bit is undecided. All
            // later bits contribute less than 2^{-(steps-1)}; stop with a
            // correct (if wider) enclosure.
            frac >>= 1;
            steps -= 1;
            break;
        }
        if hi > &two << 1u8 {
            // Width control has failed badly; bail out with what we have.
            break;
        }
    }
    // log2(x) in [p + frac/2^steps, p + (frac + 1)/2^steps]: the decided
    // bits are exact and the undecided remainder lies in [0, 2^-steps).
    let base = BigInt::from(p) << steps;
    let lo_mant = &base + BigInt::from(frac.clone());
    let hi_mant = &base + BigInt::from(frac) + 1;
    Enclosure {
        lo: Dyadic {
            mant: lo_mant,
            exp: -(steps as i64),
        },
        hi: Dyadic {
            mant: hi_mant,
            exp: -(steps as i64),
        },
    }
}

/// Down/up fixed-point mantissa tables for the iterated roots of two.
type RootTables = Arc<(Vec<BigUint>, Vec<BigUint>)>;

/// Fixed-point tables of `2^{2^{-j}}` for `j = 1..=fixed`, rounded down and
/// up. Mantissas carry `fixed` fractional bits.
fn root_tables(fixed: u64) -> RootTables {
    static CACHE: OnceLock<Mutex<HashMap<u64, RootTables>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(hit) = guard.get(&fixed) {
        return Arc::clone(hit);
    }
    let mut down = Vec::with_capacity(fixed as usize);
    let mut up = Vec::with_capacity(fixed as usize);
    // sqrt(2) in fixed point, then repeated square roots. Each isqrt of a
    // lower bound halves the accumulated error and adds at most one ulp
    // (D_{j+1} <= D_j/2 + 1 + o(1)), so every entry sits strictly within
    // 3 ulps below the true value; +3 is a certain upper bound.
    let mut cur_down = (BigUint::one() << (2 * fixed + 1)).sqrt();
    loop {
        down.push(cur_down.clone());
        up.push(&cur_down + 3u8);
        if down.len() as u64 == fixed {
            break;
        }
        // next = sqrt(cur), computed as isqrt(cur << fixed).
        cur_down = (&cur_down << fixed).sqrt();
    }
    let entry = Arc::new((down, up));
    guard.insert(fixed, Arc::clone(&entry));
    entry
}

/// Certified enclosure of `2^y`.
pub(crate) fn exp2_enclose(y: &Dyadic, frac_bits: u64) -> Result<Enclosure> {
    let fixed = frac_bits + 32;
    let k = y.floor_int();
    let k_i64 = k.to_i64().ok_or_else(|| {
        Error::invalid("exponent magnitude too large for exp2".to_string())
    })?;
    if !(-(1 << 24)..(1 << 24)).contains(&k_i64) {
        return Err(Error::invalid(
            "exponent magnitude too large for exp2".to_string(),
        ));
    }
    // t = y - k in [0, 1), as an exact dyadic, then truncated to `fixed`
    // fractional bits; the truncation tail is covered by one extra factor
    // of 2^{2^-fixed} on the upper side.
    let t = y.add_exact(&Dyadic::from_bigint(-k));
    debug_assert!(!t.mant.is_negative());
    let t_fixed: BigUint = if t.exp >= 0 {
        t.mant.magnitude() << (t.exp as u64 + fixed)
    } else {
        let down = (-t.exp) as u64;
        if down > fixed {
            (t.mant.magnitude() >> (down - fixed)).clone()
        } else {
            t.mant.magnitude() << (fixed - down)
        }
    };
    let tables = root_tables(fixed);
    let one = BigUint::one() << fixed;
    let mut lo = one.clone();
    let mut hi = one.clone();
    let tail_dropped = t.exp < -(fixed as i64) && {
        // Bits of t beyond the fixed precision were truncated away.
        let down = (-t.exp) as u64 - fixed;
        t.mant.magnitude() & ((BigUint::one() << down) - 1u8) != BigUint::zero()
    };
    for j in 1..=fixed {
        if (&t_fixed >> (fixed - j)) & BigUint::one() == BigUint::one() {
            let idx = (j - 1) as usize;
            lo = (&lo * &tables.0[idx]) >> fixed;
            hi = ((&hi * &tables.1[idx]) + (&one - 1u8)) >> fixed;
        }
    }
    if tail_dropped {
        // The dropped tail is < 2^-fixed; one factor of 2^{2^-fixed},
        // rounded up, restores the upper bound.
        let idx = (fixed - 1) as usize;
        hi = ((&hi * &tables.1[idx]) + (&one - 1u8)) >> fixed;
    }
    Ok(Enclosure {
        lo: Dyadic {
            mant: BigInt::from(lo),
            exp: k_i64 - fixed as i64,
        }
        .round_to(frac_bits + 8, Round::Down),
        hi: Dyadic {
            mant: BigInt::from(hi),
            exp: k_i64 - fixed as i64,
        }
        .round_to(frac_bits + 8, Round::Up),
    })
}

// ---------------------------------------------------------------------------
// Real numbers: rational part plus irrational power terms.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
struct PowTerm {
    coef: BigRational,
    base: u64,
    /// Exponent, canonicalized to lie strictly in (0, 1) and to be
    /// irrational as `base^expo`.
    expo: BigRational,
}

/// An exact real `rat + Σ coefᵢ · baseᵢ^expoᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Real {
    rat: BigRational,
    terms: Vec<PowTerm>,
}

impl Real {
    pub fn zero() -> Self {
        Real {
            rat: BigRational::zero(),
            terms: Vec::new(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Real {
            rat: r,
            terms: Vec::new(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Real::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0);
        Real::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `base^expo` for an integer base `>= 1` and rational exponent.
    pub fn pow(base: u64, expo: BigRational) -> Result<Self> {
        let mut out = Real::zero();
        out.push_term(BigRational::one(), base, expo)?;
        Ok(out)
    }

    /// `√n`, folded to an exact rational when `n` is a perfect square.
    pub fn sqrt(n: u64) -> Result<Self> {
        Real::pow(n, BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn is_rational(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.terms.is_empty() {
            Some(&self.rat)
        } else {
            None
        }
    }

    /// Adds `coef * base^expo`, canonicalizing as described in the module
    /// docs. Errors only on degenerate bases.
    fn push_term(&mut self, coef: BigRational, mut base: u64, mut expo: BigRational) -> Result<()> {
        if coef.is_zero() {
            return Ok(());
        }
        if base == 0 {
            if expo.is_positive() {
                return Ok(()); // 0^e = 0 for e > 0
            }
            return Err(Error::invalid("0 raised to a nonpositive exponent"));
        }
        // Reduce perfect-power bases: 8^e -> 2^{3e}.
        while let Some((root, k)) = largest_perfect_power(base) {
            base = root;
            expo *= BigRational::from_integer(BigInt::from(k));
        }
        if base == 1 {
            self.rat += coef;
            return Ok(());
        }
        // Fold the integer part of the exponent into the coefficient.
        let int_part = expo.floor();
        let frac = &expo - &int_part;
        let int_part = int_part.to_integer();
        let coef = coef * rational_power_of_u64(base, &int_part)?;
        if frac.is_zero() {
            self.rat += coef;
            return Ok(());
        }
        // base^{p/q} with q >= 2: rational iff base is a perfect q-th power,
        // which the perfect-power reduction above has already ruled out.
        // TODO: also extract the q-th-power-free part of the base, so sums
        // like sqrt(18) - 3*sqrt(2) fold to zero instead of exhausting the
        // ladder.
        let expo = frac;
        if let Some(t) = self.terms.iter_mut().find(|t| t.base == base && t.expo == expo) {
            t.coef += coef;
        } else {
            self.terms.push(PowTerm { coef, base, expo });
        }
        self.terms.retain(|t| !t.coef.is_zero());
        Ok(())
    }

    pub fn add(&self, other: &Real) -> Real {
        let mut out = self.clone();
        out.rat += &other.rat;
        for t in &other.terms {
            // push_term cannot fail here: the term was already canonical.
            out.push_term(t.coef.clone(), t.base, t.expo.clone()).unwrap();
        }
        out
    }

    pub fn neg(&self) -> Real {
        Real {
            rat: -&self.rat,
            terms: self
                .terms
                .iter()
                .map(|t| PowTerm {
                    coef: -&t.coef,
                    base: t.base,
                    expo: t.expo.clone(),
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &BigRational) -> Real {
        if r.is_zero() {
            return Real::zero();
        }
        Real {
            rat: &self.rat * r,
            terms: self
                .terms
                .iter()
                .map(|t| PowTerm {
                    coef: &t.coef * r,
                    base: t.base,
                    expo: t.expo.clone(),
                })
                .collect(),
        }
    }

    pub fn add_rational(&self, r: &BigRational) -> Real {
        let mut out = self.clone();
        out.rat += r;
        out
    }

    /// Certified enclosure at `bits` of working precision.
    pub(crate) fn enclosure(&self, bits: u64) -> Result<Enclosure> {
        let mut acc = Enclosure::of_rational(&self.rat, bits + 8);
        for t in &self.terms {
            // base^expo = 2^{expo * log2(base)}
            let lg = log2_enclose(&Dyadic::from_u64(t.base), bits + 16);
            let scaled = lg.scale(&t.expo, bits + 16);
            let lo = exp2_enclose(&scaled.lo, bits + 8)?;
            let hi = exp2_enclose(&scaled.hi, bits + 8)?;
            let pow_env = Enclosure {
                lo: lo.lo,
                hi: hi.hi,
            };
            let term_env = pow_env.scale(&t.coef, bits + 8);
            acc = acc.add(&term_env, bits + 8);
        }
        Ok(acc)
    }

    /// `⌊self⌋`, or the exact rational floor when no irrational terms remain.
    pub fn floor(&self) -> Result<BigInt> {
        if self.terms.is_empty() {
            return Ok(self.rat.floor().to_integer());
        }
        let mut bits = LADDER_START_BITS as u64;
        loop {
            let env = self.enclosure(bits)?;
            let lo = env.lo.floor_int();
            let hi = env.hi.floor_int();
            if lo == hi {
                return Ok(lo);
            }
            if bits >= LADDER_CAP_BITS as u64 {
                return Err(Error::PrecisionExhausted {
                    bits: LADDER_CAP_BITS,
                });
            }
            bits *= 2;
        }
    }

    /// Exact sign. Resolves rationals immediately, irrationals by ladder.
    pub fn sign(&self) -> Result<std::cmp::Ordering> {
        use std::cmp::Ordering;
        if self.terms.is_empty() {
            return Ok(if self.rat.is_zero() {
                Ordering::Equal
            } else if self.rat.is_positive() {
                Ordering::Greater
            } else {
                Ordering::Less
            });
        }
        let mut bits = LADDER_START_BITS as u64;
        loop {
            let env = self.enclosure(bits)?;
            if env.lo.sign_of() == Ordering::Greater {
                return Ok(Ordering::Greater);
            }
            if env.hi.sign_of() == Ordering::Less {
                return Ok(Ordering::Less);
            }
            if bits >= LADDER_CAP_BITS as u64 {
                return Err(Error::PrecisionExhausted {
                    bits: LADDER_CAP_BITS,
                });
            }
            bits *= 2;
        }
    }

    pub fn cmp_real(&self, other: &Real) -> Result<std::cmp::Ordering> {
        self.sub(other).sign()
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Result<std::cmp::Ordering> {
        self.sub(&Real::from_rational(r.clone())).sign()
    }

    pub fn to_f64(&self) -> f64 {
        if let Some(r) = self.as_rational() {
            return rational_to_f64(r);
        }
        match self.enclosure(80) {
            Ok(env) => 0.5 * (env.lo.to_f64() + env.hi.to_f64()),
            Err(_) => f64::NAN,
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    rational_to_dyadic(r, 64, Round::Down).to_f64()
}

/// `base^k` as an exact rational, for possibly negative integer `k`.
fn rational_power_of_u64(base: u64, k: &BigInt) -> Result<BigRational> {
    let k_i = k
        .to_i32()
        .ok_or_else(|| Error::invalid("integer exponent part out of range"))?;
    let b = BigInt::from(base);
    let mag = num_traits::pow::pow(b, k_i.unsigned_abs() as usize);
    Ok(if k_i >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    })
}

/// Largest way to write `n = root^k` with `k >= 2`, if any.
fn largest_perfect_power(n: u64) -> Option<(u64, u32)> {
    if n < 4 {
        return None;
    }
    let nb = BigUint::from(n);
    for k in (2..=n.ilog2().max(2)).rev() {
        let root = nb.nth_root(k);
        if root.pow(k) == nb {
            return Some((root.to_u64().unwrap(), k));
        }
    }
    None
}
