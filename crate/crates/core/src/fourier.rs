//! Discrete Fourier coefficients of restricted digit sums and the
//! digit-level machinery around them.
//!
//! The central object is the table `h ↦ G_λ(h, d)` of Fourier coefficients
//! of the `2^λ`-periodic ±1 sequence
//! `u ↦ e(½ Σ_ℓ b_ℓ s_λ(u + ℓd + i(ℓ)))`,
//! where `b` is a sparse integer coefficient sequence and `i` a
//! nondecreasing shift profile with steps in {0, 1}. Peeling one binary
//! digit off `d` expresses a level-λ table through level-(λ-1) tables of
//! transformed profiles, with ±1 weights. Chasing that recurrence through
//! the digits of `d` leads to the notion of *good positions*: digit
//! positions where a prepared profile forces a uniform loss factor
//! `1 - 2/4^m` in `|G|²`. Counting the `d` with a prescribed good-position
//! set is exact, which is what the census and decay-budget helpers expose.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::One;
use serde::Serialize;

use crate::digits::e_frac;
use crate::error::{Error, Result};
use crate::fft::dft_forward_scaled;

/// Hard cap on table levels: entries are `2^λ` complex numbers.
pub const MAX_LAMBDA: u32 = 22;

/// Comparison tolerance for table identities; all phases are exact
/// multiples of `1/2^λ`, so double precision leaves plenty of room.
pub const TABLE_TOLERANCE: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Shift profiles
// ---------------------------------------------------------------------------

/// A sparse shift profile: a sequence `i` with `i(0) = 0` and consecutive
/// increments in {0, 1}, stored on its two active windows `[0, L)` and
/// `[r, r+L)`. Only values on the windows ever feed the coefficients;
/// extendability to a full sequence on `[0, r+L)` is kept as an invariant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShiftProfile {
    head: Vec<u64>,
    tail: Vec<u64>,
    offset: u64, // r
}

impl ShiftProfile {
    pub fn new(head: Vec<u64>, tail: Vec<u64>, offset: u64) -> Result<Self> {
        let l = head.len();
        if l == 0 || tail.len() != l {
            return Err(Error::invalid("profile windows must be equal and nonempty"));
        }
        if (offset as usize) < l {
            return Err(Error::invalid("profile offset must be at least the window length"));
        }
        if head[0] != 0 {
            return Err(Error::invalid("profile must start at zero"));
        }
        for w in [&head, &tail] {
            for pair in w.windows(2) {
                if pair[1] < pair[0] || pair[1] - pair[0] > 1 {
                    return Err(Error::invalid("profile increments must be 0 or 1"));
                }
            }
        }
        let last_head = head[l - 1];
        let gap_steps = offset - (l as u64 - 1);
        if tail[0] < last_head || tail[0] - last_head > gap_steps {
            return Err(Error::invalid(
                "profile windows cannot be joined by 0/1 increments",
            ));
        }
        Ok(ShiftProfile { head, tail, offset })
    }

    /// The zero profile on windows of length `l` at offset `r`.
    pub fn zero(l: usize, r: u64) -> Result<Self> {
        ShiftProfile::new(vec![0; l], vec![0; l], r)
    }

    /// A random valid profile: Bernoulli steps through the head window,
    /// a uniform gap increment, Bernoulli steps through the tail.
    pub fn sample<R: rand::Rng>(rng: &mut R, l: usize, r: u64) -> Self {
        assert!(l >= 1 && r >= l as u64);
        let mut head = vec![0u64; l];
        for i in 1..l {
            head[i] = head[i - 1] + rng.gen_range(0..=1);
        }
        let gap_steps = r - (l as u64 - 1);
        let start = head[l - 1] + rng.gen_range(0..=gap_steps);
        let mut tail = vec![start; l];
        for i in 1..l {
            tail[i] = tail[i - 1] + rng.gen_range(0..=1);
        }
        ShiftProfile { head, tail, offset: r }
    }

    pub fn window_len(&self) -> usize {
        self.head.len()
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// `K = L + r`, the support bound of the associated coefficients.
    pub fn support_len(&self) -> u64 {
        self.offset + self.head.len() as u64
    }

    /// `i(ℓ)` on the active windows.
    pub fn value(&self, pos: u64) -> Option<u64> {
        let l = self.head.len() as u64;
        if pos < l {
            Some(self.head[pos as usize])
        } else if pos >= self.offset && pos < self.offset + l {
            Some(self.tail[(pos - self.offset) as usize])
        } else {
            None
        }
    }

    /// `i(r)`, the value entering the prepared-profile conditions.
    pub fn value_at_offset(&self) -> u64 {
        self.tail[0]
    }

    pub fn head(&self) -> &[u64] {
        &self.head
    }

    pub fn tail(&self) -> &[u64] {
        &self.tail
    }
}

/// `T^{(m)}_{d,e}(i)(ℓ) = ⌊(i(ℓ) + ℓ·d̄ + ē)/2^m⌋` pointwise on the active
/// windows, with `d̄ = d mod 2^m`, `ē = e mod 2^m`. `m = 0` is the identity.
pub fn transform_profile(i: &ShiftProfile, m: u32, d: u64, e: u64) -> ShiftProfile {
    if m == 0 {
        return i.clone();
    }
    assert!(m <= 63, "transform level out of range");
    let md = 1u128 << m;
    let db = (d as u128) % md;
    let eb = (e as u128) % md;
    let map = |pos: u64, v: u64| -> u64 {
        let num = v as u128 + pos as u128 * db + eb;
        (num >> m) as u64
    };
    let head = i
        .head
        .iter()
        .enumerate()
        .map(|(l, &v)| map(l as u64, v))
        .collect();
    let tail = i
        .tail
        .iter()
        .enumerate()
        .map(|(l, &v)| map(i.offset + l as u64, v))
        .collect();
    let out = ShiftProfile {
        head,
        tail,
        offset: i.offset,
    };
    debug_assert!(
        ShiftProfile::new(out.head.clone(), out.tail.clone(), out.offset).is_ok(),
        "transform must preserve profile validity"
    );
    out
}

// ---------------------------------------------------------------------------
// Coefficient sequences
// ---------------------------------------------------------------------------

/// The two-block coefficient sequence built from a bit pattern `a` with
/// `a_0 = 1`: `b_ℓ = a_ℓ` on `[0, L)` and `b_ℓ = -a_{ℓ-r}` on `[r, r+L)`,
/// zero elsewhere. The two blocks agree modulo 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffBlock {
    a: Vec<bool>,
    r: u64,
}

impl CoeffBlock {
    pub fn new(a: Vec<bool>, r: u64) -> Result<Self> {
        let l = a.len();
        if l == 0 || l > 32 {
            return Err(Error::invalid("pattern length must be in 1..=32"));
        }
        if !a[0] {
            return Err(Error::invalid("pattern must start with a 1 (a_0 = 1)"));
        }
        if r < l as u64 {
            return Err(Error::invalid("block spacing must be at least the length"));
        }
        Ok(CoeffBlock { a, r })
    }

    pub fn from_word_bits(bits: &[u8], r: u64) -> Result<Self> {
        CoeffBlock::new(bits.iter().map(|&b| b != 0).collect(), r)
    }

    /// The pattern length L; blocks are never empty.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// The scale `m >= 5` with `2^{m-5} <= L < 2^{m-4}`.
    pub fn block_scale_m(&self) -> u32 {
        block_scale_m(self.a.len())
    }

    pub fn coeffs(&self) -> SparseCoeffs {
        let mut terms = Vec::new();
        for (l, &bit) in self.a.iter().enumerate() {
            if bit {
                terms.push((l as u64, 1i8));
            }
        }
        for (l, &bit) in self.a.iter().enumerate() {
            if bit {
                terms.push((self.r + l as u64, -1i8));
            }
        }
        SparseCoeffs { terms }
    }
}

/// `m` with `2^{m-5} <= L < 2^{m-4}`; the van der Corput step is `2^{2m}`.
pub fn block_scale_m(l: usize) -> u32 {
    assert!(l >= 1);
    (l as u32).ilog2() + 5
}

/// A finitely supported integer coefficient sequence, sparse by position.
/// [`CoeffBlock::coeffs`] is the structured two-block case; the zero and
/// single-block variants exist for identity checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseCoeffs {
    terms: Vec<(u64, i8)>,
}

impl SparseCoeffs {
    pub fn zero() -> Self {
        SparseCoeffs { terms: Vec::new() }
    }

    /// A single block of +1 coefficients at the positions of set bits.
    pub fn single_block(a: &[bool]) -> Self {
        SparseCoeffs {
            terms: a
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(l, _)| (l as u64, 1i8))
                .collect(),
        }
    }

    pub fn terms(&self) -> &[(u64, i8)] {
        &self.terms
    }

    fn check_supported(&self, i: &ShiftProfile) -> Result<()> {
        for &(pos, _) in &self.terms {
            if i.value(pos).is_none() {
                return Err(Error::invalid(format!(
                    "coefficient at position {pos} lies outside the profile windows"
                )));
            }
        }
        Ok(())
    }
}

impl From<&CoeffBlock> for SparseCoeffs {
    fn from(b: &CoeffBlock) -> Self {
        b.coeffs()
    }
}

// ---------------------------------------------------------------------------
// Fourier tables
// ---------------------------------------------------------------------------

/// The vector `h ↦ G_λ(h, d)` of Fourier coefficients at level `λ`.
#[derive(Debug, Clone)]
pub struct FourierTable {
    pub lambda: u32,
    pub d: u64,
    entries: Vec<Complex64>,
}

impl FourierTable {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, h: u64) -> Complex64 {
        let mask = (1u64 << self.lambda) - 1;
        self.entries[(h & mask) as usize]
    }

    /// `Σ_h |G(h)|²`; equals 1 for tables of unit-modulus sequences.
    pub fn parseval_sum(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_norm_sqr(&self) -> f64 {
        self.entries
            .iter()
            .map(|v| v.norm_sqr())
            .fold(0.0, f64::max)
    }
}

fn check_lambda(lambda: u32) -> Result<()> {
    if lambda > MAX_LAMBDA {
        return Err(Error::invalid(format!(
            "table level {lambda} exceeds the supported maximum {MAX_LAMBDA}"
        )));
    }
    Ok(())
}

/// The ±1 source sequence value `e(½ Σ_ℓ b_ℓ s_λ(u + ℓd + i(ℓ)))`.
#[inline]
fn source_sign(u: u64, lambda: u32, d: u64, i: &ShiftProfile, b: &SparseCoeffs) -> f64 {
    let mask = (1u128 << lambda) - 1;
    let mut parity = 0u32;
    for &(pos, coef) in &b.terms {
        if coef & 1 == 0 {
            continue;
        }
        let shift = i.value(pos).expect("coefficient support checked on entry");
        let arg = (u as u128 + pos as u128 * d as u128 + shift as u128) & mask;
        parity ^= (arg as u64).count_ones() & 1;
    }
    if parity & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Direct evaluation of the Fourier table: one pass over `u < 2^λ` to form
/// the ±1 sequence, then a length-`2^λ` transform. `O(λ·2^λ)` overall.
pub fn fourier_direct(
    lambda: u32,
    i: &ShiftProfile,
    b: &SparseCoeffs,
    d: u64,
) -> Result<FourierTable> {
    check_lambda(lambda)?;
    b.check_supported(i)?;
    let size = 1usize << lambda;
    let signs: Vec<Complex64> = (0..size)
        .map(|u| Complex64::new(source_sign(u as u64, lambda, d, i, b), 0.0))
        .collect();
    let entries = dft_forward_scaled(&signs);
    Ok(FourierTable { lambda, d, entries })
}

/// The elementary weight `f_{δ,ε} = e(½ Σ_ℓ b_ℓ (i(ℓ) + ℓδ + ε)) ∈ {±1}`
/// for single binary digits `δ, ε`.
pub fn weight_sign(i: &ShiftProfile, b: &SparseCoeffs, delta: u64, eps: u64) -> f64 {
    debug_assert!(delta <= 1 && eps <= 1, "weights take single binary digits");
    let mut parity = 0u64;
    for &(pos, coef) in &b.terms {
        if coef & 1 == 0 {
            continue;
        }
        let shift = i.value(pos).expect("coefficient support checked by caller");
        parity ^= (shift ^ (pos & delta) ^ eps) & 1;
    }
    if parity & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// The composite weight along the digit path of `(d, e)`: the product of
/// elementary weights taken at the successively transformed profiles. The
/// value is ±1 because the coefficients are integers.
pub fn weight_product(i: &ShiftProfile, b: &SparseCoeffs, m: u32, d: u64, e: u64) -> Complex64 {
    let mut cur = i.clone();
    let mut sign = 1.0;
    for j in 0..m {
        let delta = (d >> j) & 1;
        let eps = (e >> j) & 1;
        sign *= weight_sign(&cur, b, delta, eps);
        if j + 1 < m {
            cur = transform_profile(&cur, 1, delta, eps);
        }
    }
    Complex64::new(sign, 0.0)
}

/// Builds the table bottom-up through the digit recurrence
/// `G_λ(h, 2d+δ) = ½ Σ_ε e(-hε/2^λ) f_{δ,ε} G_{λ-1}^{T_{δ,ε}(i)}(h, d)`,
/// memoizing on (level, profile). Agrees with [`fourier_direct`] within
/// [`TABLE_TOLERANCE`].
pub fn fourier_recursive(
    lambda: u32,
    i: &ShiftProfile,
    b: &SparseCoeffs,
    d: u64,
) -> Result<FourierTable> {
    check_lambda(lambda)?;
    b.check_supported(i)?;
    type Memo = HashMap<(u32, ShiftProfile), Rc<Vec<Complex64>>>;

    fn table(
        level: u32,
        lambda: u32,
        prof: &ShiftProfile,
        b: &SparseCoeffs,
        d: u64,
        memo: &mut Memo,
    ) -> Rc<Vec<Complex64>> {
        if level == 0 {
            return Rc::new(vec![Complex64::new(1.0, 0.0)]);
        }
        if let Some(hit) = memo.get(&(level, prof.clone())) {
            return Rc::clone(hit);
        }
        let delta = (d >> (lambda - level)) & 1;
        let child0 = transform_profile(prof, 1, delta, 0);
        let child1 = transform_profile(prof, 1, delta, 1);
        let t0 = table(level - 1, lambda, &child0, b, d, memo);
        let t1 = table(level - 1, lambda, &child1, b, d, memo);
        let w0 = weight_sign(prof, b, delta, 0);
        let w1 = weight_sign(prof, b, delta, 1);
        let size = 1usize << level;
        let half = size >> 1;
        let mut entries = Vec::with_capacity(size);
        for h in 0..size {
            let tw = e_frac(-(h as f64) / size as f64);
            let low = h & (half - 1);
            entries.push(0.5 * (w0 * t0[low] + tw * w1 * t1[low]));
        }
        let rc = Rc::new(entries);
        memo.insert((level, prof.clone()), Rc::clone(&rc));
        rc
    }

    let mut memo: Memo = HashMap::new();
    let entries = table(lambda, lambda, i, b, d, &mut memo);
    Ok(FourierTable {
        lambda,
        d,
        entries: entries.as_ref().clone(),
    })
}

// ---------------------------------------------------------------------------
// Good positions, census, and the decay budget
// ---------------------------------------------------------------------------

/// Digit positions `μ` of `d` that are *good* for `(λ, d, i, r, m)`:
/// (a) `0 <= μ <= λ - m`;
/// (b) the digit window `d_{μ+m-1} … d_μ` reads `0…01`;
/// (c) the `μ`-digit transform of the profile satisfies
///     `T^{(μ)}_{d,0}(i)(r) ≡ 1 (mod 2^m)`.
pub fn good_positions(lambda: u32, d: u64, i: &ShiftProfile, m: u32) -> Vec<u32> {
    assert!(m >= 1);
    let mut out = Vec::new();
    if lambda < m {
        return out;
    }
    let r = i.offset;
    let ir = i.value_at_offset();
    let window_mask = (1u64 << m) - 1;
    let mod_mask = (1u128 << m) - 1;
    for mu in 0..=(lambda - m) {
        if (d >> mu) & window_mask != 1 {
            continue;
        }
        let low_d = if mu == 0 { 0 } else { d & ((1u64 << mu) - 1) };
        let transformed = (ir as u128 + r as u128 * low_d as u128) >> mu;
        if transformed & mod_mask == 1 {
            out.push(mu);
        }
    }
    out
}

/// The index families `A_1` (type-1 interval starts) and `A_2` (type-2)
/// that tile `[0, λ)` in alternating blocks of width `x = ν₂(r)`.
pub fn type_sets(lambda: u32, x: u32, m: u32) -> (Vec<u32>, Vec<u32>) {
    assert!(x >= 1 && m >= 1);
    let outer = lambda / (2 * x);
    let inner = x / m;
    let mut a1 = Vec::new();
    let mut a2 = Vec::new();
    for l1 in 0..outer {
        for l0 in 0..inner {
            a1.push(2 * l1 * x + l0 * m);
            a2.push((2 * l1 + 1) * x + l0 * m);
        }
    }
    (a1, a2)
}

/// `λ₀ = ⌊λ/(2x)⌋·⌊x/m⌋`, the common size of `A_1` and `A_2`.
pub fn lambda0(lambda: u32, x: u32, m: u32) -> u32 {
    if x == 0 {
        return 0;
    }
    (lambda / (2 * x)) * (x / m)
}

/// Closed form for the census: the number of `d < 2^λ` whose good-position
/// set inside `A_2` is a fixed `k`-element subset equals
/// `2^{λ-2mλ₀} (2^{2m}-1)^{λ₀-k}`.
pub fn good_census_formula(lambda: u32, x: u32, m: u32, k: u32) -> BigUint {
    let l0 = lambda0(lambda, x, m);
    assert!(k <= l0, "subset larger than A_2");
    let free = BigUint::one() << (lambda - 2 * m * l0);
    let block = (BigUint::one() << (2 * m)) - BigUint::one();
    free * num_traits::pow::pow(block, (l0 - k) as usize)
}

/// Brute-force census over all `d < 2^λ`: classifies every `d` by its set
/// of good positions inside `A_2` and returns the subset → count map.
pub fn good_set_census_all(
    lambda: u32,
    m: u32,
    i: &ShiftProfile,
) -> Result<BTreeMap<Vec<u32>, u64>> {
    let r = i.offset();
    let x = nu2(r);
    if x == 0 || m == 0 || m > x {
        return Err(Error::invalid("census needs 1 <= m <= ν₂(r)"));
    }
    if lambda < 2 * x {
        return Err(Error::invalid("census needs lambda >= 2·ν₂(r)"));
    }
    if lambda > 24 {
        return Err(Error::invalid("census brute force is capped at lambda = 24"));
    }
    let (_, a2) = type_sets(lambda, x, m);
    let l0 = a2.len();
    if l0 > 20 {
        return Err(Error::invalid("A_2 too large to classify"));
    }
    let ir = i.value_at_offset();
    let mut counts = vec![0u64; 1 << l0];
    let window_mask = (1u64 << m) - 1;
    let mod_mask = (1u128 << m) - 1;
    for d in 0..(1u64 << lambda) {
        let mut key = 0usize;
        for (bit, &mu) in a2.iter().enumerate() {
            if (d >> mu) & window_mask != 1 {
                continue;
            }
            let low_d = if mu == 0 { 0 } else { d & ((1u64 << mu) - 1) };
            let transformed = (ir as u128 + r as u128 * low_d as u128) >> mu;
            if transformed & mod_mask == 1 {
                key |= 1 << bit;
            }
        }
        counts[key] += 1;
    }
    let mut out = BTreeMap::new();
    for (key, &count) in counts.iter().enumerate() {
        if count == 0 && key != 0 {
            continue;
        }
        let subset: Vec<u32> = a2
            .iter()
            .enumerate()
            .filter(|(bit, _)| key >> bit & 1 == 1)
            .map(|(_, &mu)| mu)
            .collect();
        out.insert(subset, count);
    }
    Ok(out)
}

/// Census count for one target subset `M ⊆ A_2`.
pub fn good_set_census(
    lambda: u32,
    m: u32,
    i: &ShiftProfile,
    target: &[u32],
) -> Result<u64> {
    let all = good_set_census_all(lambda, m, i)?;
    let mut key: Vec<u32> = target.to_vec();
    key.sort_unstable();
    Ok(all.get(&key).copied().unwrap_or(0))
}

/// `ν₂(r)`: the exponent of 2 in `r`.
pub fn nu2(r: u64) -> u32 {
    assert!(r >= 1);
    r.trailing_zeros()
}

/// The assembled decay budget `2^λ (1 - 2/16^m)^{λ₀}` together with the
/// proof-level lower bound `λ₀ >= λ/(8m)` when `2m <= x <= λ/4`.
#[derive(Debug, Clone, Serialize)]
pub struct DecayBudget {
    pub lambda: u32,
    pub x: u32,
    pub m: u32,
    pub lambda0: u32,
    pub bound: f64,
    /// `λ/(8m)`, reported when the hypotheses `2m <= ν₂(r) <= λ/4` hold.
    pub lambda0_lower: Option<f64>,
}

pub fn decay_budget(lambda: u32, r: u64, m: u32) -> DecayBudget {
    assert!(m >= 1 && r >= 1 && lambda <= 64);
    let x = nu2(r);
    let l0 = lambda0(lambda, x, m);
    let loss = 1.0 - 2.0 / 16f64.powi(m as i32);
    let bound = 2f64.powi(lambda as i32) * loss.powi(l0 as i32);
    let hyp = 2 * m <= x && 4 * x <= lambda;
    DecayBudget {
        lambda,
        x,
        m,
        lambda0: l0,
        bound,
        lambda0_lower: hyp.then(|| lambda as f64 / (8.0 * m as f64)),
    }
}

// ---------------------------------------------------------------------------
// Gap and estimate checkers
// ---------------------------------------------------------------------------

/// One comparison of the prepared-profile gap: `lhs = |G_{z+m}(h, d·2^m+1)|²`
/// against `rhs = (1 - 2/4^m)·max_e |G_z^{T^{(m)}_{1,e}(i)}(h, d)|²`.
#[derive(Debug, Clone, Serialize)]
pub struct SavingReport {
    pub h: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn check_saving_preconditions(z: u32, m: u32, i: &ShiftProfile, b: &CoeffBlock, d: u64) -> Result<()> {
    if i.window_len() != b.len() || i.offset() != b.r() {
        return Err(Error::invalid("profile and coefficient block disagree on (L, r)"));
    }
    let l = b.len() as u32;
    if m < 5 || !(1u32 << (m - 5) <= l && l < 1u32 << (m - 4)) {
        return Err(Error::invalid("need 2^{m-5} <= L < 2^{m-4}"));
    }
    if nu2(b.r()) < 2 * m {
        return Err(Error::invalid("need ν₂(r) >= 2m"));
    }
    let prepared = i.value_at_offset() % (1u64 << m);
    if prepared != 1 && prepared != 2 {
        return Err(Error::invalid("profile is not prepared: i(r) mod 2^m must be 1 or 2"));
    }
    if z + m > 16 {
        return Err(Error::invalid("saving check is capped at z + m <= 16"));
    }
    if d >> z != 0 {
        return Err(Error::invalid("need d < 2^z"));
    }
    Ok(())
}

/// Runs the gap comparison for every `h < 2^{z+m}` at once, sharing the
/// table computations.
pub fn saving_gap_check_all(
    z: u32,
    m: u32,
    i: &ShiftProfile,
    b: &CoeffBlock,
    d: u64,
) -> Result<Vec<SavingReport>> {
    check_saving_preconditions(z, m, i, b, d)?;
    let coeffs = b.coeffs();
    let lhs_table = fourier_direct(z + m, i, &coeffs, (d << m) | 1)?;
    let mut rhs_tables = Vec::with_capacity(1 << m);
    for e in 0..(1u64 << m) {
        let ti = transform_profile(i, m, 1, e);
        rhs_tables.push(fourier_direct(z, &ti, &coeffs, d)?);
    }
    let factor = 1.0 - 2.0 / 4f64.powi(m as i32);
    let size = 1u64 << (z + m);
    let mut out = Vec::with_capacity(size as usize);
    for h in 0..size {
        let lhs = lhs_table.entry(h).norm_sqr();
        let max_e = rhs_tables
            .iter()
            .map(|t| t.entry(h).norm_sqr())
            .fold(0.0, f64::max);
        let rhs = factor * max_e;
        out.push(SavingReport {
            h,
            lhs,
            rhs,
            holds: lhs <= rhs + TABLE_TOLERANCE,
        });
    }
    Ok(out)
}

/// Single-point variant of [`saving_gap_check_all`].
pub fn saving_gap_check(
    z: u32,
    m: u32,
    i: &ShiftProfile,
    b: &CoeffBlock,
    d: u64,
    h: u64,
) -> Result<SavingReport> {
    check_saving_preconditions(z, m, i, b, d)?;
    let coeffs = b.coeffs();
    let lhs = fourier_direct(z + m, i, &coeffs, (d << m) | 1)?
        .entry(h)
        .norm_sqr();
    let mut max_e: f64 = 0.0;
    for e in 0..(1u64 << m) {
        let ti = transform_profile(i, m, 1, e);
        let t = fourier_direct(z, &ti, &coeffs, d)?;
        max_e = max_e.max(t.entry(h).norm_sqr());
    }
    let rhs = (1.0 - 2.0 / 4f64.powi(m as i32)) * max_e;
    Ok(SavingReport {
        h,
        lhs,
        rhs,
        holds: lhs <= rhs + TABLE_TOLERANCE,
    })
}

/// Checks `max_h |G_λ(h,d)|² <= (1 - 2/4^m)^k` where `k` counts the good
/// positions of `d`; also carries the Parseval sum of the visited table.
#[derive(Debug, Clone, Serialize)]
pub struct SingleEstimateReport {
    pub lambda: u32,
    pub d: u64,
    pub good_count: u32,
    pub max_sq: f64,
    pub bound: f64,
    pub holds: bool,
    pub parseval: f64,
}

pub fn single_estimate_check(
    lambda: u32,
    i: &ShiftProfile,
    b: &CoeffBlock,
    d: u64,
) -> Result<SingleEstimateReport> {
    if lambda > 16 {
        return Err(Error::invalid("single-estimate check capped at lambda <= 16"));
    }
    let m = b.block_scale_m();
    if i.window_len() != b.len() || i.offset() != b.r() {
        return Err(Error::invalid("profile and coefficient block disagree on (L, r)"));
    }
    if nu2(b.r()) < 2 * m {
        return Err(Error::invalid("need ν₂(r) >= 2m"));
    }
    let good = good_positions(lambda, d, i, m);
    let table = fourier_direct(lambda, i, &b.coeffs(), d)?;
    let max_sq = table.max_norm_sqr();
    let bound = (1.0 - 2.0 / 4f64.powi(m as i32)).powi(good.len() as i32);
    Ok(SingleEstimateReport {
        lambda,
        d,
        good_count: good.len() as u32,
        max_sq,
        bound,
        holds: max_sq <= bound + TABLE_TOLERANCE,
        parseval: table.parseval_sum(),
    })
}

// ---------------------------------------------------------------------------
// Identity checkers used by the property suite and the CLI lemma runner
// ---------------------------------------------------------------------------

/// The sandwich `T_{d,0}(i)(ℓ) <= T_{d,e}(i)(ℓ) <= T_{d,0}(i)(ℓ) + 1` on
/// the active windows, for all `e < 2^m`.
pub fn sandwich_holds(i: &ShiftProfile, m: u32, d: u64) -> bool {
    let base = transform_profile(i, m, d, 0);
    for e in 0..(1u64 << m) {
        let t = transform_profile(i, m, d, e);
        let ok = base
            .head
            .iter()
            .zip(&t.head)
            .chain(base.tail.iter().zip(&t.tail))
            .all(|(&b0, &te)| te >= b0 && te <= b0 + 1);
        if !ok {
            return false;
        }
    }
    true
}

/// `|G_λ(h,d)|²` reproduced from level-0 data through the fully iterated
/// recurrence: a `4^λ`-term double sum over digit paths with ±1 weights.
pub fn psi_iterated_sq(lambda: u32, i: &ShiftProfile, b: &SparseCoeffs, d: u64, h: u64) -> f64 {
    assert!(lambda <= 8, "full-depth expansion is exponential");
    let size = 1u64 << lambda;
    let mut acc = Complex64::new(0.0, 0.0);
    for e1 in 0..size {
        let w1 = weight_product(i, b, lambda, d, e1);
        for e2 in 0..size {
            let w2 = weight_product(i, b, lambda, d, e2);
            let phase = e_frac(-(e1 as f64 - e2 as f64) * (h as f64) / size as f64);
            acc += phase * w1 * w2.conj() / (size as f64 * size as f64);
        }
    }
    acc.re
}

/// The coarse digit-peeling estimate
/// `|G_λ(h, 2^m·d + d')|² <= max_{e<2^m} |G_{λ-m}^{T^{(m)}_{d',e}(i)}(h, d)|²`.
pub fn trivial_estimate_check(
    lambda: u32,
    m: u32,
    i: &ShiftProfile,
    b: &SparseCoeffs,
    d: u64,
    d_low: u64,
    h: u64,
) -> Result<(f64, f64, bool)> {
    assert!(m <= lambda && d_low >> m == 0);
    let full = fourier_direct(lambda, i, b, (d << m) | d_low)?;
    let lhs = full.entry(h).norm_sqr();
    let mut rhs: f64 = 0.0;
    for e in 0..(1u64 << m) {
        let ti = transform_profile(i, m, d_low, e);
        let t = fourier_direct(lambda - m, &ti, b, d)?;
        rhs = rhs.max(t.entry(h).norm_sqr());
    }
    Ok((lhs, rhs, lhs <= rhs + TABLE_TOLERANCE))
}

/// The preparation count: for fixed `(y, d0, i)`, the number of
/// `d1 < 2^m` such that `T^{(x+y)}_{d,0}(i)(r) ≡ 1 (mod 2^m)` holds for
/// every `d2 < 2^{x-m}`, with `d = 2^{y+m}·d2 + 2^y·d1 + d0`. Exactly one
/// works, and no other `d1` works for any `d2`.
pub fn prepare_unique_count(i: &ShiftProfile, m: u32, y: u32, d0: u64) -> Result<(u32, bool)> {
    let r = i.offset();
    let x = nu2(r);
    if m > x {
        return Err(Error::invalid("prepare count needs m <= ν₂(r)"));
    }
    if d0 >> y != 0 {
        return Err(Error::invalid("need d0 < 2^y"));
    }
    let level = x + y;
    if level > 40 {
        return Err(Error::invalid("prepare count capped at ν₂(r) + y <= 40"));
    }
    let ir = i.value_at_offset() as u128;
    let mod_mask = (1u128 << m) - 1;
    let mut works_for_all = 0u32;
    let mut works_for_some_not_all = false;
    for d1 in 0..(1u64 << m) {
        let mut all = true;
        let mut any = false;
        for d2 in 0..(1u64 << (x - m)) {
            let d = (d2 << (y + m)) | (d1 << y) | d0;
            let low = d & ((1u128 << level) as u64).wrapping_sub(1);
            let transformed = (ir + r as u128 * low as u128) >> level;
            let ok = transformed & mod_mask == 1;
            all &= ok;
            any |= ok;
        }
        if all {
            works_for_all += 1;
        } else if any {
            works_for_some_not_all = true;
        }
    }
    Ok((works_for_all, !works_for_some_not_all))
}
