//! Binary digit functions and the Thue-Morse sequence.
//!
//! `sum_digits` counts 1-bits, `sum_digits_window` restricts the count to a
//! digit window `[mu, lambda)`, and `thue_morse` is the parity of the digit
//! sum. Windowed counts are `2^lambda`-periodic in the argument.

use num_bigint::BigUint;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of 1-bits in the binary expansion of `n`.
#[inline]
pub fn sum_digits(n: u64) -> u32 {
    n.count_ones()
}

/// `sum_digits` for arguments that exceed 64 bits.
#[inline]
pub fn sum_digits_u128(n: u128) -> u32 {
    n.count_ones()
}

/// `sum_digits` on arbitrary-width nonnegative integers.
pub fn sum_digits_big(n: &BigUint) -> u64 {
    n.iter_u64_digits().map(|d| u64::from(d.count_ones())).sum()
}

/// A digit window `[mu, lambda)`; `mu = 0` gives the plain truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitWindow {
    mu: u32,
    lambda: u32,
}

impl DigitWindow {
    pub fn new(mu: u32, lambda: u32) -> Result<Self> {
        if mu > lambda {
            return Err(Error::invalid(format!(
                "digit window needs mu <= lambda, got mu={mu}, lambda={lambda}"
            )));
        }
        Ok(DigitWindow { mu, lambda })
    }

    /// The window `[0, lambda)`.
    pub fn truncated(lambda: u32) -> Self {
        DigitWindow { mu: 0, lambda }
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }
}

/// Counts the 1-bits of `n` at positions `mu, ..., lambda-1`.
///
/// The result is `2^lambda`-periodic in `n`. Positions at or above 64 hold
/// no bits of a `u64`; use [`sum_digits_window_big`] for wider arguments.
#[inline]
pub fn sum_digits_window(n: u64, w: DigitWindow) -> u32 {
    let shifted = if w.mu >= 64 { 0 } else { n >> w.mu };
    let width = w.lambda - w.mu;
    let masked = if width >= 64 {
        shifted
    } else {
        shifted & ((1u64 << width) - 1)
    };
    masked.count_ones()
}

/// Windowed digit count for arbitrary-width arguments.
pub fn sum_digits_window_big(n: &BigUint, w: DigitWindow) -> u64 {
    let shifted = n >> w.mu;
    let masked = shifted & ((BigUint::from(1u8) << (w.lambda - w.mu)) - 1u8);
    sum_digits_big(&masked)
}

/// The truncated digit sum: 1-bits of `n` at positions below `lambda`.
#[inline]
pub fn truncated_sum_digits(n: u64, lambda: u32) -> u32 {
    sum_digits_window(n, DigitWindow::truncated(lambda))
}

/// `n`-th term of the Thue-Morse sequence: parity of the binary digit sum.
#[inline]
pub fn thue_morse(n: u64) -> u8 {
    (sum_digits(n) & 1) as u8
}

#[inline]
pub fn thue_morse_u128(n: u128) -> u8 {
    (sum_digits_u128(n) & 1) as u8
}

pub fn thue_morse_big(n: &BigUint) -> u8 {
    (sum_digits_big(n) & 1) as u8
}

/// `e(x) = exp(2πix)`, evaluated from the fractional part of `x` so that
/// large arguments keep full precision.
#[inline]
pub fn e_frac(x: f64) -> Complex64 {
    let t = x - x.floor();
    let (sin, cos) = (std::f64::consts::TAU * t).sin_cos();
    Complex64::new(cos, sin)
}

/// A binary pattern `ω ∈ {0,1}^L`, the block whose occurrences are counted.
///
/// Bit `k` of `bits` is `ω_k`, so the word is stored little-endian with
/// `ω_0` first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    bits: u32,
    len: u8,
}

impl Word {
    pub const MAX_LEN: u8 = 32;

    pub fn new(bits: u32, len: u8) -> Result<Self> {
        if len == 0 || len > Self::MAX_LEN {
            return Err(Error::invalid(format!(
                "word length must be in 1..={}, got {len}",
                Self::MAX_LEN
            )));
        }
        if len < 32 && bits >> len != 0 {
            return Err(Error::invalid(format!(
                "word value {bits:#b} does not fit in {len} bits"
            )));
        }
        Ok(Word { bits, len })
    }

    /// Parses a pattern like `"011"` (`ω_0` first).
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > Self::MAX_LEN as usize {
            return Err(Error::invalid(format!("bad word literal {s:?}")));
        }
        let mut bits = 0u32;
        for (k, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << k,
                _ => return Err(Error::invalid(format!("bad word literal {s:?}"))),
            }
        }
        Word::new(bits, s.len() as u8)
    }

    /// The word length L; words are never empty.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u8 {
        self.len
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `ω_k` as 0 or 1.
    pub fn bit(&self, k: u8) -> u8 {
        debug_assert!(k < self.len);
        ((self.bits >> k) & 1) as u8
    }

    /// All `2^L` words of length `len`, in increasing `bits` order.
    pub fn all_of_len(len: u8) -> impl Iterator<Item = Word> {
        assert!((1..=Self::MAX_LEN).contains(&len));
        (0..(1u64 << len)).map(move |b| Word {
            bits: b as u32,
            len,
        })
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for k in 0..self.len {
            write!(f, "{}", self.bit(k))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    /// Independent oracle: walk the bits of `n` one by one.
    fn bit_loop(mut n: u64) -> u32 {
        let mut s = 0;
        while n > 0 {
            s += (n & 1) as u32;
            n >>= 1;
        }
        s
    }

    #[test]
    fn sum_digits_examples() {
        assert_eq!(sum_digits(0), 0);
        assert_eq!(sum_digits(255), 8);
        assert_eq!(sum_digits(6), 2);
    }

    #[test]
    fn sum_digits_matches_bit_loop_exhaustively() {
        for n in 0..(1u64 << 20) {
            assert_eq!(sum_digits(n), bit_loop(n));
        }
    }

    #[test]
    fn sum_digits_big_matches_and_extends() {
        for n in (0..(1u64 << 16)).step_by(97) {
            assert_eq!(sum_digits_big(&BigUint::from(n)), u64::from(sum_digits(n)));
        }
        // 2^200 - 1 has 200 one-bits.
        let big = (BigUint::one() << 200u32) - 1u8;
        assert_eq!(sum_digits_big(&big), 200);
    }

    #[test]
    fn window_examples() {
        assert_eq!(sum_digits_window(17, DigitWindow::new(0, 4).unwrap()), 1);
        assert_eq!(sum_digits_window(13, DigitWindow::new(2, 4).unwrap()), 2);
    }

    #[test]
    fn window_is_difference_of_truncations() {
        for n in 0..(1u64 << 16) {
            for lambda in 0..=16u32 {
                let s_lambda = truncated_sum_digits(n, lambda);
                for mu in 0..=lambda {
                    let w = DigitWindow::new(mu, lambda).unwrap();
                    let s_mu = truncated_sum_digits(n, mu);
                    assert_eq!(sum_digits_window(n, w), s_lambda - s_mu);
                }
            }
        }
    }

    #[test]
    fn window_periodicity_exhaustive() {
        for lambda in 0..=12u32 {
            let period = 1u64 << lambda;
            for mu in 0..=lambda {
                let w = DigitWindow::new(mu, lambda).unwrap();
                for n in 0..(1u64 << 13) {
                    assert_eq!(sum_digits_window(n + period, w), sum_digits_window(n, w));
                }
            }
        }
    }

    #[test]
    fn window_rejects_inverted_bounds() {
        assert!(DigitWindow::new(5, 3).is_err());
    }

    #[test]
    fn window_big_matches_small() {
        for n in (0..(1u64 << 14)).step_by(13) {
            for (mu, lambda) in [(0, 5), (2, 7), (3, 3), (0, 64)] {
                let w = DigitWindow::new(mu, lambda).unwrap();
                assert_eq!(
                    sum_digits_window_big(&BigUint::from(n), w),
                    u64::from(sum_digits_window(n, w))
                );
            }
        }
    }

    #[test]
    fn thue_morse_prefix() {
        let expect = [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0];
        for (n, &t) in expect.iter().enumerate() {
            assert_eq!(thue_morse(n as u64), t);
        }
    }

    #[test]
    fn thue_morse_is_digit_sum_parity() {
        for n in 0..(1u64 << 20) {
            assert_eq!(u32::from(thue_morse(n)), sum_digits(n) % 2);
        }
    }

    #[test]
    fn thue_morse_recurrences() {
        for n in 0..100_000u64 {
            assert_eq!(thue_morse(2 * n), thue_morse(n));
            assert_eq!(thue_morse(2 * n + 1), 1 - thue_morse(n));
        }
    }

    #[test]
    fn e_frac_examples() {
        let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-12;
        assert!(close(e_frac(0.0), Complex64::new(1.0, 0.0)));
        assert!(close(e_frac(0.5), Complex64::new(-1.0, 0.0)));
        assert!(close(e_frac(0.25), Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn e_frac_unit_modulus_and_periodic() {
        for k in 0..1000 {
            let x = (k as f64) * 0.377 - 200.0;
            assert!((e_frac(x).norm() - 1.0).abs() < 1e-12);
            assert!((e_frac(x + 1.0) - e_frac(x)).norm() < 1e-12);
        }
    }

    #[test]
    fn word_roundtrip() {
        let w = Word::parse("0110").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.bit(0), 0);
        assert_eq!(w.bit(1), 1);
        assert_eq!(w.to_string(), "0110");
        assert!(Word::parse("").is_err());
        assert!(Word::parse("012").is_err());
        assert_eq!(Word::all_of_len(3).count(), 8);
    }
}
