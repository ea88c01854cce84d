//! Exact machinery for studying the Thue-Morse sequence along Beatty
//! sequences `⌊nα+β⌋` and Piatetski-Shapiro sequences `⌊n^c⌋`.
//!
//! The crate is organized around a handful of subsystems:
//!
//! - [`digits`]: binary sum-of-digits functions (full, truncated, and
//!   two-fold restricted), Thue-Morse values, and the unit-circle
//!   evaluator `e(x) = exp(2πix)`.
//! - [`powerfloor`]: exact evaluation of `⌊n^c⌋` for rational and
//!   high-precision real exponents, plus the segment linearization that
//!   replaces `n^c` by a Beatty sequence on short intervals.
//! - [`beatty`]: Beatty terms, the exact nα-discrepancy, mean-discrepancy
//!   profiles, interval class counting, and Farey/Stern-Brocot rational
//!   approximation.
//! - [`fourier`]: discrete Fourier coefficients of restricted digit sums,
//!   their digit-level recurrence, shift-profile transforms and weights,
//!   good positions, and the associated counting and decay budgets.
//! - [`census`]: block-occurrence counting along arithmetic progressions,
//!   Beatty sequences and `⌊n^c⌋`, plus distribution-average experiments.
//! - [`sumlab`]: direct evaluation of the exponential sums behind the
//!   averages, and executable checkers for the supporting inequalities
//!   (van der Corput, carry propagation, correlation identity).
//!
//! All operations are deterministic; randomized experiments take explicit
//! seeds. Everything is safe to call from multiple threads.
//!
//! ```
//! use tmps::digits::thue_morse;
//! use tmps::powerfloor::{floor_power, ExponentSpec};
//!
//! // t(⌊10^(7/5)⌋): the floor is 25 = 11001₂, three one-bits.
//! let c = ExponentSpec::parse("7/5")?;
//! assert_eq!(floor_power(10, &c)?, 25);
//! assert_eq!(thue_morse(25), 1);
//!
//! // The decimal form of the same exponent runs through the certified
//! // interval ladder and must agree.
//! let c_decimal = ExponentSpec::parse("1.4")?;
//! assert_eq!(floor_power(10, &c_decimal)?, 25);
//! # Ok::<(), tmps::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod beatty;
pub mod census;
pub mod digits;
pub mod fourier;
pub mod powerfloor;
pub mod real;
pub mod sumlab;

mod error;
mod fft;

pub use error::{Error, Result};
pub use real::Real;

pub use beatty::{BeattyParams, FareyApprox};
pub use census::{AverageReport, FreqReport};
pub use digits::{DigitWindow, Word};
pub use fourier::{CoeffBlock, FourierTable, ShiftProfile, SparseCoeffs};
pub use powerfloor::{ExponentSpec, Segment};
pub use sumlab::SumParams;
