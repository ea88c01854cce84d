//! Farey series enumeration and the scaled rational approximation used to
//! strip low binary digits from Beatty sequences.
//!
//! `farey_approx_scaled(α, mu, sigma)` picks the fraction `p/q` assigned to
//! `α/2^mu` by the Farey dissection of order `2^{mu+sigma}`: take the
//! neighbours `a/b <= x < c/d` and choose `a/b` when `x` lies left of the
//! mediant, `c/d` otherwise. The choice guarantees
//! `|q·α - p·2^mu| < 2^{-sigma}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

/// A reduced nonnegative fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl Frac {
    fn new(num: u64, den: u64) -> Self {
        debug_assert!(den >= 1);
        Frac { num, den }
    }
}

impl std::fmt::Display for Frac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// The Farey series of order `n` restricted to `[0, 1]`, in ascending
/// order, generated by the classical next-term recurrence. The full series
/// is this list shifted by arbitrary integers.
pub fn farey_sequence(order: u64) -> Vec<Frac> {
    assert!(
        (1..=100_000).contains(&order),
        "Farey order must be in 1..=10^5 (the series has ~3n²/π² entries)"
    );
    let mut out = vec![Frac::new(0, 1)];
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, order);
    while (a, b) != (1, 1) {
        let k = (order + b) / d;
        let (na, nb) = (c, d);
        let (nc, nd) = (k * c - a, k * d - b);
        a = na;
        b = nb;
        c = nc;
        d = nd;
        out.push(Frac::new(a, b));
    }
    out
}

/// Adjacent pairs of the Farey series of order `n` within `[0, 1]`.
pub fn farey_neighbors(order: u64) -> Vec<(Frac, Frac)> {
    let seq = farey_sequence(order);
    seq.windows(2).map(|w| (w[0], w[1])).collect()
}

/// The scaled Farey approximation `p/q ≈ α/2^mu` of order `2^{mu+sigma}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FareyApprox {
    pub p: u64,
    pub q: u64,
    pub mu: u32,
    pub sigma: u32,
}

/// Assigns the fraction `p(α)/q(α)` to `α/2^mu` via the Farey dissection
/// of order `2^{mu+sigma}`, using Stern-Brocot descent with run-length
/// jumps instead of materializing the series.
pub fn farey_approx_scaled(alpha: &Real, mu: u32, sigma: u32) -> Result<FareyApprox> {
    if sigma < 1 || mu + sigma > 40 {
        return Err(Error::invalid(
            "farey_approx_scaled needs sigma >= 1 and mu + sigma <= 40",
        ));
    }
    let order = 1u64 << (mu + sigma);
    let x = alpha.scale(&BigRational::new(
        BigInt::from(1),
        BigInt::from(1u64) << mu,
    ));
    if x.sign()? == std::cmp::Ordering::Less {
        return Err(Error::invalid("farey_approx_scaled needs alpha >= 0"));
    }
    let whole = x.floor()?;
    let whole_u: u64 = u64::try_from(&whole)
        .map_err(|_| Error::invalid("alpha/2^mu too large"))?;
    let frac = x.sub(&Real::from_rational(BigRational::from_integer(whole)));

    // x >= m/n, resolved exactly (ladder for irrational values). Probe
    // numerators can exceed u64 during the binary search, so take u128.
    let ge = |value: &Real, m: u128, n: u128| -> Result<bool> {
        Ok(value.cmp_rational(&BigRational::new(BigInt::from(m), BigInt::from(n)))?
            != std::cmp::Ordering::Less)
    };

    // Stern-Brocot descent on frac in [0, 1) with neighbours
    // a/b <= frac < c/d, bc - ad = 1 throughout.
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, 1u64);
    loop {
        let mut moved = false;
        // Walk the lower neighbour right: (a,b) <- (a+kc, b+kd).
        if b + d <= order {
            let k_den = (order - b) / d;
            if k_den >= 1 {
                // Largest k <= k_den with (a+kc)/(b+kd) <= frac.
                let mut lo = 0u64;
                let mut hi = k_den;
                while lo < hi {
                    let mid = lo + (hi - lo).div_ceil(2);
                    let (pn, pd) = (
                        a as u128 + mid as u128 * c as u128,
                        b as u128 + mid as u128 * d as u128,
                    );
                    if ge(&frac, pn, pd)? {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                if lo >= 1 {
                    a += lo * c;
                    b += lo * d;
                    moved = true;
                }
            }
        }
        // Walk the upper neighbour left: (c,d) <- (ka+c, kb+d), keeping
        // frac < c/d strict.
        if d + b <= order {
            let k_den = (order - d) / b;
            if k_den >= 1 {
                let mut lo = 0u64;
                let mut hi = k_den;
                while lo < hi {
                    let mid = lo + (hi - lo).div_ceil(2);
                    let (pn, pd) = (
                        mid as u128 * a as u128 + c as u128,
                        mid as u128 * b as u128 + d as u128,
                    );
                    if !ge(&frac, pn, pd)? {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                if lo >= 1 {
                    c += lo * a;
                    d += lo * b;
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
    debug_assert!(b <= order && d <= order && b + d > order);

    // Mediant rule: left of the mediant keeps (a,b).
    let (p0, q0) = if !ge(&frac, (a + c) as u128, (b + d) as u128)? {
        (a, b)
    } else {
        (c, d)
    };
    Ok(FareyApprox {
        p: p0 + whole_u * q0,
        q: q0,
        mu,
        sigma,
    })
}

impl FareyApprox {
    /// The dissection error `|q·α - p·2^mu|` as an exact real; the
    /// construction guarantees it is below `2^{-sigma}`.
    pub fn dissection_error(&self, alpha: &Real) -> Real {
        let shift = BigRational::from_integer(BigInt::from(1u64) << self.mu);
        
        alpha
            .scale(&BigRational::from_integer(BigInt::from(self.q)))
            .sub(&Real::from_rational(
                shift * BigRational::from_integer(BigInt::from(self.p)),
            ))
    }
}
