//! Exact extreme discrepancy of a finite point multiset on the circle.
//!
//! `D_N = sup |count/N - length|` over all half-open arcs `[y, y+x)` with
//! `0 <= x <= 1` and arbitrary placement `y`. The supremum is realized in
//! the limit by arcs whose endpoints touch points of the multiset: either
//! a closed arc `[v_i, v_j]` packing as many points as possible into a
//! short length (overfill), or an open arc `(v_s, v_e)` packing as much
//! length as possible around few points (underfill). Scanning both
//! families with a sliding-window extremum gives the exact value in
//! `O(M)` after sorting, where `M` is the number of distinct points.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Exact discrepancy of the multiset `{nα mod 1 : n < N}` for rational α.
pub fn discrepancy(alpha: &BigRational, n: u64) -> BigRational {
    assert!(n >= 1, "discrepancy needs at least one point");
    let den = alpha.denom();
    let q = den
        .to_u128()
        .filter(|&q| q <= 1 << 63)
        .unwrap_or_else(|| panic!("denominator too large for exact discrepancy"));
    // Step through residues of n·p mod q.
    let p = alpha.numer().mod_floor(den).to_u128().unwrap();
    let mut points = Vec::with_capacity(n as usize);
    let mut cur: u128 = 0;
    for _ in 0..n {
        points.push(cur);
        cur += p;
        if cur >= q {
            cur -= q;
        }
    }
    discrepancy_residues(&mut points, q, n)
}

/// Exact discrepancy of the multiset `{r/q : r ∈ points}`; `points` are
/// residues mod `q` and get sorted in place.
pub fn discrepancy_residues(points: &mut [u128], q: u128, n: u64) -> BigRational {
    assert!(!points.is_empty() && points.len() as u64 == n);
    points.sort_unstable();
    let mut vals = Vec::new();
    let mut counts = Vec::new();
    for &p in points.iter() {
        debug_assert!(p < q);
        if vals.last() == Some(&p) {
            *counts.last_mut().unwrap() += 1;
        } else {
            vals.push(p);
            counts.push(1u64);
        }
    }
    discrepancy_sorted_counts(&vals, &counts, q, n)
}

/// Core routine over sorted distinct values with multiplicities.
///
/// All candidate arc values are compared after scaling by `N·q`, which
/// keeps the whole computation in exact integers.
pub(crate) fn discrepancy_sorted_counts(
    vals: &[u128],
    counts: &[u64],
    q: u128,
    n: u64,
) -> BigRational {
    let m = vals.len();
    assert!(m >= 1 && counts.len() == m);
    let qi = q as i128;
    let ni = n as i128;
    // Duplicated positions u_t (t < 2M) and prefix counts C_t (t <= 2M).
    let u = |t: usize| -> i128 { vals[t % m] as i128 + qi * (t / m) as i128 };
    let mut prefix = vec![0i128; 2 * m + 1];
    for t in 0..2 * m {
        prefix[t + 1] = prefix[t] + counts[t % m] as i128;
    }
    let mut best: i128 = 0;

    // Overfill: closed arcs [u_i, u_j], i in [0,M), i <= j <= i+M-1.
    // Scaled value = A_j - B_i with A_j = q·C_{j+1} - N·u_j and
    // B_i = q·C_i - N·u_i; minimize B_i over the window.
    let a_of = |j: usize| qi * prefix[j + 1] - ni * u(j);
    let b_of = |i: usize| qi * prefix[i] - ni * u(i);
    let mut deque: VecDeque<usize> = VecDeque::new();
    for j in 0..2 * m {
        if j < m {
            // i = j becomes available.
            while let Some(&back) = deque.back() {
                if b_of(back) >= b_of(j) {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(j);
        }
        while let Some(&front) = deque.front() {
            if front + m <= j {
                deque.pop_front();
            } else {
                break;
            }
        }
        if let Some(&front) = deque.front() {
            best = best.max(a_of(j) - b_of(front));
        }
    }

    // Underfill: open arcs (u_s, u_e), s in [0,M), s+1 <= e <= s+M.
    // Scaled value = E_e - S_s with E_e = N·u_e - q·C_e and
    // S_s = N·u_s - q·C_{s+1}; maximize E_e over the window.
    let e_of = |e: usize| ni * u(e) - qi * prefix[e];
    let s_of = |s: usize| ni * u(s) - qi * prefix[s + 1];
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut next_e = 1usize;
    for s in 0..m {
        while next_e <= s + m {
            while let Some(&back) = deque.back() {
                if e_of(back) <= e_of(next_e) {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(next_e);
            next_e += 1;
        }
        while let Some(&front) = deque.front() {
            if front <= s {
                deque.pop_front();
            } else {
                break;
            }
        }
        if let Some(&front) = deque.front() {
            best = best.max(e_of(front) - s_of(s));
        }
    }

    BigRational::new(BigInt::from(best), BigInt::from(ni) * BigInt::from(qi))
}

/// Float-path discrepancy for irrational α: the same sliding-window scan
/// over the points `{frac(nα)}`, evaluated in f64.
pub fn discrepancy_f64(alpha: f64, n: u64) -> f64 {
    assert!(n >= 1);
    let mut pts: Vec<f64> = (0..n)
        .map(|k| {
            let x = alpha * k as f64;
            x - x.floor()
        })
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut vals: Vec<f64> = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    for &p in &pts {
        if vals.last() == Some(&p) {
            *counts.last_mut().unwrap() += 1;
        } else {
            vals.push(p);
            counts.push(1);
        }
    }
    let m = vals.len();
    let nf = n as f64;
    let u = |t: usize| vals[t % m] + (t / m) as f64;
    let mut prefix = vec![0f64; 2 * m + 1];
    for t in 0..2 * m {
        prefix[t + 1] = prefix[t] + counts[t % m] as f64;
    }
    let mut best = 0f64;

    // Overfill scan, minimizing B_i = C_i/N - u_i over the window.
    let a_of = |j: usize| prefix[j + 1] / nf - u(j);
    let b_of = |i: usize| prefix[i] / nf - u(i);
    let mut deque: VecDeque<usize> = VecDeque::new();
    for j in 0..2 * m {
        if j < m {
            while let Some(&back) = deque.back() {
                if b_of(back) >= b_of(j) {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(j);
        }
        while let Some(&front) = deque.front() {
            if front + m <= j {
                deque.pop_front();
            } else {
                break;
            }
        }
        if let Some(&front) = deque.front() {
            best = best.max(a_of(j) - b_of(front));
        }
    }

    // Underfill scan, maximizing E_e = u_e - C_e/N over the window.
    let e_of = |e: usize| u(e) - prefix[e] / nf;
    let s_of = |s: usize| u(s) - prefix[s + 1] / nf;
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut next_e = 1usize;
    for s in 0..m {
        while next_e <= s + m {
            while let Some(&back) = deque.back() {
                if e_of(back) <= e_of(next_e) {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(next_e);
            next_e += 1;
        }
        while let Some(&front) = deque.front() {
            if front <= s {
                deque.pop_front();
            } else {
                break;
            }
        }
        if let Some(&front) = deque.front() {
            best = best.max(e_of(front) - s_of(s));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    /// O(M²) oracle: scan every point-bounded closed and open arc.
    fn brute(alpha: &BigRational, n: u64) -> BigRational {
        let q = alpha.denom().to_u128().unwrap();
        let p = alpha.numer().mod_floor(alpha.denom()).to_u128().unwrap();
        let mut pts: Vec<u128> = (0..n).map(|k| (p * k as u128) % q).collect();
        pts.sort_unstable();
        let mut vals = Vec::new();
        let mut counts = Vec::new();
        for &x in &pts {
            if vals.last() == Some(&x) {
                *counts.last_mut().unwrap() += 1u64;
            } else {
                vals.push(x);
                counts.push(1);
            }
        }
        let m = vals.len();
        let mut prefix = vec![0u64; m + 1];
        for t in 0..m {
            prefix[t + 1] = prefix[t] + counts[t];
        }
        let total = |i: usize, j: usize| -> u64 {
            // inclusive circular sum of counts i..=j
            if j < m {
                prefix[j + 1] - prefix[i]
            } else {
                prefix[m] - prefix[i] + prefix[j - m + 1]
            }
        };
        let arc_len = |i: usize, j: usize| -> u128 {
            let a = vals[i];
            let b = vals[j % m] + if j >= m { q } else { 0 };
            b - a
        };
        let mut best = BigRational::zero();
        for i in 0..m {
            for span in 0..m {
                let j = i + span;
                // closed arc [v_i, v_j]
                let over = rat(total(i, j) as i64, n as i64)
                    - BigRational::new(BigInt::from(arc_len(i, j) as i64), BigInt::from(q as i64));
                if over > best {
                    best = over;
                }
            }
            for span in 1..=m {
                let j = i + span;
                if span == m {
                    continue; // full circle
                }
                // open arc (v_i, v_j): captures strictly-inside points
                let inside = if span >= 2 { total(i + 1, j - 1) } else { 0 };
                let under = BigRational::new(
                    BigInt::from(arc_len(i, j) as i64),
                    BigInt::from(q as i64),
                ) - rat(inside as i64, n as i64);
                if under > best {
                    best = under;
                }
            }
        }
        best
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(discrepancy(&rat(3, 7), 1), rat(1, 1));
        assert_eq!(discrepancy(&rat(0, 1), 17), rat(1, 1));
        assert_eq!(discrepancy(&rat(1, 2), 2), rat(1, 2));
    }

    #[test]
    fn matches_quadratic_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..60 {
            let num = rng.gen_range(0..1000i64);
            let den = rng.gen_range(1..1000i64);
            let n = rng.gen_range(1..=128u64);
            let alpha = rat(num, den);
            assert_eq!(discrepancy(&alpha, n), brute(&alpha, n), "alpha={alpha} n={n}");
        }
    }

    #[test]
    fn matches_brute_force_exhaustively_on_small_domain() {
        for den in 1..=12i64 {
            for num in 0..=12i64 {
                for n in 1..=16u64 {
                    let alpha = rat(num, den);
                    assert_eq!(
                        discrepancy(&alpha, n),
                        brute(&alpha, n),
                        "alpha={num}/{den} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn shift_and_reflection_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let num = rng.gen_range(-500..500i64);
            let den = rng.gen_range(1..500i64);
            let n = rng.gen_range(1..=512u64);
            let alpha = rat(num, den);
            let d = discrepancy(&alpha, n);
            assert_eq!(d, discrepancy(&(&alpha + rat(1, 1)), n));
            assert_eq!(d, discrepancy(&(-&alpha), n));
        }
    }

    #[test]
    fn grid_sup_never_exceeds_exact_value() {
        // Sample many explicit arcs; each gives a lower bound for the sup.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let num = rng.gen_range(0..60i64);
            let den = rng.gen_range(1..60i64);
            let n = rng.gen_range(1..=6u64);
            let alpha = rat(num, den);
            let exact = crate::real::rational_to_f64(&discrepancy(&alpha, n));
            let pts: Vec<f64> = (0..n)
                .map(|k| {
                    let v = &alpha * rat(k as i64, 1);
                    let f = v.floor();
                    crate::real::rational_to_f64(&(&v - f))
                })
                .collect();
            for gy in 0..40 {
                for gx in 0..40 {
                    let y = gy as f64 / 40.0;
                    let x = gx as f64 / 40.0;
                    let count = pts
                        .iter()
                        .filter(|&&p| {
                            let rel = (p - y).rem_euclid(1.0);
                            rel < x
                        })
                        .count();
                    let val = (count as f64 / n as f64 - x).abs();
                    assert!(val <= exact + 1e-9, "alpha={alpha} n={n} y={y} x={x}");
                }
            }
        }
    }

    #[test]
    fn float_path_close_to_exact_on_rationals() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let num = rng.gen_range(1..300i64);
            let den = rng.gen_range(1..300i64);
            let n = rng.gen_range(1..=128u64);
            let alpha = rat(num, den);
            let exact = crate::real::rational_to_f64(&discrepancy(&alpha, n));
            let float = discrepancy_f64(num as f64 / den as f64, n);
            assert!((exact - float).abs() < 1e-9, "alpha={alpha} n={n}");
        }
    }
}
