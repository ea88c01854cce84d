//! Minimal discrete Fourier transforms used by the Fourier-coefficient and
//! correlation machinery. Power-of-two lengths run through an iterative
//! radix-2 FFT; other lengths fall back to the quadratic definition.

use num_complex::Complex64;

/// Forward transform with the `1/M` normalization used throughout:
/// `out[h] = (1/M) Σ_u input[u] e(-hu/M)`.
pub(crate) fn dft_forward_scaled(input: &[Complex64]) -> Vec<Complex64> {
    let m = input.len();
    assert!(m >= 1);
    let mut out = if m.is_power_of_two() {
        let mut buf = input.to_vec();
        fft_pow2(&mut buf, -1.0);
        buf
    } else {
        dft_naive(input, -1.0)
    };
    let scale = 1.0 / m as f64;
    for v in &mut out {
        *v *= scale;
    }
    out
}

fn dft_naive(input: &[Complex64], sign: f64) -> Vec<Complex64> {
    let m = input.len();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for (h, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (u, &x) in input.iter().enumerate() {
            let ang = sign * std::f64::consts::TAU * ((h * u) % m) as f64 / m as f64;
            let (s, c) = ang.sin_cos();
            acc += x * Complex64::new(c, s);
        }
        *slot = acc;
    }
    out
}

/// In-place iterative radix-2 FFT; `sign = -1` is the forward transform.
fn fft_pow2(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n == 1 {
        return;
    }
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            buf.swap(i, j);
        }
        let mut mask = n >> 1;
        while j & mask != 0 {
            j &= !mask;
            mask >>= 1;
        }
        j |= mask;
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * std::f64::consts::TAU / len as f64;
        let half = len / 2;
        // Fresh sin_cos per twiddle keeps the error near machine epsilon.
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| {
                let (s, c) = (ang * k as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = buf[start + k];
                let b = buf[start + k + half] * twiddles[k];
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_matches_naive_definition() {
        for &m in &[1usize, 2, 4, 8, 64, 128] {
            let input: Vec<Complex64> = (0..m)
                .map(|u| Complex64::new((u as f64 * 0.7).sin(), (u as f64 * 1.3).cos()))
                .collect();
            let fast = dft_forward_scaled(&input);
            let slow: Vec<Complex64> = dft_naive(&input, -1.0)
                .into_iter()
                .map(|v| v / m as f64)
                .collect();
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-11, "m={m}");
            }
        }
    }

    #[test]
    fn non_pow2_lengths_use_definition() {
        let input: Vec<Complex64> = (0..6)
            .map(|u| Complex64::new(u as f64, -(u as f64)))
            .collect();
        let out = dft_forward_scaled(&input);
        // h = 0 entry is the mean.
        let mean = input.iter().sum::<Complex64>() / 6.0;
        assert!((out[0] - mean).norm() < 1e-12);
    }
}
