//! The `lemmas` subcommand: executable checkers for every supporting
//! inequality and identity, aggregated into one pass/fail table.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use tmps::beatty::{
    discrepancy, discrepancy_f64, dist_to_int, farey_approx_scaled, farey_neighbors, floor_rat,
    nearest_int, BeattyParams,
};
use tmps::fourier::{
    fourier_direct, fourier_recursive, prepare_unique_count, psi_iterated_sq,
    saving_gap_check_all, sandwich_holds, transform_profile, trivial_estimate_check, CoeffBlock,
    ShiftProfile, TABLE_TOLERANCE,
};
use tmps::powerfloor::{
    floor_power, linear_approx_error, linearization_mismatch_count, linearize_segment,
    ExponentSpec,
};
use tmps::sumlab::{carry_exceptions, correlation_residual, vdc_verify};
use tmps::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Budget {
    Small,
    Medium,
}

impl Budget {
    fn scale(self, small: u64, medium: u64) -> u64 {
        match self {
            Budget::Small => small,
            Budget::Medium => medium,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaOutcome {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    pub holds: bool,
    pub note: String,
}

fn outcome(name: &str, cases: u64, failures: u64, note: String) -> LemmaOutcome {
    LemmaOutcome {
        name: name.to_string(),
        cases,
        failures,
        holds: failures == 0,
        note,
    }
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn run_suite(
    suites: &[String],
    budget: Budget,
    seed: u64,
) -> Result<Vec<LemmaOutcome>, tmps::Error> {
    let all = suites.iter().any(|s| s == "all");
    let want = |name: &str| all || suites.iter().any(|s| s == name);
    let mut out = Vec::new();
    if want("vdc") {
        out.push(check_vdc(budget, seed));
    }
    if want("carry") {
        out.push(check_carry(budget)?);
    }
    if want("correlation") {
        out.push(check_correlation(budget, seed));
    }
    if want("fracfacts") {
        out.extend(check_fracfacts());
    }
    if want("farey") {
        out.extend(check_farey(budget, seed)?);
    }
    if want("discrepancy") {
        out.push(check_discrepancy(budget, seed));
    }
    if want("fourier") {
        out.extend(check_fourier(budget, seed)?);
    }
    if want("saving") {
        out.push(check_saving(seed)?);
    }
    if want("approx") {
        out.push(check_approx(budget)?);
    }
    if out.is_empty() {
        return Err(tmps::Error::InvalidParameter(format!(
            "unknown lemma suite {suites:?}"
        )));
    }
    Ok(out)
}

fn check_vdc(budget: Budget, seed: u64) -> LemmaOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7dc);
    let cases = budget.scale(200, 500);
    let mut failures = 0;
    for _ in 0..cases {
        let n = rng.gen_range(1..=128usize);
        let seq: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let rep = vdc_verify(&seq, rng.gen_range(1..=8), rng.gen_range(1..=8));
        if !rep.holds || !rep.rhs_nonneg {
            failures += 1;
        }
    }
    outcome("vdc_inequality", cases, failures, "random complex sequences".into())
}

fn check_carry(budget: Budget) -> Result<LemmaOutcome, tmps::Error> {
    let n_max = budget.scale(256, 512);
    let alphas = [
        rat(1, 1),
        rat(3, 2),
        rat(7, 3),
        rat(5, 4),
        rat(13, 5),
    ];
    let betas = [rat(0, 1), rat(1, 2), rat(5, 3), rat(7, 4), rat(9, 7)];
    let mut cases = 0;
    let mut failures = 0;
    for alpha in &alphas {
        for beta in &betas {
            let bp = BeattyParams::rational(alpha.clone(), beta.clone());
            for r in 0..=4u64 {
                for l in 0..=(8 - r).min(4) {
                    for lambda in 0..=10u32 {
                        let rep = carry_exceptions(r, l, n_max, lambda, &bp)?;
                        cases += 1;
                        if !rep.holds {
                            failures += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(outcome(
        "carry_propagation",
        cases,
        failures,
        format!("exhaustive grid, N = {n_max}, 25 rational parameter pairs"),
    ))
}

fn check_correlation(budget: Budget, seed: u64) -> LemmaOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc04);
    let cases = budget.scale(100, 200);
    let mut failures = 0;
    let mut worst = 0f64;
    for _ in 0..cases {
        let m = rng.gen_range(1..=256usize);
        let f: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let t = rng.gen_range(-500..500i64);
        let res = correlation_residual(&f, t);
        worst = worst.max(res);
        if res >= 1e-10 {
            failures += 1;
        }
    }
    outcome(
        "correlation_identity",
        cases,
        failures,
        format!("max residual {worst:.3e}"),
    )
}

fn check_fracfacts() -> Vec<LemmaOutcome> {
    let mut out = Vec::new();
    // (i) floor split under a small nearest-integer distance.
    let eps = rat(1, 12);
    let mut cases = 0;
    let mut failures = 0;
    for ai in -60..=60i64 {
        let a = rat(ai, 144);
        for bi in 0..=96i64 {
            let b = rat(bi, 12);
            if dist_to_int(&a) < eps && dist_to_int(&b) >= eps {
                cases += 1;
                if floor_rat(&(&a + &b)) != nearest_int(&a) + floor_rat(&b) {
                    failures += 1;
                }
            }
        }
    }
    out.push(outcome("fractional_split", cases, failures, "rational grid".into()));
    // (ii) subadditivity of the distance under integer scaling.
    let mut cases = 0;
    let mut failures = 0;
    for ai in -80..=80i64 {
        let a = rat(ai, 59);
        for n in 0..=24i64 {
            cases += 1;
            if dist_to_int(&(&a * rat(n, 1))) > rat(n, 1) * dist_to_int(&a) {
                failures += 1;
            }
        }
    }
    out.push(outcome("fractional_subadditive", cases, failures, "rational grid".into()));
    // (iii) nearest-integer scaling below the wrap threshold.
    let eps = rat(1, 50);
    let mut cases = 0;
    let mut failures = 0;
    for ai in -300..=300i64 {
        let a = rat(ai, 2400);
        if dist_to_int(&a) >= eps {
            continue;
        }
        for n in 0..=24i64 {
            if rat(2 * n, 1) * &eps < rat(1, 1) {
                cases += 1;
                if nearest_int(&(&a * rat(n, 1))) != BigInt::from(n) * nearest_int(&a) {
                    failures += 1;
                }
            }
        }
    }
    out.push(outcome("fractional_nearest_scaling", cases, failures, "rational grid".into()));
    out
}

fn check_farey(budget: Budget, seed: u64) -> Result<Vec<LemmaOutcome>, tmps::Error> {
    let mut out = Vec::new();
    let max_order = budget.scale(32, 64);
    let mut cases = 0;
    let mut failures = 0;
    for order in 1..=max_order {
        for (l, r) in farey_neighbors(order) {
            cases += 1;
            let uni = l.den as i128 * r.num as i128 - l.num as i128 * r.den as i128;
            let med_num = (l.num + r.num) as i64;
            let med_den = (l.den + r.den) as i64;
            let gap_ok = rat(med_num, med_den) - rat(l.num as i64, l.den as i64)
                < rat(1, (l.den * order) as i64);
            if uni != 1 || l.den + r.den <= order || !gap_ok {
                failures += 1;
            }
        }
    }
    out.push(outcome(
        "farey_neighbors",
        cases,
        failures,
        format!("orders 1..={max_order}"),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfa7);
    let cases = budget.scale(1000, 10_000);
    let mut failures = 0;
    for _ in 0..cases {
        let num = rng.gen_range(0..5000i64);
        let den = rng.gen_range(1..300i64);
        let mu = rng.gen_range(0..=8u32);
        let sigma = rng.gen_range(1..=8u32);
        let alpha_rat = rat(num, den);
        let fa = farey_approx_scaled(&Real::from_rational(alpha_rat.clone()), mu, sigma)?;
        let err = alpha_rat * rat(fa.q as i64, 1) - rat((fa.p as i64) << mu, 1);
        let err = if err < rat(0, 1) { -err } else { err };
        if err >= rat(1, 1i64 << sigma) {
            failures += 1;
        }
    }
    out.push(outcome(
        "farey_dissection_bound",
        cases,
        failures,
        "random rational alpha".into(),
    ));
    Ok(out)
}

fn check_discrepancy(budget: Budget, seed: u64) -> LemmaOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd15);
    let cases = budget.scale(50, 100);
    let mut failures = 0;
    for _ in 0..cases {
        let num = rng.gen_range(-400..400i64);
        let den = rng.gen_range(1..400i64);
        let n = rng.gen_range(1..=256u64);
        let alpha = rat(num, den);
        let d = discrepancy(&alpha, n);
        // shift/reflection invariance and float-path agreement
        let ok = d == discrepancy(&(&alpha + rat(1, 1)), n)
            && d == discrepancy(&(-&alpha), n)
            && (tmps::real::rational_to_f64(&d) - discrepancy_f64(num as f64 / den as f64, n))
                .abs()
                < 1e-9;
        if !ok {
            failures += 1;
        }
    }
    outcome(
        "discrepancy_invariances",
        cases,
        failures,
        "shift, reflection, float-path agreement".into(),
    )
}

fn check_fourier(budget: Budget, seed: u64) -> Result<Vec<LemmaOutcome>, tmps::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf00);
    let mut out = Vec::new();

    // Recurrence vs direct evaluation, plus Parseval on every table.
    let cases = budget.scale(25, 60);
    let mut failures = 0;
    for _ in 0..cases {
        let lambda = rng.gen_range(0..=8u32);
        let l = rng.gen_range(1..=3usize);
        let r = rng.gen_range(l as u64..=64);
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
        let max_err = (0..(1u64 << lambda))
            .map(|h| (direct.entry(h) - rec.entry(h)).norm())
            .fold(0.0, f64::max);
        if max_err >= TABLE_TOLERANCE || (direct.parseval_sum() - 1.0).abs() >= TABLE_TOLERANCE {
            failures += 1;
        }
    }
    out.push(outcome("fourier_recurrence", cases, failures, "recursive vs direct".into()));

    // Transform sandwich and digit decomposition.
    let mut cases = 0;
    let mut failures = 0;
    for _ in 0..budget.scale(5, 10) {
        let profile = ShiftProfile::sample(&mut rng, 2, 12);
        for m in 1..=4u32 {
            for d in 0..(1u64 << m) {
                cases += 1;
                if !sandwich_holds(&profile, m, d) {
                    failures += 1;
                }
                for e in 0..(1u64 << m) {
                    let direct = transform_profile(&profile, m, d, e);
                    let mut step = profile.clone();
                    for j in 0..m {
                        step = transform_profile(&step, 1, (d >> j) & 1, (e >> j) & 1);
                    }
                    cases += 1;
                    if direct != step {
                        failures += 1;
                    }
                }
            }
        }
    }
    out.push(outcome(
        "transform_sandwich_and_decomposition",
        cases,
        failures,
        "exhaustive m <= 4".into(),
    ));

    // Full-depth iterated identity.
    let cases = budget.scale(6, 12);
    let mut failures = 0;
    for _ in 0..cases {
        let lambda = rng.gen_range(1..=5u32);
        let l = rng.gen_range(1..=2usize);
        let r = rng.gen_range(l as u64..=16);
        let block = CoeffBlock::new(vec![true; l], r)?;
        let profile = ShiftProfile::sample(&mut rng, l, r);
        let d = rng.gen_range(0..(1u64 << lambda));
        let h = rng.gen_range(0..(1u64 << lambda));
        let coeffs = block.coeffs();
        let via_identity = psi_iterated_sq(lambda, &profile, &coeffs, d, h);
        let direct = fourier_direct(lambda, &profile, &coeffs, d)?
            .entry(h)
            .norm_sqr();
        if (via_identity - direct).abs() >= 1e-9 {
            failures += 1;
        }
    }
    out.push(outcome(
        "iterated_recurrence_identity",
        cases,
        failures,
        "full-depth expansion vs direct".into(),
    ));

    // Digit-peeling estimate.
    let cases = budget.scale(20, 40);
    let mut failures = 0;
    for _ in 0..cases {
        let l = rng.gen_range(1..=2usize);
        let r = rng.gen_range(l as u64..=24);
        let block = CoeffBlock::new(vec![true; l], r)?;
        let profile = ShiftProfile::sample(&mut rng, l, r);
        let lambda = rng.gen_range(2..=7u32);
        let m = rng.gen_range(0..=lambda.min(3));
        let d = rng.gen_range(0..(1u64 << (lambda - m)));
        let d_low = if m == 0 { 0 } else { rng.gen_range(0..(1u64 << m)) };
        let h = rng.gen_range(0..(1u64 << lambda));
        let (_, _, holds) =
            trivial_estimate_check(lambda, m, &profile, &block.coeffs(), d, d_low, h)?;
        if !holds {
            failures += 1;
        }
    }
    out.push(outcome("digit_peeling_estimate", cases, failures, "random instances".into()));

    // Preparation uniqueness.
    let mut cases = 0;
    let mut failures = 0;
    let r = 1u64 << 10;
    for _ in 0..budget.scale(2, 3) {
        let profile = ShiftProfile::sample(&mut rng, 1, r);
        for y in 0..=3u32 {
            for d0 in 0..(1u64 << y) {
                cases += 1;
                let (count, clean) = prepare_unique_count(&profile, 5, y, d0)?;
                if count != 1 || !clean {
                    failures += 1;
                }
            }
        }
    }
    out.push(outcome("prepare_uniqueness", cases, failures, "x = 10, m = 5".into()));
    Ok(out)
}

fn check_saving(seed: u64) -> Result<LemmaOutcome, tmps::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a1);
    let r = 1u64 << 10;
    let block = CoeffBlock::new(vec![true], r)?;
    let mut cases = 0;
    let mut failures = 0;
    for z in [0u32, 3] {
        for _ in 0..4 {
            let profile = loop {
                let p = ShiftProfile::sample(&mut rng, 1, r);
                let v = p.value_at_offset() % 32;
                if v == 1 || v == 2 {
                    break p;
                }
            };
            for d in 0..(1u64 << z) {
                for rep in saving_gap_check_all(z, 5, &profile, &block, d)? {
                    cases += 1;
                    if !rep.holds {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(outcome(
        "prepared_profile_gap",
        cases,
        failures,
        "m = 5, L = 1, r = 2^10, z in {0, 3}".into(),
    ))
}

fn check_approx(budget: Budget) -> Result<LemmaOutcome, tmps::Error> {
    let c = ExponentSpec::rational(7, 5)?;
    let mut cases = 0;
    let mut failures = 0;
    let segs: &[(u64, u64)] = &[(100, 10), (1000, 20), (10_000, budget.scale(30, 100))];
    for &(a, k) in segs {
        let seg = linearize_segment(a, k, &c)?;
        let band = seg
            .second_derivative_bound
            .scale(&rat((k * k) as i64, 1));
        for x in (a + 1)..=(a + k) {
            // |x·alpha + beta - x^c| <= B·K²
            cases += 1;
            let err = linear_approx_error(&seg, x, &c)?;
            let over = err.sub(&band).sign()? == std::cmp::Ordering::Greater
                || err.neg().sub(&band).sign()? == std::cmp::Ordering::Greater;
            if over {
                failures += 1;
            }
            // Floors agree whenever the linear value clears the band.
            let v = seg.linear_value(x);
            let fl = v.floor()?;
            let frac = v.sub(&Real::from_rational(BigRational::from_integer(fl.clone())));
            let up = Real::from_int(1).sub(&frac);
            if frac.cmp_real(&band)? == std::cmp::Ordering::Greater
                && up.cmp_real(&band)? == std::cmp::Ordering::Greater
            {
                cases += 1;
                if BigInt::from(floor_power(x, &c)?) != fl {
                    failures += 1;
                }
            }
        }
        // Mismatch count against 2BK³ + K·D_K(alpha).
        cases += 1;
        let mismatches = linearization_mismatch_count(&seg, &c)?;
        let alpha_f = seg.alpha.to_f64();
        let b_f = seg.second_derivative_bound.to_f64();
        let bound = 2.0 * b_f * (k as f64).powi(3) + k as f64 * discrepancy_f64(alpha_f, k);
        if mismatches as f64 > bound {
            failures += 1;
        }
    }
    Ok(outcome(
        "segment_linearization",
        cases,
        failures,
        "error band, floor agreement, mismatch bound".into(),
    ))
}
