use proptest::prelude::*;
use rezeta::arith::PrimeSieve;
use rezeta::rootfind::Strategy;
use rezeta::sigma0::{arcsin_coeffs, d_coeffs, f_arcsin_series, f_logzeta_series, f_series, solve_sigma0, Method};
use rezeta::{PrecisionContext, Tolerance};
use rug::float::Constant;
use rug::Float;

const PREC: u32 = 1200;

fn ctx(digits: u32) -> PrecisionContext {
    PrecisionContext::from_digits(digits).unwrap()
}

fn fl(prec: u32, s: &str) -> Float {
    Float::with_val(prec, Float::parse(s).unwrap())
}

#[test]
fn arcsin_coefficients_sum_to_arcsin_half() {
    // Σ c_k 2^{-(2k+1)} = arcsin(1/2) = π/6; the tail after K terms is
    // below 2^{-(2K+3)}/(1 - 1/4).
    let c = arcsin_coeffs(120);
    let mut s = Float::new(PREC);
    for (k, ck) in c.iter().enumerate() {
        s += Float::with_val(PREC, ck) >> (2 * k as u32 + 1);
    }
    let pi6 = Float::with_val(PREC, Constant::Pi) / 6u32;
    let err = Float::with_val(PREC, &pi6 - &s);
    assert!(err > 0);
    assert!(err < Float::with_val(PREC, 1) >> 240u32);
}

#[test]
fn d_coefficients_give_arcsin_through_artanh() {
    // Σ_j d_j artanh(x^{2j+1}) = arcsin x, at x = 1/2.
    let pi6 = Float::with_val(PREC, Constant::Pi) / 6u32;
    let d = d_coeffs(201);
    for j_max in [40usize, 100, 200] {
        let mut s = Float::new(PREC);
        for (j, dj) in d.iter().take(j_max + 1).enumerate() {
            let x = Float::with_val(PREC, 1) >> (2 * j as u32 + 1);
            s += Float::with_val(PREC, dj) * x.atanh();
        }
        let err = Float::with_val(PREC, &s - &pi6).abs();
        assert!(err < 1e-20, "J = {j_max}: error {err}");
    }
    for dj in &d {
        assert!(dj.clone().abs() <= 1);
    }
}

/// `Σ_{p <= N} arcsin(p^-σ) - π/2` summed directly, with an upper bound on
/// the omitted primes: arcsin x <= x (1 + x²) for x <= 1/2, summed over all
/// integers above N.
fn brute_f(sigma: f64, n: u64) -> (f64, f64) {
    let sieve = PrimeSieve::new(n);
    let mut s = 0.0;
    for &p in sieve.primes().iter().rev() {
        s += (p as f64).powf(-sigma).asin();
    }
    let nf = n as f64;
    let tail = nf.powf(1.0 - sigma) / (sigma - 1.0) * (1.0 + nf.powf(-2.0 * sigma));
    (s - std::f64::consts::FRAC_PI_2, tail)
}

#[test]
fn series_inside_direct_sum_bracket() {
    let c = ctx(30);
    for (sigma, n) in [(1.3, 2_000_000u64), (1.5, 2_000_000), (2.0, 1_000_000)] {
        let (lower, tail) = brute_f(sigma, n);
        let s = fl(c.working_bits(), &sigma.to_string());
        for method in [Method::ArcsinSeries, Method::LogZetaSeries] {
            let v = f_series(method, &s, Tolerance::from_decimal_digits(25), &c).unwrap().value.to_f64();
            assert!(v >= lower - 1e-11 && v <= lower + tail + 1e-11, "sigma {sigma} {method:?}: {v} vs [{lower}, {}]", lower + tail);
        }
    }
}

#[test]
fn root_changes_sign_and_strategies_agree() {
    let a = solve_sigma0(25, Method::ArcsinSeries, Strategy::Bisect).unwrap();
    let b = solve_sigma0(25, Method::LogZetaSeries, Strategy::Hybrid).unwrap();
    let c = solve_sigma0(25, Method::LogZetaSeries, Strategy::Convex).unwrap();
    assert_eq!(a.value, b.value);
    assert_eq!(b.value, c.value);
    assert_eq!(b.value, "1.1923473371861932028975044");
    assert!(b.evaluations < a.evaluations);
    let cx = ctx(40);
    let eps = Tolerance::from_decimal_digits(40);
    let f_lo = f_logzeta_series(&b.bracket.lo, eps, &cx).unwrap().value;
    let f_hi = f_logzeta_series(&b.bracket.hi, eps, &cx).unwrap().value;
    assert!(f_lo > 0 && f_hi < 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn decreasing_and_convex(a in 1.05f64..2.5, h in 1e-2f64..0.5) {
        let c = ctx(30);
        let p = c.working_bits();
        let eps = Tolerance::from_decimal_digits(28);
        let f = |x: f64| f_arcsin_series(&Float::with_val(p, x), eps, &c).unwrap().value;
        let (f0, f1, f2) = (f(a), f(a + h), f(a + 2.0 * h));
        prop_assert!(f0 > f1 && f1 > f2);
        let second = Float::with_val(p, &f0 + &f2) - Float::with_val(p, &f1 * 2u32);
        prop_assert!(second > 0, "second difference {}", second);
    }

    #[test]
    fn methods_agree(sigma in 1.05f64..4.0) {
        let c = ctx(40);
        let s = Float::with_val(c.working_bits(), sigma);
        let eps = Tolerance::from_decimal_digits(32);
        let x = f_arcsin_series(&s, eps, &c).unwrap().value;
        let y = f_logzeta_series(&s, eps, &c).unwrap().value;
        prop_assert!(Float::with_val(c.working_bits(), &x - &y).abs() <= 2e-32);
    }
}
