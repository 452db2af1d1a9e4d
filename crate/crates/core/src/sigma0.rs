//! The abscissa σ₀: the root of `f(σ) = Σ_p arcsin(p^{-σ}) - π/2`.
//!
//! Two rearrangements of `f` are available:
//!
//! * arcsin series: `f(σ) = Σ_k c_k P((2k+1)σ) - π/2` with the Taylor
//!   coefficients `c_k` of arcsin and the prime zeta function `P`;
//! * log ζ series: `f(σ) = Σ_j d_j A((2j+1)σ) - π/2`, where
//!   `d_j = Σ_{(2k+1)r = 2j+1} c_k μ(r)/r`, `|d_j| <= 1`, and
//!   `A(s) = log ζ(s) - log ζ(2s)/2 = Σ_p artanh(p^{-s})`.
//!
//! Substituting the Möbius formula for `P` into the arcsin series also
//! produces terms with even `r`; they only occur as `-d_j/2 · log ζ(2(2j+1)σ)`
//! (for `r ≡ 0 mod 4`, `μ(r) = 0`), which is why `A` rather than `log ζ`
//! multiplies `d_j`. Since `0 < A(s) < log ζ(s) < 3/2^s` for `s >= 2`, the
//! tail bound is the same as for a plain log ζ series.
//!
//! Both truncations carry explicit tail bounds. `f` is strictly decreasing
//! and convex for `σ > 1`, so a sign change on `[1.1, 1.2]` pins σ₀ down.

use std::collections::BTreeSet;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use rug::ops::SubFrom;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::moebius;
use crate::error::{Error, Result};
use crate::kernel::constant_pi;
use crate::precision::{digits_to_bits, PrecisionContext, Tolerance};
use crate::prime_zeta::{self, LogZetaMemo};
use crate::rootfind::{find_zero, Bracket, Strategy};

/// Smallest σ accepted by the series evaluators.
pub const SIGMA_FLOOR: f64 = 1.05;
/// Largest number of decimals [`solve_sigma0`] accepts.
pub const MAX_DIGITS: u32 = 1000;

/// Accepted tolerances satisfy `eps > 2^(-bits + EPS_SLACK_BITS)`.
const EPS_SLACK_BITS: u32 = 8;

fn coefficient_cache() -> &'static RwLock<(Vec<Rational>, Vec<Rational>)> {
    static CACHE: OnceLock<RwLock<(Vec<Rational>, Vec<Rational>)>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new((Vec::new(), Vec::new())))
}

/// `c_k = (2k)! / ((2^k k!)^2 (2k+1))`, the k-th Taylor coefficient of
/// `arcsin x` at `x^{2k+1}`.
pub fn arcsin_coeff(k: u64) -> Rational {
    arcsin_coeffs(k + 1)[k as usize].clone()
}

/// `c_0, ..., c_{n-1}`.
pub fn arcsin_coeffs(n: u64) -> Vec<Rational> {
    let n = n as usize;
    {
        let cache = coefficient_cache().read().expect("coefficient cache poisoned");
        if cache.0.len() >= n {
            return cache.0[..n].to_vec();
        }
    }
    let mut cache = coefficient_cache().write().expect("coefficient cache poisoned");
    let c = &mut cache.0;
    // (2k)!/(2^k k!)^2 = Π_{i<=k} (2i-1)/(2i)
    let mut ratio = Rational::from(1);
    for i in 1..c.len() as u64 {
        ratio *= Rational::from((2 * i - 1, 2 * i));
    }
    while c.len() < n {
        let k = c.len() as u64;
        if k > 0 {
            ratio *= Rational::from((2 * k - 1, 2 * k));
        }
        c.push(Rational::from(&ratio / Integer::from(2 * k + 1)));
    }
    c[..n].to_vec()
}

/// `d_j = Σ c_k μ(r)/r` over `(2k+1) r = 2j+1`.
pub fn d_coeff(j: u64) -> Rational {
    d_coeffs(j + 1)[j as usize].clone()
}

/// `d_0, ..., d_{n-1}`.
pub fn d_coeffs(n: u64) -> Vec<Rational> {
    {
        let cache = coefficient_cache().read().expect("coefficient cache poisoned");
        if cache.1.len() as u64 >= n {
            return cache.1[..n as usize].to_vec();
        }
    }
    let c = arcsin_coeffs(n);
    let mut cache = coefficient_cache().write().expect("coefficient cache poisoned");
    let d = &mut cache.1;
    while (d.len() as u64) < n {
        let m = 2 * d.len() as u64 + 1;
        let mut sum = Rational::new();
        let mut r = 1;
        while r * r <= m {
            if m % r == 0 {
                for div in [r, m / r] {
                    let mu = moebius(div).expect("divisor >= 1");
                    if mu != 0 {
                        let k = (m / div - 1) / 2;
                        let term = Rational::from(&c[k as usize] / Integer::from(div));
                        if mu > 0 {
                            sum += term;
                        } else {
                            sum -= term;
                        }
                    }
                    if div * div == m {
                        break;
                    }
                }
            }
            r += 2;
        }
        d.push(sum);
    }
    d[..n as usize].to_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Method {
    #[serde(rename = "arcsin")]
    ArcsinSeries,
    #[default]
    #[serde(rename = "logzeta")]
    LogZetaSeries,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arcsin" => Ok(Method::ArcsinSeries),
            "logzeta" => Ok(Method::LogZetaSeries),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

/// Truncation of one of the two series together with its tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPlan {
    pub method: Method,
    /// `K` for the arcsin series, `J` for the log ζ series.
    pub last_index: u64,
    pub eps: Tolerance,
    /// Bound on the omitted terms; below `eps/2`.
    pub tail_bound: Tolerance,
}

impl SeriesPlan {
    /// Least `K` with `2^{-(2K+3)σ} < eps/2`.
    pub fn arcsin(sigma: f64, eps: Tolerance) -> SeriesPlan {
        let target = eps.log2() - 1.0;
        let tail = |k: u64| -((2 * k + 3) as f64) * sigma;
        let mut k = 0;
        while tail(k) >= target {
            k += 1;
        }
        SeriesPlan {
            method: Method::ArcsinSeries,
            last_index: k,
            eps,
            tail_bound: Tolerance::from_log2(tail(k)).expect("finite"),
        }
    }

    /// Least `J` with `Σ_{j>J} 3 · 2^{-(2j+1)σ} < eps/2`.
    pub fn logzeta(sigma: f64, eps: Tolerance) -> SeriesPlan {
        let target = eps.log2() - 1.0;
        let ratio = (1.0 - (-2.0 * sigma).exp2()).log2();
        let tail = |j: u64| 3f64.log2() - ((2 * j + 3) as f64) * sigma - ratio;
        let mut j = 0;
        while tail(j) >= target {
            j += 1;
        }
        SeriesPlan {
            method: Method::LogZetaSeries,
            last_index: j,
            eps,
            tail_bound: Tolerance::from_log2(tail(j)).expect("finite"),
        }
    }
}

/// A value of `f(σ)` with error below `plan.eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub value: Float,
    pub plan: SeriesPlan,
    /// Distinct `log ζ` evaluations used.
    pub log_zeta_calls: usize,
}

fn check_arguments(sigma: &Float, eps: Tolerance, ctx: &PrecisionContext) -> Result<()> {
    if !sigma.is_finite() || *sigma < SIGMA_FLOOR {
        return Err(Error::domain("f(sigma)", sigma, "sigma >= 1.05"));
    }
    eps.check_attainable(ctx, EPS_SLACK_BITS)
}

fn working_bits(eps: Tolerance, ctx: &PrecisionContext) -> u32 {
    ctx.working_bits().max(eps.bits_needed() + 32)
}

fn rational_to_float(q: &Rational, prec: u32) -> Float {
    Float::with_val(prec, q)
}

/// `f(σ)` from the arcsin series, error below `eps`.
pub fn f_arcsin_series(sigma: &Float, eps: Tolerance, ctx: &PrecisionContext) -> Result<SeriesValue> {
    check_arguments(sigma, eps, ctx)?;
    let plan = SeriesPlan::arcsin(sigma.to_f64(), eps);
    let k_max = plan.last_index;
    // c_k <= 1, so eps/(4(K+1)) per P-value keeps the evaluation error
    // below eps/4, leaving room for rounding.
    let term_eps = eps.shrink_log2(2.0 + ((k_max + 1) as f64).log2());
    let multipliers: Vec<u64> = (0..=k_max).map(|k| 2 * k + 1).collect();
    let (memo, r_maxes) = prime_zeta::prepare(sigma, &multipliers, term_eps)?;
    let wp = working_bits(eps, ctx);
    let inner = ctx.at_bits(wp.max(ctx.bits()))?;
    let coeffs = arcsin_coeffs(k_max + 1);
    let mut sum = Float::new(wp);
    for (k, (&m, &r_max)) in multipliers.iter().zip(&r_maxes).enumerate() {
        let p = prime_zeta::assemble(&memo, m, r_max, term_eps, &inner);
        sum += rational_to_float(&coeffs[k], wp) * p.value;
    }
    sum -= constant_pi(&inner) / 2u32;
    Ok(SeriesValue {
        value: sum,
        plan,
        log_zeta_calls: memo.len(),
    })
}

/// `f(σ)` from the series in `d_j`, error below `eps`.
pub fn f_logzeta_series(sigma: &Float, eps: Tolerance, ctx: &PrecisionContext) -> Result<SeriesValue> {
    check_arguments(sigma, eps, ctx)?;
    let plan = SeriesPlan::logzeta(sigma.to_f64(), eps);
    let j_max = plan.last_index;
    // |d_j| <= 1 and each term uses two log ζ values (one halved):
    // eps/(8(J+1)) per value
    let term_log2 = eps.log2() - 3.0 - ((j_max + 1) as f64).log2();
    let mut memo = LogZetaMemo::new(sigma, term_log2);
    let needed: BTreeSet<u64> = (0..=j_max).flat_map(|j| [2 * j + 1, 4 * j + 2]).collect();
    memo.fill(&needed)?;
    let wp = working_bits(eps, ctx);
    let inner = ctx.at_bits(wp.max(ctx.bits()))?;
    let coeffs = d_coeffs(j_max + 1);
    let mut sum = Float::new(wp);
    for (j, d) in coeffs.iter().enumerate() {
        if d.cmp0().is_eq() {
            continue;
        }
        let m = 2 * j as u64 + 1;
        let mut a = Float::with_val(wp, memo.get(2 * m) / 2u32);
        a.sub_from(memo.get(m));
        sum += rational_to_float(d, wp) * a;
    }
    sum -= constant_pi(&inner) / 2u32;
    Ok(SeriesValue {
        value: sum,
        plan,
        log_zeta_calls: memo.len(),
    })
}

/// `f(σ)` by the chosen method.
pub fn f_series(method: Method, sigma: &Float, eps: Tolerance, ctx: &PrecisionContext) -> Result<SeriesValue> {
    match method {
        Method::ArcsinSeries => f_arcsin_series(sigma, eps, ctx),
        Method::LogZetaSeries => f_logzeta_series(sigma, eps, ctx),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sigma0Solution {
    /// Decimals after the point in `value`.
    pub digits: u32,
    /// σ₀ correctly rounded to `digits` decimals.
    pub value: String,
    /// `f(lo) > 0 > f(hi)`, each sign exceeding the evaluation error.
    pub bracket: Bracket<Float>,
    pub method: Method,
    pub strategy: Strategy,
    pub bits: u32,
    pub evaluations: usize,
    pub iterations: usize,
}

impl Sigma0Solution {
    pub fn width(&self) -> Float {
        Float::with_val(self.bits, &self.bracket.hi - &self.bracket.lo)
    }
}

/// Decimal digits carried beyond those requested.
const EXTRA_DIGITS: u32 = 5;
/// Series tolerance beyond the internal digits.
const EPS_EXTRA_DIGITS: u32 = 10;

fn parse_float(prec: u32, s: &str) -> Float {
    Float::with_val(prec, Float::parse(s).expect("literal"))
}

/// `x` rounded to `digits` decimals, as an integer count of `10^-digits`.
fn round_scaled(x: &Float, digits: u32) -> Integer {
    let q = x.to_rational().expect("finite") * Integer::from(Integer::u_pow_u(10, digits));
    Integer::from(q.round_ref())
}

fn format_scaled(n: &Integer, digits: u32) -> String {
    let s = n.to_string();
    let digits = digits as usize;
    if digits == 0 {
        return s;
    }
    let padded = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = padded.split_at(padded.len() - digits);
    format!("{int}.{frac}")
}

/// Encloses σ₀ and rounds it correctly to `digits` decimals.
pub fn solve_sigma0(digits: u32, method: Method, strategy: Strategy) -> Result<Sigma0Solution> {
    if digits == 0 || digits > MAX_DIGITS {
        return Err(Error::capacity("digits", digits, MAX_DIGITS));
    }
    let mut internal = digits + EXTRA_DIGITS;
    let mut evaluations = 0;
    let mut iterations = 0;
    let mut start: Option<(Float, Float)> = None;
    // A rounding boundary inside the enclosure is resolved by tightening;
    // each round gains EXTRA_DIGITS more.
    for _ in 0..8 {
        let bits = digits_to_bits(internal + EPS_EXTRA_DIGITS);
        let ctx = PrecisionContext::with_bits(bits)?;
        let eps = Tolerance::from_decimal_digits(internal + EPS_EXTRA_DIGITS);
        let f = |x: &Float| -> Result<Float> { Ok(f_series(method, x, eps, &ctx)?.value) };

        let (lo, hi) = match start.take() {
            Some(b) => b,
            None => initial_bracket(bits, &f, &mut evaluations)?,
        };
        let tol = Float::with_val(bits, Float::parse(format!("1e-{internal}")).expect("literal"));
        let result = find_zero(f, lo, hi, tol.clone(), strategy)?;
        evaluations += result.evaluations;
        iterations += result.iterations;
        let bracket = if result.bracket.exact_root {
            // f vanished to working precision at an iterate: open it up
            let x = result.bracket.lo.clone();
            let quarter = Float::with_val(bits, &tol / 4u32);
            let lo = Float::with_val(bits, &x - &quarter);
            let hi = Float::with_val(bits, &x + &quarter);
            certify(lo, hi, &quarter, eps, &f_eval(method, eps, &ctx), &mut evaluations)?
        } else {
            let quarter = Float::with_val(bits, &tol / 4u32);
            certify(
                result.bracket.lo,
                result.bracket.hi,
                &quarter,
                eps,
                &f_eval(method, eps, &ctx),
                &mut evaluations,
            )?
        };

        let lo_r = round_scaled(&bracket.lo, digits);
        let hi_r = round_scaled(&bracket.hi, digits);
        if lo_r == hi_r {
            return Ok(Sigma0Solution {
                digits,
                value: format_scaled(&lo_r, digits),
                bracket,
                method,
                strategy,
                bits,
                evaluations,
                iterations,
            });
        }
        internal += EXTRA_DIGITS;
        let next = digits_to_bits(internal + EPS_EXTRA_DIGITS);
        start = Some((Float::with_val(next, &bracket.lo), Float::with_val(next, &bracket.hi)));
    }
    Err(Error::Inconsistent(
        "could not separate the enclosure from a decimal rounding boundary".into(),
    ))
}

fn f_eval<'a>(
    method: Method,
    eps: Tolerance,
    ctx: &'a PrecisionContext,
) -> impl Fn(&Float) -> Result<Float> + 'a {
    move |x| Ok(f_series(method, x, eps, ctx)?.value)
}

fn initial_bracket(bits: u32, f: &impl Fn(&Float) -> Result<Float>, evaluations: &mut usize) -> Result<(Float, Float)> {
    for (a, b) in [("1.1", "1.2"), ("1.05", "1.3")] {
        let lo = parse_float(bits, a);
        let hi = parse_float(bits, b);
        *evaluations += 2;
        if f(&lo)? > 0 && f(&hi)? < 0 {
            return Ok((lo, hi));
        }
    }
    Err(Error::Inconsistent(
        "f(sigma) has no sign change on [1.05, 1.3]".into(),
    ))
}

/// Moves the endpoints outward until `f(lo) > eps` and `f(hi) < -eps`, so
/// the signs hold despite evaluation error.
fn certify(
    mut lo: Float,
    mut hi: Float,
    step: &Float,
    eps: Tolerance,
    f: &impl Fn(&Float) -> Result<Float>,
    evaluations: &mut usize,
) -> Result<Bracket<Float>> {
    let prec = lo.prec();
    let margin = Float::with_val(prec, eps.log2()).exp2();
    let mut f_lo = f(&lo)?;
    let mut f_hi = f(&hi)?;
    *evaluations += 2;
    for _ in 0..64 {
        let lo_ok = f_lo > margin;
        let hi_ok = Float::with_val(prec, -&f_hi) > margin;
        if lo_ok && hi_ok {
            return Ok(Bracket {
                lo,
                hi,
                f_lo,
                f_hi,
                exact_root: false,
            });
        }
        if !lo_ok {
            lo -= step;
            f_lo = f(&lo)?;
            *evaluations += 1;
        }
        if !hi_ok {
            hi += step;
            f_hi = f(&hi)?;
            *evaluations += 1;
        }
    }
    Err(Error::Inconsistent("enclosure signs could not be certified".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_examples() {
        assert_eq!(arcsin_coeff(0), Rational::from(1));
        assert_eq!(arcsin_coeff(1), Rational::from((1, 6)));
        assert_eq!(arcsin_coeff(2), Rational::from((3, 40)));
        assert_eq!(d_coeff(0), Rational::from(1));
        assert_eq!(d_coeff(1), Rational::from((-1, 6)));
        // 2j+1 = 9: (k=4, r=1) and (k=1, r=3); μ(9) = 0
        let expected = arcsin_coeff(4) - Rational::from((1, 18));
        assert_eq!(d_coeff(4), expected);
    }

    #[test]
    fn coefficient_bounds() {
        for (k, c) in arcsin_coeffs(300).iter().enumerate() {
            assert!(*c > 0);
            assert!(*c <= Rational::from((1, 2 * k as u64 + 1)));
        }
        for d in d_coeffs(300) {
            assert!(d.clone().abs() <= 1);
        }
    }

    #[test]
    fn plans_are_least() {
        let eps = Tolerance::from_decimal_digits(30);
        let p = SeriesPlan::arcsin(1.1, eps);
        assert!(p.tail_bound.log2() < eps.log2() - 1.0);
        let prev = -((2 * p.last_index + 1) as f64) * 1.1;
        assert!(prev >= eps.log2() - 1.0);
        let q = SeriesPlan::logzeta(1.1, eps);
        assert!(q.tail_bound.log2() < eps.log2() - 1.0);
        assert!(q.last_index >= p.last_index);
    }

    #[test]
    fn sign_change_on_the_bracket() {
        let ctx = PrecisionContext::with_bits(128).unwrap();
        let eps = Tolerance::from_decimal_digits(20);
        for method in [Method::ArcsinSeries, Method::LogZetaSeries] {
            let a = f_series(method, &parse_float(128, "1.1"), eps, &ctx).unwrap();
            let b = f_series(method, &parse_float(128, "1.2"), eps, &ctx).unwrap();
            assert!(a.value > 0 && b.value < 0);
        }
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(format_scaled(&Integer::from(12), 1), "1.2");
        assert_eq!(format_scaled(&Integer::from(5), 3), "0.005");
        let x = parse_float(200, "1.19234733718");
        assert_eq!(round_scaled(&x, 10), Integer::from(11_923_473_372u64));
    }

    #[test]
    fn short_solves() {
        let s = solve_sigma0(1, Method::LogZetaSeries, Strategy::Hybrid).unwrap();
        assert_eq!(s.value, "1.2");
        let s = solve_sigma0(10, Method::LogZetaSeries, Strategy::Hybrid).unwrap();
        assert_eq!(s.value, "1.1923473372");
        assert!(s.bracket.f_lo > 0 && s.bracket.f_hi < 0);
        assert!(s.width() < Float::with_val(64, 1e-10));
        assert!(matches!(
            solve_sigma0(1001, Method::LogZetaSeries, Strategy::Hybrid),
            Err(Error::Capacity { .. })
        ));
    }
}
