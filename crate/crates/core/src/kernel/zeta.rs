//! ζ(s) for `Re(s) >= 1` by Euler–Maclaurin summation in MPFR arithmetic.
//!
//! The main sum uses complete multiplicativity: only prime terms `p^{-s}`
//! need an exponential, composites are products of two earlier terms.

use rug::ops::NegAssign;
use rug::{Assign, Float};

use crate::arith::smallest_prime_factors;
use crate::error::{Error, Result};
use crate::kernel::bernoulli::em_coefficients;
use crate::kernel::complex::{mul_into, ComplexValue};
use crate::kernel::em::{self, EmPlan};
use crate::precision::PrecisionContext;

/// Largest `|Im s|` accepted by [`zeta_complex`].
pub const MAX_IMAG: f64 = 1.0e8;

/// Terms above this index are not stored; composites beyond it are
/// evaluated directly instead of by multiplication.
const TABLE_LIMIT: u64 = 1 << 21;

fn log2_ceil(x: f64) -> u32 {
    x.max(1.0).log2().ceil() as u32
}

/// Bits needed so that rounding in a sum of `terms` values of size up to
/// `magnitude`, with exponent arguments up to `phase`, stays below
/// `2^target_log2`.
fn working_precision(target_log2: f64, terms: u64, magnitude: f64, phase: f64) -> u32 {
    let bits = (-target_log2).ceil().max(0.0) as u32;
    (bits + 12 + log2_ceil(terms as f64) + log2_ceil(magnitude) + log2_ceil(phase + 1.0)).max(64)
}

fn pole_guard(delta_log2: f64, bits: u32) -> bool {
    delta_log2 < -(f64::from(bits) / 2.0)
}

/// `ζ(x) - 1` for real `x > 1` with absolute error below `2^target_log2`.
/// The result carries the internal working precision.
pub(crate) fn zeta_minus_one_abs(x: &Float, target_log2: f64) -> Result<Float> {
    let xf = x.to_f64();
    if !(xf > 1.0) {
        return Err(Error::domain("zeta", x, "sigma > 1"));
    }
    let plan = em::plan(xf, 0.0, target_log2 - 2.0)?;
    let n = plan.n_terms;
    let ln_n = (n as f64).ln();
    let magnitude = (1.0 + 1.0 / (xf - 1.0)) * (2.0 + ln_n);
    let wp = working_precision(target_log2, n + plan.corrections as u64, magnitude, xf * ln_n);
    let x = Float::with_val(wp.max(x.prec()), x);

    let mut sum = real_main_sum(&x, n, wp);
    add_real_tail(&mut sum, &x, &plan, wp)?;
    Ok(sum)
}

/// `Σ_{2 <= n < N} n^{-x}`.
fn real_main_sum(x: &Float, n_terms: u64, wp: u32) -> Float {
    let mut sum = Float::new(wp);
    if n_terms <= 2 {
        return sum;
    }
    let spf = smallest_prime_factors(n_terms as usize);
    let keep = (n_terms / 2 + 1) as usize;
    let mut vals: Vec<Float> = Vec::with_capacity(keep);
    vals.push(Float::new(wp));
    vals.push(Float::with_val(wp, 1));
    let mut v = Float::new(wp);
    for k in 2..n_terms as usize {
        let p = spf[k] as usize;
        if p == k {
            v.assign(Float::ln_u(k as u32));
            v *= x;
            v.neg_assign();
            v.exp_mut();
        } else {
            v.assign(&vals[p] * &vals[k / p]);
        }
        sum += &v;
        if k < keep {
            vals.push(v.clone());
        }
    }
    sum
}

/// Adds `N^{1-x}/(x-1) + N^{-x}/2 + Σ_k B_2k/(2k)! (x)_{2k-1} N^{-x-2k+1}`.
fn add_real_tail(sum: &mut Float, x: &Float, plan: &EmPlan, wp: u32) -> Result<()> {
    let n = plan.n_terms;
    let nf = Float::with_val(wp, n);
    let mut n_pow = Float::with_val(wp, nf.ln_ref());
    n_pow *= x;
    n_pow = (-n_pow).exp();

    let xm1 = Float::with_val(wp, x - 1u32);
    *sum += Float::with_val(wp, &n_pow * &nf) / &xm1;
    *sum += Float::with_val(wp, &n_pow / 2u32);

    let coeffs = em_coefficients(plan.corrections, wp)?;
    let n2 = Float::with_val(wp, nf.square_ref());
    let mut q = Float::with_val(wp, &n_pow * x) / &nf;
    let mut f = Float::new(wp);
    for k in 1..=plan.corrections {
        *sum += Float::with_val(wp, &coeffs[k - 1] * &q);
        f.assign(x + (2 * k - 1) as u32);
        q *= &f;
        f.assign(x + (2 * k) as u32);
        q *= &f;
        q /= &n2;
    }
    Ok(())
}

/// `log ζ(x)` for real `x > 1` with absolute error below `2^target_log2`.
pub(crate) fn log_zeta_abs(x: &Float, target_log2: f64) -> Result<Float> {
    let y = zeta_minus_one_abs(x, target_log2 - 1.0)?;
    Ok(y.ln_1p())
}

fn check_real_argument(sigma: &Float, ctx: &PrecisionContext) -> Result<()> {
    if sigma.is_nan() || sigma.is_infinite() {
        return Err(Error::domain("zeta", sigma, "finite sigma"));
    }
    if *sigma == 1 {
        return Err(Error::Pole {
            value: sigma.to_string(),
        });
    }
    if *sigma < 1 {
        return Err(Error::domain("zeta", sigma, "sigma > 1"));
    }
    let delta = Float::with_val(sigma.prec().max(64), sigma - 1u32);
    if pole_guard(delta.clone().log2().to_f64(), ctx.bits()) {
        return Err(Error::Pole {
            value: sigma.to_string(),
        });
    }
    Ok(())
}

/// `ζ(σ) - 1` with relative error below `2^-bits`.
pub fn zeta_minus_one(sigma: &Float, ctx: &PrecisionContext) -> Result<Float> {
    check_real_argument(sigma, ctx)?;
    // ζ(σ) - 1 > 2^-σ
    let target = -(f64::from(ctx.bits()) + 3.0) - sigma.to_f64();
    let y = zeta_minus_one_abs(sigma, target)?;
    Ok(Float::with_val(ctx.working_bits(), y))
}

/// ζ(σ) for real `σ >= 1 + 2^{-bits/2}` with relative error below `2^-bits`.
pub fn zeta_real(sigma: &Float, ctx: &PrecisionContext) -> Result<Float> {
    check_real_argument(sigma, ctx)?;
    let y = zeta_minus_one_abs(sigma, -(f64::from(ctx.bits()) + 3.0))?;
    Ok(Float::with_val(ctx.working_bits(), y + 1u32))
}

/// `log ζ(σ)` with relative error below `2^-bits`.
pub fn log_zeta(sigma: &Float, ctx: &PrecisionContext) -> Result<Float> {
    check_real_argument(sigma, ctx)?;
    let target = -(f64::from(ctx.bits()) + 4.0) - sigma.to_f64();
    let y = zeta_minus_one_abs(sigma, target)?;
    Ok(Float::with_val(ctx.working_bits(), y.ln_1p()))
}

/// ζ(s) for `Re s >= 1`, `s != 1`, `|Im s| <= 10^8`, with absolute error
/// below `2^-bits * max(1, |ζ(s)|)`.
pub fn zeta_complex(s: &ComplexValue, ctx: &PrecisionContext) -> Result<ComplexValue> {
    if !s.is_finite() {
        return Err(Error::domain("zeta", s, "finite s"));
    }
    if s.re < 1 {
        return Err(Error::domain("zeta", s, "Re s >= 1"));
    }
    let tf = s.im.to_f64();
    if tf.abs() > MAX_IMAG {
        return Err(Error::capacity("|Im s|", tf.abs(), MAX_IMAG));
    }
    let prec = s.prec().max(64);
    let dre = Float::with_val(prec, &s.re - 1u32);
    let dist = Float::with_val(prec, dre.hypot_ref(&s.im));
    if dist.is_zero() || pole_guard(dist.clone().log2().to_f64(), ctx.bits()) {
        return Err(Error::Pole { value: s.to_string() });
    }
    let z = zeta_complex_abs(&s.re, &s.im, -(f64::from(ctx.bits()) + 2.0))?;
    Ok(z.with_prec(ctx.working_bits()))
}

/// ζ(σ + it) with absolute error below `2^target_log2`.
pub(crate) fn zeta_complex_abs(sigma: &Float, t: &Float, target_log2: f64) -> Result<ComplexValue> {
    let sf = sigma.to_f64();
    let tf = t.to_f64();
    let plan = em::plan(sf, tf, target_log2 - 2.0)?;
    let n = plan.n_terms;
    let ln_n = (n as f64).ln();
    let dist = ((sf - 1.0).powi(2) + tf * tf).sqrt();
    let magnitude = (1.0 + 1.0 / dist) * (2.0 + ln_n);
    let wp = working_precision(
        target_log2,
        n + plan.corrections as u64,
        magnitude,
        (sf + tf.abs()) * ln_n,
    );
    let sigma = Float::with_val(wp.max(sigma.prec()), sigma);
    let t = Float::with_val(wp.max(t.prec()), t);

    let mut sum = complex_main_sum(&sigma, &t, n, wp);
    add_complex_tail(&mut sum, &sigma, &t, &plan, wp)?;
    Ok(sum)
}

/// `n^{-s}` from scratch.
fn power_direct(out: &mut ComplexValue, k: u64, sigma: &Float, t: &Float, wp: u32) {
    let ln = Float::with_val(wp, Float::ln_u(k as u32));
    let mag = Float::with_val(wp, &ln * sigma);
    let mag = (-mag).exp();
    let theta = Float::with_val(wp, &ln * t);
    let (sin, cos) = theta.sin_cos(Float::new(wp));
    out.re.assign(&mag * &cos);
    out.im.assign(&mag * &sin);
    out.im.neg_assign();
}

/// `Σ_{1 <= n < N} n^{-s}`.
fn complex_main_sum(sigma: &Float, t: &Float, n_terms: u64, wp: u32) -> ComplexValue {
    let mut sum = ComplexValue::from_f64(wp, 1.0, 0.0);
    if n_terms <= 2 {
        return sum;
    }
    let table_top = n_terms.min(TABLE_LIMIT);
    let spf = smallest_prime_factors(table_top as usize);
    let keep = (table_top / 2 + 1) as usize;
    let mut vals: Vec<ComplexValue> = Vec::with_capacity(keep);
    vals.push(ComplexValue::zero(wp));
    vals.push(ComplexValue::from_f64(wp, 1.0, 0.0));
    let mut v = ComplexValue::zero(wp);
    let mut scratch = Float::new(wp);
    for k in 2..n_terms {
        if k < table_top {
            let ku = k as usize;
            let p = spf[ku] as usize;
            if p == ku {
                power_direct(&mut v, k, sigma, t, wp);
            } else {
                mul_into(&mut v, &vals[p], &vals[ku / p], &mut scratch);
            }
            if ku < keep {
                vals.push(v.clone());
            }
        } else {
            power_direct(&mut v, k, sigma, t, wp);
        }
        sum.add_assign(&v);
    }
    sum
}

fn add_complex_tail(
    sum: &mut ComplexValue,
    sigma: &Float,
    t: &Float,
    plan: &EmPlan,
    wp: u32,
) -> Result<()> {
    let n = plan.n_terms;
    let nf = Float::with_val(wp, n);
    let mut n_pow = ComplexValue::zero(wp);
    power_direct(&mut n_pow, n, sigma, t, wp);

    let s = ComplexValue::new(Float::with_val(wp, sigma), Float::with_val(wp, t));
    let sm1 = ComplexValue::new(Float::with_val(wp, sigma - 1u32), Float::with_val(wp, t));
    sum.add_assign(&n_pow.mul_real(&nf).div(&sm1));
    let half = Float::with_val(wp, 0.5);
    sum.add_assign(&n_pow.mul_real(&half));

    let coeffs = em_coefficients(plan.corrections, wp)?;
    let inv_n = Float::with_val(wp, 1u32) / &nf;
    let inv_n2 = Float::with_val(wp, inv_n.square_ref());
    let mut q = n_pow.mul(&s).mul_real(&inv_n);
    let mut shifted = s.clone();
    let mut tmp = ComplexValue::zero(wp);
    let mut scratch = Float::new(wp);
    for k in 1..=plan.corrections {
        sum.add_assign(&q.mul_real(&coeffs[k - 1]));
        shifted.re.assign(sigma + (2 * k - 1) as u32);
        mul_into(&mut tmp, &q, &shifted, &mut scratch);
        shifted.re.assign(sigma + (2 * k) as u32);
        mul_into(&mut q, &tmp, &shifted, &mut scratch);
        q.re *= &inv_n2;
        q.im *= &inv_n2;
    }
    Ok(())
}
