//! Double-precision ζ(σ + it) for scanning vertical lines.
//!
//! Same Euler–Maclaurin scheme as the MPFR kernel, in `f64`. The phases
//! `t ln p` reach ~10^8 at the heights of interest, so `ln p` is kept as a
//! double-double and the phase is reduced modulo 2π before calling
//! `sin`/`cos`; composites are products of stored prime powers. The
//! resulting error is a few units in the 14th decimal for `t` near 10^6.

use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rug::Float;

use crate::arith::smallest_prime_factors;
use crate::error::{Error, Result};
use crate::kernel::bernoulli::em_coefficients;
use crate::kernel::em;
use crate::kernel::zeta::MAX_IMAG;

const TWO_PI_HI: f64 = 6.283_185_307_179_586;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// Largest index whose `n^{-s}` is stored for reuse; above it terms are
/// evaluated with a plain `f64` logarithm.
const TABLE_LIMIT: u64 = 1 << 22;
/// Target remainder for the Euler–Maclaurin tail.
const TARGET_LOG2: f64 = -56.0;

/// A double-precision value of ζ together with an estimate of its error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastValue {
    pub value: Complex64,
    /// Remainder bound plus a rounding estimate.
    pub error: f64,
}

/// `ln n` as an unevaluated sum `hi + lo`, for all `n < len`.
fn log_table(len: usize) -> Arc<Vec<(f64, f64)>> {
    static TABLE: OnceLock<RwLock<Arc<Vec<(f64, f64)>>>> = OnceLock::new();
    let lock = TABLE.get_or_init(|| RwLock::new(Arc::new(Vec::new())));
    {
        let cur = lock.read().expect("log table poisoned");
        if cur.len() >= len {
            return Arc::clone(&cur);
        }
    }
    let mut guard = lock.write().expect("log table poisoned");
    if guard.len() >= len {
        return Arc::clone(&guard);
    }
    let target = len.max(2 * guard.len()).min(TABLE_LIMIT as usize + 1).max(len);
    let spf = smallest_prime_factors(target);
    let mut table: Vec<(f64, f64)> = Vec::with_capacity(target);
    table.extend_from_slice(&guard[..]);
    let start = table.len();
    for n in start..target {
        if n >= 2 && spf[n] as usize == n {
            table.push(dd_ln(n as u64));
        } else {
            table.push((0.0, 0.0));
        }
    }
    *guard = Arc::new(table);
    Arc::clone(&guard)
}

fn dd_ln(n: u64) -> (f64, f64) {
    let ln = Float::with_val(128, Float::ln_u(n as u32));
    let hi = ln.to_f64();
    let lo = (ln - hi).to_f64();
    (hi, lo)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `(t * (hi + lo)) mod 2π`, in `[-π, π]`.
fn reduced_phase(t: f64, hi: f64, lo: f64) -> f64 {
    let (ph, pl) = two_prod(t, hi);
    let pl = pl + t * lo;
    let k = (ph / TWO_PI_HI).round();
    let (qh, ql) = two_prod(k, TWO_PI_HI);
    // ph and qh agree in their leading bits, so this is exact
    let r = ph - qh;
    r + (pl - ql - k * TWO_PI_LO)
}

/// Neumaier summation; the running error is kept separately per component.
#[derive(Default)]
struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, v: Complex64) {
        fn step(sum: &mut f64, comp: &mut f64, x: f64) {
            let t = *sum + x;
            *comp += if sum.abs() >= x.abs() { (*sum - t) + x } else { (x - t) + *sum };
            *sum = t;
        }
        step(&mut self.sum.re, &mut self.comp.re, v.re);
        step(&mut self.sum.im, &mut self.comp.im, v.im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// `n^{-σ} e^{-i θ}` for `θ = t ln n`, `ln n = hi + lo`.
fn power(n: u64, sigma: f64, t: f64, hi: f64, lo: f64) -> Complex64 {
    let mag = if sigma == 1.0 {
        1.0 / n as f64
    } else {
        (n as f64).powf(-sigma)
    };
    let (s, c) = reduced_phase(t, hi, lo).sin_cos();
    Complex64::new(mag * c, -mag * s)
}

/// ζ(σ + it) in double precision for `σ >= 1`.
pub fn zeta_fast(sigma: f64, t: f64) -> Result<FastValue> {
    if !sigma.is_finite() || !t.is_finite() {
        return Err(Error::domain("zeta_fast", format!("{sigma} + {t}i"), "finite s"));
    }
    if sigma < 1.0 {
        return Err(Error::domain("zeta_fast", sigma, "Re s >= 1"));
    }
    if t.abs() > MAX_IMAG {
        return Err(Error::capacity("|Im s|", t.abs(), MAX_IMAG));
    }
    let dist = ((sigma - 1.0).powi(2) + t * t).sqrt();
    if dist < 1e-8 {
        return Err(Error::Pole {
            value: format!("{sigma} + {t}i"),
        });
    }

    let plan = em::plan(sigma, t, TARGET_LOG2)?;
    let n = plan.n_terms;
    let table_top = n.min(TABLE_LIMIT);
    let logs = log_table(table_top as usize);
    let spf = smallest_prime_factors(table_top as usize);

    let keep = (table_top / 2 + 1) as usize;
    let mut vals: Vec<Complex64> = Vec::with_capacity(keep);
    vals.push(Complex64::new(0.0, 0.0));
    vals.push(Complex64::new(1.0, 0.0));
    let mut acc = CompensatedSum::default();
    acc.add(Complex64::new(1.0, 0.0));
    let mut abs_sum = 1.0;
    let mut untabled = 0.0;
    for k in 2..n {
        let v = if k < table_top {
            let ku = k as usize;
            let p = spf[ku] as usize;
            let v = if p == ku {
                let (hi, lo) = logs[ku];
                power(k, sigma, t, hi, lo)
            } else {
                vals[p] * vals[ku / p]
            };
            if ku < keep {
                vals.push(v);
            }
            v
        } else {
            let v = power(k, sigma, t, (k as f64).ln(), 0.0);
            untabled += v.norm();
            v
        };
        abs_sum += v.norm();
        acc.add(v);
    }
    let mut sum = acc.value();

    // tail terms
    let (nhi, nlo) = dd_ln(n);
    let n_pow = power(n, sigma, t, nhi, nlo);
    let nf = n as f64;
    let s = Complex64::new(sigma, t);
    sum += n_pow * nf / (s - 1.0);
    sum += n_pow * 0.5;
    let coeffs = em_coefficients(plan.corrections, 64)?;
    let mut q = n_pow * s / nf;
    for k in 1..=plan.corrections {
        sum += q * coeffs[k - 1].to_f64();
        let a = s + (2 * k - 1) as f64;
        let b = s + (2 * k) as f64;
        q = q * a * b / (nf * nf);
    }

    // Each prime factor of a term costs one complex product plus the error
    // of its own power (magnitude, sin/cos): about 3 ulps per factor.
    let depth = (3.0 * nf.log2() + 4.0) * f64::EPSILON;
    let phase = (t.abs() * nf.ln() + 1.0) * f64::EPSILON;
    let error = plan.bound_log2.exp2()
        + abs_sum * depth
        + abs_sum * phase * f64::EPSILON
        + untabled * phase
        + (n_pow.norm() * nf / dist) * 4.0 * f64::EPSILON
        // compensated sum: O(ε|sum|) plus a second-order term in n
        + 2.0 * sum.norm() * f64::EPSILON
        + nf * abs_sum * f64::EPSILON * f64::EPSILON;
    Ok(FastValue { value: sum, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{zeta_complex, ComplexValue};
    use crate::precision::PrecisionContext;

    #[test]
    fn phase_reduction_is_accurate() {
        // t ln 7 for t = 682112.9169, compared with a 200-bit evaluation
        let t = 682_112.916_9;
        let (hi, lo) = dd_ln(7);
        let r = reduced_phase(t, hi, lo);
        let exact = {
            let two_pi = Float::with_val(200, rug::float::Constant::Pi) * 2u32;
            let theta = Float::with_val(200, Float::ln_u(7)) * t;
            let k = Float::with_val(200, &theta / &two_pi).round();
            (theta - k * two_pi).to_f64()
        };
        assert!((r - exact).abs() < 1e-15, "{r} vs {exact}");
    }

    #[test]
    fn agrees_with_mpfr_kernel() {
        let ctx = PrecisionContext::with_bits(80).unwrap();
        for &(sigma, t) in &[(1.0, 1.0), (1.0, 14.2), (1.5, 100.0), (1.0, 5000.0), (1.0, 27956.21412251561), (2.0, -30.0)] {
            let fast = zeta_fast(sigma, t).unwrap();
            let slow = zeta_complex(&ComplexValue::from_f64(64, sigma, t), &ctx).unwrap();
            let (re, im) = slow.to_f64_pair();
            let err = (fast.value - Complex64::new(re, im)).norm();
            assert!(err < 1e-13, "s = {sigma} + {t}i: err {err}");
            assert!(err <= fast.error.max(1e-15), "estimate {} below actual {err}", fast.error);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(zeta_fast(1.0, 0.0), Err(Error::Pole { .. })));
        assert!(matches!(zeta_fast(0.5, 10.0), Err(Error::Domain { .. })));
        assert!(matches!(zeta_fast(1.0, 1e9), Err(Error::Capacity { .. })));
    }
}
