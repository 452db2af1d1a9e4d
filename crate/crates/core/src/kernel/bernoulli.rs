//! Bernoulli numbers.
//!
//! Even-index values come from the tangent numbers `T_k` via
//! `B_2k = (-1)^(k-1) 2k T_k / (4^k (4^k - 1))`; the tangent numbers are
//! produced by the integer-only triangle recurrence of Brent and Harvey,
//! so the exact values never pass through rational arithmetic.
//!
//! Exact values are computed once and shared. Float images are cached per
//! precision because the ζ kernels ask for the same table thousands of times.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Largest index accepted by [`bernoulli`].
pub const MAX_BERNOULLI_INDEX: u32 = 4096;

/// `B_2k` for `k = 0..len`.
static EXACT: OnceLock<RwLock<Arc<Vec<Rational>>>> = OnceLock::new();
/// `B_2k / (2k)!` for `k = 1..=len`, keyed by precision.
static EM_COEFFS: OnceLock<RwLock<HashMap<u32, Arc<Vec<Float>>>>> = OnceLock::new();
/// `B_n` floats keyed by `(n, precision)`.
static FLOATS: OnceLock<RwLock<HashMap<(u32, u32), Float>>> = OnceLock::new();

/// Tangent numbers `T_1..=T_n` (index 0 holds `T_1`).
pub(crate) fn tangent_numbers(n: usize) -> Vec<Integer> {
    if n == 0 {
        return Vec::new();
    }
    let mut t = vec![Integer::new(); n];
    t[0] = Integer::from(1);
    for k in 1..n {
        t[k] = Integer::from(&t[k - 1] * k as u32);
    }
    for k in 1..n {
        for j in k..n {
            // T_j <- (j - k) T_{j-1} + (j - k + 2) T_j, with 1-based j, k
            let (lo, hi) = t.split_at_mut(j);
            let prev = &lo[j - 1];
            let cur = &mut hi[0];
            *cur *= (j - k + 2) as u32;
            *cur += Integer::from(prev * (j - k) as u32);
        }
    }
    t
}

fn even_table(k_max: usize) -> Arc<Vec<Rational>> {
    let lock = EXACT.get_or_init(|| RwLock::new(Arc::new(Vec::new())));
    {
        let cur = lock.read().expect("bernoulli cache poisoned");
        if cur.len() > k_max {
            return Arc::clone(&cur);
        }
    }
    let mut guard = lock.write().expect("bernoulli cache poisoned");
    if guard.len() > k_max {
        return Arc::clone(&guard);
    }
    let len = (k_max + 1).max(2 * guard.len()).max(32);
    let tangent = tangent_numbers(len - 1);
    let mut table = Vec::with_capacity(len);
    table.push(Rational::from(1));
    for k in 1..len {
        let four_k = Integer::from(1) << (2 * k as u32);
        let den = Integer::from(&four_k - 1u32) * &four_k;
        let num = Integer::from(&tangent[k - 1] * (2 * k) as u32);
        let mut b = Rational::from((num, den));
        if k % 2 == 0 {
            b = -b;
        }
        table.push(b);
    }
    *guard = Arc::new(table);
    Arc::clone(&guard)
}

/// Exact `B_n`. `B_1 = -1/2`; odd `n > 1` is rejected (the value is zero and
/// asking for it signals a caller bug).
pub fn bernoulli_exact(n: u32) -> Result<Rational> {
    if n > MAX_BERNOULLI_INDEX {
        return Err(Error::capacity("bernoulli index", n, MAX_BERNOULLI_INDEX));
    }
    match n {
        1 => Ok(Rational::from((-1, 2))),
        n if n % 2 == 1 => Err(Error::domain("bernoulli", n, "n even (or n = 1)")),
        n => Ok(even_table(n as usize / 2)[n as usize / 2].clone()),
    }
}

/// `B_n` rounded to the working precision of `ctx`.
pub fn bernoulli(n: u32, ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.working_bits();
    let cache = FLOATS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().expect("bernoulli cache poisoned").get(&(n, prec)) {
        return Ok(v.clone());
    }
    let value = Float::with_val(prec, bernoulli_exact(n)?);
    cache
        .write()
        .expect("bernoulli cache poisoned")
        .insert((n, prec), value.clone());
    Ok(value)
}

/// `B_2k / (2k)!` for `k = 1..=m` (element `k - 1`) at precision `prec`.
pub(crate) fn em_coefficients(m: usize, prec: u32) -> Result<Arc<Vec<Float>>> {
    if 2 * m > MAX_BERNOULLI_INDEX as usize {
        return Err(Error::capacity(
            "Euler-Maclaurin Bernoulli terms",
            2 * m,
            MAX_BERNOULLI_INDEX,
        ));
    }
    let cache = EM_COEFFS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().expect("bernoulli cache poisoned").get(&prec) {
        if v.len() >= m {
            return Ok(Arc::clone(v));
        }
    }
    let mut guard = cache.write().expect("bernoulli cache poisoned");
    if let Some(v) = guard.get(&prec) {
        if v.len() >= m {
            return Ok(Arc::clone(v));
        }
    }
    let len = m.max(guard.get(&prec).map_or(0, |v| 2 * v.len())).max(16);
    let len = len.min(MAX_BERNOULLI_INDEX as usize / 2).max(m);
    let exact = even_table(len);
    let mut factorial = Integer::from(1);
    let mut coeffs = Vec::with_capacity(len);
    for k in 1..=len {
        factorial *= (2 * k - 1) as u32;
        factorial *= (2 * k) as u32;
        let q = Rational::from(&exact[k] / Rational::from(&factorial));
        coeffs.push(Float::with_val(prec, q));
    }
    let coeffs = Arc::new(coeffs);
    guard.insert(prec, Arc::clone(&coeffs));
    Ok(coeffs)
}
