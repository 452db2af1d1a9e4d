//! The prime zeta function `P(σ) = Σ_p p^{-σ}` for real `σ > 1`.
//!
//! `P(σ) = Σ_r μ(r)/r · log ζ(rσ)`. For `rσ >= 2` the r-th term is at most
//! `3/(r 2^{rσ})` in absolute value, which gives the truncation point. The
//! brute-force sum over a sieve is kept as an independent check.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use rug::float::Round;
use rug::ops::{AddAssignRound, MulAssignRound, NegAssign, Pow};
use rug::{Assign, Float};
use serde::Serialize;

pub use crate::arith::{moebius, MoebiusTable, PrimeSieve};
use crate::error::{Error, Result};
use crate::kernel::log_zeta_abs;
use crate::precision::{PrecisionContext, Tolerance};

/// Smallest accepted argument of [`prime_zeta`].
pub const SIGMA_FLOOR: f64 = 1.05;

/// Accepted tolerances satisfy `eps > 2^(-bits + EPS_SLACK_BITS)`.
const EPS_SLACK_BITS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeZetaValue {
    #[serde(serialize_with = "crate::serde_float::serialize")]
    pub value: Float,
    /// The result differs from `P(σ)` by less than this.
    pub error_bound: Tolerance,
    /// Number of Möbius terms summed, `R`.
    pub terms: u64,
}

/// `log2` of `Σ_{r > R} 3/(r 2^{rσ})`, bounded by a geometric series.
fn tail_log2(sigma: f64, r_max: u64) -> f64 {
    let next = (r_max + 1) as f64;
    3f64.log2() - next.log2() - next * sigma - (1.0 - (-sigma).exp2()).log2()
}

/// Least `R >= 1` whose tail bound is below `eps/2`.
pub fn truncation_point(sigma: f64, eps: Tolerance) -> u64 {
    let target = eps.log2() - 1.0;
    let mut r = ((-target / sigma).floor() as u64).saturating_sub(2).max(1);
    while tail_log2(sigma, r) >= target {
        r += 1;
    }
    // walk back down in case the initial guess overshot
    while r > 1 && tail_log2(sigma, r - 1) < target {
        r -= 1;
    }
    r
}

fn check_arguments(sigma: &Float, eps: Tolerance, ctx: &PrecisionContext) -> Result<()> {
    if !sigma.is_finite() || *sigma < SIGMA_FLOOR {
        return Err(Error::domain("prime_zeta", sigma, "sigma >= 1.05"));
    }
    eps.check_attainable(ctx, EPS_SLACK_BITS)
}

/// `r σ` rounded to `prec` bits (exact when `prec` exceeds the bits of σ
/// plus those of `r`).
fn scaled(sigma: &Float, r: u64, prec: u32) -> Float {
    Float::with_val(prec, sigma * r)
}

/// Values of `log ζ(mσ)` for a fixed σ, each computed once.
pub(crate) struct LogZetaMemo {
    sigma: Float,
    target_log2: f64,
    values: HashMap<u64, Float>,
}

impl LogZetaMemo {
    pub(crate) fn new(sigma: &Float, target_log2: f64) -> Self {
        LogZetaMemo {
            sigma: sigma.clone(),
            target_log2,
            values: HashMap::new(),
        }
    }

    /// Computes every missing multiple in `ms`, in parallel.
    pub(crate) fn fill(&mut self, ms: &BTreeSet<u64>) -> Result<()> {
        let prec = self.sigma.prec() + 64;
        let missing: Vec<u64> = ms.iter().copied().filter(|m| !self.values.contains_key(m)).collect();
        let computed: Vec<Result<(u64, Float)>> = missing
            .par_iter()
            .map(|&m| {
                let x = scaled(&self.sigma, m, prec);
                log_zeta_abs(&x, self.target_log2).map(|v| (m, v))
            })
            .collect();
        for item in computed {
            let (m, v) = item?;
            self.values.insert(m, v);
        }
        Ok(())
    }

    pub(crate) fn get(&self, m: u64) -> &Float {
        &self.values[&m]
    }

    pub(crate) fn len(&self) -> usize {
        self.values.len()
    }
}

/// `P(σ)` with absolute error below `eps`.
pub fn prime_zeta(sigma: &Float, eps: Tolerance, ctx: &PrecisionContext) -> Result<PrimeZetaValue> {
    let mut out = prime_zeta_multiples(sigma, &[1], eps, ctx)?;
    Ok(out.remove(0))
}

/// `P(mσ)` for each `m` in `multipliers`, each with absolute error below
/// `eps`. Every `log ζ(kσ)` needed by more than one of them is computed
/// once.
pub fn prime_zeta_multiples(
    sigma: &Float,
    multipliers: &[u64],
    eps: Tolerance,
    ctx: &PrecisionContext,
) -> Result<Vec<PrimeZetaValue>> {
    check_arguments(sigma, eps, ctx)?;
    if multipliers.contains(&0) {
        return Err(Error::domain("prime_zeta multiplier", 0, "m >= 1"));
    }
    let (memo, plans) = prepare(sigma, multipliers, eps)?;
    Ok(plans
        .iter()
        .zip(multipliers)
        .map(|(&r_max, &m)| assemble(&memo, m, r_max, eps, ctx))
        .collect())
}

/// Truncation points for each multiplier plus the shared memo of log ζ.
pub(crate) fn prepare(sigma: &Float, multipliers: &[u64], eps: Tolerance) -> Result<(LogZetaMemo, Vec<u64>)> {
    let sf = sigma.to_f64();
    let max_r = multipliers
        .iter()
        .map(|&m| truncation_point(sf * m as f64, eps))
        .max()
        .unwrap_or(1);
    let mu = MoebiusTable::new(max_r);
    let mut plans = Vec::with_capacity(multipliers.len());
    let mut needed = BTreeSet::new();
    for &m in multipliers {
        let r_max = truncation_point(sf * m as f64, eps);
        for r in 1..=r_max {
            if mu.get(r) != Some(0) {
                needed.insert(m * r);
            }
        }
        plans.push(r_max);
    }
    // Σ 1/r over the kept terms is at most 1 + ln R; one extra bit covers
    // the final rounding.
    let spread = (1.0 + (max_r as f64).ln()).log2();
    let mut memo = LogZetaMemo::new(sigma, eps.log2() - 2.0 - spread.max(0.0));
    memo.fill(&needed)?;
    Ok((memo, plans))
}

pub(crate) fn assemble(memo: &LogZetaMemo, m: u64, r_max: u64, eps: Tolerance, ctx: &PrecisionContext) -> PrimeZetaValue {
    let wp = ctx.working_bits().max(eps.bits_needed() + 32);
    let mut sum = Float::new(wp);
    let mut term = Float::new(wp);
    for r in 1..=r_max {
        let mu = moebius(r).expect("r >= 1");
        if mu == 0 {
            continue;
        }
        term.assign(memo.get(m * r) / r);
        if mu > 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
    }
    PrimeZetaValue {
        value: sum,
        error_bound: eps,
        terms: r_max,
    }
}

/// `Σ_{p <= prime_limit} p^{-σ}` rounded downward, together with an upper
/// bound `prime_limit^{1-σ}/(σ-1)` for the omitted primes (rounded upward).
/// `P(σ)` lies in `[lower, lower + tail_bound]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceBracket {
    pub lower: Float,
    pub tail_bound: Float,
    pub primes: usize,
}

pub fn prime_zeta_bruteforce(sigma: &Float, prime_limit: u64, bits: u32) -> Result<BruteForceBracket> {
    if !sigma.is_finite() || *sigma <= 1 {
        return Err(Error::domain("prime_zeta_bruteforce", sigma, "sigma > 1"));
    }
    if prime_limit < 100 {
        return Err(Error::domain("prime_limit", prime_limit, ">= 100"));
    }
    if prime_limit > u64::from(u32::MAX) {
        return Err(Error::capacity("prime_limit", prime_limit, u32::MAX));
    }
    let bits = bits.max(64);
    let sieve = PrimeSieve::new(prime_limit);
    let sigma = Float::with_val(sigma.prec().max(bits), sigma);

    // p^{-σ} = exp(-σ ln p); rounding ln p and the product upward and the
    // exponential downward gives a lower bound for every term.
    let mut lower = Float::new(bits);
    for &p in sieve.primes() {
        let (mut x, _) = Float::with_val_round(bits, Float::ln_u(p as u32), Round::Up);
        x.mul_assign_round(&sigma, Round::Up);
        x.neg_assign();
        x.exp_round(Round::Down);
        lower.add_assign_round(&x, Round::Down);
    }

    let (one_minus, _) = Float::with_val_round(bits, 1u32 - &sigma, Round::Up);
    let base = Float::with_val(bits, prime_limit);
    let (pow, _) = Float::with_val_round(bits, (&base).pow(&one_minus), Round::Up);
    let den = Float::with_val_round(bits, &sigma - 1u32, Round::Down).0;
    let tail_bound = Float::with_val_round(bits, &pow / &den, Round::Up).0;
    Ok(BruteForceBracket {
        lower,
        tail_bound,
        primes: sieve.len(),
    })
}
