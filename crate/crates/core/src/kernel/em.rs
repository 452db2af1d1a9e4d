//! Parameter choice for Euler–Maclaurin summation of ζ(s).
//!
//! With the first `N - 1` terms summed directly and `M` Bernoulli
//! corrections,
//!
//! ```text
//! ζ(s) = Σ_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2
//!        + Σ_{k=1..M} B_2k/(2k)! (s)_{2k-1} N^{-s-2k+1} + R,
//! |R| <= |B_2M|/(2M)! |(s)_2M| N^{1-σ-2M} / (σ + 2M - 1),
//! ```
//!
//! and `|B_2M|/(2M)! < 4 (2π)^{-2M}`. The planner picks the cheapest
//! `(N, M)` whose remainder bound is below the target.

use crate::error::{Error, Result};
use crate::kernel::bernoulli::MAX_BERNOULLI_INDEX;

const LOG2_TWO_PI: f64 = 2.651_496_129_472_318_7;
/// Relative cost of one Bernoulli correction against one main-sum term.
const CORRECTION_COST: u64 = 4;
const MAX_TERMS: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EmPlan {
    /// The main sum runs over `1 <= n < n_terms`.
    pub n_terms: u64,
    /// Number of Bernoulli corrections.
    pub corrections: usize,
    /// log2 of the remainder bound.
    pub bound_log2: f64,
}

/// Smallest main-sum length allowed for `s = sigma + i t`.
pub(crate) fn min_terms(t: f64) -> u64 {
    10u64.max((t.abs() / 3.0).ceil() as u64)
}

/// Cheapest plan with remainder below `2^target_log2`.
pub(crate) fn plan(sigma: f64, t: f64, target_log2: f64) -> Result<EmPlan> {
    let max_m = MAX_BERNOULLI_INDEX as usize / 2;
    let mut best: Option<(u64, EmPlan)> = None;
    let mut n = min_terms(t);
    while n <= MAX_TERMS {
        if let Some((cost, _)) = best {
            if n >= cost {
                break;
            }
        }
        if let Some(m) = corrections_needed(sigma, t, n, target_log2, max_m) {
            let cost = n + CORRECTION_COST * m.0 as u64;
            if best.map_or(true, |(c, _)| cost < c) {
                best = Some((
                    cost,
                    EmPlan {
                        n_terms: n,
                        corrections: m.0,
                        bound_log2: m.1,
                    },
                ));
            }
        }
        n = (n + n / 8).max(n + 1);
    }
    best.map(|(_, p)| p).ok_or_else(|| {
        Error::capacity(
            "Euler-Maclaurin plan",
            format!("target 2^{target_log2:.1} at s = {sigma} + {t}i"),
            format!("N <= 2^40, M <= {max_m}"),
        )
    })
}

/// Smallest `M` meeting the target at this `N`, with its bound.
fn corrections_needed(sigma: f64, t: f64, n: u64, target_log2: f64, max_m: usize) -> Option<(usize, f64)> {
    let log2_n = (n as f64).log2();
    // running log2 |(s)_{2M}|
    let mut poch = 0.0;
    let mut prev_bound = f64::INFINITY;
    for m in 1..=max_m {
        let j0 = (2 * m - 2) as f64;
        poch += abs_log2(sigma + j0, t) + abs_log2(sigma + j0 + 1.0, t);
        let mf = m as f64;
        let bound = 2.0 - 2.0 * mf * LOG2_TWO_PI + poch + (1.0 - sigma - 2.0 * mf) * log2_n
            - (sigma + 2.0 * mf - 1.0).log2();
        if bound <= target_log2 {
            return Some((m, bound));
        }
        if bound > prev_bound {
            // past the minimum of the asymptotic series
            return None;
        }
        prev_bound = bound;
    }
    None
}

fn abs_log2(re: f64, im: f64) -> f64 {
    0.5 * (re * re + im * im).log2()
}

/// `log2` of the remainder bound for a given plan.
#[cfg(test)]
fn remainder_log2(sigma: f64, t: f64, n: u64, m: usize) -> f64 {
    let mut poch = 0.0;
    for j in 0..2 * m {
        poch += abs_log2(sigma + j as f64, t);
    }
    let mf = m as f64;
    2.0 - 2.0 * mf * LOG2_TWO_PI + poch + (1.0 - sigma - 2.0 * mf) * (n as f64).log2()
        - (sigma + 2.0 * mf - 1.0).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plans_meet_targets() {
        for &(sigma, t, target) in &[
            (2.0, 0.0, -64.0),
            (1.19, 0.0, -1800.0),
            (1700.0, 0.0, -1800.0),
            (1.0, 682112.9, -60.0),
            (1.0, 10.0, -100.0),
        ] {
            let p = plan(sigma, t, target).unwrap();
            assert!(p.bound_log2 <= target);
            assert!(p.n_terms >= min_terms(t));
            let again = remainder_log2(sigma, t, p.n_terms, p.corrections);
            assert!((again - p.bound_log2).abs() < 1e-6);
        }
    }

    #[test]
    fn large_arguments_need_few_terms() {
        let p = plan(1700.0, 0.0, -1800.0).unwrap();
        assert!(p.n_terms <= 12 && p.corrections <= 2, "{p:?}");
    }

    #[test]
    fn imaginary_part_sets_the_floor() {
        let p = plan(1.0, 3.0e6, -60.0).unwrap();
        assert!(p.n_terms >= 1_000_000);
        assert!(p.corrections < 60);
    }
}
