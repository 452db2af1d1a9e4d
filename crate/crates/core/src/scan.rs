//! Sign structure of `Re ζ(1+it)`.
//!
//! Two tools:
//!
//! * [`certify_positive`] walks up the line using the bound
//!   `|d/dt arg ζ(1+it)| <= (3/4) log(t² + 4) + 7` (valid for `t >= 10`):
//!   from a point with `|arg ζ| < π/2`, `Re ζ` stays positive for as long as
//!   the slope bound cannot use up the remaining angle.
//! * [`Scanner`] samples `Re ζ(1+it)` on a grid, refines every sign change
//!   and every negative minimum, and assembles [`NegativeWindow`]s.
//!
//! Sampling uses the double-precision kernel; endpoint signs and minimum
//! values are confirmed with the MPFR kernel.

use std::f64::consts::FRAC_PI_2;
use std::ops::ControlFlow;

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::fast::{zeta_fast, FastValue};
use crate::kernel::{zeta_complex, ComplexValue};
use crate::precision::PrecisionContext;
use crate::rootfind::{find_zero, Strategy};

/// Smallest height where [`slope_bound`] holds.
pub const SLOPE_BOUND_MIN_T: f64 = 10.0;
/// Default angular margin for certification, in radians.
pub const DEFAULT_MARGIN: f64 = 0.05;
/// Certification gives up when the step falls below this.
pub const DEFAULT_MIN_STEP: f64 = 1e-6;
/// Largest accepted coarse step; the shortest known window is ~0.03 long.
pub const MAX_COARSE_STEP: f64 = 0.02;
/// Precision used to confirm signs and minimum values.
pub const PRECISE_BITS: u32 = 96;

/// `(3/4) log(t² + 4) + 7`, a bound for `|Re ζ'/ζ(1+it)|` when `t >= 10`.
pub fn slope_bound(t: f64) -> Result<f64> {
    if !(t >= SLOPE_BOUND_MIN_T) {
        return Err(Error::domain("slope_bound", t, "t >= 10"));
    }
    Ok(0.75 * (t * t + 4.0).ln() + 7.0)
}

/// ζ(1+it) from the MPFR kernel.
pub fn zeta_line(t: f64, ctx: &PrecisionContext) -> Result<ComplexValue> {
    if !t.is_finite() {
        return Err(Error::domain("zeta_line", t, "finite t"));
    }
    let s = ComplexValue::from_f64(64, 1.0, t);
    zeta_complex(&s, ctx)
}

/// `Re ζ(1+it)` from the MPFR kernel.
pub fn re_zeta_line(t: f64, ctx: &PrecisionContext) -> Result<Float> {
    if t == 0.0 {
        return Err(Error::Pole { value: "1 + 0i".into() });
    }
    Ok(zeta_line(t, ctx)?.re)
}

fn precise_ctx() -> PrecisionContext {
    PrecisionContext::with_bits(PRECISE_BITS).expect("valid precision")
}

/// `Re ζ(1+it)` whose sign is certain: the double-precision value when its
/// error estimate is below its magnitude, else the MPFR value.
fn re_checked(t: f64, evaluations: &mut u64) -> Result<f64> {
    *evaluations += 1;
    let v = zeta_fast(1.0, t)?;
    if v.value.re.abs() > 4.0 * v.error {
        return Ok(v.value.re);
    }
    *evaluations += 1;
    Ok(re_zeta_line(t, &precise_ctx())?.to_f64())
}

/// One step of a certification walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyStep {
    pub t: f64,
    /// Principal argument of ζ(1+it).
    pub arg: f64,
    /// Length certified from `t`.
    pub step: f64,
}

/// A range on which `Re ζ(1+it) > 0` has been certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedRange {
    pub t_lo: f64,
    pub t_hi: f64,
    pub margin: f64,
    pub steps: Vec<CertifyStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Certification {
    Certified { range: CertifiedRange },
    /// Headroom ran out at `t_fail`; `partial` covers `[t_lo, t_fail]`.
    Failed { t_fail: f64, partial: CertifiedRange },
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified { .. })
    }

    pub fn range(&self) -> &CertifiedRange {
        match self {
            Certification::Certified { range } => range,
            Certification::Failed { partial, .. } => partial,
        }
    }
}

/// Angular headroom `π/2 - |arg ζ(1+it)| - margin`, with the argument's
/// own error subtracted.
fn headroom(v: &FastValue, margin: f64) -> f64 {
    let modulus = v.value.norm();
    let arg_error = if v.error < modulus {
        (v.error / modulus).asin()
    } else {
        FRAC_PI_2
    };
    FRAC_PI_2 - v.value.arg().abs() - margin - arg_error
}

/// Certifies `Re ζ(1+it) > 0` on `[t_lo, t_hi]`.
pub fn certify_positive(t_lo: f64, t_hi: f64, margin: f64) -> Result<Certification> {
    certify_positive_with(t_lo, t_hi, margin, DEFAULT_MIN_STEP)
}

pub fn certify_positive_with(t_lo: f64, t_hi: f64, margin: f64, min_step: f64) -> Result<Certification> {
    if !(t_lo >= SLOPE_BOUND_MIN_T) {
        return Err(Error::domain("certify_positive t_lo", t_lo, "t_lo >= 10"));
    }
    if !t_hi.is_finite() || t_hi < t_lo {
        return Err(Error::domain("certify_positive t_hi", t_hi, "t_hi >= t_lo"));
    }
    if !(margin > 0.0 && margin < FRAC_PI_2) {
        return Err(Error::domain("certify_positive margin", margin, "0 < margin < pi/2"));
    }
    if !(min_step > 0.0) {
        return Err(Error::domain("certify_positive min_step", min_step, "min_step > 0"));
    }
    let mut range = CertifiedRange {
        t_lo,
        t_hi: t_lo,
        margin,
        steps: Vec::new(),
    };
    let mut t = t_lo;
    while t < t_hi {
        let v = zeta_fast(1.0, t)?;
        let room = headroom(&v, margin);
        // the bound at t + h0 covers [t, t + h] because h <= h0
        let h = if room > 0.0 {
            let h0 = room / slope_bound(t)?;
            room / slope_bound(t + h0)?
        } else {
            0.0
        };
        if h < min_step {
            range.t_hi = t;
            return Ok(Certification::Failed { t_fail: t, partial: range });
        }
        range.steps.push(CertifyStep {
            t,
            arg: v.value.arg(),
            step: h,
        });
        t += h;
    }
    range.t_hi = t_hi;
    Ok(Certification::Certified { range })
}

/// Certification of a range allowing for gaps: after a failure the walk
/// restarts `skip` further on. The result lists the certified pieces and
/// the uncovered ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub certified: Vec<CertifiedRange>,
    pub uncovered: Vec<(f64, f64)>,
}

pub fn certify_cover(t_lo: f64, t_hi: f64, margin: f64, skip: f64) -> Result<Coverage> {
    let mut out = Coverage {
        certified: Vec::new(),
        uncovered: Vec::new(),
    };
    let mut t = t_lo;
    while t < t_hi {
        match certify_positive(t, t_hi, margin)? {
            Certification::Certified { range } => {
                out.certified.push(range);
                break;
            }
            Certification::Failed { t_fail, partial } => {
                if !partial.steps.is_empty() {
                    out.certified.push(partial);
                }
                let next = (t_fail + skip).min(t_hi);
                out.uncovered.push((t_fail, next));
                t = next;
            }
        }
    }
    Ok(out)
}

/// A maximal interval where `Re ζ(1+it) < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativeWindow {
    pub t_start: f64,
    pub t_end: f64,
    pub t_min: f64,
    pub min_value: f64,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub coarse_step: f64,
    pub refine_tol: f64,
    /// Grid intervals per chunk.
    pub chunk_len: u64,
    /// Certify the gaps between windows with the slope bound.
    pub certify_gaps: bool,
    pub margin: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            coarse_step: 0.01,
            refine_tol: 1e-8,
            chunk_len: 2000,
            certify_gaps: false,
            margin: DEFAULT_MARGIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub t_lo: f64,
    pub t_hi: f64,
    pub windows: Vec<NegativeWindow>,
    /// Gap certification, when requested.
    pub coverage: Option<Coverage>,
    pub evaluations: u64,
}

/// The windows found in one chunk of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkResult {
    pub index: u64,
    pub windows: Vec<NegativeWindow>,
    pub evaluations: u64,
}

/// Grid scan of `[t_lo, t_hi]` for negative windows.
///
/// A window is reported when its start lies in `[t_lo, t_hi)`; its end may
/// lie beyond `t_hi`. Grid points are `t_lo + i * coarse_step`, and each
/// chunk covers `chunk_len` consecutive grid intervals, so a window is
/// attributed to exactly one chunk.
#[derive(Debug, Clone)]
pub struct Scanner {
    t_lo: f64,
    t_hi: f64,
    intervals: u64,
    cfg: ScanConfig,
}

impl Scanner {
    pub fn new(t_lo: f64, t_hi: f64, cfg: ScanConfig) -> Result<Self> {
        if !(t_lo > 0.0) || !t_lo.is_finite() {
            return Err(Error::domain("scan t_lo", t_lo, "t_lo > 0"));
        }
        if !(t_hi > t_lo) || !t_hi.is_finite() {
            return Err(Error::domain("scan t_hi", t_hi, "t_hi > t_lo"));
        }
        if !(cfg.coarse_step > 0.0 && cfg.coarse_step <= MAX_COARSE_STEP) {
            return Err(Error::domain("coarse_step", cfg.coarse_step, "0 < step <= 0.02"));
        }
        if !(cfg.refine_tol > 0.0 && cfg.refine_tol < cfg.coarse_step) {
            return Err(Error::domain("refine_tol", cfg.refine_tol, "0 < tol < coarse_step"));
        }
        if cfg.chunk_len == 0 {
            return Err(Error::domain("chunk_len", 0, "chunk_len >= 1"));
        }
        let intervals = ((t_hi - t_lo) / cfg.coarse_step).ceil() as u64;
        Ok(Scanner {
            t_lo,
            t_hi,
            intervals,
            cfg,
        })
    }

    pub fn config(&self) -> &ScanConfig {
        &self.cfg
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    fn point(&self, i: u64) -> f64 {
        if i >= self.intervals {
            self.t_hi
        } else {
            self.t_lo + i as f64 * self.cfg.coarse_step
        }
    }

    pub fn chunk_count(&self) -> u64 {
        self.intervals.div_ceil(self.cfg.chunk_len)
    }

    /// `[start, end]` of chunk `k`.
    pub fn chunk_bounds(&self, k: u64) -> (f64, f64) {
        let i0 = k * self.cfg.chunk_len;
        let i1 = ((k + 1) * self.cfg.chunk_len).min(self.intervals);
        (self.point(i0), self.point(i1))
    }

    pub fn scan_chunk(&self, k: u64) -> Result<ChunkResult> {
        let i0 = k * self.cfg.chunk_len;
        let i1 = ((k + 1) * self.cfg.chunk_len).min(self.intervals);
        let mut evaluations = 0;
        let mut values = Vec::with_capacity((i1 - i0 + 1) as usize);
        for i in i0..=i1 {
            values.push(re_checked(self.point(i), &mut evaluations)?);
        }
        let mut windows = Vec::new();
        let mut idx = 0usize;
        while idx < values.len() {
            if values[idx] >= 0.0 {
                idx += 1;
                continue;
            }
            let run_start = idx;
            while idx < values.len() && values[idx] < 0.0 {
                idx += 1;
            }
            let run_end = idx - 1;
            // starts before this chunk: belongs to the previous one, or
            // (for the first chunk) begins before t_lo
            if run_start == 0 {
                continue;
            }
            let gi = i0 + run_start as u64;
            let before = (self.point(gi - 1), values[run_start - 1]);
            let first_neg = (self.point(gi), values[run_start]);
            let (last_neg, after) = if run_end + 1 < values.len() {
                let gj = i0 + run_end as u64;
                ((self.point(gj), values[run_end]), (self.point(gj + 1), values[run_end + 1]))
            } else {
                self.extend_forward(self.point(i0 + run_end as u64), values[run_end], &mut evaluations)?
            };
            let samples: Vec<(f64, f64)> = (run_start..=run_end.min(values.len() - 1))
                .map(|r| (self.point(i0 + r as u64), values[r]))
                .collect();
            let w = self.refine_window(before, first_neg, last_neg, after, &samples, &mut evaluations)?;
            windows.push(w);
        }
        Ok(ChunkResult {
            index: k,
            windows,
            evaluations,
        })
    }

    /// Steps beyond the chunk until `Re ζ` is positive again.
    fn extend_forward(&self, t: f64, v: f64, evaluations: &mut u64) -> Result<((f64, f64), (f64, f64))> {
        let mut last = (t, v);
        for n in 1..=100_000u64 {
            let u = t + n as f64 * self.cfg.coarse_step;
            let w = re_checked(u, evaluations)?;
            if w >= 0.0 {
                return Ok((last, (u, w)));
            }
            last = (u, w);
        }
        Err(Error::Inconsistent(format!("no end of the negative window starting near {t}")))
    }

    fn refine_window(
        &self,
        before: (f64, f64),
        first_neg: (f64, f64),
        last_neg: (f64, f64),
        after: (f64, f64),
        samples: &[(f64, f64)],
        evaluations: &mut u64,
    ) -> Result<NegativeWindow> {
        let tol = self.cfg.refine_tol;
        let t_start = self.refine_crossing(before.0, first_neg.0, evaluations)?;
        let t_end = self.refine_crossing(last_neg.0, after.0, evaluations)?;
        // lowest sample, including any found beyond the chunk end
        let mut lowest = samples
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or(last_neg);
        if last_neg.1 < lowest.1 {
            lowest = last_neg;
        }
        let step = self.cfg.coarse_step;
        let a = (lowest.0 - step).max(t_start);
        let b = (lowest.0 + step).min(t_end);
        let t_min = golden_section_min(
            |t| {
                *evaluations += 1;
                Ok(zeta_fast(1.0, t)?.value.re)
            },
            a,
            b,
            tol,
        )?;
        *evaluations += 1;
        let min_value = re_zeta_line(t_min, &precise_ctx())?.to_f64();
        if !(t_start < t_min && t_min < t_end && min_value < 0.0) {
            return Err(Error::Inconsistent(format!(
                "window assembly failed near t = {t_min}: [{t_start}, {t_end}], min {min_value}"
            )));
        }
        Ok(NegativeWindow {
            t_start,
            t_end,
            t_min,
            min_value,
            length: t_end - t_start,
        })
    }

    /// Sign change of `Re ζ(1+it)` between `a` and `b`, located with the
    /// double-precision kernel and confirmed with the MPFR one.
    fn refine_crossing(&self, a: f64, b: f64, evaluations: &mut u64) -> Result<f64> {
        let tol = self.cfg.refine_tol;
        let mut count = 0u64;
        let res = find_zero(
            |t: &f64| {
                count += 1;
                Ok(zeta_fast(1.0, *t)?.value.re)
            },
            a,
            b,
            tol,
            Strategy::Hybrid,
        )?;
        *evaluations += count;
        let (lo, hi) = (res.bracket.lo, res.bracket.hi);
        if res.bracket.exact_root {
            return Ok(lo);
        }
        let ctx = precise_ctx();
        let f_lo = re_zeta_line(lo, &ctx)?;
        let f_hi = re_zeta_line(hi, &ctx)?;
        *evaluations += 2;
        if f_lo.is_sign_negative() != f_hi.is_sign_negative() {
            return Ok(0.5 * (lo + hi));
        }
        // the fast kernel misplaced the crossing: redo it in MPFR
        let mut count = 0u64;
        let res = find_zero(
            |t: &f64| {
                count += 1;
                Ok(re_zeta_line(*t, &ctx)?.to_f64())
            },
            a,
            b,
            tol,
            Strategy::Hybrid,
        )?;
        *evaluations += count;
        Ok(0.5 * (res.bracket.lo + res.bracket.hi))
    }

    /// Scans every chunk (in parallel) and assembles the report.
    pub fn run(&self) -> Result<ScanReport> {
        self.run_from(0, Vec::new(), 0, |_| Ok(ControlFlow::Continue(())))?
            .ok_or_else(|| Error::Inconsistent("scan stopped without a request".into()))
    }

    /// Scans chunks `first..`, starting from windows and evaluation counts
    /// of an earlier partial run. `progress` is called after each batch of
    /// chunks, in chunk order, with the accumulated state; returning
    /// `Break` stops the scan and makes this return `Ok(None)`.
    pub fn run_from<P>(
        &self,
        first: u64,
        mut windows: Vec<NegativeWindow>,
        mut evaluations: u64,
        mut progress: P,
    ) -> Result<Option<ScanReport>>
    where
        P: FnMut(&Progress) -> Result<ControlFlow<()>>,
    {
        let total = self.chunk_count();
        let batch = (rayon::current_num_threads() as u64 * 2).max(1);
        let mut k = first;
        while k < total {
            let end = (k + batch).min(total);
            let results: Vec<Result<ChunkResult>> = (k..end).into_par_iter().map(|c| self.scan_chunk(c)).collect();
            for r in results {
                let r = r?;
                windows.extend(r.windows);
                evaluations += r.evaluations;
            }
            k = end;
            let flow = progress(&Progress {
                next_chunk: k,
                completed_to: self.chunk_bounds(k - 1).1,
                windows: &windows,
                evaluations,
            })?;
            if flow.is_break() {
                return Ok(None);
            }
        }
        windows.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
        for pair in windows.windows(2) {
            if pair[1].t_start <= pair[0].t_end {
                return Err(Error::Inconsistent(format!(
                    "overlapping windows at {} and {}",
                    pair[0].t_start, pair[1].t_start
                )));
            }
        }
        let coverage = if self.cfg.certify_gaps {
            Some(self.certify_gaps(&windows)?)
        } else {
            None
        };
        Ok(Some(ScanReport {
            t_lo: self.t_lo,
            t_hi: self.t_hi,
            windows,
            coverage,
            evaluations,
        }))
    }

    fn certify_gaps(&self, windows: &[NegativeWindow]) -> Result<Coverage> {
        let mut out = Coverage {
            certified: Vec::new(),
            uncovered: Vec::new(),
        };
        let mut t = self.t_lo.max(SLOPE_BOUND_MIN_T);
        if self.t_lo < SLOPE_BOUND_MIN_T {
            out.uncovered.push((self.t_lo, t.min(self.t_hi)));
        }
        let mut gaps = Vec::new();
        for w in windows {
            if w.t_start > t {
                gaps.push((t, w.t_start));
            }
            t = t.max(w.t_end);
        }
        if t < self.t_hi {
            gaps.push((t, self.t_hi));
        }
        for (a, b) in gaps {
            let c = certify_cover(a, b, self.cfg.margin, self.cfg.coarse_step)?;
            out.certified.extend(c.certified);
            out.uncovered.extend(c.uncovered);
        }
        Ok(out)
    }
}

/// State passed to the progress callback of [`Scanner::run_from`].
#[derive(Debug)]
pub struct Progress<'a> {
    /// First chunk not yet scanned.
    pub next_chunk: u64,
    /// End of the last scanned chunk.
    pub completed_to: f64,
    pub windows: &'a [NegativeWindow],
    pub evaluations: u64,
}

/// `find_negative_windows` with default chunking and no gap certification.
pub fn find_negative_windows(t_lo: f64, t_hi: f64, coarse_step: f64, refine_tol: f64) -> Result<Vec<NegativeWindow>> {
    let cfg = ScanConfig {
        coarse_step,
        refine_tol,
        ..ScanConfig::default()
    };
    Ok(Scanner::new(t_lo, t_hi, cfg)?.run()?.windows)
}

/// Minimizes a unimodal `g` on `[a, b]` to width `tol`.
pub fn golden_section_min<G>(mut g: G, a: f64, b: f64, tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c)?;
    let mut gd = g(d)?;
    while b - a > tol {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// `Σ lengths / T`: the fraction of `[0, T]` covered by the windows.
pub fn empirical_d(windows: &[NegativeWindow], big_t: f64) -> Result<f64> {
    if !(big_t > 0.0) || !big_t.is_finite() {
        return Err(Error::domain("empirical_d T", big_t, "T > 0"));
    }
    let mut total = 0.0;
    for w in windows {
        if w.t_start < 0.0 || w.t_end > big_t {
            return Err(Error::domain("empirical_d window", w.t_end, "window inside [0, T]"));
        }
        total += w.length;
    }
    Ok(total / big_t)
}
