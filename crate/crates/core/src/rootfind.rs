//! Bracketing zero finders using function values only.
//!
//! Every strategy keeps a pair of points where the function has opposite
//! signs, so the answer is always an enclosure, never just an estimate.
//!
//! * [`Strategy::Bisect`] halves the bracket each step.
//! * [`Strategy::Hybrid`] is a Dekker-style method: a secant step through
//!   the two most recent iterates is taken when it falls between the best
//!   point and the midpoint, otherwise the bracket is bisected. If two
//!   consecutive steps fail to halve the bracket, the next step is a forced
//!   bisection, so the cost never exceeds 1.5x that of bisection (plus a
//!   constant), while smooth functions converge with order ≈ 1.618.
//! * [`Strategy::Convex`] assumes the function is convex (or concave) and
//!   monotone on the bracket. The chord through the bracket endpoints then
//!   lands on one side of the root and the chord extrapolated from the two
//!   latest points of the other side lands on the other, so both ends of
//!   the bracket move superlinearly.

use std::cmp::Ordering;
use std::fmt::Debug;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arithmetic needed by the zero finders.
pub trait RootScalar: Clone + PartialOrd + Debug {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    /// `self * factor`.
    fn scale(&self, factor: f64) -> Self;
    fn abs(&self) -> Self;
    fn is_finite(&self) -> bool;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn to_f64(&self) -> f64;

    fn midpoint(a: &Self, b: &Self) -> Self {
        a.add(b).scale(0.5)
    }
}

impl RootScalar for f64 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn scale(&self, factor: f64) -> Self {
        self * factor
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl RootScalar for Float {
    fn add(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self * other)
    }
    fn div(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self / other)
    }
    fn scale(&self, factor: f64) -> Self {
        Float::with_val(self.prec(), self * factor)
    }
    fn abs(&self) -> Self {
        Float::with_val(self.prec(), self.abs_ref())
    }
    fn is_finite(&self) -> bool {
        Float::is_finite(self)
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
}

/// An interval `[lo, hi]` on which the function changes sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
    pub f_lo: T,
    pub f_hi: T,
    /// Set when an iterate hit an exact zero; then `lo == hi`.
    pub exact_root: bool,
}

impl<T: RootScalar> Bracket<T> {
    pub fn width(&self) -> T {
        self.hi.sub(&self.lo)
    }

    pub fn midpoint(&self) -> T {
        T::midpoint(&self.lo, &self.hi)
    }

    /// `lo <= hi` and either the signs differ or the bracket is a flagged
    /// exact root.
    pub fn is_valid(&self) -> bool {
        if self.exact_root {
            return self.lo == self.hi;
        }
        self.lo < self.hi && !self.f_lo.is_zero() && !self.f_hi.is_zero()
            && self.f_lo.is_negative() != self.f_hi.is_negative()
    }

    fn exact(x: T, fx: T) -> Self {
        Bracket {
            lo: x.clone(),
            hi: x,
            f_lo: fx.clone(),
            f_hi: fx,
            exact_root: true,
        }
    }

    fn ordered(a: T, fa: T, b: T, fb: T) -> Self {
        if a <= b {
            Bracket { lo: a, hi: b, f_lo: fa, f_hi: fb, exact_root: false }
        } else {
            Bracket { lo: b, hi: a, f_lo: fb, f_hi: fa, exact_root: false }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroResult<T> {
    pub bracket: Bracket<T>,
    /// The endpoint with the smaller `|f|` (or the exact root).
    pub best: T,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Bisect,
    #[default]
    Hybrid,
    Convex,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bisect" => Ok(Strategy::Bisect),
            "hybrid" => Ok(Strategy::Hybrid),
            "convex" => Ok(Strategy::Convex),
            other => Err(Error::Config(format!("unknown strategy {other:?}"))),
        }
    }
}

/// Upper limit on iterations, far above what any strategy needs for a
/// tolerance representable in the scalar type.
const MAX_ITERATIONS: usize = 100_000;

struct Counter<F> {
    f: F,
    evaluations: usize,
}

impl<F> Counter<F> {
    fn eval<T: RootScalar>(&mut self, x: &T) -> Result<T>
    where
        F: FnMut(&T) -> Result<T>,
    {
        self.evaluations += 1;
        let fx = (self.f)(x)?;
        if !fx.is_finite() {
            return Err(Error::NonFinite { at: format!("{x:?}") });
        }
        Ok(fx)
    }
}

fn same_sign<T: RootScalar>(a: &T, b: &T) -> bool {
    a.is_negative() == b.is_negative()
}

/// Finds a sign change of `f` in `[a, b]` to absolute width `tol`.
pub fn find_zero<T, F>(f: F, a: T, b: T, tol: T, strategy: Strategy) -> Result<ZeroResult<T>>
where
    T: RootScalar,
    F: FnMut(&T) -> Result<T>,
{
    find_zero_observed(f, a, b, tol, strategy, |_| {})
}

/// As [`find_zero`], calling `observe` with the bracket after every
/// iteration.
pub fn find_zero_observed<T, F, O>(
    f: F,
    a: T,
    b: T,
    tol: T,
    strategy: Strategy,
    mut observe: O,
) -> Result<ZeroResult<T>>
where
    T: RootScalar,
    F: FnMut(&T) -> Result<T>,
    O: FnMut(&Bracket<T>),
{
    if !(tol.is_finite() && !tol.is_zero() && !tol.is_negative()) {
        return Err(Error::Config(format!("tolerance {tol:?} must be positive")));
    }
    if !(a.is_finite() && b.is_finite()) || a == b {
        return Err(Error::Config(format!("degenerate interval [{a:?}, {b:?}]")));
    }
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let mut f = Counter { f, evaluations: 0 };
    let fa = f.eval(&a)?;
    if fa.is_zero() {
        return Ok(done(Bracket::exact(a.clone(), fa), a, 0, f.evaluations));
    }
    let fb = f.eval(&b)?;
    if fb.is_zero() {
        return Ok(done(Bracket::exact(b.clone(), fb), b, 0, f.evaluations));
    }
    if same_sign(&fa, &fb) {
        return Err(Error::NoSignChange {
            lo: format!("{a:?}"),
            hi: format!("{b:?}"),
            f_lo: format!("{fa:?}"),
            f_hi: format!("{fb:?}"),
        });
    }
    let start = Bracket::ordered(a, fa, b, fb);
    observe(&start);
    match strategy {
        Strategy::Bisect => bisect(&mut f, start, &tol, &mut observe),
        Strategy::Hybrid => hybrid(&mut f, start, &tol, &mut observe),
        Strategy::Convex => convex(&mut f, start, &tol, &mut observe),
    }
}

fn done<T: RootScalar>(bracket: Bracket<T>, best: T, iterations: usize, evaluations: usize) -> ZeroResult<T> {
    ZeroResult {
        bracket,
        best,
        iterations,
        evaluations,
        converged: true,
    }
}

fn best_of<T: RootScalar>(br: &Bracket<T>) -> T {
    if br.f_lo.abs() <= br.f_hi.abs() {
        br.lo.clone()
    } else {
        br.hi.clone()
    }
}

/// Replaces the endpoint of `br` that has the same sign as `fx`.
fn shrink<T: RootScalar>(br: &mut Bracket<T>, x: T, fx: T) {
    if same_sign(&fx, &br.f_lo) {
        br.lo = x;
        br.f_lo = fx;
    } else {
        br.hi = x;
        br.f_hi = fx;
    }
}

/// Keeps `x` at least `tol/2` inside the bracket so every evaluation shrinks
/// it by a useful amount.
fn keep_inside<T: RootScalar>(x: T, br: &Bracket<T>, tol: &T) -> T {
    let margin = tol.scale(0.5);
    let lo = br.lo.add(&margin);
    let hi = br.hi.sub(&margin);
    if lo >= hi {
        return br.midpoint();
    }
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

fn bisect<T, F, O>(f: &mut Counter<F>, mut br: Bracket<T>, tol: &T, observe: &mut O) -> Result<ZeroResult<T>>
where
    T: RootScalar,
    F: FnMut(&T) -> Result<T>,
    O: FnMut(&Bracket<T>),
{
    let mut iterations = 0;
    while br.width() > *tol {
        if iterations >= MAX_ITERATIONS {
            return Ok(unconverged(br, iterations, f.evaluations));
        }
        iterations += 1;
        let m = br.midpoint();
        if m <= br.lo || m >= br.hi {
            // the scalar type cannot split the bracket any further
            break;
        }
        let fm = f.eval(&m)?;
        if fm.is_zero() {
            return Ok(done(Bracket::exact(m.clone(), fm), m, iterations, f.evaluations));
        }
        shrink(&mut br, m, fm);
        observe(&br);
    }
    let best = best_of(&br);
    let converged = br.width() <= *tol;
    Ok(ZeroResult {
        bracket: br,
        best,
        iterations,
        evaluations: f.evaluations,
        converged,
    })
}

fn unconverged<T: RootScalar>(br: Bracket<T>, iterations: usize, evaluations: usize) -> ZeroResult<T> {
    ZeroResult {
        best: best_of(&br),
        bracket: br,
        iterations,
        evaluations,
        converged: false,
    }
}

/// Secant root through `(x0, f0)` and `(x1, f1)`; `None` if the line is flat.
fn secant<T: RootScalar>(x0: &T, f0: &T, x1: &T, f1: &T) -> Option<T> {
    let df = f1.sub(f0);
    if df.is_zero() {
        return None;
    }
    let x = x1.sub(&f1.mul(&x1.sub(x0)).div(&df));
    x.is_finite().then_some(x)
}

/// `x` lies strictly between `a` and `b` (in either order).
fn strictly_between<T: RootScalar>(x: &T, a: &T, b: &T) -> bool {
    match a.partial_cmp(b) {
        Some(Ordering::Less) => a < x && x < b,
        Some(Ordering::Greater) => b < x && x < a,
        _ => false,
    }
}

fn hybrid<T, F, O>(f: &mut Counter<F>, mut br: Bracket<T>, tol: &T, observe: &mut O) -> Result<ZeroResult<T>>
where
    T: RootScalar,
    F: FnMut(&T) -> Result<T>,
    O: FnMut(&Bracket<T>),
{
    // the two most recent iterates, newest first
    let (mut x1, mut f1, mut x0, mut f0) = if br.f_lo.abs() <= br.f_hi.abs() {
        (br.lo.clone(), br.f_lo.clone(), br.hi.clone(), br.f_hi.clone())
    } else {
        (br.hi.clone(), br.f_hi.clone(), br.lo.clone(), br.f_lo.clone())
    };
    let mut iterations = 0;
    let mut reference_width = br.width();
    let mut steps_since_check = 0;
    let mut force_bisection = false;
    while br.width() > *tol {
        if iterations >= MAX_ITERATIONS {
            return Ok(unconverged(br, iterations, f.evaluations));
        }
        iterations += 1;
        let m = br.midpoint();
        if m <= br.lo || m >= br.hi {
            break;
        }
        let best = best_of(&br);
        let mut bisected = true;
        let mut x = m.clone();
        if !force_bisection {
            if let Some(s) = secant(&x0, &f0, &x1, &f1) {
                if strictly_between(&s, &best, &m) {
                    x = keep_inside(s, &br, tol);
                    bisected = false;
                }
            }
        }
        let fx = f.eval(&x)?;
        if fx.is_zero() {
            return Ok(done(Bracket::exact(x.clone(), fx), x, iterations, f.evaluations));
        }
        (x0, f0) = (x1, f1);
        (x1, f1) = (x.clone(), fx.clone());
        shrink(&mut br, x, fx);
        observe(&br);

        let width = br.width();
        if bisected {
            reference_width = width;
            steps_since_check = 0;
            force_bisection = false;
        } else {
            steps_since_check += 1;
            if steps_since_check >= 2 {
                if width > reference_width.scale(0.5) {
                    force_bisection = true;
                } else {
                    reference_width = width;
                }
                steps_since_check = 0;
            }
        }
    }
    let best = best_of(&br);
    let converged = br.width() <= *tol;
    Ok(ZeroResult {
        bracket: br,
        best,
        iterations,
        evaluations: f.evaluations,
        converged,
    })
}

fn convex<T, F, O>(f: &mut Counter<F>, mut br: Bracket<T>, tol: &T, observe: &mut O) -> Result<ZeroResult<T>>
where
    T: RootScalar,
    F: FnMut(&T) -> Result<T>,
    O: FnMut(&Bracket<T>),
{
    // previous points on each side, used for chord extrapolation
    let mut prev_lo: Option<(T, T)> = None;
    let mut prev_hi: Option<(T, T)> = None;
    let mut iterations = 0;
    while br.width() > *tol {
        if iterations >= MAX_ITERATIONS {
            return Ok(unconverged(br, iterations, f.evaluations));
        }
        iterations += 1;
        let m = br.midpoint();
        if m <= br.lo || m >= br.hi {
            break;
        }
        let start_width = br.width();

        let mut candidates: Vec<T> = Vec::with_capacity(2);
        if let Some(x) = secant(&br.lo, &br.f_lo, &br.hi, &br.f_hi) {
            candidates.push(x);
        }
        let extrapolated = [
            prev_lo.as_ref().map(|(x, fx)| (x, fx, &br.lo, &br.f_lo)),
            prev_hi.as_ref().map(|(x, fx)| (x, fx, &br.hi, &br.f_hi)),
        ];
        for (xa, fa, xb, fb) in extrapolated.into_iter().flatten() {
            if let Some(x) = secant(xa, fa, xb, fb) {
                candidates.push(x);
            }
        }
        let mut moved = false;
        for x in candidates {
            if br.width() <= *tol {
                break;
            }
            if !strictly_between(&x, &br.lo, &br.hi) {
                continue;
            }
            let x = keep_inside(x, &br, tol);
            let fx = f.eval(&x)?;
            if fx.is_zero() {
                return Ok(done(Bracket::exact(x.clone(), fx), x, iterations, f.evaluations));
            }
            if same_sign(&fx, &br.f_lo) {
                prev_lo = Some((br.lo.clone(), br.f_lo.clone()));
            } else {
                prev_hi = Some((br.hi.clone(), br.f_hi.clone()));
            }
            shrink(&mut br, x, fx);
            moved = true;
        }
        if (!moved || br.width() > start_width.scale(0.5)) && br.width() > *tol {
            let m = br.midpoint();
            if m > br.lo && m < br.hi {
                let fm = f.eval(&m)?;
                if fm.is_zero() {
                    return Ok(done(Bracket::exact(m.clone(), fm), m, iterations, f.evaluations));
                }
                if same_sign(&fm, &br.f_lo) {
                    prev_lo = Some((br.lo.clone(), br.f_lo.clone()));
                } else {
                    prev_hi = Some((br.hi.clone(), br.f_hi.clone()));
                }
                shrink(&mut br, m, fm);
            }
        }
        observe(&br);
    }
    let best = best_of(&br);
    let converged = br.width() <= *tol;
    Ok(ZeroResult {
        bracket: br,
        best,
        iterations,
        evaluations: f.evaluations,
        converged,
    })
}

/// Number of bisection steps needed to reduce `width` to `tol`.
pub fn bisection_steps(width: f64, tol: f64) -> usize {
    (width / tol).log2().ceil().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(f: impl Fn(f64) -> f64) -> impl FnMut(&f64) -> Result<f64> {
        move |x| Ok(f(*x))
    }

    #[test]
    fn sqrt_two() {
        for strategy in [Strategy::Bisect, Strategy::Hybrid, Strategy::Convex] {
            let r = find_zero(ok(|x| x * x - 2.0), 1.0, 2.0, 1e-15, strategy).unwrap();
            assert!(r.converged, "{strategy:?}");
            assert!(r.bracket.is_valid());
            assert!(r.bracket.width() <= 1e-15);
            assert!(r.bracket.lo <= 2f64.sqrt() && 2f64.sqrt() <= r.bracket.hi + 1e-16);
        }
    }

    #[test]
    fn identity_and_cosine() {
        let r = find_zero(ok(|x| x), -1.0, 2.0, 1e-10, Strategy::Hybrid).unwrap();
        assert!(r.best.abs() <= 1e-10);
        let r = find_zero(ok(f64::cos), 1.0, 2.0, 1e-12, Strategy::Hybrid).unwrap();
        assert!((r.best - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(r.bracket.width() <= 1e-12);
    }

    #[test]
    fn exact_zero_is_flagged() {
        let r = find_zero(ok(|x| x), -1.0, 1.0, 1e-10, Strategy::Bisect).unwrap();
        assert!(r.bracket.exact_root);
        assert_eq!(r.bracket.width(), 0.0);
        assert!(r.bracket.is_valid());
    }

    #[test]
    fn errors() {
        let e = find_zero(ok(|x| x * x + 1.0), -1.0, 1.0, 1e-10, Strategy::Hybrid).unwrap_err();
        assert!(matches!(e, Error::NoSignChange { .. }));
        let e = find_zero(ok(|x| 1.0 / x - 1.0 / 0.0 + x), 0.5, 1.0, 1e-10, Strategy::Hybrid);
        assert!(matches!(e, Err(Error::NonFinite { .. })));
        let e = find_zero(ok(|x| x), -1.0, 1.0, 0.0, Strategy::Hybrid);
        assert!(matches!(e, Err(Error::Config(_))));
        let failing = |_: &f64| -> Result<f64> { Err(Error::Inconsistent("boom".into())) };
        assert!(matches!(
            find_zero(failing, 0.0, 1.0, 1e-3, Strategy::Bisect),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn hybrid_beats_bisection_on_smooth_functions() {
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64, f64)> = vec![
            (Box::new(|x| x * x - 2.0), 1.0, 2.0),
            (Box::new(f64::cos), 1.0, 2.0),
            (Box::new(|x| x.exp() - 10.0), 0.0, 5.0),
        ];
        for (g, a, b) in cases {
            let bis = find_zero(|x: &f64| Ok(g(*x)), a, b, 1e-10, Strategy::Bisect).unwrap();
            let hyb = find_zero(|x: &f64| Ok(g(*x)), a, b, 1e-10, Strategy::Hybrid).unwrap();
            let cvx = find_zero(|x: &f64| Ok(g(*x)), a, b, 1e-10, Strategy::Convex).unwrap();
            assert!(hyb.evaluations < bis.evaluations);
            assert!(cvx.evaluations < bis.evaluations);
        }
    }

    #[test]
    fn hybrid_bounded_on_hostile_function() {
        // flat then steep: secant steps crawl, forced bisection must kick in
        let g = |x: f64| if x < 0.999 { -1e-12 * (1.0 - x) } else { (x - 0.999) * 1e6 - 1e-9 };
        let tol = 1e-12;
        let r = find_zero(|x: &f64| Ok(g(*x)), 0.0, 1.0, tol, Strategy::Hybrid).unwrap();
        assert!(r.converged);
        let limit = 2 * (bisection_steps(1.0, tol) + 2);
        assert!(r.iterations <= limit, "{} > {limit}", r.iterations);
    }

    #[test]
    fn works_with_mpfr_floats() {
        let two = Float::with_val(300, 2);
        let r = find_zero(
            |x: &Float| Ok(Float::with_val(300, x.square_ref()) - &two),
            Float::with_val(300, 1),
            Float::with_val(300, 2),
            Float::with_val(300, Float::i_exp(1, -250)),
            Strategy::Hybrid,
        )
        .unwrap();
        let sqrt2 = Float::with_val(300, two.sqrt_ref());
        assert!(r.bracket.lo <= sqrt2 && sqrt2 <= r.bracket.hi);
        assert!(r.bracket.width() <= Float::with_val(300, Float::i_exp(1, -250)));
        // far fewer than the ~250 bisection steps
        assert!(r.evaluations < 40, "{}", r.evaluations);
    }
}
