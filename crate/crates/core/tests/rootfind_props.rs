use proptest::prelude::*;
use rezeta::rootfind::{bisection_steps, find_zero, find_zero_observed, Bracket, Strategy};
use rezeta::Error;
use rug::Float;

const STRATEGIES: [Strategy; 3] = [Strategy::Bisect, Strategy::Hybrid, Strategy::Convex];

fn trace<F>(f: F, a: f64, b: f64, tol: f64, strategy: Strategy) -> (Vec<Bracket<f64>>, rezeta::rootfind::ZeroResult<f64>)
where
    F: FnMut(&f64) -> rezeta::Result<f64>,
{
    let mut seen = Vec::new();
    let res = find_zero_observed(f, a, b, tol, strategy, |br| seen.push(br.clone())).unwrap();
    (seen, res)
}

fn nested(seen: &[Bracket<f64>], a: f64, b: f64) -> bool {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    for br in seen {
        if !br.is_valid() || br.lo < lo || br.hi > hi {
            return false;
        }
        lo = br.lo;
        hi = br.hi;
    }
    true
}

#[test]
fn exact_zero_is_reported() {
    let res = find_zero(|x: &f64| Ok(x - 0.5), 0.0, 1.0, 1e-12, Strategy::Bisect).unwrap();
    assert!(res.bracket.exact_root);
    assert_eq!(res.best, 0.5);
}

#[test]
fn missing_sign_change_is_an_error() {
    let e = find_zero(|x: &f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-9, Strategy::Hybrid).unwrap_err();
    assert!(matches!(e, Error::NoSignChange { .. }));
}

#[test]
fn high_precision_sqrt2() {
    let prec = 400;
    let tol = Float::with_val(prec, 1) >> 380u32;
    for strategy in STRATEGIES {
        let res = find_zero(
            |x: &Float| Ok(Float::with_val(prec, x * x) - 2u32),
            Float::with_val(prec, 1),
            Float::with_val(prec, 2),
            tol.clone(),
            strategy,
        )
        .unwrap();
        let root = Float::with_val(prec, 2).sqrt();
        assert!(res.bracket.lo <= root && root <= res.bracket.hi, "{strategy:?}");
        if strategy != Strategy::Bisect {
            assert!(res.evaluations < 40, "{strategy:?}: {} evaluations", res.evaluations);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn brackets_stay_valid_and_nested(
        root in -5.0f64..5.0,
        c1 in 0.1f64..3.0,
        c3 in 0.0f64..2.0,
        left in 0.01f64..4.0,
        right in 0.01f64..4.0,
        log_tol in -12.0f64..-3.0,
    ) {
        // Monotone cubic through `root`.
        let f = |x: &f64| Ok(c1 * (x - root) + c3 * (x - root).powi(3));
        let (a, b) = (root - left, root + right);
        let tol = 10f64.powf(log_tol);
        let mut counts = Vec::new();
        for strategy in STRATEGIES {
            let (seen, res) = trace(f, a, b, tol, strategy);
            prop_assert!(nested(&seen, a, b));
            prop_assert!(res.converged);
            prop_assert!(res.bracket.exact_root || res.bracket.width() <= tol);
            prop_assert!(res.bracket.lo <= root + 1e-12 && root - 1e-12 <= res.bracket.hi);
            counts.push(res.evaluations);
        }
        let bisect = bisection_steps(b - a, tol) as usize + 2;
        prop_assert!(counts[0] <= bisect + 1);
        prop_assert!(counts[1] as f64 <= 1.5 * bisect as f64 + 4.0, "hybrid {} vs bisection {}", counts[1], bisect);
    }

    #[test]
    fn hostile_functions_keep_the_bracket(k in 1u32..40, shift in -0.4f64..0.4) {
        // Steep sign change with flat shoulders defeats interpolation.
        let f = |x: &f64| Ok(((x - shift) * k as f64).tanh().powi(3) + 1e-9 * (x - shift));
        for strategy in STRATEGIES {
            let (seen, res) = trace(f, -1.0, 1.0, 1e-10, strategy);
            prop_assert!(nested(&seen, -1.0, 1.0));
            prop_assert!(res.converged);
        }
    }
}
