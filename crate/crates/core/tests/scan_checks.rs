use proptest::prelude::*;
use rezeta::scan::{
    certify_cover, certify_positive, empirical_d, find_negative_windows, re_zeta_line, slope_bound, Certification,
    ScanConfig, Scanner, PRECISE_BITS,
};
use rezeta::PrecisionContext;

fn re_precise(t: f64) -> f64 {
    re_zeta_line(t, &PrecisionContext::with_bits(PRECISE_BITS).unwrap()).unwrap().to_f64()
}

#[test]
fn first_window_endpoints_and_minimum() {
    let w = find_negative_windows(682112.5, 682113.5, 0.01, 1e-8).unwrap();
    assert_eq!(w.len(), 1);
    let w = w[0];
    let d = 1e-6;
    assert!(re_precise(w.t_start - d) > 0.0);
    assert!(re_precise(w.t_start + d) < 0.0);
    assert!(re_precise(w.t_end - d) < 0.0);
    assert!(re_precise(w.t_end + d) > 0.0);
    let at_min = re_precise(w.t_min);
    assert!((at_min - w.min_value).abs() < 1e-12);
    assert!(re_precise(w.t_min - 1e-3) > at_min);
    assert!(re_precise(w.t_min + 1e-3) > at_min);
    assert!((w.length - (w.t_end - w.t_start)).abs() < 1e-12);
    let d1 = empirical_d(&[w], 682113.5).unwrap();
    assert!((d1 - w.length / 682113.5).abs() < 1e-18);
}

#[test]
fn windows_do_not_depend_on_chunking() {
    let run = |chunk_len| {
        let cfg = ScanConfig {
            chunk_len,
            ..ScanConfig::default()
        };
        Scanner::new(682112.5, 682113.5, cfg).unwrap().run().unwrap().windows
    };
    // Chunk length 3 puts chunk boundaries inside the window.
    assert_eq!(run(3), run(2000));
}

#[test]
fn certification_steps_are_contiguous_and_sound() {
    let c = certify_positive(10.0, 400.0, 0.05).unwrap();
    let Certification::Certified { range } = c else {
        panic!("low range should certify");
    };
    let mut t = 10.0;
    for s in &range.steps {
        assert_eq!(s.t, t);
        assert!(s.step > 0.0);
        // The step never uses more angle than the headroom it started with.
        let bound = slope_bound(s.t + s.step).unwrap();
        assert!(s.step * bound <= std::f64::consts::FRAC_PI_2 - s.arg.abs());
        t = s.t + s.step;
    }
    assert!(t >= 400.0);
}

#[test]
fn gap_cover_skips_the_window() {
    let (t_start, t_end) = (682112.89133824, 682112.94425049);
    let cover = certify_cover(682112.5, 682113.5, 0.05, 0.01).unwrap();
    assert!(!cover.uncovered.is_empty());
    for &(a, b) in &cover.uncovered {
        assert!(a >= 682112.6 && b <= 682113.2, "uncovered [{a}, {b}] far from the window");
    }
    // Soundness: nothing inside the negative window is certified.
    for r in &cover.certified {
        assert!(r.t_hi <= t_start || r.t_lo >= t_end, "certified [{}, {}]", r.t_lo, r.t_hi);
    }
    let certified: f64 = cover.certified.iter().map(|r| r.t_hi - r.t_lo).sum();
    assert!(certified > 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn short_low_ranges_certify(t0 in 10.0f64..3000.0, len in 0.1f64..20.0) {
        let c = certify_positive(t0, t0 + len, 0.05).unwrap();
        prop_assert!(c.is_certified());
        prop_assert!(find_negative_windows(t0, t0 + len.min(2.0), 0.01, 1e-8).unwrap().is_empty());
    }

    #[test]
    fn slope_bound_is_increasing(a in 10.0f64..1e8, b in 10.0f64..1e8) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(slope_bound(lo).unwrap() <= slope_bound(hi).unwrap());
    }
}
