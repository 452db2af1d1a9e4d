use rug::float::Constant;
use rug::Float;

use crate::precision::PrecisionContext;

/// π at the working precision of `ctx` (MPFR's correctly rounded constant).
pub fn constant_pi(ctx: &PrecisionContext) -> Float {
    Float::with_val(ctx.working_bits(), Constant::Pi)
}

/// Euler's constant γ at the working precision of `ctx`.
pub fn constant_gamma(ctx: &PrecisionContext) -> Float {
    euler_gamma(ctx.working_bits())
}

/// Brent–McMillan: with `A_0 = -ln n`, `B_0 = 1`,
/// `B_k = B_{k-1} n^2 / k^2`, `A_k = (A_{k-1} n^2 / k + B_k) / k`,
/// γ = ΣA_k / ΣB_k up to an error of order `e^{-4n}`.
pub(crate) fn euler_gamma(prec: u32) -> Float {
    // 4n / ln 2 >= prec + 8
    let n = ((f64::from(prec) + 8.0) * std::f64::consts::LN_2 / 4.0).ceil() as u32 + 1;
    // alpha solves alpha (ln alpha - 1) = 3
    let terms = (4.970_625_759_544_232 * f64::from(n)).ceil() as u32 + 1;
    // the B_k peak near e^{2n}
    let wp = prec + (2.0 * f64::from(n) / std::f64::consts::LN_2).ceil() as u32 + 32;
    let n2 = u64::from(n) * u64::from(n);

    let mut a = -Float::with_val(wp, Float::ln_u(n));
    let mut b = Float::with_val(wp, 1);
    let mut u = a.clone();
    let mut v = b.clone();
    for k in 1..=terms {
        b *= n2;
        b /= u64::from(k) * u64::from(k);
        a *= n2;
        a /= k;
        a += &b;
        a /= k;
        u += &a;
        v += &b;
    }
    Float::with_val(prec, u / v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let ctx = PrecisionContext::new(64, 10).unwrap();
        let s = constant_pi(&ctx).to_string_radix(10, Some(16));
        assert!(s.starts_with("3.14159265358979"), "{s}");
    }

    #[test]
    fn pi_is_precision_monotone() {
        let lo = constant_pi(&PrecisionContext::new(128, 10).unwrap());
        let hi = constant_pi(&PrecisionContext::new(256, 10).unwrap());
        let diff = Float::with_val(300, &hi - &lo).abs();
        assert!(diff < Float::with_val(300, Float::i_exp(1, -128)));
    }

    #[test]
    fn gamma_matches_published_digits() {
        let ctx = PrecisionContext::new(64, 10).unwrap();
        let g = constant_gamma(&ctx).to_f64();
        assert!((g - 0.577_215_664_901_532_9).abs() < 1e-16);

        let g = euler_gamma(200).to_string_radix(10, Some(50));
        assert!(g.starts_with("5.772156649015328606065120900824024310421593359399"), "{g}");
    }

    #[test]
    fn gamma_agrees_with_mpfr_at_high_precision() {
        for prec in [100u32, 333, 1000, 2000] {
            let ours = euler_gamma(prec);
            let mpfr = Float::with_val(prec, Constant::Euler);
            let err = Float::with_val(prec, &ours - &mpfr).abs();
            let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 2));
            assert!(err <= tol, "prec {prec}: err {err}");
        }
    }
}
