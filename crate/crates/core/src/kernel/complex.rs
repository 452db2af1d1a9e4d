use std::fmt;

use rug::{Assign, Float};

/// A complex number with arbitrary-precision parts.
///
/// Only the handful of operations the ζ kernels need are provided.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexValue {
    pub re: Float,
    pub im: Float,
}

impl ComplexValue {
    pub fn new(re: Float, im: Float) -> Self {
        ComplexValue { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        ComplexValue {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexValue {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        ComplexValue {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    /// Copy rounded to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexValue {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn add_assign(&mut self, other: &ComplexValue) {
        self.re += &other.re;
        self.im += &other.im;
    }

    pub fn mul(&self, other: &ComplexValue) -> ComplexValue {
        let prec = self.prec().max(other.prec());
        let mut out = ComplexValue::zero(prec);
        mul_into(&mut out, self, other, &mut Float::new(prec));
        out
    }

    pub fn mul_real(&self, x: &Float) -> ComplexValue {
        ComplexValue {
            re: Float::with_val(self.re.prec(), &self.re * x),
            im: Float::with_val(self.im.prec(), &self.im * x),
        }
    }

    pub fn div(&self, other: &ComplexValue) -> ComplexValue {
        let prec = self.prec().max(other.prec());
        let den = Float::with_val(prec, other.re.square_ref()) + Float::with_val(prec, other.im.square_ref());
        let re = (Float::with_val(prec, &self.re * &other.re) + &self.im * &other.im) / &den;
        let im = (Float::with_val(prec, &self.im * &other.re) - &self.re * &other.im) / &den;
        ComplexValue { re, im }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

/// `out = a * b`; `scratch` must have at least the precision of `out`.
pub(crate) fn mul_into(out: &mut ComplexValue, a: &ComplexValue, b: &ComplexValue, scratch: &mut Float) {
    out.re.assign(&a.re * &b.re);
    scratch.assign(&a.im * &b.im);
    out.re -= &*scratch;
    out.im.assign(&a.re * &b.im);
    scratch.assign(&a.im * &b.re);
    out.im += &*scratch;
}

impl fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{} - {}i", self.re, Float::with_val(self.im.prec(), -&self.im))
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = ComplexValue::from_f64(64, 1.0, 2.0);
        let b = ComplexValue::from_f64(64, 3.0, -1.0);
        assert_eq!(a.mul(&b).to_f64_pair(), (5.0, 5.0));
        let q = a.mul(&b).div(&b);
        let (re, im) = q.to_f64_pair();
        assert!((re - 1.0).abs() < 1e-18 && (im - 2.0).abs() < 1e-18);
        assert_eq!(a.conj().to_f64_pair(), (1.0, -2.0));
        assert!((ComplexValue::from_f64(64, 3.0, 4.0).abs().to_f64() - 5.0).abs() < 1e-18);
        let arg = ComplexValue::from_f64(64, 0.0, 1.0).arg().to_f64();
        assert!((arg - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
