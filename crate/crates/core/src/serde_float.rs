//! Serialization of MPFR values as decimal strings, so no digits are lost.

use rug::Float;
use serde::Serializer;

pub fn serialize<S: Serializer>(x: &Float, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_decimal(x))
}

/// All significant decimal digits of `x`.
pub fn to_decimal(x: &Float) -> String {
    let digits = (f64::from(x.prec()) * std::f64::consts::LOG10_2).ceil() as usize + 1;
    x.to_string_radix(10, Some(digits))
}
