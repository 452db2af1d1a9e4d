//! Precision-parameterized special functions: ζ(s) on `Re s >= 1`, log ζ,
//! Bernoulli numbers and the constants π and γ.

mod bernoulli;
mod complex;
mod constants;
pub(crate) mod em;
pub mod fast;
mod zeta;

pub use bernoulli::{bernoulli, bernoulli_exact, MAX_BERNOULLI_INDEX};
pub use complex::ComplexValue;
pub use constants::{constant_gamma, constant_pi};
pub use zeta::{log_zeta, zeta_complex, zeta_minus_one, zeta_real, MAX_IMAG};

pub(crate) use zeta::log_zeta_abs;
