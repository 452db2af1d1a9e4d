//! Sign structure of the real part of the Riemann zeta-function on the
//! half-plane `Re s >= 1`.
//!
//! * [`kernel`]: ζ(s), log ζ, Bernoulli numbers, π and γ at arbitrary precision.
//! * [`prime_zeta`]: the prime zeta function via Möbius inversion of log ζ.
//! * [`sigma0`]: the abscissa σ₀ solving `Σ_p arcsin(p^-σ) = π/2`.
//! * [`rootfind`]: bracketing zero finders.
//! * [`scan`]: negative windows of `Re ζ(1+it)` and slope-bound certification.
//! * [`mc`]: Monte Carlo estimates of the negativity density from a random
//!   Euler product.

pub mod arith;
pub mod error;
pub mod kernel;
pub mod mc;
pub mod precision;
pub mod prime_zeta;
pub mod rootfind;
pub mod scan;
pub mod serde_float;
pub mod sigma0;

pub use error::{Error, Result};
pub use precision::{PrecisionContext, Tolerance};
