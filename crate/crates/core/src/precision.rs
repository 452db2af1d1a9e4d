//! Working-precision bookkeeping shared by every high-precision routine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest contract precision accepted by the kernels.
pub const MIN_BITS: u32 = 64;
/// Smallest number of guard bits carried internally.
pub const MIN_GUARD_BITS: u32 = 10;
/// Guard bits used when a context is built from a bit or digit count alone.
pub const DEFAULT_GUARD_BITS: u32 = 16;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Binary working precision plus guard bits.
///
/// `bits` is the accuracy contract: results are returned with error below
/// `2^-bits` (relative, or absolute where the operation says so). The guard
/// bits are extra precision spent internally to absorb rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    bits: u32,
    guard_bits: u32,
}

impl PrecisionContext {
    pub fn new(bits: u32, guard_bits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::domain("precision", bits, "bits >= 64"));
        }
        if guard_bits < MIN_GUARD_BITS {
            return Err(Error::domain("guard bits", guard_bits, "guard_bits >= 10"));
        }
        Ok(PrecisionContext { bits, guard_bits })
    }

    pub fn with_bits(bits: u32) -> Result<Self> {
        Self::new(bits, DEFAULT_GUARD_BITS)
    }

    /// Context for `digits` correct decimals: `ceil(digits * log2(10)) + 64` bits.
    pub fn from_digits(digits: u32) -> Result<Self> {
        Self::with_bits(digits_to_bits(digits))
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn guard_bits(&self) -> u32 {
        self.guard_bits
    }

    /// Precision of the floats handed back to callers.
    pub fn working_bits(&self) -> u32 {
        self.bits + self.guard_bits
    }

    /// The same guard configuration at a different contract precision.
    pub fn at_bits(&self, bits: u32) -> Result<Self> {
        Self::new(bits, self.guard_bits)
    }
}

/// `ceil(digits * log2(10)) + 64`.
pub fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * LOG2_10).ceil() as u32 + 64
}

/// A target error, stored as its base-2 logarithm so that tolerances far
/// below the `f64` range (say `10^-1010`) remain representable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Tolerance {
    log2: f64,
}

impl Tolerance {
    pub fn from_log2(log2: f64) -> Result<Self> {
        if !log2.is_finite() {
            return Err(Error::Config(format!("tolerance exponent {log2} is not finite")));
        }
        Ok(Tolerance { log2 })
    }

    /// `10^-digits`.
    pub fn from_decimal_digits(digits: u32) -> Self {
        Tolerance {
            log2: -f64::from(digits) * LOG2_10,
        }
    }

    pub fn from_value(eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Config(format!("tolerance {eps} must be positive and finite")));
        }
        Ok(Tolerance { log2: eps.log2() })
    }

    pub fn log2(&self) -> f64 {
        self.log2
    }

    /// The value as an `f64`; underflows to zero below ~1e-308.
    pub fn value(&self) -> f64 {
        self.log2.exp2()
    }

    /// `self / 2^k`.
    pub fn shrink_log2(&self, k: f64) -> Self {
        Tolerance {
            log2: self.log2 - k,
        }
    }

    pub fn half(&self) -> Self {
        self.shrink_log2(1.0)
    }

    /// Precondition shared by the series routines: `eps > 2^(-bits + slack)`.
    pub(crate) fn check_attainable(&self, ctx: &PrecisionContext, slack: u32) -> Result<()> {
        if self.log2 <= -(f64::from(ctx.bits()) - f64::from(slack)) {
            return Err(Error::Precision {
                requested_log2: self.log2,
                bits: ctx.bits(),
            });
        }
        Ok(())
    }

    /// Number of bits needed to resolve this tolerance.
    pub(crate) fn bits_needed(&self) -> u32 {
        (-self.log2).max(1.0).ceil() as u32
    }
}
