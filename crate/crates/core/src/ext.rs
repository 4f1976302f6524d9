//! Extended reals.
//!
//! Distortion coefficients leave the reals at the conjugate radius. The
//! infinite branch is kept as a tag instead of an overflowed `f64`, so that
//! the `0 · ∞ = 0` convention can be applied where it is meant.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtReal {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Lossy conversion, mapping the infinite tags to `±f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInfinity => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInfinity => f64::INFINITY,
        }
    }

    /// Product of a non-negative real with `self`, using `0 · ∞ = 0`.
    pub fn scale_nonneg(self, factor: f64) -> ExtReal {
        debug_assert!(factor >= 0.0);
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(factor * x),
            _ if factor == 0.0 => ExtReal::ZERO,
            inf => inf,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtReal::PosInfinity
        } else if x == f64::NEG_INFINITY {
            ExtReal::NegInfinity
        } else {
            ExtReal::Finite(x)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInfinity => f.write_str("-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInfinity => f.write_str("inf"),
        }
    }
}
