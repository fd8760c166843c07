//! Numeric abstractions shared by the topic model, the scorer and the
//! evaluation harness.
//!
//! [`Scalar`] covers every type the ratio-style arithmetic works with,
//! including exact rationals. [`Real`] adds the floating-point operations
//! (square roots, sampling) that only `f32` and `f64` provide.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Field-like number: exact rationals, `f32` and `f64`.
pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {
    /// Converts a count into the scalar type.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn clamp_to(self, lo: Self, hi: Self) -> Self {
        if self < lo {
            lo
        } else if self > hi {
            hi
        } else {
            self
        }
    }
}

impl<T> Scalar for T where T: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {}

/// Floating-point scalar used for probabilities.
pub trait Real: Scalar + Float + Display + Serialize + DeserializeOwned {
    /// Allowed deviation of a probability row sum from one.
    fn stochastic_tolerance() -> Self;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 representable in real type")
    }
}

impl Real for f64 {
    fn stochastic_tolerance() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn stochastic_tolerance() -> Self {
        1e-5
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn ratio_is_a_scalar() {
        let third = Ratio::<i64>::from_count(1) / Ratio::from_count(3);
        assert_eq!(third * Ratio::from_count(3), Ratio::from_integer(1));
    }

    #[test]
    fn clamp_to_bounds() {
        assert_eq!(12.0f64.clamp_to(0.0, 10.0), 10.0);
        assert_eq!((-1.0f64).clamp_to(0.0, 10.0), 0.0);
        assert_eq!(3.5f32.clamp_to(0.0, 10.0), 3.5);
    }
}
