//! Scalar abstractions for the numeric layer.
//!
//! Scores, correlations and extension values are computed generically so the
//! same code runs on `f32` and `f64`; the order extension only needs field
//! arithmetic and comparisons, so it also accepts exact scalars (e.g.
//! `num_rational::BigRational`).

use num_traits::{Float, FromPrimitive, Num};

/// Floating-point scalar used for tie scores and rank correlation.
pub trait Real: Float + FromPrimitive + std::fmt::Debug + Send + Sync + 'static {
    /// Lossless-enough view for reporting (residuals, counterexamples).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    fn from_f64_exact(v: f64) -> Self {
        Self::from_f64(v).expect("scalar conversion")
    }

    fn from_usize_exact(v: usize) -> Self {
        Self::from_usize(v).expect("scalar conversion")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + std::fmt::Debug + Send + Sync + 'static {}

/// Value type for linear-extension tables: field arithmetic plus ordering.
///
/// Satisfied by `f32`/`f64` and by exact rationals, which makes the
/// extension construction exact when exactness matters.
pub trait ExtensionValue: Num + FromPrimitive + PartialOrd + Clone + std::fmt::Debug {
    fn half(self) -> Self {
        self / Self::from_u8(2).expect("small constant")
    }

    fn midpoint(a: Self, b: Self) -> Self {
        (a + b).half()
    }

    /// `1 / (n - 1)`, the seed value for a single event of size `n`.
    fn single_event_seed(n: u32) -> Self {
        debug_assert!(n >= 2);
        Self::one() / Self::from_u32(n - 1).expect("small constant")
    }
}

impl<T> ExtensionValue for T where T: Num + FromPrimitive + PartialOrd + Clone + std::fmt::Debug {}
