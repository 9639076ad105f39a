//! Floating-point scalar abstraction shared by the acoustic pipeline.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar usable for features, frame distances and DTW.
///
/// Implemented for `f32` and `f64`. The analysis pipeline runs in `f64`;
/// `f32` is available for memory-bound feature extraction.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + rustfft::FftNum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless-as-possible conversion from `f64` constants.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
