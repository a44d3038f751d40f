use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, NumCast};
use rustfft::FftNum;

/// Floating-point type usable for fields, transforms and time stepping.
pub trait Scalar:
    Float + FloatConst + FftNum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for non-representable values.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("literal out of range")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
