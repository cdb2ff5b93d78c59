use std::fmt::{Debug, Display};
use std::ops::AddAssign;
use std::str::FromStr;

use num_traits::Float;

/// Floating-point scalar the metric kernels are generic over.
///
/// Implemented by `f32` and `f64`. `Display`/`FromStr` round-trip exactly
/// (shortest decimal representation), which the lexicon TSV format relies on.
pub trait Scalar:
    Float + AddAssign + Debug + Display + FromStr + Send + Sync + 'static
{
    /// Lossless-enough conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from(n).expect("count representable as scalar")
    }

    /// Conversion from an `f64` constant.
    fn from_f64(x: f64) -> Self {
        Self::from(x).expect("f64 constant representable as scalar")
    }
}

impl<T> Scalar for T where
    T: Float + AddAssign + Debug + Display + FromStr + Send + Sync + 'static
{
}
