//! Numeric traits the library is generic over.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, Signed, ToPrimitive};

/// Anything with field-like arithmetic: floats, `Ratio<i64>`, even plain integers
/// for the purely combinatorial sums.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    fn from_count(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("integer not representable")
    }

    /// Nearest f64, for reporting.
    fn approx(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Num + Signed + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

/// Floating point scalars: everything that needs logs, roots or iteration to convergence.
pub trait Real: Scalar + Float + FloatConst + NumCast {
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 literal not representable")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Scalar + Float + FloatConst + NumCast {}

/// Exact rational scalar used by the tiling-length and cylinder identities.
pub type Rational = num_rational::Ratio<i64>;
