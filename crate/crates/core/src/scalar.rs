use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar used throughout the crate.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only for types that cannot hold it.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal not representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the concrete type.
    #[inline]
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}
