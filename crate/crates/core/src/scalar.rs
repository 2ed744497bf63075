//! Scalar abstraction shared by every metric computation in the crate.
//!
//! Topological operators (incidence, exterior derivative) only need ring
//! arithmetic and accept any [`num_traits::Num`] type, including exact
//! rationals. Everything that touches lengths, angles or transcendental
//! functions is written against [`Scalar`].

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
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
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("representable count")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
