//! Floating-point scalar abstraction.
//!
//! All of the symplectic, gadget and error-rate machinery is written against
//! [`Scalar`], so it runs in `f32` or `f64`. The reference precision is `f64`;
//! the concrete aliases at the crate root pick it.

use core::fmt::{Debug, Display};
use core::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar usable by the crate: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Absolute tolerance used for symplecticity and identity checks.
    const TOLERANCE: Self;

    /// Error function.
    fn erf(self) -> Self;

    /// Complementary error function, accurate in the far tail.
    fn erfc(self) -> Self;

    /// Converts a literal; every finite `f64` fits up to rounding.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const TOLERANCE: Self = 1e-12;

    #[inline]
    fn erf(self) -> Self {
        libm::erf(self)
    }

    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

impl Scalar for f32 {
    const TOLERANCE: Self = 1e-5;

    #[inline]
    fn erf(self) -> Self {
        libm::erff(self)
    }

    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}
