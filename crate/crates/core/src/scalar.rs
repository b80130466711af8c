//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Default relative tolerance for adaptive quadrature in this precision.
    fn default_quad_rel() -> Self {
        Self::lit(1e-11).max(Self::epsilon() * Self::lit(1e3))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `x^y` for `x > 0` through `exp`/`ln`; returns zero for `x == 0` and `y > 0`.
#[inline]
pub(crate) fn pow_pos<T: Real>(x: T, y: T) -> T {
    if x > T::zero() {
        (y * x.ln()).exp()
    } else if x == T::zero() {
        if y > T::zero() {
            T::zero()
        } else if y == T::zero() {
            T::one()
        } else {
            T::infinity()
        }
    } else {
        T::nan()
    }
}
