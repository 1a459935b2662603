//! Floating-point scalar abstraction shared by the special functions and the
//! numerical toolkit.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type (`f32` or `f64`) the generic numerics operate on.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Conversion from a count or index.
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Largest `x` for which `exp(x)` is still comfortably finite.
    fn exp_limit() -> Self {
        Self::max_value().ln() - Self::lit(10.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `i` for any real scalar.
pub(crate) fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `true` when both parts are finite.
pub(crate) fn is_finite_c<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
