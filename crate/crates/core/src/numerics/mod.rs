//! Generic numerical building blocks: quadrature, root finding,
//! derivative-free optimisation and spline interpolation.

pub mod interp;
pub mod optimize;
pub mod quadrature;
pub mod roots;

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// Values that can be integrated, interpolated or root-tracked: real or
/// complex scalars over a [`Real`] field.
pub trait Field<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(self) -> T;
}

impl<T: Real> Field<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> Field<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn magnitude(self) -> T {
        self.norm()
    }
}
