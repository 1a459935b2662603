//! Integer-order Bessel functions of complex argument.
//!
//! `I_m` and `K_m` are the modified Bessel functions of the first and second
//! kind, `J_m` the ordinary Bessel function of the first kind. All values are
//! on the principal branch, `arg z` in `(-pi, pi]`.
//!
//! Algorithm by region (after mapping `Re z < 0` onto the right half plane
//! through the reflection formulas):
//!
//! | family | `|z| <= 2`       | `2 < |z| < 17`          | `|z| >= 17`          |
//! |--------|------------------|-------------------------|----------------------|
//! | `I_m`  | ascending series | Miller backward recurrence, normalised by `exp(z) = I_0 + 2 sum I_k` | same |
//! | `K_m`  | ascending series (`K_0`, `K_1`) | Steed continued fraction (`K_0`, `K_1`) | Hankel asymptotic series |
//!
//! Higher orders of `K` come from forward recurrence, which is stable for
//! the dominant solution. `J_m(z) = i^m I_m(-iz)`.
//!
//! The unscaled functions are accurate to about `1e-13` relative (f64) for
//! `|z| <= 700` away from zeros of the function; above
//! [`overflow_threshold`] in `|Re z|` they return [`Error::Overflow`] and the
//! scaled variants must be used.

mod modified;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{imag_unit, is_finite_c, Real};

pub use modified::{bessel_i_seq_scaled, bessel_k_seq_scaled};

/// Largest `|Re z|` accepted by the unscaled functions.
pub fn overflow_threshold<T: Real>() -> T {
    T::exp_limit()
}

fn check_finite<T: Real>(z: Complex<T>) -> Result<()> {
    if is_finite_c(z) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "non-finite argument {:?} + {:?}i",
            z.re, z.im
        )))
    }
}

fn check_cut<T: Real>(z: Complex<T>) -> Result<()> {
    if z.im == T::zero() && z.re <= T::zero() {
        return Err(Error::BranchCut {
            re: z.re.to_f64().unwrap_or(f64::NAN),
            im: 0.0,
        });
    }
    Ok(())
}

fn check_overflow<T: Real>(x: T) -> Result<()> {
    let limit = overflow_threshold::<T>();
    if x.abs() > limit {
        return Err(Error::Overflow {
            re_abs: x.abs().to_f64().unwrap_or(f64::INFINITY),
            limit: limit.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(())
}

/// `exp(-|Re z|) I_m(z)`.
pub fn bessel_i_scaled<T: Real>(m: u32, z: Complex<T>) -> Result<Complex<T>> {
    check_finite(z)?;
    Ok(modified::bessel_i_seq_scaled(m, z)[m as usize])
}

/// `I_m(z)`.
pub fn bessel_i<T: Real>(m: u32, z: Complex<T>) -> Result<Complex<T>> {
    check_finite(z)?;
    check_overflow(z.re)?;
    let s = modified::bessel_i_seq_scaled(m, z)[m as usize];
    Ok(s * z.re.abs().exp())
}

/// `exp(Re z) K_m(z)`, `z` off the non-positive real axis.
pub fn bessel_k_scaled<T: Real>(m: u32, z: Complex<T>) -> Result<Complex<T>> {
    check_finite(z)?;
    check_cut(z)?;
    modified::bessel_k_seq_scaled(m, z).map(|v| v[m as usize])
}

/// `K_m(z)`, `z` off the non-positive real axis.
pub fn bessel_k<T: Real>(m: u32, z: Complex<T>) -> Result<Complex<T>> {
    check_finite(z)?;
    check_cut(z)?;
    check_overflow(z.re)?;
    let s = modified::bessel_k_seq_scaled(m, z)?[m as usize];
    Ok(s * (-z.re).exp())
}

/// `I'_m(z) = (I_{m-1}(z) + I_{m+1}(z)) / 2`, with `I'_0 = I_1`.
pub fn bessel_i_prime<T: Real>(m: u32, z: Complex<T>) -> Result<Complex<T>> {
    check_finite(z)?;
    check_overflow(z.re)?;
    let seq = modified::bessel_i_seq_scaled(m + 1, z);
    let d = if m == 0 {
        seq[1]
    } else {
        (seq[m as usize - 1] + seq[m as usize + 1]) * T::lit(0.5)
    };
    Ok(d * z.re.abs().exp())
}

/// `K'_m(z) = -(K_{m-1}(z) + K_{m+1}(z)) / 2`, with `K'_0 = -K_1`.
pub fn bessel_k_prime<T: Real>(m: u32, z: Complex<T>) -> Result<Complex<T>> {
    check_finite(z)?;
    check_cut(z)?;
    check_overflow(z.re)?;
    let seq = modified::bessel_k_seq_scaled(m + 1, z)?;
    let d = if m == 0 {
        -seq[1]
    } else {
        -(seq[m as usize - 1] + seq[m as usize + 1]) * T::lit(0.5)
    };
    Ok(d * (-z.re).exp())
}

/// `i^m`.
fn i_pow<T: Real>(m: u32) -> Complex<T> {
    match m % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// `J_m(z)`.
pub fn bessel_j<T: Real>(m: u32, z: Complex<T>) -> Result<Complex<T>> {
    check_finite(z)?;
    check_overflow(z.im)?;
    let w = -imag_unit::<T>() * z;
    let s = modified::bessel_i_seq_scaled(m, w)[m as usize];
    Ok(i_pow::<T>(m) * s * w.re.abs().exp())
}

/// `J'_m(z) = (J_{m-1}(z) - J_{m+1}(z)) / 2`, with `J'_0 = -J_1`.
pub fn bessel_j_prime<T: Real>(m: u32, z: Complex<T>) -> Result<Complex<T>> {
    check_finite(z)?;
    check_overflow(z.im)?;
    let w = -imag_unit::<T>() * z;
    let seq = modified::bessel_i_seq_scaled(m + 1, w);
    let scale = w.re.abs().exp();
    let j = |k: u32| i_pow::<T>(k) * seq[k as usize] * scale;
    Ok(if m == 0 {
        -j(1)
    } else {
        (j(m - 1) - j(m + 1)) * T::lit(0.5)
    })
}

/// Real-argument convenience wrapper: `J_m(x)`.
pub fn bessel_j_real<T: Real>(m: u32, x: T) -> Result<T> {
    bessel_j(m, Complex::new(x, T::zero())).map(|v| v.re)
}

/// Real-argument convenience wrapper: `J'_m(x)`.
pub fn bessel_j_prime_real<T: Real>(m: u32, x: T) -> Result<T> {
    bessel_j_prime(m, Complex::new(x, T::zero())).map(|v| v.re)
}

/// Real-argument convenience wrapper: `K_m(x)`, `x > 0`.
pub fn bessel_k_real<T: Real>(m: u32, x: T) -> Result<T> {
    bessel_k(m, Complex::new(x, T::zero())).map(|v| v.re)
}

/// Real-argument convenience wrapper: `K'_m(x)`, `x > 0`.
pub fn bessel_k_prime_real<T: Real>(m: u32, x: T) -> Result<T> {
    bessel_k_prime(m, Complex::new(x, T::zero())).map(|v| v.re)
}

/// Logarithmic derivative ratios `I'_m(z)/I_m(z)` and `K'_m(z)/K_m(z)`.
///
/// Both are computed from scaled values, so they stay finite where the
/// functions themselves overflow.
pub fn log_derivatives<T: Real>(m: u32, z: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
    check_finite(z)?;
    check_cut(z)?;
    let i = modified::bessel_i_seq_scaled(m + 1, z);
    let k = modified::bessel_k_seq_scaled(m + 1, z)?;
    let mu = m as usize;
    let (ip, kp) = if m == 0 {
        (i[1], -k[1])
    } else {
        (
            (i[mu - 1] + i[mu + 1]) * T::lit(0.5),
            -(k[mu - 1] + k[mu + 1]) * T::lit(0.5),
        )
    };
    Ok((ip / i[mu], kp / k[mu]))
}
