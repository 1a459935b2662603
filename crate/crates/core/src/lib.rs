//! Semi-analytic design engine for coupling single emitters to guided surface
//! plasmons.
//!
//! The crate covers the full chain from material data to a single-photon
//! source figure of merit:
//!
//! * [`specfun`]: integer-order Bessel functions `I_m`, `K_m`, `J_m` of complex
//!   argument.
//! * [`materials`]: fixed, Drude and tabulated permittivities.
//! * [`wire_modes`]: guided plasmon modes of a metal nanowire and the
//!   quasi-static mode constant.
//! * [`emitter_coupling`]: radiative, non-radiative and plasmon decay rates of
//!   a dipole next to the wire.
//! * [`tip_model`]: the paraboloidal nanotip, including eikonal propagation of
//!   the launched plasmon.
//! * [`outcoupler`]: step-index fiber modes, coupled-mode transfer and the
//!   end-to-end single-photon efficiency.
//! * [`design`]: run configuration, sweeps and dataset output used by the CLI.
//!
//! Lengths are dimensionless throughout (multiplied by the free-space
//! wavenumber `k0`), time dependence is `exp(-i omega t)` and lossy media have
//! `Im eps > 0`.
//!
//! The special functions and the numerical toolkit are generic over
//! [`scalar::Real`]; the physics layers are written for `f64`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod emitter_coupling;
pub mod error;
pub mod materials;
pub mod numerics;
pub mod outcoupler;
pub mod scalar;
pub mod specfun;
pub mod tip_model;
pub mod wire_modes;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision complex number used by the physics layers.
pub type C64 = num_complex::Complex<f64>;
/// Single-precision complex number.
pub type C32 = num_complex::Complex<f32>;
