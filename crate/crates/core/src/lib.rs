//! Computational tools for spectral sets that are finite unions of intervals.
//!
//! The crate connects three views of the same object:
//!
//! * a frequency set `Λ` whose exponentials `e_λ(x) = e^{2πiλx}` are orthogonal
//!   over `Ω = ⋃(α_i, β_i)` ([`interval_domain`], [`spectral_verify`]),
//! * a unitary boundary matrix `B` with `B f(α⃗) = f(β⃗)` that selects a
//!   self-adjoint restriction of `(1/2πi) d/dx` ([`boundary_spectrum`]),
//! * the unitary group `U(t) = exp(2πitH)` acting by local translations,
//!   realised once through the spectrum and once through the boundary
//!   matrix ([`local_translation`]).
//!
//! [`square2d`] covers the two-dimensional square with a mixed lattice
//! spectrum, and [`nikodym`] builds the dumbbell-chain domain on which the
//! Poincaré inequality fails.

pub mod boundary_spectrum;
pub mod error;
pub mod interval_domain;
pub mod io;
pub mod local_translation;
pub mod nikodym;
pub mod rational;
pub mod spectral_verify;
pub mod spectrum_spec;
pub mod square2d;

pub use error::{Error, Result};
pub use num::complex::Complex64;

/// `2π`, spelled out because almost every formula here carries it.
pub(crate) const TAU: f64 = std::f64::consts::TAU;
