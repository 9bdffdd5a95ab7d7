//! Numerical machinery for L¹-convergence of trigonometric series whose
//! coefficients are (β,r)-general monotone.
//!
//! The crate is `no_std` and needs only `alloc`. It provides
//!
//! * lazily evaluated coefficient sequences ([`sequences`]),
//! * the majorant functionals ₁β…₆β ([`beta`]),
//! * finite-prefix class membership diagnostics ([`classes`]),
//! * direct and r-step Abel block sums with tail bounds ([`summation`]),
//! * adaptive L¹-norm quadrature and the convergence functionals ([`lnorm`]),
//! * scripted studies reproducing the counterexamples ([`experiments`]).
//!
//! ```
//! use gmseries::sequences::{CoefficientSequence, SeriesKind};
//! use gmseries::summation::partial_sum;
//!
//! let seq = CoefficientSequence::harmonic();
//! let s = partial_sum(&seq, SeriesKind::Sine, 3, 1.0);
//! assert!((s.re - (1.0f64.sin() + 2.0f64.sin() / 2.0 + 3.0f64.sin() / 3.0)).abs() < 1e-15);
//! ```
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod beta;
pub mod classes;
mod error;
pub mod experiments;
pub mod fit;
pub mod lnorm;
pub mod math;
pub mod sequences;
pub mod summation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
