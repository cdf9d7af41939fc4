//! Quantum Fisher information and precision bounds for ensembles of spins.
//!
//! The crate is organised bottom-up:
//!
//! * [`spin_algebra`] builds collective spin operators and named states in the
//!   full tensor-product basis or in the maximal-spin (symmetric) multiplet.
//! * [`qfi_core`] evaluates the quantum Fisher information and the usual
//!   metrological thresholds.
//! * [`dicke_bounds`] holds closed-form error-propagation bounds for states
//!   close to unpolarized Dicke states.
//! * [`legendre_bounds`] computes tight lower bounds on the QFI from measured
//!   expectation values.
//! * [`gradient_bounds`] covers two-parameter bounds for gradient magnetometry.

pub mod dicke_bounds;
pub mod error;
pub mod gradient_bounds;
pub mod legendre_bounds;
pub mod linalg;
pub mod qfi_core;
pub mod spin_algebra;
pub mod tolerances;

pub use error::{MetroError, Result};
pub use num_complex::Complex64;
