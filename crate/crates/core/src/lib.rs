//! Lee-Yang zeros of lattice spin models in a complex magnetic field.
//!
//! The crate has two halves that are meant to be compared against each other:
//!
//! * an exact side: [`model`] enumerates configurations, [`transfer`] evaluates
//!   the periodic partition function with row-to-row transfer matrices and
//!   recovers its fugacity polynomial, and [`roots`] finds all of its zeros;
//! * an asymptotic side: [`free_energy`] holds the low-temperature metastable
//!   free energies of each phase and [`locator`] turns them into coexistence
//!   curves, quantized zero positions, zero densities and multiple points.
//!
//! All couplings are dimensionless (the inverse temperature is absorbed), and
//! periodic lattices always carry `d * V` bonds, so an `L = 2` lattice counts
//! each neighbouring pair twice.

// `!(x <= tol)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod free_energy;
pub mod io;
pub mod locator;
pub mod model;
pub mod numeric;
pub mod roots;
pub mod transfer;

pub use error::{Error, Result};
pub use num_complex::Complex64;
