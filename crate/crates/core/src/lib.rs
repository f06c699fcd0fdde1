//! Robustness of binary classifiers to adversarial perturbations and to
//! random uniform noise.
//!
//! The crate is `no_std` (it only needs `alloc`) and contains the
//! algorithmic parts:
//!
//! * [`numerics`]: Jacobi eigensolver, nuclear norm, counter-based random
//!   streams, uniform sphere sampling, safeguarded scalar root finding.
//! * [`data`]: labeled datasets, the vertical/horizontal line images used as
//!   a running example, class moments and the inter-class distance κ.
//! * [`classifiers`]: linear, quadratic and kernel-expansion classifiers,
//!   reference classifiers and stochastic subgradient SVM training.
//! * [`robustness`]: exact minimal perturbations for linear and quadratic
//!   classifiers, the penalized subgradient attack, and the Monte-Carlo
//!   estimate of robustness to uniform noise.
//! * [`bounds`]: upper bounds on adversarial robustness, random-noise
//!   constants, spherical cap bounds and the ℓ∞/ℓ₂ volume coefficient.
//!
//! File formats, the command-line tool and the parallel drivers live in the
//! companion `advrobust` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod classifiers;
pub mod data;
mod error;
pub mod numerics;
pub mod robustness;

pub use error::{Error, Result};
