//! Numerics for the extended Harper's model.
//!
//! The operator acts on `ℓ²(ℤ)` as
//! `(Hu)_n = c(θ+nα) u_{n+1} + c̃(θ+(n−1)α) u_{n−1} + 2cos2π(θ+nα) u_n`
//! with the off-diagonal symbol `c` built from three couplings `(λ₁, λ₂, λ₃)`.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised by topic:
//!
//! * [`numth`]: continued fractions, torus distance, resonances.
//! * [`model`]: couplings, regions, duality, symbols, finite sections.
//! * [`cocycle`]: transfer matrices, Lyapunov exponents, rotation numbers.
//! * [`spectral`]: spectra, integrated density of states, gap labels.
//! * [`localize`]: dual eigenvectors, decay fits, Green's functions.
//! * [`reduce`]: conjugacies towards rotations, parabolic forms, cohomology.
#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod prelude;

pub mod cocycle;
pub mod fourier;
pub mod linalg;
pub mod localize;
pub mod model;
pub mod numth;
pub mod reduce;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::{CMat2, Mat2, C64};
pub use model::{CouplingTriple, Region};
pub use numth::Irrational;
