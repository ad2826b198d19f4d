//! Right-invariant discrete Lagrangian systems on the Virasoro group, the
//! verification harness for their continuum limit (the Camassa-Holm family
//! of PDEs), and pseudospectral reference solvers for that family.
//!
//! The crate is organized bottom-up:
//!
//! - [`grid`]: periodic fields on `[0, 2*pi)` with spectral calculus;
//! - [`diffeo`]: orientation-preserving circle diffeomorphisms;
//! - [`virasoro`]: the Bott cocycle and the Virasoro group product;
//! - [`potential`], [`lagrangian`]: Lagrangian densities and the induced
//!   right-invariant two-point Lagrangian;
//! - [`dynamics`]: discrete Euler-Lagrange residuals, an independent
//!   action-gradient oracle, and the implicit time stepper;
//! - [`continuum`]: the eps-expansion harness that measures how the
//!   discrete system converges to the Camassa-Holm family;
//! - [`ch_family`]: pseudospectral solvers, conserved quantities and the
//!   symmetry-orbit classifier for that family;
//! - [`cli`]: the experiment runner used by the `vdls` binary.

// Validation sites use `!(x > 0.0)` so that NaN fails closed; rewriting them
// as `x <= 0.0` would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;

mod fft;

pub mod ch_family;
pub mod cli;
pub mod config;
pub mod continuum;
pub mod diffeo;
pub mod dynamics;
pub mod expr;
pub mod grid;
pub mod lagrangian;
mod linalg;
pub mod potential;
pub mod report;
pub mod sampling;
pub mod virasoro;

pub use error::{Error, Result};
