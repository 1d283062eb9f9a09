//! Analytic and combinatorial core for the leaky-ReLU teacher-student model.
//!
//! The crate is `no_std` with `alloc`. It covers the closed-form loss and
//! kernel, the Hessian at the global minimum and its spectrum, the critical
//! leaky parameters, characters of the symmetric group, the Burnside ring of
//! `S_k` for `k <= 6`, and the equivariant degrees built on top of it.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod burnside;
pub mod degree;
pub mod error;
pub mod hessian;
pub mod landscape;
pub mod perm;
pub mod spectral;
pub mod symbolic;
pub mod symrep;

pub use error::{Error, Result};
