//! Numerical analysis of parabolic unfoldings `φ(x, y) = (x, f(x, y))`.
//!
//! The crate builds the recursive dynamical splitting of a family of vector
//! fields, the residue-based stability atlas of its parameter directions,
//! real-flow portraits, Fatou coordinates realized by orbit summation, and the
//! horn-map invariants extracted from them.
//!
//! Everything here is `no_std` with `alloc`; IO lives in the `unfold` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod directions;
pub mod error;
pub mod fatou;
pub mod flows;
pub mod invariants;
pub mod num;
pub mod splitting;

pub use error::{Error, Result};
pub use num::C64;
