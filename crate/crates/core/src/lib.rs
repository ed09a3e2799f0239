//! Supersymmetric treatment of the one-dimensional Morse oscillator.
//!
//! The crate builds the pseudo-number-state basis of the Morse Hamiltonian
//! `H(s) = P² + (s + 1/2 - e^{-X})²`, its tridiagonal matrix, the coherent
//! states `|β⟩` labelled by the open unit disk, and the unitary
//! displacement operator that generates them from the ground state. Every
//! closed form is paired with an independent numerical check
//! (quadrature, finite differences, diagonalization).

pub mod cli;
pub mod coherent;
pub mod error;
pub mod morse;
pub mod numerics;
pub mod operators;

pub use error::{Error, Result};
