//! Desk-scale simulator of adiabatic quantum search for Diophantine
//! equations on truncated Fock spaces.
//!
//! The decision procedure encodes `D(x_1, ..., x_k) = 0` into the diagonal
//! Hamiltonian `D(N_1, ..., N_k)^2`, prepares a product of coherent states
//! (Glauber for the harmonic-oscillator algebra, Barut-Girardello for the
//! square-well su(1,1) algebra), interpolates between the two Hamiltonians,
//! and reads the answer off the dominant occupation-number state once its
//! probability clears 1/2. Everything runs on per-mode truncations of
//! dimension `d`, so a run certifies roots only inside the box
//! `{0, ..., d-1}^k`; an exact brute-force oracle and dense eigensolves
//! back the quantum path for verification.
//!
//! Module map:
//! - [`poly`]: polynomial front end, exact evaluation, classical oracle
//! - [`fock`]: single-mode ladder algebras, coherent states, Bessel series
//! - [`hamiltonians`]: tensor-product assembly and matrix-free application
//! - [`adiabatic`]: Schrödinger integration, halting loop, gap diagnostics
//! - [`gates`]: stationary-well phase gates and the coded CNOT

pub mod adiabatic;
pub mod fock;
pub mod gates;
pub mod hamiltonians;
pub mod poly;

pub use num_complex::Complex64;
