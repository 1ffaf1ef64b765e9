//! Higher-power coherent states (eigenstates of `a^j`) and their squeezed
//! extensions, evaluated by independent numerical routes.
//!
//! The crate is `no_std` and needs only `alloc`. Everything is a pure function
//! of its arguments; IO, CLI and file formats live in the `hpcs-cli` crate.
//!
//! Units are `ħ = m = ω = 1`. A state is labelled by `(j, k)` with
//! `0 ≤ k ≤ j-1` and a phase-space point `(x0, p0)`, `α = (x0 + i p0)/√2`.
//!
//! Modules, bottom-up:
//!
//! * [`specfun`]: Hermite polynomials and oscillator eigenfunctions,
//!   Pochhammer symbols, `1F1`/`2F1` series, tail-bounded summation.
//! * [`fock`]: truncated number-basis vectors and operators, matrix
//!   exponentials, free evolution, position representation.
//! * [`hpcs`]: the normalisation sum `S`, the generating function `G`,
//!   Fock expansions, the explicit `j = 2, 3, 4` Gaussian superpositions and
//!   their time-dependent densities.
//! * [`squeezed`]: squeezed higher-power states (squeeze operator applied to
//!   an HPCS) and ladder-operator/minimum-uncertainty squeezed states from the
//!   `b_n` recursion.
//! * [`verify`]: eigen-residuals, Gram matrices, uncertainty budgets and the
//!   check suites behind the `verify` report.
#![no_std]

extern crate alloc;

mod error;
pub mod fock;
pub mod hpcs;
pub mod specfun;
pub mod squeezed;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
