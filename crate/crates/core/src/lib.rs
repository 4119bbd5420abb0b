//! Numerics for the complex oscillator family
//! `V(x) = x² − 2 − 2 d/dx[(b + 2a erf x − i√π λ) / (√π α²)]`.
//!
//! The crate builds the closed-form bi-orthogonal eigenbasis on a uniform
//! grid, assembles binomial and Poisson superpositions over adjacent
//! eigenstates, evolves them spectrally, checks the bi-orthogonal continuity
//! law, and evaluates Wigner maps of the oscillator-limit states.
//!
//! Layering, bottom-up:
//!
//! * [`specfun`]: erf, log-gamma, normalized Hermite functions, Simpson rules.
//! * [`potential`]: parameters, `α(x)` and `V(x)`.
//! * [`eigenstates`]: grids, wave fields and the bi-orthonormal basis.
//! * [`states`]: coefficient vectors, time evolution, densities and currents.
//! * [`wigner`]: phase-space maps by quadrature and by closed form.

pub mod eigenstates;
pub mod error;
pub mod potential;
pub mod specfun;
pub mod states;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;
