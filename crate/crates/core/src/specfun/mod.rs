//! Special functions and quadrature shared by every other module.
//!
//! Everything here is a pure function of its arguments. Factorial-like
//! quantities go through [`log_gamma`] so that packets with dozens of terms
//! never overflow.

mod erf;
mod gamma;
mod hermite;
mod quadrature;

pub use erf::{erf, erfc};
pub use gamma::{binomial_pmf, ln_factorial, log_gamma, poisson_amplitude};
pub use hermite::{normalized_hermite_into, normalized_hermite_sequence};
pub use quadrature::{build_rule, cumulative_integral, QuadratureRule};
