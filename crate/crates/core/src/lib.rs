//! Direct spectral transform for the Zakharov–Shabat Dirac operator and
//! numerical checks of the Atiyah–Hitchin Poisson bracket on Weyl functions.
//!
//! - [`ahcore`]: the bracket on rational maps and its algebraic properties.
//! - [`dirac`]: potentials and transition matrices of `f' = V f`.
//! - [`weyl`]: the spectral cover, Weyl functions and Weyl solutions.
//! - [`brackets`]: functional gradients, the classical bracket by quadrature,
//!   and the field-recovery limits.

pub mod ahcore;
pub mod brackets;
pub mod dirac;
pub mod error;
pub mod ode;
pub mod quad;
pub mod weyl;

pub use error::{Error, Result};
pub use num_complex::Complex64;
