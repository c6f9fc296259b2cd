//! Numerical core for the operator-valued Fourier transform on GL2(R) and GL2(C).

pub mod error;
pub mod gl2c;
pub mod interval;
pub mod kernel;
pub mod principal;
pub mod quadrature;
pub mod scalars;
pub mod section;
pub mod testfn;

pub use error::{CoreError, Result};
