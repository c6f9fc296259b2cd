//! Exact gl4 operator algebra: generators as differential operators on
//! functions of a 2x2 matrix, their kernel-side differential-difference
//! counterparts, brackets, table regeneration and numeric application.

pub mod apply;
pub mod diffdiff;
pub mod error;
pub mod matrix;
pub mod poly;
pub mod shiftcoef;
pub mod table;

pub use apply::{apply_diffdiff, shifted_params};
pub use diffdiff::{bracket_shift, e_generator, DiffDiffOp, TermKey};
pub use error::{AlgebraError, Result};
pub use matrix::{bracket_diff, gl4_generator, DiffOp2, RationalCoef4};
pub use shiftcoef::ShiftCoef;
pub use table::{check_kernel_brackets, check_matrix_brackets, generate_e_table, BracketReport, ETable, Regeneration};
