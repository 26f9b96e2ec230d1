//! Complex special functions: Gamma, Bessel J of integer and purely
//! imaginary order, Hurwitz and Riemann zeta, Dirichlet L-functions, and
//! critical-strip zero counting.

pub mod bessel;
pub mod gamma;
pub mod zeros;
pub mod zeta;

pub use bessel::{bessel_j_imag, bessel_j_integer};
pub use gamma::complex_gamma;
pub use zeros::{
    box_counts_same_modulus, completed_l, critical_line_scan, functional_equation_residual,
    lowest_zero_height, root_number, zero_count, ZeroCountQuery, ZeroCountReport,
};
pub use zeta::{dirichlet_l, hurwitz_row, hurwitz_zeta, zeta, zeta_deflated};
