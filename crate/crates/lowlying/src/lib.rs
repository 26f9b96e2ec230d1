//! Numerical machinery for trace-formula computations: integer arithmetic
//! tables, Dirichlet characters, Kloosterman and Gauss sums, special
//! functions (complex gamma, Bessel, Hurwitz zeta, Dirichlet L), spectral
//! transforms, Kuznetsov-type geometric sides and one-level densities,
//! Dirichlet-polynomial inequalities, zero counting, and an HTTP client for
//! external Hecke eigenvalue data.

pub mod error;
pub mod quad;

pub mod ntcore;
pub mod specfun;
pub mod transforms;
pub mod kuznetsov;
pub mod dirpoly;
pub mod lmfdb;

pub mod cli;
pub mod report;

pub use error::{Error, Result};
