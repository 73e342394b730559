//! Numerical workbench for kernels of finite-rank perturbations of Toeplitz
//! operators on the Hardy space `H²`.
//!
//! Everything lives at a finite Fourier truncation `N`: analytic series carry
//! the coefficients of `z⁰..z^(N-1)`, Laurent series those of `z^(-N)..z^N`.
//! On top of the series layer sit Toeplitz finite sections and their rank-`n`
//! perturbations `R_n h = T_g h + Σ ⟨h, u_i⟩ v_i`, numerical subspace algebra
//! (kernels, defect spaces, principal angles), the case-by-case defect spaces
//! and witnesses, and the shift-invariant representation of rank-one kernels.

pub mod cgp;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod poly;
pub mod sampling;
pub mod scenario;
pub mod series;
pub mod subspace;
pub mod suite;
pub mod theorems;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use operators::{OperatorMatrix, PerturbationSpec, SymbolSpec};
pub use series::{AnalyticSeries, BlaschkeProduct, LaurentSeries};
pub use subspace::{DefectReport, Subspace};
pub use theorems::DefectCase;

/// Absolute tolerance for complex scalar comparisons.
pub const SCALAR_TOL: f64 = 1e-10;

/// Margin around the unit circle inside which root locations are ambiguous.
pub const BOUNDARY_EPS: f64 = 1e-6;

/// Discarded convolution mass (relative to input mass) above which a product
/// is flagged as violating headroom.
pub const TAIL_WARN: f64 = 1e-8;

/// Default relative threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-9;

/// Tolerances shared by every verification.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Relative singular-value threshold for numerical rank.
    pub rank: f64,
    /// Relative residual accepted for subspace membership.
    pub membership: f64,
    /// Relative violation accepted for constraint clauses.
    pub constraint: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: RANK_TOL,
            membership: 1e-8,
            constraint: 1e-8,
        }
    }
}
