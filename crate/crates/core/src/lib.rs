//! Exact Schur-function expansion of the KP tau function attached to the
//! affine ring of an (n,s)-curve, and the multivariate sigma-function series
//! obtained from it.
//!
//! The pipeline runs bottom-up:
//! [`curve`] (gaps, monomial basis, local expansions at ∞) →
//! [`frame`] (embedding into the Sato Grassmannian, Plücker coordinates) →
//! [`tau`] (`τ = Σ ξ_μ s_μ`, Hirota checks) →
//! [`forms`] (holomorphic and second-kind differentials, `c_i`, `q̂_ij`) →
//! [`sigma`] (the sigma series and the tau–sigma factorization).

pub mod algebra;
pub mod curve;
pub mod error;
pub mod forms;
pub mod frame;
pub mod report;
pub mod schur;
pub mod sigma;
pub mod tau;

pub use error::{Error, Result};
