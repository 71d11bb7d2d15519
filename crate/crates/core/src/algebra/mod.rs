//! Exact arithmetic kernel: rationals, λ-polynomials and truncated series.

pub mod biseries;
pub mod graded;
pub mod laurent;
pub mod matrix;
pub mod poly;
pub mod rational;
pub mod univariate;

pub use biseries::BiSeries;
pub use graded::{Family, GradedSeries, VarMonomial};
pub use laurent::LaurentSeries;
pub use poly::{LambdaMonomial, LambdaPolynomial, Param, Signature};
pub use rational::Rational;
