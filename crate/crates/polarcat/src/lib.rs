//! Exact computations in polar Brauer and polar Temperley–Lieb categories,
//! with representation-theoretic oracles.

pub mod brauer;
pub mod error;
pub mod g2;
pub mod linalg;
pub mod polar;
pub mod ptl;
pub mod scalars;
pub mod suites;
pub mod superlin;
pub mod uea;

pub use error::{Error, Result};
pub use scalars::{Frac, Poly, Rational, Var};
