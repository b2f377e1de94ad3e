//! Clifford-algebra engine for constructing and verifying spinor bilinears
//! on flat and round charts.
//!
//! The crate is layered: exact blade arithmetic ([`algebra`]), algebra
//! classification with an independent idempotent-counting oracle
//! ([`classify`], [`oracle`]), concrete gamma-matrix representations and
//! spinor metrics ([`rep`], [`metric`]), bilinear decomposition and reality
//! analysis ([`fierz`], [`reality`], [`currents`]), differential geometry on
//! charts with forward-mode derivatives ([`chart`], [`geometry`], [`fields`]),
//! and the verification suites ([`suites`]).

pub mod algebra;
pub mod classify;
pub mod chart;
pub mod currents;
pub mod error;
pub mod fields;
pub mod fierz;
pub mod geometry;
pub mod reality;
pub mod matrix;
pub mod metric;
pub mod oracle;
pub mod rep;
pub mod scalar;
pub mod suites;

pub use algebra::{Involution, Multivector, Signature};
pub use classify::{AlgebraClass, DivisionAlgebra, ScalarField, Simplicity};
pub use error::{Error, Result};
pub use scalar::{AdScalar, Jet, Scalar};
