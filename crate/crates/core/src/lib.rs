//! Exact combinatorics of tame inertial types and Serre weights, and a
//! truncated Laurent-series engine for rank-2 Breuil-Kisin modules with
//! tame descent data.

pub mod char_arith;
pub mod error;
pub mod field;
pub mod hodge;
pub mod linalg;
pub mod matrix;
pub mod operators;
pub mod phi;
pub mod series;
pub mod shapeshift;
pub mod tame;

pub use error::{Error, Result};
