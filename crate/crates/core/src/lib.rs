//! Numerical curvature engine for four-dimensional almost Hermitian
//! manifolds given on a single coordinate chart.

#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod cli;
pub mod conditions;
pub mod curvature;
pub mod error;
pub mod exprjet;
pub mod hermitian;
pub mod pointgeom;
pub mod selfdual;

pub use error::{GeomError, Result};
