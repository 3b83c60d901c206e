//! Hypersurface geometry with exact symbolic derivatives, and the residual
//! systems that characterize p-biharmonic hypersurfaces in Euclidean,
//! Einstein, and conformally flat ambient spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`expr`] — a small expression language with parsing, exact
//!   differentiation, and numeric evaluation. Everything downstream consumes
//!   exact derivatives; nothing is finite-differenced.
//! * [`geometry`] — pointwise geometric data of an immersed hypersurface
//!   (induced metric, unit normal, second fundamental form, shape operator,
//!   mean curvature, intrinsic Laplacians, ambient Ricci curvature).
//! * [`conformal`] — closed-form identities relating the geometry of a
//!   minimal hypersurface in flat space to its geometry under a conformal
//!   change of the ambient metric.
//! * [`residuals`] — the p-biharmonicity residual systems themselves.
//! * [`catalog`] — named example configurations (hyperplane, revolution
//!   disk, catenoid, sphere, flat plane).
//! * [`search`] — derivative-free search over conformal-factor families.
//! * [`report`] — grid evaluation, verdicts, and residual reports.
//!
//! The crate is `no_std`-compatible: disable the default `std` feature and
//! enable `libm` instead.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod fmath;

pub mod catalog;
pub mod conformal;
pub mod expr;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod report;
pub mod residuals;
pub mod rng;
pub mod search;

#[cfg(test)]
pub(crate) mod fixtures;
