//! Electromagnetic array manifolds for arbitrary antenna arrays.
//!
//! Every antenna is discretized into constant-current segments, each of which
//! radiates as a Hertzian dipole. Given the effective array moment matrix
//! (segment moments per unit feed current, coupling included) the field at any
//! point is a linear function of the feed weights, `E(p) = A(p)·w`, where
//! `A(p)` is a complex `3 × N` matrix in the spherical basis at `p`.
//!
//! On top of that manifold the crate provides plane-wave-equivalent power
//! density, a characteristic PD matrix over a sampled region, and the
//! field-strength, polarization and PD-constrained beamforming solvers.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `em-manifold` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod array;
pub mod beamforming;
pub mod dipole;
mod error;
pub mod geometry;
pub mod linalg;
pub mod manifold;
pub mod metrics;
pub mod power;

pub use num_complex::Complex64 as C64;

pub use crate::array::{AntennaElement, AntennaGeometry, ArrayModel, DipoleSegment, Weights};
pub use crate::beamforming::{BeamMethod, BeamSolution, ManifoldSvd};
pub use crate::dipole::{FieldFrame, FieldVec, Medium, Moment};
pub use crate::error::{Error, Result};
pub use crate::geometry::{BasisTriple, Point3, RotationMatrix, SphericalCoords};
pub use crate::manifold::{IsotropicSteering, ManifoldMatrix, ManifoldVariant};
pub use crate::power::{PdMatrix, SampleRegion};
