//! Exact-arithmetic toolkit for divisor cones on smooth projective surfaces.
//!
//! Everything is computed over arbitrary-precision rationals — no floating
//! point is used anywhere. The main objects are:
//!
//! * [`lattice::SurfaceDatum`] — a Néron–Severi lattice with an intersection
//!   form of signature (1, ρ−1), a chosen ample class, and the generators of
//!   the effective cone (del Pezzo surfaces are built in, custom surfaces
//!   load from JSON);
//! * [`zariski::zariski_decompose`] — the Zariski decomposition `D = P + N`
//!   of a pseudo-effective class, and the enumeration of Zariski chambers;
//! * [`cones::dual_cone`] / [`cones::face_lattice`] — dual cones by the
//!   double description method and the face lattice of the nef cone;
//! * [`minkowski::minkowski_basis`] — Minkowski bases attached to a flag,
//!   with [`minkowski::decompose_nef`] expressing nef classes in the basis;
//! * [`okounkov::okounkov_body`] — Okounkov-body polygons of big divisors
//!   with respect to a flag, exact piecewise-linear boundaries, Minkowski
//!   sums and areas.

pub mod cli;
pub mod cones;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod minkowski;
pub mod okounkov;
pub mod tables;
pub mod zariski;

pub use error::{Error, Result};
pub use lattice::{DivisorClass, SurfaceDatum};
pub use linalg::{QMatrix, QVector, Rat};
