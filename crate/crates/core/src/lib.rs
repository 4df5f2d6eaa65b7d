//! Poincaré series, exponents of convergence and conjugation maps for
//! Schottky groups acting on the Poincaré disc.
//!
//! The crate is organized bottom-up:
//!
//! - [`freegroup`]: reduced words, homomorphisms onto small quotients,
//!   Stallings graphs.
//! - [`hypgeom`]: SU(1,1) isometries of the disc, distances, axes and
//!   orthogonal projection.
//! - [`kleinian`]: marked Schottky groups with a ping-pong certificate and
//!   (parallel) orbit enumeration.
//! - [`series`]: log-space partial sums of the Poincaré series and two
//!   estimators of the exponent of convergence.
//! - [`maps`]: the conjugation map on cosets of a cyclic subgroup and the
//!   injections of a group into a normal subgroup.
//! - [`verify`]: audits of the inequalities relating the series of a group
//!   and of its normal subgroups.

// Float guards are written as negated comparisons so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod freegroup;
pub mod hypgeom;
pub mod kleinian;
pub mod maps;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use freegroup::{Letter, QuotientHom, ReducedWord, SubgroupGraph};
pub use hypgeom::{DiscPoint, Geodesic, Isometry};
pub use kleinian::{MarkedGroup, OrbitEntry};
pub use series::{DeltaEstimate, SeriesEstimate};
pub use verify::CheckReport;
