//! Computation engine for clones on finite sets and the geometry of their
//! solution sets.
//!
//! Operations are finite value tables ([`tables::OpTable`]); a clone is
//! presented by generators ([`engine::CloneSpec`]) and materialized one
//! arity at a time as a deduplicated, canonically ordered layer
//! ([`engine::Layer`]). On top of the layers sit the algebraic-closure
//! operator and equivalence tests ([`geometry`]), a family of clone
//! constructions ([`constructions`]), and a catalog of exhaustive
//! verification cases ([`verify`]) that the `clonegeo` CLI exposes.

pub mod constructions;
pub mod engine;
pub mod error;
pub mod exec;
pub mod formats;
pub mod geometry;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
pub use exec::ExecMode;
