//! Zeros of the weight-2 Eisenstein series `E2`.
//!
//! Every zero of `E2` in the upper half-plane is the image of a point in the
//! strip `Im z ≈ 6/π` where the equivariant function
//! `h(z) = z + (6/πi)/E2(z)` takes a rational value `a/c`. This crate
//! evaluates `E2` with rigorous truncation bounds, solves `h(τ) = a/c` by
//! Newton iteration high in the half-plane, and maps the solution back down
//! with an integer unimodular matrix. The resulting zeros are certified
//! against the first-order location `-d/c + i/(c² 6/π)`.
//!
//! Modules:
//! - [`eisenstein`]: `E2`, `E2'`, the discriminant-based oracle, tail bounds.
//! - [`modular`]: `SL2(Z)` arithmetic, Farey labels, fundamental-domain reduction.
//! - [`equivariant`]: `h`, `h'`, the real locus, fixed points at elliptic points.
//! - [`zerofinder`]: predictions, refinement, and the catalog of zeros.
//! - [`verify`]: the strip bound chain and the cross-cutting numerical checks.
//! - [`export`] and [`plot`]: CSV/JSON serialization and SVG figures.

pub mod eisenstein;
pub mod equivariant;
pub mod error;
pub mod export;
pub mod modular;
pub mod plot;
pub mod rng;
pub mod verify;
pub mod zerofinder;

pub use eisenstein::ComplexPoint;
pub use error::{Error, Result};
pub use modular::{ReducedFraction, UnimodularMatrix};
pub use zerofinder::{Constants, ZeroRecord};
