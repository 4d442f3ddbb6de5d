//! Volume gradient flows on the sphere of polyhedral configurations.
//!
//! A configuration of `n` labeled vertices is a point of `R^{3n}`. Modulo
//! translation and positive scaling these form a sphere `N`, modeled as the
//! unit-norm configurations whose last vertex sits at the origin. The (mean)
//! signed volume restricted to `N` is a quality measure, and the discretized
//! flow of its gradient regularizes elements and smooths meshes.
//!
//! Modules, bottom-up:
//!
//! - [`geometry`]: cross-product chains and signed tetrahedron volume
//! - [`quotient`]: the maps onto `N` and the tangent pushforward
//! - [`elements`]: element kinds, triangulation tables and closed-form fields
//! - [`flow`]: singularity residuals, classification and flow integration
//! - [`spectral`]: linearization spectra at singular configurations
//! - [`mesh`]: shared-vertex meshes, quality reports and smoothing
//!
//! Element-local vertex indices (chains, triangulation tables) are 1-based
//! throughout the API; mesh node indices are 0-based storage offsets.

pub mod elements;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod mesh;
mod parallel;
pub mod quotient;
pub mod sampling;
pub mod spectral;

pub use elements::{ElementKind, FieldVariant};
pub use error::{Error, Result};
pub use flow::{FlowSettings, Normalization, SingularityClass, SingularityKind};
pub use geometry::{Configuration, TangentField, Vec3};
pub use mesh::{Mesh, QualityReport};
pub use spectral::Spectrum;
