//! Iterative regularization of polygons in euclidean, spherical and
//! hyperbolic geometry.
//!
//! Every transform in this crate acts on a cyclic vector of angle gaps
//! (vertex azimuths about a circumcenter, or geodesic endpoints on the
//! boundary of the Poincaré disk) through a row-stochastic circulant matrix.
//! [`circulant`] holds the closed-form spectral machinery for those
//! matrices; the geometry modules build on it.
//!
//! - [`euclid`]: equilateral identity, Napoleon's construction and the
//!   circumcenter half-step rotation in the complex plane.
//! - [`spherical`]: circumcenters and cyclic frames on S², the rotation
//!   transform for cyclic n-gons, fit-and-project and spherical Napoleon.
//! - [`hyperbolic`]: Poincaré-disk geodesics, the boundary-gap averaging
//!   transform, its limit and the polar-map regular triangle.
//! - [`analyzer`]: classification of arbitrary linear angle transforms.
//! - [`experiment`]: the seeded random-triangle convergence experiment.

pub mod analyzer;
pub mod circulant;
pub mod error;
pub mod euclid;
pub mod experiment;
pub mod hyperbolic;
pub mod io;
pub mod spherical;

pub use error::{Error, Result};
