//! Leaf architecture analysis.
//!
//! Turns a raster image of a single leaf into the discrete botanical
//! characters used by leaf-architecture keys (organization, laminar shape,
//! symmetry, lobation, margin, apex and base angle/shape) and classifies
//! species from those characters with a categorical Naive Bayes model.
//!
//! The crate is split along the processing chain:
//!
//! - [`raster`]: grayscale/binary images, Otsu thresholding, disk morphology,
//!   connected components and Moore boundary tracing.
//! - [`geometry`]: polygons, convex hulls, decimation, elliptic Fourier
//!   descriptors and curvature statistics.
//! - [`pipeline`]: image to canonical [`pipeline::LeafGeometry`].
//! - [`features`]: geometry to [`features::ArchitectureFeatures`].
//! - [`classifier`]: categorical Naive Bayes over those features.
//! - [`harness`]: manifests, metrics, evaluation and a synthetic leaf
//!   generator.

pub mod classifier;
pub mod features;
pub mod geometry;
pub mod harness;
pub mod pipeline;
pub mod raster;
