//! Datasets, evaluation and synthetic leaves.

mod dataset;
mod eval;
mod metrics;
pub mod suites;
pub mod synth;

use thiserror::Error;

pub use dataset::{split_indices, Dataset, DatasetManifest, ManifestEntry, Split, SyntheticItem, SyntheticSet};
pub use eval::{
    evaluate_features, evaluate_species, extract_dataset, feature_report, species_report, BinaryFeature,
    ConfusionMatrix, EvalReport, Failure, FeatureReport, Prediction, SpeciesParams, SpeciesReport, REPORT_SCHEMA,
};
pub use metrics::{f1_score, metrics, Confusion, Rates, Scores};
pub use synth::{generate_synthetic, synthetic_truth, ApexStyle, BaseStyle, GroundTruth, LeafSpec, SyntheticLeaf};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("bad synthetic spec: {0}")]
    BadSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bad manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Raster(#[from] crate::raster::RasterError),
    #[error(transparent)]
    Classifier(#[from] crate::classifier::ClassifierError),
}
