//! Feature extraction: three groups stacked into a 273-row matrix.

pub mod lob;
pub mod quant;
pub mod technical;

pub use extract::{extract, FeatureGroup, FeatureMatrix, FeatureMeta, TOTAL_FEATURES};

mod extract;
pub use extract::feature_meta;
