//! Leaf architecture characters from canonical geometry.

mod categories;
mod laminar;
mod lobation;
mod margin;
mod organization;
mod tip;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{CurvatureStats, GeometryError};
use crate::pipeline::{self, LeafGeometry, PipelineConfig, PipelineError, PipelineOutput};
use crate::raster::{BinaryImage, GrayImage};

pub use categories::{
    AngleClass, ApexShape, BaseShape, Category, LaminarShape, Lobation, LobeCount, LwClass, Margin, MedialSymmetry,
    Organization, UnknownValue,
};
pub use laminar::{classify_laminar_shape, is_oblong, lw_ratio, medial_symmetry, widest_position};
pub use lobation::{
    analyze_lobation, area_verdict, classify_lobation, hull_area_difference, incision_depth, surviving_incisions,
    AreaVerdict, LobationAnalysis,
};
pub use margin::{classify_margin, perimeter_reduction};
pub use organization::{classify_organization, count_leaflets};
pub use tip::{apex_angle, apex_shape, base_angle, base_shape, End, TipBand, REFLEX_ANGLE};

/// Version of the JSON layout produced by [`ArchitectureFeatures::to_json`].
pub const SCHEMA_VERSION: u32 = 1;

/// Names of the ten characters used for classification, in a fixed order.
pub const CLASSIFIER_FEATURES: [&str; 10] = [
    "organization",
    "laminar_shape",
    "medial_symmetry",
    "lobation",
    "lobe_count",
    "margin",
    "apex_angle",
    "apex_shape",
    "base_angle",
    "base_shape",
];

/// Every character of a record, in output order.
pub const ALL_FEATURES: [&str; 11] = [
    "organization",
    "laminar_shape",
    "lw_class",
    "medial_symmetry",
    "lobation",
    "lobe_count",
    "margin",
    "apex_angle",
    "apex_shape",
    "base_angle",
    "base_shape",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArchitectureFeatures {
    pub organization: Organization,
    pub laminar_shape: LaminarShape,
    pub lw_class: LwClass,
    pub medial_symmetry: MedialSymmetry,
    pub lobation: Lobation,
    pub lobe_count: LobeCount,
    pub margin: Margin,
    pub apex_angle: AngleClass,
    pub apex_shape: ApexShape,
    pub base_angle: AngleClass,
    pub base_shape: BaseShape,
}

#[derive(Serialize, Deserialize)]
struct Versioned<T> {
    schema: u32,
    #[serde(flatten)]
    inner: T,
}

impl ArchitectureFeatures {
    /// The record of a compound leaf: every lamina character is
    /// not applicable.
    pub fn compound() -> Self {
        Self {
            organization: Organization::Compound,
            laminar_shape: LaminarShape::NotApplicable,
            lw_class: LwClass::NotApplicable,
            medial_symmetry: MedialSymmetry::NotApplicable,
            lobation: Lobation::NotApplicable,
            lobe_count: LobeCount::NotApplicable,
            margin: Margin::NotApplicable,
            apex_angle: AngleClass::NotApplicable,
            apex_shape: ApexShape::NotApplicable,
            base_angle: AngleClass::NotApplicable,
            base_shape: BaseShape::NotApplicable,
        }
    }

    /// Value of a character by name (any of [`CLASSIFIER_FEATURES`] or
    /// `lw_class`).
    pub fn get(&self, name: &str) -> Option<&'static str> {
        Some(match name {
            "organization" => self.organization.as_str(),
            "laminar_shape" => self.laminar_shape.as_str(),
            "lw_class" => self.lw_class.as_str(),
            "medial_symmetry" => self.medial_symmetry.as_str(),
            "lobation" => self.lobation.as_str(),
            "lobe_count" => self.lobe_count.as_str(),
            "margin" => self.margin.as_str(),
            "apex_angle" => self.apex_angle.as_str(),
            "apex_shape" => self.apex_shape.as_str(),
            "base_angle" => self.base_angle.as_str(),
            "base_shape" => self.base_shape.as_str(),
            _ => return None,
        })
    }

    /// Ordered value domain of a character by name.
    pub fn domain(name: &str) -> Option<Vec<&'static str>> {
        Some(match name {
            "organization" => Organization::domain(),
            "laminar_shape" => LaminarShape::domain(),
            "lw_class" => LwClass::domain(),
            "medial_symmetry" => MedialSymmetry::domain(),
            "lobation" => Lobation::domain(),
            "lobe_count" => LobeCount::domain(),
            "margin" => Margin::domain(),
            "apex_angle" | "base_angle" => AngleClass::domain(),
            "apex_shape" => ApexShape::domain(),
            "base_shape" => BaseShape::domain(),
            _ => return None,
        })
    }

    /// The classifier characters as `(name, value)` pairs.
    pub fn classifier_values(&self) -> [(&'static str, &'static str); 10] {
        CLASSIFIER_FEATURES.map(|n| (n, self.get(n).expect("known feature")))
    }

    /// Builds a record from `(name, value)` string pairs; `lw_class` may be
    /// omitted and then reads as not applicable.
    pub fn from_values<'a>(values: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, FeatureParseError> {
        let mut f = Self::compound();
        let mut seen = [false; 10];
        for (name, value) in values {
            let value = value.trim();
            match name.trim() {
                "organization" => f.organization = value.parse()?,
                "laminar_shape" => f.laminar_shape = value.parse()?,
                "lw_class" => f.lw_class = value.parse()?,
                "medial_symmetry" => f.medial_symmetry = value.parse()?,
                "lobation" => f.lobation = value.parse()?,
                "lobe_count" => f.lobe_count = value.parse()?,
                "margin" => f.margin = value.parse()?,
                "apex_angle" => f.apex_angle = value.parse()?,
                "apex_shape" => f.apex_shape = value.parse()?,
                "base_angle" => f.base_angle = value.parse()?,
                "base_shape" => f.base_shape = value.parse()?,
                other => return Err(FeatureParseError::UnknownFeature(other.to_string())),
            }
            if let Some(i) = CLASSIFIER_FEATURES.iter().position(|n| *n == name.trim()) {
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(FeatureParseError::Missing(CLASSIFIER_FEATURES[i]));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(Versioned { schema: SCHEMA_VERSION, inner: self }).expect("plain enums serialize")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, FeatureParseError> {
        let versioned: Versioned<Self> =
            serde_json::from_value(v.clone()).map_err(|e| FeatureParseError::Json(e.to_string()))?;
        if versioned.schema != SCHEMA_VERSION {
            return Err(FeatureParseError::Schema(versioned.schema));
        }
        Ok(versioned.inner)
    }

    /// Checks the cross-field invariants of a well-formed record.
    pub fn is_consistent(&self) -> bool {
        if self.organization == Organization::Compound {
            return *self == Self::compound();
        }
        let na = self.laminar_shape == LaminarShape::NotApplicable
            || self.lw_class == LwClass::NotApplicable
            || self.medial_symmetry == MedialSymmetry::NotApplicable
            || self.lobation == Lobation::NotApplicable
            || self.lobe_count == LobeCount::NotApplicable
            || self.margin == Margin::NotApplicable
            || self.apex_angle == AngleClass::NotApplicable
            || self.apex_shape == ApexShape::NotApplicable
            || self.base_angle == AngleClass::NotApplicable
            || self.base_shape == BaseShape::NotApplicable;
        !na && (self.lobation == Lobation::Unlobed) == (self.lobe_count == LobeCount::Zero)
            && (self.apex_shape == ApexShape::Extended) == (self.apex_angle == AngleClass::Reflex)
            && matches!(self.base_shape, BaseShape::Cordate | BaseShape::Lobate)
                == (self.base_angle == AngleClass::Reflex)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureParseError {
    #[error(transparent)]
    Value(#[from] UnknownValue),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("missing feature {0:?}")]
    Missing(&'static str),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("malformed feature record: {0}")]
    Json(String),
}

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("feature extraction failed: {}", describe(.0))]
    Extraction(Vec<(&'static str, GeometryError)>),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

fn describe(errors: &[(&'static str, GeometryError)]) -> String {
    errors.iter().map(|(f, e)| format!("{f}: {e}")).collect::<Vec<_>>().join("; ")
}

/// Continuous quantities behind the categorical decisions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Measurements {
    pub leaflets: usize,
    pub lw_ratio: Option<f64>,
    pub widest_position: Option<f64>,
    pub symmetry_ratio: Option<f64>,
    pub lobation_area_diff: Option<f64>,
    pub lobe_incisions: Option<usize>,
    pub perimeter_reduction: Option<f64>,
    pub apex_angle: Option<f64>,
    pub apex_curvature: Option<CurvatureStats>,
    pub base_angle: Option<f64>,
    pub base_curvature: Option<CurvatureStats>,
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub features: ArchitectureFeatures,
    pub measurements: Measurements,
    pub lobation: Option<LobationAnalysis>,
}

/// All characters of one leaf.
pub fn extract_all(g: &LeafGeometry, pre_opening: &BinaryImage) -> Result<ArchitectureFeatures, FeatureError> {
    extract_detailed(g, pre_opening).map(|e| e.features)
}

/// Like [`extract_all`], keeping the measurements and lobation analysis.
pub fn extract_detailed(g: &LeafGeometry, pre_opening: &BinaryImage) -> Result<Extraction, FeatureError> {
    let leaflets = count_leaflets(pre_opening);
    if leaflets >= 2 {
        return Ok(compound_extraction(leaflets));
    }
    let mut e = extract_lamina(g)?;
    e.measurements.leaflets = leaflets;
    Ok(e)
}

fn compound_extraction(leaflets: usize) -> Extraction {
    Extraction {
        features: ArchitectureFeatures::compound(),
        measurements: Measurements { leaflets, ..Default::default() },
        lobation: None,
    }
}

fn take<T>(
    errors: &mut Vec<(&'static str, GeometryError)>,
    name: &'static str,
    r: Result<T, GeometryError>,
) -> Option<T> {
    r.map_err(|e| errors.push((name, e))).ok()
}

/// Lamina characters of a simple leaf, from geometry alone.
pub fn extract_lamina(g: &LeafGeometry) -> Result<Extraction, FeatureError> {
    let mut errors = Vec::new();
    let mut m = Measurements::default();
    let lw = take(&mut errors, "lw_ratio", lw_ratio(g));
    let laminar = take(&mut errors, "laminar_shape", classify_laminar_shape(g));
    let symmetry = take(&mut errors, "medial_symmetry", medial_symmetry(g));
    let apex_a = take(&mut errors, "apex_angle", apex_angle(g));
    let apex_s = take(&mut errors, "apex_shape", apex_shape(g));
    let base_a = take(&mut errors, "base_angle", base_angle(g));
    let lob = analyze_lobation(g);
    let base_s = take(&mut errors, "base_shape", base_shape(g, &lob));
    if !errors.is_empty() {
        return Err(FeatureError::Extraction(errors));
    }
    let (lw, laminar, symmetry) = (lw.unwrap(), laminar.unwrap(), symmetry.unwrap());
    let (apex_a, apex_s, base_a, base_s) = (apex_a.unwrap(), apex_s.unwrap(), base_a.unwrap(), base_s.unwrap());

    let (lobation, lobe_count) = classify_lobation(&lob, g);
    let (reduction, margin) = classify_margin(&g.boundary);
    m.lw_ratio = Some(lw);
    m.widest_position = Some(widest_position(g));
    m.symmetry_ratio = Some(symmetry.0);
    m.lobation_area_diff = Some(lob.area_diff);
    m.lobe_incisions = Some(surviving_incisions(&lob, g).len());
    m.perimeter_reduction = Some(reduction);
    m.apex_angle = Some(apex_a.0);
    m.apex_curvature = apex_s.0;
    m.base_angle = Some(base_a.0);
    m.base_curvature = base_s.0;

    let features = ArchitectureFeatures {
        organization: Organization::Simple,
        laminar_shape: laminar,
        lw_class: LwClass::from_ratio(lw),
        medial_symmetry: symmetry.1,
        lobation,
        lobe_count,
        margin,
        apex_angle: apex_a.1,
        apex_shape: apex_s.1,
        base_angle: base_a.1,
        base_shape: base_s.1,
    };
    debug_assert!(features.is_consistent(), "{features:?}");
    Ok(Extraction { features, measurements: m, lobation: Some(lob) })
}

/// Image to characters. Compound leaves stop after segmentation; simple
/// leaves run the full pipeline. The pipeline output is returned when it
/// was computed.
pub fn extract_from_image(
    img: &GrayImage,
    cfg: &PipelineConfig,
) -> Result<(Extraction, Option<PipelineOutput>), FeatureError> {
    let segmented = pipeline::segment(img, cfg.leaf_is_dark)?;
    let leaflets = count_leaflets(&segmented);
    if leaflets >= 2 {
        return Ok((compound_extraction(leaflets), None));
    }
    let out = pipeline::analyze_segmented(segmented, cfg)?;
    let mut e = extract_lamina(&out.geometry)?;
    e.measurements.leaflets = leaflets;
    Ok((e, Some(out)))
}
