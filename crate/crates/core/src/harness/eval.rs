//! Binary character tests and species identification runs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{fit, DEFAULT_ALPHA};
use crate::features::{extract_from_image, AngleClass, ArchitectureFeatures, Lobation, Margin, Organization};
use crate::pipeline::PipelineConfig;

use super::dataset::{split_indices, Dataset};
use super::metrics::{Confusion, Rates};
use super::HarnessError;

/// Version of the report layout.
pub const REPORT_SCHEMA: u32 = 1;

/// The characters tested as present/absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryFeature {
    /// Positive: compound.
    Organization,
    /// Positive: lobed.
    Lobation,
    /// Positive: toothed.
    Margin,
    /// Positive: reflex apex angle.
    ApexAngle,
    /// Positive: reflex base angle.
    BaseAngle,
}

impl BinaryFeature {
    pub const ALL: [Self; 5] = [Self::Organization, Self::Lobation, Self::Margin, Self::ApexAngle, Self::BaseAngle];

    pub fn name(self) -> &'static str {
        match self {
            Self::Organization => "organization",
            Self::Lobation => "lobation",
            Self::Margin => "margin",
            Self::ApexAngle => "apex_angle",
            Self::BaseAngle => "base_angle",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn predicted(self, f: &ArchitectureFeatures) -> bool {
        match self {
            Self::Organization => f.organization == Organization::Compound,
            Self::Lobation => f.lobation == Lobation::Lobed,
            Self::Margin => f.margin == Margin::Toothed,
            Self::ApexAngle => f.apex_angle == AngleClass::Reflex,
            Self::BaseAngle => f.base_angle == AngleClass::Reflex,
        }
    }

    /// Reads a ground-truth label: a category value of the character, or a
    /// plain yes/no token. `None` for unknown or not applicable values.
    pub fn truth(self, label: &str) -> Option<bool> {
        let l = label.trim().to_ascii_lowercase();
        match l.as_str() {
            "1" | "true" | "yes" | "positive" => return Some(true),
            "0" | "false" | "no" | "negative" => return Some(false),
            _ => {}
        }
        match (self, l.as_str()) {
            (Self::Organization, "compound") => Some(true),
            (Self::Organization, "simple") => Some(false),
            (Self::Lobation, "lobed") => Some(true),
            (Self::Lobation, "unlobed") => Some(false),
            (Self::Margin, "toothed") => Some(true),
            (Self::Margin, "untoothed") => Some(false),
            (Self::ApexAngle | Self::BaseAngle, "reflex") => Some(true),
            (Self::ApexAngle | Self::BaseAngle, "acute" | "obtuse" | "non_reflex" | "non-reflex") => Some(false),
            _ => None,
        }
    }
}

/// Result of one binary character test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub feature: BinaryFeature,
    /// Number of positive images.
    pub pim: u64,
    /// Number of negative images.
    pub nim: u64,
    pub counts: Confusion,
    pub rates: Rates,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Images whose extraction failed; they count as negative predictions.
    pub failed: u64,
}

impl FeatureReport {
    /// Tabulates `(truth, prediction)` pairs; `None` predictions are
    /// failures.
    pub fn tabulate<'a>(
        feature: BinaryFeature,
        items: impl IntoIterator<Item = (bool, Option<&'a ArchitectureFeatures>)>,
    ) -> Self {
        let mut counts = Confusion::default();
        let mut failed = 0;
        for (truth, pred) in items {
            failed += u64::from(pred.is_none());
            counts.record(truth, pred.is_some_and(|f| feature.predicted(f)));
        }
        let s = counts.scores();
        Self {
            feature,
            pim: counts.positives(),
            nim: counts.negatives(),
            rates: counts.rates(),
            counts,
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
            failed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    /// `counts[true][predicted]` over the top-ranked prediction.
    pub counts: Vec<Vec<u64>>,
    /// Test images per true species that could not be classified.
    pub unclassified: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesReport {
    pub train_size: usize,
    pub test_size: usize,
    pub alpha: f64,
    pub top1_accuracy: f64,
    pub top3_accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema: u32,
    pub seed: Option<u64>,
    pub images: usize,
    pub failures: Vec<Failure>,
    pub features: Vec<FeatureReport>,
    pub species: Option<SpeciesReport>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        let r: Self = serde_json::from_str(s).map_err(|e| HarnessError::InvalidArgument(e.to_string()))?;
        if r.schema != REPORT_SCHEMA {
            return Err(HarnessError::InvalidArgument(format!("unsupported report schema {}", r.schema)));
        }
        Ok(r)
    }
}

/// Outcome of running the extractor on one image.
pub type Prediction = Result<ArchitectureFeatures, String>;

/// Extracts every image of the dataset in parallel, in dataset order.
/// Failures are logged and returned as errors.
pub fn extract_dataset(ds: &dyn Dataset, cfg: &PipelineConfig) -> Vec<Prediction> {
    (0..ds.len())
        .into_par_iter()
        .map(|i| {
            let r = ds
                .load(i)
                .map_err(|e| e.to_string())
                .and_then(|img| extract_from_image(&img, cfg).map(|(e, _)| e.features).map_err(|e| e.to_string()));
            if let Err(e) = &r {
                log::warn!("{}: {e}", ds.id(i));
            }
            r
        })
        .collect()
}

fn failures(ds: &dyn Dataset, preds: &[Prediction]) -> Vec<Failure> {
    preds
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.as_ref().err().map(|e| Failure { id: ds.id(i), error: e.clone() }))
        .collect()
}

/// Binary tests of the given characters against the dataset labels. Items
/// without a usable label for a character are left out of that test.
pub fn evaluate_features(ds: &dyn Dataset, features: &[BinaryFeature], cfg: &PipelineConfig) -> EvalReport {
    let preds = extract_dataset(ds, cfg);
    EvalReport {
        schema: REPORT_SCHEMA,
        seed: None,
        images: ds.len(),
        failures: failures(ds, &preds),
        features: features.iter().map(|&f| feature_report(ds, f, &preds)).collect(),
        species: None,
    }
}

/// One binary test over precomputed predictions.
pub fn feature_report(ds: &dyn Dataset, feature: BinaryFeature, preds: &[Prediction]) -> FeatureReport {
    FeatureReport::tabulate(
        feature,
        (0..ds.len()).filter_map(|i| {
            let truth = feature.truth(ds.label(i, feature.name())?)?;
            Some((truth, preds[i].as_ref().ok()))
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeciesParams {
    pub train_fraction: f64,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for SpeciesParams {
    fn default() -> Self {
        Self { train_fraction: 2.0 / 3.0, seed: 0, alpha: DEFAULT_ALPHA }
    }
}

/// Fits on a seeded stratified split and classifies the held-out images.
pub fn evaluate_species(
    ds: &dyn Dataset,
    params: &SpeciesParams,
    cfg: &PipelineConfig,
) -> Result<EvalReport, HarnessError> {
    let preds = extract_dataset(ds, cfg);
    let species: Vec<&str> = (0..ds.len()).map(|i| ds.species(i)).collect();
    let report = species_report(&species, &preds, params)?;
    Ok(EvalReport {
        schema: REPORT_SCHEMA,
        seed: Some(params.seed),
        images: ds.len(),
        failures: failures(ds, &preds),
        features: Vec::new(),
        species: Some(report),
    })
}

/// Species evaluation over precomputed predictions. Training images whose
/// extraction failed are left out of the fit; test images whose extraction
/// failed count as misses.
pub fn species_report(
    species: &[&str],
    preds: &[Prediction],
    params: &SpeciesParams,
) -> Result<SpeciesReport, HarnessError> {
    let mut labels: Vec<String> = species.iter().map(|s| s.to_string()).collect();
    labels.sort();
    labels.dedup();
    if labels.len() < 2 {
        return Err(HarnessError::InvalidArgument(format!("need at least 2 species, found {}", labels.len())));
    }
    let split = split_indices(species, params.train_fraction, params.seed)?;
    let mut warnings = split.warnings.clone();
    let train: Vec<(ArchitectureFeatures, &str)> =
        split.train.iter().filter_map(|&i| preds[i].as_ref().ok().map(|f| (*f, species[i]))).collect();
    let skipped = split.train.len() - train.len();
    if skipped > 0 {
        warnings.push(format!("{skipped} training image(s) failed extraction and were left out"));
    }
    let model = fit(&train, params.alpha)?;

    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let g = labels.len();
    let mut counts = vec![vec![0u64; g]; g];
    let mut unclassified = vec![0u64; g];
    let (mut top1, mut top3) = (0usize, 0usize);
    for &i in &split.test {
        let t = index[species[i]];
        let ranked = preds[i].as_ref().ok().and_then(|f| model.classify_topk(f, 3).ok());
        match ranked {
            Some(p) => {
                let best = p.best().expect("k >= 1");
                counts[t][index[best]] += 1;
                top1 += usize::from(best == species[i]);
                top3 += usize::from(p.contains(species[i]));
            }
            None => unclassified[t] += 1,
        }
    }
    let n = split.test.len().max(1) as f64;
    Ok(SpeciesReport {
        train_size: split.train.len(),
        test_size: split.test.len(),
        alpha: params.alpha,
        top1_accuracy: top1 as f64 / n,
        top3_accuracy: top3 as f64 / n,
        confusion: ConfusionMatrix { labels, counts, unclassified },
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::CLASSIFIER_FEATURES;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_features(rng: &mut ChaCha8Rng) -> ArchitectureFeatures {
        let pairs: Vec<(&str, &str)> = CLASSIFIER_FEATURES
            .iter()
            .map(|&n| {
                let d = ArchitectureFeatures::domain(n).unwrap();
                (n, d[rng.gen_range(0..d.len())])
            })
            .collect();
        ArchitectureFeatures::from_values(pairs).unwrap()
    }

    #[test]
    fn truth_tokens() {
        assert_eq!(BinaryFeature::Lobation.truth("lobed"), Some(true));
        assert_eq!(BinaryFeature::ApexAngle.truth("acute"), Some(false));
        assert_eq!(BinaryFeature::BaseAngle.truth("Reflex"), Some(true));
        assert_eq!(BinaryFeature::Margin.truth("not_applicable"), None);
        assert_eq!(BinaryFeature::Organization.truth("1"), Some(true));
    }

    #[test]
    fn perfect_and_always_positive_extractors() {
        let compound = ArchitectureFeatures::compound();
        let mut simple = compound;
        simple.organization = Organization::Simple;
        let truths: Vec<bool> = (0..50).map(|i| i % 5 == 0).collect();
        let perfect: Vec<_> = truths.iter().map(|&t| if t { compound } else { simple }).collect();
        let r =
            FeatureReport::tabulate(BinaryFeature::Organization, truths.iter().copied().zip(perfect.iter().map(Some)));
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
        let r = FeatureReport::tabulate(BinaryFeature::Organization, truths.iter().map(|&t| (t, Some(&compound))));
        assert_eq!(r.recall, 1.0);
        assert!((r.precision - r.pim as f64 / (r.pim + r.nim) as f64).abs() < 1e-15);
        let r = FeatureReport::tabulate(BinaryFeature::Organization, truths.iter().map(|&t| (t, None)));
        assert_eq!((r.counts.tp, r.failed), (0, 50));
    }

    #[test]
    fn separable_species_are_all_found() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let protos: Vec<ArchitectureFeatures> = (0..6).map(|_| random_features(&mut rng)).collect();
        let names: Vec<String> = (0..6).map(|i| format!("sp{i}")).collect();
        let species: Vec<&str> = (0..60).map(|i| names[i % 6].as_str()).collect();
        let preds: Vec<Prediction> = (0..60).map(|i| Ok(protos[i % 6])).collect();
        let r = species_report(&species, &preds, &SpeciesParams::default()).unwrap();
        assert_eq!(r.top1_accuracy, 1.0);
        assert_eq!(r.test_size, 6 * 3);
    }

    #[test]
    fn shuffled_labels_are_at_chance() {
        let g = 5usize;
        let names: Vec<String> = (0..g).map(|i| format!("sp{i}")).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 1500;
        let species: Vec<&str> = (0..n).map(|i| names[i % g].as_str()).collect();
        let preds: Vec<Prediction> = (0..n).map(|_| Ok(random_features(&mut rng))).collect();
        let r = species_report(&species, &preds, &SpeciesParams::default()).unwrap();
        let p = 1.0 / g as f64;
        let sigma = (p * (1.0 - p) / r.test_size as f64).sqrt();
        assert!((r.top1_accuracy - p).abs() < 3.0 * sigma, "{} vs {p}", r.top1_accuracy);
    }

    #[test]
    fn failed_test_images_are_misses() {
        let species = vec!["a", "a", "a", "b", "b", "b"];
        let f = ArchitectureFeatures::compound();
        let preds: Vec<Prediction> = (0..6).map(|_| Err("boom".to_string())).collect();
        assert!(species_report(&species, &preds, &SpeciesParams::default()).is_err());
        let mut preds = preds;
        for p in preds.iter_mut().take(5) {
            *p = Ok(f);
        }
        let r = species_report(&species, &preds, &SpeciesParams { train_fraction: 0.5, ..Default::default() }).unwrap();
        assert_eq!(
            r.confusion.unclassified.iter().sum::<u64>() + r.confusion.counts.iter().flatten().sum::<u64>(),
            r.test_size as u64
        );
    }

    #[test]
    fn report_round_trip() {
        let r = EvalReport {
            schema: REPORT_SCHEMA,
            seed: Some(3),
            images: 2,
            failures: vec![Failure { id: "x".into(), error: "e".into() }],
            features: vec![FeatureReport::tabulate(BinaryFeature::Margin, [(true, None)])],
            species: None,
        };
        assert_eq!(EvalReport::from_json(&r.to_json()).unwrap(), r);
    }
}
