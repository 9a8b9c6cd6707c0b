//! Labelled image collections: CSV manifests and synthetic sets.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::{ArchitectureFeatures, CLASSIFIER_FEATURES};
use crate::raster::{load_image, GrayImage};

use super::synth::{generate_synthetic, synthetic_truth, GroundTruth, LeafSpec};
use super::HarnessError;

/// A collection of images with species and optional character labels.
pub trait Dataset: Sync {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Human-readable identifier of an item, used in logs and reports.
    fn id(&self, i: usize) -> String;
    fn species(&self, i: usize) -> &str;
    /// Ground-truth value of a character, if known.
    fn label(&self, i: usize, feature: &str) -> Option<&str>;
    fn load(&self, i: usize) -> Result<GrayImage, HarnessError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub species: String,
    pub labels: BTreeMap<String, String>,
}

/// Images listed in a CSV file with header `path,species[,feature...]`.
/// Relative paths are resolved against the manifest's directory; empty
/// label cells mean unknown.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    /// Where the entries came from.
    pub source: String,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| HarnessError::Manifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_reader(file, base, &path.display().to_string())
    }

    pub fn from_reader(reader: impl std::io::Read, base: &Path, source: &str) -> Result<Self, HarnessError> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = csv.headers()?.iter().map(str::to_string).collect();
        if header.len() < 2 || header[0] != "path" || header[1] != "species" {
            return Err(HarnessError::Manifest("header must start with path,species".into()));
        }
        for name in &header[2..] {
            if ArchitectureFeatures::domain(name).is_none() {
                return Err(HarnessError::Manifest(format!("unknown feature column {name:?}")));
            }
        }
        let mut entries = Vec::new();
        for (row, record) in csv.records().enumerate() {
            let record = record?;
            let path = PathBuf::from(&record[0]);
            let labels = header[2..]
                .iter()
                .zip(record.iter().skip(2))
                .filter(|(_, v)| !v.is_empty())
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect();
            entries.push(ManifestEntry {
                path: if path.is_absolute() { path } else { base.join(path) },
                species: record[1].to_string(),
                labels,
            });
            if entries[row].species.is_empty() {
                return Err(HarnessError::Manifest(format!("row {}: empty species", row + 2)));
            }
        }
        let m = Self { entries, source: source.to_string() };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let mut seen = BTreeSet::new();
        for e in &self.entries {
            if e.species.is_empty() {
                return Err(HarnessError::Manifest(format!("{}: empty species", e.path.display())));
            }
            if !seen.insert(&e.path) {
                return Err(HarnessError::Manifest(format!("duplicate path {}", e.path.display())));
            }
        }
        Ok(())
    }

    /// Label columns in use, classifier characters first.
    pub fn feature_columns(&self) -> Vec<String> {
        let used: BTreeSet<&str> = self.entries.iter().flat_map(|e| e.labels.keys().map(String::as_str)).collect();
        let mut cols: Vec<String> =
            CLASSIFIER_FEATURES.iter().filter(|f| used.contains(*f)).map(|f| f.to_string()).collect();
        cols.extend(used.iter().filter(|f| !CLASSIFIER_FEATURES.contains(f)).map(|f| f.to_string()));
        cols
    }

    /// Writes the manifest as CSV, with paths relative to `base` where
    /// possible.
    pub fn write_csv(&self, writer: impl std::io::Write, base: &Path) -> Result<(), HarnessError> {
        let cols = self.feature_columns();
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["path".to_string(), "species".to_string()];
        header.extend(cols.iter().cloned());
        w.write_record(&header)?;
        for e in &self.entries {
            let path = e.path.strip_prefix(base).unwrap_or(&e.path);
            let mut row = vec![path.display().to_string(), e.species.clone()];
            row.extend(cols.iter().map(|c| e.labels.get(c).cloned().unwrap_or_default()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self { entries: indices.iter().map(|&i| self.entries[i].clone()).collect(), source: self.source.clone() }
    }

    /// Stratified split into training and test manifests.
    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(Self, Self, Vec<String>), HarnessError> {
        let labels: Vec<&str> = self.entries.iter().map(|e| e.species.as_str()).collect();
        let s = split_indices(&labels, train_fraction, seed)?;
        Ok((self.subset(&s.train), self.subset(&s.test), s.warnings))
    }
}

impl Dataset for DatasetManifest {
    fn len(&self) -> usize {
        self.entries.len()
    }

    fn id(&self, i: usize) -> String {
        self.entries[i].path.display().to_string()
    }

    fn species(&self, i: usize) -> &str {
        &self.entries[i].species
    }

    fn label(&self, i: usize, feature: &str) -> Option<&str> {
        self.entries[i].labels.get(feature).map(String::as_str)
    }

    fn load(&self, i: usize) -> Result<GrayImage, HarnessError> {
        Ok(load_image(&self.entries[i].path)?)
    }
}

/// Indices of a train/test split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Per-species random split. Each species with at least two items keeps at
/// least one on each side; smaller species go wholly to training.
pub fn split_indices(species: &[&str], train_fraction: f64, seed: u64) -> Result<Split, HarnessError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(HarnessError::InvalidArgument(format!(
            "train fraction must be strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in species.iter().enumerate() {
        groups.entry(s).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = Split { train: Vec::new(), test: Vec::new(), warnings: Vec::new() };
    for (name, mut idx) in groups {
        if idx.len() < 2 {
            log::warn!("species {name:?} has {} sample(s); kept in training only", idx.len());
            split.warnings.push(format!("species {name:?} has fewer than 2 samples; kept in training"));
            split.train.extend(idx);
            continue;
        }
        idx.shuffle(&mut rng);
        let n = idx.len();
        let k = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
        split.train.extend_from_slice(&idx[..k]);
        split.test.extend_from_slice(&idx[k..]);
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// One generated leaf: parameters, seed and species name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticItem {
    pub species: String,
    pub spec: LeafSpec,
    pub seed: u64,
}

/// Synthetic leaves rendered on demand.
#[derive(Debug, Clone)]
pub struct SyntheticSet {
    items: Vec<SyntheticItem>,
    truths: Vec<BTreeMap<&'static str, &'static str>>,
}

impl SyntheticSet {
    pub fn new(items: Vec<SyntheticItem>) -> Result<Self, HarnessError> {
        let truths = items
            .iter()
            .map(|it| synthetic_truth(&it.spec, it.seed).map(|t| t.known().into_iter().collect()))
            .collect::<Result<_, _>>()?;
        Ok(Self { items, truths })
    }

    pub fn items(&self) -> &[SyntheticItem] {
        &self.items
    }

    pub fn truth(&self, i: usize) -> Result<GroundTruth, HarnessError> {
        synthetic_truth(&self.items[i].spec, self.items[i].seed)
    }

    /// Renders every item to `dir` as PNG and writes `manifest.csv` with the
    /// known characters as label columns.
    pub fn write(&self, dir: &Path) -> Result<DatasetManifest, HarnessError> {
        std::fs::create_dir_all(dir)?;
        let width = self.items.len().max(1).to_string().len();
        let entries = (0..self.items.len())
            .into_par_iter()
            .map(|i| {
                let it = &self.items[i];
                let leaf = generate_synthetic(&it.spec, it.seed)?;
                let name = format!("{}_{:0width$}.png", sanitize(&it.species), i);
                let path = dir.join(name);
                std::fs::write(&path, leaf.image.encode_png()?)?;
                Ok(ManifestEntry {
                    path,
                    species: it.species.clone(),
                    labels: self.truths[i].iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
                })
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        let manifest = DatasetManifest { entries, source: "synthetic".into() };
        let file = std::fs::File::create(dir.join("manifest.csv"))?;
        manifest.write_csv(file, dir)?;
        Ok(manifest)
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

impl Dataset for SyntheticSet {
    fn len(&self) -> usize {
        self.items.len()
    }

    fn id(&self, i: usize) -> String {
        format!("{}#{}", self.items[i].species, self.items[i].seed)
    }

    fn species(&self, i: usize) -> &str {
        &self.items[i].species
    }

    fn label(&self, i: usize, feature: &str) -> Option<&str> {
        self.truths[i].get(feature).copied()
    }

    fn load(&self, i: usize) -> Result<GrayImage, HarnessError> {
        let it = &self.items[i];
        Ok(generate_synthetic(&it.spec, it.seed)?.image)
    }
}
