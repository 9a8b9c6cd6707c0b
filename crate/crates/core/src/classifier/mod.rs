//! Categorical naive Bayes over leaf characters.
//!
//! Class priors are uniform. Likelihoods are additive-smoothed frequencies
//! `(n_c(v) + alpha) / (n_c + alpha * |domain|)`; with `alpha = 0` they are
//! the raw frequencies. Scores are accumulated in log space and normalized.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{ArchitectureFeatures, CLASSIFIER_FEATURES};

/// Version of the model file layout.
pub const MODEL_SCHEMA: u32 = 1;
pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_TOP_K: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifierError {
    #[error("unknown value {value:?} for feature {feature:?}")]
    UnknownCategory { feature: String, value: String },
    #[error("species {0:?} has no samples")]
    EmptyClass(String),
    #[error("every species has zero probability for this query")]
    AllZeroPosterior,
    #[error("at least two species are needed to classify, model has {0}")]
    TooFewSpecies(usize),
    #[error("smoothing must be finite and non-negative, got {0}")]
    BadAlpha(f64),
    #[error("k must be at least 1")]
    BadK,
    #[error("bad model: {0}")]
    BadModel(String),
}

pub type Result<T> = std::result::Result<T, ClassifierError>;

/// Anything that can answer "what is the value of feature `name`".
pub trait Record {
    fn value(&self, feature: &str) -> Option<&str>;
}

impl Record for ArchitectureFeatures {
    fn value(&self, feature: &str) -> Option<&str> {
        self.get(feature)
    }
}

impl<K: AsRef<str>, V: AsRef<str>> Record for [(K, V)] {
    fn value(&self, feature: &str) -> Option<&str> {
        self.iter().find(|(k, _)| k.as_ref() == feature).map(|(_, v)| v.as_ref())
    }
}

impl<K: AsRef<str>, V: AsRef<str>> Record for Vec<(K, V)> {
    fn value(&self, feature: &str) -> Option<&str> {
        self.as_slice().value(feature)
    }
}

impl Record for HashMap<String, String> {
    fn value(&self, feature: &str) -> Option<&str> {
        self.get(feature).map(String::as_str)
    }
}

impl Record for BTreeMap<String, String> {
    fn value(&self, feature: &str) -> Option<&str> {
        self.get(feature).map(String::as_str)
    }
}

/// Counts for one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub name: String,
    pub domain: Vec<String>,
    /// `counts[c][v]`: samples of species `c` with value `domain[v]`.
    pub counts: Vec<Vec<u64>>,
}

impl FeatureTable {
    fn index_of(&self, value: &str) -> Option<usize> {
        self.domain.iter().position(|d| d == value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    pub alpha: f64,
    /// Class labels in ranking tie-break order.
    pub species: Vec<String>,
    /// Feature tables sorted by name.
    pub features: Vec<FeatureTable>,
    pub totals: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub ranked: Vec<(String, f64)>,
}

impl Prediction {
    pub fn best(&self) -> Option<&str> {
        self.ranked.first().map(|(s, _)| s.as_str())
    }

    pub fn contains(&self, species: &str) -> bool {
        self.ranked.iter().any(|(s, _)| s == species)
    }
}

/// Fits a model on the ten classifier characters. Species are ordered by
/// label.
pub fn fit<S: AsRef<str>>(samples: &[(ArchitectureFeatures, S)], alpha: f64) -> Result<NaiveBayesModel> {
    let domains = CLASSIFIER_FEATURES
        .iter()
        .map(|&n| {
            let d = ArchitectureFeatures::domain(n).expect("classifier feature has a domain");
            (n.to_string(), d.into_iter().map(String::from).collect())
        })
        .collect();
    let mut species: Vec<String> = samples.iter().map(|(_, s)| s.as_ref().to_string()).collect();
    species.sort();
    species.dedup();
    fit_categorical(domains, species, samples.iter().map(|(f, s)| (f, s.as_ref())), alpha)
}

/// Fits a model over arbitrary categorical features. Every declared species
/// must have at least one sample.
pub fn fit_categorical<'a, R: Record + ?Sized + 'a>(
    domains: Vec<(String, Vec<String>)>,
    species: Vec<String>,
    samples: impl IntoIterator<Item = (&'a R, &'a str)>,
    alpha: f64,
) -> Result<NaiveBayesModel> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(ClassifierError::BadAlpha(alpha));
    }
    let mut features: Vec<FeatureTable> = domains
        .into_iter()
        .map(|(name, domain)| FeatureTable { counts: vec![vec![0; domain.len()]; species.len()], name, domain })
        .collect();
    features.sort_by(|a, b| a.name.cmp(&b.name));
    let mut totals = vec![0u64; species.len()];
    for (record, label) in samples {
        let c = species
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| ClassifierError::UnknownCategory { feature: "species".into(), value: label.into() })?;
        let mut idx = Vec::with_capacity(features.len());
        for t in &features {
            let v = record.value(&t.name).unwrap_or("");
            idx.push(
                t.index_of(v)
                    .ok_or_else(|| ClassifierError::UnknownCategory { feature: t.name.clone(), value: v.into() })?,
            );
        }
        for (t, v) in features.iter_mut().zip(idx) {
            t.counts[c][v] += 1;
        }
        totals[c] += 1;
    }
    if species.is_empty() {
        return Err(ClassifierError::EmptyClass(String::new()));
    }
    if let Some(c) = totals.iter().position(|&n| n == 0) {
        return Err(ClassifierError::EmptyClass(species[c].clone()));
    }
    Ok(NaiveBayesModel { alpha, species, features, totals })
}

impl NaiveBayesModel {
    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    /// Unnormalized log scores, one per species; `-inf` for a zero factor.
    pub fn log_scores(&self, x: &(impl Record + ?Sized)) -> Result<Vec<f64>> {
        let g = self.species.len();
        let prior = -(g as f64).ln();
        let mut scores = vec![prior; g];
        for t in &self.features {
            let value = x.value(&t.name).unwrap_or("");
            let v = t
                .index_of(value)
                .ok_or_else(|| ClassifierError::UnknownCategory { feature: t.name.clone(), value: value.into() })?;
            let denom_extra = self.alpha * t.domain.len() as f64;
            for (c, s) in scores.iter_mut().enumerate() {
                let num = t.counts[c][v] as f64 + self.alpha;
                let den = self.totals[c] as f64 + denom_extra;
                *s += if num > 0.0 { (num / den).ln() } else { f64::NEG_INFINITY };
            }
        }
        Ok(scores)
    }

    /// Posterior probability of each species, in model order.
    pub fn posterior(&self, x: &(impl Record + ?Sized)) -> Result<Vec<f64>> {
        let g = self.species.len();
        if g < 2 {
            return Err(ClassifierError::TooFewSpecies(g));
        }
        let logs = self.log_scores(x)?;
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Err(ClassifierError::AllZeroPosterior);
        }
        let weights: Vec<f64> = logs.iter().map(|&l| (l - top).exp()).collect();
        let sum: f64 = weights.iter().sum();
        Ok(weights.into_iter().map(|w| w / sum).collect())
    }

    /// The `k` most probable species; ties keep model order.
    pub fn classify_topk(&self, x: &(impl Record + ?Sized), k: usize) -> Result<Prediction> {
        if k == 0 {
            return Err(ClassifierError::BadK);
        }
        let p = self.posterior(x)?;
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
        Ok(Prediction { ranked: order.into_iter().take(k).map(|c| (self.species[c].clone(), p[c])).collect() })
    }

    pub fn save(&self) -> Vec<u8> {
        let features = self
            .features
            .iter()
            .map(|t| {
                let counts = self
                    .species
                    .iter()
                    .zip(&t.counts)
                    .map(|(s, row)| (s.clone(), t.domain.iter().cloned().zip(row.iter().copied()).collect()))
                    .collect();
                (t.name.clone(), FileFeature { domain: t.domain.clone(), counts })
            })
            .collect();
        let file = ModelFile {
            schema: MODEL_SCHEMA,
            alpha: self.alpha,
            species: self.species.clone(),
            features,
            totals: self.species.iter().cloned().zip(self.totals.iter().copied()).collect(),
        };
        let mut bytes = serde_json::to_vec_pretty(&file).expect("model serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn load(bytes: &[u8]) -> Result<Self> {
        let bad = |m: String| ClassifierError::BadModel(m);
        let file: ModelFile = serde_json::from_slice(bytes).map_err(|e| bad(e.to_string()))?;
        if file.schema != MODEL_SCHEMA {
            return Err(bad(format!("unsupported schema {}", file.schema)));
        }
        if !file.alpha.is_finite() || file.alpha < 0.0 {
            return Err(bad(format!("invalid alpha {}", file.alpha)));
        }
        let species = file.species;
        let mut sorted = species.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != species.len() || species.is_empty() {
            return Err(bad("species must be non-empty and unique".into()));
        }
        let mut totals = Vec::with_capacity(species.len());
        for s in &species {
            totals.push(*file.totals.get(s).ok_or_else(|| bad(format!("no total for {s:?}")))?);
        }
        if file.totals.len() != species.len() {
            return Err(bad("totals name unknown species".into()));
        }
        let mut features = Vec::with_capacity(file.features.len());
        for (name, f) in file.features {
            if f.counts.len() != species.len() {
                return Err(bad(format!("{name}: counts do not cover the species")));
            }
            let mut counts = Vec::with_capacity(species.len());
            for (c, s) in species.iter().enumerate() {
                let row = f.counts.get(s).ok_or_else(|| bad(format!("{name}: no counts for {s:?}")))?;
                if row.len() != f.domain.len() || row.keys().any(|k| !f.domain.contains(k)) {
                    return Err(bad(format!("{name}: counts do not match the domain")));
                }
                let row: Vec<u64> = f.domain.iter().map(|v| row[v]).collect();
                if row.iter().sum::<u64>() != totals[c] {
                    return Err(bad(format!("{name}: counts for {s:?} do not sum to its total")));
                }
                counts.push(row);
            }
            features.push(FeatureTable { name, domain: f.domain, counts });
        }
        Ok(Self { alpha: file.alpha, species, features, totals })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    alpha: f64,
    features: BTreeMap<String, FileFeature>,
    schema: u32,
    species: Vec<String>,
    totals: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileFeature {
    counts: BTreeMap<String, BTreeMap<String, u64>>,
    domain: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Sample = (Vec<(String, String)>, String);

    fn rec(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    fn fit_samples(
        domains: &[(&str, &[&str])],
        species: &[&str],
        samples: &[Sample],
        alpha: f64,
    ) -> Result<NaiveBayesModel> {
        let domains = domains.iter().map(|(n, d)| (n.to_string(), d.iter().map(|s| s.to_string()).collect())).collect();
        fit_categorical(
            domains,
            species.iter().map(|s| s.to_string()).collect(),
            samples.iter().map(|(r, s)| (r, s.as_str())),
            alpha,
        )
    }

    /// A: 3 x, 1 y. B: 1 x, 3 y.
    fn two_species(alpha: f64) -> NaiveBayesModel {
        let mut samples = Vec::new();
        for (sp, xs, ys) in [("A", 3, 1), ("B", 1, 3)] {
            samples.extend((0..xs).map(|_| (rec(&[("f", "x")]), sp.to_string())));
            samples.extend((0..ys).map(|_| (rec(&[("f", "y")]), sp.to_string())));
        }
        fit_samples(&[("f", &["x", "y"])], &["A", "B"], &samples, alpha).unwrap()
    }

    #[test]
    fn hand_worked_posterior() {
        let m = two_species(0.0);
        let p = m.posterior(&rec(&[("f", "x")])).unwrap();
        assert!((p[0] - 0.75).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15, "{p:?}");
        assert_eq!(m.classify_topk(&rec(&[("f", "x")]), 1).unwrap().best(), Some("A"));
    }

    #[test]
    fn identical_classes_give_uniform_posterior() {
        let samples: Vec<Sample> = ["A", "B", "C"]
            .iter()
            .flat_map(|s| [(rec(&[("f", "x")]), s.to_string()), (rec(&[("f", "y")]), s.to_string())])
            .collect();
        let m = fit_samples(&[("f", &["x", "y"])], &["A", "B", "C"], &samples, 1.0).unwrap();
        let p = m.posterior(&rec(&[("f", "y")])).unwrap();
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        // Ties rank by label order.
        let top = m.classify_topk(&rec(&[("f", "y")]), 3).unwrap();
        assert_eq!(top.ranked.iter().map(|(s, _)| s.as_str()).collect::<Vec<_>>(), ["A", "B", "C"]);
    }

    #[test]
    fn counts_of_identical_samples() {
        let f = ArchitectureFeatures::compound();
        let samples: Vec<(ArchitectureFeatures, &str)> =
            (0..3).map(|_| (f, "p")).chain((0..3).map(|_| (f, "q"))).collect();
        let m = fit(&samples, 1.0).unwrap();
        assert_eq!(m.totals, [3, 3]);
        for t in &m.features {
            let v = t.index_of(f.get(&t.name).unwrap()).unwrap();
            assert_eq!(t.counts[0][v], 3);
            assert_eq!(t.counts[1][v], 3);
            assert_eq!(t.counts[0].iter().sum::<u64>(), 3);
        }
    }

    fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> Vec<Sample> {
        (0..n)
            .map(|_| {
                let r = (0..4).map(|i| (format!("f{i}"), format!("v{}", rng.gen_range(0..4)))).collect();
                (r, format!("s{}", rng.gen_range(0..3)))
            })
            .collect()
    }

    const VALUES: [&str; 4] = ["v0", "v1", "v2", "v3"];
    const DOMAINS: [(&str, &[&str]); 4] = [("f0", &VALUES), ("f1", &VALUES), ("f2", &VALUES), ("f3", &VALUES)];

    #[test]
    fn counts_match_independent_tally() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = random_problem(&mut rng, 100);
        let m = fit_samples(&DOMAINS, &["s0", "s1", "s2"], &samples, 1.0).unwrap();
        let mut tally: HashMap<(String, String, String), u64> = HashMap::new();
        for (r, s) in &samples {
            for (f, v) in r {
                *tally.entry((s.clone(), f.clone(), v.clone())).or_default() += 1;
            }
        }
        for t in &m.features {
            for (c, s) in m.species.iter().enumerate() {
                for (v, val) in t.domain.iter().enumerate() {
                    let want = tally.get(&(s.clone(), t.name.clone(), val.clone())).copied().unwrap_or(0);
                    assert_eq!(t.counts[c][v], want);
                }
            }
        }
    }

    #[test]
    fn refit_on_permuted_order_is_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut samples = random_problem(&mut rng, 60);
        let a = fit_samples(&DOMAINS, &["s0", "s1", "s2"], &samples, 1.0).unwrap();
        samples.reverse();
        samples.rotate_left(17);
        let b = fit_samples(&DOMAINS, &["s0", "s1", "s2"], &samples, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn brute_force_product_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples = random_problem(&mut rng, 90);
        for alpha in [0.0, 1.0] {
            let m = fit_samples(&DOMAINS, &["s0", "s1", "s2"], &samples, alpha).unwrap();
            for q in 0..256 {
                let query: Vec<(String, String)> =
                    (0..4).map(|i| (format!("f{i}"), format!("v{}", (q >> (2 * i)) & 3))).collect();
                let raw: Vec<f64> = ["s0", "s1", "s2"]
                    .iter()
                    .map(|s| {
                        let n = samples.iter().filter(|(_, l)| l == s).count() as f64;
                        let mut p = 1.0 / 3.0;
                        for (f, v) in &query {
                            let k = samples.iter().filter(|(r, l)| l == s && r.value(f) == Some(v)).count() as f64;
                            p *= (k + alpha) / (n + alpha * 4.0);
                        }
                        p
                    })
                    .collect();
                let z: f64 = raw.iter().sum();
                match m.posterior(&query) {
                    Ok(p) => {
                        for (got, want) in p.iter().zip(&raw) {
                            assert!((got - want / z).abs() < 1e-12, "q={q} {got} vs {}", want / z);
                        }
                    }
                    Err(ClassifierError::AllZeroPosterior) => assert_eq!(z, 0.0),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn unseen_value_everywhere_without_smoothing() {
        let samples = vec![(rec(&[("f", "x")]), "A".to_string()), (rec(&[("f", "x")]), "B".to_string())];
        let m = fit_samples(&[("f", &["x", "y"])], &["A", "B"], &samples, 0.0).unwrap();
        assert_eq!(m.posterior(&rec(&[("f", "y")])), Err(ClassifierError::AllZeroPosterior));
        let m = fit_samples(&[("f", &["x", "y"])], &["A", "B"], &samples, 1.0).unwrap();
        assert!(m.posterior(&rec(&[("f", "y")])).unwrap().iter().all(|&p| p > 0.0));
    }

    #[test]
    fn fit_errors() {
        let samples = vec![(rec(&[("f", "z")]), "A".to_string())];
        assert!(matches!(
            fit_samples(&[("f", &["x", "y"])], &["A"], &samples, 1.0),
            Err(ClassifierError::UnknownCategory { .. })
        ));
        let samples = vec![(rec(&[("f", "x")]), "A".to_string())];
        assert_eq!(
            fit_samples(&[("f", &["x", "y"])], &["A", "B"], &samples, 1.0),
            Err(ClassifierError::EmptyClass("B".into()))
        );
        let m = two_species(1.0);
        assert!(matches!(m.posterior(&rec(&[("f", "q")])), Err(ClassifierError::UnknownCategory { .. })));
        assert_eq!(m.classify_topk(&rec(&[("f", "x")]), 0), Err(ClassifierError::BadK));
    }

    #[test]
    fn relabeling_permutes_posterior() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples = random_problem(&mut rng, 60);
        let a = fit_samples(&DOMAINS, &["s0", "s1", "s2"], &samples, 1.0).unwrap();
        let b = fit_samples(&DOMAINS, &["s2", "s0", "s1"], &samples, 1.0).unwrap();
        let q = rec(&[("f0", "v1"), ("f1", "v3"), ("f2", "v0"), ("f3", "v2")]);
        let (pa, pb) = (a.posterior(&q).unwrap(), b.posterior(&q).unwrap());
        assert!((pa[2] - pb[0]).abs() < 1e-15 && (pa[0] - pb[1]).abs() < 1e-15 && (pa[1] - pb[2]).abs() < 1e-15);
        let full = a.classify_topk(&q, 3).unwrap();
        assert!((full.ranked.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-12);
        let logs = a.log_scores(&q).unwrap();
        let argmax = (0..3).max_by(|&i, &j| logs[i].total_cmp(&logs[j]).then(j.cmp(&i))).unwrap();
        assert_eq!(full.best(), Some(a.species[argmax].as_str()));
    }

    #[test]
    fn save_load_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples = random_problem(&mut rng, 80);
        for alpha in [0.0, 1.0, 0.37] {
            let m = fit_samples(&DOMAINS, &["s0", "s1", "s2"], &samples, alpha).unwrap();
            let bytes = m.save();
            let back = NaiveBayesModel::load(&bytes).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.alpha.to_bits(), alpha.to_bits());
            assert_eq!(back.save(), bytes);
            for q in random_problem(&mut rng, 100) {
                assert_eq!(m.posterior(&q.0), back.posterior(&q.0));
            }
        }
    }

    #[test]
    fn load_rejects_bad_bytes() {
        let bytes = two_species(1.0).save();
        assert!(matches!(NaiveBayesModel::load(&bytes[..bytes.len() / 2]), Err(ClassifierError::BadModel(_))));
        let text = String::from_utf8(bytes).unwrap().replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(NaiveBayesModel::load(text.as_bytes()), Err(ClassifierError::BadModel(_))));
        let text = String::from_utf8(two_species(1.0).save()).unwrap().replace("\"A\": 4", "\"A\": 5");
        assert!(matches!(NaiveBayesModel::load(text.as_bytes()), Err(ClassifierError::BadModel(_))));
    }

    #[test]
    fn file_keys_are_sorted() {
        let text = String::from_utf8(two_species(1.0).save()).unwrap();
        let keys: Vec<usize> = ["\"alpha\"", "\"features\"", "\"schema\"", "\"species\"", "\"totals\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]), "{text}");
    }
}
