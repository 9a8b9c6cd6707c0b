//! Ready-made synthetic test sets.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::{SyntheticItem, SyntheticSet};
use super::eval::BinaryFeature;
use super::synth::{synthetic_truth, ApexStyle, BaseStyle, LeafSpec};
use super::HarnessError;

/// Images per class in a binary character suite.
pub const PHASE1_PER_CLASS: usize = 100;
/// Images per species in the identification suite.
pub const PHASE2_PER_SPECIES: usize = 30;

/// A plain simple leaf with random proportions, tips, stem and pose.
pub fn random_simple_spec(rng: &mut impl Rng) -> LeafSpec {
    LeafSpec {
        length: rng.gen_range(0.55..0.8),
        aspect: rng.gen_range(1.3..3.5),
        widest: rng.gen_range(0.4..0.6),
        apex: *[ApexStyle::Convex, ApexStyle::Straight, ApexStyle::Acuminate].choose(rng).unwrap(),
        base: *[BaseStyle::Convex, BaseStyle::Straight, BaseStyle::Concave].choose(rng).unwrap(),
        stem_width: rng.gen_range(0.01..0.022),
        stem_length: rng.gen_range(0.05..0.25),
        rotation: rng.gen_range(-10.0..10.0),
        ..LeafSpec::default()
    }
}

fn variant(feature: BinaryFeature, positive: bool, rng: &mut ChaCha8Rng) -> LeafSpec {
    let mut s = random_simple_spec(rng);
    match (feature, positive) {
        (BinaryFeature::Organization, true) => {
            s.leaflets = *[3, 5, 7, 9].choose(rng).unwrap();
            s.stem_width = rng.gen_range(0.008..0.016);
            s.length = rng.gen_range(0.7..0.85);
        }
        (BinaryFeature::Organization, false) => {
            if rng.gen_bool(0.3) {
                s.teeth = rng.gen_range(12..30);
                s.tooth_amplitude = rng.gen_range(0.04..0.06);
            }
        }
        (BinaryFeature::Lobation, true) => {
            s.lobes = rng.gen_range(3..=7);
            s.lobe_depth = rng.gen_range(0.4..0.7);
            s.aspect = rng.gen_range(1.0..1.8);
            s.apex = ApexStyle::Convex;
            s.base = BaseStyle::Convex;
        }
        (BinaryFeature::Margin, true) => {
            s.aspect = rng.gen_range(1.3..2.5);
            s.teeth = rng.gen_range(12..30);
            s.tooth_amplitude = rng.gen_range(0.04..0.06);
        }
        (BinaryFeature::ApexAngle, true) => s.apex = ApexStyle::Emarginate,
        (BinaryFeature::BaseAngle, true) => s.base = BaseStyle::Cordate,
        _ => {}
    }
    s
}

/// `per_class` positive and `per_class` negative leaves for one character,
/// each with a settled ground truth for it.
pub fn phase1_suite(feature: BinaryFeature, per_class: usize, seed: u64) -> Result<SyntheticSet, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(2 * per_class);
    for positive in [true, false] {
        let species = if positive { "positive" } else { "negative" };
        let mut made = 0;
        let mut tries = 0;
        while made < per_class {
            tries += 1;
            if tries > 50 * per_class {
                return Err(HarnessError::BadSpec(format!("cannot build a settled {} suite", feature.name())));
            }
            let spec = variant(feature, positive, &mut rng);
            let leaf_seed = rng.gen();
            let truth = synthetic_truth(&spec, leaf_seed)?;
            if truth.get(feature.name()).and_then(|v| feature.truth(v)) != Some(positive) {
                continue;
            }
            items.push(SyntheticItem { species: species.into(), spec, seed: leaf_seed });
            made += 1;
        }
    }
    SyntheticSet::new(items)
}

/// Ten species templates with distinct character combinations.
pub fn phase2_species() -> Vec<(&'static str, LeafSpec)> {
    let base = LeafSpec { jitter: 0.05, rotation_jitter: 15.0, stem_width: 0.015, ..LeafSpec::default() };
    vec![
        ("ovate", LeafSpec { aspect: 1.6, widest: 0.4, ..base.clone() }),
        ("elliptic_toothed", LeafSpec { aspect: 2.2, teeth: 22, tooth_amplitude: 0.05, ..base.clone() }),
        (
            "lanceolate",
            LeafSpec {
                aspect: 3.2,
                widest: 0.4,
                apex: ApexStyle::Acuminate,
                base: BaseStyle::Straight,
                ..base.clone()
            },
        ),
        ("obovate_notched", LeafSpec { aspect: 1.7, widest: 0.62, apex: ApexStyle::Emarginate, ..base.clone() }),
        ("cordate", LeafSpec { aspect: 1.4, widest: 0.4, base: BaseStyle::Cordate, ..base.clone() }),
        ("three_lobed", LeafSpec { aspect: 1.2, lobes: 3, lobe_depth: 0.55, ..base.clone() }),
        (
            "five_lobed_toothed",
            LeafSpec { aspect: 1.1, lobes: 5, lobe_depth: 0.5, teeth: 24, tooth_amplitude: 0.04, ..base.clone() },
        ),
        ("pinnate", LeafSpec { leaflets: 7, length: 0.8, stem_width: 0.012, ..base.clone() }),
        ("oblique", LeafSpec { aspect: 2.0, asymmetry: 0.3, base: BaseStyle::Concave, ..base.clone() }),
        ("linear", LeafSpec { aspect: 12.0, length: 0.85, apex: ApexStyle::Straight, ..base }),
    ]
}

/// `per_species` leaves of each template, seeds drawn from `seed`.
pub fn phase2_suite(per_species: usize, seed: u64) -> Result<SyntheticSet, HarnessError> {
    species_suite(&phase2_species(), per_species, seed)
}

/// `per_species` leaves of each named template.
pub fn species_suite<S: AsRef<str>>(
    templates: &[(S, LeafSpec)],
    per_species: usize,
    seed: u64,
) -> Result<SyntheticSet, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(templates.len() * per_species);
    for (name, spec) in templates {
        spec.validate()?;
        for _ in 0..per_species {
            items.push(SyntheticItem { species: name.as_ref().to_string(), spec: spec.clone(), seed: rng.gen() });
        }
    }
    SyntheticSet::new(items)
}

/// What to generate: one spec, or named species templates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SynthPlan {
    Species { species: BTreeMap<String, LeafSpec> },
    Single(LeafSpec),
}

impl SynthPlan {
    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        let plan: Self = serde_json::from_str(s).map_err(|e| HarnessError::BadSpec(e.to_string()))?;
        match &plan {
            Self::Species { species } if species.is_empty() => {
                return Err(HarnessError::BadSpec("no species in plan".into()))
            }
            Self::Species { species } => species.values().try_for_each(LeafSpec::validate)?,
            Self::Single(spec) => spec.validate()?,
        }
        Ok(plan)
    }

    /// `count` leaves per species (a single spec is species `leaf`).
    pub fn build(&self, count: usize, seed: u64) -> Result<SyntheticSet, HarnessError> {
        let templates: Vec<(String, LeafSpec)> = match self {
            Self::Species { species } => species.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            Self::Single(spec) => vec![("leaf".into(), spec.clone())],
        };
        species_suite(&templates, count, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Dataset;

    #[test]
    fn phase1_suites_are_balanced_and_settled() {
        for f in BinaryFeature::ALL {
            let s = phase1_suite(f, 10, 5).unwrap();
            assert_eq!(s.len(), 20);
            for i in 0..s.len() {
                let want = s.species(i) == "positive";
                assert_eq!(s.label(i, f.name()).and_then(|v| f.truth(v)), Some(want), "{f:?} {i}");
            }
        }
    }

    #[test]
    fn phase2_species_are_valid_and_distinct() {
        let sp = phase2_species();
        assert_eq!(sp.len(), 10);
        for (_, s) in &sp {
            s.validate().unwrap();
        }
        let s = phase2_suite(2, 1).unwrap();
        assert_eq!(s.len(), 20);
        assert_eq!(phase2_suite(2, 1).unwrap().items(), s.items());
    }

    #[test]
    fn plan_forms() {
        let p = SynthPlan::from_json(r#"{"aspect": 3.0}"#).unwrap();
        assert!(matches!(&p, SynthPlan::Single(s) if s.aspect == 3.0));
        let p = SynthPlan::from_json(r#"{"species": {"a": {}, "b": {"lobes": 3}}}"#).unwrap();
        let set = p.build(2, 0).unwrap();
        assert_eq!(set.len(), 4);
        assert!(SynthPlan::from_json(r#"{"aspect": 0.5}"#).is_err());
        assert!(SynthPlan::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(SynthPlan::from_json(r#"{"species": {}}"#).is_err());
    }
}
