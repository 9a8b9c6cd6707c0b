//! Command-line front end: extraction, training, classification, evaluation
//! and synthetic data.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use leafarch::classifier::{fit, ClassifierError, NaiveBayesModel, DEFAULT_ALPHA, DEFAULT_TOP_K};
use leafarch::features::{extract_from_image, Extraction, FeatureError, ALL_FEATURES, SCHEMA_VERSION};
use leafarch::harness::suites::SynthPlan;
use leafarch::harness::{
    extract_dataset, feature_report, species_report, BinaryFeature, Dataset, DatasetManifest, EvalReport, Failure,
    HarnessError, SpeciesParams, REPORT_SCHEMA,
};
use leafarch::pipeline::{self, svg, PipelineConfig, PipelineError};
use leafarch::raster::{load_image, GrayImage};

#[derive(Parser)]
#[command(name = "leafarch", version, about = "Leaf architecture extraction and species classification")]
struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Leaves are lighter than the background.
    #[arg(long, global = true)]
    light_leaf: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the architecture characters of one leaf image.
    Extract {
        image: PathBuf,
        /// Write one SVG per pipeline stage to this directory.
        #[arg(long)]
        debug_dir: Option<PathBuf>,
        #[command(flatten)]
        format: Format,
    },
    /// Fit a species model on a manifest.
    Train {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Rank the most likely species for one leaf image.
    Classify {
        #[arg(long)]
        model: PathBuf,
        image: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top: usize,
    },
    /// Species identification on a seeded train/test split.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2.0 / 3.0)]
        train_fraction: f64,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Binary character tests against manifest labels.
    EvalFeatures {
        #[arg(long)]
        manifest: PathBuf,
        /// organization, lobation, margin, apex_angle, base_angle or all;
        /// may be repeated.
        #[arg(long, required = true)]
        feature: Vec<String>,
    },
    /// Render synthetic leaves with a manifest of their ground truth.
    Synth {
        /// A leaf spec, or {"species": {name: spec, ...}}.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Leaves per species.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct Format {
    /// JSON output (the default).
    #[arg(long)]
    json: bool,
    /// One CSV header line and one value line.
    #[arg(long)]
    csv: bool,
}

/// Failure with its exit status.
enum Fail {
    /// Unreadable or invalid input: status 1.
    Input(String),
    /// The input was fine but could not be processed: status 2.
    Processing(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 1,
            Self::Processing(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Input(m) | Self::Processing(m) => m,
        }
    }
}

impl From<HarnessError> for Fail {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Classifier(c) => c.into(),
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<ClassifierError> for Fail {
    fn from(e: ClassifierError) -> Self {
        match e {
            ClassifierError::BadModel(_) | ClassifierError::BadAlpha(_) | ClassifierError::BadK => {
                Self::Input(e.to_string())
            }
            other => Self::Processing(other.to_string()),
        }
    }
}

impl From<FeatureError> for Fail {
    fn from(e: FeatureError) -> Self {
        Self::Processing(e.to_string())
    }
}

impl From<PipelineError> for Fail {
    fn from(e: PipelineError) -> Self {
        Self::Processing(e.to_string())
    }
}

fn io_fail(path: &Path, e: std::io::Error) -> Fail {
    Fail::Input(format!("{}: {e}", path.display()))
}

fn read_image(path: &Path) -> Result<GrayImage, Fail> {
    load_image(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let cfg = PipelineConfig { leaf_is_dark: !cli.light_leaf, ..PipelineConfig::default() };
    match run(cli.command, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command, cfg: &PipelineConfig) -> Result<(), Fail> {
    match command {
        Command::Extract { image, debug_dir, format } => extract(&image, debug_dir.as_deref(), format.csv, cfg),
        Command::Train { manifest, out, alpha } => train(&manifest, &out, alpha, cfg),
        Command::Classify { model, image, top } => classify(&model, &image, top, cfg),
        Command::Evaluate { manifest, seed, train_fraction, alpha } => {
            evaluate(&manifest, SpeciesParams { train_fraction, seed, alpha }, cfg)
        }
        Command::EvalFeatures { manifest, feature } => eval_features(&manifest, &feature, cfg),
        Command::Synth { spec, out, count, seed } => synth(&spec, &out, count, seed),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn load_manifest(path: &Path) -> Result<DatasetManifest, Fail> {
    let m = DatasetManifest::load(path)?;
    if m.is_empty() {
        return Err(Fail::Input(format!("{}: manifest has no entries", path.display())));
    }
    Ok(m)
}

fn extract(image: &Path, debug_dir: Option<&Path>, csv: bool, cfg: &PipelineConfig) -> Result<(), Fail> {
    let img = read_image(image)?;
    let result = extract_from_image(&img, cfg);
    if let Some(dir) = debug_dir {
        write_debug(dir, &img, result.as_ref().ok().and_then(|(_, o)| o.as_ref()), cfg)?;
    }
    let (Extraction { features, measurements, .. }, _) = result?;
    if csv {
        println!("image,{}", ALL_FEATURES.join(","));
        let values: Vec<&str> = ALL_FEATURES.iter().map(|n| features.get(n).expect("known feature")).collect();
        println!("{},{}", csv_field(&image.display().to_string()), values.join(","));
    } else {
        print_json(&json!({
            "schema": SCHEMA_VERSION,
            "image": image,
            "features": features,
            "measurements": measurements,
        }));
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_debug(
    dir: &Path,
    img: &GrayImage,
    out: Option<&pipeline::PipelineOutput>,
    cfg: &PipelineConfig,
) -> Result<(), Fail> {
    std::fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
    let stages = match out {
        Some(o) => svg::stage_svgs(o, cfg),
        // Compound leaves and failed runs: the segmentation is all there is.
        None => match pipeline::segment(img, cfg.leaf_is_dark) {
            Ok(mask) => vec![("mask", svg::mask_svg(&mask, "#000"))],
            Err(_) => Vec::new(),
        },
    };
    for (i, (name, body)) in stages.iter().enumerate() {
        let path = dir.join(format!("{}_{name}.svg", i + 1));
        std::fs::write(&path, body).map_err(|e| io_fail(&path, e))?;
    }
    Ok(())
}

fn failures(ds: &dyn Dataset, preds: &[leafarch::harness::Prediction]) -> Vec<Failure> {
    preds
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.as_ref().err().map(|e| Failure { id: ds.id(i), error: e.clone() }))
        .collect()
}

fn train(manifest: &Path, out: &Path, alpha: f64, cfg: &PipelineConfig) -> Result<(), Fail> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Fail::Input(format!("alpha must be a non-negative number, got {alpha}")));
    }
    let m = load_manifest(manifest)?;
    let preds = extract_dataset(&m, cfg);
    let samples: Vec<_> =
        preds.iter().enumerate().filter_map(|(i, p)| p.as_ref().ok().map(|f| (*f, m.species(i)))).collect();
    if samples.is_empty() {
        return Err(Fail::Processing("no training image could be processed".into()));
    }
    let model = fit(&samples, alpha)?;
    std::fs::write(out, model.save()).map_err(|e| io_fail(out, e))?;
    print_json(&json!({
        "schema": REPORT_SCHEMA,
        "model": out,
        "species": model.species,
        "images": m.len(),
        "used": samples.len(),
        "failures": failures(&m, &preds),
    }));
    Ok(())
}

fn classify(model: &Path, image: &Path, top: usize, cfg: &PipelineConfig) -> Result<(), Fail> {
    let bytes = std::fs::read(model).map_err(|e| io_fail(model, e))?;
    let model = NaiveBayesModel::load(&bytes)?;
    if top == 0 {
        return Err(Fail::Input("--top must be at least 1".into()));
    }
    let img = read_image(image)?;
    let (e, _) = extract_from_image(&img, cfg)?;
    let p = model.classify_topk(&e.features, top)?;
    let ranked: Vec<Value> = p.ranked.iter().map(|(s, pr)| json!({ "species": s, "probability": pr })).collect();
    print_json(&json!({
        "schema": REPORT_SCHEMA,
        "image": image,
        "features": e.features,
        "ranked": ranked,
    }));
    Ok(())
}

/// Species evaluation, plus binary tests for any labelled characters.
fn evaluate(manifest: &Path, params: SpeciesParams, cfg: &PipelineConfig) -> Result<(), Fail> {
    if !(params.train_fraction > 0.0 && params.train_fraction < 1.0) {
        return Err(Fail::Input(format!("train fraction must lie in (0, 1), got {}", params.train_fraction)));
    }
    if !(params.alpha.is_finite() && params.alpha >= 0.0) {
        return Err(Fail::Input(format!("alpha must be a non-negative number, got {}", params.alpha)));
    }
    let m = load_manifest(manifest)?;
    let species: Vec<&str> = (0..m.len()).map(|i| m.species(i)).collect();
    let preds = extract_dataset(&m, cfg);
    let report = EvalReport {
        schema: REPORT_SCHEMA,
        seed: Some(params.seed),
        images: m.len(),
        failures: failures(&m, &preds),
        features: labelled(&m).into_iter().map(|f| feature_report(&m, f, &preds)).collect(),
        species: Some(species_report(&species, &preds, &params)?),
    };
    println!("{}", report.to_json());
    Ok(())
}

/// Binary characters with at least one usable label in the manifest.
fn labelled(m: &DatasetManifest) -> Vec<BinaryFeature> {
    BinaryFeature::ALL
        .into_iter()
        .filter(|f| (0..m.len()).any(|i| m.label(i, f.name()).and_then(|v| f.truth(v)).is_some()))
        .collect()
}

fn eval_features(manifest: &Path, names: &[String], cfg: &PipelineConfig) -> Result<(), Fail> {
    let mut features = Vec::new();
    for name in names.iter().flat_map(|n| n.split(',')).map(str::trim) {
        if name == "all" {
            features.extend(BinaryFeature::ALL);
            continue;
        }
        let f = BinaryFeature::from_name(name).ok_or_else(|| {
            let known: Vec<&str> = BinaryFeature::ALL.iter().map(|f| f.name()).collect();
            Fail::Input(format!("unknown feature {name:?}; expected one of {} or all", known.join(", ")))
        })?;
        features.push(f);
    }
    features.sort();
    features.dedup();
    let m = load_manifest(manifest)?;
    for f in &features {
        if !labelled(&m).contains(f) {
            return Err(Fail::Input(format!("manifest has no usable {} labels", f.name())));
        }
    }
    let preds = extract_dataset(&m, cfg);
    let report = EvalReport {
        schema: REPORT_SCHEMA,
        seed: None,
        images: m.len(),
        failures: failures(&m, &preds),
        features: features.iter().map(|&f| feature_report(&m, f, &preds)).collect(),
        species: None,
    };
    println!("{}", report.to_json());
    Ok(())
}

fn synth(spec: &Path, out: &Path, count: usize, seed: u64) -> Result<(), Fail> {
    if count == 0 {
        return Err(Fail::Input("--count must be at least 1".into()));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| io_fail(spec, e))?;
    let plan = SynthPlan::from_json(&text)?;
    let set = plan.build(count, seed)?;
    let manifest = set.write(out).map_err(|e| match e {
        HarnessError::Io(io) => io_fail(out, io),
        other => Fail::from(other),
    })?;
    print_json(&json!({
        "schema": REPORT_SCHEMA,
        "manifest": out.join("manifest.csv"),
        "images": manifest.entries.len(),
        "seed": seed,
    }));
    Ok(())
}
