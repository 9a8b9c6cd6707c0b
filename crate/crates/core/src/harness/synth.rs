//! Synthetic leaf silhouettes with known characters.
//!
//! A simple leaf is described in its own frame: base at `y = 0`, apex at
//! `y = 1` (units of the lamina length), with a half-width profile for each
//! side. The body is two elliptic arcs meeting at the widest point; the last
//! and first `TIP` of the length are reshaped by the apex and base styles.
//! Sinuses are V-shaped dips in the profile, teeth a sawtooth added to it,
//! and notched tips are V cuts. The leaf is rotated, scaled into the canvas
//! and rasterized dark on a light background.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::{
    AngleClass, ApexShape, ArchitectureFeatures, BaseShape, LaminarShape, Lobation, LobeCount, Margin, MedialSymmetry,
    Organization,
};
use crate::raster::GrayImage;

use super::HarnessError;

const TIP: f64 = 0.3;
const PROFILE_SAMPLES: usize = 4096;
const APEX_NOTCH: f64 = 0.1;
const BASE_NOTCH: f64 = 0.12;
const TEETH_SPAN: (f64, f64) = (0.08, 0.92);
const MARGIN_PX: f64 = 4.0;
const SLENDER: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApexStyle {
    /// Rounded dome.
    Convex,
    /// Straight-sided wedge.
    Straight,
    /// Concave flanks drawn out into a tip.
    Acuminate,
    /// Dome with a V notch at the tip.
    Emarginate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseStyle {
    Convex,
    Straight,
    Concave,
    /// Dome with a V notch at the insertion; reads as lobate when the leaf
    /// is lobed.
    Cordate,
}

/// Shape parameters. Lengths are fractions of the canvas size or of the
/// lamina length as noted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeafSpec {
    /// Canvas side in pixels, 64 to 4096.
    pub image_size: usize,
    /// Leaf length (lamina, or whole compound leaf) over canvas size, 0.2 to 0.9.
    pub length: f64,
    /// Length over width, 1 to 20.
    pub aspect: f64,
    /// Height of the widest point as a fraction of the length, 0.32 to 0.68.
    pub widest: f64,
    pub apex: ApexStyle,
    pub base: BaseStyle,
    /// 0, or 2 to 7 lobes (one fewer sinuses, split between the sides).
    pub lobes: usize,
    /// Sinus depth as a fraction of the local half-width, 0.3 to 0.8.
    pub lobe_depth: f64,
    /// Teeth per side, 0 to 120.
    pub teeth: usize,
    /// Tooth height as a fraction of the leaf width, 0.005 to 0.1.
    pub tooth_amplitude: f64,
    /// Left side narrower by this fraction, 0 to 0.5.
    pub asymmetry: f64,
    /// 0 for a simple leaf, or an odd count of 3 to 11 leaflets.
    pub leaflets: usize,
    /// Stem (and rachis) width over canvas size, 0.004 to 0.04.
    pub stem_width: f64,
    /// Stem length as a fraction of the length, 0 to 0.5.
    pub stem_length: f64,
    /// Counter-clockwise rotation of the apex from straight up, degrees.
    pub rotation: f64,
    /// Uniform random extra rotation in `[-r, r]` degrees.
    pub rotation_jitter: f64,
    /// Relative random variation of length, aspect, widest point, sinus
    /// depth and tooth amplitude, 0 to 0.3.
    pub jitter: f64,
    /// Salt and pepper probability per pixel, 0 to 0.1.
    pub noise: f64,
}

impl Default for LeafSpec {
    fn default() -> Self {
        Self {
            image_size: 400,
            length: 0.7,
            aspect: 2.0,
            widest: 0.5,
            apex: ApexStyle::Convex,
            base: BaseStyle::Convex,
            lobes: 0,
            lobe_depth: 0.5,
            teeth: 0,
            tooth_amplitude: 0.04,
            asymmetry: 0.0,
            leaflets: 0,
            stem_width: 0.02,
            stem_length: 0.15,
            rotation: 0.0,
            rotation_jitter: 0.0,
            jitter: 0.0,
            noise: 0.0,
        }
    }
}

/// Characters fixed by construction; `None` where the parameters do not
/// settle the value or it falls too close to a class boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub organization: Organization,
    pub laminar_shape: Option<LaminarShape>,
    pub medial_symmetry: Option<MedialSymmetry>,
    pub lobation: Option<Lobation>,
    pub lobe_count: Option<LobeCount>,
    pub margin: Option<Margin>,
    pub apex_angle: Option<AngleClass>,
    pub apex_shape: Option<ApexShape>,
    pub base_angle: Option<AngleClass>,
    pub base_shape: Option<BaseShape>,
}

impl GroundTruth {
    /// Known characters as `(name, value)` pairs.
    pub fn known(&self) -> Vec<(&'static str, &'static str)> {
        use crate::features::Category;
        if self.organization == Organization::Compound {
            return ArchitectureFeatures::compound().classifier_values().to_vec();
        }
        let mut out = vec![("organization", self.organization.as_str())];
        let mut push = |name, v: Option<&'static str>| out.extend(v.map(|v| (name, v)));
        push("laminar_shape", self.laminar_shape.map(Category::as_str));
        push("medial_symmetry", self.medial_symmetry.map(Category::as_str));
        push("lobation", self.lobation.map(Category::as_str));
        push("lobe_count", self.lobe_count.map(Category::as_str));
        push("margin", self.margin.map(Category::as_str));
        push("apex_angle", self.apex_angle.map(Category::as_str));
        push("apex_shape", self.apex_shape.map(Category::as_str));
        push("base_angle", self.base_angle.map(Category::as_str));
        push("base_shape", self.base_shape.map(Category::as_str));
        out
    }

    pub fn get(&self, name: &str) -> Option<&'static str> {
        self.known().into_iter().find(|(n, _)| *n == name).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticLeaf {
    pub image: GrayImage,
    pub truth: GroundTruth,
    /// The parameters after jitter.
    pub realized: LeafSpec,
    /// Tip of the lamina (bottom of a notch) in image coordinates.
    pub apex_px: (f64, f64),
    /// Petiole insertion in image coordinates.
    pub insertion_px: (f64, f64),
}

fn check(ok: bool, what: &str) -> Result<(), HarnessError> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::BadSpec(what.to_string()))
    }
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v.is_finite() && (lo..=hi).contains(&v)
}

impl LeafSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        check((64..=4096).contains(&self.image_size), "image_size must be 64 to 4096")?;
        check(within(self.length, 0.2, 0.9), "length must be 0.2 to 0.9")?;
        check(within(self.aspect, 1.0, 20.0), "aspect must be 1 to 20")?;
        check(within(self.widest, 0.32, 0.68), "widest must be 0.32 to 0.68")?;
        check(self.lobes != 1 && self.lobes <= 7, "lobes must be 0 or 2 to 7")?;
        check(self.lobes == 0 || within(self.lobe_depth, 0.3, 0.8), "lobe_depth must be 0.3 to 0.8")?;
        check(self.lobes == 0 || self.aspect < 10.0, "a linear blade cannot be lobed")?;
        check(self.teeth <= 120, "teeth must be at most 120")?;
        check(self.teeth == 0 || within(self.tooth_amplitude, 0.005, 0.1), "tooth_amplitude must be 0.005 to 0.1")?;
        check(within(self.asymmetry, 0.0, 0.5), "asymmetry must be 0 to 0.5")?;
        check(
            self.leaflets == 0 || (self.leaflets % 2 == 1 && (3..=11).contains(&self.leaflets)),
            "leaflets must be 0 or odd from 3 to 11",
        )?;
        if self.leaflets > 0 {
            check(self.lobes == 0, "a compound leaf cannot be lobed")?;
            check(self.apex != ApexStyle::Emarginate, "a compound leaf has no notched apex")?;
            check(self.base != BaseStyle::Cordate, "a compound leaf has no notched base")?;
            check(self.stem_width < 0.025, "a rachis must be narrower than 0.025")?;
        }
        check(within(self.stem_width, 0.004, 0.04), "stem_width must be 0.004 to 0.04")?;
        check(within(self.stem_length, 0.0, 0.5), "stem_length must be 0 to 0.5")?;
        check(within(self.rotation, -360.0, 360.0), "rotation must be within a turn")?;
        check(within(self.rotation_jitter, 0.0, 180.0), "rotation_jitter must be 0 to 180")?;
        check(within(self.jitter, 0.0, 0.3), "jitter must be 0 to 0.3")?;
        check(within(self.noise, 0.0, 0.1), "noise must be 0 to 0.1")?;
        Ok(())
    }

    /// Applies the random variation for `rng`, keeping values in range.
    fn realize(&self, rng: &mut ChaCha8Rng) -> Self {
        let mut s = self.clone();
        let mut vary = |v: f64, lo: f64, hi: f64| {
            let f = 1.0 + self.jitter * rng.gen_range(-1.0..=1.0);
            (v * f).clamp(lo, hi)
        };
        s.length = vary(s.length, 0.2, 0.9);
        s.aspect = vary(s.aspect, 1.0, 20.0);
        s.widest = vary(s.widest, 0.32, 0.68);
        s.lobe_depth = vary(s.lobe_depth, 0.3, 0.8);
        s.tooth_amplitude = vary(s.tooth_amplitude, 0.005, 0.1);
        let spin =
            if self.rotation_jitter > 0.0 { rng.gen_range(-self.rotation_jitter..=self.rotation_jitter) } else { 0.0 };
        s.rotation += spin;
        s.jitter = 0.0;
        s.rotation_jitter = 0.0;
        s
    }
}

/// Renders a leaf. The same spec and seed always give the same image.
pub fn generate_synthetic(spec: &LeafSpec, seed: u64) -> Result<SyntheticLeaf, HarnessError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let realized = spec.realize(&mut rng);
    let shape = Shape::new(&realized);
    let truth = shape.truth(&realized);
    let (image, to_image) = render(&shape, &realized, &mut rng);
    let apex_y = 1.0 - shape.apex_notch.map_or(0.0, |(d, _)| d);
    Ok(SyntheticLeaf {
        image,
        truth,
        apex_px: to_image(0.0, apex_y),
        insertion_px: to_image(0.0, shape.insertion_y()),
        realized,
    })
}

/// Ground truth only, without rendering.
pub fn synthetic_truth(spec: &LeafSpec, seed: u64) -> Result<GroundTruth, HarnessError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let realized = spec.realize(&mut rng);
    Ok(Shape::new(&realized).truth(&realized))
}

/// Leaf outline in its own frame, in units of the length.
#[derive(Clone)]
struct Shape {
    right: Vec<f64>,
    left: Vec<f64>,
    /// Notch depth and slope (`y >= 1 - depth + slope * |x|` is cut).
    apex_notch: Option<(f64, f64)>,
    /// Notch depth and slope (`y <= depth - slope * |x|` is cut).
    base_notch: Option<(f64, f64)>,
    stem_half: f64,
    stem_length: f64,
    compound: Option<Compound>,
}

#[derive(Clone)]
struct Compound {
    rachis_top: f64,
    terminal: (f64, f64, f64),
    laterals: Vec<f64>,
    leaflet_length: f64,
    leaflet_width: f64,
    stalk: f64,
}

fn ellipse_arc(z: f64) -> f64 {
    (1.0 - z * z).max(0.0).sqrt()
}

fn body(t: f64, widest: f64) -> f64 {
    if t >= widest {
        ellipse_arc((t - widest) / (1.0 - widest))
    } else {
        ellipse_arc((widest - t) / widest)
    }
}

fn base_profile(t: f64, spec: &LeafSpec) -> f64 {
    let b = body(t, spec.widest);
    if t >= 1.0 - TIP {
        let s = (1.0 - t) / TIP;
        let h = body(1.0 - TIP, spec.widest);
        return match spec.apex {
            ApexStyle::Convex | ApexStyle::Emarginate => b,
            ApexStyle::Straight => h * s,
            ApexStyle::Acuminate => h * s * s,
        };
    }
    if t <= TIP {
        let s = t / TIP;
        let h = body(TIP, spec.widest);
        return match spec.base {
            BaseStyle::Convex | BaseStyle::Cordate => b,
            BaseStyle::Straight => h * s,
            BaseStyle::Concave => h * s.powf(1.5),
        };
    }
    b
}

/// Sinus centres along one side, in fractions of the length.
fn sinus_positions(count: usize) -> Vec<f64> {
    (0..count).map(|k| 0.2 + 0.6 * (k + 1) as f64 / (count + 1) as f64).collect()
}

fn sinus_width(count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        (0.45 * 0.6 / (count + 1) as f64).min(0.12)
    }
}

impl Shape {
    fn new(spec: &LeafSpec) -> Self {
        let half = 0.5 / spec.aspect;
        let sinuses = spec.lobes.saturating_sub(1);
        let (right_sinuses, left_sinuses) = (sinuses.div_ceil(2), sinuses / 2);
        let side = |count: usize, scale: f64| -> Vec<f64> {
            let centres = sinus_positions(count);
            let w = sinus_width(count);
            (0..PROFILE_SAMPLES)
                .map(|i| {
                    let t = i as f64 / (PROFILE_SAMPLES - 1) as f64;
                    let mut h = half * scale * base_profile(t, spec);
                    for &c in &centres {
                        let dip = (1.0 - (t - c).abs() / w).max(0.0);
                        h *= 1.0 - spec.lobe_depth * dip;
                    }
                    if spec.teeth > 0 && (TEETH_SPAN.0..=TEETH_SPAN.1).contains(&t) {
                        let span = TEETH_SPAN.1 - TEETH_SPAN.0;
                        let phase = (t - TEETH_SPAN.0) / span * spec.teeth as f64;
                        let taper = ((t - TEETH_SPAN.0).min(TEETH_SPAN.1 - t) / 0.04).min(1.0);
                        h += spec.tooth_amplitude * 2.0 * half * phase.fract() * taper;
                    }
                    h
                })
                .collect()
        };
        let right = side(right_sinuses, 1.0);
        let left = side(left_sinuses, 1.0 - spec.asymmetry);
        let notch_slope = |depth: f64, t: f64, h: &[f64]| {
            let w = 0.7 * sample(h, t);
            depth / w.max(1e-6)
        };
        let apex_notch = (spec.apex == ApexStyle::Emarginate)
            .then(|| (APEX_NOTCH, notch_slope(APEX_NOTCH, 1.0 - APEX_NOTCH, &right)));
        let base_notch =
            (spec.base == BaseStyle::Cordate).then(|| (BASE_NOTCH, notch_slope(BASE_NOTCH, BASE_NOTCH, &right)));
        let compound = (spec.leaflets > 0).then(|| {
            let pairs = (spec.leaflets - 1) / 2;
            let leaflet_length = 0.3;
            let laterals: Vec<f64> = if pairs == 1 {
                vec![0.4]
            } else {
                (0..pairs).map(|k| 0.12 + 0.5 * k as f64 / (pairs - 1) as f64).collect()
            };
            let spacing = if pairs == 1 { 0.5 } else { 0.5 / (pairs - 1) as f64 };
            let leaflet_width = (leaflet_length / spec.aspect.max(2.0)).min(0.75 * spacing).min(0.12);
            Compound {
                rachis_top: 0.72,
                terminal: (0.85, leaflet_width / 2.0, 0.15),
                laterals,
                leaflet_length,
                leaflet_width,
                stalk: 0.03,
            }
        });
        Self { right, left, apex_notch, base_notch, stem_half: 0.0, stem_length: spec.stem_length, compound }
    }

    fn insertion_y(&self) -> f64 {
        self.base_notch.map_or(0.0, |(d, _)| d)
    }

    fn lamina_contains(&self, x: f64, y: f64) -> bool {
        if !(0.0..=1.0).contains(&y) {
            return false;
        }
        let h = if x >= 0.0 { sample(&self.right, y) } else { sample(&self.left, y) };
        if x.abs() > h {
            return false;
        }
        if let Some((d, k)) = self.apex_notch {
            if y >= 1.0 - d + k * x.abs() {
                return false;
            }
        }
        if let Some((d, k)) = self.base_notch {
            if y <= d - k * x.abs() {
                return false;
            }
        }
        true
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let on_stem = |top: f64| x.abs() <= self.stem_half && (-self.stem_length..=top).contains(&y);
        match &self.compound {
            None => on_stem(self.insertion_y() + 2.0 * self.stem_half) || self.lamina_contains(x, y),
            Some(c) => {
                if on_stem(c.rachis_top) {
                    return true;
                }
                let (cy, a, b) = c.terminal;
                if (x / a).powi(2) + ((y - cy) / b).powi(2) <= 1.0 {
                    return true;
                }
                let reach = self.stem_half + c.stalk;
                let (a, b) = (c.leaflet_length / 2.0, c.leaflet_width / 2.0);
                c.laterals.iter().any(|&yk| {
                    let stalk = (y - yk).abs() <= self.stem_half && x.abs() <= reach + a * 0.5;
                    let cx = reach + a;
                    stalk || ((x.abs() - cx) / a).powi(2) + ((y - yk) / b).powi(2) <= 1.0
                })
            }
        }
    }

    /// Bounding box `(x_lo, x_hi, y_lo, y_hi)` in leaf units.
    fn extent(&self) -> (f64, f64, f64, f64) {
        match &self.compound {
            None => {
                let r = self.right.iter().copied().fold(0.0, f64::max);
                let l = self.left.iter().copied().fold(0.0, f64::max);
                (-l.max(self.stem_half), r.max(self.stem_half), -self.stem_length, 1.0)
            }
            Some(c) => {
                let w = self.stem_half + c.stalk + c.leaflet_length;
                (-w, w, -self.stem_length, 1.0)
            }
        }
    }

    fn truth(&self, spec: &LeafSpec) -> GroundTruth {
        if spec.leaflets > 0 {
            let c = ArchitectureFeatures::compound();
            return GroundTruth {
                organization: Organization::Compound,
                laminar_shape: Some(c.laminar_shape),
                medial_symmetry: Some(c.medial_symmetry),
                lobation: Some(c.lobation),
                lobe_count: Some(c.lobe_count),
                margin: Some(c.margin),
                apex_angle: Some(c.apex_angle),
                apex_shape: Some(c.apex_shape),
                base_angle: Some(c.base_angle),
                base_shape: Some(c.base_shape),
            };
        }
        let lobed = spec.lobes >= 2;
        let toothed = spec.teeth > 0;
        let plain = !lobed && !toothed;
        // Tips of slender blades are too narrow for a reliable curvature census.
        let shaped = plain && spec.aspect < SLENDER;
        let apex_reflex = spec.apex == ApexStyle::Emarginate;
        let base_reflex = spec.base == BaseStyle::Cordate;

        let apex_angle = if apex_reflex {
            Some(AngleClass::Reflex)
        } else if lobed {
            None
        } else {
            let lp = 1.0 - self.insertion_y();
            let edge = 1.0 - 0.25 * lp;
            self.chord_class(edge, 1.0 - edge)
        };
        let base_angle = if base_reflex {
            Some(AngleClass::Reflex)
        } else if lobed {
            None
        } else {
            self.chord_class(0.25, 0.25)
        };
        let apex_shape = match spec.apex {
            ApexStyle::Emarginate => Some(ApexShape::Extended),
            _ if !shaped => None,
            ApexStyle::Convex => Some(ApexShape::Convex),
            ApexStyle::Straight => Some(ApexShape::Straight),
            ApexStyle::Acuminate => Some(ApexShape::Acuminate),
        };
        let base_shape = match spec.base {
            BaseStyle::Cordate if lobed => Some(BaseShape::Lobate),
            BaseStyle::Cordate => Some(BaseShape::Cordate),
            _ if !shaped => None,
            BaseStyle::Convex => Some(BaseShape::Convex),
            BaseStyle::Straight => Some(BaseShape::Straight),
            BaseStyle::Concave => Some(BaseShape::Concave),
        };
        let medial_symmetry = match spec.asymmetry {
            _ if lobed => None,
            a if a < 0.05 => Some(MedialSymmetry::Symmetrical),
            a if a > 0.15 => Some(MedialSymmetry::Asymmetrical),
            _ => None,
        };
        let laminar_shape = (plain && !apex_reflex && !base_reflex).then(|| self.laminar_class(spec)).flatten();
        GroundTruth {
            organization: Organization::Simple,
            laminar_shape,
            medial_symmetry,
            lobation: Some(if lobed { Lobation::Lobed } else { Lobation::Unlobed }),
            lobe_count: Some(LobeCount::from_count(spec.lobes)),
            margin: Some(if toothed { Margin::Toothed } else { Margin::Untoothed }),
            apex_angle,
            apex_shape,
            base_angle,
            base_shape,
        }
    }

    /// Angle class between the chords from the tip to the profile at height
    /// `edge`; `None` within 5 degrees of a class boundary.
    fn chord_class(&self, edge: f64, rise: f64) -> Option<AngleClass> {
        let deg = (sample(&self.right, edge) / rise).atan().to_degrees()
            + (sample(&self.left, edge) / rise).atan().to_degrees();
        ((deg - 90.0).abs() > 5.0).then(|| AngleClass::from_degrees(deg))
    }

    fn laminar_class(&self, spec: &LeafSpec) -> Option<LaminarShape> {
        let lines = 200;
        let widths: Vec<f64> = (0..lines)
            .map(|i| {
                let t = (i as f64 + 0.5) / lines as f64;
                sample(&self.right, t) + sample(&self.left, t)
            })
            .collect();
        let wmax = widths.iter().copied().fold(0.0, f64::max);
        let lw = 1.0 / wmax;
        if lw >= 10.5 {
            return Some(LaminarShape::Linear);
        }
        if lw > 9.5 {
            return None;
        }
        // Width tolerance in leaf units: 2.5% of the canvas.
        let tol = 0.025 / spec.length;
        let inner: Vec<f64> = (0..lines)
            .filter(|&i| (0.2..=0.8).contains(&((i as f64 + 0.5) / lines as f64)))
            .map(|i| widths[i])
            .collect();
        let span = (lines as f64 / 3.0).ceil() as usize + 1;
        let tightest = inner
            .windows(span)
            .map(|w| {
                let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            })
            .fold(f64::INFINITY, f64::min);
        if tightest < 0.8 * tol {
            return Some(LaminarShape::Oblong);
        }
        if tightest < 1.2 * tol {
            return None;
        }
        let at = widths.iter().enumerate().fold((0, 0.0), |best, (i, &w)| if w > best.1 { (i, w) } else { best });
        let f = (at.0 as f64 + 0.5) / lines as f64;
        match f {
            f if f < 0.37 => Some(LaminarShape::Ovate),
            f if (0.43..=0.57).contains(&f) => Some(LaminarShape::Elliptic),
            f if f > 0.63 => Some(LaminarShape::Obovate),
            _ => None,
        }
    }
}

fn sample(profile: &[f64], t: f64) -> f64 {
    let n = profile.len() - 1;
    let pos = t.clamp(0.0, 1.0) * n as f64;
    let i = (pos.floor() as usize).min(n - 1);
    let f = pos - i as f64;
    profile[i] * (1.0 - f) + profile[i + 1] * f
}

fn render(shape: &Shape, spec: &LeafSpec, rng: &mut ChaCha8Rng) -> (GrayImage, impl Fn(f64, f64) -> (f64, f64)) {
    let size = spec.image_size;
    let mut scale = spec.length * size as f64;
    let (x0, x1, y0, y1) = shape.extent();
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let theta = spec.rotation.to_radians();
    let (sin, cos) = theta.sin_cos();
    // Shrink until the rotated box fits the canvas.
    let (hw, hh) = ((x1 - x0) / 2.0, (y1 - y0) / 2.0);
    let rx = hw * cos.abs() + hh * sin.abs();
    let ry = hw * sin.abs() + hh * cos.abs();
    let room = size as f64 / 2.0 - MARGIN_PX;
    scale = scale.min(room / rx.max(ry));

    let mut shape = shape.clone();
    shape.stem_half = spec.stem_width * size as f64 / 2.0 / scale;

    let leaf = rng.gen_range(20..=70u8);
    let background = rng.gen_range(190..=240u8);
    let centre = size as f64 / 2.0;
    let mut pixels = Vec::with_capacity(size * size);
    for py in 0..size {
        for px in 0..size {
            let dx = (px as f64 + 0.5 - centre) / scale;
            let dy = (centre - (py as f64 + 0.5)) / scale;
            // Undo the rotation, then move from the box centre to the leaf frame.
            let x = dx * cos + dy * sin + cx;
            let y = -dx * sin + dy * cos + cy;
            pixels.push(if shape.contains(x, y) { leaf } else { background });
        }
    }
    if spec.noise > 0.0 {
        for p in &mut pixels {
            if rng.gen_bool(spec.noise) {
                *p = if rng.gen_bool(0.5) { 0 } else { 255 };
            }
        }
    }
    let to_image = move |x: f64, y: f64| {
        let (rx, ry) = (x - cx, y - cy);
        let (dx, dy) = (rx * cos - ry * sin, rx * sin + ry * cos);
        (centre + dx * scale, centre - dy * scale)
    };
    (GrayImage::new(size, size, pixels).expect("buffer matches dimensions"), to_image)
}
