use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::image::{quantize, AspectImage, BitDepth};
use crate::blstm::AspectSequence;
use crate::error::{Error, Result};
use crate::numkit::{Grid2D, Rng};

/// A point scatterer in the target frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    /// Column offset from the image center, as a fraction of the image side.
    pub x: f64,
    /// Row offset from the image center, as a fraction of the image side.
    pub y: f64,
    pub amplitude: f64,
    /// Std-dev of the aspect response in degrees; absent means the
    /// return does not depend on aspect.
    #[serde(default)]
    pub width_deg: Option<f64>,
    #[serde(default)]
    pub preferred_deg: f64,
}

impl Scatterer {
    pub fn fixed(x: f64, y: f64, amplitude: f64) -> Self {
        Scatterer {
            x,
            y,
            amplitude,
            width_deg: None,
            preferred_deg: 0.0,
        }
    }

    pub fn lobe(x: f64, y: f64, amplitude: f64, preferred_deg: f64, width_deg: f64) -> Self {
        Scatterer {
            x,
            y,
            amplitude,
            width_deg: Some(width_deg),
            preferred_deg,
        }
    }

    /// Return strength at `aspect_deg`: a Gaussian in the wrapped angular
    /// distance to the preferred aspect.
    pub fn amplitude_at(&self, aspect_deg: f64) -> f64 {
        match self.width_deg {
            None => self.amplitude,
            Some(w) => {
                let d = wrapped_diff(aspect_deg, self.preferred_deg);
                self.amplitude * (-d * d / (2.0 * w * w)).exp()
            }
        }
    }
}

/// Signed angular difference folded into `(-180, 180]`.
pub fn wrapped_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSignature {
    pub scatterers: Vec<Scatterer>,
}

/// Synthetic multi-aspect dataset description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub class_count: usize,
    /// Distinct aspect positions per sweep, evenly spaced over 360°.
    pub aspects_per_class: usize,
    /// Sweeps per class; each lands one image in every aspect bin.
    pub passes: usize,
    pub image_size: usize,
    pub depression_deg: f64,
    /// Added to every aspect, degrees.
    pub aspect_offset_deg: f64,
    /// Std-dev of each rendered spot as a fraction of the image side.
    pub spot_sigma: f64,
    /// Uniform background level before speckle.
    pub clutter: f64,
    /// Multiplicative speckle weight `s` in `v · ((1 - s) + s · Exp(1))`.
    pub speckle: f64,
    pub seed: u64,
    pub serial_prefix: String,
    pub classes: Vec<ClassSignature>,
}

/// Spacing between aspect bins of a spec, degrees.
pub fn aspect_spacing(spec: &SynthSpec) -> f64 {
    360.0 / spec.aspects_per_class as f64
}

impl Default for SynthSpec {
    /// Four classes in two confusable pairs. Classes 0 and 1 share a
    /// two-spot body, classes 2 and 3 a three-spot body. Each class adds
    /// one lobe: class 0 at 30°, class 1 at 210°, class 2 at 300°, class 3
    /// at 120°, placed at different positions. Halfway between the lobes of
    /// a pair both lobes are dark and the pair renders the same scene; over
    /// a full sweep every class is unique.
    fn default() -> Self {
        let w = 25.0;
        let body_a = vec![Scatterer::fixed(-0.14, 0.0, 0.5), Scatterer::fixed(0.14, 0.0, 0.5)];
        let body_b = vec![
            Scatterer::fixed(-0.16, 0.0, 0.5),
            Scatterer::fixed(0.0, 0.0, 0.5),
            Scatterer::fixed(0.16, 0.0, 0.5),
        ];
        let class = |body: &[Scatterer], lobe: Scatterer| ClassSignature {
            scatterers: body.iter().cloned().chain([lobe]).collect(),
        };
        SynthSpec {
            class_count: 4,
            aspects_per_class: 60,
            passes: 4,
            image_size: 64,
            depression_deg: 17.0,
            aspect_offset_deg: 0.0,
            spot_sigma: 0.03,
            clutter: 0.05,
            speckle: 0.3,
            seed: 1,
            serial_prefix: "syn".into(),
            classes: vec![
                class(&body_a, Scatterer::lobe(-0.1, -0.14, 1.0, 30.0, w)),
                class(&body_a, Scatterer::lobe(0.1, 0.14, 1.0, 210.0, w)),
                class(&body_b, Scatterer::lobe(-0.1, -0.14, 1.0, 300.0, w)),
                class(&body_b, Scatterer::lobe(0.1, 0.14, 1.0, 120.0, w)),
            ],
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.class_count < 2 {
            return bad(format!("class_count must be >= 2, got {}", self.class_count));
        }
        if self.classes.len() != self.class_count {
            return bad(format!(
                "{} class signatures given for class_count {}",
                self.classes.len(),
                self.class_count
            ));
        }
        if self.aspects_per_class == 0 || self.passes == 0 {
            return bad("aspects_per_class and passes must be >= 1".into());
        }
        if self.image_size < 8 {
            return bad(format!("image_size must be >= 8, got {}", self.image_size));
        }
        if !(self.spot_sigma > 0.0) {
            return bad("spot_sigma must be > 0".into());
        }
        if !(0.0..=1.0).contains(&self.speckle) || !(self.clutter >= 0.0) {
            return bad("speckle must be in [0, 1] and clutter >= 0".into());
        }
        for (c, sig) in self.classes.iter().enumerate() {
            for s in &sig.scatterers {
                if s.width_deg.is_some_and(|w| !(w > 0.0)) || !s.amplitude.is_finite() {
                    return bad(format!("class {c} has an invalid scatterer {s:?}"));
                }
            }
            if let Some(other) = self.classes[..c].iter().position(|o| o == sig) {
                return bad(format!("classes {other} and {c} have identical scatterer sets"));
            }
        }
        Ok(())
    }

    /// Per-scatterer return strengths of `class` at `aspect_deg`.
    pub fn amplitude_profile(&self, class: usize, aspect_deg: f64) -> Vec<f64> {
        self.classes[class]
            .scatterers
            .iter()
            .map(|s| s.amplitude_at(aspect_deg))
            .collect()
    }

    /// Aspect of image `k` in sweep `pass`. Sweeps are staggered inside the
    /// first half of each bin, so every bin holds exactly one image per sweep.
    pub fn aspect_of(&self, k: usize, pass: usize, jitter: f64) -> f64 {
        let spacing = aspect_spacing(self);
        let slot = 0.5 * spacing / self.passes as f64;
        (self.aspect_offset_deg + k as f64 * spacing + (pass as f64 + jitter) * slot).rem_euclid(360.0)
    }

    /// Noise-free scene of `class` at `aspect_deg`.
    pub fn render_clean(&self, class: usize, aspect_deg: f64) -> Grid2D<f64> {
        let n = self.image_size;
        let c = (n as f64 - 1.0) / 2.0;
        // Slight spot broadening with depression keeps test depressions
        // close to, but not identical with, the training ones.
        let sigma = self.spot_sigma * n as f64 * (1.0 + 0.02 * (self.depression_deg - 17.0));
        let spots: Vec<(f64, f64, f64)> = self.classes[class]
            .scatterers
            .iter()
            .map(|s| (c + s.y * n as f64, c + s.x * n as f64, s.amplitude_at(aspect_deg)))
            .collect();
        let inv = 1.0 / (2.0 * sigma * sigma);
        Grid2D::from_fn(n, n, |i, j| {
            let mut v = self.clutter;
            for &(r, col, a) in &spots {
                let d2 = (i as f64 - r).powi(2) + (j as f64 - col).powi(2);
                v += a * (-d2 * inv).exp();
            }
            v
        })
        .expect("image_size >= 8")
    }
}

/// Renders every class at every aspect of every sweep.
///
/// Draw order per image: one aspect jitter, then one exponential per pixel
/// (row-major) for speckle when `speckle > 0`. Images are quantized to the
/// 16-bit grid so that writing and reloading them is lossless.
pub fn synth_generate(spec: &SynthSpec) -> Result<Vec<AspectImage>> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.class_count * spec.passes * spec.aspects_per_class);
    for class in 0..spec.class_count {
        let mut rng = Rng::derive(spec.seed, class as u64);
        for pass in 0..spec.passes {
            for k in 0..spec.aspects_per_class {
                let aspect = spec.aspect_of(k, pass, rng.uniform());
                let mut img = spec.render_clean(class, aspect);
                if spec.speckle > 0.0 {
                    let s = spec.speckle;
                    img.data_mut()
                        .iter_mut()
                        .for_each(|v| *v *= (1.0 - s) + s * rng.exponential());
                }
                img.data_mut().iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
                let serial = format!("{}{class}", spec.serial_prefix);
                out.push(AspectImage {
                    pixels: quantize(&img, BitDepth::Sixteen),
                    aspect_deg: aspect,
                    depression_deg: spec.depression_deg,
                    class_id: class,
                    source_file: PathBuf::from(format!(
                        "{serial}_d{}_p{pass}_k{k:03}.pgm",
                        spec.depression_deg
                    )),
                    serial,
                });
            }
        }
    }
    Ok(out)
}

/// Idealized per-step features straight from the closed-form profiles:
/// one entry per distinct scatterer position across all classes, holding
/// the summed return at that position, plus Gaussian noise of std-dev
/// `noise`. Each class gets `sweeps` sequences over the spec's aspect grid.
pub fn signature_sequences(spec: &SynthSpec, sweeps: usize, noise: f64, seed: u64) -> Result<Vec<AspectSequence>> {
    spec.validate()?;
    let mut positions: Vec<(f64, f64)> = Vec::new();
    for s in spec.classes.iter().flat_map(|c| &c.scatterers) {
        if !positions.contains(&(s.x, s.y)) {
            positions.push((s.x, s.y));
        }
    }
    let mut rng = Rng::new(seed);
    let mut out = Vec::new();
    for class in 0..spec.class_count {
        for sweep in 0..sweeps {
            let mut steps = Vec::with_capacity(spec.aspects_per_class);
            let mut aspects = Vec::with_capacity(spec.aspects_per_class);
            for k in 0..spec.aspects_per_class {
                let aspect = spec.aspect_of(k, sweep % spec.passes, rng.uniform());
                let mut f = vec![0.0; positions.len()];
                for s in &spec.classes[class].scatterers {
                    let p = positions.iter().position(|&q| q == (s.x, s.y)).expect("collected above");
                    f[p] += s.amplitude_at(aspect);
                }
                f.iter_mut().for_each(|v| *v += noise * rng.normal());
                steps.push(f);
                aspects.push(aspect);
            }
            out.push(AspectSequence::uniform(format!("sig-c{class}-{sweep}"), class, steps, aspects));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap() {
        assert_eq!(wrapped_diff(350.0, 10.0), -20.0);
        assert_eq!(wrapped_diff(10.0, 350.0), 20.0);
        assert_eq!(wrapped_diff(190.0, 10.0), 180.0);
    }

    #[test]
    fn default_validates() {
        SynthSpec::default().validate().unwrap();
    }

    #[test]
    fn duplicate_class_rejected() {
        let mut s = SynthSpec::default();
        s.classes[1] = s.classes[0].clone();
        assert!(s.validate().is_err());
        let one = SynthSpec {
            class_count: 1,
            classes: vec![s.classes[0].clone()],
            ..SynthSpec::default()
        };
        assert!(one.validate().is_err());
    }

    #[test]
    fn aspects_stay_in_their_bin() {
        let s = SynthSpec {
            aspect_offset_deg: 3.0,
            ..SynthSpec::default()
        };
        for k in 0..60 {
            for p in 0..4 {
                let a = s.aspect_of(k, p, 0.999);
                assert_eq!((a / 6.0).floor() as usize, k, "{a}");
            }
        }
    }
}
