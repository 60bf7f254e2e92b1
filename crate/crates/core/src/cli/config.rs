use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::blstm::BlstmHyper;
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::mlp::MlpHyper;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpStage {
    pub hidden: usize,
    pub hyper: MlpHyper,
}

impl Default for MlpStage {
    fn default() -> Self {
        MlpStage {
            hidden: 1024,
            hyper: MlpHyper::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlstmStage {
    /// Hidden units per direction, bottom layer first.
    pub layer_sizes: Vec<usize>,
    pub hyper: BlstmHyper,
}

impl Default for BlstmStage {
    fn default() -> Self {
        BlstmStage {
            layer_sizes: vec![512, 256, 128],
            hyper: BlstmHyper::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceConfig {
    /// Number of full-circle sweeps per target.
    pub circles: usize,
    /// Width of the aspect bins used to find duplicate acquisitions.
    pub bin_deg: f64,
    /// Extra training copies of each sweep, each restricted to a random
    /// aspect range and thinned to a random minimum interval. 0 trains on
    /// the full sweeps only.
    pub train_variants: usize,
    /// Largest minimum interval drawn for a variant, degrees.
    pub variant_max_interval_deg: f64,
    /// Smallest aspect range drawn for a variant, degrees.
    pub variant_min_range_deg: f64,
}

impl Default for SequenceConfig {
    fn default() -> Self {
        SequenceConfig {
            circles: 4,
            bin_deg: 6.0,
            train_variants: 0,
            variant_max_interval_deg: 90.0,
            variant_min_range_deg: 90.0,
        }
    }
}

/// Shapes the stored tensors must agree with. Filled in by training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelShape {
    pub feature_dim: usize,
    pub class_count: usize,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            feature_dim: 75264,
            class_count: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataPaths {
    pub train_dir: Option<PathBuf>,
    pub test_dir: Option<PathBuf>,
}

/// Protocol options; all default to the plain full-data experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Fraction of test pixels replaced by uniform noise.
    pub noise: f64,
    /// Test aspects kept, degrees `[lo, hi]`.
    pub aspect_range: Option<[f64; 2]>,
    /// Minimum spacing between kept test aspects, degrees.
    pub aspect_interval: Option<f64>,
    /// Fraction of each class's training images used.
    pub train_fraction: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            noise: 0.0,
            aspect_range: None,
            aspect_interval: None,
            train_fraction: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::Config(format!("noise must be in [0, 1], got {}", self.noise)));
        }
        if let Some([lo, hi]) = self.aspect_range {
            if !(lo < hi) {
                return Err(Error::Config(format!("aspect range needs lo < hi, got {lo}:{hi}")));
            }
        }
        if let Some(i) = self.aspect_interval {
            if !(i > 0.0 && i.is_finite()) {
                return Err(Error::Config(format!("aspect interval must be > 0, got {i}")));
            }
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "train fraction must be in (0, 1], got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }

    /// Range and interval for test subsampling, if either is set.
    pub fn subsampling(&self) -> Option<((f64, f64), f64)> {
        if self.aspect_range.is_none() && self.aspect_interval.is_none() {
            return None;
        }
        let [lo, hi] = self.aspect_range.unwrap_or([0.0, 360.0]);
        Some(((lo, hi), self.aspect_interval.unwrap_or(f64::MIN_POSITIVE)))
    }
}

/// Everything needed to run and reproduce the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Seed for initialization and test-noise draws.
    pub seed: u64,
    pub features: FeatureConfig,
    pub mlp: MlpStage,
    pub blstm: BlstmStage,
    pub sequences: SequenceConfig,
    pub model: ModelShape,
    pub data: DataPaths,
    pub experiment: ExperimentConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            features: FeatureConfig::default(),
            mlp: MlpStage::default(),
            blstm: BlstmStage::default(),
            sequences: SequenceConfig::default(),
            model: ModelShape::default(),
            data: DataPaths::default(),
            experiment: ExperimentConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    /// Uses `seed` for initialization, shuffling and noise draws.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.mlp.hyper.seed = seed;
        self.blstm.hyper.seed = seed;
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| match e {
            e @ Error::Config(_) => e,
            e => Error::Config(e.to_string()),
        };
        self.features.validate().map_err(cfg)?;
        self.mlp.hyper.validate()?;
        self.blstm.hyper.validate()?;
        if self.mlp.hidden == 0 {
            return Err(Error::Config("mlp hidden size must be >= 1".into()));
        }
        if self.blstm.layer_sizes.is_empty() || self.blstm.layer_sizes.contains(&0) {
            return Err(Error::Config(format!(
                "blstm layer sizes must be non-empty and positive, got {:?}",
                self.blstm.layer_sizes
            )));
        }
        if self.sequences.circles == 0 {
            return Err(Error::Config("circles must be >= 1".into()));
        }
        if !(self.sequences.bin_deg > 0.0 && self.sequences.bin_deg.is_finite()) {
            return Err(Error::Config(format!(
                "aspect bin width must be > 0, got {}",
                self.sequences.bin_deg
            )));
        }
        let v = &self.sequences;
        if !(v.variant_max_interval_deg >= 0.0 && (0.0..=360.0).contains(&v.variant_min_range_deg)) {
            return Err(Error::Config(format!(
                "variant interval must be >= 0 and range in [0, 360], got {} and {}",
                v.variant_max_interval_deg, v.variant_min_range_deg
            )));
        }
        if self.model.class_count < 2 {
            return Err(Error::Config(format!(
                "at least 2 classes are required, got {}",
                self.model.class_count
            )));
        }
        if self.model.feature_dim == 0 {
            return Err(Error::Config("feature dimension must be >= 1".into()));
        }
        self.experiment.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip_keeps_options() {
        let mut c = PipelineConfig::default();
        c.blstm.hyper.clip_norm = None;
        c.blstm.hyper.target_accuracy = Some(0.99);
        c.experiment.aspect_range = Some([0.0, 180.0]);
        let back = PipelineConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        let d = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_toml(&d.to_toml().unwrap()).unwrap(), d);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c = PipelineConfig::from_toml("seed = 4\n[mlp]\nhidden = 64\n").unwrap();
        assert_eq!(c.seed, 4);
        assert_eq!(c.mlp.hidden, 64);
        assert_eq!(c.blstm.layer_sizes, vec![512, 256, 128]);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(PipelineConfig::from_toml("sed = 4\n"), Err(Error::Config(_))));
    }

    #[test]
    fn single_class_rejected() {
        let mut c = PipelineConfig::default();
        c.model.class_count = 1;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }
}
