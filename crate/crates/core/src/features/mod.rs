//! Per-image descriptor: Gabor magnitudes at several orientations, each
//! encoded with three-patch LBP, block-histogrammed and concatenated.

mod gabor;
mod histogram;
mod tplbp;

use serde::{Deserialize, Serialize};

pub use gabor::{gabor_bank_magnitudes, gabor_kernel, default_orientations, GaborParams};
pub use histogram::{block_histograms, blocks_along};
pub use tplbp::{tplbp_encode, CodeGrid, TplbpParams};

use crate::error::{Error, Result};
use crate::numkit::RealGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub gabor: GaborParams,
    /// Orientations of the Gabor bank, radians. Overrides `gabor.theta`.
    pub orientations: Vec<f64>,
    pub tplbp: TplbpParams,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            gabor: GaborParams::default(),
            orientations: default_orientations(),
            tplbp: TplbpParams::default(),
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        self.gabor.validate()?;
        self.tplbp.validate()?;
        if self.orientations.is_empty() {
            return Err(Error::invalid("at least one gabor orientation is required"));
        }
        Ok(())
    }

    /// Descriptor length for a `rows × cols` image:
    /// `orientations · ceil(rows/b) · ceil(cols/b) · 2^S`.
    pub fn dim(&self, rows: usize, cols: usize) -> usize {
        let b = self.tplbp.block_size;
        self.orientations.len() * blocks_along(rows, b) * blocks_along(cols, b) * self.tplbp.bins()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

impl From<Vec<f64>> for FeatureVector {
    fn from(values: Vec<f64>) -> Self {
        FeatureVector { values }
    }
}

/// Gabor magnitude → TPLBP codes → block histograms, for each orientation
/// in order, concatenated.
pub fn extract(image: &RealGrid, cfg: &FeatureConfig) -> Result<FeatureVector> {
    cfg.validate()?;
    let magnitudes = gabor_bank_magnitudes(image, &cfg.gabor, &cfg.orientations)?;
    let mut values = Vec::with_capacity(cfg.dim(image.rows(), image.cols()));
    for m in &magnitudes {
        let codes = tplbp_encode(m, &cfg.tplbp)?;
        values.extend(block_histograms(
            &codes,
            cfg.tplbp.block_size,
            cfg.tplbp.bins(),
        )?);
    }
    Ok(FeatureVector { values })
}
