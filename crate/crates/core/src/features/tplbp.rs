//! Three-patch local binary patterns.
//!
//! Bit `i` of a pixel's code compares two patches on a ring around it: it is
//! set when `d(C_i, C_p) - d(C_{(i+α) mod S}, C_p) >= τ`, with `C_p` the
//! `w×w` patch at the pixel, `C_i` the patch centered on the ring of radius
//! `r` at angle `2πi/S`, and `d` the Euclidean distance between patches.
//! Ring centers are rounded to the nearest pixel. Pixels whose ring patches
//! leave the image are coded 0.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{Grid2D, RealGrid};

pub type CodeGrid = Grid2D<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TplbpParams {
    /// Ring radius, pixels.
    pub radius: usize,
    /// Number of patches on the ring.
    pub patches: usize,
    /// Patch side, pixels; odd.
    pub patch_size: usize,
    /// Index offset between compared ring patches.
    pub alpha: usize,
    /// Comparison threshold.
    pub tau: f64,
    /// Side of the histogram blocks, pixels.
    pub block_size: usize,
}

impl Default for TplbpParams {
    fn default() -> Self {
        TplbpParams {
            radius: 12,
            patches: 8,
            patch_size: 3,
            alpha: 1,
            tau: 0.01,
            block_size: 20,
        }
    }
}

impl TplbpParams {
    pub fn validate(&self) -> Result<()> {
        if self.patches < 2 || self.patches > 16 {
            return Err(Error::invalid(format!(
                "tplbp patch count must be in 2..=16, got {}",
                self.patches
            )));
        }
        if self.alpha == 0 || self.alpha >= self.patches {
            return Err(Error::invalid(format!(
                "tplbp alpha must be in 1..{}, got {}",
                self.patches, self.alpha
            )));
        }
        if self.patch_size % 2 == 0 {
            return Err(Error::invalid(format!(
                "tplbp patch size must be odd, got {}",
                self.patch_size
            )));
        }
        if self.radius < self.patch_size {
            return Err(Error::invalid(format!(
                "tplbp radius {} smaller than patch size {}",
                self.radius, self.patch_size
            )));
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(Error::invalid(format!("tplbp tau must be >= 0, got {}", self.tau)));
        }
        if self.block_size == 0 {
            return Err(Error::invalid("histogram block size must be >= 1"));
        }
        Ok(())
    }

    /// Number of distinct codes, `2^S`.
    pub fn bins(&self) -> usize {
        1 << self.patches
    }

    /// Smallest image side for which at least one pixel gets a full ring.
    pub fn min_image_side(&self) -> usize {
        2 * (self.radius + self.patch_size / 2) + 1
    }

    /// `(row, col)` offsets of the ring patch centers, in bit order.
    pub fn ring_offsets(&self) -> Vec<(isize, isize)> {
        (0..self.patches)
            .map(|i| {
                let angle = 2.0 * PI * i as f64 / self.patches as f64;
                let r = self.radius as f64;
                ((r * angle.sin()).round() as isize, (r * angle.cos()).round() as isize)
            })
            .collect()
    }
}

pub fn tplbp_encode(image: &RealGrid, p: &TplbpParams) -> Result<CodeGrid> {
    p.validate()?;
    let min = p.min_image_side();
    let (rows, cols) = (image.rows(), image.cols());
    if rows < min || cols < min {
        return Err(Error::invalid(format!(
            "image {rows}x{cols} too small for tplbp, need at least {min}x{min}"
        )));
    }
    let offsets = p.ring_offsets();
    let half = (p.patch_size / 2) as isize;
    // Rows/cols for which every ring patch lies inside the image.
    let lo_r = half - offsets.iter().map(|o| o.0).min().unwrap_or(0).min(0);
    let hi_r = rows as isize - half - offsets.iter().map(|o| o.0).max().unwrap_or(0).max(0);
    let lo_c = half - offsets.iter().map(|o| o.1).min().unwrap_or(0).min(0);
    let hi_c = cols as isize - half - offsets.iter().map(|o| o.1).max().unwrap_or(0).max(0);
    let data = image.data();
    let w = p.patch_size as isize;

    // Flat index deltas of the patch pixels relative to a patch center.
    let patch: Vec<isize> = (-half..=half)
        .flat_map(|dr| (-half..=half).map(move |dc| dr * cols as isize + dc))
        .collect();
    debug_assert_eq!(patch.len() as isize, w * w);
    let ring: Vec<isize> = offsets
        .iter()
        .map(|&(dr, dc)| dr * cols as isize + dc)
        .collect();

    let mut codes = vec![0u32; rows * cols];
    let mut dist = vec![0.0; p.patches];
    for row in lo_r..hi_r {
        for col in lo_c..hi_c {
            let center = row * cols as isize + col;
            for (d, &ro) in dist.iter_mut().zip(&ring) {
                let mut acc = 0.0;
                for &po in &patch {
                    let diff = data[(center + ro + po) as usize] - data[(center + po) as usize];
                    acc += diff * diff;
                }
                *d = acc.sqrt();
            }
            let mut code = 0u32;
            for i in 0..p.patches {
                let j = (i + p.alpha) % p.patches;
                if dist[i] - dist[j] >= p.tau {
                    code |= 1 << i;
                }
            }
            codes[center as usize] = code;
        }
    }
    CodeGrid::from_vec(rows, cols, codes)
}
