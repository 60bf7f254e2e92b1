use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{conv2d_same, Complex64, ComplexGrid, RealGrid};

/// Parameters of one complex Gabor kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaborParams {
    /// Wavelength of the carrier, pixels.
    pub lambda: f64,
    /// Orientation, radians.
    pub theta: f64,
    /// Phase offset, radians.
    pub psi: f64,
    /// Standard deviation of the Gaussian envelope, pixels.
    pub sigma: f64,
    /// Spatial aspect ratio of the envelope.
    pub gamma: f64,
    /// Side length of the sampled kernel; odd.
    pub kernel_size: usize,
}

impl GaborParams {
    /// Single-scale bank member with `σ = 0.56 λ`, `γ = 0.5`, `ψ = 0` and a
    /// kernel wide enough to hold ±3σ.
    pub fn with_wavelength(lambda: f64) -> Self {
        let sigma = 0.56 * lambda;
        GaborParams {
            lambda,
            theta: 0.0,
            psi: 0.0,
            sigma,
            gamma: 0.5,
            kernel_size: 2 * (3.0 * sigma).ceil() as usize + 1,
        }
    }

    pub fn rotated(self, theta: f64) -> Self {
        GaborParams { theta, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("gabor {name} must be positive, got {v}")))
            }
        };
        positive("lambda", self.lambda)?;
        positive("sigma", self.sigma)?;
        positive("gamma", self.gamma)?;
        if !self.theta.is_finite() || !self.psi.is_finite() {
            return Err(Error::invalid("gabor theta and psi must be finite"));
        }
        if self.kernel_size < 3 || self.kernel_size % 2 == 0 {
            return Err(Error::invalid(format!(
                "gabor kernel size must be odd and >= 3, got {}",
                self.kernel_size
            )));
        }
        Ok(())
    }
}

impl Default for GaborParams {
    fn default() -> Self {
        GaborParams::with_wavelength(8.0)
    }
}

/// Samples the complex Gabor kernel on a `kernel_size²` grid centered at the
/// middle pixel. `x` runs along columns and `y` along rows.
pub fn gabor_kernel(p: &GaborParams) -> Result<ComplexGrid> {
    p.validate()?;
    let half = (p.kernel_size / 2) as isize;
    let (sin_t, cos_t) = p.theta.sin_cos();
    let two_sigma_sq = 2.0 * p.sigma * p.sigma;
    let gamma_sq = p.gamma * p.gamma;
    ComplexGrid::from_fn(p.kernel_size, p.kernel_size, |row, col| {
        let x = (col as isize - half) as f64;
        let y = (row as isize - half) as f64;
        let xr = x * cos_t + y * sin_t;
        let yr = -x * sin_t + y * cos_t;
        let envelope = (-(xr * xr + gamma_sq * yr * yr) / two_sigma_sq).exp();
        let phase = 2.0 * PI * xr / p.lambda + p.psi;
        Complex64::from_polar(envelope, phase)
    })
}

/// Magnitude of the Gabor response for each orientation, same size as the input.
pub fn gabor_bank_magnitudes(
    image: &RealGrid,
    base: &GaborParams,
    orientations: &[f64],
) -> Result<Vec<RealGrid>> {
    if orientations.is_empty() {
        return Err(Error::invalid("gabor bank needs at least one orientation"));
    }
    orientations
        .iter()
        .map(|&theta| {
            let kernel = gabor_kernel(&base.rotated(theta))?;
            let response = conv2d_same(image, &kernel)?;
            Ok(response.map(|z| z.norm()))
        })
        .collect()
}

/// The six orientations `k π / 6`, `k = 0..6`.
pub fn default_orientations() -> Vec<f64> {
    (0..6).map(|k| k as f64 * PI / 6.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Rng;

    #[test]
    fn default_kernel_size() {
        let p = GaborParams::default();
        assert_eq!(p.sigma, 0.56 * 8.0);
        // 3σ = 13.44 → ceil 14 → 29
        assert_eq!(p.kernel_size, 29);
    }

    #[test]
    fn center_is_one() {
        let p = GaborParams {
            kernel_size: 7,
            ..GaborParams::default()
        };
        let k = gabor_kernel(&p.rotated(1.1)).unwrap();
        assert_eq!(k.at(3, 3), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn real_part_point_symmetric_when_psi_zero() {
        let mut rng = Rng::new(2);
        for _ in 0..10 {
            let p = GaborParams {
                lambda: rng.uniform_range(2.0, 12.0),
                theta: rng.uniform_range(0.0, PI),
                psi: 0.0,
                sigma: rng.uniform_range(1.0, 5.0),
                gamma: rng.uniform_range(0.2, 1.5),
                kernel_size: 9,
            };
            let k = gabor_kernel(&p).unwrap();
            for r in 0..9 {
                for c in 0..9 {
                    let a = k.at(r, c);
                    let b = k.at(8 - r, 8 - c);
                    assert!((a.re - b.re).abs() < 1e-15);
                    assert!((a.im + b.im).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn theta_pi_is_conjugate_of_theta_zero() {
        let p = GaborParams {
            kernel_size: 11,
            ..GaborParams::default()
        };
        let k0 = gabor_kernel(&p).unwrap();
        let kpi = gabor_kernel(&p.rotated(PI)).unwrap();
        for (a, b) in k0.data().iter().zip(kpi.data()) {
            assert!((a.re - b.re).abs() < 1e-12 && (a.im + b.im).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = GaborParams::default();
        p.kernel_size = 4;
        assert!(gabor_kernel(&p).is_err());
        p.kernel_size = 5;
        p.sigma = 0.0;
        assert!(gabor_kernel(&p).is_err());
    }

    #[test]
    fn bank_shapes_and_zero_image() {
        let img = RealGrid::zeros(128, 128).unwrap();
        let mags = gabor_bank_magnitudes(&img, &GaborParams::default(), &default_orientations())
            .unwrap();
        assert_eq!(mags.len(), 6);
        for m in &mags {
            assert_eq!((m.rows(), m.cols()), (128, 128));
            assert!(m.data().iter().all(|&v| v == 0.0));
        }
        assert!(gabor_bank_magnitudes(&img, &GaborParams::default(), &[]).is_err());
    }
}
