//! Gabor kernel and six-orientation magnitude bank on a sinusoidal grating.
//! The orientation matched to the grating carries the most energy.

use std::f64::consts::PI;

use multiaspect::features::{gabor_bank_magnitudes, gabor_kernel, default_orientations, GaborParams};
use multiaspect::numkit::Grid2D;

fn main() -> multiaspect::Result<()> {
    let params = GaborParams::default();
    let k = gabor_kernel(&params)?;
    println!("kernel {}x{}, center {:.3}", k.rows(), k.cols(), k.get(k.rows() / 2, k.cols() / 2));

    // Stripes varying along the 60 degree direction.
    let angle = PI / 3.0;
    let img = Grid2D::from_fn(64, 64, |i, j| {
        let t = j as f64 * angle.cos() + i as f64 * angle.sin();
        0.5 + 0.5 * (2.0 * PI * t / params.lambda).cos()
    })?;
    let orientations = default_orientations();
    let mags = gabor_bank_magnitudes(&img, &params, &orientations)?;
    for (theta, m) in orientations.iter().zip(&mags) {
        let mean = m.data().iter().sum::<f64>() / m.len() as f64;
        println!("theta {:>5.1} deg  mean magnitude {mean:8.3}", theta.to_degrees());
    }
    Ok(())
}
