mod common;

use std::f64::consts::PI;

use common::*;
use multiaspect::features::*;
use multiaspect::numkit::{conv2d_same, Grid2D, RealGrid, Rng};
use proptest::prelude::*;

#[test]
fn conv_matches_direct_sum() {
    let mut rng = Rng::new(100);
    for _ in 0..100 {
        let rows = 1 + rng.below(16) as usize;
        let cols = 1 + rng.below(16) as usize;
        let kr = 1 + 2 * rng.below(4) as usize;
        let kc = 1 + 2 * rng.below(4) as usize;
        let img = random_grid(&mut rng, rows, cols);
        let k = random_complex_kernel(&mut rng, kr, kc);
        let fast = conv2d_same(&img, &k).unwrap();
        let slow = naive_conv(&img, &k);
        let err = max_rel_err_complex(fast.data(), &slow);
        assert!(err <= 1e-12, "{rows}x{cols} * {kr}x{kc}: {err}");
    }
}

#[test]
fn conv_8x8_with_5x5() {
    let mut rng = Rng::new(8);
    let img = random_grid(&mut rng, 8, 8);
    let k = random_complex_kernel(&mut rng, 5, 5);
    let err = max_rel_err_complex(conv2d_same(&img, &k).unwrap().data(), &naive_conv(&img, &k));
    assert!(err <= 1e-12);
}

#[test]
fn gabor_kernel_matches_formula() {
    let mut rng = Rng::new(14);
    for _ in 0..50 {
        let p = GaborParams {
            lambda: rng.uniform_range(2.0, 16.0),
            theta: rng.uniform_range(-PI, PI),
            psi: rng.uniform_range(-PI, PI),
            sigma: rng.uniform_range(0.5, 6.0),
            gamma: rng.uniform_range(0.2, 2.0),
            kernel_size: 3 + 2 * rng.below(6) as usize,
        };
        let k = gabor_kernel(&p).unwrap();
        let c = (p.kernel_size / 2) as f64;
        for r in 0..p.kernel_size {
            for col in 0..p.kernel_size {
                let want = gabor_value(
                    col as f64 - c,
                    r as f64 - c,
                    p.lambda,
                    p.theta,
                    p.psi,
                    p.sigma,
                    p.gamma,
                );
                let got = k.at(r, col);
                assert!((got - want).norm() <= 1e-14, "{got} vs {want}");
            }
        }
    }
}

fn rot90(g: &RealGrid) -> RealGrid {
    let n = g.rows();
    assert_eq!(n, g.cols());
    Grid2D::from_fn(n, n, |i, j| g.at(j, n - 1 - i)).unwrap()
}

#[test]
fn gabor_rotation_consistency() {
    // Oblique grating plus a blob so no orientation is trivially zero.
    let n = 41;
    let img = Grid2D::from_fn(n, n, |i, j| {
        let (x, y) = (j as f64, i as f64);
        0.5 + 0.3 * (0.7 * x + 0.3 * y).sin()
            + 0.2 * (-((x - 15.0).powi(2) + (y - 25.0).powi(2)) / 18.0).exp()
    })
    .unwrap();
    let base = GaborParams {
        kernel_size: 13,
        ..GaborParams::with_wavelength(5.0)
    };
    let rotated_then_0 = &gabor_bank_magnitudes(&rot90(&img), &base, &[0.0]).unwrap()[0];
    let half_pi_then_rotated = rot90(&gabor_bank_magnitudes(&img, &base, &[PI / 2.0]).unwrap()[0]);
    let mut max_err: f64 = 0.0;
    for i in 7..n - 7 {
        for j in 7..n - 7 {
            max_err = max_err.max((rotated_then_0.at(i, j) - half_pi_then_rotated.at(i, j)).abs());
        }
    }
    assert!(max_err <= 1e-9, "{max_err}");
}

#[test]
fn tplbp_matches_direct_evaluation() {
    let mut rng = Rng::new(40);
    let img = random_grid(&mut rng, 40, 40);
    let p = TplbpParams {
        radius: 12,
        patches: 8,
        patch_size: 3,
        alpha: 1,
        tau: 0.01,
        block_size: 20,
    };
    let fast = tplbp_encode(&img, &p).unwrap();
    assert_eq!(fast.data(), naive_tplbp(&img, 12, 8, 3, 1, 0.01).as_slice());
}

#[test]
fn tplbp_random_configurations_match() {
    let mut rng = Rng::new(41);
    for _ in 0..30 {
        let patches = 2 + rng.below(9) as usize;
        let patch_size = 1 + 2 * rng.below(3) as usize;
        let radius = patch_size + rng.below(4) as usize;
        let p = TplbpParams {
            radius,
            patches,
            patch_size,
            alpha: 1 + rng.below(patches as u64 - 1) as usize,
            tau: rng.uniform_range(0.0, 0.2),
            block_size: 4,
        };
        let side = p.min_image_side() + rng.below(8) as usize;
        let cols = side + rng.below(5) as usize;
        let img = random_grid(&mut rng, side, cols);
        let fast = tplbp_encode(&img, &p).unwrap();
        let slow = naive_tplbp(&img, p.radius, p.patches, p.patch_size, p.alpha, p.tau);
        assert_eq!(fast.data(), slow.as_slice(), "{p:?}");
    }
}

#[test]
fn tplbp_offset_invariance_exact() {
    // Dyadic intensities make `a + c` and `(a + c) - (b + c)` exact, so the
    // invariance can be asserted bit-for-bit.
    let mut rng = Rng::new(42);
    let p = TplbpParams::default();
    for _ in 0..5 {
        let img = Grid2D::from_fn(40, 40, |_, _| rng.below(256) as f64 / 256.0).unwrap();
        let c = rng.below(64) as f64 / 8.0;
        let shifted = img.map(|v| v + c);
        assert_eq!(
            tplbp_encode(&img, &p).unwrap(),
            tplbp_encode(&shifted, &p).unwrap()
        );
    }
}

#[test]
fn tplbp_offset_invariance_on_magnitudes() {
    let mut rng = Rng::new(43);
    let img = random_grid(&mut rng, 48, 48);
    let mags = gabor_bank_magnitudes(&img, &GaborParams::default(), &[0.0, PI / 3.0]).unwrap();
    let p = TplbpParams::default();
    for m in &mags {
        let shifted = m.map(|v| v + 0.75);
        assert_eq!(tplbp_encode(m, &p).unwrap(), tplbp_encode(&shifted, &p).unwrap());
    }
}

#[test]
fn default_config_extract_dimension() {
    let mut rng = Rng::new(128);
    let img = random_grid(&mut rng, 128, 128);
    let f = extract(&img, &FeatureConfig::default()).unwrap();
    assert_eq!(f.dim(), 75264);
    assert!(f.values.iter().all(|&v| v >= 0.0));
    for block in f.values.chunks(256) {
        assert!((block.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dimension_law(rows in 40usize..=160, cols in 40usize..=160, seed in 0u64..1000) {
        // A small Gabor kernel keeps the property cheap; the length law does
        // not depend on it.
        let cfg = FeatureConfig {
            gabor: GaborParams { kernel_size: 5, ..GaborParams::default() },
            ..FeatureConfig::default()
        };
        let mut rng = Rng::new(seed);
        let img = random_grid(&mut rng, rows, cols);
        let f = extract(&img, &cfg).unwrap();
        prop_assert_eq!(f.dim(), 6 * rows.div_ceil(20) * cols.div_ceil(20) * 256);
        prop_assert_eq!(f.dim(), cfg.dim(rows, cols));
        for block in f.values.chunks(256) {
            let s: f64 = block.iter().sum();
            prop_assert!((s - 1.0).abs() <= 1e-9 || s == 0.0);
        }
    }

    #[test]
    fn codes_in_range(seed in 0u64..1000, patches in 2usize..=10) {
        let mut rng = Rng::new(seed);
        let img = random_grid(&mut rng, 20, 20);
        let p = TplbpParams { radius: 4, patches, patch_size: 3, alpha: 1, tau: 0.0, block_size: 5 };
        let codes = tplbp_encode(&img, &p).unwrap();
        prop_assert!(codes.data().iter().all(|&c| (c as usize) < (1 << patches)));
    }

    #[test]
    fn softmax_sums_to_one_and_shift_invariant(
        v in proptest::collection::vec(-50.0f64..50.0, 1..12),
        c in -100.0f64..100.0,
    ) {
        let p = multiaspect::numkit::softmax(&v).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(p.iter().all(|&x| x > 0.0));
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        let q = multiaspect::numkit::softmax(&shifted).unwrap();
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
