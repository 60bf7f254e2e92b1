use super::image::AspectImage;
use super::sequences::AspectTagged;
use crate::error::{Error, Result};
use crate::numkit::Rng;

/// Replaces `floor(level · N)` distinct pixels with independent uniform
/// `[0, 1]` values. Pixel positions are drawn first, then the values, both
/// from one generator seeded with `seed`.
pub fn contaminate(img: &AspectImage, level: f64, seed: u64) -> Result<AspectImage> {
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::invalid(format!("noise level must be in [0, 1], got {level}")));
    }
    let mut out = img.clone();
    let n = out.pixels.len();
    let count = ((level * n as f64).floor() as usize).min(n);
    if count == 0 {
        return Ok(out);
    }
    let mut rng = Rng::new(seed);
    let picks = rng.sample_indices(n, count);
    let data = out.pixels.data_mut();
    for i in picks {
        data[i] = rng.uniform();
    }
    Ok(out)
}

/// Indices kept by [`subsample_aspects`] for an aspect-ordered sweep.
pub fn subsample_indices(aspects: &[f64], range_deg: (f64, f64), interval_deg: f64) -> Result<Vec<usize>> {
    let (lo, hi) = range_deg;
    if !(lo < hi) {
        return Err(Error::invalid(format!("aspect range needs lo < hi, got {lo}:{hi}")));
    }
    if !(interval_deg > 0.0) {
        return Err(Error::invalid(format!("aspect interval must be > 0, got {interval_deg}")));
    }
    let mut kept = Vec::new();
    let mut last: Option<f64> = None;
    for (i, &a) in aspects.iter().enumerate() {
        if a < lo || a > hi {
            continue;
        }
        if last.map_or(true, |l| a - l >= interval_deg) {
            kept.push(i);
            last = Some(a);
        }
    }
    Ok(kept)
}

/// Keeps images with aspect in `[lo, hi]`, greedily skipping any closer
/// than `interval_deg` to the previously kept one. Order is preserved; the
/// result may be empty.
pub fn subsample_aspects<T: AspectTagged + Clone>(
    seq: &[T],
    range_deg: (f64, f64),
    interval_deg: f64,
) -> Result<Vec<T>> {
    let aspects: Vec<f64> = seq.iter().map(|i| i.aspect_deg()).collect();
    Ok(subsample_indices(&aspects, range_deg, interval_deg)?
        .into_iter()
        .map(|i| seq[i].clone())
        .collect())
}

/// Keeps `floor(fraction · n)` images of each class, chosen uniformly
/// without replacement; survivors stay in input order.
pub fn select_training_fraction<T: AspectTagged>(images: Vec<T>, fraction: f64, seed: u64) -> Result<Vec<T>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("training fraction must be in (0, 1], got {fraction}")));
    }
    if fraction == 1.0 {
        return Ok(images);
    }
    let classes = images.iter().map(|i| i.class_id() + 1).max().unwrap_or(0);
    let mut keep = vec![false; images.len()];
    let mut rng = Rng::new(seed);
    for c in 0..classes {
        let members: Vec<usize> = (0..images.len()).filter(|&i| images[i].class_id() == c).collect();
        let k = (fraction * members.len() as f64).floor() as usize;
        for pick in rng.sample_indices(members.len(), k) {
            keep[members[pick]] = true;
        }
    }
    Ok(images
        .into_iter()
        .zip(keep)
        .filter_map(|(img, k)| k.then_some(img))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{Grid2D, RealGrid};

    fn blank(n: usize) -> AspectImage {
        AspectImage {
            pixels: Grid2D::filled(n, n, 0.25).unwrap(),
            aspect_deg: 0.0,
            depression_deg: 17.0,
            class_id: 0,
            serial: "s".into(),
            source_file: "x.pgm".into(),
        }
    }

    #[test]
    fn level_zero_is_identity() {
        let img = blank(16);
        assert_eq!(contaminate(&img, 0.0, 3).unwrap(), img);
    }

    #[test]
    fn exact_count_at_fifteen_percent() {
        let img = blank(128);
        let noisy = contaminate(&img, 0.15, 9).unwrap();
        let changed = noisy
            .pixels
            .data()
            .iter()
            .zip(img.pixels.data())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(changed, 2457);
    }

    #[test]
    fn full_replacement_mean() {
        let img = AspectImage {
            pixels: RealGrid::zeros(128, 128).unwrap(),
            ..blank(1)
        };
        let noisy = contaminate(&img, 1.0, 4).unwrap();
        let mean = noisy.pixels.data().iter().sum::<f64>() / 16384.0;
        assert!((0.45..=0.55).contains(&mean), "{mean}");
        assert!(noisy.pixels.data().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn level_out_of_range() {
        assert!(contaminate(&blank(4), 1.5, 0).is_err());
        assert!(contaminate(&blank(4), -0.1, 0).is_err());
    }

    #[test]
    fn interval_larger_than_range() {
        let a: Vec<f64> = (0..360).map(|d| d as f64).collect();
        assert!(subsample_indices(&a, (10.0, 40.0), 100.0).unwrap().len() <= 1);
    }

    #[test]
    fn training_fraction_counts() {
        let images: Vec<AspectImage> = (0..232)
            .flat_map(|k| {
                (0..2).map(move |c| AspectImage {
                    class_id: c,
                    aspect_deg: k as f64,
                    ..blank(1)
                })
            })
            .collect();
        for (f, want) in [(1.0, 232), (0.74, 171), (0.24, 55)] {
            let kept = select_training_fraction(images.clone(), f, 5).unwrap();
            for c in 0..2 {
                assert_eq!(kept.iter().filter(|i| i.class_id == c).count(), want);
            }
        }
    }
}
