use multiaspect::dataio::*;
use multiaspect::numkit::{RealGrid, Rng};
use proptest::prelude::*;

fn meta_only(class_id: usize, aspect: f64, tag: usize) -> AspectImage {
    AspectImage {
        pixels: RealGrid::zeros(1, 1).unwrap(),
        aspect_deg: aspect,
        depression_deg: 17.0,
        class_id,
        serial: "m".into(),
        source_file: format!("{tag}.pgm").into(),
    }
}

fn small_spec() -> SynthSpec {
    SynthSpec {
        aspects_per_class: 12,
        passes: 2,
        image_size: 24,
        ..SynthSpec::default()
    }
}

#[test]
fn synth_is_deterministic() {
    let a = synth_generate(&small_spec()).unwrap();
    let b = synth_generate(&small_spec()).unwrap();
    assert_eq!(a, b);
    let c = synth_generate(&SynthSpec { seed: 99, ..small_spec() }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn aspect_independent_scene_is_constant() {
    let spec = SynthSpec {
        class_count: 2,
        speckle: 0.0,
        classes: vec![
            ClassSignature { scatterers: vec![Scatterer::fixed(0.1, 0.0, 0.8)] },
            ClassSignature { scatterers: vec![Scatterer::fixed(-0.1, 0.0, 0.8)] },
        ],
        ..small_spec()
    };
    let images = synth_generate(&spec).unwrap();
    let class0: Vec<_> = images.iter().filter(|i| i.class_id == 0).collect();
    assert!(class0.len() > 1);
    for img in &class0 {
        assert_eq!(img.pixels, class0[0].pixels);
    }
}

#[test]
fn confusable_pair_ambiguous_at_shared_lobe() {
    // Classes 0 and 1 at 120°: only the body and the shared lobe are lit.
    let spec = SynthSpec {
        image_size: 32,
        ..SynthSpec::default()
    };
    let mut rng = Rng::new(5);
    let render = |class: usize, rng: &mut Rng| {
        let mut img = spec.render_clean(class, 120.0);
        img.data_mut()
            .iter_mut()
            .for_each(|v| *v = (*v * (0.7 + 0.3 * rng.exponential())).clamp(0.0, 1.0));
        img
    };
    let train: Vec<(RealGrid, usize)> = (0..40).map(|i| (render(i % 2, &mut rng), i % 2)).collect();
    let mut correct = 0;
    let trials = 200;
    for t in 0..trials {
        let truth = t % 2;
        let probe = render(truth, &mut rng);
        let nearest = train
            .iter()
            .min_by(|a, b| {
                let da: f64 = a.0.data().iter().zip(probe.data()).map(|(x, y)| (x - y).powi(2)).sum();
                let db: f64 = b.0.data().iter().zip(probe.data()).map(|(x, y)| (x - y).powi(2)).sum();
                da.total_cmp(&db)
            })
            .unwrap();
        if nearest.1 == truth {
            correct += 1;
        }
    }
    let acc = correct as f64 / trials as f64;
    assert!(acc <= 0.60, "nearest-neighbour accuracy {acc}");

    // Over a sweep the per-position energy profiles differ.
    let energy = |class: usize| -> Vec<f64> {
        (0..360)
            .flat_map(|a| spec.amplitude_profile(class, a as f64))
            .map(|v| v * v)
            .collect()
    };
    let (e0, e1) = (energy(0), energy(1));
    let dist: f64 = e0.iter().zip(&e1).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!(dist > 0.0);
    assert!(spec.amplitude_profile(0, 30.0)[2] > 0.99);
    assert!(spec.amplitude_profile(1, 30.0)[2] < 1e-6);
}

#[test]
fn four_by_sixty_meta_rows_and_lossless_roundtrip() {
    let spec = SynthSpec {
        passes: 1,
        image_size: 16,
        ..SynthSpec::default()
    };
    let images = synth_generate(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), &images, BitDepth::Sixteen).unwrap();
    let meta = std::fs::read_to_string(dir.path().join(META_FILE)).unwrap();
    assert_eq!(meta.lines().count(), 1 + 240);
    let loaded = load_dataset(dir.path()).unwrap();
    assert_eq!(loaded, images);
}

#[test]
fn mstar_like_group_gives_five_sequences() {
    // 232 images over 45 bins of 8°: every bin holds at least 4, some more.
    let mut rng = Rng::new(232);
    let mut counts = vec![4usize; 45];
    for _ in 0..(232 - 180) {
        counts[rng.below(45) as usize] += 1;
    }
    let mut images = Vec::new();
    for (b, &n) in counts.iter().enumerate() {
        for _ in 0..n {
            let a = 8.0 * b as f64 + rng.uniform_range(0.0, 8.0);
            images.push(meta_only(0, a, images.len()));
        }
    }
    assert_eq!(images.len(), 232);
    let set = build_sequences(images, 4, 8.0).unwrap();
    let seqs = &set.groups[0].sequences;
    assert_eq!(seqs.len(), 5);
    for s in &seqs[..4] {
        assert_eq!(s.len(), 45);
        let aspects: Vec<f64> = s.iter().map(|i| i.aspect_deg).collect();
        assert!(max_wrapped_gap(&aspects) < 16.0);
    }
    assert_eq!(set.image_count(), 232);
}

#[test]
fn synthetic_sweeps_cover_circle() {
    let images = synth_generate(&SynthSpec { image_size: 8, ..SynthSpec::default() }).unwrap();
    let set = build_sequences(images, 4, 6.0).unwrap();
    for g in &set.groups {
        assert_eq!(g.sequences.len(), 4);
        let mut all: Vec<f64> = g.sequences.iter().flatten().map(|i| i.aspect_deg).collect();
        all.sort_by(f64::total_cmp);
        // One representative per duplicate cluster gives the sweep spacing.
        let mut reps: Vec<f64> = Vec::new();
        for &a in &all {
            if reps.last().map_or(true, |&r| (a / 6.0).floor() != (r / 6.0).floor()) {
                reps.push(a);
            }
        }
        let mut gaps: Vec<f64> = reps.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_by(f64::total_cmp);
        let median = gaps[gaps.len() / 2];
        for s in &g.sequences {
            let aspects: Vec<f64> = s.iter().map(|i| i.aspect_deg).collect();
            assert!(aspects.windows(2).all(|w| w[0] <= w[1]));
            assert!(max_wrapped_gap(&aspects) <= 2.0 * median, "{} vs {median}", max_wrapped_gap(&aspects));
        }
    }
}

#[test]
fn limited_aspect_table_counts() {
    let dense: Vec<f64> = (0..360).map(|d| d as f64).collect();
    for interval in [6.0, 9.0] {
        let n = subsample_indices(&dense, (0.0, 360.0), interval).unwrap().len();
        assert!((40..=60).contains(&n), "interval {interval}: {n}");
    }
    for interval in [36.0, 45.0] {
        let n = subsample_indices(&dense, (0.0, 180.0), interval).unwrap().len();
        assert!((4..=6).contains(&n), "interval {interval}: {n}");
    }
    // MSTAR-like spacing (232 images per circle) at a 30° interval.
    let mstar: Vec<f64> = (0..232).map(|k| k as f64 * 360.0 / 232.0).collect();
    let n = subsample_indices(&mstar, (0.0, 180.0), 30.0).unwrap().len();
    assert!((4..=6).contains(&n), "{n}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn build_sequences_partitions(
        aspects in proptest::collection::vec((0usize..3, 0.0f64..360.0), 1..120),
        circles in 1usize..6,
        bin in 1.0f64..20.0,
    ) {
        let images: Vec<AspectImage> = aspects
            .iter()
            .enumerate()
            .map(|(i, &(c, a))| meta_only(c, a, i))
            .collect();
        let set = build_sequences(images.clone(), circles, bin).unwrap();
        let mut out: Vec<String> = set
            .groups
            .iter()
            .flat_map(|g| g.sequences.iter().flatten())
            .map(|i| i.source_file.display().to_string())
            .collect();
        let mut inp: Vec<String> = images.iter().map(|i| i.source_file.display().to_string()).collect();
        out.sort();
        inp.sort();
        prop_assert_eq!(out, inp);
        for g in &set.groups {
            prop_assert!(g.sequences.len() <= circles + 1);
            for s in &g.sequences {
                prop_assert!(!s.is_empty());
                prop_assert!(s.windows(2).all(|w| w[0].aspect_deg <= w[1].aspect_deg));
                prop_assert!(s.iter().all(|i| i.class_id == g.class_id));
            }
        }
    }

    #[test]
    fn contaminate_changes_exact_count(level in 0.0f64..=1.0, seed in 0u64..1000, n in 4usize..40) {
        let img = AspectImage {
            pixels: RealGrid::filled(n, n, -1.0).unwrap(),
            ..meta_only(0, 0.0, 0)
        };
        let a = contaminate(&img, level, seed).unwrap();
        let changed = a.pixels.data().iter().filter(|&&v| v != -1.0).count();
        prop_assert_eq!(changed, (level * (n * n) as f64).floor() as usize);
        prop_assert_eq!(a, contaminate(&img, level, seed).unwrap());
    }

    #[test]
    fn subsample_respects_range_and_interval(
        mut aspects in proptest::collection::vec(0.0f64..360.0, 0..80),
        lo in 0.0f64..300.0,
        span in 1.0f64..200.0,
        interval in 0.5f64..90.0,
    ) {
        aspects.sort_by(f64::total_cmp);
        let hi = lo + span;
        let kept = subsample_indices(&aspects, (lo, hi), interval).unwrap();
        prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        for w in kept.windows(2) {
            prop_assert!(aspects[w[1]] - aspects[w[0]] >= interval);
        }
        for &i in &kept {
            prop_assert!(aspects[i] >= lo && aspects[i] <= hi);
        }
    }

    #[test]
    fn synth_intensities_in_unit_interval(seed in 0u64..500, speckle in 0.0f64..=1.0, clutter in 0.0f64..0.5) {
        let spec = SynthSpec {
            seed,
            speckle,
            clutter,
            aspects_per_class: 3,
            passes: 1,
            image_size: 12,
            ..SynthSpec::default()
        };
        for img in synth_generate(&spec).unwrap() {
            prop_assert!(img.pixels.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }
}
