use std::thread;

use super::bundle::{FeatureRecord, ModelBundle};
use super::config::{ExperimentConfig, PipelineConfig};
use super::report::EvalReport;
use crate::blstm::{self, classify, AspectSequence, BlstmEpoch, BlstmModel};
use crate::dataio::{build_sequences, contaminate, select_training_fraction, subsample_aspects, AspectImage};
use crate::error::{Error, Result};
use crate::features::{extract, FeatureConfig};
use crate::mlp::{mlp_train, MlpParams};
use crate::numkit::Rng;

/// Splits `0..n` into contiguous chunks and runs `f` on each in its own
/// thread. Results come back in index order.
fn parallel_map<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let workers = thread::available_parallelism().map_or(1, |p| p.get()).min(n.max(1));
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(workers);
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                s.spawn(move || (w * chunk..((w + 1) * chunk).min(n)).map(f).collect::<Result<Vec<T>>>())
            })
            .collect();
        let mut out = Vec::with_capacity(n);
        for h in handles {
            out.extend(h.join().expect("extraction worker panicked")?);
        }
        Ok(out)
    })
}

/// Descriptors for every image, rounded to stored (32-bit) precision so
/// that training from images and from an archive see the same numbers.
pub fn extract_records(images: &[AspectImage], cfg: &FeatureConfig) -> Result<Vec<FeatureRecord>> {
    cfg.validate()?;
    parallel_map(images.len(), |i| {
        let img = &images[i];
        let f = extract(&img.pixels, cfg).map_err(|e| Error::Image {
            path: img.source_file.clone(),
            message: e.to_string(),
        })?;
        Ok(FeatureRecord {
            source_file: img.source_file.clone(),
            class_id: img.class_id,
            serial: img.serial.clone(),
            depression_deg: img.depression_deg,
            aspect_deg: img.aspect_deg,
            values: f.values.into_iter().map(|v| v as f32 as f64).collect(),
        })
    })
}

/// Progress events emitted while training.
pub enum TrainEvent<'a> {
    Mlp { epoch: usize, loss: f64, error_rate: f64 },
    Blstm(&'a BlstmEpoch),
    Info(String),
}

impl TrainEvent<'_> {
    pub fn line(&self) -> String {
        match self {
            TrainEvent::Mlp { epoch, loss, error_rate } => {
                format!("mlp epoch={epoch} loss={loss:.6} error_rate={error_rate:.4}")
            }
            TrainEvent::Blstm(e) => {
                format!("blstm epoch={} loss={:.6} accuracy={:.4}", e.epoch, e.loss, e.accuracy)
            }
            TrainEvent::Info(s) => s.clone(),
        }
    }
}

fn reduced(mlp: &MlpParams, id: String, class_id: usize, seq: &[FeatureRecord]) -> Result<AspectSequence> {
    let steps = seq.iter().map(|r| mlp.reduce(&r.values)).collect::<Result<Vec<_>>>()?;
    let aspects = seq.iter().map(|r| r.aspect_deg).collect();
    Ok(AspectSequence::uniform(id, class_id, steps, aspects))
}

/// Training sweeps, each followed by its random aspect-limited variants.
/// The flag marks full sweeps.
fn training_sequences(
    mlp: &MlpParams,
    records: Vec<FeatureRecord>,
    cfg: &PipelineConfig,
) -> Result<Vec<(AspectSequence, bool)>> {
    let sc = &cfg.sequences;
    let set = build_sequences(records, sc.circles, sc.bin_deg)?;
    let mut rng = Rng::derive(cfg.seed, 3);
    let mut out = Vec::new();
    for (id, g, seq) in set.iter() {
        out.push((reduced(mlp, id.clone(), g.class_id, seq)?, true));
        for v in 0..sc.train_variants {
            let span = rng.uniform_range(sc.variant_min_range_deg, 360.0);
            let lo = rng.uniform_range(0.0, 360.0 - span);
            let interval = rng.uniform_range(0.0, sc.variant_max_interval_deg).max(f64::MIN_POSITIVE);
            let kept = subsample_aspects(seq, (lo, lo + span), interval)?;
            if kept.len() >= 2 {
                out.push((reduced(mlp, format!("{id}-v{v}"), g.class_id, &kept)?, false));
            }
        }
    }
    Ok(out)
}

/// A trained model with its fit on the training data.
#[derive(Debug, Clone)]
pub struct TrainedPipeline {
    pub bundle: ModelBundle,
    /// Fraction of correct per-step decisions over the full training
    /// sweeps (augmentation variants excluded).
    pub sweep_accuracy: f64,
}

/// Trains the reducer on single images, then the sequence classifier on
/// reduced sweeps. The returned config records the data's shape.
pub fn train_pipeline(
    records: Vec<FeatureRecord>,
    config: &PipelineConfig,
    mut on_event: impl FnMut(TrainEvent),
) -> Result<TrainedPipeline> {
    let Some(first) = records.first() else {
        return Err(Error::Config("no training images".into()));
    };
    let mut config = config.clone();
    config.model.feature_dim = first.values.len();
    config.model.class_count = records.iter().map(|r| r.class_id + 1).max().unwrap_or(0);
    config.validate()?;
    let records = select_training_fraction(records, config.experiment.train_fraction, config.seed)
        .map_err(|e| e.in_stage("sampling"))?;
    let classes = config.model.class_count;
    on_event(TrainEvent::Info(format!(
        "training on {} images, {classes} classes, feature dim {}",
        records.len(),
        config.model.feature_dim
    )));

    let data: Vec<(&[f64], usize)> = records.iter().map(|r| (&r.values[..], r.class_id)).collect();
    let mlp = mlp_train(&data, config.mlp.hidden, classes, &config.mlp.hyper).map_err(|e| e.in_stage("mlp"))?;
    for e in &mlp.log {
        on_event(TrainEvent::Mlp {
            epoch: e.epoch,
            loss: e.loss,
            error_rate: e.error_rate,
        });
    }
    let mlp = mlp.params;

    let tagged = training_sequences(&mlp, records, &config).map_err(|e| e.in_stage("sequences"))?;
    let (seqs, full): (Vec<AspectSequence>, Vec<bool>) = tagged.into_iter().unzip();
    on_event(TrainEvent::Info(format!("built {} sequences", seqs.len())));
    let mut rng = Rng::derive(config.seed, 2);
    let model = BlstmModel::init(config.mlp.hidden, &config.blstm.layer_sizes, classes, &mut rng)
        .map_err(|e| e.in_stage("blstm"))?;
    let trained = blstm::train_with(model, &seqs, &config.blstm.hyper, |e| on_event(TrainEvent::Blstm(e)))
        .map_err(|e| e.in_stage("blstm"))?;
    let (mut hits, mut steps) = (0usize, 0usize);
    for (s, _) in seqs.iter().zip(&full).filter(|(_, f)| **f) {
        let c = classify(&trained.model, s)?;
        hits += c.decisions.iter().filter(|&&d| d == s.class_id).count();
        steps += c.decisions.len();
    }
    let sweep_accuracy = hits as f64 / steps.max(1) as f64;
    on_event(TrainEvent::Info(format!("train sweep_accuracy={sweep_accuracy:.4}")));
    Ok(TrainedPipeline {
        bundle: ModelBundle {
            config,
            mlp,
            blstm: trained.model,
        },
        sweep_accuracy,
    })
}

/// Test images with the experiment's noise applied. Image `i` uses its own
/// stream derived from `seed`, so results do not depend on image order.
pub fn apply_noise(images: Vec<AspectImage>, level: f64, seed: u64) -> Result<Vec<AspectImage>> {
    if level == 0.0 {
        return Ok(images);
    }
    images
        .iter()
        .enumerate()
        .map(|(i, img)| contaminate(img, level, Rng::derive(seed, 1_000_000 + i as u64).next_u64()))
        .collect()
}

/// Per-step decisions over test sweeps, optionally subsampled in aspect,
/// plus the single-image baseline on the same images.
pub fn evaluate_records(
    bundle: &ModelBundle,
    records: Vec<FeatureRecord>,
    exp: &ExperimentConfig,
) -> Result<EvalReport> {
    exp.validate()?;
    let classes = bundle.config.model.class_count;
    let mut report = EvalReport::new(classes);
    report.noise = exp.noise;
    report.aspect_range = exp.aspect_range.map(|[lo, hi]| (lo, hi));
    report.aspect_interval = exp.aspect_interval;
    report.train_fraction = bundle.config.experiment.train_fraction;
    if records.is_empty() {
        return Ok(report);
    }
    for r in &records {
        if r.values.len() != bundle.config.model.feature_dim {
            return Err(Error::dims(
                format!("features of {}", r.source_file.display()),
                bundle.config.model.feature_dim,
                r.values.len(),
            ));
        }
        if r.class_id >= classes {
            return Err(Error::invalid(format!(
                "{} has class {} but the model knows {classes} classes",
                r.source_file.display(),
                r.class_id
            )));
        }
    }
    let cfg = &bundle.config;
    let set = build_sequences(records, cfg.sequences.circles, cfg.sequences.bin_deg)?;
    for (id, g, seq) in set.iter() {
        let kept = match exp.subsampling() {
            Some((range, interval)) => subsample_aspects(seq, range, interval)?,
            None => seq.clone(),
        };
        if kept.is_empty() {
            continue;
        }
        let s = reduced(&bundle.mlp, id, g.class_id, &kept)?;
        let c = classify(&bundle.blstm, &s)?;
        for &d in &c.decisions {
            report.confusion[g.class_id][d] += 1;
        }
        for r in &kept {
            report.baseline_confusion[g.class_id][bundle.mlp.predict(&r.values)?] += 1;
        }
        report.sequences += 1;
    }
    Ok(report)
}

/// Noise, extraction and [`evaluate_records`] in one call.
pub fn evaluate_images(bundle: &ModelBundle, images: Vec<AspectImage>, exp: &ExperimentConfig) -> Result<EvalReport> {
    exp.validate()?;
    let images = apply_noise(images, exp.noise, bundle.config.seed)?;
    let records = extract_records(&images, &bundle.config.features)?;
    evaluate_records(bundle, records, exp)
}
