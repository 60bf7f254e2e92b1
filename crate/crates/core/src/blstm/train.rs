use serde::{Deserialize, Serialize};

use super::model::{bptt_accumulate, classify, sequence_loss, AspectSequence, BlstmModel};
use crate::error::{Error, Result};
use crate::numkit::Rng;
use crate::tensors::TensorSet;

mod zero_is_none {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(v.unwrap_or(0.0))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let v = f64::deserialize(d)?;
        Ok((v != 0.0).then_some(v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlstmHyper {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Global gradient-norm cap; `None` disables clipping. Stored as `0`
    /// when disabled.
    #[serde(with = "zero_is_none")]
    pub clip_norm: Option<f64>,
    /// Stop once per-step training accuracy reaches this fraction.
    pub target_accuracy: Option<f64>,
    /// Stop after this many epochs without a loss improvement.
    pub plateau_patience: Option<usize>,
    pub shuffle: bool,
    pub seed: u64,
}

impl Default for BlstmHyper {
    fn default() -> Self {
        BlstmHyper {
            learning_rate: 1e-7,
            max_epochs: 3000,
            clip_norm: Some(5.0),
            target_accuracy: None,
            plateau_patience: None,
            shuffle: true,
            seed: 0,
        }
    }
}

impl BlstmHyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "blstm learning rate must be finite and >= 0, got {}",
                self.learning_rate
            )));
        }
        if let Some(c) = self.clip_norm {
            if !(c > 0.0) {
                return Err(Error::Config(format!("clip norm must be > 0, got {c}")));
            }
        }
        if let Some(a) = self.target_accuracy {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Config(format!("target accuracy must be in [0, 1], got {a}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlstmEpoch {
    pub epoch: usize,
    /// Mean over sequences of the per-sequence mean step loss, after the epoch.
    pub loss: f64,
    /// Fraction of correctly classified steps over the training set.
    pub accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct BlstmTraining {
    pub model: BlstmModel,
    pub log: Vec<BlstmEpoch>,
}

/// Correct and total per-step decisions over a set of sequences.
pub fn step_accuracy(m: &BlstmModel, data: &[AspectSequence]) -> Result<(usize, usize)> {
    let mut correct = 0;
    let mut total = 0;
    for seq in data {
        let c = classify(m, seq)?;
        correct += c.decisions.iter().zip(&seq.labels).filter(|(d, l)| d == l).count();
        total += seq.len();
    }
    Ok((correct, total))
}

fn evaluate(m: &BlstmModel, data: &[AspectSequence]) -> Result<(f64, f64)> {
    let mut loss = 0.0;
    for seq in data {
        loss += sequence_loss(m, seq)?;
    }
    let (correct, total) = step_accuracy(m, data)?;
    Ok((loss / data.len() as f64, correct as f64 / total as f64))
}

/// SGD with one sequence per update and optional global-norm clipping.
/// `on_epoch` sees each log entry as it is produced.
pub fn train_with(
    mut model: BlstmModel,
    data: &[AspectSequence],
    hyper: &BlstmHyper,
    mut on_epoch: impl FnMut(&BlstmEpoch),
) -> Result<BlstmTraining> {
    hyper.validate()?;
    if data.is_empty() {
        return Err(Error::invalid("no training sequences"));
    }
    for seq in data {
        seq.validate(model.input_dim())?;
        if let Some(&bad) = seq.labels.iter().find(|&&l| l >= model.classes()) {
            return Err(Error::invalid(format!(
                "sequence {} has label {bad}, model has {} classes",
                seq.target_id,
                model.classes()
            )));
        }
    }
    let mut rng = Rng::new(hyper.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut grads = model.zeros_like();
    let mut log: Vec<BlstmEpoch> = Vec::new();
    let mut best = f64::INFINITY;
    let mut since_best = 0usize;
    for epoch in 1..=hyper.max_epochs {
        if hyper.shuffle {
            rng.shuffle(&mut order);
        }
        for &i in &order {
            for t in grads.tensors_mut() {
                t.data.iter_mut().for_each(|v| *v = 0.0);
            }
            let loss = bptt_accumulate(&model, &data[i], &mut grads)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "blstm loss at epoch {epoch}, sequence {}",
                    data[i].target_id
                )));
            }
            let mut scale = hyper.learning_rate;
            if let Some(cap) = hyper.clip_norm {
                let norm = grads.squared_norm().sqrt();
                if norm > cap {
                    scale *= cap / norm;
                }
            }
            if scale == 0.0 {
                continue;
            }
            for (p, g) in model.tensors_mut().into_iter().zip(grads.tensors()) {
                p.data.iter_mut().zip(g.data).for_each(|(w, d)| *w -= scale * d);
            }
        }
        let (loss, accuracy) = evaluate(&model, data)?;
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!("blstm loss after epoch {epoch}")));
        }
        let entry = BlstmEpoch {
            epoch,
            loss,
            accuracy,
        };
        on_epoch(&entry);
        log.push(entry);
        if hyper.target_accuracy.is_some_and(|a| accuracy >= a) {
            break;
        }
        if loss < best - 1e-12 {
            best = loss;
            since_best = 0;
        } else {
            since_best += 1;
            if hyper.plateau_patience.is_some_and(|p| since_best >= p) {
                break;
            }
        }
    }
    Ok(BlstmTraining { model, log })
}

pub fn train(model: BlstmModel, data: &[AspectSequence], hyper: &BlstmHyper) -> Result<BlstmTraining> {
    train_with(model, data, hyper, |_| {})
}
