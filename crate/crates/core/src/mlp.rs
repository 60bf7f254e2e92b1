//! Single-hidden-layer perceptron: trained as a softmax classifier, then
//! cut at the hidden layer to act as a dimensionality reducer.
//!
//! `p(y | x) = softmax(b2 + W2 · relu(b1 + W1 · x))`, reduced features are
//! `relu(b1 + W1 · x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{argmax, cross_entropy, relu, softmax, DenseMatrix, Rng};
use crate::tensors::{NamedTensor, NamedTensorMut, TensorSet};

#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    /// First-layer weights stored input-major (`input × hidden`), i.e.
    /// `W1ᵀ`, so a sparse input reads only the rows it touches.
    pub w1t: DenseMatrix,
    pub b1: Vec<f64>,
    pub w2: DenseMatrix,
    pub b2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpHyper {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Training stops once the training-set misclassification rate drops
    /// below this fraction.
    pub stop_error_rate: f64,
    pub seed: u64,
}

impl Default for MlpHyper {
    fn default() -> Self {
        MlpHyper {
            learning_rate: 1e-3,
            batch_size: 32,
            max_epochs: 200,
            stop_error_rate: 0.10,
            seed: 0,
        }
    }
}

impl MlpHyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config(format!(
                "mlp learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(self.stop_error_rate > 0.0 && self.stop_error_rate <= 1.0) {
            return Err(Error::Config(format!(
                "mlp stop error rate must be in (0, 1], got {}",
                self.stop_error_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("mlp batch size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Gradients with the same shapes as [`MlpParams`].
pub type MlpGrads = MlpParams;

impl MlpParams {
    pub fn zeros(input: usize, hidden: usize, classes: usize) -> Self {
        MlpParams {
            w1t: DenseMatrix::zeros(input, hidden),
            b1: vec![0.0; hidden],
            w2: DenseMatrix::zeros(classes, hidden),
            b2: vec![0.0; classes],
        }
    }

    /// Weights uniform in `±sqrt(6 / (fan_in + fan_out))`, biases zero.
    pub fn init(input: usize, hidden: usize, classes: usize, rng: &mut Rng) -> Self {
        let mut p = Self::zeros(input, hidden, classes);
        let a1 = (6.0 / (input + hidden) as f64).sqrt();
        p.w1t.data_mut()
            .iter_mut()
            .for_each(|w| *w = rng.uniform_range(-a1, a1));
        let a2 = (6.0 / (hidden + classes) as f64).sqrt();
        p.w2.data_mut()
            .iter_mut()
            .for_each(|w| *w = rng.uniform_range(-a2, a2));
        p
    }

    pub fn input_dim(&self) -> usize {
        self.w1t.rows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w1t.cols()
    }

    pub fn classes(&self) -> usize {
        self.w2.rows()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::dims("mlp input", self.input_dim(), x.len()));
        }
        Ok(())
    }

    fn hidden_pre(&self, x: &[f64]) -> Vec<f64> {
        let mut pre = self.b1.clone();
        self.w1t.matvec_t_sparse_acc(x, &mut pre);
        pre
    }

    fn logits_from_hidden(&self, h: &[f64]) -> Vec<f64> {
        let mut z = self.b2.clone();
        self.w2.matvec_acc(h, &mut z);
        z
    }

    /// Reduced feature vector `relu(b1 + W1 x)`.
    pub fn reduce(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.hidden_pre(x).into_iter().map(relu).collect())
    }

    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>> {
        let h = self.reduce(x)?;
        Ok(self.logits_from_hidden(&h))
    }

    /// Class probabilities.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        softmax(&self.logits(x)?)
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.logits(x)?))
    }

    /// Mean cross-entropy over `batch`, adding `scale ×` its gradient into `grads`.
    fn accumulate(&self, batch: &[(&[f64], usize)], grads: &mut MlpGrads) -> Result<f64> {
        let n = batch.len() as f64;
        let mut loss = 0.0;
        for &(x, label) in batch {
            self.check_input(x)?;
            let pre = self.hidden_pre(x);
            let h: Vec<f64> = pre.iter().map(|&v| relu(v)).collect();
            let z = self.logits_from_hidden(&h);
            loss += cross_entropy(&z, label)?;
            let mut dz = softmax(&z)?;
            dz[label] -= 1.0;
            dz.iter_mut().for_each(|d| *d /= n);

            grads.w2.add_outer(&dz, &h, 1.0);
            grads.b2.iter_mut().zip(&dz).for_each(|(g, d)| *g += d);
            let mut dh = vec![0.0; h.len()];
            self.w2.matvec_t_acc(&dz, &mut dh);
            for (d, &p) in dh.iter_mut().zip(&pre) {
                if p <= 0.0 {
                    *d = 0.0;
                }
            }
            grads.w1t.add_outer_sparse_rows(x, &dh, 1.0);
            grads.b1.iter_mut().zip(&dh).for_each(|(g, d)| *g += d);
        }
        Ok(loss / n)
    }

    /// Mean cross-entropy loss over `data` and its gradient.
    pub fn loss_and_grad(&self, data: &[(&[f64], usize)]) -> Result<(f64, MlpGrads)> {
        if data.is_empty() {
            return Err(Error::invalid("empty dataset"));
        }
        let mut grads = MlpParams::zeros(self.input_dim(), self.hidden_dim(), self.classes());
        let loss = self.accumulate(data, &mut grads)?;
        Ok((loss, grads))
    }

    pub fn loss(&self, data: &[(&[f64], usize)]) -> Result<f64> {
        let mut total = 0.0;
        for &(x, label) in data {
            total += cross_entropy(&self.logits(x)?, label)?;
        }
        Ok(total / data.len() as f64)
    }

    /// Fraction of `data` misclassified by argmax.
    pub fn error_rate(&self, data: &[(&[f64], usize)]) -> Result<f64> {
        let mut wrong = 0usize;
        for &(x, label) in data {
            if self.predict(x)? != label {
                wrong += 1;
            }
        }
        Ok(wrong as f64 / data.len() as f64)
    }

    /// Mean cross-entropy and error rate in one pass.
    fn loss_and_error(&self, data: &[(&[f64], usize)]) -> Result<(f64, f64)> {
        let (mut total, mut wrong) = (0.0, 0usize);
        for &(x, label) in data {
            let z = self.logits(x)?;
            total += cross_entropy(&z, label)?;
            if argmax(&z) != label {
                wrong += 1;
            }
        }
        let n = data.len() as f64;
        Ok((total / n, wrong as f64 / n))
    }

    fn sgd_step(&mut self, grads: &MlpGrads, lr: f64) {
        for (p, g) in self.tensors_mut().into_iter().zip(grads.tensors()) {
            p.data.iter_mut().zip(g.data).for_each(|(w, d)| *w -= lr * d);
        }
    }

    fn clear(&mut self) {
        for t in self.tensors_mut() {
            t.data.iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

impl TensorSet for MlpParams {
    fn tensors(&self) -> Vec<NamedTensor<'_>> {
        vec![
            NamedTensor::new("mlp.w1t", vec![self.w1t.rows(), self.w1t.cols()], self.w1t.data()),
            NamedTensor::new("mlp.b1", vec![self.b1.len()], &self.b1),
            NamedTensor::new("mlp.w2", vec![self.w2.rows(), self.w2.cols()], self.w2.data()),
            NamedTensor::new("mlp.b2", vec![self.b2.len()], &self.b2),
        ]
    }

    fn tensors_mut(&mut self) -> Vec<NamedTensorMut<'_>> {
        let (r1, c1, r2, c2) = (self.w1t.rows(), self.w1t.cols(), self.w2.rows(), self.w2.cols());
        let (n1, n2) = (self.b1.len(), self.b2.len());
        vec![
            NamedTensorMut::new("mlp.w1t", vec![r1, c1], self.w1t.data_mut()),
            NamedTensorMut::new("mlp.b1", vec![n1], &mut self.b1),
            NamedTensorMut::new("mlp.w2", vec![r2, c2], self.w2.data_mut()),
            NamedTensorMut::new("mlp.b2", vec![n2], &mut self.b2),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpEpoch {
    pub epoch: usize,
    pub loss: f64,
    pub error_rate: f64,
}

#[derive(Debug, Clone)]
pub struct MlpTraining {
    pub params: MlpParams,
    pub log: Vec<MlpEpoch>,
}

/// Minibatch SGD on mean cross-entropy. After every epoch the training
/// error rate is measured; training stops when it falls below
/// `stop_error_rate` or after `max_epochs`.
pub fn mlp_train(
    data: &[(&[f64], usize)],
    hidden: usize,
    classes: usize,
    hyper: &MlpHyper,
) -> Result<MlpTraining> {
    hyper.validate()?;
    let input = check_dataset(data, classes)?;
    let mut rng = Rng::new(hyper.seed);
    let params = MlpParams::init(input, hidden, classes, &mut rng);
    mlp_train_from(params, data, hyper, &mut rng)
}

/// Same as [`mlp_train`] but starting from the given parameters.
pub fn mlp_train_from(
    mut params: MlpParams,
    data: &[(&[f64], usize)],
    hyper: &MlpHyper,
    rng: &mut Rng,
) -> Result<MlpTraining> {
    hyper.validate()?;
    check_dataset(data, params.classes())?;
    let mut grads = MlpParams::zeros(params.input_dim(), params.hidden_dim(), params.classes());
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut log = Vec::new();
    let mut batch: Vec<(&[f64], usize)> = Vec::with_capacity(hyper.batch_size);
    for epoch in 1..=hyper.max_epochs {
        rng.shuffle(&mut order);
        for (b, chunk) in order.chunks(hyper.batch_size).enumerate() {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| data[i]));
            grads.clear();
            let loss = params.accumulate(&batch, &mut grads)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "mlp loss at epoch {epoch}, batch {b}"
                )));
            }
            params.sgd_step(&grads, hyper.learning_rate);
        }
        let (loss, error_rate) = params.loss_and_error(data)?;
        log.push(MlpEpoch {
            epoch,
            loss,
            error_rate,
        });
        if error_rate < hyper.stop_error_rate {
            break;
        }
    }
    Ok(MlpTraining { params, log })
}

fn check_dataset(data: &[(&[f64], usize)], classes: usize) -> Result<usize> {
    let Some(first) = data.first() else {
        return Err(Error::invalid("empty training set"));
    };
    let input = first.0.len();
    let mut seen = vec![false; classes];
    for (i, &(x, label)) in data.iter().enumerate() {
        if x.len() != input {
            return Err(Error::dims(format!("sample {i}"), input, x.len()));
        }
        if label >= classes {
            return Err(Error::invalid(format!(
                "sample {i} has label {label}, expected < {classes}"
            )));
        }
        seen[label] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::invalid(format!("no training sample for class {missing}")));
    }
    Ok(input)
}
