use super::cell::{backprop_direction, run_direction, LstmLayerParams, StepCache, GATE_NAMES};
use crate::error::{Error, Result};
use crate::numkit::{argmax, cross_entropy, softmax, DenseMatrix, Rng};
use crate::tensors::{NamedTensor, NamedTensorMut, TensorSet};

/// Ordered reduced feature vectors of one target sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct AspectSequence {
    pub steps: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    /// Aspect angle of each step, degrees.
    pub aspects: Vec<f64>,
    pub target_id: String,
    pub class_id: usize,
}

impl AspectSequence {
    /// Sequence whose every step carries `class_id`.
    pub fn uniform(
        target_id: impl Into<String>,
        class_id: usize,
        steps: Vec<Vec<f64>>,
        aspects: Vec<f64>,
    ) -> Self {
        AspectSequence {
            labels: vec![class_id; steps.len()],
            steps,
            aspects,
            target_id: target_id.into(),
            class_id,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::invalid(format!("sequence {} is empty", self.target_id)));
        }
        if self.labels.len() != self.steps.len() {
            return Err(Error::dims(
                format!("labels of sequence {}", self.target_id),
                self.steps.len(),
                self.labels.len(),
            ));
        }
        for (t, s) in self.steps.iter().enumerate() {
            if s.len() != dim {
                return Err(Error::dims(
                    format!("sequence {} step {t}", self.target_id),
                    dim,
                    s.len(),
                ));
            }
        }
        Ok(())
    }
}

/// Stacked bidirectional LSTM with a summed two-direction output projection.
#[derive(Debug, Clone, PartialEq)]
pub struct BlstmModel {
    /// `(forward, backward)` parameters per layer, bottom first.
    pub layers: Vec<(LstmLayerParams, LstmLayerParams)>,
    pub w_fw: DenseMatrix,
    pub w_bw: DenseMatrix,
    pub b_y: Vec<f64>,
}

/// Gradients share the model's layout.
pub type BlstmGrads = BlstmModel;

impl BlstmModel {
    /// `sizes` are per-direction hidden sizes; layer `l > 0` sees `2 · sizes[l-1]` inputs.
    pub fn zeros(input: usize, sizes: &[usize], classes: usize) -> Result<Self> {
        Self::build(input, sizes, classes, |i, h| LstmLayerParams::zeros(i, h))
    }

    pub fn init(input: usize, sizes: &[usize], classes: usize, rng: &mut Rng) -> Result<Self> {
        let mut m = Self::build(input, sizes, classes, |i, h| LstmLayerParams::init(i, h, rng))?;
        let last = *sizes.last().expect("checked in build");
        let a = (6.0 / (2 * last + classes) as f64).sqrt();
        for w in [&mut m.w_fw, &mut m.w_bw] {
            w.data_mut().iter_mut().for_each(|v| *v = rng.uniform_range(-a, a));
        }
        Ok(m)
    }

    fn build(
        input: usize,
        sizes: &[usize],
        classes: usize,
        mut layer: impl FnMut(usize, usize) -> LstmLayerParams,
    ) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Config(format!("invalid blstm layer sizes {sizes:?}")));
        }
        if input == 0 || classes < 2 {
            return Err(Error::Config(format!(
                "blstm needs input >= 1 and classes >= 2, got {input} and {classes}"
            )));
        }
        let mut layers = Vec::with_capacity(sizes.len());
        let mut fan_in = input;
        for &h in sizes {
            let fw = layer(fan_in, h);
            let bw = layer(fan_in, h);
            layers.push((fw, bw));
            fan_in = 2 * h;
        }
        let last = *sizes.last().unwrap();
        Ok(BlstmModel {
            layers,
            w_fw: DenseMatrix::zeros(classes, last),
            w_bw: DenseMatrix::zeros(classes, last),
            b_y: vec![0.0; classes],
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].0.input_dim()
    }

    pub fn classes(&self) -> usize {
        self.b_y.len()
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(|(fw, _)| fw.hidden_dim()).collect()
    }

    /// Zero-valued copy with the same shapes.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for t in z.tensors_mut() {
            t.data.iter_mut().for_each(|v| *v = 0.0);
        }
        z
    }

    fn forward_cached(&self, seq: &AspectSequence) -> Result<ForwardCache> {
        let mut layers = Vec::with_capacity(self.layers.len());
        let mut xs = seq.steps.clone();
        for (l, (fw, bw)) in self.layers.iter().enumerate() {
            if let Some(bad) = xs.iter().find(|x| x.len() != fw.input_dim()) {
                return Err(Error::dims(format!("blstm layer {l} input"), fw.input_dim(), bad.len()));
            }
            let f = run_direction(fw, &xs, false);
            let b = run_direction(bw, &xs, true);
            let next = f.iter().zip(&b).map(|(a, c)| concat(&a.out, &c.out)).collect();
            layers.push(LayerCache { inputs: xs, fw: f, bw: b });
            xs = next;
        }
        let top = layers.last().expect("at least one layer");
        let logits = top
            .fw
            .iter()
            .zip(&top.bw)
            .map(|(f, b)| {
                let mut y = self.b_y.clone();
                self.w_fw.matvec_acc(&f.out, &mut y);
                self.w_bw.matvec_acc(&b.out, &mut y);
                y
            })
            .collect();
        Ok(ForwardCache { layers, logits })
    }
}

struct LayerCache {
    inputs: Vec<Vec<f64>>,
    fw: Vec<StepCache>,
    bw: Vec<StepCache>,
}

struct ForwardCache {
    layers: Vec<LayerCache>,
    logits: Vec<Vec<f64>>,
}

fn concat(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v
}

fn check_sequence(seq: &AspectSequence) -> Result<()> {
    if seq.steps.is_empty() {
        return Err(Error::invalid(format!("sequence {} is empty", seq.target_id)));
    }
    Ok(())
}

/// One bidirectional layer from zero states at both ends; per step the
/// output is `[forward O_n ; backward O_n]`.
pub fn blstm_layer(
    fw: &LstmLayerParams,
    bw: &LstmLayerParams,
    seq: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    if seq.is_empty() {
        return Err(Error::invalid("empty sequence"));
    }
    if fw.input_dim() != bw.input_dim() {
        return Err(Error::dims("backward layer input", fw.input_dim(), bw.input_dim()));
    }
    if let Some(bad) = seq.iter().find(|x| x.len() != fw.input_dim()) {
        return Err(Error::dims("blstm layer input", fw.input_dim(), bad.len()));
    }
    let f = run_direction(fw, seq, false);
    let b = run_direction(bw, seq, true);
    Ok(f.iter().zip(&b).map(|(a, c)| concat(&a.out, &c.out)).collect())
}

/// Per-step logits `y_n = W_fw O→_n + W_bw O←_n + b_y` of the top layer.
pub fn stack_forward(m: &BlstmModel, seq: &AspectSequence) -> Result<Vec<Vec<f64>>> {
    check_sequence(seq)?;
    Ok(m.forward_cached(seq)?.logits)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub probabilities: Vec<Vec<f64>>,
    pub decisions: Vec<usize>,
}

/// Independent softmax decision at every step; no voting across steps.
pub fn classify(m: &BlstmModel, seq: &AspectSequence) -> Result<Classification> {
    let logits = stack_forward(m, seq)?;
    let probabilities = logits.iter().map(|y| softmax(y)).collect::<Result<Vec<_>>>()?;
    let decisions = logits.iter().map(|y| argmax(y)).collect();
    Ok(Classification {
        probabilities,
        decisions,
    })
}

/// Mean per-step cross-entropy and its gradient for every model tensor.
pub fn bptt_grad(m: &BlstmModel, seq: &AspectSequence) -> Result<(f64, BlstmGrads)> {
    let mut grads = m.zeros_like();
    let loss = bptt_accumulate(m, seq, &mut grads)?;
    Ok((loss, grads))
}

/// As [`bptt_grad`] but adds into an existing gradient bundle.
pub fn bptt_accumulate(m: &BlstmModel, seq: &AspectSequence, grads: &mut BlstmGrads) -> Result<f64> {
    check_sequence(seq)?;
    if seq.labels.len() != seq.steps.len() {
        return Err(Error::dims(
            format!("labels of sequence {}", seq.target_id),
            seq.steps.len(),
            seq.labels.len(),
        ));
    }
    let cache = m.forward_cached(seq)?;
    let n = seq.len() as f64;
    let top = cache.layers.last().unwrap();
    let hidden = m.w_fw.cols();
    let mut loss = 0.0;
    let mut d_fw = vec![vec![0.0; hidden]; seq.len()];
    let mut d_bw = vec![vec![0.0; hidden]; seq.len()];
    for (t, y) in cache.logits.iter().enumerate() {
        let step_loss = cross_entropy(y, seq.labels[t])?;
        if !step_loss.is_finite() {
            return Err(Error::NonFinite(format!(
                "loss at step {t} of sequence {}",
                seq.target_id
            )));
        }
        loss += step_loss;
        let mut dy = softmax(y)?;
        dy[seq.labels[t]] -= 1.0;
        dy.iter_mut().for_each(|d| *d /= n);
        grads.w_fw.add_outer(&dy, &top.fw[t].out, 1.0);
        grads.w_bw.add_outer(&dy, &top.bw[t].out, 1.0);
        grads.b_y.iter_mut().zip(&dy).for_each(|(g, d)| *g += d);
        m.w_fw.matvec_t_acc(&dy, &mut d_fw[t]);
        m.w_bw.matvec_t_acc(&dy, &mut d_bw[t]);
    }
    for l in (0..m.layers.len()).rev() {
        let (fw, bw) = &m.layers[l];
        let lc = &cache.layers[l];
        let (gfw, gbw) = &mut grads.layers[l];
        let dx_f = backprop_direction(fw, &lc.inputs, &lc.fw, &d_fw, false, gfw);
        let dx_b = backprop_direction(bw, &lc.inputs, &lc.bw, &d_bw, true, gbw);
        if l == 0 {
            break;
        }
        let h = m.layers[l - 1].0.hidden_dim();
        for t in 0..seq.len() {
            let (f_half, b_half) = (&mut d_fw[t], &mut d_bw[t]);
            f_half.clear();
            b_half.clear();
            for k in 0..2 * h {
                let v = dx_f[t][k] + dx_b[t][k];
                if k < h {
                    f_half.push(v);
                } else {
                    b_half.push(v);
                }
            }
        }
    }
    Ok(loss / n)
}

/// Mean per-step cross-entropy without gradients.
pub fn sequence_loss(m: &BlstmModel, seq: &AspectSequence) -> Result<f64> {
    let logits = stack_forward(m, seq)?;
    let mut loss = 0.0;
    for (y, &label) in logits.iter().zip(&seq.labels) {
        loss += cross_entropy(y, label)?;
    }
    Ok(loss / seq.len() as f64)
}

fn layer_tensors<'a>(prefix: &str, p: &'a LstmLayerParams, out: &mut Vec<NamedTensor<'a>>) {
    let (h, i) = (p.hidden_dim(), p.input_dim());
    for g in 0..4 {
        out.push(NamedTensor::new(format!("{prefix}.w_{}", GATE_NAMES[g]), vec![h, i], p.w[g].data()));
    }
    for g in 0..4 {
        out.push(NamedTensor::new(format!("{prefix}.r_{}", GATE_NAMES[g]), vec![h, h], p.r[g].data()));
    }
    for g in 0..4 {
        out.push(NamedTensor::new(format!("{prefix}.b_{}", GATE_NAMES[g]), vec![h], &p.b[g]));
    }
    out.push(NamedTensor::new(format!("{prefix}.p_input"), vec![h], &p.p_i));
    out.push(NamedTensor::new(format!("{prefix}.p_forget"), vec![h], &p.p_f));
    out.push(NamedTensor::new(format!("{prefix}.p_output"), vec![h], &p.p_o));
}

fn layer_tensors_mut<'a>(prefix: &str, p: &'a mut LstmLayerParams, out: &mut Vec<NamedTensorMut<'a>>) {
    let (h, i) = (p.hidden_dim(), p.input_dim());
    let LstmLayerParams { w, r, b, p_i, p_f, p_o } = p;
    for (g, m) in w.iter_mut().enumerate() {
        out.push(NamedTensorMut::new(format!("{prefix}.w_{}", GATE_NAMES[g]), vec![h, i], m.data_mut()));
    }
    for (g, m) in r.iter_mut().enumerate() {
        out.push(NamedTensorMut::new(format!("{prefix}.r_{}", GATE_NAMES[g]), vec![h, h], m.data_mut()));
    }
    for (g, v) in b.iter_mut().enumerate() {
        out.push(NamedTensorMut::new(format!("{prefix}.b_{}", GATE_NAMES[g]), vec![h], v));
    }
    out.push(NamedTensorMut::new(format!("{prefix}.p_input"), vec![h], p_i));
    out.push(NamedTensorMut::new(format!("{prefix}.p_forget"), vec![h], p_f));
    out.push(NamedTensorMut::new(format!("{prefix}.p_output"), vec![h], p_o));
}

impl TensorSet for BlstmModel {
    fn tensors(&self) -> Vec<NamedTensor<'_>> {
        let mut out = Vec::new();
        for (l, (fw, bw)) in self.layers.iter().enumerate() {
            layer_tensors(&format!("blstm.l{l}.fw"), fw, &mut out);
            layer_tensors(&format!("blstm.l{l}.bw"), bw, &mut out);
        }
        let (c, h) = (self.w_fw.rows(), self.w_fw.cols());
        out.push(NamedTensor::new("blstm.out.w_fw", vec![c, h], self.w_fw.data()));
        out.push(NamedTensor::new("blstm.out.w_bw", vec![c, h], self.w_bw.data()));
        out.push(NamedTensor::new("blstm.out.b", vec![c], &self.b_y));
        out
    }

    fn tensors_mut(&mut self) -> Vec<NamedTensorMut<'_>> {
        let mut out = Vec::new();
        let (c, h) = (self.w_fw.rows(), self.w_fw.cols());
        for (l, (fw, bw)) in self.layers.iter_mut().enumerate() {
            layer_tensors_mut(&format!("blstm.l{l}.fw"), fw, &mut out);
            layer_tensors_mut(&format!("blstm.l{l}.bw"), bw, &mut out);
        }
        out.push(NamedTensorMut::new("blstm.out.w_fw", vec![c, h], self.w_fw.data_mut()));
        out.push(NamedTensorMut::new("blstm.out.w_bw", vec![c, h], self.w_bw.data_mut()));
        out.push(NamedTensorMut::new("blstm.out.b", vec![c], &mut self.b_y));
        out
    }
}
