use crate::error::{Error, Result};
use crate::numkit::{sigmoid, DenseMatrix, Rng};

/// Gate order used for every per-gate array.
pub const BLOCK: usize = 0;
pub const INPUT: usize = 1;
pub const FORGET: usize = 2;
pub const OUTPUT: usize = 3;
pub const GATE_NAMES: [&str; 4] = ["block", "input", "forget", "output"];

/// One direction of one peephole LSTM layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmLayerParams {
    /// Input weights, `hidden × input`, indexed by gate.
    pub w: [DenseMatrix; 4],
    /// Recurrent weights, `hidden × hidden`, indexed by gate.
    pub r: [DenseMatrix; 4],
    pub b: [Vec<f64>; 4],
    pub p_i: Vec<f64>,
    pub p_f: Vec<f64>,
    pub p_o: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub c: Vec<f64>,
    pub o: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        LstmState {
            c: vec![0.0; hidden],
            o: vec![0.0; hidden],
        }
    }
}

/// Everything from one step that the backward pass needs.
#[derive(Debug, Clone)]
pub(crate) struct StepCache {
    /// Gate activations in gate order: `I` (tanh), then `i`, `f`, `o` (sigmoid).
    pub gates: [Vec<f64>; 4],
    pub c_prev: Vec<f64>,
    pub o_prev: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub out: Vec<f64>,
}

impl LstmLayerParams {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        let w = std::array::from_fn(|_| DenseMatrix::zeros(hidden, input));
        let r = std::array::from_fn(|_| DenseMatrix::zeros(hidden, hidden));
        LstmLayerParams {
            w,
            r,
            b: std::array::from_fn(|_| vec![0.0; hidden]),
            p_i: vec![0.0; hidden],
            p_f: vec![0.0; hidden],
            p_o: vec![0.0; hidden],
        }
    }

    /// Uniform `±sqrt(6 / (fan_in + hidden))` weights, small peepholes,
    /// forget-gate bias 1.
    pub fn init(input: usize, hidden: usize, rng: &mut Rng) -> Self {
        let mut p = Self::zeros(input, hidden);
        let aw = (6.0 / (input + hidden) as f64).sqrt();
        let ar = (6.0 / (2 * hidden) as f64).sqrt();
        for g in 0..4 {
            p.w[g].data_mut().iter_mut().for_each(|v| *v = rng.uniform_range(-aw, aw));
            p.r[g].data_mut().iter_mut().for_each(|v| *v = rng.uniform_range(-ar, ar));
        }
        for v in p.p_i.iter_mut().chain(&mut p.p_f).chain(&mut p.p_o) {
            *v = rng.uniform_range(-0.1, 0.1);
        }
        p.b[FORGET].iter_mut().for_each(|v| *v = 1.0);
        p
    }

    pub fn input_dim(&self) -> usize {
        self.w[0].cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w[0].rows()
    }

    pub(crate) fn step_cached(&self, x: &[f64], c_prev: &[f64], o_prev: &[f64]) -> StepCache {
        let h = self.hidden_dim();
        // W x + R O' (+ p ⊙ c) + b, summed in that order.
        let mut wx: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; h]);
        let mut ro: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; h]);
        for g in 0..4 {
            self.w[g].matvec_acc(x, &mut wx[g]);
            self.r[g].matvec_acc(o_prev, &mut ro[g]);
        }
        let pre = |g: usize, k: usize| wx[g][k] + ro[g][k];
        let mut gates: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; h]);
        let mut c = vec![0.0; h];
        let mut tanh_c = vec![0.0; h];
        let mut out = vec![0.0; h];
        for k in 0..h {
            let block = (pre(BLOCK, k) + self.b[BLOCK][k]).tanh();
            let ig = sigmoid(pre(INPUT, k) + self.p_i[k] * c_prev[k] + self.b[INPUT][k]);
            let fg = sigmoid(pre(FORGET, k) + self.p_f[k] * c_prev[k] + self.b[FORGET][k]);
            c[k] = ig * block + fg * c_prev[k];
            let og = sigmoid(pre(OUTPUT, k) + self.p_o[k] * c[k] + self.b[OUTPUT][k]);
            tanh_c[k] = c[k].tanh();
            out[k] = og * tanh_c[k];
            gates[BLOCK][k] = block;
            gates[INPUT][k] = ig;
            gates[FORGET][k] = fg;
            gates[OUTPUT][k] = og;
        }
        StepCache {
            gates,
            c_prev: c_prev.to_vec(),
            o_prev: o_prev.to_vec(),
            c,
            tanh_c,
            out,
        }
    }
}

/// One peephole LSTM step:
///
/// ```text
/// I = tanh(W_I x + R_I O' + b_I)
/// i = σ(W_i x + R_i O' + p_i ⊙ c' + b_i)
/// f = σ(W_f x + R_f O' + p_f ⊙ c' + b_f)
/// c = i ⊙ I + f ⊙ c'
/// o = σ(W_o x + R_o O' + p_o ⊙ c + b_o)
/// O = o ⊙ tanh(c)
/// ```
pub fn lstm_step(p: &LstmLayerParams, x: &[f64], prev: &LstmState) -> Result<LstmState> {
    if x.len() != p.input_dim() {
        return Err(Error::dims("lstm input", p.input_dim(), x.len()));
    }
    let h = p.hidden_dim();
    if prev.c.len() != h || prev.o.len() != h {
        return Err(Error::dims("lstm state", h, prev.c.len().max(prev.o.len())));
    }
    let cache = p.step_cached(x, &prev.c, &prev.o);
    Ok(LstmState {
        c: cache.c,
        o: cache.out,
    })
}

/// Runs one direction over `xs` from a zero state. Caches are indexed by
/// time step whatever the direction.
pub(crate) fn run_direction(p: &LstmLayerParams, xs: &[Vec<f64>], reverse: bool) -> Vec<StepCache> {
    let h = p.hidden_dim();
    let mut slots: Vec<Option<StepCache>> = vec![None; xs.len()];
    let mut c = vec![0.0; h];
    let mut o = vec![0.0; h];
    for t in time_order(xs.len(), reverse) {
        let cache = p.step_cached(&xs[t], &c, &o);
        c.clone_from(&cache.c);
        o.clone_from(&cache.out);
        slots[t] = Some(cache);
    }
    slots.into_iter().map(|s| s.expect("every step visited")).collect()
}

pub(crate) fn time_order(len: usize, reverse: bool) -> Box<dyn Iterator<Item = usize>> {
    if reverse {
        Box::new((0..len).rev())
    } else {
        Box::new(0..len)
    }
}

/// Backpropagation through one direction. `d_out[t]` is the loss gradient
/// with respect to the output at time `t` coming from above. Parameter
/// gradients are added into `grads`; input gradients are returned by time.
pub(crate) fn backprop_direction(
    p: &LstmLayerParams,
    xs: &[Vec<f64>],
    caches: &[StepCache],
    d_out: &[Vec<f64>],
    reverse: bool,
    grads: &mut LstmLayerParams,
) -> Vec<Vec<f64>> {
    let h = p.hidden_dim();
    let mut dx = vec![vec![0.0; p.input_dim()]; xs.len()];
    let mut next_da: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; h]);
    let mut next_dc = vec![0.0; h];
    let mut next_f = vec![0.0; h];
    // Walk against the processing order.
    for t in time_order(xs.len(), !reverse) {
        let s = &caches[t];
        let mut d_o = d_out[t].clone();
        for g in 0..4 {
            p.r[g].matvec_t_acc(&next_da[g], &mut d_o);
        }
        let mut da: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; h]);
        let mut dc = vec![0.0; h];
        for k in 0..h {
            let (block, ig, fg, og) = (
                s.gates[BLOCK][k],
                s.gates[INPUT][k],
                s.gates[FORGET][k],
                s.gates[OUTPUT][k],
            );
            let tc = s.tanh_c[k];
            da[OUTPUT][k] = d_o[k] * tc * og * (1.0 - og);
            dc[k] = d_o[k] * og * (1.0 - tc * tc)
                + p.p_o[k] * da[OUTPUT][k]
                + p.p_i[k] * next_da[INPUT][k]
                + p.p_f[k] * next_da[FORGET][k]
                + next_dc[k] * next_f[k];
            da[FORGET][k] = dc[k] * s.c_prev[k] * fg * (1.0 - fg);
            da[INPUT][k] = dc[k] * block * ig * (1.0 - ig);
            da[BLOCK][k] = dc[k] * ig * (1.0 - block * block);
        }
        for g in 0..4 {
            grads.w[g].add_outer(&da[g], &xs[t], 1.0);
            grads.r[g].add_outer(&da[g], &s.o_prev, 1.0);
            grads.b[g].iter_mut().zip(&da[g]).for_each(|(a, d)| *a += d);
            p.w[g].matvec_t_acc(&da[g], &mut dx[t]);
        }
        for k in 0..h {
            grads.p_i[k] += s.c_prev[k] * da[INPUT][k];
            grads.p_f[k] += s.c_prev[k] * da[FORGET][k];
            grads.p_o[k] += s.c[k] * da[OUTPUT][k];
        }
        next_dc = dc;
        next_f.clone_from(&s.gates[FORGET]);
        next_da = da;
    }
    dx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_params_zero_state() {
        let p = LstmLayerParams::zeros(3, 2);
        let s = lstm_step(&p, &[1.0, -2.0, 0.5], &LstmState::zeros(2)).unwrap();
        assert_eq!(s, LstmState::zeros(2));
        let cache = p.step_cached(&[1.0, -2.0, 0.5], &[0.0; 2], &[0.0; 2]);
        assert_eq!(cache.gates[INPUT], vec![0.5; 2]);
        assert_eq!(cache.gates[FORGET], vec![0.5; 2]);
        assert_eq!(cache.gates[OUTPUT], vec![0.5; 2]);
        assert_eq!(cache.gates[BLOCK], vec![0.0; 2]);
    }

    #[test]
    fn saturated_gates_scalar() {
        let mut p = LstmLayerParams::zeros(1, 1);
        p.b[INPUT][0] = 100.0;
        p.b[FORGET][0] = 100.0;
        p.b[BLOCK][0] = 3.0;
        let prev = LstmState {
            c: vec![0.3],
            o: vec![0.0],
        };
        let s = lstm_step(&p, &[0.7], &prev).unwrap();
        let want = 0.3 + 3.0f64.tanh();
        assert!((s.c[0] - want).abs() < 1e-12, "{} vs {want}", s.c[0]);
        assert!((s.o[0] - 0.5 * want.tanh()).abs() < 1e-12);
    }

    #[test]
    fn step_rejects_bad_dims() {
        let p = LstmLayerParams::zeros(3, 2);
        assert!(lstm_step(&p, &[0.0; 4], &LstmState::zeros(2)).is_err());
        assert!(lstm_step(&p, &[0.0; 3], &LstmState::zeros(3)).is_err());
    }
}
