//! Independent reference implementations used as test oracles. None of these
//! call into the crate's own kernels; they re-derive each quantity with
//! plain loops so that a shared bug cannot hide.

#![allow(dead_code)]

use multiaspect::numkit::{Complex64, ComplexGrid, Grid2D, RealGrid, Rng};

/// Symmetric reflection by repeated folding.
pub fn mirror(mut i: isize, n: isize) -> usize {
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - i - 1;
        } else {
            return i as usize;
        }
    }
}

/// Direct-sum same-size convolution with symmetric padding.
pub fn naive_conv(image: &RealGrid, kernel: &ComplexGrid) -> Vec<Complex64> {
    let (rows, cols) = (image.rows() as isize, image.cols() as isize);
    let (kr, kc) = (kernel.rows() as isize, kernel.cols() as isize);
    let (cr, cc) = (kr / 2, kc / 2);
    let mut out = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for u in 0..kr {
                for v in 0..kc {
                    let si = mirror(i - u + cr, rows);
                    let sj = mirror(j - v + cc, cols);
                    acc += kernel.at(u as usize, v as usize) * image.at(si, sj);
                }
            }
            out.push(acc);
        }
    }
    out
}

/// Gabor kernel entry evaluated from the closed form with explicit cos/sin.
pub fn gabor_value(
    x: f64,
    y: f64,
    lambda: f64,
    theta: f64,
    psi: f64,
    sigma: f64,
    gamma: f64,
) -> Complex64 {
    let xp = x * theta.cos() + y * theta.sin();
    let yp = -x * theta.sin() + y * theta.cos();
    let env = (-(xp.powi(2) + gamma.powi(2) * yp.powi(2)) / (2.0 * sigma.powi(2))).exp();
    let phase = 2.0 * std::f64::consts::PI * xp / lambda + psi;
    Complex64::new(env * phase.cos(), env * phase.sin())
}

/// Per-pixel three-patch LBP straight from the definition.
pub fn naive_tplbp(
    image: &RealGrid,
    r: usize,
    s: usize,
    w: usize,
    alpha: usize,
    tau: f64,
) -> Vec<u32> {
    let (rows, cols) = (image.rows() as isize, image.cols() as isize);
    let half = (w / 2) as isize;
    let centers: Vec<(isize, isize)> = (0..s)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / s as f64;
            (
                (r as f64 * a.sin()).round() as isize,
                (r as f64 * a.cos()).round() as isize,
            )
        })
        .collect();
    let inside = |pr: isize, pc: isize| {
        pr - half >= 0 && pr + half < rows && pc - half >= 0 && pc + half < cols
    };
    let dist = |ar: isize, ac: isize, br: isize, bc: isize| {
        let mut acc = 0.0;
        for dr in -half..=half {
            for dc in -half..=half {
                let a = image.at((ar + dr) as usize, (ac + dc) as usize);
                let b = image.at((br + dr) as usize, (bc + dc) as usize);
                acc += (a - b) * (a - b);
            }
        }
        acc.sqrt()
    };
    let mut codes = Vec::new();
    for pr in 0..rows {
        for pc in 0..cols {
            let all_in =
                inside(pr, pc) && centers.iter().all(|&(dr, dc)| inside(pr + dr, pc + dc));
            if !all_in {
                codes.push(0);
                continue;
            }
            let d: Vec<f64> = centers
                .iter()
                .map(|&(dr, dc)| dist(pr + dr, pc + dc, pr, pc))
                .collect();
            let mut code = 0u32;
            for i in 0..s {
                if d[i] - d[(i + alpha) % s] >= tau {
                    code += 1 << i;
                }
            }
            codes.push(code);
        }
    }
    codes
}

/// Unit-by-unit peephole LSTM. Each pre-activation is summed as
/// `W x + R O' + p ⊙ c + b`, the order the cell equations are written in.
pub struct NaiveLstm {
    pub input: usize,
    pub hidden: usize,
    /// `[gate][unit][input]` with gates ordered block input, input, forget, output.
    pub w: Vec<Vec<Vec<f64>>>,
    pub r: Vec<Vec<Vec<f64>>>,
    pub b: Vec<Vec<f64>>,
    /// peepholes for input, forget, output gates
    pub p: Vec<Vec<f64>>,
}

fn sig(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        x.exp() / (1.0 + x.exp())
    }
}

impl NaiveLstm {
    /// One step of the peephole LSTM, one scalar unit at a time.
    pub fn step(&self, x: &[f64], c_prev: &[f64], o_prev: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let pre = |g: usize, k: usize| {
            let mut wx = 0.0;
            for j in 0..self.input {
                wx += self.w[g][k][j] * x[j];
            }
            let mut ro = 0.0;
            for j in 0..self.hidden {
                ro += self.r[g][k][j] * o_prev[j];
            }
            wx + ro
        };
        let mut c = vec![0.0; self.hidden];
        let mut o = vec![0.0; self.hidden];
        for k in 0..self.hidden {
            let block = (pre(0, k) + self.b[0][k]).tanh();
            let ig = sig(pre(1, k) + self.p[0][k] * c_prev[k] + self.b[1][k]);
            let fg = sig(pre(2, k) + self.p[1][k] * c_prev[k] + self.b[2][k]);
            c[k] = ig * block + fg * c_prev[k];
            let og = sig(pre(3, k) + self.p[2][k] * c[k] + self.b[3][k]);
            o[k] = og * c[k].tanh();
        }
        (c, o)
    }
}

pub fn random_grid(rng: &mut Rng, rows: usize, cols: usize) -> RealGrid {
    Grid2D::from_fn(rows, cols, |_, _| rng.uniform()).unwrap()
}

pub fn random_complex_kernel(rng: &mut Rng, rows: usize, cols: usize) -> ComplexGrid {
    Grid2D::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0))
    })
    .unwrap()
}

/// Max |a - b| relative to the largest magnitude in `b`.
pub fn max_rel_err_complex(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

/// Copies one layer direction into the nested-vector oracle layout.
pub fn naive_from(p: &multiaspect::blstm::LstmLayerParams) -> NaiveLstm {
    let (h, i) = (p.hidden_dim(), p.input_dim());
    let unpack = |m: &multiaspect::numkit::DenseMatrix, cols: usize| -> Vec<Vec<f64>> {
        (0..h).map(|k| (0..cols).map(|j| m.get(k, j)).collect()).collect()
    };
    NaiveLstm {
        input: i,
        hidden: h,
        w: p.w.iter().map(|m| unpack(m, i)).collect(),
        r: p.r.iter().map(|m| unpack(m, h)).collect(),
        b: p.b.to_vec(),
        p: vec![p.p_i.clone(), p.p_f.clone(), p.p_o.clone()],
    }
}

/// Layer with every tensor, biases and peepholes included, drawn uniformly.
pub fn random_layer(rng: &mut Rng, input: usize, hidden: usize) -> multiaspect::blstm::LstmLayerParams {
    let mut p = multiaspect::blstm::LstmLayerParams::zeros(input, hidden);
    for g in 0..4 {
        p.w[g].data_mut().iter_mut().for_each(|v| *v = rng.uniform_range(-1.0, 1.0));
        p.r[g].data_mut().iter_mut().for_each(|v| *v = rng.uniform_range(-1.0, 1.0));
        p.b[g].iter_mut().for_each(|v| *v = rng.uniform_range(-0.5, 0.5));
    }
    for v in p.p_i.iter_mut().chain(&mut p.p_f).chain(&mut p.p_o) {
        *v = rng.uniform_range(-0.5, 0.5);
    }
    p
}

pub fn random_model(
    rng: &mut Rng,
    input: usize,
    sizes: &[usize],
    classes: usize,
) -> multiaspect::blstm::BlstmModel {
    use multiaspect::TensorSet;
    let mut m = multiaspect::blstm::BlstmModel::zeros(input, sizes, classes).unwrap();
    for t in m.tensors_mut() {
        t.data.iter_mut().for_each(|v| *v = rng.uniform_range(-0.8, 0.8));
    }
    m
}

pub fn random_steps(rng: &mut Rng, len: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..len)
        .map(|_| (0..dim).map(|_| rng.uniform_range(-1.0, 1.0)).collect())
        .collect()
}

/// Coordinates whose gradients are below this magnitude are compared in
/// absolute terms; central differences at ε = 1e-5 carry ~1e-11 of noise.
pub const GRAD_FLOOR: f64 = 1e-6;

/// BPTT against central differences on the toy network (input 4, layers
/// [3, 2], 2 classes, 3 steps). Returns the norm-wise relative error of
/// every tensor.
pub fn blstm_toy_gradient_errors(seed: u64) -> Vec<(String, f64)> {
    use multiaspect::blstm::{bptt_grad, sequence_loss, AspectSequence};
    use multiaspect::numkit::{finite_diff_grad, norm_relative_error};
    use multiaspect::TensorSet;

    let mut rng = Rng::new(seed);
    let model = random_model(&mut rng, 4, &[3, 2], 2);
    let seq = AspectSequence {
        steps: random_steps(&mut rng, 3, 4),
        labels: vec![0, 1, 1],
        aspects: vec![0.0, 10.0, 20.0],
        target_id: "toy".into(),
        class_id: 1,
    };
    let (_, grads) = bptt_grad(&model, &seq).unwrap();
    let theta = model.flatten();
    let numeric = finite_diff_grad(
        |t| {
            let mut m = model.clone();
            m.assign_flat(t);
            sequence_loss(&m, &seq).unwrap()
        },
        &theta,
        1e-5,
    )
    .unwrap();
    let mut offset = 0;
    grads
        .tensors()
        .into_iter()
        .map(|t| {
            let n = t.data.len();
            let err = norm_relative_error(t.data, &numeric[offset..offset + n], GRAD_FLOOR);
            offset += n;
            (t.name, err)
        })
        .collect()
}

/// MLP backprop against central differences on a 4/3/2 toy.
pub fn mlp_toy_gradient_error(seed: u64) -> f64 {
    use multiaspect::mlp::MlpParams;
    use multiaspect::numkit::{finite_diff_grad, max_relative_error};
    use multiaspect::TensorSet;

    let mut rng = Rng::new(seed);
    let mut params = MlpParams::init(4, 3, 2, &mut rng);
    params.b1.iter_mut().for_each(|b| *b = rng.uniform_range(-0.3, 0.3));
    let xs = random_steps(&mut rng, 6, 4);
    let data: Vec<(&[f64], usize)> = xs.iter().enumerate().map(|(i, x)| (x.as_slice(), i % 2)).collect();
    let (_, grads) = params.loss_and_grad(&data).unwrap();
    let numeric = finite_diff_grad(
        |t| {
            let mut p = params.clone();
            p.assign_flat(t);
            p.loss(&data).unwrap()
        },
        &params.flatten(),
        1e-5,
    )
    .unwrap();
    max_relative_error(&grads.flatten(), &numeric, GRAD_FLOOR)
}
