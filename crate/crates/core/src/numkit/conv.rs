use num_complex::Complex64;

use super::grid::{ComplexGrid, RealGrid};
use crate::error::{Error, Result};

/// Maps a possibly out-of-range index onto `0..n` by symmetric reflection
/// (`.. c b a | a b c .. | c b a ..`, edge sample repeated). Periodic with
/// period `2n`, so kernels wider than the image still resolve.
#[inline]
pub fn reflect_index(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Same-size 2D convolution of a real image with a complex kernel, with
/// symmetric reflect padding:
///
/// `out(i, j) = Σ_{u,v} kernel(u, v) · image(i - u + c_r, j - v + c_c)`
///
/// where `(c_r, c_c)` is the kernel center.
pub fn conv2d_same(image: &RealGrid, kernel: &ComplexGrid) -> Result<ComplexGrid> {
    let (kr, kc) = (kernel.rows(), kernel.cols());
    if kr % 2 == 0 || kc % 2 == 0 {
        return Err(Error::invalid(format!(
            "kernel dimensions must be odd, got {kr}x{kc}"
        )));
    }
    let (rows, cols) = (image.rows(), image.cols());
    let (hr, hc) = (kr / 2, kc / 2);

    // Padded copy so the inner loop is branch-free.
    let pr = rows + 2 * hr;
    let pc = cols + 2 * hc;
    let mut padded = vec![0.0; pr * pc];
    for pi in 0..pr {
        let si = reflect_index(pi as isize - hr as isize, rows);
        for pj in 0..pc {
            let sj = reflect_index(pj as isize - hc as isize, cols);
            padded[pi * pc + pj] = image.at(si, sj);
        }
    }

    // Flip once: out(i,j) = Σ_{a,b} kflip(a,b) · padded(i + a, j + b).
    let mut flip_re = vec![0.0; kr * kc];
    let mut flip_im = vec![0.0; kr * kc];
    for u in 0..kr {
        for v in 0..kc {
            let k = kernel.at(u, v);
            let idx = (kr - 1 - u) * kc + (kc - 1 - v);
            flip_re[idx] = k.re;
            flip_im[idx] = k.im;
        }
    }

    let mut out = Vec::with_capacity(rows * cols);
    let mut acc_re = vec![0.0; cols];
    let mut acc_im = vec![0.0; cols];
    for i in 0..rows {
        acc_re.iter_mut().for_each(|x| *x = 0.0);
        acc_im.iter_mut().for_each(|x| *x = 0.0);
        for a in 0..kr {
            let prow = &padded[(i + a) * pc..(i + a + 1) * pc];
            let kre = &flip_re[a * kc..(a + 1) * kc];
            let kim = &flip_im[a * kc..(a + 1) * kc];
            for b in 0..kc {
                let (wr, wi) = (kre[b], kim[b]);
                let src = &prow[b..b + cols];
                for ((re, im), &p) in acc_re.iter_mut().zip(acc_im.iter_mut()).zip(src) {
                    *re += wr * p;
                    *im += wi * p;
                }
            }
        }
        out.extend(
            acc_re
                .iter()
                .zip(&acc_im)
                .map(|(&re, &im)| Complex64::new(re, im)),
        );
    }
    ComplexGrid::from_vec(rows, cols, out)
}
