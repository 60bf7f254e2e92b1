use crate::error::{Error, Result};

/// Central finite-difference gradient of `f` at `theta`:
/// `(f(θ + ε e_i) - f(θ - ε e_i)) / 2ε` for each coordinate.
pub fn finite_diff_grad<F>(mut f: F, theta: &[f64], eps: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("step must be positive, got {eps}")));
    }
    let mut point = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        let orig = point[i];
        point[i] = orig + eps;
        let plus = f(&point);
        point[i] = orig - eps;
        let minus = f(&point);
        point[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite(format!(
                "objective at coordinate {i} (f(+eps) = {plus}, f(-eps) = {minus})"
            )));
        }
        grad.push((plus - minus) / (2.0 * eps));
    }
    Ok(grad)
}

/// Max over coordinates of `|a - b| / max(|a|, |b|, floor)`.
///
/// The floor keeps coordinates whose true gradient is ~0 from dominating
/// through pure finite-difference noise.
pub fn max_relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

/// Norm-wise relative error `‖a - b‖₂ / max(‖a‖₂, ‖b‖₂, floor)`, the usual
/// per-tensor measure for gradient checks.
pub fn norm_relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    assert_eq!(a.len(), b.len());
    let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
    let diff = norm(&mut a.iter().zip(b).map(|(x, y)| x - y));
    let scale = norm(&mut a.iter().copied()).max(norm(&mut b.iter().copied()));
    diff / scale.max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{cross_entropy, softmax};

    #[test]
    fn quadratic() {
        let g = finite_diff_grad(|t| t.iter().map(|x| x * x).sum(), &[1.0, 2.0], 1e-5).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-8);
        assert!((g[1] - 4.0).abs() < 1e-8);
    }

    #[test]
    fn constant_gives_zero() {
        let g = finite_diff_grad(|_| 3.5, &[0.1, -4.0, 9.0], 1e-5).unwrap();
        assert_eq!(g, vec![0.0; 3]);
    }

    #[test]
    fn softmax_cross_entropy_layer() {
        // Two-unit softmax layer z = W x + b, loss = CE(z, label).
        // Analytic: dL/dW = (p - onehot) xᵀ, dL/db = p - onehot.
        let x = [0.7, -0.4, 1.3];
        let label = 1;
        let theta = [0.2, -0.1, 0.4, -0.3, 0.5, 0.05, 0.1, -0.2];
        let loss = |t: &[f64]| {
            let z: Vec<f64> = (0..2)
                .map(|r| (0..3).map(|c| t[r * 3 + c] * x[c]).sum::<f64>() + t[6 + r])
                .collect();
            cross_entropy(&z, label).unwrap()
        };
        let z: Vec<f64> = (0..2)
            .map(|r| (0..3).map(|c| theta[r * 3 + c] * x[c]).sum::<f64>() + theta[6 + r])
            .collect();
        let p = softmax(&z).unwrap();
        let mut analytic = vec![0.0; 8];
        for r in 0..2 {
            let d = p[r] - if r == label { 1.0 } else { 0.0 };
            for c in 0..3 {
                analytic[r * 3 + c] = d * x[c];
            }
            analytic[6 + r] = d;
        }
        let numeric = finite_diff_grad(loss, &theta, 1e-5).unwrap();
        assert!(max_relative_error(&analytic, &numeric, 1e-12) <= 1e-7);
    }

    #[test]
    fn non_finite_reports_coordinate() {
        let err = finite_diff_grad(
            |t| if t[1] > 1.0 { f64::NAN } else { 0.0 },
            &[0.0, 1.0],
            1e-3,
        )
        .unwrap_err();
        assert!(err.to_string().contains("coordinate 1"), "{err}");
    }
}
