//! BPTT against central differences on a small BLSTM, per parameter tensor.

use multiaspect::blstm::{bptt_grad, sequence_loss, AspectSequence, BlstmModel};
use multiaspect::numkit::{finite_diff_grad, norm_relative_error, Rng};
use multiaspect::TensorSet;

fn main() -> multiaspect::Result<()> {
    let mut rng = Rng::new(5);
    let model = BlstmModel::init(4, &[3, 2], 2, &mut rng)?;
    let steps: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..4).map(|_| rng.uniform_range(-1.0, 1.0)).collect())
        .collect();
    let seq = AspectSequence {
        steps,
        labels: vec![0, 1, 1],
        aspects: vec![0.0, 6.0, 12.0],
        target_id: "toy".into(),
        class_id: 1,
    };
    let (loss, grads) = bptt_grad(&model, &seq)?;
    let numeric = finite_diff_grad(
        |theta| {
            let mut m = model.clone();
            m.assign_flat(theta);
            sequence_loss(&m, &seq).unwrap()
        },
        &model.flatten(),
        1e-5,
    )?;
    println!("loss {loss:.6}");
    let mut offset = 0;
    for t in grads.tensors() {
        let n = t.data.len();
        let err = norm_relative_error(t.data, &numeric[offset..offset + n], 1e-6);
        offset += n;
        println!("{:<24} {:>4} values  rel err {err:.2e}", t.name, n);
    }
    Ok(())
}
