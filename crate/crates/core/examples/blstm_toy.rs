//! Stacked BLSTM on the confusable pair's closed-form aspect signatures.
//! Single steps near the shared aspect are ambiguous; the sequence
//! context resolves them.

use multiaspect::blstm::{step_accuracy, train_with, BlstmHyper, BlstmModel};
use multiaspect::dataio::{signature_sequences, SynthSpec};
use multiaspect::numkit::Rng;

fn main() -> multiaspect::Result<()> {
    let base = SynthSpec::default();
    let pair = SynthSpec {
        class_count: 2,
        aspects_per_class: 24,
        classes: base.classes[..2].to_vec(),
        ..base
    };
    let train = signature_sequences(&pair, 3, 0.05, 7)?;
    let test = signature_sequences(&pair, 2, 0.05, 99)?;
    let dim = train[0].steps[0].len();
    let model = BlstmModel::init(dim, &[8, 4], 2, &mut Rng::new(3))?;
    let hyper = BlstmHyper {
        learning_rate: 0.05,
        max_epochs: 500,
        target_accuracy: Some(0.99),
        ..BlstmHyper::default()
    };
    let out = train_with(model, &train, &hyper, |e| {
        if e.epoch % 10 == 0 {
            println!("epoch {:>3}  loss {:.4}  accuracy {:.3}", e.epoch, e.loss, e.accuracy);
        }
    })?;
    let last = out.log.last().unwrap();
    println!("stopped at epoch {} with training accuracy {:.3}", last.epoch, last.accuracy);
    let (c, n) = step_accuracy(&out.model, &test)?;
    println!("held-out per-step accuracy {c}/{n}");
    Ok(())
}
