//! Peephole LSTM cells, bidirectional layers, a stacked sequence
//! classifier with per-step softmax decisions, and BPTT training.

mod cell;
mod model;
mod train;

pub use cell::{lstm_step, LstmLayerParams, LstmState, BLOCK, FORGET, GATE_NAMES, INPUT, OUTPUT};
pub use model::{
    blstm_layer, bptt_accumulate, bptt_grad, classify, sequence_loss, stack_forward,
    AspectSequence, BlstmGrads, BlstmModel, Classification,
};
pub use train::{step_accuracy, train, train_with, BlstmEpoch, BlstmHyper, BlstmTraining};
