pub mod blstm;
pub mod cli;
pub mod dataio;
pub mod error;
pub mod features;
pub mod mlp;
pub mod numkit;
pub mod tensors;

pub use error::{Error, Result};
pub use tensors::TensorSet;
