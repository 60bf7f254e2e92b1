//! Numeric building blocks shared by the feature, MLP and LSTM stages.

mod activation;
mod conv;
mod gradcheck;
mod grid;
mod matrix;
mod rng;

pub use activation::{
    argmax, cross_entropy, relu, relu_vec, sigmoid, sigmoid_vec, softmax, tanh, tanh_vec,
};
pub use conv::{conv2d_same, reflect_index};
pub use gradcheck::{finite_diff_grad, max_relative_error, norm_relative_error};
pub use grid::{ComplexGrid, Grid2D, RealGrid};
pub use matrix::{dot, DenseMatrix};
pub use rng::Rng;

pub use num_complex::Complex64;
