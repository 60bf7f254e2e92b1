//! Named views over parameter storage, shared by optimizers, gradient
//! checks and the model file format.

pub struct NamedTensor<'a> {
    pub name: String,
    pub dims: Vec<usize>,
    pub data: &'a [f64],
}

pub struct NamedTensorMut<'a> {
    pub name: String,
    pub dims: Vec<usize>,
    pub data: &'a mut [f64],
}

impl<'a> NamedTensor<'a> {
    pub fn new(name: impl Into<String>, dims: Vec<usize>, data: &'a [f64]) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        NamedTensor {
            name: name.into(),
            dims,
            data,
        }
    }
}

impl<'a> NamedTensorMut<'a> {
    pub fn new(name: impl Into<String>, dims: Vec<usize>, data: &'a mut [f64]) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        NamedTensorMut {
            name: name.into(),
            dims,
            data,
        }
    }
}

/// A bundle of parameter tensors with a fixed, stable order.
pub trait TensorSet {
    fn tensors(&self) -> Vec<NamedTensor<'_>>;
    fn tensors_mut(&mut self) -> Vec<NamedTensorMut<'_>>;

    fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    /// All parameters concatenated in tensor order.
    fn flatten(&self) -> Vec<f64> {
        self.tensors().iter().flat_map(|t| t.data.iter().copied()).collect()
    }

    /// Inverse of [`TensorSet::flatten`]. Panics if `values` has the wrong length.
    fn assign_flat(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.param_count(), "flat parameter length");
        let mut offset = 0;
        for t in self.tensors_mut() {
            let n = t.data.len();
            t.data.copy_from_slice(&values[offset..offset + n]);
            offset += n;
        }
    }

    fn squared_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.data.iter())
            .map(|v| v * v)
            .sum()
    }
}
