use rand::Rng;

use super::tensor::{Scalar, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub(crate) usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A learned tensor with its gradient and Adam moments.
#[derive(Clone, Debug)]
pub struct Parameter<T: Scalar = f32> {
    pub name: String,
    pub value: Tensor<T>,
    pub grad: Option<Tensor<T>>,
    first_moment: Vec<T>,
    second_moment: Vec<T>,
    step: u64,
}

impl<T: Scalar> Parameter<T> {
    pub fn new(name: impl Into<String>, value: Tensor<T>) -> Self {
        let n = value.data().len();
        Parameter {
            name: name.into(),
            value,
            grad: None,
            first_moment: vec![T::zero(); n],
            second_moment: vec![T::zero(); n],
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn moments(&self) -> (&[T], &[T]) {
        (&self.first_moment, &self.second_moment)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParamStore<T: Scalar = f32> {
    params: Vec<Parameter<T>>,
}

impl<T: Scalar> ParamStore<T> {
    pub fn new() -> Self {
        ParamStore { params: Vec::new() }
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor<T>) -> ParamId {
        self.params.push(Parameter::new(name, value));
        ParamId(self.params.len() - 1)
    }

    /// Uniform initialization in `[-range, range]`.
    pub fn add_uniform<R: Rng>(
        &mut self,
        name: impl Into<String>,
        rows: usize,
        cols: usize,
        range: f64,
        rng: &mut R,
    ) -> ParamId {
        let data = (0..rows * cols)
            .map(|_| T::from_f64_lossy(rng.gen_range(-range..=range)))
            .collect();
        let value = Tensor::from_vec(rows, cols, data).expect("sized buffer");
        self.add(name, value)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn get(&self, id: ParamId) -> &Parameter<T> {
        &self.params[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Parameter<T> {
        &mut self.params[id.0]
    }

    pub fn value(&self, id: ParamId) -> &Tensor<T> {
        &self.params[id.0].value
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &Parameter<T>)> {
        self.params.iter().enumerate().map(|(i, p)| (ParamId(i), p))
    }

    pub fn find(&self, name: &str) -> Option<ParamId> {
        self.params.iter().position(|p| p.name == name).map(ParamId)
    }

    pub fn scalar_count(&self) -> usize {
        self.params.iter().map(|p| p.value.data().len()).sum()
    }

    /// Add gradients from one backward pass into the stored ones.
    pub fn accumulate(&mut self, grads: Gradients<T>) {
        for (p, g) in self.params.iter_mut().zip(grads.0) {
            let Some(g) = g else { continue };
            match &mut p.grad {
                Some(existing) => existing.add_assign(&g),
                slot @ None => *slot = Some(g),
            }
        }
    }

    pub fn zero_grads(&mut self) {
        for p in &mut self.params {
            p.grad = None;
        }
    }

    /// Scale gradients so their global L2 norm is at most `max_norm`.
    /// Returns the norm before clipping.
    pub fn clip_grad_norm(&mut self, max_norm: T) -> T {
        let norm = self
            .params
            .iter()
            .filter_map(|p| p.grad.as_ref())
            .map(Tensor::sum_squares)
            .sum::<T>()
            .sqrt();
        if norm > max_norm {
            let s = max_norm / norm;
            for g in self.params.iter_mut().filter_map(|p| p.grad.as_mut()) {
                g.scale_assign(s);
            }
        }
        norm
    }

    /// Parameter values only, for snapshots.
    pub fn snapshot(&self) -> Vec<Tensor<T>> {
        self.params.iter().map(|p| p.value.clone()).collect()
    }

    pub fn restore(&mut self, values: Vec<Tensor<T>>) {
        assert_eq!(values.len(), self.params.len());
        for (p, v) in self.params.iter_mut().zip(values) {
            assert_eq!(p.value.shape(), v.shape());
            p.value = v;
        }
    }

    /// Copy of the store with a different element type; optimizer state is
    /// reset.
    pub fn cast<U: Scalar>(&self) -> ParamStore<U> {
        ParamStore {
            params: self
                .params
                .iter()
                .map(|p| Parameter::new(p.name.clone(), p.value.cast()))
                .collect(),
        }
    }
}

/// Per-parameter gradients from one backward pass. Parameters the loss does
/// not depend on have `None`, meaning zero.
#[derive(Clone, Debug)]
pub struct Gradients<T: Scalar = f32>(pub(crate) Vec<Option<Tensor<T>>>);

impl<T: Scalar> Gradients<T> {
    pub fn get(&self, id: ParamId) -> Option<&Tensor<T>> {
        self.0[id.0].as_ref()
    }

    /// Gradient of one scalar entry, zero when the parameter is unused.
    pub fn entry(&self, id: ParamId, index: usize) -> T {
        self.0[id.0]
            .as_ref()
            .map_or(T::zero(), |g| g.data()[index])
    }
}

/// Adam with bias correction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Adam {
    pub fn new(lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    /// Apply one update to every parameter and clear the gradients. A missing
    /// gradient counts as zero.
    pub fn step<T: Scalar>(&self, store: &mut ParamStore<T>) {
        let b1 = T::from_f64_lossy(self.beta1);
        let b2 = T::from_f64_lossy(self.beta2);
        let one = T::one();
        for p in &mut store.params {
            p.step += 1;
            let t = p.step as i32;
            let c1 = T::from_f64_lossy(1.0 - self.beta1.powi(t));
            let c2 = T::from_f64_lossy(1.0 - self.beta2.powi(t));
            let lr = T::from_f64_lossy(self.lr);
            let eps = T::from_f64_lossy(self.eps);
            let grad = p.grad.take();
            let values = p.value.data_mut();
            for i in 0..values.len() {
                let g = grad.as_ref().map_or(T::zero(), |g| g.data()[i]);
                let m = b1 * p.first_moment[i] + (one - b1) * g;
                let v = b2 * p.second_moment[i] + (one - b2) * g * g;
                p.first_moment[i] = m;
                p.second_moment[i] = v;
                let m_hat = m / c1;
                let v_hat = v / c2;
                values[i] = values[i] - lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}
