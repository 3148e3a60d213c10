//! Dense tensors, reverse-mode differentiation and the Adam optimizer.

mod graph;
mod param;
mod tensor;

pub use graph::{Graph, Var};
pub use param::{Adam, Gradients, ParamId, ParamStore, Parameter};
pub use tensor::{Scalar, Tensor};
