//! Exact scalars, sparse tensors over a fixed finite basis, and linear maps
//! into tensor powers.

mod scalar;
mod tensor;

pub use scalar::{binom, binom_or_zero, factorial, Scalar};
pub(crate) use tensor::check_dim;
pub use tensor::{LinMap, Matrix, SlotApply, Tensor, Tensor2, Tensor3, Vector};
