//! Formal Laurent series in commuting variables, the delta function and its
//! identities.

mod delta;
mod selftest;
mod series;

pub use delta::{delta, delta_shift, expand_binomial, DeltaKernel, StandardDelta};
pub use selftest::{binomial_selftest, delta_selftest, delta_selftest_with};
pub use series::{Coeff, Difference, FormalSeries, Sign, SignedVar, Span, VarName, Window};
