//! Index triples, the two-of-three propagation rule and closure
//! certificates.

mod closure;
mod point;
mod seeds;
mod validate;

pub use closure::{closure_of, minimal_margin, propagate, Certificate, GapReport, Orientation, Step};
pub use point::{Interval, LatticeBox, LatticePoint};
pub use seeds::{SeedKind, SeedSet};
pub use validate::{check_seeds, check_shift_recurrence, check_shift_recurrence_region, cross_validate};
