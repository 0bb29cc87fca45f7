//! Finite-dimensional vertex coalgebras given by their coefficient
//! coproducts, and checkers for the axioms.

mod cb;
mod checks;
mod io;
mod model;
mod series_checks;
mod window;

pub use cb::{check_cb, first_column_difference, CbEvaluator, CbTerm};
pub use checks::{
    check_bundle, check_bundle_in, check_cb_region, check_coassociator, check_cocommutator, check_cocreation,
    check_coskew, check_coskew_all, check_dstar_bracket, check_dstar_formula, check_dstar_properties,
    check_left_counit, check_weak_cocreation, coassociator_sides, cocommutator_sides, coskew_range, coskew_sides,
    effective_window, holds_at, Bundle,
};
pub use io::{parse_coalgebra, write_coalgebra};
pub use model::{nilpotency_index, CoproductFamily, Counit, DStarData, VertexCoalgebra};
pub use series_checks::{co_jacobi_series_at, counit_nabla, exponential, nabla};
pub use window::EffectiveWindow;
