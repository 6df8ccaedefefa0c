//! Lower bounds for `M_k = sup ΣJ_k^{(m)}(F) / I_k(F)` over symmetric
//! polynomials supported on the simplex, and the prime counts they imply.

mod basis;
mod bounds;
mod forms;
mod integrals;
mod optimize;

pub use basis::{symmetric_basis, BasisElement, SymmetricPoly};
pub use bounds::{
    analytic_mk_bound, k_for_r, rk_threshold, smallest_k_exceeding, theorem_bound, BoundShape, KForR,
    Regime,
};
pub use forms::{build_forms, build_forms_for, i_k, j_total, QuadraticForms};
pub use integrals::{
    dirichlet_integral, factorial, monomial_integral, scaled_symmetric_integral, symmetric_integral,
};
pub use optimize::{maximize_forms, maximize_mk, MkResult, PIVOT_TOLERANCE};
