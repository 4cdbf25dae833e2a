//! Recursive counting: `σ_n(ℓ)` row by row, `π_{u,n}` and `τ_n` from the
//! second-entry split, and the class aggregation of their coefficients.

mod classes;
mod pi;
mod sigma;

pub use classes::{
    class_aggregate_check, class_aggregate_mismatch, pi_class_recursive, ClassId, ClassMismatch,
    Classes,
};
pub use pi::{pi_recursive, tau_recursive, xi, zeta, PiTable};
pub use sigma::{
    sigma_recursive, sigma_reduction_check, sigma_reduction_sides, valuation_class_check,
    SigmaTable,
};
