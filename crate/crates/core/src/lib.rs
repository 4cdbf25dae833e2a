//! Exact counts of solutions to `eta(c_1) ... eta(c_n) = A` over Z/NZ.
//!
//! The crate has two independent routes to every count:
//!
//! - [`oracle`] enumerates all products by dynamic programming over SL_2(Z/N);
//! - [`closed_forms`] and [`recursions`] evaluate the closed formulae and the
//!   recursions for quiddity cycles, the ideal-restricted counts `σ_n(ℓ)` and
//!   the second-entry counts `π_{u,n}`.
//!
//! [`engine`] dispatches a count to either route (composing prime-power
//! counts through the Chinese remainder theorem) and [`verification`] runs
//! grids that compare them.

pub mod closed_forms;
pub mod engine;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod recursions;
pub mod ring;
pub mod verification;

pub use error::{Error, Result};
pub use matrix::{bracket, eta, Mat2, Sign};
pub use ring::{Residue, RingCtx, Valuation};

/// Arbitrary-precision nonnegative count.
pub type BigCount = num_bigint::BigUint;
