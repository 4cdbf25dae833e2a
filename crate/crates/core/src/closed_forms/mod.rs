//! Closed formulae for quiddity-cycle counts over Z/p^r.
//!
//! Counts over the residue field `F_p` (written `ω_n`) are lifted to Z/p^r by
//! multiplying with a power of `|I| = p^{r-1}`. When n is even and `ε` agrees
//! with `(-1)^{n/2}`, the ideal-restricted count `σ_n(r)` enters as a
//! correction term.

mod identities;
mod local;
mod qnum;
mod sigma;

use num_bigint::BigInt;
use num_traits::One;

pub use identities::{
    alpha_beta_gamma_identity, long_identity, long_identity_polynomials,
    geometric_sum_identities, long_division_identity, q_weighted_sum_identity,
    valuation_weighted_sum_identity, LongIdentitySample,
};
pub use local::{count_uv_product, mu, n_j, sigma_coefficient_identity};
pub use qnum::{q_binom2, q_int};
pub use sigma::sigma_closed;

pub(crate) use local::{mu_int, n_j_int, sigma_coefficient_sum};
pub(crate) use qnum::{exact_div, pw, to_count};
pub(crate) use sigma::{check_sigma_args, sigma_closed_int};

use crate::error::{Error, Result};
use crate::matrix::Sign;
use crate::oracle::Oracle;
use crate::ring::RingCtx;
use crate::BigCount;
use qnum::{check_prime, q_binom2_big, q_int_big, scale_by_power};

/// Which branch of the quiddity formulas produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormulaCase {
    /// Odd n: `ω_n · p^{(r-1)(n-3)}`.
    Odd,
    /// Even n, p odd, `ε = -(-1)^{n/2}`: `ω_n · p^{(r-1)(n-3)}`.
    EvenOppositeSign,
    /// Even n, `ε = (-1)^{n/2}` in Z/p^r: `(ω_n - 1) · p^{(r-1)(n-3)} + σ_n(r)`.
    EvenMatchingSign,
    /// Even n, p = 2, r >= 2, `ε = -(-1)^{n/2}`: `(ω_n - 1) · p^{(r-1)(n-3)}`.
    EvenOppositeSignTwo,
}

/// How `ω_n` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OmegaSource {
    Formula,
    /// Small n: enumerated over `F_p`.
    Enumerated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaResult {
    pub value: BigCount,
    pub case: FormulaCase,
    pub omega_source: OmegaSource,
}

/// Whether `ε ≡ (-1)^{n/2}` in `F_p` (always true for p = 2).
fn sign_matches_mod_p(p: u64, n: usize, sign: Sign) -> bool {
    p == 2 || sign == Sign::alternating(n / 2)
}

pub(crate) fn omega_with_source(p: u64, n: usize, sign: Sign) -> Result<(BigInt, OmegaSource)> {
    check_prime(p)?;
    if n <= 4 {
        let ring = RingCtx::prime_power(p, 1)?;
        let count = Oracle::new(&ring)?.count_quiddity(n, sign)?;
        return Ok((BigInt::from(count), OmegaSource::Enumerated));
    }
    let q = BigInt::from(p);
    let value = if n % 2 == 1 {
        q_int_big(((n - 1) / 2) as u32, &(&q * &q))
    } else {
        let half = (n / 2) as u32;
        let base = (&q - 1) * q_binom2_big(half, &q)?;
        if sign_matches_mod_p(p, n, sign) {
            base + pw(p, half - 1)
        } else {
            base
        }
    };
    Ok((value, OmegaSource::Formula))
}

/// `ω_n`: the number of ε-quiddity cycles of length n over `F_p`.
///
/// Lengths up to 4 are enumerated; longer ones use the closed formula.
pub fn omega(p: u64, n: usize, sign: Sign) -> Result<BigCount> {
    to_count(omega_with_source(p, n, sign)?.0)
}

fn check_count_args(p: u64, r: u32, n: usize) -> Result<()> {
    check_prime(p)?;
    if r == 0 {
        return Err(Error::OutOfRange("r must be at least 1".into()));
    }
    if n < 2 {
        return Err(Error::OutOfRange(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

fn lift_exponent(r: u32, n: usize) -> i64 {
    i64::from(r - 1) * (n as i64 - 3)
}

/// Quiddity count over Z/p^r for odd n, or for even n with p odd and
/// `ε = -(-1)^{n/2}`: `ω_n · p^{(r-1)(n-3)}`.
pub fn count_quiddity_odd(p: u64, r: u32, n: usize, sign: Sign) -> Result<FormulaResult> {
    check_count_args(p, r, n)?;
    let case = if n % 2 == 1 {
        FormulaCase::Odd
    } else if sign_matches_mod_p(p, n, sign) {
        return Err(Error::UseEvenLengthTheorem { n });
    } else {
        FormulaCase::EvenOppositeSign
    };
    let (w, omega_source) = omega_with_source(p, n, sign)?;
    let value = scale_by_power(&w, p, lift_exponent(r, n))?;
    Ok(FormulaResult {
        value: to_count(value)?,
        case,
        omega_source,
    })
}

/// Quiddity count over Z/p^r for even n, covering every sign and prime.
pub fn count_quiddity_even(p: u64, r: u32, n: usize, sign: Sign) -> Result<FormulaResult> {
    check_count_args(p, r, n)?;
    if n % 2 == 1 {
        return Err(Error::OutOfRange(format!("n must be even, got {n}")));
    }
    // over Z/2 the two signs coincide
    let matching = sign == Sign::alternating(n / 2) || (p == 2 && r == 1);
    if !matching && p > 2 {
        return count_quiddity_odd(p, r, n, sign);
    }
    let (w, omega_source) = omega_with_source(p, n, sign)?;
    let lifted = scale_by_power(&(w - BigInt::one()), p, lift_exponent(r, n))?;
    let (value, case) = if matching {
        (lifted + sigma_closed_int(p, r, n, r), FormulaCase::EvenMatchingSign)
    } else {
        (lifted, FormulaCase::EvenOppositeSignTwo)
    };
    Ok(FormulaResult {
        value: to_count(value)?,
        case,
        omega_source,
    })
}

/// Quiddity count over Z/p^r by whichever formula applies.
pub fn count_quiddity(p: u64, r: u32, n: usize, sign: Sign) -> Result<FormulaResult> {
    if n % 2 == 1 {
        count_quiddity_odd(p, r, n, sign)
    } else {
        count_quiddity_even(p, r, n, sign)
    }
}
