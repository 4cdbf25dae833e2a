//! Closed form for `σ_n(ℓ)`: sequences in `I^n` whose bracket is `λ_z` with
//! `z = (-1)^{n/2} + p^ℓ`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::local::mu_int;
use super::qnum::{check_prime, pw, q_int_big, to_count};
use crate::error::{Error, Result};
use crate::BigCount;

pub(crate) fn check_sigma_args(p: u64, r: u32, n: usize, ell: u32) -> Result<()> {
    check_prime(p)?;
    if n < 2 || n % 2 == 1 {
        return Err(Error::OutOfRange(format!(
            "σ_n(ℓ) needs an even n >= 2, got {n}"
        )));
    }
    if r == 0 || !(1..=r).contains(&ell) {
        return Err(Error::OutOfRange(format!(
            "ell must lie in [1, {r}], got {ell}"
        )));
    }
    Ok(())
}

pub(crate) fn sigma_closed_int(p: u64, r: u32, n: usize, ell: u32) -> BigInt {
    let m = (n / 2) as u32;
    if ell == r {
        return match m {
            1 => BigInt::one(),
            2 => mu_int(r, p, r),
            // r = 1 would need [-1]_q below
            _ if r == 1 => BigInt::one(),
            _ => {
                let q = pw(p, m - 2);
                pw(p, (m - 1) * r) * q_int_big(r - 1, &q)
                    - pw(p, (m - 1) * r - 1) * q_int_big(r - 2, &q)
            }
        };
    }
    if ell == 1 || m == 1 {
        return BigInt::zero();
    }
    if m == 2 {
        return BigInt::from(ell - 1) * (pw(p, r) - pw(p, r - 1));
    }
    let q = pw(p, m - 2);
    let e = (2 * m - 3) * r + 1 - ell * (m - 2) - m;
    pw(p, e) * (pw(p, m - 1) - 1) * q_int_big(ell - 1, &q)
}

/// `σ_n(ℓ)` over Z/p^r from its closed form, for even n >= 2 and `1 <= ℓ <= r`.
pub fn sigma_closed(p: u64, r: u32, n: usize, ell: u32) -> Result<BigCount> {
    check_sigma_args(p, r, n, ell)?;
    to_count(sigma_closed_int(p, r, n, ell))
}
