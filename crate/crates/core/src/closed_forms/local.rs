//! Counts attached to the maximal ideal of Z/p^r: `μ(j)`, `n_j` and the number
//! of factorizations `a = uv` inside the ideal.

use num_bigint::BigInt;

use super::qnum::{check_prime, pw, to_count};
use crate::error::{Error, Result};
use crate::ring::{Residue, RingCtx};
use crate::BigCount;

fn check_level(j: u32, r: u32) -> Result<()> {
    if r == 0 || !(1..=r).contains(&j) {
        return Err(Error::OutOfRange(format!(
            "level must lie in [1, {r}], got {j}"
        )));
    }
    Ok(())
}

pub(crate) fn mu_int(j: u32, p: u64, r: u32) -> BigInt {
    let (r_i, j_i) = (BigInt::from(r), BigInt::from(j));
    if j == r {
        // for r = 1 the second term is negative and the value is 1
        (&r_i - 1) * pw(p, r) - (&r_i - 2) * pw(p, r - 1)
    } else {
        (pw(p, r) - pw(p, r - 1)) * (j_i - 1)
    }
}

pub(crate) fn n_j_int(j: u32, p: u64, r: u32) -> BigInt {
    if j == r {
        BigInt::from(1)
    } else {
        pw(p, r - j) - pw(p, r - j - 1)
    }
}

/// `μ(j)`: the number of pairs `(u, v)` in the ideal with `uv` equal to a
/// fixed element of valuation j.
pub fn mu(j: u32, p: u64, r: u32) -> Result<BigCount> {
    check_prime(p)?;
    check_level(j, r)?;
    to_count(mu_int(j, p, r))
}

/// `n_j`: the number of elements of Z/p^r with valuation exactly j.
pub fn n_j(j: u32, p: u64, r: u32) -> Result<BigCount> {
    check_prime(p)?;
    check_level(j, r)?;
    to_count(n_j_int(j, p, r))
}

/// `|{(u, v) in I x I : uv = a}|` for a non-unit `a` of a prime-power ring.
pub fn count_uv_product(ring: &RingCtx, a: Residue) -> Result<BigCount> {
    let (p, r) = ring
        .prime_power_parts()
        .ok_or(Error::NotPrimePower(ring.modulus()))?;
    let nu = ring.val_p(a)?.get();
    if nu == 0 {
        return Err(Error::OutOfRange(format!(
            "{a} is a unit; products of ideal elements are not"
        )));
    }
    to_count(mu_int(nu, p, r))
}

/// Checks that `μ(ℓ)(p-2)p^{r-ℓ-1} + Σ_{j=ℓ+1}^{r} n_j μ(j)` equals the
/// trinomial `(ℓ-1)p^{2r-ℓ} - (2ℓ-3)p^{2r-ℓ-1} + (ℓ-1)p^{2r-ℓ-2}`.
pub fn sigma_coefficient_identity(p: u64, r: u32, ell: u32) -> Result<bool> {
    check_prime(p)?;
    if r < 2 || !(1..r).contains(&ell) {
        return Err(Error::OutOfRange(format!(
            "need r >= 2 and 1 <= ell <= r - 1, got r = {r}, ell = {ell}"
        )));
    }
    Ok(sigma_coefficient_sum(p, r, ell) == sigma_coefficient_closed(p, r, ell))
}

/// Left side of [`sigma_coefficient_identity`]; also the diagonal weight of the
/// σ recursion.
pub(crate) fn sigma_coefficient_sum(p: u64, r: u32, ell: u32) -> BigInt {
    let head = mu_int(ell, p, r) * (BigInt::from(p) - 2) * pw(p, r - ell - 1);
    (ell + 1..=r).fold(head, |acc, j| acc + n_j_int(j, p, r) * mu_int(j, p, r))
}

pub(crate) fn sigma_coefficient_closed(p: u64, r: u32, ell: u32) -> BigInt {
    let l = BigInt::from(ell);
    let e = 2 * r - ell;
    (&l - 1) * pw(p, e) - (2 * &l - 3) * pw(p, e - 1) + (&l - 1) * pw(p, e - 2)
}
