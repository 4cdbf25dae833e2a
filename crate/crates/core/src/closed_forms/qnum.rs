//! q-integers, q-binomials and the integer helpers shared by the formulas.

use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::BigCount;

/// `p^e` as a signed big integer.
pub(crate) fn pw(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// `a / b`, failing unless `b` divides `a`.
pub(crate) fn exact_div(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    if b.is_zero() {
        return Err(Error::InexactDivision {
            numerator: a.to_string(),
            denominator: b.to_string(),
        });
    }
    let (q, rem) = a.div_rem(b);
    if rem.is_zero() {
        Ok(q)
    } else {
        Err(Error::InexactDivision {
            numerator: a.to_string(),
            denominator: b.to_string(),
        })
    }
}

/// `value * p^e` for a possibly negative exponent; the division must be exact.
pub(crate) fn scale_by_power(value: &BigInt, p: u64, e: i64) -> Result<BigInt> {
    let mag = pw(p, e.unsigned_abs() as u32);
    if e >= 0 {
        Ok(value * mag)
    } else {
        exact_div(value, &mag)
    }
}

/// Converts a formula value to a count, rejecting negative results.
pub(crate) fn to_count(x: BigInt) -> Result<BigCount> {
    match x.sign() {
        BigSign::Minus => Err(Error::OutOfRange(format!(
            "formula produced a negative count {x}"
        ))),
        _ => Ok(x.magnitude().clone()),
    }
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if crate::ring::is_prime(p) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{p} is not prime")))
    }
}

/// `[m]_q = 1 + q + ... + q^{m-1}` for a big base.
pub(crate) fn q_int_big(m: u32, q: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    let mut term = BigInt::one();
    for _ in 0..m {
        acc += &term;
        term *= q;
    }
    acc
}

/// `[m]_q` by the summation form, valid for every q (including q = 1).
pub fn q_int(m: u32, q: u64) -> BigCount {
    q_int_big(m, &BigInt::from(q))
        .to_biguint()
        .expect("sum of powers of a nonnegative base")
}

pub(crate) fn q_binom2_big(m: u32, q: &BigInt) -> Result<BigInt> {
    if q.abs() <= BigInt::one() {
        return Err(Error::OutOfRange(format!(
            "q-binomial needs |q| >= 2, got {q}"
        )));
    }
    if m < 2 {
        return Ok(BigInt::zero());
    }
    let one = BigInt::one();
    let num = (q.pow(m) - &one) * (q.pow(m - 1) - &one);
    let den = (q - &one) * (q * q - &one);
    exact_div(&num, &den)
}

/// `binom(m, 2)_q = (q^m - 1)(q^{m-1} - 1) / ((q - 1)(q^2 - 1))`.
pub fn q_binom2(m: u32, q: u64) -> Result<BigCount> {
    to_count(q_binom2_big(m, &BigInt::from(q))?)
}
