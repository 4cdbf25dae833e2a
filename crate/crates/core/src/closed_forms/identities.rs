//! Rational-function identities used when proving the σ closed form,
//! evaluated exactly at sample points.
//!
//! Each check evaluates both sides over `Q` and compares them. Inputs that
//! make a denominator vanish are rejected with [`Error::ExcludedValue`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow(b: &BigRational, e: i64) -> BigRational {
    b.pow(e as i32)
}

/// `[n]_x` for a rational base by the summation form.
fn q_int(n: i64, x: &BigRational) -> BigRational {
    (0..n).map(|i| pow(x, i)).sum()
}

fn exclude(cond: bool, what: &str) -> Result<()> {
    if cond {
        Err(Error::ExcludedValue(what.to_string()))
    } else {
        Ok(())
    }
}

/// A point at which the long rational identity behind the σ recursion step is
/// evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongIdentitySample {
    pub p: BigRational,
    pub x: BigRational,
    pub u: BigRational,
    pub v: BigRational,
    pub y: BigRational,
    pub z: BigRational,
    pub ell: i64,
}

impl LongIdentitySample {
    pub fn from_integers(p: i64, x: i64, u: i64, v: i64, y: i64, z: i64, ell: i64) -> Self {
        Self {
            p: rat(p),
            x: rat(x),
            u: rat(u),
            v: rat(v),
            y: rat(y),
            z: rat(z),
            ell,
        }
    }

    fn check_excluded(&self) -> Result<()> {
        let Self { p, x, u, v, y, z, .. } = self;
        exclude(p.is_zero() || p.is_one(), "p must differ from 0 and 1")?;
        exclude(x.is_zero(), "x = 0")?;
        exclude(x == p, "x = p")?;
        exclude(*x == p * p, "x = p^2")?;
        exclude(x * x == *p, "x^2 = p")?;
        exclude(u.is_zero() || v.is_zero() || y.is_zero() || z.is_zero(), "u, v, y, z must be nonzero")
    }
}

/// Evaluates both sides of the long identity and compares them.
pub fn long_identity(s: &LongIdentitySample) -> Result<bool> {
    s.check_excluded()?;
    let LongIdentitySample { p, x, u, v, y, z, ell } = s;
    let l = rat(*ell);
    let one = BigRational::one();
    let p2 = p * p;
    let y_red = y - y / p;
    let xp = x / p - &one;
    let xp2 = x / &p2 - &one;

    let lhs = u * u * (x - &one) * z * (p * v / (x * z) - &one) / (v * x * y * &xp);

    let t1 = (&l - &one)
        * &y_red
        * (u * (&p2 * u / (x * y * y) - &one) / (y * &xp2)
            - u * (&p2 * &p2 * u / (x * x * y * y) - &one) / (p * y * &xp2));
    let t2 = (&l - &one) * p * u * u * &y_red * &y_red
        * (&p2 * (y.recip() - (p * z).recip()) / (x * (p.recip() - &one))
            - (y / u - p * z / (v * x)) / (p / x - &one))
        * &xp
        / (x * y * y * y * &xp2);
    let tri = (&l - &one) * y * y / z - (rat(2) * &l - rat(3)) * y * y / (p * z)
        + (&l - &one) * y * y / (&p2 * z);
    let t3 = tri * p * u * u * z * z * &xp * (&p2 * v / (x * z * z) - &one)
        / (v * x * y * y * y * &xp2);
    let inner = ((&l - &one) * &p2 * &p2 / (x * z) - (&l - rat(2)) * &p2 * p / (x * z) - &p2 / x)
        / ((p - &one) * (p - &one))
        + ((&l - rat(2)) * x * z / (p * v) - (&l - &one) * x * x * z / (&p2 * v) + &one)
            / (&xp * &xp);
    let t4 = p * u * u * &y_red * &y_red * &xp * inner / (x * y * y * y * &xp2);

    Ok(lhs == t1 + t2 + t3 - t4)
}

/// The three polynomial identities the long identity reduces to.
///
/// Returns `[a, b, c]`; all three hold for every input.
pub fn long_identity_polynomials(s: &LongIdentitySample) -> [bool; 3] {
    let LongIdentitySample { p, x, u, v, y, z, ell } = s;
    let l = rat(*ell);
    let one = BigRational::one();
    let p2 = p * p;
    let (u2, y2, z2) = (u * u, y * y, z * z);
    let xmp = x - p;
    let pm1 = p - &one;

    let a_lhs = p * &u2 * &y2
        * (&p2 * v * (p - x) * (p - x)
            + x * &z2 * (&p2 * (x - rat(2)) + rat(2) * p * x - rat(2) * x * x + x));
    let a_rhs = p * x * y * z * u * v * &xmp * &pm1 * (&p2 * u - x * &y2)
        - z * u * v * y * &pm1 * &xmp * (&p2 * &p2 * u - x * x * &y2)
        + &p2 * p * &u2 * v * y * z * (&one - p) * &xmp * &xmp
        - &p2 * &u2 * v * &y2 * (&one - p) * &xmp * &xmp
        + x * x * &y2 * y * z * u * v * &pm1 * &pm1 * &xmp
        - p * x * &y2 * &z2 * &u2 * &pm1 * &pm1 * &xmp
        + (&p2 + &one) * &y2 * &xmp * &xmp * &p2 * &u2 * v
        - (&p2 + &one) * &y2 * &xmp * &xmp * &u2 * &z2 * x
        + x * x * x * &z2 * &u2 * &y2 * &pm1 * &pm1
        - &p2 * &p2 * &y2 * &u2 * v * &xmp * &xmp;

    let b_lhs = p * x * &y2 * &z2 * &u2 * (&p2 * x - &p2 - x * x + x);
    let b_rhs = (&l - &one) * &a_lhs
        - (rat(2) * &l - rat(3)) * (p * &y2 * &xmp * &xmp * (&p2 * &u2 * v - &u2 * &z2 * x))
        + (&l - rat(2))
            * (&p2 * p * &u2 * v * &y2 * &xmp * &xmp - p * x * x * &z2 * &u2 * &y2 * &pm1 * &pm1);

    let c_lhs = &u2 * z * (x - &one) * &y2 * (x - &p2) * (&p2 * v - z * p * x);
    let c_rhs = b_lhs.clone() + &p2 * z * v * &xmp * &xmp * &u2 * &y2
        - &p2 * v * x * z * &u2 * &y2 * &pm1 * &pm1;

    [a_lhs == a_rhs, b_lhs == b_rhs, c_lhs == c_rhs]
}

/// Checks `α = β + γ` for the three rational functions of x that arise in the
/// `ℓ = r` step of the σ closed form; needs r >= 3 and x ∉ {0, 1}.
pub fn alpha_beta_gamma_identity(p: u64, r: u32, x: &BigRational) -> Result<bool> {
    exclude(p < 2, "p must be at least 2")?;
    exclude(r < 3, "r must be at least 3")?;
    exclude(x.is_zero() || x.is_one(), "x must differ from 0 and 1")?;
    let p = rat(p as i64);
    let r = i64::from(r);
    let one = BigRational::one();
    let rr = rat(r);
    let xp = x / &p;

    let alpha = pow(&p, r) * pow(x, r) * (pow(x, r - 1) - &one) * (&xp - &one)
        - pow(&p, r - 1) * pow(x, r) * (pow(x, r - 2) - &one) * (&xp - &one);

    let head = (&one - &rr) * pow(&p, 3 - r) / x + (&rr - rat(2)) * pow(&p, 2 - r) / x + &p / x;
    let tail = (x - &one) * (&one - &rr) * pow(x, 1 - r) + pow(x, 1 - r) * (pow(x, r - 1) - &one);
    let beta = pow(x, 2 * r - 1)
        * pow(&p, r - 2)
        * ((x - &one) * (x - &one) * head - (&p - &one) * (&p - &one) * tail);

    let gamma = (x - &one)
        * (pow(x, r) * (pow(&xp, r - 1) - &one) - pow(x, r) / &p * (pow(&xp, r - 2) - &one))
        * ((&rr - &one) * pow(&p, r) - (&rr - rat(2)) * pow(&p, r - 1));

    Ok(alpha == beta + gamma)
}

/// The finite sums `Σ_{i=1}^m p^{-i}` and `Σ_{j=1}^m j p^{-j}` against their
/// closed forms. Returns one flag per sum.
pub fn geometric_sum_identities(p: u64, m: u32) -> Result<[bool; 2]> {
    exclude(p < 2, "p must be at least 2")?;
    let p = rat(p as i64);
    let m = i64::from(m);
    let one = BigRational::one();
    let pm1 = &p - &one;

    let plain: BigRational = (1..=m).map(|i| pow(&p, -i)).sum();
    let plain_closed = (&one - pow(&p, -m)) / &pm1;

    let weighted: BigRational = (1..=m).map(|j| rat(j) * pow(&p, -j)).sum();
    let weighted_closed =
        pow(&p, -m) * ((rat(-1 - m)) * &p + rat(m) + pow(&p, m + 1)) / (&pm1 * &pm1);

    Ok([plain == plain_closed, weighted == weighted_closed])
}

/// `Σ_{j=ℓ+1}^{r-1} (p^{r-j} - p^{r-j-1})(p^r - p^{r-1})(j-1)` against its
/// closed form; needs r >= 2 and `1 <= ℓ <= r-1`.
pub fn valuation_weighted_sum_identity(p: u64, r: u32, ell: u32) -> Result<bool> {
    exclude(p < 2, "p must be at least 2")?;
    exclude(r < 2 || ell == 0 || ell >= r, "need r >= 2 and 1 <= ell <= r - 1")?;
    let p = rat(p as i64);
    let (r, l) = (i64::from(r), i64::from(ell));
    let lhs: BigRational = (l + 1..r)
        .map(|j| {
            (pow(&p, r - j) - pow(&p, r - j - 1)) * (pow(&p, r) - pow(&p, r - 1)) * rat(j - 1)
        })
        .sum();
    let rhs = pow(&p, r - 1) * (rat(-r) * &p + rat(r - 1))
        - pow(&p, 2 * r - 2 - l) * (-&p - rat(l) * &p + rat(l))
        - pow(&p, 2 * r - 2) * (-pow(&p, 2 - r) + pow(&p, 1 - r))
        + pow(&p, 2 * r - 2) * (-pow(&p, 1 - l) + pow(&p, -l));
    Ok(lhs == rhs)
}

/// `Σ_{j=2}^{s-1} p^{-j(m-1)} [j-1]_{p^{m-2}} (j-1)` against its closed form;
/// needs s >= 2 and m >= 3.
pub fn q_weighted_sum_identity(p: u64, s: u32, m: u32) -> Result<bool> {
    exclude(p < 2, "p must be at least 2")?;
    exclude(s < 2 || m < 3, "need s >= 2 and m >= 3")?;
    let p = rat(p as i64);
    let (s, m) = (i64::from(s), i64::from(m));
    let one = BigRational::one();
    let q = pow(&p, m - 2);
    let lhs: BigRational = (2..s)
        .map(|j| pow(&p, -j * (m - 1)) * q_int(j - 1, &q) * rat(j - 1))
        .sum();
    let pm1 = &p - &one;
    let pk = pow(&p, m - 1) - &one;
    let first = (rat(1 - s) * pow(&p, 4 - s - m) + rat(s - 2) * pow(&p, 3 - s - m) + pow(&p, 2 - m))
        / (&pm1 * &pm1);
    let second = (rat(1 - s) * pow(&p, (m - 1) * (2 - s))
        + rat(s - 2) * pow(&p, (m - 1) * (1 - s))
        + &one)
        / (&pk * &pk);
    let rhs = (first - second) / (&q - &one);
    Ok(lhs == rhs)
}

/// `((1-r)x^{2-r} + (r-2)x^{1-r} + 1) / (x - 1) = (1-r)x^{1-r} + x^{1-r}[r-1]_x`
/// for r >= 1 and x ∉ {0, 1}.
pub fn long_division_identity(x: &BigRational, r: u32) -> Result<bool> {
    exclude(x.is_zero() || x.is_one(), "x must differ from 0 and 1")?;
    exclude(r == 0, "r must be at least 1")?;
    let r = i64::from(r);
    let one = BigRational::one();
    let lhs = (rat(1 - r) * pow(x, 2 - r) + rat(r - 2) * pow(x, 1 - r) + &one) / (x - &one);
    let rhs = rat(1 - r) * pow(x, 1 - r) + pow(x, 1 - r) * q_int(r - 1, x);
    Ok(lhs == rhs)
}
