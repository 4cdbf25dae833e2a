//! The σ recursion: `σ_n(ℓ)` from the row `σ_{n-2}(·)`, plus oracle checks of
//! the reduction step it rests on.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::closed_forms::{
    check_sigma_args, mu_int, n_j_int, sigma_closed_int, sigma_coefficient_sum, to_count,
};
use crate::error::{Error, Result};
use crate::matrix::Sign;
use crate::oracle::{sigma_lookup, EntryDomain, Oracle};
use crate::ring::{Residue, RingCtx};
use crate::BigCount;

/// `σ_n(ℓ)` for even `n` in `[2, n_max]` and `ℓ` in `[1, r]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaTable {
    pub p: u64,
    pub r: u32,
    /// `rows[k]` holds n = 2k + 2; column `ℓ - 1` holds `σ_n(ℓ)`.
    rows: Vec<Vec<BigCount>>,
}

impl SigmaTable {
    pub fn get(&self, n: usize, ell: u32) -> Option<&BigCount> {
        if n < 2 || n % 2 == 1 || ell == 0 {
            return None;
        }
        self.rows.get(n / 2 - 1)?.get(ell as usize - 1)
    }

    pub fn row(&self, n: usize) -> Option<&[BigCount]> {
        if n < 2 || n % 2 == 1 {
            return None;
        }
        self.rows.get(n / 2 - 1).map(Vec::as_slice)
    }

    /// Largest n present.
    pub fn n_max(&self) -> usize {
        2 * self.rows.len()
    }

    /// `(n, row)` pairs in increasing n.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &[BigCount])> {
        self.rows
            .iter()
            .enumerate()
            .map(|(k, row)| (2 * k + 2, row.as_slice()))
    }
}

/// One step of the recursion, `σ_{n-2}(·) -> σ_n(·)`.
pub(crate) fn sigma_step(p: u64, r: u32, prev: &[BigInt]) -> Vec<BigInt> {
    let at = |j: u32| &prev[j as usize - 1];
    let weight = |j: u32| n_j_int(j, p, r) * at(j);
    (1..=r)
        .map(|ell| {
            if ell == r {
                (1..=r).map(|j| weight(j) * mu_int(j, p, r)).sum()
            } else {
                let below: BigInt = (1..ell).map(|j| weight(j) * mu_int(j, p, r)).sum();
                let above: BigInt = (ell + 1..=r).map(weight).sum::<BigInt>() * mu_int(ell, p, r);
                below + above + at(ell) * sigma_coefficient_sum(p, r, ell)
            }
        })
        .collect()
}

/// Builds the σ table up to `n_max` from the seeded rows n = 2 and n = 4.
pub fn sigma_recursive(p: u64, r: u32, n_max: usize) -> Result<SigmaTable> {
    check_sigma_args(p, r, n_max.max(2), 1)?;
    if n_max < 2 || n_max % 2 == 1 {
        return Err(Error::OutOfRange(format!(
            "n_max must be even and at least 2, got {n_max}"
        )));
    }
    let seed = |n| (1..=r).map(|ell| sigma_closed_int(p, r, n, ell)).collect::<Vec<_>>();
    let mut rows = vec![seed(2)];
    if n_max >= 4 {
        rows.push(seed(4));
    }
    while 2 * rows.len() < n_max {
        let next = sigma_step(p, r, rows.last().expect("seeded"));
        rows.push(next);
    }
    let rows = rows
        .into_iter()
        .map(|row| row.into_iter().map(to_count).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(SigmaTable { p, r, rows })
}

fn prime_power(ring: &RingCtx) -> Result<(u64, u32)> {
    ring.prime_power_parts()
        .ok_or(Error::NotPrimePower(ring.modulus()))
}

/// Both sides of the one-step reduction
/// `|σ_{z,n}| = Σ_{x ∈ -ε+I} |σ_{x,n-2}| · |{(u,v) ∈ I² : uv - 1 = x/z}|`,
/// with `ε ∈ {±1}` the sign congruent to z.
pub fn sigma_reduction_sides(
    oracle: &Oracle,
    z: Residue,
    n: usize,
) -> Result<(BigCount, BigCount)> {
    let ring = oracle.ring();
    let (p, _) = prime_power(ring)?;
    if n < 4 || n % 2 == 1 {
        return Err(Error::OutOfRange(format!("n must be even and >= 4, got {n}")));
    }
    let eps = if (z - ring.one()).value().is_multiple_of(p) {
        ring.one()
    } else if (z + ring.one()).value().is_multiple_of(p) {
        ring.minus_one()
    } else {
        return Err(Error::OutOfRange(format!("{z} is not congruent to ±1 mod {p}")));
    };
    let tables = oracle.tables(n, EntryDomain::Ideal)?;
    let ideal = ring.ideal()?;
    let z_inv = z.inverse()?;

    let mut products = vec![0u64; ring.modulus() as usize];
    for &u in &ideal {
        for &v in &ideal {
            products[(u * v).value() as usize] += 1;
        }
    }

    let lhs = sigma_lookup(&tables[n], z);
    let mut rhs = BigCount::zero();
    for &t in &ideal {
        let x = t - eps;
        let pairs = products[(x * z_inv + ring.one()).value() as usize];
        if pairs > 0 {
            rhs += sigma_lookup(&tables[n - 2], x) * BigCount::from(pairs);
        }
    }
    Ok((lhs, rhs))
}

/// Checks the one-step reduction of [`sigma_reduction_sides`] at `(z, n)`.
pub fn sigma_reduction_check(oracle: &Oracle, z: Residue, n: usize) -> Result<bool> {
    let (lhs, rhs) = sigma_reduction_sides(oracle, z, n)?;
    Ok(lhs == rhs)
}

/// Checks that `|σ_{z,n}|` depends on the unit z only through
/// `ν_p(z - (-1)^{n/2})`.
pub fn valuation_class_check(oracle: &Oracle, n: usize) -> Result<bool> {
    let ring = oracle.ring();
    let (_, r) = prime_power(ring)?;
    if n % 2 == 1 {
        return Err(Error::OutOfRange(format!("n must be even, got {n}")));
    }
    let table = oracle.count_all_targets(n, EntryDomain::Ideal)?;
    let centre = Sign::alternating(n / 2).residue(ring);
    let mut by_level: Vec<Option<BigCount>> = vec![None; r as usize + 1];
    for z in ring.units() {
        let level = ring.val_p(z - centre)?.get() as usize;
        let count = sigma_lookup(&table, z);
        match &by_level[level] {
            Some(seen) if *seen != count => return Ok(false),
            Some(_) => {}
            None => by_level[level] = Some(count),
        }
    }
    Ok(true)
}
