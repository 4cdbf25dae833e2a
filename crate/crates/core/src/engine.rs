//! One entry point per quantity, computed by a chosen engine.
//!
//! Over a composite modulus the formula and recursion engines work on each
//! prime-power component and multiply: a bracket equals A over Z/N exactly
//! when it equals the reduction of A over every component. The oracle always
//! enumerates over Z/N itself, so comparing engines also checks the CRT step.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::closed_forms;
use crate::error::{Error, Result};
use crate::matrix::{Mat2, Sign};
use crate::oracle::Oracle;
use crate::recursions;
use crate::ring::RingCtx;
use crate::BigCount;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    Formula,
    Recursion,
    Oracle,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Formula, Engine::Recursion, Engine::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Formula => "formula",
            Engine::Recursion => "recursion",
            Engine::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(Engine::Formula),
            "recursion" => Ok(Engine::Recursion),
            "oracle" => Ok(Engine::Oracle),
            other => Err(Error::OutOfRange(format!("unknown engine {other:?}"))),
        }
    }
}

fn prime_power(ring: &RingCtx) -> Result<(u64, u32)> {
    ring.prime_power_parts()
        .ok_or(Error::NotPrimePower(ring.modulus()))
}

/// Multiplies a per-component count over the prime-power factors of the ring.
fn over_components(
    ring: &RingCtx,
    mut f: impl FnMut(&RingCtx) -> Result<BigCount>,
) -> Result<BigCount> {
    let mut acc = BigCount::one();
    for part in ring.components() {
        let c = f(&part)?;
        if c.is_zero() {
            return Ok(c);
        }
        acc *= c;
    }
    Ok(acc)
}

/// Number of length-n sequences with bracket `target`, via the `π` recursion
/// on one prime-power ring.
fn recursive_target_count(ring: &RingCtx, n: usize, target: &Mat2) -> Result<BigCount> {
    if n < 3 {
        // the recursion starts at n = 3; shorter lengths are enumerated
        return Ok(Oracle::new(ring)?.count_all_targets(n, crate::oracle::EntryDomain::All)?.get(target));
    }
    let table = recursions::pi_recursive(ring, target, n.max(4))?;
    Ok(table.total(n).expect("row n was computed"))
}

/// Number of ε-quiddity cycles of length n over Z/N.
pub fn count_quiddity(ring: &RingCtx, n: usize, sign: Sign, engine: Engine) -> Result<BigCount> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    match engine {
        Engine::Formula => over_components(ring, |part| {
            let (p, r) = prime_power(part)?;
            if n == 1 {
                // η(c) has a 1 below the diagonal
                return Ok(BigCount::zero());
            }
            Ok(closed_forms::count_quiddity(p, r, n, sign)?.value)
        }),
        Engine::Recursion => over_components(ring, |part| {
            recursive_target_count(part, n, &Mat2::signed_identity(part, sign))
        }),
        Engine::Oracle => Oracle::new(ring)?.count_quiddity(n, sign),
    }
}

/// Number of length-n sequences with bracket `target` over Z/N.
///
/// The formula engine only handles `±Id`.
pub fn count_target(ring: &RingCtx, n: usize, target: &Mat2, engine: Engine) -> Result<BigCount> {
    if target.modulus() != ring.modulus() {
        return Err(Error::ModulusMismatch(target.modulus(), ring.modulus()));
    }
    if target.det() != ring.one() {
        return Ok(BigCount::zero());
    }
    match engine {
        Engine::Formula => {
            for sign in [Sign::Plus, Sign::Minus] {
                if *target == Mat2::signed_identity(ring, sign) {
                    return count_quiddity(ring, n, sign, engine);
                }
            }
            Err(Error::Unsupported(
                "closed formulas cover only the targets +Id and -Id".into(),
            ))
        }
        Engine::Recursion => over_components(ring, |part| {
            recursive_target_count(part, n, &target.reduce(part)?)
        }),
        Engine::Oracle => Ok(Oracle::new(ring)?
            .count_all_targets(n, crate::oracle::EntryDomain::All)?
            .get(target)),
    }
}

/// `σ_n(ℓ)` over Z/p^r.
pub fn sigma(p: u64, r: u32, n: usize, ell: u32, engine: Engine) -> Result<BigCount> {
    match engine {
        Engine::Formula => closed_forms::sigma_closed(p, r, n, ell),
        Engine::Recursion => {
            closed_forms::check_sigma_args(p, r, n, ell)?;
            let table = recursions::sigma_recursive(p, r, n)?;
            Ok(table.get(n, ell).cloned().expect("row n was computed"))
        }
        Engine::Oracle => {
            closed_forms::check_sigma_args(p, r, n, ell)?;
            Oracle::new(&RingCtx::prime_power(p, r)?)?.count_sigma(n, ell)
        }
    }
}

/// `π_{u,n}` for every u (indexed by residue value) over Z/p^r.
pub fn pi(ring: &RingCtx, target: &Mat2, n: usize, engine: Engine) -> Result<Vec<BigCount>> {
    prime_power(ring)?;
    if n < 3 {
        return Err(Error::OutOfRange(format!("n must be at least 3, got {n}")));
    }
    match engine {
        Engine::Formula => Err(Error::Unsupported(
            "there is no closed formula for π; use the recursion or the oracle".into(),
        )),
        Engine::Recursion => {
            let table = recursions::pi_recursive(ring, target, n.max(4))?;
            Ok(table.row(n).expect("row n was computed").to_vec())
        }
        Engine::Oracle => Ok(Oracle::new(ring)?.count_fixed_second(n, target)?.counts),
    }
}

/// `τ_n`, the sum of `π_{u,n}` over units u, over Z/p^r.
pub fn tau(ring: &RingCtx, target: &Mat2, n: usize, engine: Engine) -> Result<BigCount> {
    match engine {
        Engine::Recursion => {
            prime_power(ring)?;
            if n < 3 {
                return Err(Error::OutOfRange(format!("n must be at least 3, got {n}")));
            }
            let seq = recursions::tau_recursive(ring, target, n.max(4))?;
            Ok(seq[n - 3].clone())
        }
        _ => {
            let row = pi(ring, target, n, engine)?;
            Ok(ring
                .units()
                .map(|u| &row[u.value() as usize])
                .sum())
        }
    }
}

/// Compares the oracle over Z/N with the product of oracle counts over the
/// prime-power components, for every target of determinant 1 and every length
/// up to `n_max`. Returns the first disagreeing `(n, target)`.
pub fn crt_product_mismatch(ring: &RingCtx, n_max: usize) -> Result<Option<(usize, Mat2)>> {
    let parts = ring.components();
    let whole = Oracle::new(ring)?.tables(n_max, crate::oracle::EntryDomain::All)?;
    let split = parts
        .iter()
        .map(|part| Oracle::new(part)?.tables(n_max, crate::oracle::EntryDomain::All))
        .collect::<Result<Vec<_>>>()?;
    for n in 0..=n_max {
        for target in whole[n].targets() {
            let mut product = BigCount::one();
            for (part, tables) in parts.iter().zip(&split) {
                product *= tables[n].get(&target.reduce(part)?);
            }
            if product != whole[n].get(&target) {
                return Ok(Some((n, target)));
            }
        }
    }
    Ok(None)
}
