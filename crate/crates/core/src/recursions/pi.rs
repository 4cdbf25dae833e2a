//! Counts split by the second entry, `π_{u,n}`, for a fixed target A over
//! Z/p^r, and the sum over unit second entries, `τ_n`.
//!
//! A sequence `(c, u, v, b, ...)` shortens by one when `uv - 1` is a unit and
//! by two otherwise; `ξ_{x,u}` and `ζ_{x,u}` count the ways a shorter sequence
//! with second entry x lifts to one with second entry u.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::oracle::{fixed_second_from_tail, EntryDomain, Oracle};
use crate::ring::{Residue, RingCtx};
use crate::BigCount;

/// Valuations and prime powers of one prime-power ring, for fast `ξ`/`ζ`.
#[derive(Clone, Debug)]
pub(crate) struct LocalData {
    pub(crate) p: u64,
    pub(crate) r: u32,
    pub(crate) modulus: u64,
    val: Vec<u32>,
    ppow: Vec<u64>,
}

impl LocalData {
    pub(crate) fn new(ring: &RingCtx) -> Result<Self> {
        let (p, r) = ring
            .prime_power_parts()
            .ok_or(Error::NotPrimePower(ring.modulus()))?;
        let modulus = ring.modulus();
        let val = (0..modulus)
            .map(|a| {
                if a == 0 {
                    r
                } else {
                    let mut a = a;
                    let mut k = 0;
                    while a % p == 0 {
                        a /= p;
                        k += 1;
                    }
                    k
                }
            })
            .collect();
        let ppow = (0..=r).map(|k| p.pow(k)).collect();
        Ok(Self {
            p,
            r,
            modulus,
            val,
            ppow,
        })
    }

    pub(crate) fn is_unit(&self, x: u64) -> bool {
        self.val[x as usize] == 0
    }

    pub(crate) fn xi(&self, x: u64, u: u64) -> u64 {
        let vu = self.val[u as usize];
        if vu <= self.val[((x + 1) % self.modulus) as usize] {
            self.ppow[vu as usize]
        } else {
            0
        }
    }

    pub(crate) fn zeta(&self, x: u64, u: u64) -> u64 {
        if !self.is_unit(x) {
            return 0;
        }
        let s = (x + u) % self.modulus;
        let vs = self.val[s as usize];
        let (r, pr, pr1) = (u64::from(self.r), self.ppow[self.r as usize], self.ppow[self.r as usize - 1]);
        if vs == 0 {
            0
        } else if s == 0 {
            r * pr - (r - 1) * pr1
        } else {
            (pr - pr1) * u64::from(vs)
        }
    }
}

fn same_ring(ring: &RingCtx, x: Residue) -> Result<()> {
    if x.modulus() == ring.modulus() {
        Ok(())
    } else {
        Err(Error::ModulusMismatch(x.modulus(), ring.modulus()))
    }
}

/// `ξ_{x,u} = p^{ν(u)}` if `ν(u) <= ν(x+1)`, else 0.
pub fn xi(ring: &RingCtx, x: Residue, u: Residue) -> Result<BigCount> {
    same_ring(ring, x)?;
    same_ring(ring, u)?;
    Ok(LocalData::new(ring)?.xi(x.value(), u.value()).into())
}

/// `ζ_{x,u}`: 0 if x is not a unit or `x + u` is a unit; `rp^r - (r-1)p^{r-1}`
/// if `x + u = 0`; `(p^r - p^{r-1}) ν(x + u)` otherwise.
pub fn zeta(ring: &RingCtx, x: Residue, u: Residue) -> Result<BigCount> {
    same_ring(ring, x)?;
    same_ring(ring, u)?;
    Ok(LocalData::new(ring)?.zeta(x.value(), u.value()).into())
}

/// `π_{u,n}` for one target and every n in `[3, n_max]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiTable {
    pub target: Mat2,
    /// `rows[k]` holds n = k + 3, indexed by the value of u.
    rows: Vec<Vec<BigCount>>,
    units: Vec<bool>,
}

impl PiTable {
    pub const FIRST_N: usize = 3;

    pub fn row(&self, n: usize) -> Option<&[BigCount]> {
        self.rows.get(n.checked_sub(Self::FIRST_N)?).map(Vec::as_slice)
    }

    pub fn get(&self, n: usize, u: Residue) -> Option<&BigCount> {
        self.row(n)?.get(u.value() as usize)
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() + Self::FIRST_N - 1
    }

    /// Number of length-n sequences with bracket equal to the target.
    pub fn total(&self, n: usize) -> Option<BigCount> {
        self.row(n).map(|row| row.iter().sum())
    }

    /// `τ_n`: the sum of `π_{u,n}` over units u.
    pub fn tau(&self, n: usize) -> Option<BigCount> {
        self.row(n).map(|row| {
            row.iter()
                .zip(&self.units)
                .filter(|(_, &unit)| unit)
                .map(|(c, _)| c)
                .sum()
        })
    }
}

/// Oracle rows `π_{·,3}` and `π_{·,4}`.
fn base_rows(ring: &RingCtx, target: &Mat2) -> Result<[Vec<BigCount>; 2]> {
    let tails = Oracle::new(ring)?.tables(2, EntryDomain::All)?;
    let row = |n: usize| fixed_second_from_tail(ring, &tails[n - 2], n, target).counts;
    Ok([row(3), row(4)])
}

fn check_target(ring: &RingCtx, target: &Mat2) -> Result<()> {
    if target.modulus() != ring.modulus() {
        return Err(Error::ModulusMismatch(target.modulus(), ring.modulus()));
    }
    Ok(())
}

/// Fills `π_{u,n}` for n = 5..=n_max from the oracle rows n = 3, 4 by
/// `π_{u,n} = Σ_{x unit} (π_{x,n-1} ξ_{x,u} + π_{x,n-2} ζ_{x,u})`.
pub fn pi_recursive(ring: &RingCtx, target: &Mat2, n_max: usize) -> Result<PiTable> {
    let local = LocalData::new(ring)?;
    check_target(ring, target)?;
    if n_max < 4 {
        return Err(Error::OutOfRange(format!("n_max must be at least 4, got {n_max}")));
    }
    let units: Vec<bool> = (0..local.modulus).map(|x| local.is_unit(x)).collect();
    let unit_values: Vec<u64> = (0..local.modulus).filter(|&x| local.is_unit(x)).collect();

    let [three, four] = base_rows(ring, target)?;
    let mut rows = vec![three, four];
    for _ in 5..=n_max {
        let (prev2, prev1) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
        let next: Vec<BigCount> = (0..local.modulus)
            .into_par_iter()
            .map(|u| {
                let mut acc = BigCount::zero();
                for &x in &unit_values {
                    let a = local.xi(x, u);
                    if a != 0 && !prev1[x as usize].is_zero() {
                        acc += &prev1[x as usize] * a;
                    }
                    let b = local.zeta(x, u);
                    if b != 0 && !prev2[x as usize].is_zero() {
                        acc += &prev2[x as usize] * b;
                    }
                }
                acc
            })
            .collect();
        rows.push(next);
    }
    Ok(PiTable {
        target: *target,
        rows,
        units,
    })
}

/// `τ_n` for n = 3..=n_max: oracle values for n = 3, 4, then
/// `τ_n = (p^r - p^{r-1}) τ_{n-1} + p^{2r-1} τ_{n-2}`.
///
/// Entry k of the result is `τ_{k+3}`.
pub fn tau_recursive(ring: &RingCtx, target: &Mat2, n_max: usize) -> Result<Vec<BigCount>> {
    let local = LocalData::new(ring)?;
    check_target(ring, target)?;
    if n_max < 4 {
        return Err(Error::OutOfRange(format!("n_max must be at least 4, got {n_max}")));
    }
    let (p, r) = (local.p, local.r);
    let unit_sum = |row: &[BigCount]| -> BigCount {
        row.iter()
            .enumerate()
            .filter(|(x, _)| local.is_unit(*x as u64))
            .map(|(_, c)| c)
            .sum()
    };
    let [three, four] = base_rows(ring, target)?;
    let mut out = vec![unit_sum(&three), unit_sum(&four)];
    let a = BigCount::from(p.pow(r) - p.pow(r - 1));
    let b = BigCount::from(p).pow(2 * r - 1);
    for _ in 5..=n_max {
        let k = out.len();
        let next = &a * &out[k - 1] + &b * &out[k - 2];
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Sign;

    fn big(x: u64) -> BigCount {
        BigCount::from(x)
    }

    /// Every matrix of determinant 1 over the ring.
    fn sl2(ring: &RingCtx) -> Vec<Mat2> {
        let m = ring.modulus() as i64;
        let mut out = Vec::new();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let t = Mat2::from_i64(ring, [a, b, c, d]);
                        if t.det() == ring.one() {
                            out.push(t);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn xi_zeta_examples() {
        let z8 = RingCtx::new(8).unwrap();
        assert_eq!(xi(&z8, z8.residue(3), z8.residue(2)).unwrap(), big(2));
        assert_eq!(xi(&z8, z8.residue(1), z8.residue(4)).unwrap(), big(0));
        assert_eq!(xi(&z8, z8.residue(7), z8.residue(0)).unwrap(), big(8));
        let z9 = RingCtx::new(9).unwrap();
        assert_eq!(zeta(&z9, z9.residue(1), z9.residue(8)).unwrap(), big(15));
        assert_eq!(zeta(&z9, z9.residue(1), z9.residue(2)).unwrap(), big(6));
        assert_eq!(zeta(&z9, z9.residue(3), z9.residue(6)).unwrap(), big(0));
        assert_eq!(zeta(&z9, z9.residue(1), z9.residue(1)).unwrap(), big(0));
        assert!(xi(&z9, z8.one(), z9.one()).is_err());
        let z12 = RingCtx::new(12).unwrap();
        assert!(zeta(&z12, z12.one(), z12.one()).is_err());
    }

    #[test]
    fn coefficient_meaning() {
        // ξ_{x,u} = |{v : uv - 1 = x}| for units x
        // ζ_{x,u} = |{(v, b) : uv - 1 non-unit, ((vb-1)(uv-1) - 1)/v = x}|
        for m in [4u64, 8, 9, 25, 27] {
            let ring = RingCtx::new(m).unwrap();
            let local = LocalData::new(&ring).unwrap();
            for x in ring.units() {
                for u in ring.elements() {
                    let a = ring.elements().filter(|&v| u * v - ring.one() == x).count() as u64;
                    assert_eq!(local.xi(x.value(), u.value()), a, "Z/{m}, x = {x}, u = {u}");
                    let mut b = 0;
                    for v in ring.units() {
                        let w = u * v - ring.one();
                        if w.is_unit() {
                            continue;
                        }
                        let v_inv = v.inverse().unwrap();
                        for bb in ring.elements() {
                            if ((v * bb - ring.one()) * w - ring.one()) * v_inv == x {
                                b += 1;
                            }
                        }
                    }
                    assert_eq!(local.zeta(x.value(), u.value()), b, "Z/{m}, x = {x}, u = {u}");
                }
            }
        }
    }

    #[test]
    fn pi_examples() {
        let z4 = RingCtx::new(4).unwrap();
        let minus = Mat2::signed_identity(&z4, Sign::Minus);
        assert_eq!(pi_recursive(&z4, &minus, 5).unwrap().total(5), Some(big(20)));

        let z9 = RingCtx::new(9).unwrap();
        let t = pi_recursive(&z9, &Mat2::signed_identity(&z9, Sign::Minus), 6).unwrap();
        assert_eq!(t.total(6), Some(big(999)));
        let t = pi_recursive(&z9, &Mat2::identity(&z9), 6).unwrap();
        assert_eq!(t.total(6), Some(big(702)));
        assert_eq!(t.n_max(), 6);
        assert!(pi_recursive(&RingCtx::new(6).unwrap(), &Mat2::identity(&RingCtx::new(6).unwrap()), 6).is_err());
    }

    #[test]
    fn pi_matches_oracle_for_every_target() {
        for (m, n_max) in [(4u64, 8usize), (8, 7), (9, 7)] {
            let ring = RingCtx::new(m).unwrap();
            let oracle = Oracle::new(&ring).unwrap();
            let tails = oracle.tables(n_max - 2, EntryDomain::All).unwrap();
            for target in sl2(&ring) {
                let table = pi_recursive(&ring, &target, n_max).unwrap();
                for n in 3..=n_max {
                    let expected = fixed_second_from_tail(&ring, &tails[n - 2], n, &target);
                    assert_eq!(table.row(n).unwrap(), expected.counts.as_slice(), "Z/{m}, {target}, n = {n}");
                }
            }
        }
    }

    #[test]
    fn tau_matches_pi() {
        let z2 = RingCtx::new(2).unwrap();
        let tau = tau_recursive(&z2, &Mat2::identity(&z2), 10).unwrap();
        for k in 2..tau.len() {
            assert_eq!(tau[k], &tau[k - 1] + big(2) * &tau[k - 2]);
        }
        for m in [2u64, 4, 9, 25] {
            let ring = RingCtx::new(m).unwrap();
            for target in [Mat2::identity(&ring), Mat2::signed_identity(&ring, Sign::Minus), Mat2::from_i64(&ring, [1, 1, 0, 1])] {
                let pi = pi_recursive(&ring, &target, 9).unwrap();
                let tau = tau_recursive(&ring, &target, 9).unwrap();
                for n in 3..=9 {
                    assert_eq!(Some(tau[n - 3].clone()), pi.tau(n), "Z/{m}, {target}, n = {n}");
                }
            }
        }
    }
}
