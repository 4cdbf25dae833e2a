//! Arithmetic in the residue ring Z/NZ.
//!
//! A [`RingCtx`] fixes the modulus together with its prime factorization.
//! [`Residue`] values are canonical representatives in `[0, N)` that carry
//! their modulus, so mixing residues of different rings is caught at runtime.
//! For prime-power rings Z/p^r the p-adic valuation follows the convention
//! `val_p(0) = r`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest supported modulus (exclusive). Keeps products of two residues in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 32;

/// A fixed modulus N with its factorization into prime powers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingCtx {
    modulus: u64,
    factors: Vec<(u64, u32)>,
}

impl RingCtx {
    pub fn new(modulus: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&modulus) {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(Self {
            modulus,
            factors: factorize(modulus),
        })
    }

    /// The ring Z/p^r. Fails if `p` is not prime or `r == 0`.
    pub fn prime_power(p: u64, r: u32) -> Result<Self> {
        if r == 0 || !is_prime(p) {
            return Err(Error::OutOfRange(format!(
                "Z/p^r needs a prime p and r >= 1, got p = {p}, r = {r}"
            )));
        }
        let modulus = p
            .checked_pow(r)
            .filter(|&m| m < MAX_MODULUS)
            .ok_or(Error::InvalidModulus(u64::MAX))?;
        Self::new(modulus)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Prime factorization as `(p, r)` pairs in increasing order of `p`.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    /// `(p, r)` for a prime-power ring, `None` otherwise.
    pub fn prime_power_parts(&self) -> Option<(u64, u32)> {
        match self.factors.as_slice() {
            [single] => Some(*single),
            _ => None,
        }
    }

    fn require_prime_power(&self) -> Result<(u64, u32)> {
        self.prime_power_parts()
            .ok_or(Error::NotPrimePower(self.modulus))
    }

    /// Reduces an arbitrary integer into the ring.
    pub fn residue(&self, value: i64) -> Residue {
        let m = self.modulus as i128;
        Residue {
            value: (value as i128).rem_euclid(m) as u64,
            modulus: self.modulus,
        }
    }

    pub fn zero(&self) -> Residue {
        self.residue(0)
    }

    pub fn one(&self) -> Residue {
        self.residue(1)
    }

    /// `-1`, stored as `N - 1`.
    pub fn minus_one(&self) -> Residue {
        self.residue(-1)
    }

    /// All residues `0, 1, ..., N-1`.
    pub fn elements(&self) -> impl Iterator<Item = Residue> + '_ {
        (0..self.modulus).map(move |value| Residue {
            value,
            modulus: self.modulus,
        })
    }

    pub fn units(&self) -> impl Iterator<Item = Residue> + '_ {
        self.elements().filter(Residue::is_unit)
    }

    /// Elements of the maximal ideal `I = pR` of a prime-power ring.
    pub fn ideal(&self) -> Result<Vec<Residue>> {
        let (p, _) = self.require_prime_power()?;
        Ok(self.elements().filter(|a| a.value % p == 0).collect())
    }

    /// `|I| = p^(r-1)` for a prime-power ring.
    pub fn ideal_size(&self) -> Result<u64> {
        let (p, _) = self.require_prime_power()?;
        Ok(self.modulus / p)
    }

    /// p-adic valuation in Z/p^r with `val_p(0) = r`.
    pub fn val_p(&self, a: Residue) -> Result<Valuation> {
        let (p, r) = self.require_prime_power()?;
        self.check(a)?;
        if a.value == 0 {
            return Ok(Valuation(r));
        }
        let mut v = a.value;
        let mut k = 0;
        while v.is_multiple_of(p) {
            v /= p;
            k += 1;
        }
        Ok(Valuation(k))
    }

    pub fn inverse(&self, a: Residue) -> Result<Residue> {
        self.check(a)?;
        a.inverse()
    }

    /// The component rings Z/p_i^{r_i}, in the order of [`RingCtx::factors`].
    pub fn components(&self) -> Vec<RingCtx> {
        self.factors
            .iter()
            .map(|&(p, r)| RingCtx::prime_power(p, r).expect("factor of a valid modulus"))
            .collect()
    }

    /// Reduces `a` modulo each prime-power factor.
    pub fn crt_split(&self, a: Residue) -> Result<Vec<Residue>> {
        self.check(a)?;
        Ok(self
            .factors
            .iter()
            .map(|&(p, r)| {
                let q = p.pow(r);
                Residue {
                    value: a.value % q,
                    modulus: q,
                }
            })
            .collect())
    }

    /// Inverse of [`RingCtx::crt_split`]. The parts must be residues modulo the
    /// prime-power factors of N, in factorization order.
    pub fn crt_combine(&self, parts: &[Residue]) -> Result<Residue> {
        if parts.len() != self.factors.len() {
            return Err(Error::CrtMismatch(self.modulus));
        }
        let mut acc: u128 = 0;
        for (part, &(p, r)) in parts.iter().zip(&self.factors) {
            let q = p.pow(r);
            if part.modulus != q {
                return Err(Error::CrtMismatch(self.modulus));
            }
            let cofactor = self.modulus / q;
            // cofactor * (cofactor^-1 mod q) is 1 mod q and 0 mod every other factor
            let lift = Residue {
                value: cofactor % q,
                modulus: q,
            }
            .inverse()?;
            let basis = cofactor as u128 * lift.value as u128 % self.modulus as u128;
            acc = (acc + basis * part.value as u128) % self.modulus as u128;
        }
        Ok(Residue {
            value: acc as u64,
            modulus: self.modulus,
        })
    }

    fn check(&self, a: Residue) -> Result<()> {
        if a.modulus == self.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch(self.modulus, a.modulus))
        }
    }
}

impl fmt::Display for RingCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}", self.modulus)
    }
}

/// Canonical representative of a class in Z/NZ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    /// The residue of `value` in the same ring as `self`.
    pub fn sibling(self, value: i64) -> Residue {
        Residue {
            value: (value as i128).rem_euclid(self.modulus as i128) as u64,
            modulus: self.modulus,
        }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        self.value.gcd(&self.modulus) == 1
    }

    pub fn inverse(self) -> Result<Residue> {
        let egcd = (self.value as i64).extended_gcd(&(self.modulus as i64));
        if egcd.gcd != 1 {
            return Err(Error::NotUnit {
                value: self.value,
                modulus: self.modulus,
            });
        }
        Ok(Residue {
            value: egcd.x.rem_euclid(self.modulus as i64) as u64,
            modulus: self.modulus,
        })
    }

    /// Reduction along Z/N -> Z/M for a divisor M of N.
    pub fn reduce(self, ring: &RingCtx) -> Result<Residue> {
        if !self.modulus.is_multiple_of(ring.modulus) {
            return Err(Error::ModulusMismatch(self.modulus, ring.modulus));
        }
        Ok(Residue {
            value: self.value % ring.modulus,
            modulus: ring.modulus,
        })
    }

    /// Symmetric representative in `(-N/2, N/2]`, handy for display.
    pub fn signed(self) -> i64 {
        if self.value > self.modulus / 2 {
            self.value as i64 - self.modulus as i64
        } else {
            self.value as i64
        }
    }

    fn same_ring(self, other: Residue) -> u64 {
        assert_eq!(
            self.modulus, other.modulus,
            "residues of different rings combined"
        );
        self.modulus
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        let m = self.same_ring(rhs);
        Residue {
            value: (self.value + rhs.value) % m,
            modulus: m,
        }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        let m = self.same_ring(rhs);
        Residue {
            value: (self.value + m - rhs.value) % m,
            modulus: m,
        }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        let m = self.same_ring(rhs);
        Residue {
            value: self.value * rhs.value % m,
            modulus: m,
        }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

/// p-adic valuation of an element of Z/p^r, an integer in `[0, r]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(pub u32);

impl Valuation {
    pub fn get(self) -> u32 {
        self.0
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valuation_examples() {
        let z16 = RingCtx::new(16).unwrap();
        assert_eq!(z16.val_p(z16.residue(12)).unwrap(), Valuation(2));
        assert_eq!(z16.val_p(z16.zero()).unwrap(), Valuation(4));
        assert_eq!(z16.val_p(z16.residue(5)).unwrap(), Valuation(0));
    }

    #[test]
    fn valuation_rejects_composite() {
        let z12 = RingCtx::new(12).unwrap();
        assert_eq!(z12.val_p(z12.one()), Err(Error::NotPrimePower(12)));
    }

    #[test]
    fn inverse_examples() {
        for n in [2, 7, 12, 60] {
            let ring = RingCtx::new(n).unwrap();
            assert_eq!(ring.inverse(ring.one()).unwrap(), ring.one());
        }
        let z8 = RingCtx::new(8).unwrap();
        assert_eq!(z8.inverse(z8.residue(3)).unwrap().value(), 3);
        let z9 = RingCtx::new(9).unwrap();
        assert_eq!(z9.inverse(z9.residue(7)).unwrap().value(), 4);
        assert!(matches!(
            z9.inverse(z9.residue(3)),
            Err(Error::NotUnit { value: 3, modulus: 9 })
        ));
    }

    #[test]
    fn crt_examples() {
        let z12 = RingCtx::new(12).unwrap();
        let parts = z12.crt_split(z12.residue(7)).unwrap();
        assert_eq!(
            parts.iter().map(|r| (r.value(), r.modulus())).collect::<Vec<_>>(),
            vec![(3, 4), (1, 3)]
        );
        let z4 = RingCtx::new(4).unwrap();
        let z3 = RingCtx::new(3).unwrap();
        assert_eq!(z12.crt_combine(&[z4.one(), z3.one()]).unwrap().value(), 1);
        assert_eq!(z12.crt_combine(&[z3.one(), z4.one()]), Err(Error::CrtMismatch(12)));
        assert_eq!(z12.crt_combine(&[z4.one()]), Err(Error::CrtMismatch(12)));
    }

    #[test]
    fn crt_round_trip_exhaustive() {
        for n in 2..=1000 {
            let ring = RingCtx::new(n).unwrap();
            for a in ring.elements() {
                let back = ring.crt_combine(&ring.crt_split(a).unwrap()).unwrap();
                assert_eq!(back, a, "round trip failed for {a} mod {n}");
            }
        }
    }

    #[test]
    fn prime_power_ideal() {
        let z27 = RingCtx::prime_power(3, 3).unwrap();
        assert_eq!(z27.ideal_size().unwrap(), 9);
        assert_eq!(z27.ideal().unwrap().len(), 9);
        assert!(RingCtx::prime_power(4, 2).is_err());
        assert_eq!(RingCtx::new(1), Err(Error::InvalidModulus(1)));
    }

    #[test]
    fn local_ring_elements_are_units_or_nilpotent() {
        for (p, r) in [(2, 4), (3, 3), (5, 2)] {
            let ring = RingCtx::prime_power(p, r).unwrap();
            for a in ring.elements() {
                let mut power = a;
                for _ in 1..r {
                    power = power * a;
                }
                assert!(a.is_unit() ^ power.is_zero());
            }
        }
    }

    proptest! {
        #[test]
        fn valuations_add_to_zero_product(pr in prop::sample::select(vec![(2u64, 5u32), (3, 3), (5, 2), (7, 2)]), a in 0u64..4000, b in 0u64..4000) {
            let ring = RingCtx::prime_power(pr.0, pr.1).unwrap();
            let (a, b) = (ring.residue(a as i64), ring.residue(b as i64));
            let va = ring.val_p(a).unwrap().get();
            let vb = ring.val_p(b).unwrap().get();
            if va + vb >= pr.1 {
                prop_assert!((a * b).is_zero());
            }
        }

        #[test]
        fn inverse_is_an_involution(n in 2u64..500, a in 0u64..500) {
            let ring = RingCtx::new(n).unwrap();
            let a = ring.residue(a as i64);
            if a.is_unit() {
                let inv = ring.inverse(a).unwrap();
                prop_assert_eq!(a * inv, ring.one());
                prop_assert_eq!(ring.inverse(inv).unwrap(), a);
            }
        }
    }
}
