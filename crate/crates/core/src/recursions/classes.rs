//! Aggregation of `ξ`, `ζ` and `π` over residue classes of Z/p^r, p >= 5.
//!
//! The classes are `u_{d,r} = {d}`, `u_{d,i}` (u ≡ d mod p^i but not mod
//! p^{i+1}) for d ∈ {-1, 0, 1} and 1 <= i < r, and `e` (u ≢ -1, 0, 1 mod p).
//! For p = 2 or 3 these sets overlap or `e` is empty, so everything here
//! refuses such rings.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::pi::LocalData;
use crate::closed_forms::{pw, to_count};
use crate::error::{Error, Result};
use crate::matrix::{Mat2, Sign};
use crate::oracle::{fixed_second_from_tail, EntryDomain, Oracle};
use crate::ring::{Residue, RingCtx};
use crate::BigCount;

/// A residue class; `U { d, i }` is `u_{d,i}` and `E` is `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassId {
    U { d: i8, i: u32 },
    E,
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassId::U { d, i } => write!(f, "u({d},{i})"),
            ClassId::E => write!(f, "e"),
        }
    }
}

impl ClassId {
    pub fn is_unit_class(self) -> bool {
        !matches!(self, ClassId::U { d: 0, .. })
    }
}

/// The class partition of one ring.
#[derive(Clone, Debug)]
pub struct Classes {
    local: LocalData,
    of: Vec<ClassId>,
}

impl Classes {
    pub fn new(ring: &RingCtx) -> Result<Self> {
        let local = LocalData::new(ring)?;
        if local.p < 5 {
            return Err(Error::Unsupported(format!(
                "residue classes need p >= 5, got p = {}",
                local.p
            )));
        }
        let m = local.modulus;
        let of = (0..m)
            .map(|x| {
                for d in [0i8, 1, -1] {
                    let shifted = (x + m - (i64::from(d).rem_euclid(m as i64) as u64)) % m;
                    let i = valuation(&local, shifted);
                    if i > 0 {
                        return ClassId::U { d, i };
                    }
                }
                ClassId::E
            })
            .collect();
        Ok(Self { local, of })
    }

    pub fn class_of(&self, x: Residue) -> ClassId {
        self.of[x.value() as usize]
    }

    /// Every class, in a fixed order.
    pub fn ids(&self) -> Vec<ClassId> {
        let mut ids: Vec<ClassId> = [-1i8, 0, 1]
            .into_iter()
            .flat_map(|d| (1..=self.local.r).map(move |i| ClassId::U { d, i }))
            .collect();
        ids.push(ClassId::E);
        ids
    }

    pub fn members(&self, class: ClassId) -> Vec<u64> {
        (0..self.local.modulus)
            .filter(|&x| self.of[x as usize] == class)
            .collect()
    }

    /// Class size by formula: `|u_{d,i}| = p^{r-i} - p^{r-i-1}` (1 for i = r),
    /// `|e| = p^r - 3p^{r-1}`.
    pub fn size(&self, class: ClassId) -> BigInt {
        let (p, r) = (self.local.p, self.local.r);
        match class {
            ClassId::U { i, .. } if i == r => BigInt::from(1),
            ClassId::U { i, .. } => pw(p, r - i) - pw(p, r - i - 1),
            ClassId::E => pw(p, r) - 3 * pw(p, r - 1),
        }
    }

    /// `ξ_{X,U}` summed over both classes, by formula.
    pub fn xi_value(&self, x: ClassId, u: ClassId) -> BigInt {
        match (x, u) {
            (_, ClassId::U { d: 1 | -1, .. }) | (_, ClassId::E) => self.size(x) * self.size(u),
            (ClassId::U { d: -1, i: l }, ClassId::U { d: 0, i: k }) if k <= l => {
                pw(self.local.p, k) * self.size(x) * self.size(u)
            }
            _ => BigInt::zero(),
        }
    }

    /// `ζ_{X,U}` summed over both classes, by formula.
    pub fn zeta_value(&self, x: ClassId, u: ClassId) -> BigInt {
        let (p, r) = (self.local.p, self.local.r);
        let unit_count = pw(p, r) - pw(p, r - 1);
        match (x, u) {
            (ClassId::E, ClassId::E) => pw(p, 2 * r - 1) * self.size(ClassId::E),
            (ClassId::U { d: 1, i }, ClassId::U { d: -1, i: j })
            | (ClassId::U { d: -1, i: j }, ClassId::U { d: 1, i }) => {
                let (ci, cj) = (ClassId::U { d: 1, i }, ClassId::U { d: -1, i: j });
                if i != j {
                    BigInt::from(i.min(j)) * unit_count * self.size(ci) * self.size(cj)
                } else if i < r {
                    let k = BigInt::from(i);
                    let e = 2 * r - i;
                    (&k * pw(p, e) - (2 * &k - 1) * pw(p, e - 1) + &k * pw(p, e - 2)) * self.size(ci)
                } else {
                    BigInt::from(r) * pw(p, r) - BigInt::from(r - 1) * pw(p, r - 1)
                }
            }
            _ => BigInt::zero(),
        }
    }

    /// Direct double sums `(Σ ξ, Σ ζ)` over `X × U`.
    fn direct_sums(&self, x: ClassId, u: ClassId) -> (BigInt, BigInt) {
        let us = self.members(u);
        let mut xi = BigInt::zero();
        let mut zeta = BigInt::zero();
        for y in self.members(x) {
            for &z in &us {
                xi += self.local.xi(y, z);
                zeta += self.local.zeta(y, z);
            }
        }
        (xi, zeta)
    }

    /// Whether `Σ_{z ∈ U} ξ_{y,z}` and `Σ_{z ∈ U} ζ_{y,z}` are the same for
    /// every y in X.
    fn row_sums_constant(&self, x: ClassId, u: ClassId) -> bool {
        let us = self.members(u);
        let sums = |y: u64| -> (u64, u64) {
            us.iter().fold((0, 0), |(a, b), &z| {
                (a + self.local.xi(y, z), b + self.local.zeta(y, z))
            })
        };
        let mut members = self.members(x).into_iter();
        let Some(first) = members.next() else {
            return true;
        };
        let reference = sums(first);
        members.all(|y| sums(y) == reference)
    }
}

fn valuation(local: &LocalData, x: u64) -> u32 {
    if x == 0 {
        return local.r;
    }
    let mut x = x;
    let mut k = 0;
    while x.is_multiple_of(local.p) {
        x /= local.p;
        k += 1;
    }
    k
}

/// A class pair whose aggregated value disagrees with its formula, or whose
/// per-representative sums are not constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMismatch {
    pub x: ClassId,
    pub u: ClassId,
    pub what: &'static str,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for ClassMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at ({}, {}): formula {}, direct {}",
            self.what, self.x, self.u, self.expected, self.actual
        )
    }
}

/// Checks class sizes, the constancy of per-representative sums and every
/// class value of `ξ` and `ζ` against direct double sums. Returns the first
/// mismatch, if any.
pub fn class_aggregate_mismatch(ring: &RingCtx) -> Result<Option<ClassMismatch>> {
    let classes = Classes::new(ring)?;
    let ids = classes.ids();
    for &x in &ids {
        let actual = BigInt::from(classes.members(x).len());
        if actual != classes.size(x) {
            return Ok(Some(ClassMismatch {
                x,
                u: x,
                what: "class size",
                expected: classes.size(x).to_string(),
                actual: actual.to_string(),
            }));
        }
    }
    for &x in &ids {
        for &u in &ids {
            if !classes.row_sums_constant(x, u) {
                return Ok(Some(ClassMismatch {
                    x,
                    u,
                    what: "representative independence",
                    expected: "constant".into(),
                    actual: "varies".into(),
                }));
            }
            let (xi, zeta) = classes.direct_sums(x, u);
            for (what, expected, actual) in [
                ("xi", classes.xi_value(x, u), xi),
                ("zeta", classes.zeta_value(x, u), zeta),
            ] {
                if expected != actual {
                    return Ok(Some(ClassMismatch {
                        x,
                        u,
                        what,
                        expected: expected.to_string(),
                        actual: actual.to_string(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// True when every class check of [`class_aggregate_mismatch`] passes.
pub fn class_aggregate_check(ring: &RingCtx) -> Result<bool> {
    Ok(class_aggregate_mismatch(ring)?.is_none())
}

/// `π_{(u),n}` per class for the target `±Id`, n = 3..=n_max.
///
/// Uses `π_{(u),n} = Σ_X (π_{X,n-1} ξ_{X,(u)} + π_{X,n-2} ζ_{X,(u)}) / |X|`
/// over unit classes X, with the class values above. The per-class reduction
/// is only valid when `π_{x,n}` is constant on classes, which holds for the
/// scalar targets `±Id`; entry k of the result is n = k + 3.
pub fn pi_class_recursive(
    ring: &RingCtx,
    sign: Sign,
    n_max: usize,
) -> Result<Vec<BTreeMap<ClassId, BigCount>>> {
    let classes = Classes::new(ring)?;
    if n_max < 4 {
        return Err(Error::OutOfRange(format!("n_max must be at least 4, got {n_max}")));
    }
    let target = Mat2::signed_identity(ring, sign);
    let tails = Oracle::new(ring)?.tables(2, EntryDomain::All)?;
    let ids = classes.ids();
    let aggregate = |counts: &[BigCount]| -> BTreeMap<ClassId, BigInt> {
        let mut out: BTreeMap<ClassId, BigInt> = ids.iter().map(|&c| (c, BigInt::zero())).collect();
        for (x, c) in counts.iter().enumerate() {
            *out.get_mut(&classes.of[x]).expect("every class listed") += BigInt::from(c.clone());
        }
        out
    };
    let mut rows: Vec<BTreeMap<ClassId, BigInt>> = (3..=4)
        .map(|n| aggregate(&fixed_second_from_tail(ring, &tails[n - 2], n, &target).counts))
        .collect();

    let unit_classes: Vec<ClassId> = ids.iter().copied().filter(|c| c.is_unit_class()).collect();
    for _ in 5..=n_max {
        let (prev2, prev1) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
        let mut next = BTreeMap::new();
        for &u in &ids {
            let mut acc = BigInt::zero();
            for &x in &unit_classes {
                let size = classes.size(x);
                if size.is_zero() {
                    continue;
                }
                let num = &prev1[&x] * classes.xi_value(x, u) + &prev2[&x] * classes.zeta_value(x, u);
                acc += crate::closed_forms::exact_div(&num, &size)?;
            }
            next.insert(u, acc);
        }
        rows.push(next);
    }
    rows.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|(c, v)| Ok((c, to_count(v)?)))
                .collect::<Result<BTreeMap<_, _>>>()
        })
        .collect()
}
