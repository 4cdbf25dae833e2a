//! 2x2 matrices over Z/NZ and the eta-product calculus.
//!
//! `eta(a) = [[a, -1], [1, 0]]` and the bracket `<c_1, ..., c_n>` is the
//! left-to-right product `eta(c_1) * ... * eta(c_n)`. The reduction
//! identities below rewrite a bracket into a shorter one with the same value;
//! each returns the shortened sequence together with a flag recording that
//! both brackets were recomputed and compared.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::ring::{Residue, RingCtx};

/// A sign `ε ∈ {+1, -1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^k`.
    pub fn alternating(k: usize) -> Sign {
        if k.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn from_i64(value: i64) -> Option<Sign> {
        match value {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn residue(self, ring: &RingCtx) -> Residue {
        ring.residue(self.as_i64())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Row-major 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: Residue,
    pub b: Residue,
    pub c: Residue,
    pub d: Residue,
}

impl Mat2 {
    pub fn new(a: Residue, b: Residue, c: Residue, d: Residue) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_i64(ring: &RingCtx, entries: [i64; 4]) -> Self {
        let [a, b, c, d] = entries.map(|x| ring.residue(x));
        Self { a, b, c, d }
    }

    pub fn identity(ring: &RingCtx) -> Self {
        Self::scalar(ring.one())
    }

    pub fn scalar(s: Residue) -> Self {
        let zero = s.sibling(0);
        Self::new(s, zero, zero, s)
    }

    /// `ε · Id`.
    pub fn signed_identity(ring: &RingCtx, sign: Sign) -> Self {
        Self::scalar(sign.residue(ring))
    }

    pub fn det(&self) -> Residue {
        self.a * self.d - self.b * self.c
    }

    pub fn modulus(&self) -> u64 {
        self.a.modulus()
    }

    /// Inverse of a determinant-one matrix, `[[d, -b], [-c, a]]`.
    pub fn inverse_sl2(&self) -> Result<Mat2> {
        if self.det().value() != 1 {
            return Err(Error::OutOfRange(format!(
                "matrix {self} has determinant {}, not 1",
                self.det()
            )));
        }
        Ok(Mat2::new(self.d, -self.b, -self.c, self.a))
    }

    /// Entry-wise reduction to Z/M for a divisor M of the modulus.
    pub fn reduce(&self, ring: &RingCtx) -> Result<Mat2> {
        Ok(Mat2::new(
            self.a.reduce(ring)?,
            self.b.reduce(ring)?,
            self.c.reduce(ring)?,
            self.d.reduce(ring)?,
        ))
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a.value(), self.b.value(), self.c.value(), self.d.value()]
    }

    /// `Some(a)` if the matrix is `λ_a = diag(a, a^-1)`.
    pub fn as_lambda(&self) -> Option<Residue> {
        if !self.b.is_zero() || !self.c.is_zero() || !self.a.is_unit() {
            return None;
        }
        (self.a * self.d).value().eq(&1).then_some(self.a)
    }

    pub fn is_lambda(&self) -> bool {
        self.as_lambda().is_some()
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `λ_a = diag(a, a^-1)` for a unit `a`.
pub fn lambda(a: Residue) -> Result<Mat2> {
    let inv = a.inverse()?;
    let zero = a.sibling(0);
    Ok(Mat2::new(a, zero, zero, inv))
}

/// `eta(a) = [[a, -1], [1, 0]]`.
pub fn eta(a: Residue) -> Mat2 {
    Mat2::new(a, a.sibling(-1), a.sibling(1), a.sibling(0))
}

/// `<c_1, ..., c_n>`, the product `eta(c_1) ... eta(c_n)`.
///
/// The empty bracket is the identity.
pub fn bracket(ring: &RingCtx, cs: &[Residue]) -> Mat2 {
    cs.iter()
        .fold(Mat2::identity(ring), |acc, &c| acc * eta(c))
}

/// A shortened sequence plus the outcome of recomputing both brackets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reduction<const K: usize> {
    pub terms: [Residue; K],
    pub verified: bool,
}

fn checked<const K: usize>(ring: &RingCtx, original: &[Residue], terms: [Residue; K]) -> Reduction<K> {
    Reduction {
        terms,
        verified: bracket(ring, original) == bracket(ring, &terms),
    }
}

/// `<x, u, v, y> = <x + (1-v)/(uv-1), uv-1, y + (1-u)/(uv-1)>` for a unit `uv - 1`.
pub fn reduce_43(ring: &RingCtx, x: Residue, u: Residue, v: Residue, y: Residue) -> Result<Reduction<3>> {
    let one = ring.one();
    let w = u * v - one;
    let w_inv = ring.inverse(w)?;
    let terms = [x + (one - v) * w_inv, w, y + (one - u) * w_inv];
    Ok(checked(ring, &[x, u, v, y], terms))
}

/// `<x, 1, y> = <x - 1, y - 1>`.
pub fn drop_one(ring: &RingCtx, x: Residue, y: Residue) -> Reduction<2> {
    let one = ring.one();
    checked(ring, &[x, one, y], [x - one, y - one])
}

/// `<c, u, v, b, d> = <c - (vb-2)/w, w, d - (uv-2)/w>` where
/// `w = ((vb-1)(uv-1) - 1)/v`; needs `v` and `w` to be units.
pub fn reduce_53(
    ring: &RingCtx,
    c: Residue,
    u: Residue,
    v: Residue,
    b: Residue,
    d: Residue,
) -> Result<Reduction<3>> {
    let one = ring.one();
    let two = ring.residue(2);
    let v_inv = ring.inverse(v)?;
    let w = ((v * b - one) * (u * v - one) - one) * v_inv;
    let w_inv = ring.inverse(w)?;
    let terms = [c - (v * b - two) * w_inv, w, d - (u * v - two) * w_inv];
    Ok(checked(ring, &[c, u, v, b, d], terms))
}

/// `(t c_1, t^-1 c_2, t c_3, ..., t c_n)` for odd `n` and a unit `t`.
///
/// If `<cs> = λ_a` then the twisted sequence has bracket `λ_{ta}`.
pub fn twist(ring: &RingCtx, cs: &[Residue], t: Residue) -> Result<Vec<Residue>> {
    if cs.len().is_multiple_of(2) {
        return Err(Error::OutOfRange(format!(
            "twist needs an odd-length sequence, got length {}",
            cs.len()
        )));
    }
    let t_inv = ring.inverse(t)?;
    Ok(cs
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { t * c } else { t_inv * c })
        .collect())
}

/// True iff `<cs> = ε · Id`.
pub fn is_epsilon_quiddity(ring: &RingCtx, cs: &[Residue], sign: Sign) -> bool {
    bracket(ring, cs) == Mat2::signed_identity(ring, sign)
}
