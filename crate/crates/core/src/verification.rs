//! Cross-checking grids: each suite compares two independent computations
//! over a fixed parameter grid and reports the first disagreement.
//!
//! Every oracle table built along the way is also checked for mass
//! conservation (its counts sum to `|domain|^n`).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_forms::{self as cf, LongIdentitySample};
use crate::engine::crt_product_mismatch;
use crate::error::Result;
use crate::matrix::{bracket, drop_one, reduce_43, reduce_53, twist, Mat2, Sign};
use crate::oracle::{fixed_second_from_tail, sigma_lookup, CountTable, EntryDomain, Oracle};
use crate::recursions;
use crate::ring::{Residue, RingCtx};
use crate::BigCount;

/// Knobs for the randomized parts of the suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random tuples per ring in the reduction suite.
    pub reduction_samples: usize,
    /// Random points for the rational identities.
    pub identity_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            reduction_samples: 10_000,
            identity_samples: 100,
        }
    }
}

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: u64,
    pub mismatch: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mismatch {
            None => write!(f, "{}: ok ({} checks)", self.name, self.checks),
            Some(m) => write!(f, "{}: MISMATCH after {} checks: {}", self.name, self.checks, m),
        }
    }
}

struct Tally {
    name: &'static str,
    checks: u64,
    mismatch: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            mismatch: None,
        }
    }

    /// Records one comparison; keeps only the first failure.
    fn check(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.mismatch.is_none() {
            self.mismatch = Some(context());
        }
    }

    fn eq<T: PartialEq + fmt::Display>(&mut self, lhs: &T, rhs: &T, context: impl FnOnce() -> String) {
        let ok = lhs == rhs;
        self.check(ok, || format!("{}: {lhs} != {rhs}", context()));
    }

    fn failed(&self) -> bool {
        self.mismatch.is_some()
    }

    fn tables(&mut self, oracle: &Oracle, n_max: usize, domain: EntryDomain) -> Result<Vec<CountTable>> {
        let tables = oracle.tables(n_max, domain)?;
        let size = match domain {
            EntryDomain::All => oracle.ring().modulus(),
            EntryDomain::Ideal => oracle.ring().ideal_size()?,
        };
        for (n, t) in tables.iter().enumerate() {
            let expected = BigCount::from(size).pow(n as u32);
            let modulus = oracle.ring().modulus();
            self.eq(&t.total(), &expected, || format!("mass over Z/{modulus}, n = {n}"));
        }
        Ok(tables)
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name,
            checks: self.checks,
            mismatch: self.mismatch,
        }
    }
}

/// `(p, r)` pairs shared by the quiddity formula suites.
pub const FORMULA_GRID: [(u64, u32); 7] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2)];

pub const SUITES: [&str; 10] = [
    "odd-length",
    "even-length",
    "sigma",
    "sigma-reduction",
    "uv-products",
    "reduction-identities",
    "second-entry",
    "rational-identities",
    "crt",
    "mass-conservation",
];

/// Runs one suite by name; `None` for an unknown name.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Option<Result<SuiteReport>> {
    Some(match name {
        "odd-length" => odd_length(),
        "even-length" => even_length(),
        "sigma" => sigma(),
        "sigma-reduction" => sigma_reduction(),
        "uv-products" => uv_products(),
        "reduction-identities" => reduction_identities(cfg),
        "second-entry" => second_entry(),
        "rational-identities" => rational_identities(cfg),
        "crt" => crt(),
        "mass-conservation" => mass_conservation(),
        _ => return None,
    })
}

/// Runs every suite in order.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    SUITES
        .iter()
        .map(|name| run_suite(name, cfg).expect("listed suite"))
        .collect()
}

fn quiddity_tables(t: &mut Tally, p: u64, r: u32, n_max: usize) -> Result<Vec<CountTable>> {
    let ring = RingCtx::prime_power(p, r)?;
    t.tables(&Oracle::new(&ring)?, n_max, EntryDomain::All)
}

/// Oracle vs `p^{(n-3)(r-1)} [(n-1)/2]_{p^2}` for odd n.
pub fn odd_length() -> Result<SuiteReport> {
    let mut t = Tally::new("odd-length");
    for (p, r) in FORMULA_GRID {
        let ring = RingCtx::prime_power(p, r)?;
        let tables = quiddity_tables(&mut t, p, r, 7)?;
        for n in [3usize, 5, 7] {
            let closed = BigCount::from(p).pow((n as u32 - 3) * (r - 1)) * cf::q_int((n as u32 - 1) / 2, p * p);
            for sign in [Sign::Minus, Sign::Plus] {
                let seen = tables[n].get(&Mat2::signed_identity(&ring, sign));
                t.eq(&seen, &closed, || format!("p = {p}, r = {r}, n = {n}, ε = {sign}"));
                let formula = cf::count_quiddity_odd(p, r, n, sign)?.value;
                t.eq(&formula, &closed, || format!("formula at p = {p}, r = {r}, n = {n}"));
            }
        }
    }
    Ok(t.finish())
}

/// Oracle vs the even-length formula, both signs, n ∈ {2, 4, 6, 8}.
pub fn even_length() -> Result<SuiteReport> {
    let mut t = Tally::new("even-length");
    for (p, r) in FORMULA_GRID {
        let ring = RingCtx::prime_power(p, r)?;
        let tables = quiddity_tables(&mut t, p, r, 8)?;
        for n in [2usize, 4, 6, 8] {
            for sign in [Sign::Plus, Sign::Minus] {
                let seen = tables[n].get(&Mat2::signed_identity(&ring, sign));
                let formula = cf::count_quiddity_even(p, r, n, sign)?.value;
                t.eq(&formula, &seen, || format!("p = {p}, r = {r}, n = {n}, ε = {sign}"));
            }
        }
    }
    Ok(t.finish())
}

/// Closed form vs recursion on a wide grid, and vs the oracle on a small one.
pub fn sigma() -> Result<SuiteReport> {
    let mut t = Tally::new("sigma");
    for p in [2u64, 3, 5, 7] {
        for r in 1..=5 {
            let table = recursions::sigma_recursive(p, r, 14)?;
            for (n, row) in table.rows() {
                for ell in 1..=r {
                    let closed = cf::sigma_closed(p, r, n, ell)?;
                    t.eq(&closed, &row[ell as usize - 1], || {
                        format!("closed vs recursive at p = {p}, r = {r}, n = {n}, ℓ = {ell}")
                    });
                }
            }
        }
    }
    for (p, r) in [(2u64, 2u32), (2, 3), (3, 2)] {
        let ring = RingCtx::prime_power(p, r)?;
        let tables = t.tables(&Oracle::new(&ring)?, 8, EntryDomain::Ideal)?;
        for n in (2..=8).step_by(2) {
            for ell in 1..=r {
                let z = Sign::alternating(n / 2).residue(&ring) + ring.residue(p.pow(ell) as i64);
                let seen = sigma_lookup(&tables[n], z);
                let closed = cf::sigma_closed(p, r, n, ell)?;
                t.eq(&closed, &seen, || format!("closed vs oracle at p = {p}, r = {r}, n = {n}, ℓ = {ell}"));
            }
        }
    }
    Ok(t.finish())
}

/// The one-step σ reduction and valuation-class constancy over Z/4, Z/8, Z/9.
pub fn sigma_reduction() -> Result<SuiteReport> {
    let mut t = Tally::new("sigma-reduction");
    for m in [4u64, 8, 9] {
        let ring = RingCtx::new(m)?;
        let (p, _) = ring.prime_power_parts().expect("prime power");
        let oracle = Oracle::new(&ring)?;
        t.tables(&oracle, 6, EntryDomain::Ideal)?;
        for n in [4usize, 6] {
            for z in ring.units() {
                let near_sign = (z - ring.one()).value() % p == 0 || (z + ring.one()).value() % p == 0;
                if !near_sign {
                    continue;
                }
                let (lhs, rhs) = recursions::sigma_reduction_sides(&oracle, z, n)?;
                t.eq(&lhs, &rhs, || format!("reduction over Z/{m}, z = {z}, n = {n}"));
            }
            let ok = recursions::valuation_class_check(&oracle, n)?;
            t.check(ok, || format!("valuation classes over Z/{m}, n = {n}"));
        }
    }
    Ok(t.finish())
}

/// `|{(u,v) ∈ I² : uv = a}|` by formula vs enumeration.
pub fn uv_products() -> Result<SuiteReport> {
    let mut t = Tally::new("uv-products");
    for m in [4u64, 8, 9, 25, 27] {
        let ring = RingCtx::new(m)?;
        let ideal = ring.ideal()?;
        let mut counts = vec![0u64; m as usize];
        for &u in &ideal {
            for &v in &ideal {
                counts[(u * v).value() as usize] += 1;
            }
        }
        for &a in &ideal {
            let formula = cf::count_uv_product(&ring, a)?;
            t.eq(&formula, &BigCount::from(counts[a.value() as usize]), || format!("Z/{m}, a = {a}"));
        }
    }
    Ok(t.finish())
}

fn check_reductions(t: &mut Tally, ring: &RingCtx, c: &[Residue; 5], t_unit: Residue) -> Result<()> {
    let m = ring.modulus();
    let [x, u, v, y, d] = *c;
    if (u * v - ring.one()).is_unit() {
        let red = reduce_43(ring, x, u, v, y)?;
        let ok = bracket(ring, &[x, u, v, y]) == bracket(ring, &red.terms);
        t.check(ok, || format!("4-to-3 over Z/{m} at {:?}", [x, u, v, y].map(Residue::value)));
    }
    let red = drop_one(ring, x, y);
    let ok = bracket(ring, &[x, ring.one(), y]) == bracket(ring, &red.terms);
    t.check(ok, || format!("drop-one over Z/{m} at ({x}, {y})"));
    if v.is_unit() {
        let w = ((v * y - ring.one()) * (u * v - ring.one()) - ring.one()) * v.inverse()?;
        if w.is_unit() {
            let red = reduce_53(ring, x, u, v, y, d)?;
            let ok = bracket(ring, &[x, u, v, y, d]) == bracket(ring, &red.terms);
            t.check(ok, || format!("5-to-3 over Z/{m} at {:?}", c.map(Residue::value)));
        }
    }
    // twist of the odd prefixes is conjugation by diag(t, 1)
    let left = Mat2::new(t_unit, ring.zero(), ring.zero(), ring.one());
    let right = Mat2::new(ring.one(), ring.zero(), ring.zero(), t_unit.inverse()?);
    for len in [3usize, 5] {
        let seq = &c[..len];
        let ok = bracket(ring, &twist(ring, seq, t_unit)?) == left * bracket(ring, seq) * right;
        t.check(ok, || format!("twist by {t_unit} over Z/{m} at {:?}", seq.iter().map(|r| r.value()).collect::<Vec<_>>()));
    }
    Ok(())
}

/// Reduction identities: exhaustive over Z/5 and Z/7, seeded random over Z/9
/// and Z/16.
pub fn reduction_identities(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut t = Tally::new("reduction-identities");
    for m in [5u64, 7] {
        let ring = RingCtx::new(m)?;
        let units: Vec<Residue> = ring.units().collect();
        let total = m.pow(5);
        for code in 0..total {
            let mut k = code;
            let c: [Residue; 5] = std::array::from_fn(|_| {
                let r = ring.residue((k % m) as i64);
                k /= m;
                r
            });
            let tu = units[(code % units.len() as u64) as usize];
            check_reductions(&mut t, &ring, &c, tu)?;
            if t.failed() {
                return Ok(t.finish());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for m in [9u64, 16] {
        let ring = RingCtx::new(m)?;
        let units: Vec<Residue> = ring.units().collect();
        for _ in 0..cfg.reduction_samples {
            let c: [Residue; 5] = std::array::from_fn(|_| ring.residue(rng.gen_range(0..m as i64)));
            let tu = units[rng.gen_range(0..units.len())];
            check_reductions(&mut t, &ring, &c, tu)?;
        }
    }
    Ok(t.finish())
}

fn all_sl2(ring: &RingCtx, table: &CountTable) -> Vec<Mat2> {
    table.targets().filter(|m| m.det() == ring.one()).collect()
}

/// `π` and `τ` recursions vs the oracle for every target over Z/4 and Z/9,
/// and the class values over Z/5 and Z/25.
pub fn second_entry() -> Result<SuiteReport> {
    let mut t = Tally::new("second-entry");
    for m in [4u64, 9] {
        let ring = RingCtx::new(m)?;
        let oracle = Oracle::new(&ring)?;
        let tails = t.tables(&oracle, 5, EntryDomain::All)?;
        for target in all_sl2(&ring, &tails[0]) {
            let pi = recursions::pi_recursive(&ring, &target, 7)?;
            let tau = recursions::tau_recursive(&ring, &target, 7)?;
            for n in 3..=7 {
                let expected = fixed_second_from_tail(&ring, &tails[n - 2], n, &target);
                let ok = pi.row(n) == Some(expected.counts.as_slice());
                t.check(ok, || format!("π over Z/{m}, A = {target}, n = {n}"));
                let unit_sum: BigCount = ring.units().map(|u| expected.get(u).clone()).sum();
                t.eq(&tau[n - 3], &unit_sum, || format!("τ over Z/{m}, A = {target}, n = {n}"));
            }
        }
    }
    for m in [5u64, 25] {
        let mismatch = recursions::class_aggregate_mismatch(&RingCtx::new(m)?)?;
        t.check(mismatch.is_none(), || format!("classes over Z/{m}: {}", mismatch.expect("present")));
    }
    Ok(t.finish())
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// The rational identities behind the σ closed form, at seeded points and on
/// integer grids.
pub fn rational_identities(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut t = Tally::new("rational-identities");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let primes = [2i64, 3, 5, 7, 11, 13];
    let nonzero = |rng: &mut ChaCha8Rng| loop {
        let v: i64 = rng.gen_range(-60..=60);
        if v != 0 {
            return v;
        }
    };

    let s = LongIdentitySample::from_integers(2, 3, 1, 1, 1, 1, 2);
    t.check(cf::long_identity(&s)?, || "long identity at (2,3,1,1,1,1,2)".into());
    let mut done = 0;
    while done < cfg.identity_samples {
        let p = primes[rng.gen_range(0..primes.len())];
        let s = LongIdentitySample::from_integers(
            p,
            nonzero(&mut rng),
            nonzero(&mut rng),
            nonzero(&mut rng),
            nonzero(&mut rng),
            nonzero(&mut rng),
            rng.gen_range(0..12),
        );
        let Ok(ok) = cf::long_identity(&s) else { continue };
        t.check(ok, || format!("long identity at {s:?}"));
        let polys = cf::long_identity_polynomials(&s);
        t.check(polys == [true; 3], || format!("polynomial identities {polys:?} at {s:?}"));
        done += 1;
    }

    t.check(cf::alpha_beta_gamma_identity(3, 4, &rat(2))?, || "α = β + γ at (3, 4, 2)".into());
    for _ in 0..cfg.identity_samples {
        let p = primes[rng.gen_range(0..primes.len())] as u64;
        let r = rng.gen_range(3..=8);
        let x = BigRational::new(BigInt::from(rng.gen_range(1..=40)), BigInt::from(rng.gen_range(1..=9)));
        let Ok(ok) = cf::alpha_beta_gamma_identity(p, r, &x) else { continue };
        t.check(ok, || format!("α = β + γ at p = {p}, r = {r}, x = {x}"));
        let Ok(ok) = cf::long_division_identity(&x, r) else { continue };
        t.check(ok, || format!("long division at x = {x}, r = {r}"));
    }

    for p in [2u64, 3, 5, 7] {
        for m in 0..=8 {
            let ok = cf::geometric_sum_identities(p, m)? == [true; 2];
            t.check(ok, || format!("geometric sums at p = {p}, m = {m}"));
        }
        for r in 2..=6 {
            for ell in 1..r {
                t.check(cf::valuation_weighted_sum_identity(p, r, ell)?, || {
                    format!("valuation-weighted sum at p = {p}, r = {r}, ℓ = {ell}")
                });
                t.check(cf::sigma_coefficient_identity(p, r, ell)?, || {
                    format!("σ coefficient at p = {p}, r = {r}, ℓ = {ell}")
                });
            }
        }
        for s in 2..=8 {
            for m in 3..=8 {
                t.check(cf::q_weighted_sum_identity(p, s, m)?, || {
                    format!("q-weighted sum at p = {p}, s = {s}, m = {m}")
                });
            }
        }
        for r in 1..=8 {
            let x = rat(p as i64);
            t.check(cf::long_division_identity(&x, r)?, || format!("long division at x = {x}, r = {r}"));
        }
    }
    Ok(t.finish())
}

/// Oracle over Z/12 vs the product over Z/4 and Z/3, every target, n <= 5.
pub fn crt() -> Result<SuiteReport> {
    let mut t = Tally::new("crt");
    let ring = RingCtx::new(12)?;
    let mismatch = crt_product_mismatch(&ring, 5)?;
    t.check(mismatch.is_none(), || {
        let (n, a) = mismatch.expect("present");
        format!("Z/12 vs Z/4 x Z/3 at n = {n}, A = {a}")
    });
    for part in [RingCtx::new(12)?, RingCtx::new(4)?, RingCtx::new(3)?] {
        t.tables(&Oracle::new(&part)?, 5, EntryDomain::All)?;
    }
    Ok(t.finish())
}

/// `Σ_A T_n[A] = |domain|^n` for every ring used by the other suites.
pub fn mass_conservation() -> Result<SuiteReport> {
    let mut t = Tally::new("mass-conservation");
    for m in [2u64, 3, 4, 5, 8, 9, 12, 25, 27] {
        let oracle = Oracle::new(&RingCtx::new(m)?)?;
        t.tables(&oracle, 6, EntryDomain::All)?;
        if oracle.ring().is_prime_power() {
            t.tables(&oracle, 8, EntryDomain::Ideal)?;
        }
    }
    Ok(t.finish())
}
