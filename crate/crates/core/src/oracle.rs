//! Ground-truth enumeration over SL_2(Z/N).
//!
//! Every length-n product `eta(c_1) ... eta(c_n)` is counted by a dynamic
//! program whose states are the elements of SL_2(Z/N): after step k the table
//! holds, for every matrix M, the number of length-k sequences with bracket M.
//! One pass therefore answers every target at once.
//!
//! The step is computed in "pull" form: the new count of M is the sum of the
//! old counts of `M * eta(c)^-1` over admissible c. Each target state is
//! independent, so the step is split across threads and the result does not
//! depend on the schedule.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{eta, lambda, Mat2, Sign};
use crate::ring::{Residue, RingCtx};
use crate::BigCount;

/// Environment variable overriding the default work ceiling.
pub const BUDGET_ENV_VAR: &str = "QUIDDITY_MAX_BUDGET";

/// Ceiling on `|SL_2(Z/N)| * |entry domain| * n`.
///
/// The default keeps a single oracle run well under a minute; it admits for
/// instance N = 50 with n = 20.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub ceiling: u128,
}

impl Budget {
    pub const DEFAULT_CEILING: u128 = 200_000_000;

    pub fn new(ceiling: u128) -> Self {
        Self { ceiling }
    }

    pub fn unlimited() -> Self {
        Self {
            ceiling: u128::MAX,
        }
    }

    /// Reads [`BUDGET_ENV_VAR`], falling back to the default ceiling.
    pub fn from_env() -> Self {
        let ceiling = std::env::var(BUDGET_ENV_VAR)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(Self::DEFAULT_CEILING);
        Self { ceiling }
    }

    pub fn check(&self, work: u128) -> Result<()> {
        if work > self.ceiling {
            Err(Error::BudgetExceeded {
                work,
                ceiling: self.ceiling,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::from_env()
    }
}

/// Which entries `c_i` a sequence may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntryDomain {
    /// All of Z/N.
    All,
    /// The maximal ideal `pR` of a prime-power ring.
    Ideal,
}

type State = [u32; 4];

/// Dense numbering of SL_2(Z/N).
#[derive(Debug)]
struct Sl2Index {
    modulus: u32,
    states: Vec<State>,
    lookup: HashMap<State, u32>,
}

impl Sl2Index {
    fn build(ring: &RingCtx) -> Self {
        let m = ring.modulus();
        let mut states = Vec::new();
        for a in 0..m {
            let a_inv = ring.residue(a as i64).inverse().ok();
            for b in 0..m {
                for c in 0..m {
                    // ad = 1 + bc
                    let rhs = (1 + b * c) % m;
                    match a_inv {
                        Some(inv) => {
                            let d = rhs * inv.value() % m;
                            states.push([a as u32, b as u32, c as u32, d as u32]);
                        }
                        None => {
                            for d in 0..m {
                                if a * d % m == rhs {
                                    states.push([a as u32, b as u32, c as u32, d as u32]);
                                }
                            }
                        }
                    }
                }
            }
        }
        let lookup = states
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, i as u32))
            .collect();
        Self {
            modulus: m as u32,
            states,
            lookup,
        }
    }

    fn get(&self, state: &State) -> Option<usize> {
        self.lookup.get(state).map(|&i| i as usize)
    }

    /// `M * eta(c)^-1 = [[a,b],[c',d]] * [[0,1],[-1,c]] = [[-b, a+bc], [-d, c'+dc]]`.
    fn pull(&self, s: &State, c: u32) -> State {
        let m = self.modulus as u64;
        let [a, b, cc, d] = s.map(u64::from);
        let c = c as u64;
        [
            ((m - b) % m) as u32,
            ((a + b * c) % m) as u32,
            ((m - d) % m) as u32,
            ((cc + d * c) % m) as u32,
        ]
    }
}

/// Exact counts of length-n brackets, keyed by target matrix.
#[derive(Clone, Debug)]
pub struct CountTable {
    ring: RingCtx,
    n: usize,
    domain: EntryDomain,
    index: Arc<Sl2Index>,
    counts: Vec<BigCount>,
}

impl CountTable {
    pub fn ring(&self) -> &RingCtx {
        &self.ring
    }

    pub fn len_of_sequences(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> EntryDomain {
        self.domain
    }

    /// Number of sequences whose bracket is `target` (zero for det != 1).
    pub fn get(&self, target: &Mat2) -> BigCount {
        self.get_ref(target).cloned().unwrap_or_default()
    }

    pub fn get_ref(&self, target: &Mat2) -> Option<&BigCount> {
        if target.modulus() != self.ring.modulus() {
            return None;
        }
        let state = target.entries().map(|x| x as u32);
        self.index.get(&state).map(|i| &self.counts[i])
    }

    /// Sum over all targets; equals `|domain|^n`.
    pub fn total(&self) -> BigCount {
        self.counts.iter().sum()
    }

    /// Number of targets with a nonzero count.
    pub fn reached(&self) -> usize {
        self.counts.iter().filter(|c| !c.is_zero()).count()
    }

    /// Nonzero entries in a fixed order.
    pub fn iter(&self) -> impl Iterator<Item = (Mat2, &BigCount)> + '_ {
        self.index
            .states
            .iter()
            .zip(&self.counts)
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| (self.matrix(s), c))
    }

    /// All of SL_2(Z/N) in the same fixed order, zero counts included.
    pub fn targets(&self) -> impl Iterator<Item = Mat2> + '_ {
        self.index.states.iter().map(|s| self.matrix(s))
    }

    fn matrix(&self, s: &State) -> Mat2 {
        Mat2::from_i64(&self.ring, s.map(i64::from))
    }
}

impl PartialEq for CountTable {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.n == other.n
            && self.domain == other.domain
            && self.counts == other.counts
    }
}

/// Counts split by the second entry: `counts[u] = π_{u,n}` for a fixed target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondEntryCounts {
    pub n: usize,
    pub target: Mat2,
    /// False when the target has determinant != 1; all counts are then zero.
    pub target_reachable: bool,
    pub counts: Vec<BigCount>,
}

impl SecondEntryCounts {
    pub fn get(&self, u: Residue) -> &BigCount {
        &self.counts[u.value() as usize]
    }

    pub fn total(&self) -> BigCount {
        self.counts.iter().sum()
    }
}

/// Dynamic-programming enumerator over one ring.
#[derive(Clone, Debug)]
pub struct Oracle {
    ring: RingCtx,
    index: Arc<Sl2Index>,
    budget: Budget,
    parallel: bool,
}

impl Oracle {
    /// Oracle with the budget taken from the environment.
    pub fn new(ring: &RingCtx) -> Result<Self> {
        Self::with_budget(ring, Budget::from_env())
    }

    pub fn with_budget(ring: &RingCtx, budget: Budget) -> Result<Self> {
        let m = ring.modulus() as u128;
        // enumerating the group costs about N^3
        budget.check(m * m * m)?;
        Ok(Self {
            ring: ring.clone(),
            index: Arc::new(Sl2Index::build(ring)),
            budget,
            parallel: true,
        })
    }

    /// Runs every step on the calling thread.
    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn ring(&self) -> &RingCtx {
        &self.ring
    }

    /// `|SL_2(Z/N)|`.
    pub fn group_order(&self) -> usize {
        self.index.states.len()
    }

    fn domain_entries(&self, domain: EntryDomain) -> Result<Vec<u32>> {
        match domain {
            EntryDomain::All => Ok((0..self.ring.modulus() as u32).collect()),
            EntryDomain::Ideal => Ok(self
                .ring
                .ideal()?
                .into_iter()
                .map(|r| r.value() as u32)
                .collect()),
        }
    }

    fn identity_table(&self, domain: EntryDomain) -> CountTable {
        let mut counts = vec![BigCount::zero(); self.index.states.len()];
        let id = self.index.get(&[1, 0, 0, 1]).expect("identity is in SL_2");
        counts[id] = BigCount::from(1u32);
        CountTable {
            ring: self.ring.clone(),
            n: 0,
            domain,
            index: Arc::clone(&self.index),
            counts,
        }
    }

    /// Tables for every length `0..=n_max`. Length 0 is `{Id: 1}`.
    pub fn tables(&self, n_max: usize, domain: EntryDomain) -> Result<Vec<CountTable>> {
        let entries = self.domain_entries(domain)?;
        let states = self.index.states.len() as u128;
        self.budget
            .check(states * entries.len() as u128 * n_max as u128)?;

        // pred[j * d + k] = index of state_j * eta(entries[k])^-1
        let d = entries.len();
        let pred: Vec<u32> = self
            .index
            .states
            .iter()
            .flat_map(|s| {
                entries.iter().map(move |&c| {
                    let p = self.index.pull(s, c);
                    self.index.get(&p).expect("SL_2 is closed under products") as u32
                })
            })
            .collect();

        let mut out = Vec::with_capacity(n_max + 1);
        out.push(self.identity_table(domain));
        for n in 1..=n_max {
            let prev = &out[n - 1].counts;
            let step = |j: usize| -> BigCount {
                let mut acc = BigCount::zero();
                for &i in &pred[j * d..(j + 1) * d] {
                    let v = &prev[i as usize];
                    if !v.is_zero() {
                        acc += v;
                    }
                }
                acc
            };
            let counts: Vec<BigCount> = if self.parallel {
                (0..prev.len()).into_par_iter().map(step).collect()
            } else {
                (0..prev.len()).map(step).collect()
            };
            out.push(CountTable {
                ring: self.ring.clone(),
                n,
                domain,
                index: Arc::clone(&self.index),
                counts,
            });
        }
        Ok(out)
    }

    /// Counts of length-n brackets for every target.
    pub fn count_all_targets(&self, n: usize, domain: EntryDomain) -> Result<CountTable> {
        Ok(self
            .tables(n, domain)?
            .pop()
            .expect("tables returns n + 1 entries"))
    }

    /// Number of ε-quiddity cycles of length n.
    pub fn count_quiddity(&self, n: usize, sign: Sign) -> Result<BigCount> {
        let table = self.count_all_targets(n, EntryDomain::All)?;
        Ok(table.get(&Mat2::signed_identity(&self.ring, sign)))
    }

    /// `|σ_{z,n}|`: sequences in `I^n` with bracket `λ_z`. Zero for non-unit z.
    pub fn count_sigma_at(&self, n: usize, z: Residue) -> Result<BigCount> {
        let table = self.count_all_targets(n, EntryDomain::Ideal)?;
        Ok(sigma_lookup(&table, z))
    }

    /// `σ_n(ℓ) = |σ_{z,n}|` for `z = (-1)^{n/2} + p^ℓ`.
    pub fn count_sigma(&self, n: usize, ell: u32) -> Result<BigCount> {
        let (p, r) = self
            .ring
            .prime_power_parts()
            .ok_or(Error::NotPrimePower(self.ring.modulus()))?;
        if !(1..=r).contains(&ell) {
            return Err(Error::OutOfRange(format!(
                "ell must lie in [1, {r}], got {ell}"
            )));
        }
        if n % 2 == 1 {
            log::warn!("σ_n(ℓ) vanishes for odd n = {n}");
            return Ok(BigCount::zero());
        }
        let z = Sign::alternating(n / 2).residue(&self.ring) + self.ring.residue(p.pow(ell) as i64);
        self.count_sigma_at(n, z)
    }

    /// `π_{u,n}` for every u: sequences with bracket `target` and `c_2 = u`.
    pub fn count_fixed_second(&self, n: usize, target: &Mat2) -> Result<SecondEntryCounts> {
        if n < 2 {
            return Err(Error::OutOfRange(format!(
                "second-entry counts need n >= 2, got {n}"
            )));
        }
        let tail = self.count_all_targets(n - 2, EntryDomain::All)?;
        Ok(fixed_second_from_tail(&self.ring, &tail, n, target))
    }
}

/// `π_{u,n} = Σ_{c_1} T_{n-2}[(eta(c_1) eta(u))^-1 · A]` where `T_{n-2}` counts
/// length-(n-2) brackets.
pub(crate) fn fixed_second_from_tail(
    ring: &RingCtx,
    tail: &CountTable,
    n: usize,
    target: &Mat2,
) -> SecondEntryCounts {
    let m = ring.modulus() as usize;
    let reachable = target.det() == ring.one();
    let mut counts = vec![BigCount::zero(); m];
    if reachable {
        for u in ring.elements() {
            let acc = &mut counts[u.value() as usize];
            for c1 in ring.elements() {
                let head = (eta(c1) * eta(u))
                    .inverse_sl2()
                    .expect("eta products have determinant 1");
                if let Some(v) = tail.get_ref(&(head * *target)) {
                    *acc += v;
                }
            }
        }
    }
    SecondEntryCounts {
        n,
        target: *target,
        target_reachable: reachable,
        counts,
    }
}

pub(crate) fn sigma_lookup(table: &CountTable, z: Residue) -> BigCount {
    match lambda(z) {
        Ok(target) => table.get(&target),
        Err(_) => BigCount::zero(),
    }
}
