//! Modular arithmetic primitives: deterministic primality, primitive
//! roots, power-residue symbols, and streams of split primes.
//!
//! Everything is exact `u64` arithmetic with `u128` intermediates, so no
//! overflow below 2^64 and no dependence on platform word size. Primality
//! is Miller–Rabin with the fixed witness set {2, 3, ..., 37}, which is
//! deterministic for all inputs below 3.3·10^24 and therefore for every
//! `u64`.

use crate::fp_linalg::FpScalar;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller–Rabin, exact for all `u64` inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &w in &MR_WITNESSES {
        if n == w {
            return true;
        }
        if n.is_multiple_of(w) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &MR_WITNESSES {
        let mut x = pow_mod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors by trial division; fine for the `q - 1` sizes
/// seen here (search bounds stay far below 2^53).
fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_primitive_root(g: u64, q: u64) -> bool {
    if !is_prime(q) || g.is_multiple_of(q) {
        return false;
    }
    if q == 2 {
        return g % 2 == 1;
    }
    distinct_prime_factors(q - 1).iter().all(|&f| pow_mod(g, (q - 1) / f, q) != 1)
}

/// Smallest primitive root modulo the prime `q`.
pub fn primitive_root(q: u64) -> Result<u64> {
    if !is_prime(q) {
        return Err(Error::InvalidInput(format!("{q} is not prime")));
    }
    if q == 2 {
        return Ok(1);
    }
    let factors = distinct_prime_factors(q - 1);
    (2..q)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (q - 1) / f, q) != 1))
        .ok_or_else(|| Error::InvalidInput(format!("no primitive root mod {q}")))
}

/// Smallest primitive root strictly greater than `after`.
pub fn next_primitive_root(q: u64, after: u64) -> Result<u64> {
    if !is_prime(q) {
        return Err(Error::InvalidInput(format!("{q} is not prime")));
    }
    (after + 1..q)
        .find(|&g| is_primitive_root(g, q))
        .ok_or_else(|| Error::InvalidInput(format!("no primitive root mod {q} above {after}")))
}

/// Is `q` a prime that splits tamely for `p`, i.e. prime with `q ≡ 1 (mod
/// p)`? (That congruence already forces `q ≠ p`.) Errors if `p` is not an
/// odd prime; a composite `q` is merely `false`.
pub fn is_tame_split_prime(q: u64, p: u64) -> Result<bool> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    Ok(is_prime(q) && q % p == 1)
}

/// A prime `q ≡ 1 (mod p)` carrying a recorded primitive root, so that
/// every symbol computed at `q` refers to the same discrete-log basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TamePrime {
    q: u64,
    p: u64,
    g: u64,
}

impl TamePrime {
    /// Records the smallest primitive root.
    pub fn new(q: u64, p: u64) -> Result<Self> {
        if !is_tame_split_prime(q, p)? {
            return Err(Error::InvalidInput(format!("{q} does not split tamely for {p}")));
        }
        Ok(TamePrime { q, p, g: primitive_root(q)? })
    }

    /// Uses a caller-chosen root; rejects anything that is not a primitive
    /// root mod `q`.
    pub fn with_root(q: u64, p: u64, g: u64) -> Result<Self> {
        if !is_tame_split_prime(q, p)? {
            return Err(Error::InvalidInput(format!("{q} does not split tamely for {p}")));
        }
        if !is_primitive_root(g, q) {
            return Err(Error::InvalidInput(format!("{g} is not a primitive root mod {q}")));
        }
        Ok(TamePrime { q, p, g })
    }

    /// Records the second-smallest primitive root.
    pub fn second_root(q: u64, p: u64) -> Result<Self> {
        let first = TamePrime::new(q, p)?;
        Ok(TamePrime { g: next_primitive_root(q, first.g)?, ..first })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn g(&self) -> u64 {
        self.g
    }
}

/// Tame power-residue symbol of `a` at `q`: the exponent `e ∈ F_p` with
/// `a^((q-1)/p) ≡ g^(e·(q-1)/p) (mod q)`. Zero exactly when `a` is a p-th
/// power residue mod `q`.
pub fn linking_symbol(a: u64, at: &TamePrime) -> Result<FpScalar> {
    let (q, p, g) = (at.q, at.p, at.g);
    if a.is_multiple_of(q) {
        return Err(Error::SymbolUndefined { a, q });
    }
    let target = pow_mod(a, (q - 1) / p, q);
    if target == 1 {
        return Ok(FpScalar::new(0, p));
    }
    let h = pow_mod(g, (q - 1) / p, q);
    let mut acc = h;
    for e in 1..p {
        if acc == target {
            return Ok(FpScalar::new(e, p));
        }
        acc = mul_mod(acc, h, q);
    }
    Err(Error::InvalidInput(format!(
        "{a} has no power-residue exponent at {q}; recorded root {g} is not primitive"
    )))
}

/// Root-free zero test for the symbol: `a` is a p-th power residue mod `q`
/// iff `a^((q-1)/p) ≡ 1`. Used on hot search paths where only vanishing
/// matters.
pub fn is_pth_power_residue(a: u64, q: u64, p: u64) -> Result<bool> {
    if !is_tame_split_prime(q, p)? {
        return Err(Error::InvalidInput(format!("{q} does not split tamely for {p}")));
    }
    if a.is_multiple_of(q) {
        return Err(Error::SymbolUndefined { a, q });
    }
    Ok(pow_mod(a, (q - 1) / p, q) == 1)
}

/// Wild symbol at `p` for an odd prime `p`: writes `a^(p-1) = 1 + e·p`
/// modulo `p²` and returns `e ∈ F_p`. Zero exactly when `a` is a p-th
/// power in the local units at `p`.
pub fn wild_unit_exponent(a: u64, p: u64) -> Result<FpScalar> {
    if !is_prime(p) || p == 2 {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    if a.is_multiple_of(p) {
        return Err(Error::NotLocalUnit { a, p });
    }
    let p2 = p * p;
    let u = pow_mod(a, p - 1, p2);
    Ok(FpScalar::new((u - 1) / p, p))
}

/// Primes the searches must never select: explicit numbers, whole residue
/// classes, and optionally every divisor of `p`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidanceSet {
    pub explicit: BTreeSet<u64>,
    /// Pairs `(r, m)`: exclude every prime `≡ r (mod m)`.
    pub congruences: Vec<(u64, u64)>,
    pub exclude_p_divisors: bool,
}

impl AvoidanceSet {
    pub fn none() -> Self {
        AvoidanceSet::default()
    }

    pub fn divisors_of_p() -> Self {
        AvoidanceSet { exclude_p_divisors: true, ..AvoidanceSet::default() }
    }

    pub fn excludes(&self, q: u64, p: u64) -> bool {
        if self.explicit.contains(&q) {
            return true;
        }
        if self.exclude_p_divisors && p.is_multiple_of(q) {
            return true;
        }
        self.congruences.iter().any(|&(r, m)| q % m == r % m)
    }

    /// Confirms some residue class mod `lcm(p, moduli)` that is `≡ 1 (mod
    /// p)` and coprime to the modulus survives, so the tame prime stream
    /// stays infinite. A finite explicit list can never empty a class on
    /// its own.
    pub fn validate(&self, p: u64) -> Result<()> {
        let mut l: u64 = p;
        for &(_, m) in &self.congruences {
            if m == 0 {
                return Err(Error::InvalidInput("congruence modulus 0".into()));
            }
            let g = gcd(l, m);
            l = l.checked_mul(m / g).filter(|&x| x <= 100_000_000).ok_or_else(|| {
                Error::InvalidInput("avoidance congruence moduli too large to validate".into())
            })?;
        }
        let survivor = (1..=l)
            .step_by(p as usize)
            .any(|r| gcd(r, l) == 1 && !self.congruences.iter().any(|&(cr, cm)| r % cm == cr % cm));
        if survivor {
            Ok(())
        } else {
            Err(Error::InvalidInput("avoidance set excludes every tame split prime".into()))
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Sorts, dedups, and insists every member is prime. Input lists are
/// treated as sets throughout the crate.
pub fn normalized_prime_set(xs: &[u64]) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = xs.to_vec();
    out.sort_unstable();
    out.dedup();
    for &x in &out {
        if !is_prime(x) {
            return Err(Error::InvalidInput(format!("{x} is not prime")));
        }
    }
    Ok(out)
}

/// Ascending stream of tame split primes for `p`, skipping an avoidance
/// set. Yields bare primes; callers attach roots only to the few primes
/// they keep, because root-finding is far more expensive than the
/// residue tests done per candidate.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    p: u64,
    avoid: AvoidanceSet,
    next: u64,
}

impl PrimeStream {
    /// Stream starting at the smallest candidate `≥ start`.
    pub fn new(p: u64, avoid: &AvoidanceSet, start: u64) -> Self {
        let start = start.max(2);
        let rem = start % p;
        let next = if rem <= 1 { start + (1 - rem) } else { start + p + 1 - rem };
        PrimeStream { p, avoid: avoid.clone(), next }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            let q = self.next;
            self.next += self.p;
            if is_prime(q) && !self.avoid.excludes(q, self.p) {
                return Some(q);
            }
        }
    }
}
