//! Kummer groups `V_S^T` over the rationals: classes of marked units that
//! are local p-th powers at every place of `S`.
//!
//! Over Q with odd `p` the marked unit group mod p-th powers is freely
//! generated by the primes of `T` (−1 is a p-th power, the class number is
//! one), so everything reduces to the kernel of an explicit condition
//! matrix with one column per marked prime.

use crate::fp_linalg::FpMatrix;
use crate::modarith::{
    is_prime, is_tame_split_prime, linking_symbol, normalized_prime_set, wild_unit_exponent,
    TamePrime,
};
use crate::{Error, Result};

/// Generators of the marked unit group modulo p-th powers: exactly the
/// primes of `T`, in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TUnitBasis {
    generators: Vec<u64>,
}

impl TUnitBasis {
    pub fn new(t: &[u64]) -> Result<Self> {
        Ok(TUnitBasis { generators: normalized_prime_set(t)? })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }
}

/// A global element with valuation 1 at `q` and valuation 0 elsewhere,
/// normalized to the prime itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SElement {
    pub q: u64,
    pub value: u64,
}

/// Canonical choice of the auxiliary element attached to `q`: the prime
/// itself (any other choice differs by a marked unit and spans the same
/// extensions).
pub fn s_element(q: u64, t: &[u64]) -> Result<SElement> {
    if !is_prime(q) {
        return Err(Error::InvalidInput(format!("{q} is not prime")));
    }
    if normalized_prime_set(t)?.contains(&q) {
        return Err(Error::InvalidInput(format!(
            "{q} is a marked prime and has no auxiliary element"
        )));
    }
    Ok(SElement { q, value: q })
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    Ok(())
}

fn check_disjoint(s: &[u64], t: &[u64]) -> Result<()> {
    for &x in s {
        if t.binary_search(&x).is_ok() {
            return Err(Error::InvalidInput(format!("place sets overlap at {x}")));
        }
    }
    Ok(())
}

/// The local p-th-power conditions cutting `V_S^T` out of the marked unit
/// group: one column per generator of `T`, one row per place of `S` that
/// imposes anything. Tame split places contribute their power-residue
/// symbols, the place `p` contributes the wild unit exponent, and places
/// with neither property contribute no row at all (every unit is a local
/// p-th power there).
pub fn local_condition_matrix(s: &[u64], t: &[u64], p: u64) -> Result<FpMatrix> {
    check_odd_prime(p)?;
    let s = normalized_prime_set(s)?;
    let t = normalized_prime_set(t)?;
    check_disjoint(&s, &t)?;
    let mut rows = Vec::new();
    for &v in &s {
        if v == p {
            let row: Result<Vec<u64>> =
                t.iter().map(|&g| Ok(wild_unit_exponent(g, p)?.value())).collect();
            rows.push(row?);
        } else if is_tame_split_prime(v, p)? {
            let place = TamePrime::new(v, p)?;
            let row: Result<Vec<u64>> =
                t.iter().map(|&g| Ok(linking_symbol(g, &place)?.value())).collect();
            rows.push(row?);
        }
    }
    FpMatrix::from_rows(p, t.len(), &rows)
}

/// `V_S^T` as a subgroup of the marked unit group: dimension and an
/// explicit basis of exponent vectors over the `T`-generators.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct KummerGroup {
    pub s: Vec<u64>,
    pub t: Vec<u64>,
    pub p: u64,
    pub dim: usize,
    pub basis: Vec<Vec<u64>>,
}

pub fn kummer_group(s: &[u64], t: &[u64], p: u64) -> Result<KummerGroup> {
    let m = local_condition_matrix(s, t, p)?;
    let basis = m.kernel_basis();
    Ok(KummerGroup {
        s: normalized_prime_set(s)?,
        t: normalized_prime_set(t)?,
        p,
        dim: basis.len(),
        basis,
    })
}

/// Dimension of the degree-2 localization kernel; by duality it equals the
/// Kummer dimension.
pub fn sha2_dimension(s: &[u64], t: &[u64], p: u64) -> Result<usize> {
    Ok(kummer_group(s, t, p)?.dim)
}

/// `V` vanishes for the whole set and stays vanished when any single place
/// is removed. This is what forces every member of an auxiliary set to
/// carry ramification of its own.
pub fn drop_one_holds(s0: &[u64], t: &[u64], p: u64) -> Result<bool> {
    check_odd_prime(p)?;
    let s0 = normalized_prime_set(s0)?;
    for &v in &s0 {
        if !is_tame_split_prime(v, p)? {
            return Err(Error::InvalidInput(format!("{v} does not split tamely for {p}")));
        }
    }
    if kummer_group(&s0, t, p)?.dim != 0 {
        return Ok(false);
    }
    for &v in &s0 {
        let rest: Vec<u64> = s0.iter().copied().filter(|&x| x != v).collect();
        if kummer_group(&rest, t, p)?.dim != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does `q` genuinely ramify in the maximal elementary extension attached
/// to `(S, T)`? Decided by comparing first cohomology with and without the
/// place.
pub fn ramifies_in_elementary(q: u64, s: &[u64], t: &[u64], p: u64) -> Result<bool> {
    let s = normalized_prime_set(s)?;
    if s.binary_search(&q).is_err() {
        return Err(Error::InvalidInput(format!("{q} is not a place of the curve")));
    }
    let rest: Vec<u64> = s.iter().copied().filter(|&x| x != q).collect();
    let with = crate::cohomology::global_profile(&s, t, p)?;
    let without = crate::cohomology::global_profile(&rest, t, p)?;
    Ok(with.h[1] > without.h[1])
}
