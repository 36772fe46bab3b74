//! Splitting conditions on candidate auxiliary primes, phrased as residue
//! symbols over Q: splitting in the marked-unit Kummer field, Frobenius
//! vectors in the elementary quotient, the ramified character of a single
//! tame place, and the five-clause slot condition used by the seeker.

use crate::fp_linalg::{in_span, FpScalar};
use crate::modarith::{
    is_pth_power_residue, is_tame_split_prime, linking_symbol, normalized_prime_set, TamePrime,
};
use crate::{Error, Result};

/// Does `q` split completely in the field obtained by adjoining p-th roots
/// of every marked generator? Equivalent to all marked generators being
/// p-th power residues mod `q` (−1 contributes nothing for odd p).
pub fn splits_in_unit_kummer_field(q: u64, t: &[u64], p: u64) -> Result<bool> {
    if !is_tame_split_prime(q, p)? {
        return Err(Error::InvalidInput(format!("{q} does not split tamely for {p}")));
    }
    let t = normalized_prime_set(t)?;
    if t.binary_search(&q).is_ok() {
        return Err(Error::InvalidInput(format!("{q} is itself a marked prime")));
    }
    for &gen in &t {
        if !is_pth_power_residue(gen, q, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The image of `Frob_q` in the elementary quotient ramified along `S0`,
/// written in the inertia coordinates of the ordered places: component `i`
/// is the symbol of `q` at `p_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusVector {
    pub q: u64,
    pub s0: Vec<u64>,
    pub p: u64,
    pub vec: Vec<u64>,
}

pub fn frobenius_vector(q: u64, s0: &[TamePrime], p: u64) -> Result<FrobeniusVector> {
    if !is_tame_split_prime(q, p)? {
        return Err(Error::InvalidInput(format!("{q} does not split tamely for {p}")));
    }
    if s0.iter().any(|pl| pl.q() == q) {
        return Err(Error::InvalidInput(format!("Frobenius undefined at ramified place {q}")));
    }
    let vec: Result<Vec<u64>> = s0.iter().map(|pl| Ok(linking_symbol(q, pl)?.value())).collect();
    Ok(FrobeniusVector { q, s0: s0.iter().map(TamePrime::q).collect(), p, vec: vec? })
}

/// The character of the maximal elementary extension ramified exactly at
/// one tame place and trivial on all marked generators: the discrete log
/// at `q_b` with respect to its recorded root, coefficient 1. It exists
/// only when `q_b` splits completely in the marked-unit Kummer field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaCharacter {
    q_b: TamePrime,
    t: Vec<u64>,
}

impl EtaCharacter {
    pub fn place(&self) -> &TamePrime {
        &self.q_b
    }

    pub fn marked(&self) -> &[u64] {
        &self.t
    }
}

pub fn eta_character(q_b: &TamePrime, t: &[u64]) -> Result<EtaCharacter> {
    if !splits_in_unit_kummer_field(q_b.q(), t, q_b.p())? {
        return Err(Error::Unsolvable(format!(
            "some marked generator is not a p-th power residue mod {}: the marked character group there can vanish",
            q_b.q()
        )));
    }
    Ok(EtaCharacter { q_b: *q_b, t: normalized_prime_set(t)? })
}

/// Evaluate the character on the class of `a`; with coefficient 1 this is
/// exactly the linking symbol of `a` at the character's place.
pub fn eta_value(eta: &EtaCharacter, a: u64) -> Result<FpScalar> {
    linking_symbol(a, &eta.q_b)
}

/// The slot condition tying the candidate `q` to position `a` (1-based)
/// of the auxiliary set. All five clauses together:
///
///   1. `q` splits completely in the marked-unit Kummer field;
///   2. every other auxiliary prime is a p-th power residue mod `q`;
///   3. the slot prime itself is not;
///   4. the Frobenius vector of `q` stays outside the span of the slot
///      inertia line together with the marked-unit rows (the zero vector
///      lies in every span, so it is always rejected);
///   5. `q` is mutually unlinked with every previously chosen prime.
pub fn condition_ba(
    q: u64,
    a: usize,
    s0: &[TamePrime],
    t: &[u64],
    prior: &[TamePrime],
    p: u64,
) -> Result<bool> {
    let m = s0.len();
    if a == 0 || a > m {
        return Err(Error::InvalidInput(format!("slot index {a} out of range 1..={m}")));
    }
    if s0.iter().chain(prior).any(|pl| pl.q() == q) {
        return Err(Error::InvalidInput(format!(
            "candidate {q} already belongs to the search sets"
        )));
    }
    if !splits_in_unit_kummer_field(q, t, p)? {
        return Ok(false);
    }
    for (i, pl) in s0.iter().enumerate() {
        let split = is_pth_power_residue(pl.q(), q, p)?;
        if split == (i + 1 == a) {
            return Ok(false);
        }
    }
    let frob = frobenius_vector(q, s0, p)?;
    let mut span_rows = unit_rows(t, s0)?;
    let mut e_a = vec![0u64; m];
    e_a[a - 1] = 1;
    span_rows.push(e_a);
    if in_span(&span_rows, &frob.vec, p) {
        return Ok(false);
    }
    for prev in prior {
        if !is_pth_power_residue(q, prev.q(), p)? || !is_pth_power_residue(prev.q(), q, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rows of marked-generator symbols over the ordered places: the relations
/// every character of the marked elementary quotient must kill.
pub fn unit_rows(t: &[u64], s0: &[TamePrime]) -> Result<Vec<Vec<u64>>> {
    normalized_prime_set(t)?
        .iter()
        .map(|&gen| s0.iter().map(|pl| Ok(linking_symbol(gen, pl)?.value())).collect())
        .collect()
}
