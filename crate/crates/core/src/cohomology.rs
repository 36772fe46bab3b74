//! Dimension bookkeeping for marked curves over Q: local and global
//! cohomology, Euler characteristics, an independent character-count for
//! h¹, excision, and removal of redundant places.

use serde::{Deserialize, Serialize};

use crate::fp_linalg::FpMatrix;
use crate::kummer;
use crate::modarith::{
    is_prime, is_tame_split_prime, linking_symbol, normalized_prime_set, TamePrime,
};
use crate::{Error, Result};

/// Local dimensions at one closed point. Everything below degree 2 and
/// above degree 3 vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalCohomologyDims {
    pub q: u64,
    pub p: u64,
    pub marked: bool,
    pub h2_x: u64,
    pub h3_x: u64,
}

/// `h²_x = δ_q + [q = p] + [marked]`, `h³_x = δ_q`, where `δ_q = 1` exactly
/// when the residue field contains the p-th roots of unity (`q ≡ 1 mod p`,
/// `q ≠ p`; over Q the place `p` itself has `δ = 0` for odd `p`).
pub fn local_dims(q: u64, p: u64, marked: bool) -> LocalCohomologyDims {
    let delta = u64::from(q != p && q % p == 1);
    let degree = u64::from(q == p);
    LocalCohomologyDims { q, p, marked, h2_x: delta + degree + u64::from(marked), h3_x: delta }
}

/// The four global dimensions of `(X∖S, T)` with their Euler
/// characteristic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyProfile {
    pub s: Vec<u64>,
    pub t: Vec<u64>,
    pub p: u64,
    pub h: [u64; 4],
    pub chi: i64,
    pub theta: u64,
    pub vdim: u64,
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Global dimensions over Q:
///
///   h⁰ = 1,
///   h¹ = Σ_{q∈S} δ_q + dim V_S^T + [p ∈ S] − #T,
///   h² = Σ_{q∈S} δ_q + dim V_S^T,
///   h³ = θ = 0,
///
/// and χ = 1 + #T − [p ∈ S]. The h¹ expression is never negative: the
/// condition matrix for `V_S^T` has at most `Σδ + [p∈S]` rows, so `vdim ≥
/// #T − Σδ − [p∈S]`.
pub fn global_profile(s: &[u64], t: &[u64], p: u64) -> Result<CohomologyProfile> {
    check_odd_prime(p)?;
    let s = normalized_prime_set(s)?;
    let t = normalized_prime_set(t)?;
    let vdim = kummer::kummer_group(&s, &t, p)?.dim as u64;
    let delta: u64 = s.iter().map(|&q| local_dims(q, p, false).h3_x).sum();
    let wild = u64::from(s.binary_search(&p).is_ok());
    let h1 = (delta + vdim + wild).checked_sub(t.len() as u64).expect("h1 formula is non-negative");
    let h2 = delta + vdim;
    let chi = 1 + t.len() as i64 - wild as i64;
    debug_assert_eq!(1 - h1 as i64 + h2 as i64, chi);
    Ok(CohomologyProfile { s, t, p, h: [1, h1, h2, 0], chi, theta: 0, vdim })
}

/// Independent h¹ count: the rank-p character group ramified only inside a
/// tame `S` and trivial on all marked generators has dimension `|S| −
/// rank(symbols)`. Shares nothing with `global_profile` except the symbols
/// themselves.
pub fn h1_via_characters(s: &[u64], t: &[u64], p: u64) -> Result<u64> {
    check_odd_prime(p)?;
    let s = normalized_prime_set(s)?;
    let t = normalized_prime_set(t)?;
    for &q in &s {
        if !is_tame_split_prime(q, p)? {
            return Err(Error::InvalidInput(format!(
                "character oracle is tame-only: {q} does not split tamely for {p}"
            )));
        }
    }
    let places: Vec<TamePrime> = s.iter().map(|&q| TamePrime::new(q, p)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(t.len());
    for &gen in &t {
        let row: Result<Vec<u64>> =
            places.iter().map(|pl| Ok(linking_symbol(gen, pl)?.value())).collect();
        rows.push(row?);
    }
    let m = FpMatrix::from_rows(p, s.len(), &rows)?;
    Ok(s.len() as u64 - m.rank() as u64)
}

/// The long exact sequence relating the marked and unmarked curves reduces
/// to one alternating-sum identity on dimensions.
pub fn excision_identity_holds(s: &[u64], t: &[u64], p: u64) -> Result<bool> {
    let marked = global_profile(s, t, p)?;
    let plain = global_profile(s, &[], p)?;
    let sum = marked.h[1] as i64 - plain.h[1] as i64 + t.len() as i64 - marked.h[2] as i64
        + plain.h[2] as i64;
    Ok(sum == 0)
}

/// Drops the places that impose no local condition (`q ≢ 1 mod p`, `q ≠
/// p`); the profile of the reduced set is identical. Idempotent.
pub fn s_min(s: &[u64], p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = s.iter().copied().filter(|&q| q == p || q % p == 1).collect();
    out.sort_unstable();
    out.dedup();
    out
}
