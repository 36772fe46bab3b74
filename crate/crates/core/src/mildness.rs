//! Mildness certification: the symbol table over the auxiliary places, the
//! character basis it supports, the cup-product matrix, and the verdicts
//! that certify cohomological dimension 2 for the associated pro-p group.
//!
//! A [`Certificate`] is a self-contained record of one pipeline run. Its
//! canonical JSON form is deterministic (struct field order and sorted
//! maps), and [`verify`] recomputes every derived quantity from the
//! recorded roots without re-running any search: structural breakage is an
//! error, mathematical disagreement returns `false`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cohomology::{self, CohomologyProfile};
use crate::conditions::condition_ba;
use crate::fp_linalg::{in_span, FpMatrix, FpScalar};
use crate::kummer;
use crate::modarith::{
    is_prime, is_primitive_root, is_tame_split_prime, linking_symbol, normalized_prime_set,
    pow_mod, wild_unit_exponent, AvoidanceSet, TamePrime,
};
use crate::seeker::{self, SearchConfig, SeekerTrace};
use crate::{Error, Result};

/// Which primitive root to record at each place. Symbols scale by a fixed
/// nonzero constant per place when the root changes, so every verdict is
/// invariant under this choice; it exists to demonstrate exactly that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootChoice {
    Smallest,
    SecondSmallest,
}

/// One recorded symbol `ℓ(residue, modulus) = value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolEntry {
    pub residue: u64,
    pub modulus: u64,
    pub value: u64,
}

/// All symbols the certificate needs: for every place `v` of `s0 ∪ q` and
/// every other participant `a` (marked generators and places alike), the
/// value of `ℓ(a, v)` with respect to the recorded primitive root at `v`.
/// Entries are sorted by `(modulus, residue)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkingTable {
    pub p: u64,
    pub s0: Vec<u64>,
    pub q: Vec<u64>,
    pub marking: Vec<u64>,
    pub roots: BTreeMap<u64, u64>,
    pub symbols: Vec<SymbolEntry>,
}

impl LinkingTable {
    /// All places in column order: auxiliary places first, then linking
    /// primes.
    pub fn places(&self) -> impl Iterator<Item = u64> + '_ {
        self.s0.iter().chain(&self.q).copied()
    }

    /// Looks up `ℓ(a, v)`; a missing entry means the table is incomplete.
    pub fn symbol(&self, a: u64, v: u64) -> Result<FpScalar> {
        self.symbols
            .binary_search_by(|e| (e.modulus, e.residue).cmp(&(v, a)))
            .map(|i| FpScalar::new(self.symbols[i].value, self.p))
            .map_err(|_| {
                Error::MalformedCertificate(format!(
                    "linking table is missing the symbol of {a} at {v}"
                ))
            })
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Records the primitive roots and every pairwise symbol among the places
/// and the marked generators. Place lists keep their slot order; a prime
/// appearing twice anywhere is an error because its symbol at itself is
/// undefined.
pub fn build_linking_table(
    s0: &[u64],
    q: &[u64],
    marking: &[u64],
    p: u64,
    choice: RootChoice,
) -> Result<LinkingTable> {
    check_odd_prime(p)?;
    let marking = normalized_prime_set(marking)?;
    let mut seen = BTreeSet::new();
    for &x in s0.iter().chain(q).chain(&marking) {
        if !seen.insert(x) {
            return Err(Error::InvalidInput(format!("place sets overlap at {x}")));
        }
    }
    for &v in s0.iter().chain(q) {
        if !is_tame_split_prime(v, p)? {
            return Err(Error::InvalidInput(format!("{v} does not split tamely for {p}")));
        }
    }
    let mut roots = BTreeMap::new();
    let mut anchors = BTreeMap::new();
    for &v in s0.iter().chain(q) {
        let place = match choice {
            RootChoice::Smallest => TamePrime::new(v, p)?,
            RootChoice::SecondSmallest => TamePrime::second_root(v, p)?,
        };
        roots.insert(v, place.g());
        anchors.insert(v, place);
    }
    let mut symbols = Vec::new();
    for (&v, place) in &anchors {
        for &a in marking.iter().chain(s0).chain(q) {
            if a == v {
                continue;
            }
            symbols.push(SymbolEntry {
                residue: a,
                modulus: v,
                value: linking_symbol(a, place)?.value(),
            });
        }
    }
    symbols.sort_unstable_by_key(|e| (e.modulus, e.residue));
    Ok(LinkingTable { p, s0: s0.to_vec(), q: q.to_vec(), marking, roots, symbols })
}

/// The two recorded evaluations of `ψ_a`: its value on the Frobenius at the
/// linking prime `q_a` (the normalization anchor) and on the distinguished
/// lift at the slot place itself, computed from the place-place symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiEvaluation {
    pub at_linking_prime: u64,
    pub lift_at_slot_prime: u64,
}

/// Coefficient vectors over the auxiliary places: `chi[a]` is trivial on
/// the marked units and on the Frobenius of `q_a` with a nonzero slot
/// coordinate (normalized to 1); `psi[a]` is trivial on the marked units
/// and sends the Frobenius of `q_a` to 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterBasis {
    pub chi: Vec<Vec<u64>>,
    pub psi: Vec<Vec<u64>>,
    pub psi_evaluations: Vec<PsiEvaluation>,
}

fn dot(x: &[u64], y: &[u64], p: u64) -> u64 {
    x.iter().zip(y).fold(0u64, |acc, (&a, &b)| (acc + a % p * (b % p)) % p)
}

fn marked_unit_rows(table: &LinkingTable) -> Result<Vec<Vec<u64>>> {
    table
        .marking
        .iter()
        .map(|&gen| table.s0.iter().map(|&v| Ok(table.symbol(gen, v)?.value())).collect())
        .collect()
}

fn frobenius_row(table: &LinkingTable, q: u64) -> Result<Vec<u64>> {
    table.s0.iter().map(|&v| Ok(table.symbol(q, v)?.value())).collect()
}

/// Solves for the character pairs slot by slot, deterministically: the
/// kernel bases come out in ascending free-column order, and the first
/// vector meeting the side condition wins.
pub fn character_basis(table: &LinkingTable) -> Result<CharacterBasis> {
    let p = table.p;
    let m = table.s0.len();
    if table.q.len() != m {
        return Err(Error::InvalidInput(format!(
            "need one linking prime per place: {m} places, {} linking primes",
            table.q.len()
        )));
    }
    let units = marked_unit_rows(table)?;
    let psi_candidates = FpMatrix::from_rows(p, m, &units)?.kernel_basis();
    let mut chi = Vec::with_capacity(m);
    let mut psi = Vec::with_capacity(m);
    let mut psi_evaluations = Vec::with_capacity(m);
    for a in 0..m {
        let frob = frobenius_row(table, table.q[a])?;
        let mut rows = units.clone();
        rows.push(frob.clone());
        let kernel = FpMatrix::from_rows(p, m, &rows)?.kernel_basis();
        let Some(c0) = kernel.iter().find(|v| v[a] != 0) else {
            return Err(Error::Unsolvable(format!(
                "no character trivial on the marked units and on the Frobenius of {} keeps a nonzero coordinate at place {}",
                table.q[a], table.s0[a]
            )));
        };
        let inv = pow_mod(c0[a], p - 2, p);
        chi.push(c0.iter().map(|&x| x * inv % p).collect());
        let Some(d0) = psi_candidates.iter().find(|v| dot(v, &frob, p) != 0) else {
            return Err(Error::Unsolvable(format!(
                "every character trivial on the marked units vanishes on the Frobenius of {}",
                table.q[a]
            )));
        };
        let inv = pow_mod(dot(d0, &frob, p), p - 2, p);
        let d: Vec<u64> = d0.iter().map(|&x| x * inv % p).collect();
        let at_linking_prime = dot(&d, &frob, p);
        let mut lift_at_slot_prime = 0u64;
        for (i, &coeff) in d.iter().enumerate() {
            if i != a {
                let sym = table.symbol(table.s0[a], table.s0[i])?.value();
                lift_at_slot_prime = (lift_at_slot_prime + coeff * sym) % p;
            }
        }
        psi.push(d);
        psi_evaluations.push(PsiEvaluation { at_linking_prime, lift_at_slot_prime });
    }
    Ok(CharacterBasis { chi, psi, psi_evaluations })
}

/// The `2m × 2m` cup-product matrix. Columns run over the auxiliary places
/// and then the linking primes; rows pair each `χ_a` and `ψ_a` with the
/// ramified character `η_a` of its slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CupMatrix {
    pub p: u64,
    pub m: usize,
    pub col_places: Vec<u64>,
    pub row_labels: Vec<String>,
    pub entries: FpMatrix,
}

fn cup_row_labels(m: usize) -> Vec<String> {
    let mut labels = Vec::with_capacity(2 * m);
    for a in 1..=m {
        labels.push(format!("chi_{a}*eta_{a}"));
    }
    for a in 1..=m {
        labels.push(format!("psi_{a}*eta_{a}"));
    }
    labels
}

/// Local cup-product coordinates of `φ ∪ η_a` for a character `φ` with
/// coefficient vector `c`: at the place `p_i` the component is
/// `−c_i·ℓ(p_i, q_a)`, at the linking prime `q_a` it is `φ(Frob_{q_a}) =
/// Σ_i c_i·ℓ(q_a, p_i)`, and at the other linking primes both characters
/// are unramified with trivial pairing.
pub fn assemble_cup_matrix(table: &LinkingTable, chars: &CharacterBasis) -> Result<CupMatrix> {
    let p = table.p;
    let m = table.s0.len();
    if chars.chi.len() != m || chars.psi.len() != m {
        return Err(Error::InvalidInput(format!(
            "character basis has {} + {} rows for {m} places",
            chars.chi.len(),
            chars.psi.len()
        )));
    }
    let mut entries = FpMatrix::zeros(2 * m, 2 * m, p);
    for a in 0..m {
        let frob = frobenius_row(table, table.q[a])?;
        for (block, coeff) in [(0usize, &chars.chi[a]), (m, &chars.psi[a])] {
            if coeff.len() != m {
                return Err(Error::InvalidInput(format!(
                    "character coefficient vector has {} entries for {m} places",
                    coeff.len()
                )));
            }
            let r = block + a;
            for (i, &c) in coeff.iter().enumerate() {
                let sym = table.symbol(table.s0[i], table.q[a])?.value();
                entries.set(r, i, (p - c % p * sym % p) % p);
            }
            entries.set(r, m + a, dot(coeff, &frob, p));
        }
    }
    Ok(CupMatrix {
        p,
        m,
        col_places: table.places().collect(),
        row_labels: cup_row_labels(m),
        entries,
    })
}

/// Display semantics of the certified cup matrix: each `χ_a ∪ η_a` row is
/// supported exactly on its own place column and vanishes on every linking
/// column, and each `ψ_a ∪ η_a` row is nonzero on its own linking column
/// and zero on the others (its place columns are unconstrained).
pub fn shape_check(cup: &CupMatrix) -> bool {
    let m = cup.m;
    if cup.entries.rows() != 2 * m || cup.entries.cols() != 2 * m {
        return false;
    }
    for a in 0..m {
        for i in 0..m {
            if (cup.entries.get(a, i) != 0) != (i == a) {
                return false;
            }
        }
        for j in 0..m {
            if cup.entries.get(a, m + j) != 0 {
                return false;
            }
            if (cup.entries.get(m + a, m + j) != 0) != (j == a) {
                return false;
            }
        }
    }
    true
}

/// Whether every ordered pair of distinct linking primes is unlinked; these
/// symbols are exactly the nonzero coordinates the pairings of two ramified
/// characters `η_a ∪ η_b` can have.
pub fn vv_block_zero(table: &LinkingTable) -> Result<bool> {
    for &a in &table.q {
        for &b in &table.q {
            if a != b && !table.symbol(a, b)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The mildness criterion: the ramified-ramified pairings all vanish and
/// the cup matrix has full rank `2m`.
pub fn mildness_check(table: &LinkingTable, cup: &CupMatrix) -> Result<bool> {
    Ok(vv_block_zero(table)? && cup.entries.rank() == 2 * cup.m)
}

/// Everything the certificate asserts, each recomputable from the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    /// The Kummer groups of the enlarged curve and of the auxiliary curve
    /// both vanish.
    pub vdim_zero: bool,
    /// The cup matrix has the certified support pattern.
    pub shape_ok: bool,
    /// All ramified-ramified pairings vanish.
    pub vv_zero: bool,
    /// The cup matrix is invertible.
    pub rank_full: bool,
    /// `vv_zero` and `rank_full` together.
    pub mild: bool,
    /// Cohomological dimension 2, a consequence of mildness.
    pub cd2: bool,
    /// The curve is aspherical (K(π,1)): group cohomology of the
    /// fundamental pro-p group coincides with the étale cohomology of the
    /// curve. Certified as mildness plus the invertible pairing.
    pub kpi1: bool,
    /// Every place of the enlarged set ramifies in the elementary quotient.
    pub ramified_everywhere: bool,
}

/// One certified consequence, flagged as derived by the general theorem
/// rather than checked directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub holds: bool,
    pub derived_by_theorem: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claims {
    /// Local Galois groups at the certified places are realized exactly.
    pub local_realization: Claim,
    /// The decomposition groups generate a free product decomposition.
    pub free_product: Claim,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub version: String,
}

/// A full, self-contained certification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: String,
    pub generator: Generator,
    pub p: u64,
    pub s: Vec<u64>,
    pub t: Vec<u64>,
    pub avoid: AvoidanceSet,
    pub config: SearchConfig,
    pub root_choice: RootChoice,
    pub marking: Vec<u64>,
    pub t0: Vec<u64>,
    pub s0: Vec<u64>,
    pub q: Vec<u64>,
    pub table: LinkingTable,
    pub characters: CharacterBasis,
    pub cup: CupMatrix,
    pub profile: CohomologyProfile,
    pub auxiliary_profile: CohomologyProfile,
    pub verdicts: Verdicts,
    pub claims: Claims,
    pub trace: SeekerTrace,
}

pub const CERTIFICATE_VERSION: &str = "1";

impl Certificate {
    /// Canonical form: pretty JSON with a trailing newline. Field order is
    /// fixed by the struct and all maps are sorted, so identical runs are
    /// byte-identical.
    pub fn to_canonical_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("certificate serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        serde_json::from_str(text).map_err(|e| Error::MalformedCertificate(e.to_string()))
    }
}

fn compute_verdicts(
    table: &LinkingTable,
    cup: &CupMatrix,
    profile: &CohomologyProfile,
    auxiliary_profile: &CohomologyProfile,
) -> Result<Verdicts> {
    let vdim_zero = profile.vdim == 0 && auxiliary_profile.vdim == 0;
    let shape_ok = shape_check(cup);
    let vv_zero = vv_block_zero(table)?;
    let rank_full = cup.entries.rank() == 2 * cup.m;
    let mild = vv_zero && rank_full;
    let mut ramified_everywhere = true;
    for &v in &profile.s {
        ramified_everywhere &=
            kummer::ramifies_in_elementary(v, &profile.s, &profile.t, profile.p)?;
    }
    Ok(Verdicts {
        vdim_zero,
        shape_ok,
        vv_zero,
        rank_full,
        mild,
        cd2: mild,
        kpi1: mild && rank_full,
        ramified_everywhere,
    })
}

fn derive_claims(v: &Verdicts) -> Claims {
    let all = v.vdim_zero
        && v.shape_ok
        && v.vv_zero
        && v.rank_full
        && v.mild
        && v.cd2
        && v.kpi1
        && v.ramified_everywhere;
    let claim = Claim { holds: all, derived_by_theorem: true };
    Claims { local_realization: claim, free_product: claim }
}

fn sorted_union(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Runs the whole pipeline for the curve `(S, T)` and packages the result.
pub fn certify(
    p: u64,
    s: &[u64],
    t: &[u64],
    avoid: &AvoidanceSet,
    config: &SearchConfig,
) -> Result<Certificate> {
    certify_with_roots(p, s, t, avoid, config, RootChoice::Smallest)
}

/// As [`certify`], with an explicit primitive-root policy for the table.
pub fn certify_with_roots(
    p: u64,
    s: &[u64],
    t: &[u64],
    avoid: &AvoidanceSet,
    config: &SearchConfig,
    root_choice: RootChoice,
) -> Result<Certificate> {
    check_odd_prime(p)?;
    let s = normalized_prime_set(s)?;
    let t = normalized_prime_set(t)?;
    let sought = seeker::seek_certified_set(&s, &t, avoid, p, config)?;
    let marking = sorted_union(&s, &t);
    let s0: Vec<u64> = sought.s0.iter().map(TamePrime::q).collect();
    let q: Vec<u64> = sought.q.iter().map(TamePrime::q).collect();
    let table = build_linking_table(&s0, &q, &marking, p, root_choice)?;
    let characters = character_basis(&table)?;
    let cup = assemble_cup_matrix(&table, &characters)?;
    let s_full = sorted_union(&s, &sorted_union(&s0, &q));
    let profile = cohomology::global_profile(&s_full, &t, p)?;
    let auxiliary_profile = cohomology::global_profile(&sorted_union(&s0, &q), &marking, p)?;
    // With both Kummer groups dead, the auxiliary curve's h² counts one δ
    // per tame split place — exactly the cup matrix's side length.
    debug_assert_eq!(auxiliary_profile.h[2], 2 * s0.len() as u64);
    let verdicts = compute_verdicts(&table, &cup, &profile, &auxiliary_profile)?;
    let claims = derive_claims(&verdicts);
    Ok(Certificate {
        version: CERTIFICATE_VERSION.to_string(),
        generator: Generator {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        p,
        s,
        t,
        avoid: avoid.clone(),
        config: *config,
        root_choice,
        marking,
        t0: sought.t0,
        s0,
        q,
        table,
        characters,
        cup,
        profile,
        auxiliary_profile,
        verdicts,
        claims,
        trace: sought.trace,
    })
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedCertificate(msg.into())
}

/// Structural validation: field shapes, index sets, and cross-references.
/// Any failure here means the object is not a certificate at all.
fn structural_check(cert: &Certificate) -> Result<()> {
    if cert.version != CERTIFICATE_VERSION {
        return Err(malformed(format!("unsupported certificate version {:?}", cert.version)));
    }
    let p = cert.p;
    if p == 2 || !is_prime(p) {
        return Err(malformed(format!("{p} is not an odd prime")));
    }
    for (label, stored) in [("S", &cert.s), ("T", &cert.t)] {
        let normalized = normalized_prime_set(stored)
            .map_err(|e| malformed(format!("{label} is not a set of primes: {e}")))?;
        if &normalized != stored {
            return Err(malformed(format!("{label} is not sorted and duplicate-free")));
        }
    }
    if !cert.t0.is_empty() {
        return Err(malformed("the extra marking slot must be empty"));
    }
    if cert.marking != sorted_union(&cert.s, &cert.t) {
        return Err(malformed("marking does not equal the union of S and T"));
    }
    if cert.marking.len() != cert.s.len() + cert.t.len() {
        return Err(malformed("S and T overlap"));
    }
    cert.avoid.validate(p).map_err(|e| malformed(e.to_string()))?;
    let m = cert.s0.len();
    if cert.q.len() != m {
        return Err(malformed(format!(
            "need one linking prime per place: {m} places, {} linking primes",
            cert.q.len()
        )));
    }
    let table = &cert.table;
    if table.p != p || table.s0 != cert.s0 || table.q != cert.q || table.marking != cert.marking {
        return Err(malformed("linking table disagrees with the certificate header"));
    }
    let mut seen = BTreeSet::new();
    for x in table.places().chain(cert.marking.iter().copied()) {
        if !seen.insert(x) {
            return Err(malformed(format!("place sets overlap at {x}")));
        }
    }
    for v in table.places() {
        if !is_tame_split_prime(v, p).map_err(|e| malformed(e.to_string()))? {
            return Err(malformed(format!("{v} does not split tamely for {p}")));
        }
    }
    let place_set: BTreeSet<u64> = table.places().collect();
    if table.roots.keys().copied().collect::<BTreeSet<u64>>() != place_set {
        return Err(malformed("root map does not cover exactly the places"));
    }
    let mut expected = Vec::new();
    for &v in &place_set {
        for &a in cert.marking.iter().chain(&table.s0).chain(&table.q) {
            if a != v {
                expected.push((v, a));
            }
        }
    }
    expected.sort_unstable();
    let actual: Vec<(u64, u64)> = table.symbols.iter().map(|e| (e.modulus, e.residue)).collect();
    if actual != expected {
        return Err(malformed("symbol table does not cover exactly the required pairs"));
    }
    if let Some(e) = table.symbols.iter().find(|e| e.value >= p) {
        return Err(malformed(format!(
            "symbol of {} at {} is not reduced modulo {p}",
            e.residue, e.modulus
        )));
    }
    let chars = &cert.characters;
    if chars.chi.len() != m || chars.psi.len() != m || chars.psi_evaluations.len() != m {
        return Err(malformed("character basis does not have one pair per place"));
    }
    for c in chars.chi.iter().chain(&chars.psi) {
        if c.len() != m || c.iter().any(|&x| x >= p) {
            return Err(malformed("character coefficient vector has the wrong shape"));
        }
    }
    for e in &chars.psi_evaluations {
        if e.at_linking_prime >= p || e.lift_at_slot_prime >= p {
            return Err(malformed("character evaluation is not reduced"));
        }
    }
    let cup = &cert.cup;
    if cup.p != p
        || cup.m != m
        || cup.col_places != table.places().collect::<Vec<u64>>()
        || cup.row_labels != cup_row_labels(m)
        || cup.entries.rows() != 2 * m
        || cup.entries.cols() != 2 * m
        || cup.entries.modulus() != p
    {
        return Err(malformed("cup matrix header disagrees with the certificate"));
    }
    let s_full = sorted_union(&cert.s, &place_set.iter().copied().collect::<Vec<u64>>());
    if cert.profile.s != s_full || cert.profile.t != cert.t || cert.profile.p != p {
        return Err(malformed("profile does not describe the enlarged curve"));
    }
    let aux_s: Vec<u64> = place_set.into_iter().collect();
    if cert.auxiliary_profile.s != aux_s
        || cert.auxiliary_profile.t != cert.marking
        || cert.auxiliary_profile.p != p
    {
        return Err(malformed("auxiliary profile does not describe the auxiliary curve"));
    }
    Ok(())
}

/// Mathematical validation: everything derived is recomputed from the
/// recorded roots and compared with what the certificate stores. Returns
/// `false` at the first disagreement.
fn mathematical_check(cert: &Certificate) -> Result<bool> {
    let p = cert.p;
    let table = &cert.table;
    for (&v, &g) in &table.roots {
        if !is_primitive_root(g, v) {
            return Ok(false);
        }
    }
    for v in table.places() {
        if cert.avoid.excludes(v, p) {
            return Ok(false);
        }
    }
    let mut anchors = BTreeMap::new();
    for (&v, &g) in &table.roots {
        anchors.insert(v, TamePrime::with_root(v, p, g)?);
    }
    for entry in &table.symbols {
        let place = &anchors[&entry.modulus];
        if linking_symbol(entry.residue, place)?.value() != entry.value {
            return Ok(false);
        }
    }
    let m = cert.s0.len();
    let units = marked_unit_rows(table)?;
    for a in 0..m {
        let frob = frobenius_row(table, table.q[a])?;
        let chi = &cert.characters.chi[a];
        if chi[a] == 0 || dot(chi, &frob, p) != 0 || units.iter().any(|row| dot(row, chi, p) != 0) {
            return Ok(false);
        }
        let psi = &cert.characters.psi[a];
        let eval = &cert.characters.psi_evaluations[a];
        let at_linking = dot(psi, &frob, p);
        if at_linking == 0
            || at_linking != eval.at_linking_prime
            || units.iter().any(|row| dot(row, psi, p) != 0)
        {
            return Ok(false);
        }
        let mut lift = 0u64;
        for (i, &coeff) in psi.iter().enumerate() {
            if i != a {
                lift = (lift + coeff * table.symbol(table.s0[a], table.s0[i])?.value()) % p;
            }
        }
        if lift != eval.lift_at_slot_prime {
            return Ok(false);
        }
    }
    if assemble_cup_matrix(table, &cert.characters)? != cert.cup {
        return Ok(false);
    }
    if cohomology::global_profile(&cert.profile.s, &cert.profile.t, p)? != cert.profile {
        return Ok(false);
    }
    let aux = &cert.auxiliary_profile;
    if cohomology::global_profile(&aux.s, &aux.t, p)? != *aux {
        return Ok(false);
    }
    if !kummer::drop_one_holds(&cert.s0, &cert.marking, p)? {
        return Ok(false);
    }
    let s0_places: Vec<TamePrime> = cert
        .s0
        .iter()
        .map(|v| TamePrime::with_root(*v, p, table.roots[v]))
        .collect::<Result<_>>()?;
    let q_places: Vec<TamePrime> = cert
        .q
        .iter()
        .map(|v| TamePrime::with_root(*v, p, table.roots[v]))
        .collect::<Result<_>>()?;
    for (idx, place) in q_places.iter().enumerate() {
        if !condition_ba(place.q(), idx + 1, &s0_places, &cert.marking, &q_places[..idx], p)? {
            return Ok(false);
        }
    }
    let verdicts = compute_verdicts(table, &cert.cup, &cert.profile, &cert.auxiliary_profile)?;
    if verdicts != cert.verdicts {
        return Ok(false);
    }
    if derive_claims(&verdicts) != cert.claims {
        return Ok(false);
    }
    Ok(true)
}

/// Re-derives everything a certificate asserts without re-running any
/// search. A structurally broken certificate is an error; a well-formed
/// one whose recorded mathematics disagrees with recomputation yields
/// `Ok(false)`. Roots other than the generator's defaults are accepted as
/// long as every recomputation agrees — all verdicts are invariant under
/// the choice of primitive roots. The recorded root policy and search
/// trace are advisory and are not checked.
pub fn verify(cert: &Certificate) -> Result<bool> {
    structural_check(cert)?;
    mathematical_check(cert)
}

/// One probed prime of an enlargement check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobImage {
    pub prime: u64,
    pub in_certified_set: bool,
    pub image_nonzero: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnlargementOutcome {
    /// Every probed prime has nonzero Frobenius image: the certificate's
    /// verdicts survive enlarging the curve by these places.
    SufficientYes,
    /// Some probed prime's image vanishes; the criterion is silent.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnlargementReport {
    pub outcome: EnlargementOutcome,
    pub evaluations: Vec<FrobImage>,
}

/// Sufficient criterion for adding places to a certified curve: a prime
/// whose Frobenius image in the elementary quotient stays outside the span
/// of the marked-unit images cannot collapse any verdict. Members of the
/// certified set pass trivially (they ramify), and probing a marked prime
/// is a usage error.
pub fn enlargement_check(cert: &Certificate, extra: &[u64]) -> Result<EnlargementReport> {
    let p = cert.p;
    let extra = normalized_prime_set(extra)?;
    let s_full = &cert.profile.s;
    for &x in &extra {
        if cert.t.binary_search(&x).is_ok() {
            return Err(Error::InvalidInput(format!("{x} is a marked prime of the certificate")));
        }
    }
    let mut tame_places = Vec::new();
    for &v in s_full {
        if v != p && v % p == 1 {
            let place = match cert.table.roots.get(&v) {
                Some(&g) => TamePrime::with_root(v, p, g)?,
                None => TamePrime::new(v, p)?,
            };
            tame_places.push(place);
        }
    }
    let wild = s_full.binary_search(&p).is_ok();
    let mut units = Vec::with_capacity(cert.t.len());
    for &gen in &cert.t {
        let mut row: Vec<u64> = tame_places
            .iter()
            .map(|pl| Ok(linking_symbol(gen, pl)?.value()))
            .collect::<Result<_>>()?;
        if wild {
            row.push(wild_unit_exponent(gen, p)?.value());
        }
        units.push(row);
    }
    let mut evaluations = Vec::with_capacity(extra.len());
    let mut all_nonzero = true;
    for &x in &extra {
        if s_full.binary_search(&x).is_ok() {
            evaluations.push(FrobImage { prime: x, in_certified_set: true, image_nonzero: true });
            continue;
        }
        let mut image: Vec<u64> = tame_places
            .iter()
            .map(|pl| Ok(linking_symbol(x, pl)?.value()))
            .collect::<Result<_>>()?;
        if wild {
            image.push(wild_unit_exponent(x, p)?.value());
        }
        let image_nonzero = !in_span(&units, &image, p);
        all_nonzero &= image_nonzero;
        evaluations.push(FrobImage { prime: x, in_certified_set: false, image_nonzero });
    }
    let outcome = if all_nonzero {
        EnlargementOutcome::SufficientYes
    } else {
        EnlargementOutcome::Inconclusive
    };
    Ok(EnlargementReport { outcome, evaluations })
}

/// A bipartition found by [`mild_split_probe`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitProbe {
    pub mild: bool,
    pub u: Vec<u64>,
    pub v: Vec<u64>,
}

/// Searches for a bipartition `U ⊔ V` of an unmarked tame place set that
/// certifies mildness directly: the places of `V` must be pairwise
/// mutually unlinked, and the `|U|·|V|` pairing rows (the coordinates of
/// `η_u ∪ η_v`: `−ℓ(u, v)` at `u` and `ℓ(v, u)` at `v`) must have full
/// rank `|U| + |V|`. With no marking the Kummer group is trivially dead,
/// so h² equals the place count and full rank is exactly surjectivity of
/// the pairing. Bipartitions are scanned in ascending mask order over the
/// sorted places; the first success is reported.
pub fn mild_split_probe(places: &[u64], p: u64) -> Result<SplitProbe> {
    check_odd_prime(p)?;
    let places = normalized_prime_set(places)?;
    for &x in &places {
        if !is_tame_split_prime(x, p)? {
            return Err(Error::InvalidInput(format!("{x} does not split tamely for {p}")));
        }
    }
    let n = places.len();
    if n > 20 {
        return Err(Error::InvalidInput(format!("{n} places is too many to probe")));
    }
    let anchors: Vec<TamePrime> =
        places.iter().map(|&v| TamePrime::new(v, p)).collect::<Result<_>>()?;
    let mut sym = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sym[i][j] = linking_symbol(places[i], &anchors[j])?.value();
            }
        }
    }
    if n >= 2 {
        'mask: for mask in 1u32..((1u32 << n) - 1) {
            let side_v: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let side_u: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
            for (k, &x) in side_v.iter().enumerate() {
                for &y in &side_v[k + 1..] {
                    if sym[x][y] != 0 || sym[y][x] != 0 {
                        continue 'mask;
                    }
                }
            }
            let mut rows = Vec::with_capacity(side_u.len() * side_v.len());
            for &u in &side_u {
                for &v in &side_v {
                    let mut row = vec![0u64; n];
                    row[u] = (p - sym[u][v]) % p;
                    row[v] = sym[v][u];
                    rows.push(row);
                }
            }
            if FpMatrix::from_rows(p, n, &rows)?.rank() == n {
                return Ok(SplitProbe {
                    mild: true,
                    u: side_u.into_iter().map(|i| places[i]).collect(),
                    v: side_v.into_iter().map(|i| places[i]).collect(),
                });
            }
        }
    }
    Ok(SplitProbe { mild: false, u: Vec::new(), v: Vec::new() })
}
