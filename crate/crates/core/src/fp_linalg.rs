//! Exact dense linear algebra over the prime field `F_p`.
//!
//! Dimensions stay small (at most a few hundred) and `p ≤ 97`, so a dense
//! row-major layout with textbook Gauss–Jordan elimination is both fast
//! enough and exactly reproducible. Pivoting is deterministic: the first
//! row with a nonzero entry wins, columns are processed left to right, and
//! kernel basis vectors are emitted in ascending free-column order. Nothing
//! here is randomized, so every rank and kernel — and every certificate
//! built on them — is bit-for-bit stable.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An element of `F_p` that remembers its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpScalar {
    value: u64,
    modulus: u64,
}

impl FpScalar {
    /// Reduces `value` into `[0, modulus)`.
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        FpScalar { value: value % modulus, modulus }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Inverse of `x` in `F_p` for prime `p`.
fn inv_mod(x: u64, p: u64) -> u64 {
    debug_assert!(!x.is_multiple_of(p));
    pow_mod(x, p - 2, p)
}

/// A dense matrix over `F_p`; entries are stored reduced.
///
/// Deserialization re-validates the dimensions and entry range, so a
/// hand-edited serialized matrix can be rejected instead of panicking
/// later on an out-of-bounds index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFpMatrix")]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    entries: Vec<u64>,
}

#[derive(Deserialize)]
struct RawFpMatrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    entries: Vec<u64>,
}

impl TryFrom<RawFpMatrix> for FpMatrix {
    type Error = String;

    fn try_from(raw: RawFpMatrix) -> std::result::Result<Self, String> {
        if raw.modulus < 2 {
            return Err(format!("matrix modulus {} is out of range", raw.modulus));
        }
        let expected = raw
            .rows
            .checked_mul(raw.cols)
            .ok_or_else(|| "matrix dimensions overflow".to_string())?;
        if raw.entries.len() != expected {
            return Err(format!(
                "matrix claims {}x{} but carries {} entries",
                raw.rows,
                raw.cols,
                raw.entries.len()
            ));
        }
        if let Some(bad) = raw.entries.iter().find(|&&e| e >= raw.modulus) {
            return Err(format!("matrix entry {bad} is not reduced modulo {}", raw.modulus));
        }
        Ok(FpMatrix { rows: raw.rows, cols: raw.cols, modulus: raw.modulus, entries: raw.entries })
    }
}

impl FpMatrix {
    /// The zero matrix of the given dimensions.
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        FpMatrix { rows, cols, modulus, entries: vec![0; rows * cols] }
    }

    /// Builds a matrix from row slices; every row must have length `cols`.
    /// The explicit column count matters for row-free matrices, whose kernel
    /// is still the whole space.
    pub fn from_rows(modulus: u64, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidInput(format!("modulus {modulus} is not a prime")));
        }
        let mut m = FpMatrix::zeros(rows.len(), cols, modulus);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.entries[r * self.cols + c] = v % self.modulus;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Matrix–vector product, for checking `M·v = 0` style invariants.
    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let p = self.modulus;
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(0u64, |acc, (&a, &b)| (acc + a * (b % p)) % p))
            .collect()
    }

    /// Reduced row echelon form together with the pivot column indices.
    fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let p = self.modulus;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            for j in 0..m.cols {
                let (a, b) = (m.get(r, j), m.get(pr, j));
                m.set(r, j, b);
                m.set(pr, j, a);
            }
            let inv = inv_mod(m.get(r, c), p);
            for j in 0..m.cols {
                m.set(r, j, m.get(r, j) * inv % p);
            }
            for i in 0..m.rows {
                if i != r && m.get(i, c) != 0 {
                    let f = m.get(i, c);
                    for j in 0..m.cols {
                        let v = (m.get(i, j) + (p - f) * m.get(r, j)) % p;
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    /// Rank over `F_p`; 0 for empty matrices.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{v : M·v = 0}`, one vector per free
    /// column, in ascending free-column order.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let p = self.modulus;
        let (m, pivots) = self.rref();
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[f] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = (p - m.get(i, f)) % p;
            }
            basis.push(v);
        }
        basis
    }

    /// Treating each row as the coordinates of one target dimension, the map
    /// is onto the full space iff the rank equals the row count.
    pub fn is_surjective_onto_full_space(&self) -> bool {
        self.rank() == self.rows
    }
}

/// Whether `v` lies in the `F_p`-span of `vectors`. The zero vector lies in
/// every span, including the empty one.
pub fn in_span(vectors: &[Vec<u64>], v: &[u64], modulus: u64) -> bool {
    let with: Vec<Vec<u64>> = vectors.iter().cloned().chain(std::iter::once(v.to_vec())).collect();
    let base = FpMatrix::from_rows(modulus, v.len(), vectors).expect("uniform rows");
    let ext = FpMatrix::from_rows(modulus, v.len(), &with).expect("uniform rows");
    base.rank() == ext.rank()
}
