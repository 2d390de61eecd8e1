//! Vectors and subspaces of Z_p^{2n} with the symplectic form
//! `<u, v> = sum_i (b_i c_i - a_i d_i)` for `u = (a_1, b_1, ...)`, `v = (c_1, d_1, ...)`.
//!
//! Coordinates are interleaved per qudit: `(a_1, b_1, a_2, b_2, ...)`, where `a` is the
//! X exponent and `b` the Z exponent. Vectors are ordered lexicographically in this
//! layout, and [`SympVector::index`] is the matching mixed-radix index (first
//! coordinate most significant), so "lexicographically smallest" and "smallest index"
//! coincide everywhere in the crate.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zp;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SympVector {
    p: u32,
    coords: Vec<u32>,
}

impl SympVector {
    pub fn new(p: u32, coords: Vec<u32>) -> Result<Self> {
        zp::check_prime(p)?;
        if !coords.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "symplectic vectors need an even number of coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(&bad) = coords.iter().find(|&&c| c >= p) {
            return Err(Error::InvalidInput(format!("coordinate {bad} is not a residue mod {p}")));
        }
        Ok(Self { p, coords })
    }

    /// Builds a vector reducing every coordinate mod p. `p` is assumed prime.
    pub(crate) fn from_raw(p: u32, coords: Vec<u32>) -> Self {
        debug_assert!(coords.len().is_multiple_of(2));
        Self { p, coords: coords.into_iter().map(|c| c % p).collect() }
    }

    pub fn zero(p: u32, n: usize) -> Self {
        Self { p, coords: vec![0; 2 * n] }
    }

    /// Inverse of [`SympVector::index`].
    pub fn from_index(p: u32, n: usize, mut index: usize) -> Self {
        let mut coords = vec![0u32; 2 * n];
        for c in coords.iter_mut().rev() {
            *c = (index % p as usize) as u32;
            index /= p as usize;
        }
        Self { p, coords }
    }

    /// `X^a Z^b` on a single qudit.
    pub fn single(p: u32, a: u32, b: u32) -> Self {
        Self::from_raw(p, vec![a, b])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Number of qudits (half the coordinate count).
    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn index(&self) -> usize {
        self.coords.iter().fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    /// `(a_i, b_i)` for qudit `i`.
    pub fn qudit(&self, i: usize) -> (u32, u32) {
        (self.coords[2 * i], self.coords[2 * i + 1])
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.coords.len() != other.coords.len() {
            return Err(Error::Dimension(format!(
                "vectors over Z_{}^{} and Z_{}^{}",
                self.p,
                self.coords.len(),
                other.p,
                other.coords.len()
            )));
        }
        Ok(())
    }

    pub fn symp_product(&self, other: &Self) -> Result<u32> {
        self.check_compatible(other)?;
        Ok(self.symp_unchecked(other))
    }

    pub(crate) fn symp_unchecked(&self, other: &Self) -> u32 {
        let p = self.p;
        let mut acc = 0u32;
        for (u, v) in self.coords.chunks_exact(2).zip(other.coords.chunks_exact(2)) {
            acc = zp::add(acc, zp::mul(u[1], v[0], p), p);
            acc = zp::sub(acc, zp::mul(u[0], v[1], p), p);
        }
        acc
    }

    /// Coefficient row `f` with `<self, u> = f · u`.
    pub(crate) fn functional(&self) -> Vec<u32> {
        let p = self.p;
        let mut f = Vec::with_capacity(self.coords.len());
        for q in self.coords.chunks_exact(2) {
            f.push(q[1]);
            f.push(zp::neg(q[0], p));
        }
        f
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let p = self.p;
        Self { p, coords: self.coords.iter().zip(&other.coords).map(|(&a, &b)| zp::add(a, b, p)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn neg(&self) -> Self {
        self.scale(self.p - 1)
    }

    pub fn scale(&self, s: u32) -> Self {
        let p = self.p;
        Self { p, coords: self.coords.iter().map(|&a| zp::mul(a, s, p)).collect() }
    }

    /// Concatenation `(u, v)` over `n_u + n_v` qudits.
    pub fn concat(&self, other: &Self) -> Self {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Self { p: self.p, coords }
    }

    /// `(a_1, -b_1, ..., a_n, -b_n)`: the vector whose operator is the entrywise
    /// complex conjugate of this one's.
    pub fn star(&self) -> Self {
        let p = self.p;
        let mut coords = self.coords.clone();
        for q in coords.chunks_exact_mut(2) {
            q[1] = zp::neg(q[1], p);
        }
        Self { p, coords }
    }

    /// Pauli-style rendering, one factor per qudit (`I`, `X`, `Z`, `Y` = XZ, `X^2Z` ...).
    pub fn pauli_string(&self) -> String {
        let mut out = String::new();
        for q in self.coords.chunks_exact(2) {
            out.push_str(&factor_name(q[0], q[1]));
            if self.p > 2 {
                out.push(' ');
            }
        }
        out.trim_end().to_string()
    }
}

fn factor_name(a: u32, b: u32) -> String {
    let pow = |sym: &str, e: u32| match e {
        0 => String::new(),
        1 => sym.to_string(),
        e => format!("{sym}^{e}"),
    };
    match (a, b) {
        (0, 0) => "I".into(),
        (1, 1) => "Y".into(),
        _ => format!("{}{}", pow("X", a), pow("Z", b)),
    }
}

impl fmt::Display for SympVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A linear subspace of Z_p^{2n} held as its reduced row echelon basis, so two
/// subspaces are equal exactly when their bases are.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SympSubspace {
    p: u32,
    n: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl SympSubspace {
    pub fn zero(p: u32, n: usize) -> Self {
        Self { p, n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(p: u32, n: usize) -> Self {
        let basis = (0..2 * n)
            .map(|i| {
                let mut v = vec![0; 2 * n];
                v[i] = 1;
                v
            })
            .collect();
        Self { p, n, basis, pivots: (0..2 * n).collect() }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of elements, `p^dim`.
    pub fn cardinality(&self) -> u128 {
        zp::checked_size(self.p, self.dim())
    }

    pub fn basis(&self) -> Vec<SympVector> {
        self.basis.iter().map(|r| SympVector { p: self.p, coords: r.clone() }).collect()
    }

    /// Lexicographically smallest member of the coset `v + self`.
    pub fn reduce(&self, v: &SympVector) -> SympVector {
        let p = self.p;
        let mut coords = v.coords.clone();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let f = coords[pc];
            if f != 0 {
                for (x, &y) in coords.iter_mut().zip(row) {
                    *x = zp::sub(*x, zp::mul(f, y, p), p);
                }
            }
        }
        SympVector { p, coords }
    }

    pub fn contains(&self, v: &SympVector) -> bool {
        v.p == self.p && v.n() == self.n && self.reduce(v).is_zero()
    }

    pub fn is_subspace_of(&self, other: &SympSubspace) -> bool {
        self.p == other.p && self.n == other.n && self.basis().iter().all(|b| other.contains(b))
    }

    /// All elements, in no particular order. Fails past the enumeration limit.
    pub fn elements(&self) -> Result<Vec<SympVector>> {
        let count = zp::ensure_capacity("subspace enumeration", self.p, self.dim(), zp::ENUMERATION_LIMIT)?;
        let p = self.p;
        let width = 2 * self.n;
        let mut out = Vec::with_capacity(count);
        let mut current = vec![0u32; width];
        let mut digits = vec![0u32; self.dim()];
        out.push(SympVector { p, coords: current.clone() });
        // odometer over coefficient tuples: each digit step adds its basis row
        for _ in 1..count {
            let mut j = self.dim() - 1;
            loop {
                digits[j] = (digits[j] + 1) % p;
                for (x, &y) in current.iter_mut().zip(&self.basis[j]) {
                    *x = zp::add(*x, y, p);
                }
                if digits[j] != 0 {
                    break;
                }
                j -= 1;
            }
            out.push(SympVector { p, coords: current.clone() });
        }
        Ok(out)
    }

    /// Joins `self` with extra vectors.
    pub fn extend(&self, extra: &[SympVector]) -> Result<SympSubspace> {
        let mut all = self.basis();
        all.extend_from_slice(extra);
        row_reduce_in(self.p, self.n, &all)
    }
}

/// Canonical basis of the span of `vectors`.
pub fn row_reduce(vectors: &[SympVector]) -> Result<SympSubspace> {
    let Some(first) = vectors.first() else {
        return Err(Error::Dimension(
            "cannot infer the ambient space of an empty vector list; use row_reduce_in".into(),
        ));
    };
    row_reduce_in(first.p, first.n(), vectors)
}

/// Canonical basis of the span of `vectors` inside Z_p^{2n}; the empty list gives `{0}`.
pub fn row_reduce_in(p: u32, n: usize, vectors: &[SympVector]) -> Result<SympSubspace> {
    zp::check_prime(p)?;
    let mut rows = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.p != p || v.n() != n {
            return Err(Error::Dimension(format!("vector {v} over Z_{} does not live in Z_{p}^{}", v.p, 2 * n)));
        }
        rows.push(v.coords.clone());
    }
    let pivots = zp::rref(&mut rows, p);
    Ok(SympSubspace { p, n, basis: rows, pivots })
}

pub fn symplectic_dual(c: &SympSubspace) -> SympSubspace {
    let rows: Vec<Vec<u32>> = c.basis().iter().map(SympVector::functional).collect();
    let ns = zp::null_space(&rows, 2 * c.n, c.p);
    let mut basis = ns;
    let pivots = zp::rref(&mut basis, c.p);
    SympSubspace { p: c.p, n: c.n, basis, pivots }
}

pub fn is_isotropic(c: &SympSubspace) -> bool {
    let b = c.basis();
    b.iter().enumerate().all(|(i, u)| b[i + 1..].iter().all(|v| u.symp_unchecked(v) == 0))
}

/// Vectors adjoined by the greedy extension of an isotropic `c` to a self-dual
/// subspace: at each step the smallest vector of `W^⊥ \ W`.
pub fn witt_extension_vectors(c: &SympSubspace) -> Result<Vec<SympVector>> {
    if !is_isotropic(c) {
        return Err(Error::Contract("Witt extension needs an isotropic subspace".into()));
    }
    let size = zp::ensure_capacity("Witt extension search", c.p, 2 * c.n, zp::ENUMERATION_LIMIT)?;
    let mut w = c.clone();
    let mut added = Vec::new();
    while w.dim() < c.n {
        let wd = symplectic_dual(&w);
        let next = (1..size)
            .map(|i| SympVector::from_index(c.p, c.n, i))
            .find(|v| wd.contains(v) && !w.contains(v))
            .ok_or_else(|| Error::Contract("isotropic subspace admits no extension".into()))?;
        w = w.extend(std::slice::from_ref(&next))?;
        added.push(next);
    }
    Ok(added)
}

pub fn witt_extend(c: &SympSubspace) -> Result<SympSubspace> {
    let added = witt_extension_vectors(c)?;
    c.extend(&added)
}

/// Lexicographically smallest member of each coset of `b` in `a`, sorted ascending
/// (so the zero vector comes first).
pub fn coset_representatives(a: &SympSubspace, b: &SympSubspace) -> Result<Vec<SympVector>> {
    if !b.is_subspace_of(a) {
        return Err(Error::Contract("coset representatives need B ⊆ A".into()));
    }
    let reps: BTreeSet<SympVector> = a.elements()?.iter().map(|v| b.reduce(v)).collect();
    Ok(reps.into_iter().collect())
}
