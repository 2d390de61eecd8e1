//! `[[n,k]]` stabilizer codes over Z_p and the coset structure used for decoding.
//!
//! The code space is the joint eigenspace with the reference eigenvalue of every
//! generator (see [`crate::densesim::reference_eigenvalue`]); syndromes are the
//! exponents of the extra `ω` factors relative to it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{
    coset_representatives, is_isotropic, row_reduce_in, symplectic_dual, SympSubspace, SympVector,
};
use crate::zp;

/// Difference `b - a` of Bob's and Alice's measurement outcomes, one residue per generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syndrome {
    p: u32,
    entries: Vec<u32>,
}

impl Syndrome {
    pub fn new(p: u32, entries: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e >= p) {
            return Err(Error::InvalidInput(format!("syndrome entry {bad} is not a residue mod {p}")));
        }
        Ok(Self { p, entries })
    }

    pub fn zero(p: u32, len: usize) -> Self {
        Self { p, entries: vec![0; len] }
    }

    pub fn from_index(p: u32, len: usize, mut index: usize) -> Self {
        let mut entries = vec![0u32; len];
        for e in entries.iter_mut().rev() {
            *e = (index % p as usize) as u32;
            index /= p as usize;
        }
        Self { p, entries }
    }

    pub fn index(&self) -> usize {
        self.entries.iter().fold(0usize, |acc, &e| acc * self.p as usize + e as usize)
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }
}

/// Coset of C in C^⊥, as coefficients `(c_1, d_1, ..., c_k, d_k)` with
/// `u ≡ Σ c_j x̄_j + d_j z̄_j (mod C)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogicalClass {
    p: u32,
    label: Vec<u32>,
}

impl LogicalClass {
    pub fn label(&self) -> &[u32] {
        &self.label
    }

    pub fn k(&self) -> usize {
        self.label.len() / 2
    }

    pub fn index(&self) -> usize {
        self.label.iter().fold(0usize, |acc, &e| acc * self.p as usize + e as usize)
    }

    pub fn is_identity(&self) -> bool {
        self.label.iter().all(|&e| e == 0)
    }

    /// The Bell label `(c_1, -d_1, ...)` of the output pairs left by a residual error
    /// in this class: logical `z̄_j` acts as `Z^{-1}` on the canonical encoded basis.
    pub fn output_bell_label(&self) -> SympVector {
        let mut coords = self.label.clone();
        for q in coords.chunks_exact_mut(2) {
            q[1] = zp::neg(q[1], self.p);
        }
        SympVector::from_raw(self.p, coords)
    }
}

#[derive(Clone, Debug)]
pub struct StabilizerCode {
    p: u32,
    n: usize,
    k: usize,
    generators: Vec<SympVector>,
    stabilizer: SympSubspace,
    normalizer: SympSubspace,
    logicals: Vec<SympVector>,
    /// Rows of the map `u -> (syndrome(u), output Bell label of u)`; its kernel is C.
    coset_rows: Vec<Vec<u32>>,
    /// Preimages of the unit vectors of Z_p^{n+k} under `coset_rows`.
    preimages: Vec<SympVector>,
}

impl StabilizerCode {
    /// Builds a code from independent, pairwise commuting generators and derives a
    /// deterministic symplectic logical basis.
    pub fn new(p: u32, generators: Vec<SympVector>) -> Result<Self> {
        zp::check_prime(p)?;
        let Some(first) = generators.first() else {
            return Err(Error::InvalidInput("a stabilizer needs at least one generator".into()));
        };
        let n = first.n();
        if n == 0 {
            return Err(Error::InvalidInput("generators must act on at least one qudit".into()));
        }
        for g in &generators {
            if g.p() != p || g.n() != n {
                return Err(Error::Dimension(format!("generator {g} does not live in Z_{p}^{}", 2 * n)));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if generators[i].symp_unchecked(&generators[j]) != 0 {
                    return Err(Error::NotStabilizer(i + 1, j + 1));
                }
            }
        }
        let stabilizer = row_reduce_in(p, n, &generators)?;
        if stabilizer.dim() < generators.len() {
            return Err(Error::Rank { rank: stabilizer.dim(), count: generators.len() });
        }
        debug_assert!(is_isotropic(&stabilizer));
        let normalizer = symplectic_dual(&stabilizer);
        let k = n - generators.len();
        let logicals = greedy_logical_basis(&stabilizer, &normalizer, k)?;
        Self::assemble(p, n, k, generators, stabilizer, normalizer, logicals)
    }

    /// Replaces the logical basis; `logicals` is `(x̄_1, z̄_1, ..., x̄_k, z̄_k)` and must
    /// lie in C^⊥ with `<x̄_i, z̄_j> = δ_ij` and all other products zero.
    pub fn with_logical_basis(self, logicals: Vec<SympVector>) -> Result<Self> {
        if logicals.len() != 2 * self.k {
            return Err(Error::InvalidInput(format!(
                "expected {} logical vectors, got {}",
                2 * self.k,
                logicals.len()
            )));
        }
        for l in &logicals {
            if !self.normalizer.contains(l) {
                return Err(Error::InvalidInput(format!("logical vector {l} is not in C^⊥")));
            }
        }
        for i in 0..self.k {
            for j in 0..self.k {
                let xz = logicals[2 * i].symp_unchecked(&logicals[2 * j + 1]);
                let xx = logicals[2 * i].symp_unchecked(&logicals[2 * j]);
                let zz = logicals[2 * i + 1].symp_unchecked(&logicals[2 * j + 1]);
                if xz != u32::from(i == j) || xx != 0 || zz != 0 {
                    return Err(Error::InvalidInput("logical vectors do not form a symplectic basis".into()));
                }
            }
        }
        Self::assemble(self.p, self.n, self.k, self.generators, self.stabilizer, self.normalizer, logicals)
    }

    fn assemble(
        p: u32,
        n: usize,
        k: usize,
        generators: Vec<SympVector>,
        stabilizer: SympSubspace,
        normalizer: SympSubspace,
        logicals: Vec<SympVector>,
    ) -> Result<Self> {
        let mut coset_rows: Vec<Vec<u32>> = generators.iter().map(SympVector::functional).collect();
        for pair in logicals.chunks_exact(2) {
            let neg = |v: Vec<u32>| v.into_iter().map(|c| zp::neg(c, p)).collect::<Vec<_>>();
            coset_rows.push(neg(pair[1].functional()));
            coset_rows.push(neg(pair[0].functional()));
        }
        let width = 2 * n;
        let mut preimages = Vec::with_capacity(n + k);
        for j in 0..n + k {
            let mut rhs = vec![0u32; n + k];
            rhs[j] = 1;
            let x = zp::solve(&coset_rows, &rhs, width, p)
                .ok_or_else(|| Error::Contract("syndrome/logical map is not surjective".into()))?;
            preimages.push(SympVector::from_raw(p, x));
        }
        Ok(Self { p, n, k, generators, stabilizer, normalizer, logicals, coset_rows, preimages })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of generators, `n - k`.
    pub fn r(&self) -> usize {
        self.n - self.k
    }

    pub fn generators(&self) -> &[SympVector] {
        &self.generators
    }

    /// C, the span of the generators.
    pub fn stabilizer(&self) -> &SympSubspace {
        &self.stabilizer
    }

    /// C^⊥.
    pub fn normalizer(&self) -> &SympSubspace {
        &self.normalizer
    }

    /// `(x̄_1, z̄_1, ..., x̄_k, z̄_k)`.
    pub fn logical_basis(&self) -> &[SympVector] {
        &self.logicals
    }

    pub fn syndrome_count(&self) -> usize {
        zp::checked_size(self.p, self.r()) as usize
    }

    pub fn syndromes(&self) -> impl Iterator<Item = Syndrome> + '_ {
        (0..self.syndrome_count()).map(move |i| Syndrome::from_index(self.p, self.r(), i))
    }

    fn check_vector(&self, u: &SympVector) -> Result<()> {
        if u.p() != self.p || u.n() != self.n {
            return Err(Error::Dimension(format!("vector {u} does not live in Z_{}^{}", self.p, 2 * self.n)));
        }
        Ok(())
    }

    fn check_syndrome(&self, s: &Syndrome) -> Result<()> {
        if s.p != self.p || s.entries.len() != self.r() {
            return Err(Error::Dimension(format!(
                "syndrome of length {} for a code with {} generators",
                s.entries.len(),
                self.r()
            )));
        }
        Ok(())
    }

    pub fn syndrome_of(&self, u: &SympVector) -> Result<Syndrome> {
        self.check_vector(u)?;
        Ok(Syndrome { p: self.p, entries: self.generators.iter().map(|g| g.symp_unchecked(u)).collect() })
    }

    /// `D(s)`: the affine set of errors producing syndrome `s`.
    pub fn error_set(&self, s: &Syndrome) -> Result<ErrorSet> {
        self.check_syndrome(s)?;
        let mut image = vec![0u32; self.n + self.k];
        image[..self.r()].copy_from_slice(&s.entries);
        let any = self.preimage(&image);
        Ok(ErrorSet { representative: self.normalizer.reduce(&any), normalizer: self.normalizer.clone() })
    }

    pub fn logical_class_of(&self, u: &SympVector) -> Result<LogicalClass> {
        self.check_vector(u)?;
        if !self.normalizer.contains(u) {
            return Err(Error::NoLogicalClass);
        }
        let mut label = Vec::with_capacity(2 * self.k);
        for pair in self.logicals.chunks_exact(2) {
            label.push(u.symp_unchecked(&pair[1]));
            label.push(pair[0].symp_unchecked(u));
        }
        Ok(LogicalClass { p: self.p, label })
    }

    /// Coset map rows (syndrome entries then output Bell label entries).
    pub(crate) fn coset_rows(&self) -> &[Vec<u32>] {
        &self.coset_rows
    }

    /// Some vector whose coset-map image is `image`.
    pub(crate) fn preimage(&self, image: &[u32]) -> SympVector {
        let mut acc = SympVector::zero(self.p, self.n);
        for (&c, v) in image.iter().zip(&self.preimages) {
            if c != 0 {
                acc = acc.add_unchecked(&v.scale(c));
            }
        }
        acc
    }

    /// Image of `u` under the coset map, as a mixed-radix bucket index
    /// `syndrome_index * p^{2k} + bell_label_index`.
    pub(crate) fn bucket_of(&self, u: &SympVector) -> usize {
        let p = self.p;
        self.coset_rows.iter().fold(0usize, |acc, row| {
            let v = row.iter().zip(u.coords()).fold(0u32, |s, (&a, &b)| zp::add(s, zp::mul(a, b, p), p));
            acc * p as usize + v as usize
        })
    }

    /// Lexicographically smallest member of the C-coset with the given bucket index.
    pub(crate) fn bucket_representative(&self, bucket: usize) -> SympVector {
        let image = Syndrome::from_index(self.p, self.n + self.k, bucket).entries;
        self.stabilizer.reduce(&self.preimage(&image))
    }

    pub(crate) fn bell_label_count(&self) -> usize {
        zp::checked_size(self.p, 2 * self.k) as usize
    }

    /// Whether two codes have the same generators, in order, and the same logical basis.
    pub fn same_presentation(&self, other: &StabilizerCode) -> bool {
        self.p == other.p && self.generators == other.generators && self.logicals == other.logicals
    }
}

/// Greedy symplectic Gram-Schmidt over the sorted coset representatives of C in C^⊥.
/// The first surviving representative becomes `z̄`, the first partner pairing with it
/// (scaled so `<x̄, z̄> = 1`) becomes `x̄`.
fn greedy_logical_basis(stabilizer: &SympSubspace, normalizer: &SympSubspace, k: usize) -> Result<Vec<SympVector>> {
    let p = stabilizer.p();
    let reps = coset_representatives(normalizer, stabilizer)?;
    let pool: Vec<SympVector> = reps.into_iter().filter(|v| !v.is_zero()).collect();
    let mut pairs: Vec<(SympVector, SympVector)> = Vec::with_capacity(k);
    let project = |v: &SympVector, pairs: &[(SympVector, SympVector)]| {
        let mut c = v.clone();
        for (x, z) in pairs {
            let cx = c.symp_unchecked(x);
            let cz = c.symp_unchecked(z);
            c = c.add_unchecked(&z.scale(cx)).add_unchecked(&x.scale(zp::neg(cz, p)));
        }
        stabilizer.reduce(&c)
    };
    while pairs.len() < k {
        let z = pool
            .iter()
            .map(|v| project(v, &pairs))
            .find(|c| !c.is_zero())
            .ok_or_else(|| Error::Contract("ran out of logical candidates".into()))?;
        let (w, prod) = pool
            .iter()
            .map(|v| project(v, &pairs))
            .find_map(|c| {
                let prod = c.symp_unchecked(&z);
                (prod != 0).then_some((c, prod))
            })
            .ok_or_else(|| Error::Contract("no symplectic partner for logical candidate".into()))?;
        let x = stabilizer.reduce(&w.scale(zp::inv(prod, p)));
        pairs.push((x, z));
    }
    Ok(pairs.into_iter().flat_map(|(x, z)| [x, z]).collect())
}

/// `D(s) = e_0 + C^⊥` for the lexicographically smallest solution `e_0`.
#[derive(Clone, Debug)]
pub struct ErrorSet {
    pub representative: SympVector,
    normalizer: SympSubspace,
}

impl ErrorSet {
    pub fn contains(&self, u: &SympVector) -> bool {
        u.p() == self.representative.p()
            && u.n() == self.representative.n()
            && self.normalizer.contains(&u.sub(&self.representative).expect("same space"))
    }

    /// `|D(s)| = p^{n+k}`.
    pub fn cardinality(&self) -> u128 {
        self.normalizer.cardinality()
    }
}

/// Decode rule as an explicit table: the guessed error `e(s)` for every syndrome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeTable {
    corrections: Vec<SympVector>,
}

impl DecodeTable {
    /// Validates that every entry solves its own syndrome equation.
    pub fn new(code: &StabilizerCode, corrections: Vec<SympVector>) -> Result<Self> {
        if corrections.len() != code.syndrome_count() {
            return Err(Error::InvalidInput(format!(
                "decode table has {} entries, code has {} syndromes",
                corrections.len(),
                code.syndrome_count()
            )));
        }
        for (i, e) in corrections.iter().enumerate() {
            let s = code.syndrome_of(e)?;
            if s.index() != i {
                return Err(Error::InvalidInput(format!(
                    "correction {e} has syndrome {:?}, expected index {i}",
                    s.entries()
                )));
            }
        }
        Ok(Self { corrections })
    }

    /// `e(s) = ` lexicographically smallest member of `D(s)`.
    pub fn minimal(code: &StabilizerCode) -> Self {
        let corrections =
            code.syndromes().map(|s| code.error_set(&s).expect("valid syndrome").representative).collect();
        Self { corrections }
    }

    pub(crate) fn from_trusted(corrections: Vec<SympVector>) -> Self {
        Self { corrections }
    }

    pub fn correction(&self, s: &Syndrome) -> &SympVector {
        &self.corrections[s.index()]
    }

    pub fn corrections(&self) -> &[SympVector] {
        &self.corrections
    }
}

/// Errors `u` with `u ∈ e(syndrome(u)) + C` under a fixed decode table.
#[derive(Clone, Debug)]
pub struct CorrectableSet<'a> {
    code: &'a StabilizerCode,
    table: &'a DecodeTable,
}

pub fn correctable_set<'a>(code: &'a StabilizerCode, table: &'a DecodeTable) -> CorrectableSet<'a> {
    CorrectableSet { code, table }
}

impl CorrectableSet<'_> {
    pub fn contains(&self, u: &SympVector) -> Result<bool> {
        let s = self.code.syndrome_of(u)?;
        let residual = u.sub(self.table.correction(&s))?;
        Ok(self.code.stabilizer().contains(&residual))
    }

    pub fn members(&self) -> Result<Vec<SympVector>> {
        let size = zp::ensure_capacity("correctable set", self.code.p, 2 * self.code.n, zp::ENUMERATION_LIMIT)?;
        let mut out = Vec::new();
        for i in 0..size {
            let u = SympVector::from_index(self.code.p, self.code.n, i);
            if self.contains(&u)? {
                out.push(u);
            }
        }
        Ok(out)
    }
}
