//! Dense complex state vectors: an independent oracle for the coset arithmetic.
//!
//! Basis states `|j_1 … j_m⟩` are indexed with the first qudit most significant.
//! `XZ(u)|j⟩ = ω^{Σ b_i j_i} |j + a⟩` with `ω = exp(2πi/p)`. A two-party vector on
//! `2n` qudits lists Alice's `n` qudits first, so it is also a `p^n × p^n` matrix
//! `M[j_A][j_B]`, and `(A ⊗ B)ψ` corresponds to `A M Bᵀ`.
//!
//! Everything here is capped at [`DENSE_LIMIT`] amplitudes.

mod channel;
mod checks;
mod encoder;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::symplectic::SympVector;
use crate::{zp, Real};

pub use channel::{run_protocol_dense, DenseRun, DenseSyndromeRecord, Ensemble};
pub use checks::{
    invariance_residual, lemma1_residuals, lemma2_check, lemma2_construct, table1_overlaps, table1_vectors,
    EncodingRow, Lemma2Check, Lemma2State, TABLE1,
};
pub use encoder::Encoder;

pub const DENSE_LIMIT: u128 = 1 << 18;

pub(crate) fn dense_capacity(p: u32, qudits: usize) -> Result<usize> {
    zp::ensure_capacity("dense simulation", p, qudits, DENSE_LIMIT)
}

pub(crate) fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `ω^t` for `t = 0..p`.
pub(crate) fn roots<T: Real>(p: u32) -> Vec<Complex<T>> {
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    (0..p).map(|t| Complex::from_polar(T::one(), two_pi * T::lit(t as f64) / T::lit(p as f64))).collect()
}

fn digits_of(mut index: usize, p: u32, len: usize) -> Vec<u32> {
    let mut d = vec![0u32; len];
    for x in d.iter_mut().rev() {
        *x = (index % p as usize) as u32;
        index /= p as usize;
    }
    d
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState<T> {
    p: u32,
    qudits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> DenseState<T> {
    pub fn new(p: u32, qudits: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        let dim = dense_capacity(p, qudits)?;
        if amps.len() != dim {
            return Err(Error::Dimension(format!("{} amplitudes for {qudits} qudits", amps.len())));
        }
        Ok(Self { p, qudits, amps })
    }

    pub fn basis(p: u32, qudits: usize, index: usize) -> Result<Self> {
        let dim = dense_capacity(p, qudits)?;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = c(T::one());
        Ok(Self { p, qudits, amps })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn qudits(&self) -> usize {
        self.qudits
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps.iter().zip(&other.amps).fold(c(T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scaled(c(T::one() / n))
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        Self { p: self.p, qudits: self.qudits, amps: self.amps.iter().map(|a| a * s).collect() }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self { p: self.p, qudits: self.qudits, amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect() }
    }

    pub fn distance(&self, other: &Self) -> T {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<T>().sqrt()
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![c(T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c(T::one());
        }
        m
    }

    pub fn from_columns(columns: &[DenseState<T>]) -> Result<Self> {
        let dim = columns.len();
        if columns.iter().any(|v| v.amps.len() != dim) {
            return Err(Error::Dimension("columns do not form a square matrix".into()));
        }
        let mut m = Self::zeros(dim);
        for (j, v) in columns.iter().enumerate() {
            for (i, a) in v.amps.iter().enumerate() {
                m.data[i * dim + j] = *a;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, col: usize) -> Complex<T> {
        self.data[r * self.dim + col]
    }

    pub fn set(&mut self, r: usize, col: usize, v: Complex<T>) {
        self.data[r * self.dim + col] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == c(T::zero()) {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] = out.data[i * d + j] + a * other.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn conj(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a.conj()).collect() }
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn apply(&self, v: &DenseState<T>) -> DenseState<T> {
        let d = self.dim;
        let amps = (0..d).map(|i| (0..d).fold(c(T::zero()), |acc, j| acc + self.data[i * d + j] * v.amps[j])).collect();
        DenseState { p: v.p, qudits: v.qudits, amps }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(c(T::zero()), |acc, i| acc + self.data[i * self.dim + i])
    }

    /// `⟨v|self|v⟩`.
    pub fn expectation(&self, v: &DenseState<T>) -> Complex<T> {
        v.inner(&self.apply(v))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.adjoint().mul(self).max_diff(&Self::identity(self.dim)) <= tol
    }

    pub fn is_idempotent(&self, tol: T) -> bool {
        self.mul(self).max_diff(self) <= tol
    }

    pub fn is_monomial(&self) -> bool {
        let d = self.dim;
        (0..d).all(|j| (0..d).filter(|&i| self.data[i * d + j] != c(T::zero())).count() == 1)
            && (0..d).all(|i| (0..d).filter(|&j| self.data[i * d + j] != c(T::zero())).count() == 1)
    }
}

/// `M|j⟩ = phase[j] |perm[j]⟩`.
#[derive(Clone, Debug)]
pub(crate) struct Monomial<T> {
    perm: Vec<usize>,
    phase: Vec<Complex<T>>,
}

impl<T: Real> Monomial<T> {
    pub(crate) fn xz(u: &SympVector) -> Result<Self> {
        let (p, n) = (u.p(), u.n());
        let dim = dense_capacity(p, 2 * n).map(|_| zp::checked_size(p, n) as usize)?;
        let w = roots::<T>(p);
        let mut perm = Vec::with_capacity(dim);
        let mut phase = Vec::with_capacity(dim);
        for j in 0..dim {
            let d = digits_of(j, p, n);
            let mut target = 0usize;
            let mut exp = 0u32;
            for (i, &x) in d.iter().enumerate() {
                let (a, b) = u.qudit(i);
                target = target * p as usize + zp::add(x, a, p) as usize;
                exp = zp::add(exp, zp::mul(b, x, p), p);
            }
            perm.push(target);
            phase.push(w[exp as usize]);
        }
        Ok(Self { perm, phase })
    }

    pub(crate) fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![c(T::zero()); v.len()];
        for (j, a) in v.iter().enumerate() {
            out[self.perm[j]] = self.phase[j] * a;
        }
        out
    }

    pub(crate) fn inverse(&self) -> Self {
        let mut perm = vec![0; self.perm.len()];
        let mut phase = vec![c(T::zero()); self.perm.len()];
        for (j, &t) in self.perm.iter().enumerate() {
            perm[t] = j;
            phase[t] = self.phase[j].conj();
        }
        Self { perm, phase }
    }

    pub(crate) fn to_dense(&self) -> DenseOperator<T> {
        let d = self.perm.len();
        let mut m = DenseOperator::zeros(d);
        for j in 0..d {
            m.set(self.perm[j], j, self.phase[j]);
        }
        m
    }
}

/// `XZ(u)` on `n` qudits.
pub fn xz_operator<T: Real>(u: &SympVector) -> Result<DenseOperator<T>> {
    Ok(Monomial::xz(u)?.to_dense())
}

/// Eigenvalue of `XZ(g)` on the code space: 1, except `i` for binary `g` with an odd
/// number of `XZ` factors (then `XZ(g)² = -I`).
pub fn reference_eigenvalue<T: Real>(g: &SympVector) -> Complex<T> {
    let ys = (0..g.n()).filter(|&i| g.qudit(i) == (1, 1)).count();
    if g.p() == 2 && ys % 2 == 1 {
        Complex::new(T::zero(), T::one())
    } else {
        c(T::one())
    }
}

/// Product of commuting eigenprojectors `(1/p) Σ_t μ^{-t} XZ(g)^t`, applied lazily.
#[derive(Clone, Debug)]
pub(crate) struct Projector<T> {
    p: u32,
    parts: Vec<(Monomial<T>, Complex<T>)>,
}

impl<T: Real> Projector<T> {
    /// Projector onto `XZ(g_i) = λ(g_i) ω^{x_i}` for all `i`.
    pub(crate) fn eigenspace(gens: &[SympVector], x: &[u32]) -> Result<Self> {
        let p = gens[0].p();
        let w = roots::<T>(p);
        let parts = gens
            .iter()
            .zip(x)
            .map(|(g, &xi)| Ok((Monomial::xz(g)?, reference_eigenvalue::<T>(g) * w[xi as usize])))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { p, parts })
    }

    /// Projector onto `XZ(g_i*) = conj(λ(g_i)) ω^{-x_i}`.
    pub(crate) fn star_eigenspace(gens: &[SympVector], x: &[u32]) -> Result<Self> {
        let p = gens[0].p();
        let w = roots::<T>(p);
        let parts = gens
            .iter()
            .zip(x)
            .map(|(g, &xi)| {
                let mu = reference_eigenvalue::<T>(g).conj() * w[zp::neg(xi, p) as usize];
                Ok((Monomial::xz(&g.star())?, mu))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { p, parts })
    }

    pub(crate) fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let inv_p = c(T::one() / T::lit(self.p as f64));
        let mut cur = v.to_vec();
        for (m, mu) in &self.parts {
            let mu_inv = mu.inv();
            let mut acc = cur.clone();
            let mut power = cur.clone();
            let mut coeff = c(T::one());
            for _ in 1..self.p {
                power = m.apply(&power);
                coeff = coeff * mu_inv;
                for (a, b) in acc.iter_mut().zip(&power) {
                    *a = *a + coeff * b;
                }
            }
            cur = acc.into_iter().map(|a| a * inv_p).collect();
        }
        cur
    }

    pub(crate) fn to_dense(&self, dim: usize) -> DenseOperator<T> {
        let mut m = DenseOperator::zeros(dim);
        let mut e = vec![c(T::zero()); dim];
        for j in 0..dim {
            e[j] = c(T::one());
            for (i, a) in self.apply(&e).into_iter().enumerate() {
                m.set(i, j, a);
            }
            e[j] = c(T::zero());
        }
        m
    }
}

/// `P(x)` (or `P*(x)` with `star`) for every syndrome index `x`.
pub fn stabilizer_projectors<T: Real>(
    code: &crate::stabilizer::StabilizerCode,
    star: bool,
) -> Result<Vec<DenseOperator<T>>> {
    dense_capacity(code.p(), 2 * code.n())?;
    let dim = zp::checked_size(code.p(), code.n()) as usize;
    code.syndromes()
        .map(|x| {
            let proj = if star {
                Projector::star_eigenspace(code.generators(), x.entries())?
            } else {
                Projector::eigenspace(code.generators(), x.entries())?
            };
            Ok(proj.to_dense(dim))
        })
        .collect()
}

/// `|β(u)⟩ = (I ⊗ XZ(u)) p^{-n/2} Σ_j |j⟩|j⟩` on `2n` qudits.
pub fn bell_vector<T: Real>(u: &SympVector) -> Result<DenseState<T>> {
    let (p, n) = (u.p(), u.n());
    dense_capacity(p, 2 * n)?;
    let m = Monomial::<T>::xz(u)?;
    let d = m.perm.len();
    let scale = T::one() / T::lit(d as f64).sqrt();
    let mut amps = vec![c(T::zero()); d * d];
    for j in 0..d {
        amps[j * d + m.perm[j]] = m.phase[j] * scale;
    }
    DenseState::new(p, 2 * n, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    const TOL: f64 = 1e-12;

    fn v(p: u32, coords: &[u32]) -> SympVector {
        SympVector::new(p, coords.to_vec()).unwrap()
    }

    #[test]
    fn bell_pair() {
        let b = bell_vector::<f64>(&SympVector::zero(2, 1)).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let expect = [h, 0.0, 0.0, h];
        for (a, e) in b.amps().iter().zip(expect) {
            assert!((a - c(e)).norm() < TOL);
        }
    }

    #[test]
    fn bell_vectors_are_orthonormal() {
        for (p, n) in [(2, 2), (3, 1)] {
            let size = zp::checked_size(p, 2 * n) as usize;
            let vs: Vec<_> = (0..size).map(|i| bell_vector::<f64>(&SympVector::from_index(p, n, i)).unwrap()).collect();
            for (i, a) in vs.iter().enumerate() {
                for (j, b) in vs.iter().enumerate() {
                    let g = a.inner(b);
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g - c(e)).norm() < TOL, "p={p} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn xz_matrices() {
        assert_eq!(xz_operator::<f64>(&SympVector::zero(3, 2)).unwrap(), DenseOperator::identity(9));
        let x = xz_operator::<f64>(&v(2, &[1, 0])).unwrap();
        let z = xz_operator::<f64>(&v(2, &[0, 1])).unwrap();
        let xz = xz_operator::<f64>(&v(2, &[1, 1])).unwrap();
        assert!(xz.max_diff(&x.mul(&z)) < TOL);
        assert!(xz.max_diff(&z.mul(&x)) > 1.0);
        // Z|1⟩ = ω|1⟩ for p = 3
        let z3 = xz_operator::<f64>(&v(3, &[0, 1])).unwrap();
        let w = roots::<f64>(3);
        assert!((z3.get(1, 1) - w[1]).norm() < TOL);
        for i in 0..81 {
            let u = SympVector::from_index(3, 2, i);
            let m = xz_operator::<f64>(&u).unwrap();
            assert!(m.is_unitary(TOL) && m.is_monomial());
            let star = xz_operator::<f64>(&u.star()).unwrap();
            assert!(star.max_diff(&m.conj()) < TOL);
        }
    }

    #[test]
    fn xz_commutation_phase() {
        let w = roots::<f64>(3);
        for i in (0..81).step_by(7) {
            for j in (0..81).step_by(5) {
                let u = SympVector::from_index(3, 2, i);
                let v = SympVector::from_index(3, 2, j);
                let (a, b) = (xz_operator::<f64>(&u).unwrap(), xz_operator::<f64>(&v).unwrap());
                let lhs = a.mul(&b);
                let rhs = b.mul(&a).scale(w[u.symp_product(&v).unwrap() as usize]);
                assert!(lhs.max_diff(&rhs) < TOL);
            }
        }
    }

    #[test]
    fn projectors_partition_identity() {
        for code in [presets::recurrence(), presets::qpa(), presets::xxxx_zzzz()] {
            for star in [false, true] {
                let ps = stabilizer_projectors::<f64>(&code, star).unwrap();
                let dim = ps[0].dim();
                let sum = ps.iter().skip(1).fold(ps[0].clone(), |a, b| a.add(b));
                assert!(sum.max_diff(&DenseOperator::identity(dim)) < TOL);
                for (i, a) in ps.iter().enumerate() {
                    assert!(a.is_idempotent(TOL));
                    assert!(a.max_diff(&a.adjoint()) < TOL);
                    for b in &ps[i + 1..] {
                        assert!(a.mul(b).max_diff(&DenseOperator::zeros(dim)) < TOL);
                    }
                }
            }
            let plain = stabilizer_projectors::<f64>(&code, false).unwrap();
            let star = stabilizer_projectors::<f64>(&code, true).unwrap();
            for (a, b) in plain.iter().zip(&star) {
                assert!(a.conj().max_diff(b) < TOL);
            }
        }
    }

    #[test]
    fn zz_code_space() {
        let ps = stabilizer_projectors::<f64>(&presets::recurrence(), false).unwrap();
        let mut expect = DenseOperator::zeros(4);
        expect.set(0, 0, c(1.0));
        expect.set(3, 3, c(1.0));
        assert!(ps[0].max_diff(&expect) < TOL);
    }

    #[test]
    fn odd_y_eigenvalue() {
        let g = v(2, &[1, 1, 1, 1]);
        assert_eq!(reference_eigenvalue::<f64>(&g), c(1.0));
        let g = v(2, &[1, 1, 0, 1]);
        assert_eq!(reference_eigenvalue::<f64>(&g), Complex::new(0.0, 1.0));
        let m = xz_operator::<f64>(&g).unwrap();
        assert!(m.mul(&m).max_diff(&DenseOperator::identity(4).scale(c(-1.0))) < TOL);
        let proj = Projector::<f64>::eigenspace(&[g], &[0]).unwrap().to_dense(4);
        assert!(proj.is_idempotent(TOL));
        assert!((proj.trace() - c(2.0)).norm() < TOL);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(bell_vector::<f64>(&SympVector::zero(2, 10)).unwrap_err().is_capacity());
        assert!(xz_operator::<f64>(&SympVector::zero(3, 6)).unwrap_err().is_capacity());
    }
}
