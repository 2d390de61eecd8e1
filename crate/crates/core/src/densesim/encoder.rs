use num_complex::Complex;

use super::{c, dense_capacity, DenseOperator, DenseState, Monomial, Projector};
use crate::error::{Error, Result};
use crate::stabilizer::{StabilizerCode, Syndrome};
use crate::{zp, Real};

/// Code vectors `|x, i⟩`: syndrome space `x`, logical basis state `i`.
#[derive(Clone, Debug)]
pub struct Encoder<T> {
    p: u32,
    n: usize,
    k: usize,
    /// `vectors[x][i]`, both indices mixed-radix.
    vectors: Vec<Vec<DenseState<T>>>,
}

impl<T: Real> Encoder<T> {
    /// `|x, 0⟩` is the joint eigenvector of `P(x)` and every `z̄_j` (reference
    /// eigenvalue), taken as the normalized projection of the computational basis
    /// state on which that projector has the largest (first maximal) diagonal entry;
    /// `|x, i⟩ = Π_j XZ(x̄_j)^{i_j} |x, 0⟩`.
    pub fn canonical(code: &StabilizerCode) -> Result<Self> {
        let (p, n, k) = (code.p(), code.n(), code.k());
        dense_capacity(p, 2 * n)?;
        let dim = zp::checked_size(p, n) as usize;
        let logicals = code.logical_basis();
        let xbars: Vec<Monomial<T>> = logicals.iter().step_by(2).map(Monomial::xz).collect::<Result<_>>()?;
        let mut gens = code.generators().to_vec();
        gens.extend(logicals.iter().skip(1).step_by(2).cloned());
        let tol = T::lit(1e-9);
        let mut vectors = Vec::with_capacity(code.syndrome_count());
        for x in code.syndromes() {
            let mut exps = x.entries().to_vec();
            exps.extend(std::iter::repeat_n(0, k));
            let proj = Projector::<T>::eigenspace(&gens, &exps)?;
            let mut best: Option<(T, Vec<Complex<T>>)> = None;
            let mut e = vec![c(T::zero()); dim];
            for m in 0..dim {
                e[m] = c(T::one());
                let col = proj.apply(&e);
                e[m] = c(T::zero());
                let diag = col[m].re;
                if best.as_ref().is_none_or(|(b, _)| diag > *b + tol) {
                    best = Some((diag, col));
                }
            }
            let (_, col) = best.expect("nonempty basis");
            let base = DenseState::new(p, n, col)?.normalized();
            let mut row = Vec::with_capacity(zp::checked_size(p, k) as usize);
            for i in 0..zp::checked_size(p, k) as usize {
                let mut amps = base.amps().to_vec();
                let digits = Syndrome::from_index(p, k, i);
                for (xb, &d) in xbars.iter().zip(digits.entries()) {
                    for _ in 0..d {
                        amps = xb.apply(&amps);
                    }
                }
                row.push(DenseState::new(p, n, amps)?);
            }
            vectors.push(row);
        }
        Ok(Self { p, n, k, vectors })
    }

    /// Explicit code vectors; they must be orthonormal.
    pub fn from_vectors(p: u32, n: usize, k: usize, vectors: Vec<Vec<DenseState<T>>>) -> Result<Self> {
        dense_capacity(p, 2 * n)?;
        if k == 0 || k > n {
            return Err(Error::Dimension(format!("cannot encode {k} qudits into {n}")));
        }
        let rows = zp::checked_size(p, n - k) as usize;
        let cols = zp::checked_size(p, k) as usize;
        if vectors.len() != rows || vectors.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension(format!("expected {rows} x {cols} code vectors")));
        }
        if vectors.iter().flatten().any(|v| v.p() != p || v.qudits() != n) {
            return Err(Error::Dimension(format!("code vectors must live on {n} qudits mod {p}")));
        }
        let flat: Vec<&DenseState<T>> = vectors.iter().flatten().collect();
        let tol = T::lit(1e-10);
        for (i, a) in flat.iter().enumerate() {
            for (j, b) in flat.iter().enumerate().skip(i) {
                let expect = if i == j { T::one() } else { T::zero() };
                if (a.inner(b) - c(expect)).norm() > tol {
                    return Err(Error::InvalidState(format!("code vectors {i} and {j} are not orthonormal")));
                }
            }
        }
        Ok(Self { p, n, k, vectors })
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

    pub fn vector(&self, x: usize, i: usize) -> &DenseState<T> {
        &self.vectors[x][i]
    }

    pub(crate) fn block(&self, x: usize) -> &[DenseState<T>] {
        &self.vectors[x]
    }

    /// `U_a |i⟩|y⟩ = |y + a, i⟩`, logical register first.
    pub fn unitary(&self, a: &Syndrome) -> Result<DenseOperator<T>> {
        let r = self.n - self.k;
        if a.entries().len() != r {
            return Err(Error::Dimension(format!("ancilla label of length {}, expected {r}", a.entries().len())));
        }
        let rows = zp::checked_size(self.p, r) as usize;
        let mut columns = Vec::with_capacity(rows * self.vectors[0].len());
        for i in 0..self.vectors[0].len() {
            for y in 0..rows {
                let ys = Syndrome::from_index(self.p, r, y);
                let shifted: Vec<u32> =
                    ys.entries().iter().zip(a.entries()).map(|(&u, &v)| zp::add(u, v, self.p)).collect();
                let target = Syndrome::new(self.p, shifted)?.index();
                columns.push(self.vectors[target][i].clone());
            }
        }
        DenseOperator::from_columns(&columns)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densesim::{stabilizer_projectors, xz_operator};
    use crate::presets;

    #[test]
    fn canonical_vectors_are_orthonormal_and_in_place() {
        for code in [presets::recurrence(), presets::qpa(), presets::xxxx_zzzz()] {
            let enc = Encoder::<f64>::canonical(&code).unwrap();
            let rebuilt = Encoder::from_vectors(2, code.n(), code.k(), enc.vectors.clone()).unwrap();
            let projs = stabilizer_projectors::<f64>(&code, false).unwrap();
            for (x, proj) in projs.iter().enumerate() {
                for v in rebuilt.block(x) {
                    assert!(proj.apply(v).distance(v) < 1e-12);
                }
            }
            let u = enc.unitary(&Syndrome::zero(2, code.r())).unwrap();
            assert!(u.is_unitary(1e-12));
        }
    }

    #[test]
    fn recurrence_encoder() {
        let enc = Encoder::<f64>::canonical(&presets::recurrence()).unwrap();
        let idx = |v: &DenseState<f64>| v.amps().iter().position(|a| (a.norm() - 1.0).abs() < 1e-12);
        assert_eq!(idx(enc.vector(0, 0)), Some(0));
        assert_eq!(idx(enc.vector(0, 1)), Some(3));
        assert_eq!(idx(enc.vector(1, 0)), Some(1));
        assert_eq!(idx(enc.vector(1, 1)), Some(2));
    }

    #[test]
    fn logical_z_acts_inverted() {
        let code = presets::xxxx_zzzz();
        let enc = Encoder::<f64>::canonical(&code).unwrap();
        let zbar = xz_operator::<f64>(&code.logical_basis()[1]).unwrap();
        let v0 = enc.vector(0, 0);
        let v2 = enc.vector(0, 2);
        // i = 2 sets the first logical digit to 1; Z̄_1 then acts as -1 = ω^{-1}
        assert!((v0.inner(&zbar.apply(v0)) - c(1.0)).norm() < 1e-12);
        assert!((v2.inner(&zbar.apply(v2)) - c(-1.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_orthonormal_vectors() {
        let e0 = DenseState::<f64>::basis(2, 2, 0).unwrap();
        let vecs = vec![vec![e0.clone(), e0.clone()], vec![e0.clone(), e0]];
        assert!(Encoder::from_vectors(2, 2, 1, vecs).is_err());
    }
}
