//! Bell-diagonal states `Σ_u α(u) |β(u)⟩⟨β(u)|` held as weight tables over Z_p^{2n}.
//!
//! A state is a product of factors, each a dense table over a consecutive block of
//! pairs. One factor is the fully dense form; `n` one-pair factors is the per-pair
//! product form. Tables are indexed like [`SympVector::index`].

use rand::Rng;

use crate::error::{Error, Result};
use crate::symplectic::SympVector;
use crate::{zp, Real};

/// Tolerance on `Σ α = 1` in double precision.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// `NORMALIZATION_TOL`, widened for scalars too coarse to meet it.
pub fn normalization_tol<T: Real>() -> T {
    T::lit(NORMALIZATION_TOL).max(T::epsilon() * T::lit(64.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factor<T> {
    pairs: usize,
    weights: Vec<T>,
}

impl<T: Real> Factor<T> {
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellDiagState<T> {
    p: u32,
    factors: Vec<Factor<T>>,
}

fn check_table<T: Real>(weights: &[T]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !(**w >= T::zero())) {
        return Err(Error::InvalidState(format!("weight {w} is negative or not a number")));
    }
    let total: T = weights.iter().copied().sum();
    if (total - T::one()).abs() > normalization_tol::<T>() {
        return Err(Error::InvalidState(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

fn pairs_for_len(p: u32, len: usize) -> Option<usize> {
    let pp = (p * p) as usize;
    let mut m = 0;
    let mut size = 1usize;
    while size < len {
        size = size.checked_mul(pp)?;
        m += 1;
    }
    (size == len && m > 0).then_some(m)
}

fn check_fidelity<T: Real>(f: T) -> Result<()> {
    if !(f >= T::zero() && f <= T::one()) {
        return Err(Error::InvalidInput(format!("fidelity {f} is outside [0, 1]")));
    }
    Ok(())
}

impl<T: Real> BellDiagState<T> {
    pub fn dense(p: u32, n: usize, weights: Vec<T>) -> Result<Self> {
        zp::check_prime(p)?;
        let size = zp::ensure_capacity("dense Bell-diagonal table", p, 2 * n, zp::ENUMERATION_LIMIT)?;
        if n == 0 || weights.len() != size {
            return Err(Error::Dimension(format!(
                "dense table over {n} pairs needs {size} weights, got {}",
                weights.len()
            )));
        }
        check_table(&weights)?;
        Ok(Self { p, factors: vec![Factor { pairs: n, weights }] })
    }

    /// Product of tables; each table covers `m ≥ 1` pairs and has `p^{2m}` entries.
    pub fn product(p: u32, tables: Vec<Vec<T>>) -> Result<Self> {
        zp::check_prime(p)?;
        if tables.is_empty() {
            return Err(Error::Dimension("product state needs at least one factor".into()));
        }
        let mut factors = Vec::with_capacity(tables.len());
        for weights in tables {
            let pairs = pairs_for_len(p, weights.len()).ok_or_else(|| {
                Error::Dimension(format!("table of length {} is not p^(2m) for p = {p}", weights.len()))
            })?;
            check_table(&weights)?;
            factors.push(Factor { pairs, weights });
        }
        Ok(Self { p, factors })
    }

    pub fn point_mass(u: &SympVector) -> Result<Self> {
        let size = zp::ensure_capacity("dense Bell-diagonal table", u.p(), 2 * u.n(), zp::ENUMERATION_LIMIT)?;
        let mut weights = vec![T::zero(); size];
        weights[u.index()] = T::one();
        Self::dense(u.p(), u.n(), weights)
    }

    pub fn uniform(p: u32, n: usize) -> Result<Self> {
        let size = zp::ensure_capacity("dense Bell-diagonal table", p, 2 * n, zp::ENUMERATION_LIMIT)?;
        Self::dense(p, n, vec![T::one() / T::lit(size as f64); size])
    }

    /// Werner state of fidelity `F` in its raw labelling: `α(1,1) = F`, the other
    /// three weights `(1-F)/3`.
    pub fn werner_raw(f: T) -> Result<Self> {
        check_fidelity(f)?;
        let r = (T::one() - f) / T::lit(3.0);
        Self::dense(2, 1, vec![r, r, r, f])
    }

    /// Werner state after `XZ` on Bob's side: weight `F` on `β(0,0)`.
    pub fn werner_converted(f: T) -> Result<Self> {
        check_fidelity(f)?;
        let r = (T::one() - f) / T::lit(3.0);
        Self::dense(2, 1, vec![f, r, r, r])
    }

    /// One-pair state with weight `F` on `β(0,0)` and `(1-F)/(p²-1)` elsewhere.
    pub fn isotropic(p: u32, f: T) -> Result<Self> {
        check_fidelity(f)?;
        let others = T::lit((p * p - 1) as f64);
        let r = (T::one() - f) / others;
        let mut w = vec![r; (p * p) as usize];
        w[0] = f;
        Self::dense(p, 1, w)
    }

    /// Random dense state (normalized uniform draws).
    pub fn random<R: Rng + ?Sized>(p: u32, n: usize, rng: &mut R) -> Result<Self> {
        let size = zp::ensure_capacity("dense Bell-diagonal table", p, 2 * n, zp::ENUMERATION_LIMIT)?;
        let raw: Vec<f64> = (0..size).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        Self::dense(p, n, raw.into_iter().map(|x| T::lit(x / total)).collect())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.factors.iter().map(|f| f.pairs).sum()
    }

    pub fn factors(&self) -> &[Factor<T>] {
        &self.factors
    }

    pub fn is_dense(&self) -> bool {
        self.factors.len() == 1
    }

    /// `α(u)`, evaluated factor by factor.
    pub fn weight(&self, u: &SympVector) -> Result<T> {
        if u.p() != self.p || u.n() != self.n() {
            return Err(Error::Dimension(format!("vector {u} does not index a state over {} pairs", self.n())));
        }
        let coords = u.coords();
        let mut acc = T::one();
        let mut offset = 0;
        for f in &self.factors {
            let idx = coords[2 * offset..2 * (offset + f.pairs)]
                .iter()
                .fold(0usize, |a, &c| a * self.p as usize + c as usize);
            acc = acc * f.weights[idx];
            offset += f.pairs;
        }
        Ok(acc)
    }

    /// Full weight table over Z_p^{2n}.
    pub fn densify(&self) -> Result<Vec<T>> {
        if self.is_dense() {
            return Ok(self.factors[0].weights.clone());
        }
        zp::ensure_capacity("dense Bell-diagonal table", self.p, 2 * self.n(), zp::ENUMERATION_LIMIT)?;
        let mut table = vec![T::one()];
        for f in &self.factors {
            let mut next = Vec::with_capacity(table.len() * f.weights.len());
            for &a in &table {
                for &b in &f.weights {
                    next.push(a * b);
                }
            }
            table = next;
        }
        Ok(table)
    }

    pub fn to_dense(&self) -> Result<Self> {
        let n = self.n();
        Ok(Self { p: self.p, factors: vec![Factor { pairs: n, weights: self.densify()? }] })
    }

    /// Product state; factors are kept as they are until something densifies.
    pub fn tensor(states: &[Self]) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::Dimension("tensor of an empty list".into()));
        };
        let p = first.p;
        if states.iter().any(|s| s.p != p) {
            return Err(Error::Dimension("tensor factors over different moduli".into()));
        }
        let total: usize = states.iter().map(Self::n).sum();
        zp::ensure_capacity("tensor product state", p, 2 * total, zp::ENUMERATION_LIMIT)?;
        Ok(Self { p, factors: states.iter().flat_map(|s| s.factors.iter().cloned()).collect() })
    }

    /// Relabels `u -> u + v`, i.e. applies `XZ(v)` on Bob's side.
    pub fn apply_pauli_to_bob(&self, v: &SympVector) -> Result<Self> {
        if v.p() != self.p || v.n() != self.n() {
            return Err(Error::Dimension(format!("correction {v} does not act on {} pairs", self.n())));
        }
        let p = self.p;
        let mut offset = 0;
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let shift = SympVector::from_raw(p, v.coords()[2 * offset..2 * (offset + f.pairs)].to_vec());
            let mut weights = vec![T::zero(); f.weights.len()];
            for (i, &w) in f.weights.iter().enumerate() {
                let u = SympVector::from_index(p, f.pairs, i);
                weights[u.add_unchecked(&shift).index()] = w;
            }
            factors.push(Factor { pairs: f.pairs, weights });
            offset += f.pairs;
        }
        Ok(Self { p, factors })
    }

    /// Marginal on the listed pairs, in the listed order.
    pub fn marginal(&self, pairs: &[usize]) -> Result<Self> {
        let n = self.n();
        if pairs.is_empty() {
            return Err(Error::InvalidInput("marginal over no pairs".into()));
        }
        for (i, &q) in pairs.iter().enumerate() {
            if q >= n || pairs[..i].contains(&q) {
                return Err(Error::InvalidInput(format!("bad pair index {q} for a state over {n} pairs")));
            }
        }
        let full = self.densify()?;
        let p = self.p;
        let mut out = vec![T::zero(); zp::checked_size(p, 2 * pairs.len()) as usize];
        for (i, &w) in full.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            let u = SympVector::from_index(p, n, i);
            let idx = pairs.iter().fold(0usize, |acc, &q| {
                let (a, b) = u.qudit(q);
                (acc * p as usize + a as usize) * p as usize + b as usize
            });
            out[idx] = out[idx] + w;
        }
        Self::dense(p, pairs.len(), out)
    }

    /// Shannon entropy with the given base; additive over factors.
    pub fn entropy(&self, base: T) -> T {
        self.factors.iter().map(|f| crate::rates::entropy_unchecked(&f.weights, base)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn werner_states() {
        let w = BellDiagState::<f64>::werner_raw(1.0).unwrap();
        assert_eq!(w.densify().unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
        let q = BellDiagState::<f64>::werner_raw(0.25).unwrap();
        assert!(q.densify().unwrap().iter().all(|&x| close(x, 0.25)));
        let s: f64 = BellDiagState::<f64>::werner_raw(0.7).unwrap().densify().unwrap().iter().sum();
        assert!(close(s, 1.0));
        let c = BellDiagState::<f64>::werner_converted(1.0).unwrap();
        assert_eq!(c.densify().unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        let c = BellDiagState::<f64>::werner_converted(0.75).unwrap().densify().unwrap();
        assert!(close(c[0], 0.75) && c[1..].iter().all(|&x| close(x, 1.0 / 12.0)));
        assert!(BellDiagState::<f64>::werner_raw(1.5).is_err());
        assert!(BellDiagState::<f64>::werner_converted(-0.1).is_err());
    }

    #[test]
    fn pauli_relabeling() {
        let xz = SympVector::new(2, vec![1, 1]).unwrap();
        for f in [0.9, 0.6, 0.3] {
            let raw = BellDiagState::<f64>::werner_raw(f).unwrap();
            let conv = BellDiagState::<f64>::werner_converted(f).unwrap();
            assert_eq!(raw.apply_pauli_to_bob(&xz).unwrap(), conv);
            assert_eq!(raw.apply_pauli_to_bob(&xz).unwrap().apply_pauli_to_bob(&xz).unwrap(), raw);
            assert_eq!(raw.apply_pauli_to_bob(&SympVector::zero(2, 1)).unwrap(), raw);
        }
        let bad = SympVector::zero(2, 2);
        assert!(BellDiagState::<f64>::werner_raw(0.5).unwrap().apply_pauli_to_bob(&bad).is_err());
    }

    #[test]
    fn tensor_products() {
        let u = SympVector::new(2, vec![1, 0]).unwrap();
        let v = SympVector::new(2, vec![0, 1]).unwrap();
        let t = BellDiagState::<f64>::tensor(&[
            BellDiagState::point_mass(&u).unwrap(),
            BellDiagState::point_mass(&v).unwrap(),
        ])
        .unwrap();
        assert_eq!(t.weight(&u.concat(&v)).unwrap(), 1.0);
        let w = BellDiagState::<f64>::werner_converted(0.75).unwrap();
        let ww = BellDiagState::tensor(&[w.clone(), w.clone()]).unwrap();
        assert!(close(ww.densify().unwrap()[0], 0.5625));
        assert!(close(ww.entropy(2.0), 2.0 * w.entropy(2.0)));
        assert!(close(ww.to_dense().unwrap().entropy(2.0), 2.0 * w.entropy(2.0)));
        // product evaluation agrees with the densified table
        let table = ww.densify().unwrap();
        for (i, &x) in table.iter().enumerate() {
            assert!(close(ww.weight(&SympVector::from_index(2, 2, i)).unwrap(), x));
        }
    }

    #[test]
    fn tensor_capacity() {
        let w = BellDiagState::<f64>::werner_converted(0.9).unwrap();
        let many = vec![w; 11];
        assert!(BellDiagState::tensor(&many).unwrap_err().is_capacity());
    }

    #[test]
    fn marginals() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a = BellDiagState::<f64>::random(3, 1, &mut rng).unwrap();
        let b = BellDiagState::<f64>::random(3, 1, &mut rng).unwrap();
        let t = BellDiagState::tensor(&[a.clone(), b.clone()]).unwrap();
        let ma = t.marginal(&[0]).unwrap().densify().unwrap();
        for (x, y) in ma.iter().zip(a.densify().unwrap()) {
            assert!(close(*x, y));
        }
        let mb = t.marginal(&[1]).unwrap();
        let s: f64 = mb.densify().unwrap().iter().sum();
        assert!(close(s, 1.0));
        // reordering pairs swaps the factors
        let swapped = t.marginal(&[1, 0]).unwrap();
        let direct = BellDiagState::tensor(&[b, a]).unwrap().densify().unwrap();
        for (x, y) in swapped.densify().unwrap().iter().zip(direct) {
            assert!(close(*x, y));
        }
        assert!(t.marginal(&[2]).is_err());
        assert!(t.marginal(&[0, 0]).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(BellDiagState::<f64>::dense(2, 1, vec![0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(BellDiagState::<f64>::dense(2, 1, vec![0.5, 0.2, 0.2, 0.2]).is_err());
        assert!(BellDiagState::<f64>::dense(2, 1, vec![1.0, 0.0, 0.0]).is_err());
        assert!(BellDiagState::<f64>::product(2, vec![vec![1.0, 0.0]]).is_err());
        assert!(BellDiagState::<f64>::dense(4, 1, vec![0.0; 16]).is_err());
    }

    #[test]
    fn single_precision() {
        let w = BellDiagState::<f32>::werner_converted(0.8).unwrap();
        let s: f32 = w.densify().unwrap().iter().sum();
        assert!((s - 1.0).abs() < 1e-6);
    }
}
