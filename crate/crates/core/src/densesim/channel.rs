use num_complex::Complex;
use rand::Rng;

use super::{bell_vector, c, dense_capacity, DenseOperator, DenseState, Encoder, Monomial, Projector};
use crate::bell::{normalization_tol, BellDiagState};
use crate::error::{Error, Result};
use crate::protocol::{masses_from_table, ConvertedProtocol};
use crate::stabilizer::{DecodeTable, Syndrome};
use crate::symplectic::SympVector;
use crate::{zp, Real};

/// Density operator on `n` pairs as a weighted mixture of pure states.
#[derive(Clone, Debug)]
pub struct Ensemble<T> {
    p: u32,
    n: usize,
    members: Vec<(T, DenseState<T>)>,
}

impl<T: Real> Ensemble<T> {
    /// Weights must be nonnegative and sum to 1; states must be normalized.
    pub fn new(p: u32, n: usize, members: Vec<(T, DenseState<T>)>) -> Result<Self> {
        dense_capacity(p, 2 * n)?;
        let tol = normalization_tol::<T>();
        let total: T = members.iter().map(|(w, _)| *w).sum();
        if members.iter().any(|(w, _)| !(*w >= T::zero())) || (total - T::one()).abs() > tol {
            return Err(Error::InvalidState("mixture weights must be nonnegative and sum to 1".into()));
        }
        for (_, s) in &members {
            if s.p() != p || s.qudits() != 2 * n {
                return Err(Error::Dimension(format!("member state is not on {n} pairs mod {p}")));
            }
            if (s.norm() - T::one()).abs() > tol {
                return Err(Error::InvalidState(format!("member state has norm {}", s.norm())));
            }
        }
        Ok(Self { p, n, members })
    }

    pub fn from_bell_diag(alpha: &BellDiagState<T>) -> Result<Self> {
        let (p, n) = (alpha.p(), alpha.n());
        dense_capacity(p, 2 * n)?;
        let table = alpha.densify()?;
        let members = table
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > T::zero())
            .map(|(i, &w)| Ok((w, bell_vector(&SympVector::from_index(p, n, i))?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, n, members)
    }

    /// Mixture of `count` random pure states with random weights; full rank once
    /// `count ≥ p^{2n}`.
    pub fn random<R: Rng + ?Sized>(p: u32, n: usize, count: usize, rng: &mut R) -> Result<Self> {
        let dim = dense_capacity(p, 2 * n)?;
        let raw: Vec<f64> = (0..count).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let members = raw
            .into_iter()
            .map(|w| {
                let amps = (0..dim)
                    .map(|_| Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0))))
                    .collect();
                Ok((T::lit(w / total), DenseState::new(p, 2 * n, amps)?.normalized()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, n, members)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[(T, DenseState<T>)] {
        &self.members
    }

    /// `⟨β(u)|ρ|β(u)⟩` for every `u`, in index order.
    pub fn bell_coefficients(&self) -> Result<Vec<T>> {
        let size = zp::ensure_capacity("Bell coefficient table", self.p, 2 * self.n, zp::ENUMERATION_LIMIT)?;
        let mut out = vec![T::zero(); size];
        for (i, o) in out.iter_mut().enumerate() {
            let b = bell_vector::<T>(&SympVector::from_index(self.p, self.n, i))?;
            *o = self.members.iter().map(|(w, s)| *w * b.inner(s).norm_sqr()).sum();
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct DenseSyndromeRecord<T> {
    pub syndrome: Syndrome,
    pub probability: T,
    pub accepted: bool,
    /// Normalized state of the kept pairs (zero operator when `s` never occurs).
    pub output: DenseOperator<T>,
    pub fidelity: T,
    pub bell_weights: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct DenseRun<T> {
    pub records: Vec<DenseSyndromeRecord<T>>,
    pub decode_table: DecodeTable,
    pub accept_prob: T,
    /// `Σ_{accepted s} Pr(s) · fidelity(s)`.
    pub fidelity_mass: T,
    /// Largest norm lost when extracting the code block after correction.
    pub max_leakage: T,
}

fn row_apply<T: Real>(m: &mut [Vec<Complex<T>>], f: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>) {
    for row in m.iter_mut() {
        *row = f(row);
    }
}

fn col_apply<T: Real>(m: &mut [Vec<Complex<T>>], f: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>) {
    let d = m.len();
    for j in 0..d {
        let col: Vec<Complex<T>> = m.iter().map(|r| r[j]).collect();
        for (r, v) in m.iter_mut().zip(f(&col)) {
            r[j] = v;
        }
    }
}

/// The protocol as a quantum channel: Alice measures the conjugated generators,
/// Bob the generators, Bob applies `XZ(e(s))^{-1}`, both undo the encoder of
/// Alice's outcome, and the last `n-k` pairs are traced out.
pub fn run_protocol_dense<T: Real>(
    proto: &ConvertedProtocol,
    rho: &Ensemble<T>,
    encoder: &Encoder<T>,
) -> Result<DenseRun<T>> {
    let code = proto.code();
    let (p, n, k) = (code.p(), code.n(), code.k());
    if rho.p != p || rho.n != n {
        return Err(Error::Dimension(format!("state on {} pairs for a code with n = {n}", rho.n)));
    }
    if encoder.p() != p || encoder.n() != n || encoder.k() != k {
        return Err(Error::Dimension("encoder does not match the code".into()));
    }
    dense_capacity(p, 2 * n)?;
    let coeffs = rho.bell_coefficients()?;
    let masses = masses_from_table(code, &coeffs);
    let (table, accepted) = proto.resolve(&masses);

    let d = zp::checked_size(p, n) as usize;
    let out_d = zp::checked_size(p, k) as usize;
    let count = code.syndrome_count();
    let gens = code.generators();
    let bob: Vec<Projector<T>> =
        code.syndromes().map(|x| Projector::eigenspace(gens, x.entries())).collect::<Result<_>>()?;
    let alice: Vec<Projector<T>> =
        code.syndromes().map(|x| Projector::star_eigenspace(gens, x.entries())).collect::<Result<_>>()?;
    let undo: Vec<Monomial<T>> =
        table.corrections().iter().map(|e| Monomial::xz(e).map(|m| m.inverse())).collect::<Result<_>>()?;

    let mut taus = vec![DenseOperator::<T>::zeros(out_d * out_d); count];
    let mut probs = vec![T::zero(); count];
    let mut max_leakage = T::zero();
    for (w, psi) in &rho.members {
        let base: Vec<Vec<Complex<T>>> = psi.amps().chunks(d).map(|r| r.to_vec()).collect();
        for (a, pa) in alice.iter().enumerate() {
            let mut ma = base.clone();
            col_apply(&mut ma, |v| pa.apply(v));
            let block = encoder.block(a);
            for (b, pb) in bob.iter().enumerate() {
                let mut mb = ma.clone();
                row_apply(&mut mb, |v| pb.apply(v));
                let s = Syndrome::new(p, {
                    let (xa, xb) = (Syndrome::from_index(p, code.r(), a), Syndrome::from_index(p, code.r(), b));
                    xb.entries().iter().zip(xa.entries()).map(|(&y, &x)| zp::sub(y, x, p)).collect()
                })?
                .index();
                row_apply(&mut mb, |v| undo[s].apply(v));
                let norm2: T = mb.iter().flatten().map(|z| z.norm_sqr()).sum();
                if norm2 == T::zero() {
                    continue;
                }
                // out[iA][iB] = Σ v_{iA}[jA] M[jA][jB] conj(v_{iB}[jB])
                let mut out = vec![c(T::zero()); out_d * out_d];
                for (ia, va) in block.iter().enumerate() {
                    let left: Vec<Complex<T>> = (0..d)
                        .map(|jb| (0..d).fold(c(T::zero()), |acc, ja| acc + va.amps()[ja] * mb[ja][jb]))
                        .collect();
                    for (ib, vb) in block.iter().enumerate() {
                        out[ia * out_d + ib] =
                            left.iter().zip(vb.amps()).fold(c(T::zero()), |acc, (l, v)| acc + l * v.conj());
                    }
                }
                let kept: T = out.iter().map(|z| z.norm_sqr()).sum();
                max_leakage = max_leakage.max((norm2 - kept).abs());
                probs[s] = probs[s] + *w * norm2;
                let tau = &mut taus[s];
                for (i, x) in out.iter().enumerate() {
                    for (j, y) in out.iter().enumerate() {
                        let cur = tau.get(i, j);
                        tau.set(i, j, cur + x * y.conj() * *w);
                    }
                }
            }
        }
    }

    let bells: Vec<DenseState<T>> =
        (0..out_d * out_d).map(|i| bell_vector(&SympVector::from_index(p, k, i))).collect::<Result<_>>()?;
    let mut records = Vec::with_capacity(count);
    let mut accept_prob = T::zero();
    let mut fidelity_mass = T::zero();
    for (s, syndrome) in code.syndromes().enumerate() {
        let prob = probs[s];
        let output =
            if prob > T::zero() { taus[s].scale(c(T::one() / prob)) } else { DenseOperator::zeros(out_d * out_d) };
        let bell_weights: Vec<T> = bells.iter().map(|b| output.expectation(b).re).collect();
        let fidelity = bell_weights[0];
        if accepted[s] {
            accept_prob = accept_prob + prob;
            fidelity_mass = fidelity_mass + prob * fidelity;
        }
        records.push(DenseSyndromeRecord {
            syndrome,
            probability: prob,
            accepted: accepted[s],
            output,
            fidelity,
            bell_weights,
        });
    }
    Ok(DenseRun { records, decode_table: table, accept_prob, fidelity_mass, max_leakage })
}
