//! Numerical checks of the structural identities the protocol relies on.

use std::collections::HashMap;

use super::{c, dense_capacity, DenseOperator, DenseState, Encoder, Monomial, Projector};
use crate::error::{Error, Result};
use crate::stabilizer::{DecodeTable, StabilizerCode, Syndrome};
use crate::symplectic::{coset_representatives, witt_extend, witt_extension_vectors, SympSubspace, SympVector};
use crate::{zp, Real};

fn frobenius<T: Real>(a: &DenseOperator<T>, b: &DenseOperator<T>) -> T {
    let d = a.dim();
    let mut acc = T::zero();
    for i in 0..d {
        for j in 0..d {
            acc = acc + (a.get(i, j) - b.get(i, j)).norm_sqr();
        }
    }
    acc.sqrt()
}

/// `‖(P*(x) ⊗ I − P*(x) ⊗ P(x)) |β(0)⟩‖` for every syndrome index `x`.
pub fn lemma1_residuals<T: Real>(code: &StabilizerCode) -> Result<Vec<T>> {
    dense_capacity(code.p(), 2 * code.n())?;
    let d = zp::checked_size(code.p(), code.n()) as usize;
    // |β(0)⟩ as a matrix is I/√d; (A ⊗ B)|β(0)⟩ is A Bᵀ/√d
    let scale = c(T::one() / T::lit(d as f64).sqrt());
    let plain = super::stabilizer_projectors::<T>(code, false)?;
    let star = super::stabilizer_projectors::<T>(code, true)?;
    Ok(plain
        .iter()
        .zip(&star)
        .map(|(p, s)| {
            let lhs = s.scale(scale);
            let rhs = s.mul(&p.transpose()).scale(scale);
            frobenius(&lhs, &rhs)
        })
        .collect())
}

/// `‖(conj(U) ⊗ U)|β(0)⟩ − |β(0)⟩‖` for the encoder unitary with ancilla `|0…0⟩`.
pub fn invariance_residual<T: Real>(encoder: &Encoder<T>) -> Result<T> {
    let u = encoder.unitary(&Syndrome::zero(encoder.p(), encoder.n() - encoder.k()))?;
    let d = u.dim();
    let scale = c(T::one() / T::lit(d as f64).sqrt());
    let lhs = u.conj().mul(&u.transpose()).scale(scale);
    Ok(frobenius(&lhs, &DenseOperator::identity(d).scale(scale)))
}

/// `((s_1, s_2), logical input, first ket, second ket, relative sign)`.
pub type EncodingRow = ((u32, u32), usize, &'static str, &'static str, i8);

/// Four-qubit encoding table. `s_1` refers to `XXXX`, `s_2` to `ZZZZ`.
pub const TABLE1: [EncodingRow; 16] = [
    ((0, 0), 0, "0000", "1111", 1),
    ((0, 0), 1, "0011", "1100", 1),
    ((0, 0), 2, "0101", "1010", 1),
    ((0, 0), 3, "0110", "1001", 1),
    ((0, 1), 0, "0001", "1110", 1),
    ((0, 1), 1, "0010", "1101", 1),
    ((0, 1), 2, "0100", "1011", 1),
    ((0, 1), 3, "1000", "0111", 1),
    ((1, 0), 0, "0000", "1111", -1),
    ((1, 0), 1, "0011", "1100", -1),
    ((1, 0), 2, "0101", "1010", -1),
    ((1, 0), 3, "0110", "1001", -1),
    ((1, 1), 0, "0001", "1110", -1),
    ((1, 1), 1, "0010", "1101", -1),
    ((1, 1), 2, "0100", "1011", -1),
    ((1, 1), 3, "1000", "0111", -1),
];

fn ket_index(bits: &str) -> usize {
    bits.chars().fold(0, |acc, ch| acc * 2 + usize::from(ch == '1'))
}

/// Table state for each row, as a dense vector.
pub fn table1_vectors<T: Real>() -> Vec<DenseState<T>> {
    let h = T::one() / T::lit(2.0).sqrt();
    TABLE1
        .iter()
        .map(|&(_, _, a, b, sign)| {
            let mut amps = vec![c(T::zero()); 16];
            amps[ket_index(a)] = c(h);
            amps[ket_index(b)] = c(h * T::lit(sign as f64));
            DenseState::new(2, 4, amps).expect("16 amplitudes")
        })
        .collect()
}

/// `|⟨row|x, i⟩|` for every row of [`TABLE1`].
pub fn table1_overlaps<T: Real>(encoder: &Encoder<T>) -> Result<Vec<T>> {
    if (encoder.p(), encoder.n(), encoder.k()) != (2, 4, 2) {
        return Err(Error::Dimension("the encoding table is for a binary [[4,2]] code".into()));
    }
    Ok(TABLE1
        .iter()
        .zip(table1_vectors::<T>())
        .map(|(&((s1, s2), i, ..), row)| {
            let x = (s1 * 2 + s2) as usize;
            row.inner(encoder.vector(x, i)).norm()
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct Lemma2State<T> {
    /// Maximal isotropic extension of C.
    pub cmax: SympSubspace,
    /// Coset representatives of `C_max` in `C^⊥`, zero first.
    pub reps: Vec<SympVector>,
    pub psi1: DenseState<T>,
    pub psi2: DenseState<T>,
    pub phi: DenseState<T>,
}

pub fn lemma2_construct<T: Real>(code: &StabilizerCode) -> Result<Lemma2State<T>> {
    let (p, n, k) = (code.p(), code.n(), code.k());
    dense_capacity(p, 2 * n)?;
    let d = zp::checked_size(p, n) as usize;
    let mut gens = code.generators().to_vec();
    gens.extend(witt_extension_vectors(code.stabilizer())?);
    let cmax = witt_extend(code.stabilizer())?;
    let proj = Projector::<T>::eigenspace(&gens, &vec![0; gens.len()])?;
    let mut best: Option<(T, Vec<num_complex::Complex<T>>)> = None;
    let mut e = vec![c(T::zero()); d];
    for m in 0..d {
        e[m] = c(T::one());
        let col = proj.apply(&e);
        e[m] = c(T::zero());
        if best.as_ref().is_none_or(|(b, _)| col[m].re > *b + T::lit(1e-9)) {
            best = Some((col[m].re, col));
        }
    }
    let psi1 = DenseState::new(p, n, best.expect("nonempty basis").1)?.normalized();
    let reps = coset_representatives(code.normalizer(), &cmax)?;
    let mut acc = vec![c(T::zero()); d];
    for x in &reps {
        for (a, b) in acc.iter_mut().zip(Monomial::<T>::xz(x)?.apply(psi1.amps())) {
            *a = *a + b;
        }
    }
    let psi2 = DenseState::new(p, n, acc)?.scaled(c(T::one() / T::lit(zp::checked_size(p, k) as f64).sqrt()));
    let root_pk = T::lit(zp::checked_size(p, k) as f64).sqrt();
    let norm = (T::lit(2.0) + T::lit(2.0) / root_pk).sqrt();
    let phi = psi1.plus(&psi2).scaled(c(T::one() / norm));
    Ok(Lemma2State { cmax, reps, psi1, psi2, phi })
}

#[derive(Clone, Debug)]
pub struct Lemma2Check<T> {
    /// Largest `|⟨φ|XZ(e - e(s))|φ⟩|` over uncorrectable `e`; 0 if there are none.
    pub max_overlap: T,
    /// First error (in index order) attaining the maximum.
    pub witness: Option<SympVector>,
    pub witness_residual: Option<SympVector>,
    pub uncorrectable: usize,
}

pub fn lemma2_check<T: Real>(code: &StabilizerCode, table: &DecodeTable) -> Result<Lemma2Check<T>> {
    let table = DecodeTable::new(code, table.corrections().to_vec())?;
    let (p, n) = (code.p(), code.n());
    let size = dense_capacity(p, 2 * n)?;
    let state = lemma2_construct::<T>(code)?;
    let mut cache: HashMap<usize, T> = HashMap::new();
    let mut out = Lemma2Check { max_overlap: T::zero(), witness: None, witness_residual: None, uncorrectable: 0 };
    for i in 0..size {
        let e = SympVector::from_index(p, n, i);
        let s = code.syndrome_of(&e)?;
        let residual = e.sub(table.correction(&s))?;
        if code.stabilizer().contains(&residual) {
            continue;
        }
        out.uncorrectable += 1;
        let overlap = match cache.get(&residual.index()) {
            Some(&v) => v,
            None => {
                let moved = Monomial::<T>::xz(&residual)?.apply(state.phi.amps());
                let v = state.phi.inner(&DenseState::new(p, n, moved)?).norm();
                cache.insert(residual.index(), v);
                v
            }
        };
        if out.witness.is_none() || overlap > out.max_overlap {
            out.max_overlap = overlap;
            out.witness = Some(e);
            out.witness_residual = Some(residual);
        }
    }
    Ok(out)
}
