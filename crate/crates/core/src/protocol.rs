//! Distillation protocols built from stabilizer codes, and their exact analysis on
//! Bell-diagonal inputs.
//!
//! With `u` the Bell label of the input block, the syndrome is `s = syndrome(u)`
//! and, after Bob's correction `e(s)`, the kept pairs are in the Bell state labelled
//! by the output label of `u - e(s)` (see [`LogicalClass::output_bell_label`]).
//! Every quantity therefore depends on `α` only through the masses of the cosets
//! `u + C`, which are the buckets of the coset map. The syndrome fixes the top
//! digits of a bucket, the output label the bottom `2k`.
//!
//! [`LogicalClass::output_bell_label`]: crate::stabilizer::LogicalClass::output_bell_label

use crate::bell::{normalization_tol, BellDiagState};
use crate::error::{Error, Result};
use crate::stabilizer::{DecodeTable, StabilizerCode, Syndrome};
use crate::symplectic::SympVector;
use crate::{rates, zp, Real};

/// Relative tolerance for ties between most-likely cosets.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Decoder {
    /// Per syndrome, the most probable coset of C in `D(s)` under the input state.
    MostLikely,
    Table(DecodeTable),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AcceptPolicy {
    /// Keep every block.
    OneWay,
    ZeroSyndrome,
    /// Keep syndromes whose conditional output fidelity is at least the threshold.
    Threshold(f64),
    /// Keep the listed syndrome indices.
    Syndromes(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct ConvertedProtocol {
    code: StabilizerCode,
    decoder: Decoder,
    policy: AcceptPolicy,
}

impl ConvertedProtocol {
    pub fn new(code: StabilizerCode, decoder: Decoder, policy: AcceptPolicy) -> Result<Self> {
        if let Decoder::Table(t) = &decoder {
            DecodeTable::new(&code, t.corrections().to_vec())?;
        }
        match &policy {
            AcceptPolicy::Threshold(t) if !(0.0..=1.0).contains(t) => {
                return Err(Error::InvalidInput(format!("threshold {t} is outside [0, 1]")));
            }
            AcceptPolicy::Syndromes(list) => {
                if let Some(bad) = list.iter().find(|&&i| i >= code.syndrome_count()) {
                    return Err(Error::InvalidInput(format!(
                        "syndrome index {bad} out of range for {} syndromes",
                        code.syndrome_count()
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { code, decoder, policy })
    }

    pub fn one_way(code: StabilizerCode) -> Self {
        Self { code, decoder: Decoder::MostLikely, policy: AcceptPolicy::OneWay }
    }

    pub fn two_way(code: StabilizerCode) -> Self {
        Self { code, decoder: Decoder::MostLikely, policy: AcceptPolicy::ZeroSyndrome }
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    pub fn policy(&self) -> &AcceptPolicy {
        &self.policy
    }

    pub fn is_one_way(&self) -> bool {
        self.policy == AcceptPolicy::OneWay
    }

    /// Decode table and acceptance flags for the given coset masses.
    pub(crate) fn resolve<T: Real>(&self, masses: &[T]) -> (DecodeTable, Vec<bool>) {
        let table = match &self.decoder {
            Decoder::MostLikely => most_likely_from_masses(&self.code, masses),
            Decoder::Table(t) => t.clone(),
        };
        let count = self.code.syndrome_count();
        let accepted = match &self.policy {
            AcceptPolicy::OneWay => vec![true; count],
            AcceptPolicy::ZeroSyndrome => (0..count).map(|s| s == 0).collect(),
            AcceptPolicy::Syndromes(list) => (0..count).map(|s| list.contains(&s)).collect(),
            AcceptPolicy::Threshold(theta) => {
                let labels = self.code.bell_label_count();
                (0..count)
                    .map(|s| {
                        let slice = &masses[s * labels..(s + 1) * labels];
                        let prob: T = slice.iter().copied().sum();
                        let hit = self.code.bucket_of(&table.corrections()[s]) % labels;
                        prob > T::zero() && slice[hit] / prob >= T::lit(*theta)
                    })
                    .collect()
            }
        };
        (table, accepted)
    }
}

/// Per-syndrome outcome of one protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeRecord<T> {
    pub syndrome: Syndrome,
    pub probability: T,
    pub correction: SympVector,
    pub accepted: bool,
    /// Weight of `β(0)` on the kept pairs given `s`; 0 when `s` never occurs.
    pub fidelity: T,
    /// Bell weights of the kept pairs given `s`; all zero when `s` never occurs.
    pub output_weights: Vec<T>,
}

impl<T: Real> SyndromeRecord<T> {
    pub fn output_state(&self, p: u32, k: usize) -> Option<BellDiagState<T>> {
        (self.probability > T::zero()).then(|| rescaled(p, k, self.output_weights.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolReport<T> {
    pub p: u32,
    pub n: usize,
    pub k: usize,
    pub records: Vec<SyndromeRecord<T>>,
    pub decode_table: DecodeTable,
    pub accept_prob: T,
    /// `Σ_s Pr[u ∈ e(s) + C]` over accepted `s`: unnormalized fidelity mass.
    pub avg_fidelity_bound: T,
    /// `avg_fidelity_bound / accept_prob`, or 0 when nothing is accepted.
    pub conditional_fidelity: T,
}

impl<T: Real> ProtocolReport<T> {
    /// Output state averaged over accepted syndromes.
    pub fn accepted_output(&self) -> Result<BellDiagState<T>> {
        if self.accept_prob <= T::zero() {
            return Err(Error::InvalidState("no syndrome is ever accepted".into()));
        }
        let mut mix = vec![T::zero(); zp::checked_size(self.p, 2 * self.k) as usize];
        for r in self.records.iter().filter(|r| r.accepted) {
            for (m, &w) in mix.iter_mut().zip(&r.output_weights) {
                *m = *m + r.probability * w;
            }
        }
        Ok(rescaled(self.p, self.k, mix))
    }
}

/// Dense state from weights that are normalized up to rounding.
fn rescaled<T: Real>(p: u32, n: usize, mut weights: Vec<T>) -> BellDiagState<T> {
    let total: T = weights.iter().copied().sum();
    for w in &mut weights {
        *w = *w / total;
    }
    BellDiagState::dense(p, n, weights).expect("rescaled weights form a state")
}

fn check_state<T: Real>(code: &StabilizerCode, alpha: &BellDiagState<T>) -> Result<()> {
    if alpha.p() != code.p() || alpha.n() != code.n() {
        return Err(Error::Dimension(format!(
            "state over {} pairs mod {} for a code with n = {}, p = {}",
            alpha.n(),
            alpha.p(),
            code.n(),
            code.p()
        )));
    }
    Ok(())
}

fn bucket_columns(code: &StabilizerCode) -> Vec<Vec<u32>> {
    let rows = code.coset_rows();
    (0..2 * code.n()).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

fn digits_to_index(digits: &[u32], p: u32) -> usize {
    digits.iter().fold(0usize, |acc, &d| acc * p as usize + d as usize)
}

/// Coset masses from a full weight table (any nonnegative weights), enumerating
/// Z_p^{2n} in index order and updating the coset-map image incrementally.
pub(crate) fn masses_from_table<T: Real>(code: &StabilizerCode, weights: &[T]) -> Vec<T> {
    let p = code.p();
    let width = 2 * code.n();
    let cols = bucket_columns(code);
    let m = code.n() + code.k();
    let mut out = vec![T::zero(); zp::checked_size(p, m) as usize];
    let mut digits = vec![0u32; width];
    let mut image = vec![0u32; m];
    for (idx, &w) in weights.iter().enumerate() {
        if idx > 0 {
            // odometer step; a digit wrapping back to 0 has had its column added p times
            for j in (0..width).rev() {
                for (x, &c) in image.iter_mut().zip(&cols[j]) {
                    *x = zp::add(*x, c, p);
                }
                digits[j] += 1;
                if digits[j] < p {
                    break;
                }
                digits[j] = 0;
            }
        }
        if w != T::zero() {
            let b = digits_to_index(&image, p);
            out[b] = out[b] + w;
        }
    }
    out
}

/// Coset masses of a product state by convolving factor by factor over Z_p^{n+k}.
pub(crate) fn masses_by_convolution<T: Real>(code: &StabilizerCode, alpha: &BellDiagState<T>) -> Vec<T> {
    let p = code.p();
    let cols = bucket_columns(code);
    let m = code.n() + code.k();
    let size = zp::checked_size(p, m) as usize;
    let mut acc = vec![T::zero(); size];
    acc[0] = T::one();
    let mut offset = 0;
    for f in alpha.factors() {
        let local = 2 * f.pairs();
        let mut contribs: Vec<(Vec<u32>, T)> = Vec::new();
        for (i, &w) in f.weights().iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            let u = SympVector::from_index(p, f.pairs(), i);
            let mut img = vec![0u32; m];
            for (j, &d) in u.coords().iter().enumerate().take(local) {
                if d != 0 {
                    for (x, &c) in img.iter_mut().zip(&cols[2 * offset + j]) {
                        *x = zp::add(*x, zp::mul(c, d, p), p);
                    }
                }
            }
            contribs.push((img, w));
        }
        let mut next = vec![T::zero(); size];
        let mut yd = vec![0u32; m];
        for (y, &a) in acc.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            let mut rest = y;
            for d in yd.iter_mut().rev() {
                *d = (rest % p as usize) as u32;
                rest /= p as usize;
            }
            for (img, w) in &contribs {
                let idx = yd.iter().zip(img).fold(0usize, |acc, (&a, &b)| acc * p as usize + zp::add(a, b, p) as usize);
                next[idx] = next[idx] + a * *w;
            }
        }
        acc = next;
        offset += f.pairs();
    }
    acc
}

/// `Pr[u ∈ v + C]` for every coset bucket.
pub fn coset_masses<T: Real>(code: &StabilizerCode, alpha: &BellDiagState<T>) -> Result<Vec<T>> {
    check_state(code, alpha)?;
    zp::ensure_capacity("coset mass table", code.p(), code.n() + code.k(), zp::ENUMERATION_LIMIT)?;
    if alpha.is_dense() {
        Ok(masses_from_table(code, alpha.factors()[0].weights()))
    } else {
        Ok(masses_by_convolution(code, alpha))
    }
}

fn most_likely_from_masses<T: Real>(code: &StabilizerCode, masses: &[T]) -> DecodeTable {
    let labels = code.bell_label_count();
    let corrections = (0..code.syndrome_count())
        .map(|s| {
            let slice = &masses[s * labels..(s + 1) * labels];
            let best = slice.iter().copied().fold(T::zero(), T::max);
            let cut = best - best * T::lit(TIE_TOL);
            slice
                .iter()
                .enumerate()
                .filter(|(_, &w)| w >= cut)
                .map(|(l, _)| code.bucket_representative(s * labels + l))
                .min()
                .expect("at least one label reaches the maximum")
        })
        .collect();
    DecodeTable::from_trusted(corrections)
}

/// Most-likely decode table for `α`; ties go to the lexicographically smallest
/// coset representative.
pub fn most_likely_error<T: Real>(code: &StabilizerCode, alpha: &BellDiagState<T>) -> Result<DecodeTable> {
    Ok(most_likely_from_masses(code, &coset_masses(code, alpha)?))
}

fn add_labels(a: usize, b: usize, p: u32, len: usize) -> usize {
    let pu = p as usize;
    let (mut a, mut b) = (a, b);
    let mut out = 0usize;
    let mut place = 1usize;
    for _ in 0..len {
        out += ((a % pu + b % pu) % pu) * place;
        a /= pu;
        b /= pu;
        place *= pu;
    }
    out
}

fn report_from_masses<T: Real>(proto: &ConvertedProtocol, masses: &[T]) -> ProtocolReport<T> {
    let code = &proto.code;
    let (p, k) = (code.p(), code.k());
    let labels = code.bell_label_count();
    let (table, accepted) = proto.resolve(masses);
    let mut records = Vec::with_capacity(code.syndrome_count());
    let mut accept_prob = T::zero();
    let mut good = T::zero();
    for (s, syndrome) in code.syndromes().enumerate() {
        let slice = &masses[s * labels..(s + 1) * labels];
        let prob: T = slice.iter().copied().sum();
        let e = table.corrections()[s].clone();
        let hit = code.bucket_of(&e) % labels;
        let output_weights: Vec<T> = if prob > T::zero() {
            (0..labels).map(|l| slice[add_labels(hit, l, p, 2 * k)] / prob).collect()
        } else {
            vec![T::zero(); labels]
        };
        let fidelity = output_weights[0];
        if accepted[s] {
            accept_prob = accept_prob + prob;
            good = good + slice[hit];
        }
        records.push(SyndromeRecord {
            syndrome,
            probability: prob,
            correction: e,
            accepted: accepted[s],
            fidelity,
            output_weights,
        });
    }
    let conditional_fidelity = if accept_prob > T::zero() { good / accept_prob } else { T::zero() };
    ProtocolReport {
        p,
        n: code.n(),
        k,
        records,
        decode_table: table,
        accept_prob,
        avg_fidelity_bound: good,
        conditional_fidelity,
    }
}

/// Exact per-syndrome statistics of the protocol on a Bell-diagonal input.
pub fn analyze<T: Real>(proto: &ConvertedProtocol, alpha: &BellDiagState<T>) -> Result<ProtocolReport<T>> {
    let masses = coset_masses(&proto.code, alpha)?;
    Ok(report_from_masses(proto, &masses))
}

/// `Σ_{accepted s} Σ_{u ∈ e(s)+C} c(u)` for arbitrary Bell-basis diagonal
/// coefficients `c(u) = ⟨β(u)|ρ|β(u)⟩` of a (not necessarily Bell-diagonal) state.
pub fn general_fidelity_bound<T: Real>(proto: &ConvertedProtocol, coeffs: &[T]) -> Result<T> {
    let code = &proto.code;
    let size = zp::ensure_capacity("Bell coefficient table", code.p(), 2 * code.n(), zp::ENUMERATION_LIMIT)?;
    if coeffs.len() != size {
        return Err(Error::Dimension(format!("expected {size} coefficients, got {}", coeffs.len())));
    }
    if let Some(c) = coeffs.iter().find(|c| !(**c >= T::zero())) {
        return Err(Error::InvalidState(format!("coefficient {c} is negative or not a number")));
    }
    let total: T = coeffs.iter().copied().sum();
    if total > T::one() + normalization_tol::<T>() {
        return Err(Error::InvalidState(format!("coefficients sum to {total} > 1")));
    }
    let masses = masses_from_table(code, coeffs);
    Ok(report_from_masses(proto, &masses).avg_fidelity_bound)
}

/// Errors that the protocol both accepts and corrects: `∪_{accepted s} e(s) + C`.
#[derive(Clone, Debug)]
pub struct GoodSet {
    code: StabilizerCode,
    table: DecodeTable,
    accepted: Vec<bool>,
}

impl GoodSet {
    pub fn new(code: StabilizerCode, table: DecodeTable, accepted: Vec<bool>) -> Result<Self> {
        let table = DecodeTable::new(&code, table.corrections().to_vec())?;
        if accepted.len() != code.syndrome_count() {
            return Err(Error::Dimension(format!(
                "{} acceptance flags for {} syndromes",
                accepted.len(),
                code.syndrome_count()
            )));
        }
        Ok(Self { code, table, accepted })
    }

    pub fn contains(&self, u: &SympVector) -> Result<bool> {
        let s = self.code.syndrome_of(u)?;
        if !self.accepted[s.index()] {
            return Ok(false);
        }
        Ok(self.code.stabilizer().contains(&u.sub(self.table.correction(&s))?))
    }

    /// `#accepted syndromes · p^{n-k}`.
    pub fn size(&self) -> u128 {
        self.accepted.iter().filter(|&&a| a).count() as u128 * self.code.stabilizer().cardinality()
    }

    pub fn members(&self) -> Result<Vec<SympVector>> {
        let c = self.code.stabilizer().elements()?;
        let mut out: Vec<SympVector> = Vec::new();
        for (s, e) in self.table.corrections().iter().enumerate() {
            if self.accepted[s] {
                out.extend(c.iter().map(|x| e.add_unchecked(x)));
            }
        }
        out.sort();
        Ok(out)
    }
}

/// Good set for the decoder and policy as resolved on `α`.
pub fn good_set<T: Real>(proto: &ConvertedProtocol, alpha: &BellDiagState<T>) -> Result<GoodSet> {
    let masses = coset_masses(&proto.code, alpha)?;
    let (table, accepted) = proto.resolve(&masses);
    Ok(GoodSet { code: proto.code.clone(), table, accepted })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord<T> {
    pub round: usize,
    /// Acceptance probability of this round (1 for round 0).
    pub accept_prob: T,
    pub state: BellDiagState<T>,
    /// `α(0)` of the current `k`-pair state.
    pub fidelity: T,
    /// `max(0, k - H_p(W))`.
    pub hashing_yield: T,
    /// Output pairs per input pair after this many rounds then hashing.
    pub net_yield: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace<T> {
    pub records: Vec<IterationRecord<T>>,
    /// Set when a round accepted nothing and iteration stopped before `rounds`.
    pub stopped_early: bool,
}

/// Runs up to `rounds` rounds, each on `n/k` copies of the previous output.
pub fn iterate<T: Real>(
    proto: &ConvertedProtocol,
    initial: &BellDiagState<T>,
    rounds: usize,
) -> Result<IterationTrace<T>> {
    let code = &proto.code;
    let (n, k) = (code.n(), code.k());
    if n % k != 0 {
        return Err(Error::UnsupportedIteration(format!("k = {k} does not divide n = {n}")));
    }
    if initial.p() != code.p() || initial.n() != k {
        return Err(Error::Dimension(format!(
            "iteration needs a state over k = {k} pairs mod {}, got {} pairs mod {}",
            code.p(),
            initial.n(),
            initial.p()
        )));
    }
    let ratio = T::lit(k as f64) / T::lit(n as f64);
    let record = |round: usize, accept_prob: T, state: BellDiagState<T>, scale: T| -> Result<IterationRecord<T>> {
        let zero = SympVector::zero(state.p(), k);
        let hashing = rates::hashing_yield(&state);
        Ok(IterationRecord {
            round,
            accept_prob,
            fidelity: state.weight(&zero)?,
            hashing_yield: hashing,
            net_yield: scale * hashing / T::lit(k as f64),
            state,
        })
    };
    let mut records = vec![record(0, T::one(), initial.clone(), T::one())?];
    let mut scale = T::one();
    let mut current = initial.clone();
    let mut stopped_early = false;
    for round in 1..=rounds {
        let input = BellDiagState::tensor(&vec![current.clone(); n / k])?;
        let report = analyze(proto, &input)?;
        if report.accept_prob <= T::zero() {
            stopped_early = true;
            break;
        }
        current = report.accepted_output()?;
        scale = scale * ratio * report.accept_prob;
        records.push(record(round, report.accept_prob, current.clone(), scale)?);
    }
    Ok(IterationTrace { records, stopped_early })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use rand::SeedableRng;

    fn v2(coords: &[u32]) -> SympVector {
        SympVector::new(2, coords.to_vec()).unwrap()
    }

    fn werner_block(f: f64, copies: usize) -> BellDiagState<f64> {
        let w = BellDiagState::werner_converted(f).unwrap();
        BellDiagState::tensor(&vec![w; copies]).unwrap()
    }

    fn brute_masses(code: &StabilizerCode, alpha: &BellDiagState<f64>) -> Vec<f64> {
        let table = alpha.densify().unwrap();
        let mut out = vec![0.0; zp::checked_size(code.p(), code.n() + code.k()) as usize];
        for (i, &w) in table.iter().enumerate() {
            let u = SympVector::from_index(code.p(), code.n(), i);
            out[code.bucket_of(&u)] += w;
        }
        out
    }

    #[test]
    fn recurrence_on_werner() {
        let proto = ConvertedProtocol::two_way(presets::recurrence());
        let r = analyze(&proto, &werner_block(0.75, 2)).unwrap();
        // |Φ+Φ+⟩ and |Φ-Φ-⟩ survive with F², (1-F)²/9 ... summed over the Z-type pairs
        let f = 0.75;
        let q = (1.0 - f) / 3.0;
        let accept = (f + q) * (f + q) + (q + q) * (q + q);
        assert!((r.accept_prob - accept).abs() < 1e-12);
        assert!((r.accept_prob - 104.0 / 144.0).abs() < 1e-12);
        let fid = (f * f + q * q) / accept;
        assert!((r.records[0].fidelity - fid).abs() < 1e-12);
        assert!((r.records[0].fidelity - 0.788_461_538_461_538_5).abs() < 1e-12);
        assert!(r.records[0].correction.is_zero());
        assert!(r.records[0].accepted && !r.records[1].accepted);
        assert!((r.conditional_fidelity - fid).abs() < 1e-12);
    }

    #[test]
    fn perfect_pairs_are_kept() {
        for code in [presets::recurrence(), presets::qpa(), presets::xxxx_zzzz()] {
            let n = code.n();
            let proto = ConvertedProtocol::one_way(code);
            let r = analyze(&proto, &werner_block(1.0, n)).unwrap();
            assert!((r.records[0].probability - 1.0).abs() < 1e-15);
            assert_eq!(r.records[0].fidelity, 1.0);
            assert_eq!(r.avg_fidelity_bound, 1.0);
        }
    }

    #[test]
    fn convolution_matches_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for code in [presets::recurrence(), presets::qpa(), presets::xxxx_zzzz()] {
            let n = code.n();
            let parts: Vec<_> = (0..n).map(|_| BellDiagState::random(2, 1, &mut rng).unwrap()).collect();
            let product = BellDiagState::tensor(&parts).unwrap();
            let dense = product.to_dense().unwrap();
            let a = masses_by_convolution(&code, &product);
            let b = masses_from_table(&code, dense.factors()[0].weights());
            let c = brute_masses(&code, &product);
            for ((x, y), z) in a.iter().zip(&b).zip(&c) {
                assert!((x - y).abs() < 1e-14 && (y - z).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ternary_code_masses() {
        let code = StabilizerCode::new(3, vec![SympVector::new(3, vec![0, 1, 0, 2]).unwrap()]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let alpha = BellDiagState::random(3, 2, &mut rng).unwrap();
        let a = coset_masses(&code, &alpha).unwrap();
        let b = brute_masses(&code, &alpha);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
        let r = analyze(&ConvertedProtocol::one_way(code), &alpha).unwrap();
        let total: f64 = r.records.iter().map(|x| x.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn most_likely_prefers_heavier_coset_and_breaks_ties_low() {
        let code = presets::recurrence();
        // all mass on XI: syndrome 1, decoded as XI
        let alpha = BellDiagState::<f64>::point_mass(&v2(&[1, 0, 0, 0])).unwrap();
        let t = most_likely_error(&code, &alpha).unwrap();
        assert_eq!(t.corrections()[1], v2(&[1, 0, 0, 0]));
        // uniform: every coset ties, smallest representative wins
        let t = most_likely_error(&code, &BellDiagState::<f64>::uniform(2, 2).unwrap()).unwrap();
        assert_eq!(t, DecodeTable::minimal(&code));
        assert_eq!(t.corrections()[1], v2(&[0, 0, 1, 0]));
    }

    #[test]
    fn table_decoder_and_policies() {
        let code = presets::recurrence();
        let table = DecodeTable::new(&code, vec![v2(&[0, 0, 0, 0]), v2(&[1, 0, 0, 0])]).unwrap();
        let proto = ConvertedProtocol::new(code.clone(), Decoder::Table(table.clone()), AcceptPolicy::OneWay).unwrap();
        let r = analyze(&proto, &werner_block(0.9, 2)).unwrap();
        assert_eq!(r.decode_table, table);
        assert!((r.accept_prob - 1.0).abs() < 1e-12);
        let thr = ConvertedProtocol::new(code.clone(), Decoder::MostLikely, AcceptPolicy::Threshold(0.78)).unwrap();
        let r = analyze(&thr, &werner_block(0.75, 2)).unwrap();
        assert!(r.records[0].accepted && !r.records[1].accepted);
        let listed =
            ConvertedProtocol::new(code.clone(), Decoder::MostLikely, AcceptPolicy::Syndromes(vec![1])).unwrap();
        let r = analyze(&listed, &werner_block(0.75, 2)).unwrap();
        assert!(!r.records[0].accepted && r.records[1].accepted);
        assert!(ConvertedProtocol::new(code.clone(), Decoder::MostLikely, AcceptPolicy::Syndromes(vec![2])).is_err());
        assert!(ConvertedProtocol::new(code, Decoder::MostLikely, AcceptPolicy::Threshold(1.5)).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let proto = ConvertedProtocol::two_way(presets::recurrence());
        assert!(matches!(analyze(&proto, &werner_block(0.8, 3)), Err(Error::Dimension(_))));
        assert!(matches!(iterate(&proto, &werner_block(0.8, 2), 1), Err(Error::Dimension(_))));
    }

    #[test]
    fn good_set_counts() {
        let w = werner_block(0.8, 2);
        let g = good_set(&ConvertedProtocol::one_way(presets::recurrence()), &w).unwrap();
        assert_eq!(g.size(), 4);
        assert_eq!(g.members().unwrap().len(), 4);
        let g = good_set(&ConvertedProtocol::two_way(presets::recurrence()), &w).unwrap();
        assert_eq!(g.size(), 2);
        assert_eq!(g.members().unwrap(), vec![v2(&[0, 0, 0, 0]), v2(&[0, 1, 0, 1])]);
        assert!(g.contains(&v2(&[0, 1, 0, 1])).unwrap());
        assert!(!g.contains(&v2(&[0, 0, 1, 0])).unwrap());
    }

    #[test]
    fn bound_equals_exact_for_one_way() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let alpha = BellDiagState::<f64>::random(2, 4, &mut rng).unwrap();
        let proto = ConvertedProtocol::one_way(presets::xxxx_zzzz());
        let r = analyze(&proto, &alpha).unwrap();
        let exact: f64 = r.records.iter().map(|x| x.probability * x.fidelity).sum();
        let bound = general_fidelity_bound(&proto, &alpha.densify().unwrap()).unwrap();
        assert!((bound - exact).abs() < 1e-12);
        assert!(general_fidelity_bound(&proto, &[0.5; 4]).is_err());
    }

    #[test]
    fn iteration_bookkeeping() {
        let proto = ConvertedProtocol::two_way(presets::recurrence());
        let w = BellDiagState::<f64>::werner_converted(0.75).unwrap();
        let trace = iterate(&proto, &w, 3).unwrap();
        assert_eq!(trace.records.len(), 4);
        let r1 = &trace.records[1];
        assert!((r1.accept_prob - 104.0 / 144.0).abs() < 1e-12);
        assert!((r1.fidelity - 0.788_461_538_461_538_5).abs() < 1e-12);
        let expected = 0.5 * r1.accept_prob * r1.hashing_yield;
        assert!((r1.net_yield - expected).abs() < 1e-12);
        let again = analyze(&proto, &BellDiagState::tensor(&[r1.state.clone(), r1.state.clone()]).unwrap()).unwrap();
        assert_eq!(again.accepted_output().unwrap(), trace.records[2].state);
    }

    #[test]
    fn iteration_stops_when_nothing_is_accepted() {
        let code = presets::recurrence();
        let proto = ConvertedProtocol::new(code, Decoder::MostLikely, AcceptPolicy::Syndromes(vec![1])).unwrap();
        let w = BellDiagState::werner_converted(1.0).unwrap();
        let trace = iterate(&proto, &w, 4).unwrap();
        assert!(trace.stopped_early);
        assert_eq!(trace.records.len(), 1);
    }

    #[test]
    fn iteration_needs_k_dividing_n() {
        let code = StabilizerCode::new(2, vec![v2(&[0, 1, 0, 1, 0, 0]), v2(&[0, 0, 0, 1, 0, 1])]).unwrap();
        let proto = ConvertedProtocol::two_way(code);
        let w = BellDiagState::werner_converted(0.9).unwrap();
        let ww = BellDiagState::tensor(&[w.clone(), w.clone()]).unwrap();
        assert!(iterate(&proto, &w, 1).is_ok());
        assert!(matches!(iterate(&proto, &ww, 1), Err(Error::Dimension(_))));
        let code = StabilizerCode::new(2, vec![v2(&[0, 1, 0, 1, 0, 1])]).unwrap();
        let proto = ConvertedProtocol::two_way(code);
        assert!(matches!(iterate(&proto, &ww, 1), Err(Error::UnsupportedIteration(_))));
    }

    #[test]
    fn single_precision_analysis() {
        let proto = ConvertedProtocol::two_way(presets::recurrence());
        let w = BellDiagState::<f32>::werner_converted(0.75).unwrap();
        let r = analyze(&proto, &BellDiagState::tensor(&[w.clone(), w]).unwrap()).unwrap();
        assert!((r.accept_prob - 104.0 / 144.0).abs() < 1e-6);
    }
}
