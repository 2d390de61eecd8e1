//! Entropies and yields of iterate-then-hash schemes.
//!
//! After `m` rounds of a two-way protocol on `n`-pair blocks with `k` outputs, the
//! surviving pairs are hashed. Per original pair the yield is
//! `(k/n)^m · Π_r accept_r · max(0, k - H_p(W_m)) / k`, where `W_m` is the `k`-pair
//! output state and entropies are in base `p`.

use rayon::prelude::*;

use crate::bell::{normalization_tol, BellDiagState};
use crate::error::{Error, Result};
use crate::protocol::{iterate, ConvertedProtocol};
use crate::Real;

pub(crate) fn entropy_unchecked<T: Real>(dist: &[T], base: T) -> T {
    let ln_base = base.ln();
    dist.iter().filter(|&&x| x > T::zero()).map(|&x| -x * x.ln() / ln_base).sum()
}

/// Shannon entropy of a probability vector, `0 log 0 = 0`.
pub fn entropy<T: Real>(dist: &[T], base: T) -> Result<T> {
    if !(base > T::one()) {
        return Err(Error::InvalidInput(format!("entropy base {base} must exceed 1")));
    }
    if let Some(x) = dist.iter().find(|x| !(**x >= T::zero())) {
        return Err(Error::InvalidState(format!("probability {x} is negative or not a number")));
    }
    let total: T = dist.iter().copied().sum();
    if (total - T::one()).abs() > normalization_tol::<T>() {
        return Err(Error::InvalidState(format!("probabilities sum to {total}, expected 1")));
    }
    Ok(entropy_unchecked(dist, base))
}

/// `max(0, k - H_p(W))` for a `k`-pair state.
pub fn hashing_yield<T: Real>(state: &BellDiagState<T>) -> T {
    let k = T::lit(state.n() as f64);
    (k - state.entropy(T::lit(state.p() as f64))).max(T::zero())
}

/// `1 - H_2` of a Werner pair, unclipped.
pub fn werner_hashing_margin<T: Real>(f: T) -> Result<T> {
    let w = BellDiagState::werner_converted(f)?;
    Ok(T::one() - w.entropy(T::lit(2.0)))
}

/// Fidelity at which the Werner hashing yield vanishes, by bisection on `[0.5, 1]`.
pub fn werner_hashing_threshold<T: Real>() -> T {
    let (mut lo, mut hi) = (T::lit(0.5), T::one());
    let tol = T::epsilon() * T::lit(16.0);
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if werner_hashing_margin(mid).expect("fidelity in range") > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CombinedYield<T> {
    pub best_rounds: usize,
    pub net_yield: T,
}

/// Best net yield over `0..=max_rounds` rounds on Werner pairs of fidelity `f`;
/// ties go to fewer rounds.
pub fn combined_yield<T: Real>(proto: &ConvertedProtocol, f: T, max_rounds: usize) -> Result<CombinedYield<T>> {
    let code = proto.code();
    if code.p() != 2 {
        return Err(Error::InvalidInput("Werner inputs need a binary code".into()));
    }
    let w = BellDiagState::werner_converted(f)?;
    let initial = BellDiagState::tensor(&vec![w; code.k()])?;
    let trace = iterate(proto, &initial, max_rounds)?;
    let mut best = CombinedYield { best_rounds: 0, net_yield: trace.records[0].net_yield };
    for r in &trace.records[1..] {
        if r.net_yield > best.net_yield {
            best = CombinedYield { best_rounds: r.round, net_yield: r.net_yield };
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct YieldSample<T> {
    pub fidelity: T,
    pub best_rounds: usize,
    pub net_yield: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct YieldCurve<T> {
    pub protocol: String,
    pub samples: Vec<YieldSample<T>>,
}

/// `combined_yield` of every named protocol at every grid point. Grid points are
/// evaluated in parallel; curves and samples keep input order.
pub fn comparison_sweep<T: Real>(
    protocols: &[(String, ConvertedProtocol)],
    grid: &[T],
    max_rounds: usize,
) -> Result<Vec<YieldCurve<T>>> {
    protocols
        .iter()
        .map(|(name, proto)| {
            let samples = grid
                .par_iter()
                .map(|&f| {
                    combined_yield(proto, f, max_rounds).map(|c| YieldSample {
                        fidelity: f,
                        best_rounds: c.best_rounds,
                        net_yield: c.net_yield,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(YieldCurve { protocol: name.clone(), samples })
        })
        .collect()
}

/// `start, start + step, ...` up to `stop` inclusive (with a half-step allowance
/// against rounding).
pub fn fidelity_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(start <= stop) || !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) {
        return Err(Error::InvalidInput(format!("bad grid {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 0.5).floor() as usize + 1;
    Ok((0..count).map(|i| (start + i as f64 * step).min(1.0)).collect())
}
