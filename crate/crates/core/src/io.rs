//! JSON and CSV formats.
//!
//! State files (`form` selects the layout; vectors are coordinate arrays):
//!
//! ```json
//! {"form": "dense",   "p": 2, "n": 1, "weights": [0.85, 0.05, 0.05, 0.05]}
//! {"form": "product", "p": 2, "factors": [[0.9, 0.1, 0, 0], [0.8, 0, 0.2, 0]]}
//! {"form": "sparse",  "p": 2, "n": 2, "entries": [{"u": [0, 0, 0, 0], "weight": 1.0}]}
//! ```
//!
//! Reports and traces carry `"schema_version": 1`. Numbers in CSV output are
//! rounded to 12 significant digits.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bell::BellDiagState;
use crate::error::{Error, Result};
use crate::protocol::{IterationTrace, ProtocolReport};
use crate::rates::YieldCurve;
use crate::symplectic::SympVector;
use crate::{zp, Real};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseEntry {
    pub u: Vec<u32>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateFile {
    Dense { p: u32, n: usize, weights: Vec<f64> },
    Product { p: u32, factors: Vec<Vec<f64>> },
    Sparse { p: u32, n: usize, entries: Vec<SparseEntry> },
}

impl StateFile {
    pub fn into_state<T: Real>(self) -> Result<BellDiagState<T>> {
        let conv = |v: Vec<f64>| v.into_iter().map(T::lit).collect::<Vec<T>>();
        match self {
            StateFile::Dense { p, n, weights } => BellDiagState::dense(p, n, conv(weights)),
            StateFile::Product { p, factors } => BellDiagState::product(p, factors.into_iter().map(conv).collect()),
            StateFile::Sparse { p, n, entries } => {
                zp::check_prime(p)?;
                let size = zp::ensure_capacity("dense Bell-diagonal table", p, 2 * n, zp::ENUMERATION_LIMIT)?;
                let mut weights = vec![T::zero(); size];
                for e in entries {
                    let u = SympVector::new(p, e.u)?;
                    if u.n() != n {
                        return Err(Error::Dimension(format!("entry {u} is not over {n} pairs")));
                    }
                    weights[u.index()] = weights[u.index()] + T::lit(e.weight);
                }
                BellDiagState::dense(p, n, weights)
            }
        }
    }

    pub fn from_state<T: Real>(state: &BellDiagState<T>) -> Self {
        let conv = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<f64>>();
        if state.is_dense() {
            StateFile::Dense { p: state.p(), n: state.n(), weights: conv(state.factors()[0].weights()) }
        } else {
            StateFile::Product { p: state.p(), factors: state.factors().iter().map(|f| conv(f.weights())).collect() }
        }
    }
}

pub fn read_state<T: Real>(json: &str) -> Result<BellDiagState<T>> {
    let file: StateFile =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("bad state file: {e}")))?;
    file.into_state()
}

pub fn write_state<T: Real>(state: &BellDiagState<T>) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(state)).expect("state serializes")
}

#[derive(Serialize, Deserialize)]
struct SyndromeJson {
    syndrome: Vec<u32>,
    probability: f64,
    correction: Vec<u32>,
    accepted: bool,
    fidelity: f64,
    output_weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    schema_version: u32,
    kind: String,
    p: u32,
    n: usize,
    k: usize,
    accept_prob: f64,
    avg_fidelity_bound: f64,
    conditional_fidelity: f64,
    syndromes: Vec<SyndromeJson>,
}

pub fn report_json<T: Real>(report: &ProtocolReport<T>) -> serde_json::Value {
    let body = ReportJson {
        schema_version: SCHEMA_VERSION,
        kind: "report".into(),
        p: report.p,
        n: report.n,
        k: report.k,
        accept_prob: report.accept_prob.as_f64(),
        avg_fidelity_bound: report.avg_fidelity_bound.as_f64(),
        conditional_fidelity: report.conditional_fidelity.as_f64(),
        syndromes: report
            .records
            .iter()
            .map(|r| SyndromeJson {
                syndrome: r.syndrome.entries().to_vec(),
                probability: r.probability.as_f64(),
                correction: r.correction.coords().to_vec(),
                accepted: r.accepted,
                fidelity: r.fidelity.as_f64(),
                output_weights: r.output_weights.iter().map(|w| w.as_f64()).collect(),
            })
            .collect(),
    };
    serde_json::to_value(body).expect("report serializes")
}

#[derive(Serialize, Deserialize)]
struct RoundJson {
    round: usize,
    accept_prob: f64,
    fidelity: f64,
    hashing_yield: f64,
    net_yield: f64,
    state: StateFile,
}

#[derive(Serialize, Deserialize)]
struct TraceJson {
    schema_version: u32,
    kind: String,
    stopped_early: bool,
    rounds: Vec<RoundJson>,
}

pub fn trace_json<T: Real>(trace: &IterationTrace<T>) -> serde_json::Value {
    let body = TraceJson {
        schema_version: SCHEMA_VERSION,
        kind: "trace".into(),
        stopped_early: trace.stopped_early,
        rounds: trace
            .records
            .iter()
            .map(|r| RoundJson {
                round: r.round,
                accept_prob: r.accept_prob.as_f64(),
                fidelity: r.fidelity.as_f64(),
                hashing_yield: r.hashing_yield.as_f64(),
                net_yield: r.net_yield.as_f64(),
                state: StateFile::from_state(&r.state),
            })
            .collect(),
    };
    serde_json::to_value(body).expect("trace serializes")
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().expect("formatted float parses")
}

/// Rounds every non-integer number in `value` to `digits` significant digits.
pub fn round_json(value: &mut serde_json::Value, digits: usize) {
    match value {
        serde_json::Value::Number(num) if num.is_f64() => {
            let x = round_sig(num.as_f64().expect("f64 number"), digits);
            if let Some(r) = serde_json::Number::from_f64(x) {
                *num = r;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(|v| round_json(v, digits)),
        serde_json::Value::Object(map) => map.values_mut().for_each(|v| round_json(v, digits)),
        _ => {}
    }
}

pub const CSV_HEADER: &str = "F,protocol,best_rounds,net_yield";

/// Sweep rows ordered by grid point, then by protocol in curve order.
pub fn write_sweep_csv<T: Real, W: Write>(curves: &[YieldCurve<T>], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let points = curves.first().map_or(0, |c| c.samples.len());
    for i in 0..points {
        for c in curves {
            let s = &c.samples[i];
            writeln!(
                out,
                "{},{},{},{}",
                round_sig(s.fidelity.as_f64(), 12),
                c.protocol,
                s.best_rounds,
                round_sig(s.net_yield.as_f64(), 12)
            )?;
        }
    }
    Ok(())
}
