//! Entanglement distillation protocols converted from prime-p stabilizer codes.
//!
//! A stabilizer code with generators `g_1 … g_{n-k}` over Z_p becomes a protocol on
//! `n` shared pairs: Alice measures the conjugated generators, Bob the generators,
//! Bob corrects with a guessed error `e(s)` for the outcome difference `s`, both run
//! the inverse encoder and keep `k` pairs, and a two-way variant discards the block
//! for unfavourable `s`.
//!
//! For Bell-diagonal inputs everything reduces to sums of the weight table over
//! cosets of the stabilizer subspace C, which is what [`protocol::analyze`] computes
//! exactly. [`densesim`] carries out the same steps on explicit state vectors and
//! serves as an independent check.
//!
//! Modules:
//! * [`zp`], [`symplectic`]: exact linear algebra over Z_p with the symplectic form.
//! * [`stabilizer`], [`presets`], [`parse`]: codes, syndromes, logical classes.
//! * [`bell`]: Bell-diagonal weight tables.
//! * [`protocol`]: the conversion, decoding, reports, iteration, fidelity bounds.
//! * [`rates`]: entropies, hashing yields, iterate-then-hash sweeps.
//! * [`densesim`]: dense complex oracle.
//! * [`io`]: JSON/CSV formats.
//!
//! Real-valued quantities are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix `f64`.

// `!(x >= 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod densesim;
pub mod error;
pub mod io;
pub mod parse;
pub mod presets;
pub mod protocol;
pub mod rates;
pub mod stabilizer;
pub mod symplectic;
pub mod zp;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub use bell::BellDiagState;
pub use error::{Error, Result};
pub use protocol::{AcceptPolicy, ConvertedProtocol, Decoder, IterationTrace, ProtocolReport};
pub use stabilizer::{DecodeTable, LogicalClass, StabilizerCode, Syndrome};
pub use symplectic::{SympSubspace, SympVector};

/// Floating-point scalar for weights, probabilities, fidelities and amplitudes.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + serde::Serialize
    + for<'de> serde::Deserialize<'de>
    + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type BellDiagState64 = BellDiagState<f64>;
pub type ProtocolReport64 = ProtocolReport<f64>;
pub type IterationTrace64 = IterationTrace<f64>;
pub type DenseState64 = densesim::DenseState<f64>;
pub type DenseOperator64 = densesim::DenseOperator<f64>;
pub type Ensemble64 = densesim::Ensemble<f64>;
pub type YieldCurve64 = rates::YieldCurve<f64>;
