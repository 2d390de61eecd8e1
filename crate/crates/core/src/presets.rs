//! Built-in binary codes.
//!
//! Each preset fixes its logical basis so that the canonical encoder built by
//! [`crate::densesim::Encoder::canonical`] reproduces the classical encoders of the
//! corresponding two-way protocol:
//!
//! * `recurrence`: stabilizer `Z⊗Z`, `x̄ = X⊗X`, `z̄ = Z⊗I`. Eigenvalue +1 encodes
//!   `|0⟩,|1⟩ -> |00⟩,|11⟩`, eigenvalue -1 encodes `|0⟩,|1⟩ -> |01⟩,|10⟩`.
//! * `qpa`: stabilizer `XZ⊗XZ`, `x̄ = X⊗X`, `z̄ = XZ⊗I`, giving the `|0⟩ ± i|1⟩`
//!   product encoders of quantum privacy amplification.
//! * `xxxx-zzzz`: stabilizer `{XXXX, ZZZZ}`, `x̄_1 = IXIX`, `z̄_1 = ZZII`,
//!   `x̄_2 = IIXX`, `z̄_2 = ZIZI`, matching the four-qubit encoding table
//!   `|00⟩ -> |0000⟩ + |1111⟩`, `|01⟩ -> |0011⟩ + |1100⟩`, ...

use crate::error::{Error, Result};
use crate::stabilizer::StabilizerCode;
use crate::symplectic::SympVector;

pub const PRESET_NAMES: [&str; 3] = ["recurrence", "qpa", "xxxx-zzzz"];

fn v2(coords: &[u32]) -> SympVector {
    SympVector::new(2, coords.to_vec()).expect("preset vectors are valid")
}

pub fn recurrence() -> StabilizerCode {
    StabilizerCode::new(2, vec![v2(&[0, 1, 0, 1])])
        .and_then(|c| c.with_logical_basis(vec![v2(&[1, 0, 1, 0]), v2(&[0, 1, 0, 0])]))
        .expect("recurrence preset is a valid code")
}

pub fn qpa() -> StabilizerCode {
    StabilizerCode::new(2, vec![v2(&[1, 1, 1, 1])])
        .and_then(|c| c.with_logical_basis(vec![v2(&[1, 0, 1, 0]), v2(&[1, 1, 0, 0])]))
        .expect("qpa preset is a valid code")
}

pub fn xxxx_zzzz() -> StabilizerCode {
    StabilizerCode::new(2, vec![v2(&[1, 0, 1, 0, 1, 0, 1, 0]), v2(&[0, 1, 0, 1, 0, 1, 0, 1])])
        .and_then(|c| {
            c.with_logical_basis(vec![
                v2(&[0, 0, 1, 0, 0, 0, 1, 0]),
                v2(&[0, 1, 0, 1, 0, 0, 0, 0]),
                v2(&[0, 0, 0, 0, 1, 0, 1, 0]),
                v2(&[0, 1, 0, 0, 0, 1, 0, 0]),
            ])
        })
        .expect("xxxx-zzzz preset is a valid code")
}

pub fn preset(name: &str) -> Result<StabilizerCode> {
    match name {
        "recurrence" => Ok(recurrence()),
        "qpa" => Ok(qpa()),
        "xxxx-zzzz" => Ok(xxxx_zzzz()),
        other => Err(Error::InvalidInput(format!("unknown preset '{other}' (known: {})", PRESET_NAMES.join(", ")))),
    }
}
