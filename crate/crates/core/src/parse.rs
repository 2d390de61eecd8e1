//! Text format for stabilizer generators.
//!
//! ```text
//! # comment
//! p = 3
//! X Z^2 I
//! 0 1 1 0 0 0
//! ```
//!
//! * Blank lines and everything after `#` are ignored.
//! * `p = <prime>` sets the modulus (default 2); it must precede all generators.
//! * A line made only of integers is a coordinate row `a_1 b_1 ... a_n b_n`.
//! * Otherwise the line is a Pauli string. A single token without `^` is read one
//!   letter per qudit (`ZZ`, `XXXX`); with several tokens (or any `^`) each token is
//!   one qudit factor (`XZ XZ`, `X^2Z Z`).
//! * Factor grammar: `I`, or `X` and/or `Z` each with an optional `^e`, X before Z;
//!   `Y` means `XZ` (not the Hermitian Pauli Y).

use crate::error::{Error, Result};
use crate::stabilizer::StabilizerCode;
use crate::symplectic::SympVector;
use crate::zp;

pub fn parse_code(text: &str) -> Result<StabilizerCode> {
    let (p, generators) = parse_generators(text)?;
    StabilizerCode::new(p, generators)
}

pub fn parse_generators(text: &str) -> Result<(u32, Vec<SympVector>)> {
    let mut p = 2u32;
    let mut rows: Vec<SympVector> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let rest = rest.trim_start();
            if let Some(value) = rest.strip_prefix('=') {
                if !rows.is_empty() {
                    return Err(err("modulus must be set before any generator".into()));
                }
                p = value.trim().parse().map_err(|_| err(format!("bad modulus '{}'", value.trim())))?;
                if !zp::is_prime(p) {
                    return Err(err(format!("{p} is not prime")));
                }
                continue;
            }
        }
        let v = parse_row(line, p).map_err(err)?;
        if let Some(first) = rows.first() {
            if first.n() != v.n() {
                return Err(err(format!("generator acts on {} qudits, expected {}", v.n(), first.n())));
            }
        }
        rows.push(v);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no generators found".into() });
    }
    Ok((p, rows))
}

fn parse_row(line: &str, p: u32) -> std::result::Result<SympVector, String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.iter().all(|t| t.chars().all(|c| c.is_ascii_digit())) {
        let coords: Vec<u32> = tokens
            .iter()
            .map(|t| t.parse::<u32>().map_err(|e| e.to_string()))
            .collect::<std::result::Result<_, _>>()?;
        return SympVector::new(p, coords).map_err(|e| e.to_string());
    }
    let factors: Vec<String> = if tokens.len() == 1 && !tokens[0].contains('^') {
        tokens[0].chars().map(String::from).collect()
    } else {
        tokens.iter().map(|t| t.to_string()).collect()
    };
    let mut coords = Vec::with_capacity(2 * factors.len());
    for f in &factors {
        let (a, b) = parse_factor(f, p)?;
        coords.push(a);
        coords.push(b);
    }
    SympVector::new(p, coords).map_err(|e| e.to_string())
}

fn parse_factor(f: &str, p: u32) -> std::result::Result<(u32, u32), String> {
    if f == "I" {
        return Ok((0, 0));
    }
    if f == "Y" {
        return Ok((1 % p, 1 % p));
    }
    let bytes: Vec<char> = f.chars().collect();
    let mut i = 0;
    let mut a = None;
    let mut b = None;
    while i < bytes.len() {
        let sym = bytes[i];
        i += 1;
        let mut exp = 1u32;
        if i < bytes.len() && bytes[i] == '^' {
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(format!("missing exponent in factor '{f}'"));
            }
            exp = bytes[start..i]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| format!("bad exponent in factor '{f}'"))?;
        }
        match sym {
            'X' if a.is_none() && b.is_none() => a = Some(exp % p),
            'Z' if b.is_none() => b = Some(exp % p),
            _ => return Err(format!("malformed factor '{f}'")),
        }
    }
    if a.is_none() && b.is_none() {
        return Err(format!("empty factor '{f}'"));
    }
    Ok((a.unwrap_or(0), b.unwrap_or(0)))
}
