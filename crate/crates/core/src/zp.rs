//! Arithmetic and linear systems over the prime field Z_p.
//!
//! Residues are stored as `u32` in `0..p`; products are formed in `u64`.

use crate::error::{Error, Result};

/// Largest table (in entries) the enumeration routines will allocate: 2^20.
pub const ENUMERATION_LIMIT: u128 = 1 << 20;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

#[inline]
pub fn add(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + b as u64) % p as u64) as u32
}

#[inline]
pub fn sub(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + p as u64 - (b % p) as u64) % p as u64) as u32
}

#[inline]
pub fn mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub fn neg(a: u32, p: u32) -> u32 {
    (p - a % p) % p
}

/// Multiplicative inverse by Fermat's little theorem. `a` must be nonzero mod p.
pub fn inv(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow(a, p - 2, p)
}

pub fn pow(mut base: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, p);
        }
        base = mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// `p^e` as u128, saturating so that absurd sizes still compare against limits.
pub fn checked_size(p: u32, e: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.saturating_mul(p as u128);
    }
    acc
}

pub fn ensure_capacity(what: &'static str, p: u32, exponent: usize, limit: u128) -> Result<usize> {
    let needed = checked_size(p, exponent);
    if needed > limit {
        Err(Error::Capacity { what, needed, limit })
    } else {
        Ok(needed as usize)
    }
}

/// Reduced row echelon form in place. Returns the pivot column of each nonzero row;
/// zero rows are dropped.
pub fn rref(rows: &mut Vec<Vec<u32>>, p: u32) -> Vec<usize> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let scale = inv(rows[r][col], p);
        for x in rows[r].iter_mut() {
            *x = mul(*x, scale, p);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = sub(*x, mul(f, y, p), p);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of the right null space `{x : rows · x = 0}`.
pub fn null_space(rows: &[Vec<u32>], width: usize, p: u32) -> Vec<Vec<u32>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, p);
    let mut basis = Vec::new();
    for free in (0..width).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u32; width];
        v[free] = 1;
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = neg(row[free], p);
        }
        basis.push(v);
    }
    basis
}

/// One solution of `rows · x = rhs`, or `None` when the system is inconsistent.
pub fn solve(rows: &[Vec<u32>], rhs: &[u32], width: usize, p: u32) -> Option<Vec<u32>> {
    let mut aug: Vec<Vec<u32>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut v = r.clone();
            v.push(b % p);
            v
        })
        .collect();
    let pivots = rref(&mut aug, p);
    if pivots.contains(&width) {
        return None;
    }
    let mut x = vec![0u32; width];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[width];
    }
    Some(x)
}
