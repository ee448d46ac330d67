// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Tensor-structure operations. Subsystem 0 is the slowest-varying index.

use super::cmatrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (m, n) = a.shape();
    let (p, q) = b.shape();
    let mut out = CMatrix::zeros(m * p, n * q);
    for i in 0..m {
        for j in 0..n {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_all(ms: &[&CMatrix]) -> CMatrix {
    let mut acc = CMatrix::identity(1);
    for m in ms {
        acc = kron(&acc, m);
    }
    acc
}

pub fn kron_vec(u: &[super::C64], v: &[super::C64]) -> Vec<super::C64> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for &a in u {
        for &b in v {
            out.push(a * b);
        }
    }
    out
}

fn check_square(m: &CMatrix, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::Dimension(format!(
            "matrix {:?} does not match subsystem dims {dims:?}",
            m.shape()
        )));
    }
    Ok(total)
}

/// Strides of each subsystem in the flat index.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Flat offsets of every multi-index over the listed subsystems, in lexicographic order.
fn offsets(dims: &[usize], which: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &k in which {
        let mut next = Vec::with_capacity(out.len() * dims[k]);
        for &o in &out {
            for x in 0..dims[k] {
                next.push(o + x * st[k]);
            }
        }
        out = next;
    }
    out
}

/// Reduced matrix on the kept subsystems (kept order follows `dims`).
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_square(m, dims)?;
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Dimension(format!("keep {keep:?} out of range for {} subsystems", dims.len())));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let ko = offsets(dims, &kept);
    let to = offsets(dims, &traced);
    let n = ko.len();
    let mut out = CMatrix::zeros(n, n);
    for (r, &kr) in ko.iter().enumerate() {
        for (c, &kc) in ko.iter().enumerate() {
            let mut s = ZERO;
            for &t in &to {
                s += m[(kr + t, kc + t)];
            }
            out[(r, c)] = s;
        }
    }
    Ok(out)
}

pub fn partial_transpose(m: &CMatrix, dims: &[usize], sys: usize) -> Result<CMatrix> {
    let total = check_square(m, dims)?;
    if sys >= dims.len() {
        return Err(Error::Dimension(format!("system {sys} out of range for {} subsystems", dims.len())));
    }
    let st = strides(dims)[sys];
    let d = dims[sys];
    let digit = |x: usize| (x / st) % d;
    Ok(CMatrix::from_fn(total, total, |i, j| {
        let (a, b) = (digit(i), digit(j));
        let i2 = i - a * st + b * st;
        let j2 = j - b * st + a * st;
        m[(i2, j2)]
    }))
}

/// Reorders tensor factors: new factor k is old factor `perm[k]`.
pub fn permute_systems(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    let total = check_square(m, dims)?;
    let mut seen = perm.to_vec();
    seen.sort_unstable();
    if seen != (0..dims.len()).collect::<Vec<_>>() {
        return Err(Error::Dimension(format!("{perm:?} is not a permutation")));
    }
    let old_st = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let new_st = strides(&new_dims);
    let map: Vec<usize> = (0..total)
        .map(|x| {
            perm.iter()
                .enumerate()
                .map(|(k, &p)| ((x / new_st[k]) % new_dims[k]) * old_st[p])
                .sum()
        })
        .collect();
    Ok(CMatrix::from_fn(total, total, |i, j| m[(map[i], map[j])]))
}
