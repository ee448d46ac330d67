// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::linalg::{SymmetricEigen, SVD};

use super::cmatrix::{inner, vnorm, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance.
pub const HERM_TOL: f64 = 1e-10;
/// Relative support cutoff shared by pseudo-inverses, logarithms and entropies.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct HermEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: CMatrix,
}

impl HermEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// V f(Λ) V†
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.rows();
        let k = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = CMatrix::zeros(n, n);
        for (t, &w) in fv.iter().enumerate().take(k) {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, t)] * w;
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, t)].conj();
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SvdResult {
    pub left: CMatrix,
    /// Descending.
    pub singulars: Vec<f64>,
    pub right: CMatrix,
}

impl SvdResult {
    pub fn rank(&self, rel_tol: f64) -> usize {
        let top = self.singulars.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.singulars.iter().filter(|&&s| s > rel_tol * top).count()
    }
}

pub fn herm_eig(h: &CMatrix) -> Result<HermEigen> {
    if !h.is_square() {
        return Err(Error::Dimension(format!("herm_eig needs a square matrix, got {:?}", h.shape())));
    }
    let defect = h.hermiticity_defect();
    if defect > HERM_TOL * (1.0 + h.frobenius()) {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.rows();
    if n == 0 {
        return Ok(HermEigen { values: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    let eig = SymmetricEigen::new(h.hermitian_part().to_na());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermEigen { values, vectors })
}

pub fn svd(m: &CMatrix) -> SvdResult {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return SvdResult { left: CMatrix::zeros(r, 0), singulars: vec![], right: CMatrix::zeros(c, 0) };
    }
    let s = SVD::new(m.to_na(), true, true);
    let u = s.u.expect("u requested");
    let vt = s.v_t.expect("v requested");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s.singular_values[b].total_cmp(&s.singular_values[a]));
    SvdResult {
        left: CMatrix::from_fn(r, k, |i, j| u[(i, order[j])]),
        singulars: order.iter().map(|&t| s.singular_values[t]).collect(),
        right: CMatrix::from_fn(c, k, |i, j| vt[(order[j], i)].conj()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatFn {
    Sqrt,
    Log2,
    Ln,
    Exp,
    /// Inverse square root on the support, zero elsewhere.
    PinvSqrt,
    /// Inverse on the support, zero elsewhere.
    Pinv,
}

pub fn matrix_function(h: &CMatrix, f: MatFn) -> Result<CMatrix> {
    let e = herm_eig(h)?;
    apply_fn(&e, f)
}

/// Applies `f` to an existing decomposition.
pub fn apply_fn(e: &HermEigen, f: MatFn) -> Result<CMatrix> {
    let top = e.max_abs();
    let cut = SUPPORT_TOL * top;
    if matches!(f, MatFn::Sqrt | MatFn::Log2 | MatFn::Ln) {
        if let Some(&lo) = e.values.first() {
            if lo < -HERM_TOL * top {
                return Err(Error::NegativeEigenvalue(lo));
            }
        }
    }
    let on = |x: f64| x > cut;
    Ok(match f {
        MatFn::Sqrt => e.rebuild(|x| if on(x) { x.sqrt() } else { 0.0 }),
        MatFn::Log2 => e.rebuild(|x| if on(x) { x.log2() } else { 0.0 }),
        MatFn::Ln => e.rebuild(|x| if on(x) { x.ln() } else { 0.0 }),
        MatFn::Exp => e.rebuild(f64::exp),
        MatFn::PinvSqrt => e.rebuild(|x| if on(x) { 1.0 / x.sqrt() } else { 0.0 }),
        MatFn::Pinv => e.rebuild(|x| if x.abs() > cut { 1.0 / x } else { 0.0 }),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    Trace,
    Operator,
    Frobenius,
}

/// Drops rows and columns that are exactly zero; singular values are unchanged.
fn compress(m: &CMatrix) -> CMatrix {
    let (r, c) = m.shape();
    let rows: Vec<usize> = (0..r).filter(|&i| m.row(i).iter().any(|z| *z != ZERO)).collect();
    let cols: Vec<usize> = (0..c).filter(|&j| (0..r).any(|i| m[(i, j)] != ZERO)).collect();
    if rows.len() == r && cols.len() == c {
        return m.clone();
    }
    if m.is_square() {
        // Keep a square principal block so the eigen path still applies.
        let mut idx = rows;
        idx.extend(cols);
        idx.sort_unstable();
        idx.dedup();
        return CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
    }
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let m = compress(m);
    if m.rows() == 0 || m.cols() == 0 {
        return vec![];
    }
    if m.is_square() && m.hermiticity_defect() <= 1e-14 * (1.0 + m.frobenius()) {
        let e = herm_eig(&m).expect("checked Hermitian");
        let mut s: Vec<f64> = e.values.iter().map(|v| v.abs()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        return s;
    }
    svd(&m).singulars
}

pub fn norm(m: &CMatrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::Frobenius => m.frobenius(),
        NormKind::Trace => singular_values(m).iter().sum(),
        NormKind::Operator => singular_values(m).first().copied().unwrap_or(0.0),
    }
}

pub fn trace_norm(m: &CMatrix) -> f64 {
    norm(m, NormKind::Trace)
}

pub fn op_norm(m: &CMatrix) -> f64 {
    norm(m, NormKind::Operator)
}

/// Tr[a† b]
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!("hs_inner of {:?} and {:?}", a.shape(), b.shape())));
    }
    Ok(inner(a.data(), b.data()))
}

/// Numerical rank with singular values above `rel_tol`·σ_max.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    svd(m).rank(rel_tol)
}

/// Orthonormal basis of the span of `vecs` (modified Gram-Schmidt with
/// reorthogonalization; vectors whose residual falls below `rel_tol` times
/// the largest input norm are dropped).
pub fn orthonormalize(vecs: &[Vec<C64>], rel_tol: f64) -> Vec<Vec<C64>> {
    let scale = vecs.iter().map(|v| vnorm(v)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    for v in vecs {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = inner(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let n = vnorm(&w);
        if n > rel_tol * scale {
            basis.push(w.iter().map(|z| z / n).collect());
        }
    }
    basis
}

/// Orthonormal basis of the column span, via SVD (rank-revealing).
pub fn column_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let s = svd(m);
    let r = s.rank(rel_tol);
    s.left.block(0, m.rows(), 0, r)
}

/// Orthonormal basis of {x : m x = 0} as columns.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let (r, c) = m.shape();
    if c == 0 {
        return CMatrix::zeros(0, 0);
    }
    // Pad to at least square so the SVD returns a full right basis.
    let padded = if r < c {
        let mut p = CMatrix::zeros(c, c);
        p.set_block(0, 0, m);
        p
    } else {
        m.clone()
    };
    let s = svd(&padded);
    let top = s.singulars.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..c).filter(|&k| top == 0.0 || s.singulars[k] <= rel_tol * top).collect();
    CMatrix::from_fn(c, keep.len(), |i, j| s.right[(i, keep[j])])
}

/// Thin QR via nalgebra; R has a real nonnegative diagonal only up to phase.
pub fn qr(m: &CMatrix) -> (CMatrix, CMatrix) {
    let q = m.to_na().qr();
    (CMatrix::from_na(&q.q()), CMatrix::from_na(&q.r()))
}

/// Polar factor U of m = U P (m square, U unitary).
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let s = svd(m);
    s.left.matmul(&s.right.adjoint())
}

/// Normalizes the phase of `v` so its largest-magnitude entry is real positive
/// (first such entry on ties).
pub fn fix_phase(v: &mut [C64]) {
    let mut best = 0;
    let mut bmag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > bmag * (1.0 + 1e-12) {
            bmag = a;
            best = i;
        }
    }
    if bmag > 0.0 {
        let ph = v[best].conj() / bmag;
        for z in v.iter_mut() {
            *z *= ph;
        }
    }
}
