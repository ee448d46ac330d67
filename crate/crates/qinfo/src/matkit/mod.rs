// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra: the kernel every other module builds on.
//!
//! Eigen and singular value decompositions are delegated to nalgebra and
//! returned in a fixed order (ascending eigenvalues, descending singulars).

mod cmatrix;
mod decomp;
mod ops;

pub use cmatrix::{c, inner, r, vnorm, CMatrix, C64, I, ONE, ZERO};
pub use decomp::{
    apply_fn, column_space, fix_phase, herm_eig, hs_inner, matrix_function, norm, null_space, op_norm,
    orthonormalize, polar_unitary, qr, rank, singular_values, svd, trace_norm, HermEigen, MatFn, NormKind,
    SvdResult, HERM_TOL, SUPPORT_TOL,
};
pub use ops::{kron, kron_all, kron_vec, partial_trace, partial_transpose, permute_systems};

/// Pauli matrices.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::new(2, 2, vec![ZERO, -I, I, ZERO]).expect("2x2")
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// Computational basis vector e_i in dimension d.
pub fn ket(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[i] = ONE;
    v
}

/// Row-major vectorization, vec(|i><j|) = |i>|j>.
pub fn vec_of(m: &CMatrix) -> Vec<C64> {
    m.data().to_vec()
}

/// Inverse of `vec_of`.
pub fn unvec(v: &[C64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::new(rows, cols, v.to_vec()).expect("length matches shape")
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig(h: &CMatrix) -> crate::Result<f64> {
    Ok(herm_eig(h)?.values.first().copied().unwrap_or(0.0))
}
