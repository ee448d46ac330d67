// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! PPT test and matrix subspaces whose nonzero elements have bounded-below rank.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::matkit::{self, hs_inner, orthonormalize, partial_transpose, svd, CMatrix, C64};
use crate::randkit::gaussian_c64;
use crate::states::{unitary_error_basis, State};

/// Shared rank cutoff: singular values below this times σ_max count as zero.
pub const RANK_TOL: f64 = 1e-8;

/// Peres test across `0..cut | cut..`: partial transpose of the second part is PSD to −1e−9.
pub fn ppt_test(rho: &State, cut: usize) -> Result<bool> {
    let dims = rho.dims();
    if cut == 0 || cut >= dims.len() {
        return Err(Error::Dimension(format!("cut {cut} for dims {dims:?}")));
    }
    let mut m = rho.rho().clone();
    for sys in cut..dims.len() {
        m = partial_transpose(&m, dims, sys)?;
    }
    Ok(matkit::min_eig(&m.hermitian_part())? >= -1e-9)
}

#[derive(Clone, Debug)]
pub struct MatrixSubspace {
    ambient: (usize, usize),
    basis: Vec<CMatrix>,
}

impl MatrixSubspace {
    /// Orthonormalizes the spanning set (dependent members are dropped).
    pub fn from_spanning(ambient: (usize, usize), span: &[CMatrix]) -> Result<Self> {
        if let Some(b) = span.iter().find(|b| b.shape() != ambient) {
            return Err(Error::Dimension(format!("element {:?} in M({}, {})", b.shape(), ambient.0, ambient.1)));
        }
        let vecs: Vec<Vec<C64>> = span.iter().map(|b| b.data().to_vec()).collect();
        let basis = orthonormalize(&vecs, 1e-10)
            .into_iter()
            .map(|v| CMatrix::new(ambient.0, ambient.1, v).expect("shape preserved"))
            .collect();
        Ok(Self { ambient, basis })
    }

    pub fn ambient(&self) -> (usize, usize) {
        self.ambient
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Gaussian combination of the basis.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        let mut x = CMatrix::zeros(self.ambient.0, self.ambient.1);
        for b in &self.basis {
            x += &b.scale(gaussian_c64(rng));
        }
        x
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let mut p = CMatrix::zeros(self.ambient.0, self.ambient.1);
        for b in &self.basis {
            p += &b.scale(hs_inner(b, x).expect("same shape"));
        }
        p
    }

    pub fn residual(&self, x: &CMatrix) -> f64 {
        (x - &self.project(x)).frobenius()
    }

    /// Orthonormal basis of the Hilbert-Schmidt orthogonal complement.
    pub fn orthogonal_complement(&self) -> MatrixSubspace {
        let (m, n) = self.ambient;
        let mut vecs: Vec<Vec<C64>> = self.basis.iter().map(|b| b.data().to_vec()).collect();
        let own = vecs.len();
        for t in 0..m * n {
            vecs.push(matkit::ket(m * n, t));
        }
        let all = orthonormalize(&vecs, 1e-10);
        let basis = all[own..]
            .iter()
            .map(|v| CMatrix::new(m, n, v.clone()).expect("shape preserved"))
            .collect();
        MatrixSubspace { ambient: self.ambient, basis }
    }
}

/// p_α = 1 + α/n² for α = 1..n².
pub fn default_phi_eigs(n: usize) -> Vec<f64> {
    let n2 = (n * n) as f64;
    (1..=n * n).map(|a| 1.0 + a as f64 / n2).collect()
}

/// Φ(B) = Σ_α p_α W_α <W_α, B>/n over the Weyl basis.
pub fn phi_map(n: usize, eigs: &[f64], b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(n, n);
    for (w, &p) in unitary_error_basis(n).iter().zip(eigs) {
        let c = hs_inner(w, b).expect("n x n") * (p / n as f64);
        out += &w.scale(c);
    }
    out
}

/// {[[A, Φ(B)], [B, A]]} ⊂ M_2n, dimension 2n².
pub fn rank2_subspace(n: usize, phi_eigs: &[f64]) -> Result<MatrixSubspace> {
    if phi_eigs.len() != n * n || phi_eigs.iter().any(|&p| p <= 0.0 || !p.is_finite()) {
        return Err(Error::EigsNotDistinct);
    }
    let mut sorted = phi_eigs.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] <= 1e-12 * w[1]) {
        return Err(Error::EigsNotDistinct);
    }
    let mut span = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            let e = CMatrix::unit(n, n, i, j);
            let mut a = CMatrix::zeros(2 * n, 2 * n);
            a.set_block(0, 0, &e);
            a.set_block(n, n, &e);
            span.push(a);
            let mut b = CMatrix::zeros(2 * n, 2 * n);
            b.set_block(0, n, &phi_map(n, phi_eigs, &e));
            b.set_block(n, 0, &e);
            span.push(b);
        }
    }
    MatrixSubspace::from_spanning((2 * n, 2 * n), &span)
}

/// Orthogonal complement of a `rank2_subspace`, spanned by [[K, L], [−Φ(L), −K]].
pub fn rank2_complement(s: &MatrixSubspace) -> MatrixSubspace {
    s.orthogonal_complement()
}

/// Diagonal-fill construction in M(m, n): diagonals of length p ≤ k are zero,
/// longer ones carry P(z_i) with deg P < p − k at nodes z_i = 1..p.
pub fn min_rank_subspace(m: usize, n: usize, k: usize) -> Result<MatrixSubspace> {
    if k >= m.min(n) {
        return Err(Error::KOutOfRange { k, m, n });
    }
    let mut span = Vec::new();
    for t in -(m as isize - 1)..(n as isize) {
        let cells: Vec<(usize, usize)> = (0..m)
            .filter_map(|i| {
                let j = i as isize + t;
                (j >= 0 && (j as usize) < n).then_some((i, j as usize))
            })
            .collect();
        let p = cells.len();
        if p <= k {
            continue;
        }
        for e in 0..(p - k) {
            let mut x = CMatrix::zeros(m, n);
            for (pos, &(i, j)) in cells.iter().enumerate() {
                x[(i, j)] = C64::new(((pos + 1) as f64).powi(e as i32), 0.0);
            }
            span.push(x);
        }
    }
    MatrixSubspace::from_spanning((m, n), &span)
}

/// Smallest rank among the basis elements and `samples` random elements;
/// passes iff it is at least k + 1.
pub fn verify_min_rank(s: &MatrixSubspace, k: usize, samples: usize, seed: u64) -> (usize, bool) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut lo = usize::MAX;
    for b in &s.basis {
        lo = lo.min(svd(b).rank(RANK_TOL));
    }
    for _ in 0..samples {
        let x = s.random_element(&mut rng);
        lo = lo.min(svd(&x).rank(RANK_TOL));
    }
    if s.dim() == 0 {
        return (0, true);
    }
    (lo, lo > k)
}

/// Coefficient matrix Γ(ψ) of a vector in C^m ⊗ C^n.
pub fn reshape_vector(psi: &[C64], m: usize, n: usize) -> Result<CMatrix> {
    CMatrix::new(m, n, psi.to_vec())
}
