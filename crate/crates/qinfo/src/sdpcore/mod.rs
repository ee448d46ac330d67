// Copyright 2026 qinfo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Small dense semidefinite programs over block-diagonal real symmetric variables.
//!
//! Standard form, matching the SDPA convention with F0 = C, F_i = A_i, c = b:
//!
//! ```text
//! primal   max ⟨C, X⟩   s.t. ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! dual     min bᵀy      s.t. Z = Σ y_i A_i − C ⪰ 0
//! ```
//!
//! Complex Hermitian blocks of size n are embedded as real symmetric blocks
//! of size 2n via H ↦ [[Re H, −Im H], [Im H, Re H]], with every coefficient
//! halved so inner products and objective values are preserved.

mod sdpa;
mod solver;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matkit::{CMatrix, C64};

pub use sdpa::to_sdpa_string;
pub use solver::{solve, IterRecord, SdpOptions, SdpSolution, SdpStatus};

pub type RMat = DMatrix<f64>;

/// One equality constraint Σ_blocks ⟨A^k, X^k⟩ = rhs; `None` marks a zero block.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub mats: Vec<Option<RMat>>,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    block_sizes: Vec<usize>,
    c: Vec<RMat>,
    constraints: Vec<Constraint>,
}

fn symmetric_defect(m: &RMat) -> f64 {
    (m - m.transpose()).amax()
}

impl SdpProblem {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(Error::Dimension(format!("block sizes {block_sizes:?} must be positive")));
        }
        let c = block_sizes.iter().map(|&s| RMat::zeros(s, s)).collect();
        Ok(Self { block_sizes, c, constraints: Vec::new() })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn objective(&self) -> &[RMat] {
        &self.c
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    fn check_block(&self, k: usize, m: &RMat) -> Result<()> {
        let s = *self.block_sizes.get(k).ok_or_else(|| Error::Dimension(format!("no block {k}")))?;
        if m.shape() != (s, s) {
            return Err(Error::Dimension(format!("block {k} is {s}x{s}, got {:?}", m.shape())));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = symmetric_defect(m);
        if defect > 1e-12 * (1.0 + m.amax()) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(())
    }

    pub fn set_objective(&mut self, block: usize, m: RMat) -> Result<()> {
        self.check_block(block, &m)?;
        self.c[block] = (&m + m.transpose()) * 0.5;
        Ok(())
    }

    /// Adds Σ_k ⟨A^k, X^k⟩ = rhs for the listed (block, A^k) pairs.
    pub fn add_constraint(&mut self, parts: Vec<(usize, RMat)>, rhs: f64) -> Result<()> {
        if !rhs.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut mats: Vec<Option<RMat>> = vec![None; self.block_sizes.len()];
        for (k, m) in parts {
            self.check_block(k, &m)?;
            let sym = (&m + m.transpose()) * 0.5;
            mats[k] = Some(match mats[k].take() {
                Some(prev) => prev + sym,
                None => sym,
            });
        }
        self.constraints.push(Constraint { mats, rhs });
        Ok(())
    }
}

/// [[Re H, −Im H], [Im H, Re H]]
pub fn embed_hermitian(h: &CMatrix) -> RMat {
    let n = h.rows();
    RMat::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Inverse of `embed_hermitian`, averaging the two copies.
pub fn extract_hermitian(y: &RMat) -> CMatrix {
    let n = y.nrows() / 2;
    CMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (y[(i, j)] + y[(i + n, j + n)]);
        let im = 0.5 * (y[(i + n, j)] - y[(i, j + n)]);
        C64::new(re, im)
    })
}

/// SDP over complex Hermitian blocks, lowered to the real form on demand.
#[derive(Clone, Debug)]
pub struct HermitianSdp {
    block_sizes: Vec<usize>,
    c: Vec<Option<CMatrix>>,
    constraints: Vec<(Vec<(usize, CMatrix)>, f64)>,
}

impl HermitianSdp {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(Error::Dimension(format!("block sizes {block_sizes:?} must be positive")));
        }
        let nb = block_sizes.len();
        Ok(Self { block_sizes, c: vec![None; nb], constraints: Vec::new() })
    }

    fn check(&self, k: usize, h: &CMatrix) -> Result<()> {
        let s = *self.block_sizes.get(k).ok_or_else(|| Error::Dimension(format!("no block {k}")))?;
        if h.shape() != (s, s) {
            return Err(Error::Dimension(format!("block {k} is {s}x{s}, got {:?}", h.shape())));
        }
        if !h.is_hermitian(1e-12) {
            return Err(Error::NotHermitian(h.hermiticity_defect()));
        }
        Ok(())
    }

    pub fn set_objective(&mut self, block: usize, h: CMatrix) -> Result<()> {
        self.check(block, &h)?;
        self.c[block] = Some(h);
        Ok(())
    }

    pub fn add_constraint(&mut self, parts: Vec<(usize, CMatrix)>, rhs: f64) -> Result<()> {
        for (k, h) in &parts {
            self.check(*k, h)?;
        }
        self.constraints.push((parts, rhs));
        Ok(())
    }

    pub fn to_real(&self) -> Result<SdpProblem> {
        let mut p = SdpProblem::new(self.block_sizes.iter().map(|s| 2 * s).collect())?;
        for (k, c) in self.c.iter().enumerate() {
            if let Some(h) = c {
                p.set_objective(k, embed_hermitian(h) * 0.5)?;
            }
        }
        for (parts, rhs) in &self.constraints {
            let real = parts.iter().map(|(k, h)| (*k, embed_hermitian(h) * 0.5)).collect();
            p.add_constraint(real, *rhs)?;
        }
        Ok(p)
    }

    /// Solves the embedding and maps the primal blocks back to Hermitian form.
    pub fn solve(&self, opts: &SdpOptions) -> Result<(SdpSolution, Vec<CMatrix>)> {
        let sol = solve(&self.to_real()?, opts)?;
        let x = sol.x.iter().map(extract_hermitian).collect();
        Ok((sol, x))
    }
}
